#pragma once
// Signature grids: vertices carrying named signatures, edges joining ports,
// optional external (dangling) ports.

#include <map>
#include <string>
#include <vector>

#include "holant3/mat3.hpp"
#include "holant3/sig.hpp"

namespace holant3 {

// A vertex signature is either symmetric (any arity) or an explicitly
// oriented binary stored as a matrix: port 0 indexes the row, port 1 the
// column. Oriented binaries arise from splicing transformations onto edges.
struct GridSignature {
  enum class Kind { Symmetric, Matrix } kind = Kind::Symmetric;
  SymSig sym;
  Mat3 mat;

  int arity() const { return kind == Kind::Symmetric ? sym.arity : 2; }
  cplx value(const std::vector<int>& letters) const;

  static GridSignature symmetric(SymSig s) {
    GridSignature g;
    g.kind = Kind::Symmetric;
    g.sym = std::move(s);
    return g;
  }
  static GridSignature matrix(const Mat3& m) {
    GridSignature g;
    g.kind = Kind::Matrix;
    g.mat = m;
    return g;
  }
};

struct PortRef {
  int vertex = -1;
  int port = -1;
  bool operator==(const PortRef&) const = default;
};

struct Edge {
  PortRef a, b;
};

struct Vertex {
  std::string id;
  std::string sig;
};

struct SignatureGrid {
  std::map<std::string, GridSignature> signatures;
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<PortRef> externals;

  int vertex_index(const std::string& id) const;  // -1 when absent
  const GridSignature& sig_of(int vertex) const;
  int arity_of(int vertex) const;

  // Builder helpers.
  int add_vertex(const std::string& id, const std::string& sig);
  void add_edge(int va, int pa, int vb, int pb);
  void add_external(int v, int p);

  // Checks that signature names resolve and every port of every vertex is
  // used exactly once across edges and externals. Throws HolantError.
  void validate() const;
};

// Where each port of each vertex connects: edge slot (edge index, which end)
// or external slot (external index).
struct PortSlot {
  enum class Kind { Unset, EdgeEnd, External } kind = Kind::Unset;
  int index = -1;  // edge index or external index
  int end = 0;     // 0 = edge.a, 1 = edge.b
};

// ports[v][p]; validate() must hold.
std::vector<std::vector<PortSlot>> port_map(const SignatureGrid& g);

// Same construction from raw arities; vertex names default to indices.
std::vector<std::vector<PortSlot>> port_map_generic(
    const std::vector<int>& arities, const std::vector<Edge>& edges,
    const std::vector<PortRef>& externals);

// Connected components over shared edges (externals do not connect).
// Returns component id per vertex and the number of components.
std::pair<std::vector<int>, int> components(const SignatureGrid& g);

// Letters on every edge (and every external) determine each vertex's local
// tuple; the grid value for the assignment is the product of vertex values.
cplx assignment_value(const SignatureGrid& g,
                      const std::vector<std::vector<PortSlot>>& ports,
                      const std::vector<int>& edge_letters,
                      const std::vector<int>& external_letters);

}  // namespace holant3
