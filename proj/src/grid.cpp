#include "holant3/grid.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace holant3 {

cplx GridSignature::value(const std::vector<int>& letters) const {
  if (kind == Kind::Matrix) {
    return mat(letters[0], letters[1]);
  }
  Counts c;
  for (int l : letters) {
    if (l == B) ++c.i;
    else if (l == G) ++c.j;
    else ++c.k;
  }
  return sym.at(c);
}

int SignatureGrid::vertex_index(const std::string& id) const {
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i].id == id) return static_cast<int>(i);
  return -1;
}

const GridSignature& SignatureGrid::sig_of(int vertex) const {
  auto it = signatures.find(vertices[vertex].sig);
  if (it == signatures.end())
    fail(Err::UnknownSignature, "vertex " + vertices[vertex].id +
                                    " references '" + vertices[vertex].sig + "'");
  return it->second;
}

int SignatureGrid::arity_of(int vertex) const { return sig_of(vertex).arity(); }

int SignatureGrid::add_vertex(const std::string& id, const std::string& sig) {
  vertices.push_back(Vertex{id, sig});
  return static_cast<int>(vertices.size()) - 1;
}

void SignatureGrid::add_edge(int va, int pa, int vb, int pb) {
  edges.push_back(Edge{PortRef{va, pa}, PortRef{vb, pb}});
}

void SignatureGrid::add_external(int v, int p) {
  externals.push_back(PortRef{v, p});
}

void SignatureGrid::validate() const {
  for (const auto& v : vertices)
    if (!signatures.count(v.sig))
      fail(Err::UnknownSignature,
           "vertex " + v.id + " references '" + v.sig + "'");
  (void)port_map(*this);
}

std::vector<std::vector<PortSlot>> port_map_generic(
    const std::vector<int>& arities, const std::vector<Edge>& edges,
    const std::vector<PortRef>& externals) {
  std::vector<std::vector<PortSlot>> ports(arities.size());
  for (std::size_t v = 0; v < arities.size(); ++v) ports[v].resize(arities[v]);

  auto claim = [&](const PortRef& pr, PortSlot slot, const char* what) {
    if (pr.vertex < 0 || pr.vertex >= static_cast<int>(ports.size()))
      fail(Err::Validation, std::string(what) + ": vertex index out of range");
    auto& vp = ports[pr.vertex];
    if (pr.port < 0 || pr.port >= static_cast<int>(vp.size()))
      fail(Err::Validation, std::string(what) + ": port " +
                                std::to_string(pr.port) +
                                " out of range for vertex " +
                                std::to_string(pr.vertex));
    if (vp[pr.port].kind != PortSlot::Kind::Unset)
      fail(Err::PortReused, "vertex " + std::to_string(pr.vertex) + " port " +
                                std::to_string(pr.port) + " used twice");
    vp[pr.port] = slot;
  };

  for (std::size_t e = 0; e < edges.size(); ++e) {
    claim(edges[e].a, PortSlot{PortSlot::Kind::EdgeEnd, static_cast<int>(e), 0},
          "edge");
    claim(edges[e].b, PortSlot{PortSlot::Kind::EdgeEnd, static_cast<int>(e), 1},
          "edge");
  }
  for (std::size_t x = 0; x < externals.size(); ++x)
    claim(externals[x],
          PortSlot{PortSlot::Kind::External, static_cast<int>(x), 0}, "external");

  for (std::size_t v = 0; v < ports.size(); ++v)
    for (std::size_t p = 0; p < ports[v].size(); ++p)
      if (ports[v][p].kind == PortSlot::Kind::Unset)
        fail(Err::PortMissing, "vertex " + std::to_string(v) + " port " +
                                   std::to_string(p) + " is unconnected");
  return ports;
}

std::vector<std::vector<PortSlot>> port_map(const SignatureGrid& g) {
  std::vector<int> arities(g.vertices.size());
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    arities[v] = g.arity_of(static_cast<int>(v));
  return port_map_generic(arities, g.edges, g.externals);
}

std::pair<std::vector<int>, int> components(const SignatureGrid& g) {
  int n = static_cast<int>(g.vertices.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges) {
    int a = find(e.a.vertex), b = find(e.b.vertex);
    if (a != b) parent[a] = b;
  }
  std::vector<int> label(n, -1);
  int count = 0;
  for (int v = 0; v < n; ++v) {
    int r = find(v);
    if (label[r] < 0) label[r] = count++;
    label[v] = label[r];
  }
  return {label, count};
}

cplx assignment_value(const SignatureGrid& g,
                      const std::vector<std::vector<PortSlot>>& ports,
                      const std::vector<int>& edge_letters,
                      const std::vector<int>& external_letters) {
  cplx prod = 1.0;
  std::vector<int> letters;
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    letters.clear();
    for (const auto& slot : ports[v]) {
      int l = slot.kind == PortSlot::Kind::EdgeEnd ? edge_letters[slot.index]
                                                   : external_letters[slot.index];
      letters.push_back(l);
    }
    prod *= g.sig_of(static_cast<int>(v)).value(letters);
    if (prod == cplx(0)) return prod;
  }
  return prod;
}

}  // namespace holant3
