#include "z2hubo/graph_map.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "z2hubo/error.hpp"
#include "z2hubo/io.hpp"

namespace z2hubo {

std::size_t HuboGraph::dangling_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(edges.begin(), edges.end(), [](const Edge& e) { return e.dangling(); }));
}

HuboGraph build_hubo_graph(const HuboPolynomial& poly) {
  HuboGraph g;
  g.edges.resize(poly.n_vars());
  g.coefficients.reserve(poly.terms().size());
  g.rotation.reserve(poly.terms().size());
  for (std::size_t k = 0; k < poly.terms().size(); ++k) {
    const Term& term = poly.terms()[k];
    const auto vertex = static_cast<std::int64_t>(k);
    for (Index var : term.order) {
      auto& e = g.edges[var];
      if (e.u == HuboGraph::kNone) {
        e.u = vertex;
      } else if (e.v == HuboGraph::kNone) {
        e.v = vertex;
      } else {
        throw MappingError("variable s" + std::to_string(var + 1) +
                           " appears in three or more terms; only variables shared by at "
                           "most two terms can be mapped to a HUBO-graph edge");
      }
    }
    g.coefficients.push_back(term.coefficient);
    g.rotation.push_back(term.order);
  }
  return g;
}

namespace {

struct Adjacent {
  Index edge;
  std::int64_t vertex;
};

std::vector<std::vector<Adjacent>> proper_adjacency(const HuboGraph& g) {
  std::vector<std::vector<Adjacent>> adj(g.vertex_count());
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    for (Index e : g.rotation[v]) {
      const auto& edge = g.edges[e];
      if (!edge.proper()) continue;
      adj[v].push_back({e, edge.other(static_cast<std::int64_t>(v))});
    }
  }
  return adj;
}

/// True if an edge joins two vertices of the cyclic sequence that are not
/// neighbours on it. Parallel copies of cycle edges do not count.
bool has_cross_chord(const std::vector<std::vector<Adjacent>>& adj,
                     const std::vector<std::int64_t>& cyclic) {
  const std::size_t n = cyclic.size();
  std::map<std::int64_t, std::size_t> position;
  for (std::size_t k = 0; k < n; ++k) position[cyclic[k]] = k;
  for (std::size_t k = 0; k < n; ++k) {
    for (const auto& a : adj[static_cast<std::size_t>(cyclic[k])]) {
      const auto it = position.find(a.vertex);
      if (it == position.end()) continue;
      const std::size_t gap = (it->second + n - k) % n;
      if (gap != 0 && gap != 1 && gap != n - 1) return true;
    }
  }
  return false;
}

struct FaceTrace {
  std::vector<Cycle> faces;
  bool clean = true;
};

FaceTrace trace_faces(const HuboGraph& g, std::size_t k_m) {
  const auto adj = proper_adjacency(g);
  // Position of edge e in the proper rotation at each endpoint.
  std::vector<std::size_t> pos_u(g.edge_count(), 0), pos_v(g.edge_count(), 0);
  for (std::size_t v = 0; v < adj.size(); ++v) {
    for (std::size_t k = 0; k < adj[v].size(); ++k) {
      const Index e = adj[v][k].edge;
      (g.edges[e].u == static_cast<std::int64_t>(v) ? pos_u : pos_v)[e] = k;
    }
  }
  // Dart 2e leaves u, dart 2e+1 leaves v.
  std::vector<char> used(2 * g.edge_count(), 0);
  FaceTrace out;
  std::set<Cycle> seen;
  for (std::size_t e0 = 0; e0 < g.edge_count(); ++e0) {
    if (!g.edges[e0].proper()) continue;
    for (int side = 0; side < 2; ++side) {
      if (used[2 * e0 + side]) continue;
      std::vector<Index> walk;
      std::vector<std::int64_t> vertices;
      std::size_t e = e0;
      int s = side;
      while (!used[2 * e + s]) {
        used[2 * e + s] = 1;
        walk.push_back(static_cast<Index>(e));
        const auto& edge = g.edges[e];
        const std::int64_t tail = s == 0 ? edge.u : edge.v;
        const std::int64_t head = edge.other(tail);
        vertices.push_back(tail);
        const auto& rot = adj[static_cast<std::size_t>(head)];
        const std::size_t pos = edge.u == head ? pos_u[e] : pos_v[e];
        const Index next = rot[(pos + 1) % rot.size()].edge;
        e = next;
        s = g.edges[next].u == head ? 0 : 1;
      }
      Cycle face = walk;
      std::sort(face.begin(), face.end());
      std::vector<std::int64_t> sorted_vertices = vertices;
      std::sort(sorted_vertices.begin(), sorted_vertices.end());
      const bool simple =
          std::adjacent_find(face.begin(), face.end()) == face.end() &&
          std::adjacent_find(sorted_vertices.begin(), sorted_vertices.end()) == sorted_vertices.end();
      if (!simple || face.size() > k_m || has_cross_chord(adj, vertices)) {
        out.clean = false;
        continue;
      }
      if (seen.insert(face).second) out.faces.push_back(std::move(face));
    }
  }
  return out;
}

std::vector<Cycle> shortest_cycles(const HuboGraph& g, std::size_t k_m) {
  const auto adj = proper_adjacency(g);
  std::set<Cycle> found;
  const std::size_t max_path = k_m == 0 ? 0 : k_m - 1;
  std::vector<std::size_t> dist(g.vertex_count(), SIZE_MAX);
  std::vector<std::vector<Adjacent>> preds(g.vertex_count());
  std::vector<std::size_t> touched;

  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& edge = g.edges[e];
    if (!edge.proper() || max_path == 0) continue;
    const auto src = static_cast<std::size_t>(edge.u);
    const auto dst = static_cast<std::size_t>(edge.v);
    for (auto t : touched) {
      dist[t] = SIZE_MAX;
      preds[t].clear();
    }
    touched.clear();

    // Layered BFS from src in the graph minus e, stopping at dst's layer.
    dist[src] = 0;
    touched.push_back(src);
    std::vector<std::size_t> frontier{src};
    for (std::size_t depth = 0; depth < max_path && dist[dst] == SIZE_MAX && !frontier.empty();
         ++depth) {
      std::vector<std::size_t> next;
      for (auto x : frontier) {
        for (const auto& a : adj[x]) {
          if (a.edge == e) continue;
          const auto y = static_cast<std::size_t>(a.vertex);
          if (dist[y] == SIZE_MAX) {
            dist[y] = depth + 1;
            touched.push_back(y);
            next.push_back(y);
          }
          if (dist[y] == depth + 1) preds[y].push_back({a.edge, static_cast<std::int64_t>(x)});
        }
      }
      frontier = std::move(next);
    }
    if (dist[dst] == SIZE_MAX) continue;

    std::vector<Index> path;
    std::function<void(std::size_t)> unwind = [&](std::size_t x) {
      if (x == src) {
        Cycle c = path;
        c.push_back(static_cast<Index>(e));
        std::sort(c.begin(), c.end());
        found.insert(std::move(c));
        return;
      }
      for (const auto& p : preds[x]) {
        path.push_back(p.edge);
        unwind(static_cast<std::size_t>(p.vertex));
        path.pop_back();
      }
    };
    unwind(dst);
  }

  std::vector<Cycle> out;
  for (const auto& c : found) {
    if (is_chordless(g, c)) out.push_back(c);
  }
  return out;
}

std::vector<std::int64_t> cycle_vertices(const HuboGraph& g, const Cycle& cycle) {
  std::vector<std::int64_t> vs;
  for (Index e : cycle) {
    vs.push_back(g.edges[e].u);
    vs.push_back(g.edges[e].v);
  }
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

}  // namespace

bool is_chordless(const HuboGraph& g, const Cycle& cycle) {
  const auto vs = cycle_vertices(g, cycle);
  for (auto v : vs) {
    if (v == HuboGraph::kNone) continue;
    for (Index e : g.rotation[static_cast<std::size_t>(v)]) {
      const auto& edge = g.edges[e];
      if (!edge.proper() || std::binary_search(cycle.begin(), cycle.end(), e)) continue;
      if (std::binary_search(vs.begin(), vs.end(), edge.other(v))) return false;
    }
  }
  return true;
}

bool is_simple_cycle(const HuboGraph& g, const Cycle& cycle) {
  if (cycle.empty()) return false;
  std::map<std::int64_t, std::vector<Index>> incident;
  for (Index e : cycle) {
    if (e >= g.edge_count() || !g.edges[e].proper()) return false;
    incident[g.edges[e].u].push_back(e);
    incident[g.edges[e].v].push_back(e);
  }
  for (const auto& [v, es] : incident) {
    if (es.size() != 2) return false;
  }
  // Walk once around and require every edge to be visited.
  std::int64_t v = g.edges[cycle.front()].u;
  Index e = cycle.front();
  std::size_t steps = 0;
  do {
    v = g.edges[e].other(v);
    const auto& es = incident[v];
    e = es[0] == e ? es[1] : es[0];
    ++steps;
  } while (e != cycle.front() && steps <= cycle.size());
  return steps == cycle.size();
}

std::vector<Cycle> find_efficient_cycles(const HuboGraph& graph, std::size_t k_m,
                                         CycleSearch mode) {
  std::vector<Cycle> cycles;
  switch (mode) {
    case CycleSearch::kShortest:
      cycles = shortest_cycles(graph, k_m);
      break;
    case CycleSearch::kFaces:
      cycles = trace_faces(graph, k_m).faces;
      break;
    case CycleSearch::kAuto: {
      auto traced = trace_faces(graph, k_m);
      cycles = traced.clean ? std::move(traced.faces) : shortest_cycles(graph, k_m);
      break;
    }
  }
  std::sort(cycles.begin(), cycles.end());
  cycles.erase(std::unique(cycles.begin(), cycles.end()), cycles.end());
  return cycles;
}

GGraph::GGraph(std::size_t n_links, std::vector<Plaquette> plaquettes,
               std::vector<GaugeOperator> sites)
    : n_links_(n_links), plaquettes_(std::move(plaquettes)), sites_(std::move(sites)) {
  auto build_csr = [n_links](const auto& items, std::vector<Index>& offsets,
                             std::vector<Index>& index, const char* kind) {
    std::vector<std::vector<Index>> members(n_links);
    for (std::size_t k = 0; k < items.size(); ++k) {
      const auto& links = items[k].links;
      if (links.empty()) throw ConsistencyError(std::string(kind) + " with no links");
      std::vector<Index> sorted = links;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ConsistencyError(std::string(kind) + " " + std::to_string(k + 1) +
                               " repeats a link");
      }
      for (Index l : links) {
        if (l >= n_links) {
          throw ConsistencyError(std::string(kind) + " " + std::to_string(k + 1) + " has link " +
                                 std::to_string(l + 1) + " beyond " + std::to_string(n_links));
        }
        members[l].push_back(static_cast<Index>(k));
      }
    }
    offsets.assign(1, 0);
    index.clear();
    for (const auto& m : members) {
      index.insert(index.end(), m.begin(), m.end());
      offsets.push_back(static_cast<Index>(index.size()));
    }
  };
  for (auto& site : sites_) {
    std::sort(site.links.begin(), site.links.end());
    if (site.target_eigenvalue != 1) throw ConsistencyError("gauge target eigenvalue must be +1");
  }
  build_csr(plaquettes_, plaq_offsets_, plaq_index_, "plaquette");
  build_csr(sites_, site_offsets_, site_index_, "site");

  std::map<Index, int> overlap;
  for (std::size_t v = 0; v < sites_.size(); ++v) {
    overlap.clear();
    for (Index l : sites_[v].links) {
      for (Index p : plaquettes_of(l)) ++overlap[p];
    }
    for (const auto& [p, count] : overlap) {
      if (count % 2 != 0) {
        throw ConsistencyError("site " + std::to_string(v + 1) + " shares " +
                               std::to_string(count) + " links with plaquette " +
                               std::to_string(p + 1) + "; gauge operator would not commute");
      }
    }
  }
}

std::span<const Index> GGraph::plaquettes_of(std::size_t link) const {
  return {plaq_index_.data() + plaq_offsets_[link], plaq_offsets_[link + 1] - plaq_offsets_[link]};
}

std::span<const Index> GGraph::sites_of(std::size_t link) const {
  return {site_index_.data() + site_offsets_[link], site_offsets_[link + 1] - site_offsets_[link]};
}

double GGraph::energy(const SpinConfig& s) const {
  if (s.size() != n_links_) {
    throw DimensionError("spin configuration has " + std::to_string(s.size()) +
                         " entries, graph has " + std::to_string(n_links_) + " links");
  }
  double e = 0.0;
  for (const auto& p : plaquettes_) {
    int sign = 1;
    for (Index l : p.links) sign *= s[l];
    e += p.coupling * sign;
  }
  return e;
}

double GGraph::satisfied_energy() const {
  double e = 0.0;
  for (const auto& p : plaquettes_) e -= std::abs(p.coupling);
  return e;
}

HuboPolynomial GGraph::to_polynomial() const {
  std::vector<Term> terms;
  terms.reserve(plaquettes_.size());
  for (const auto& p : plaquettes_) terms.push_back(Term{p.coupling, {}, p.links});
  return HuboPolynomial(n_links_, std::move(terms));
}

GGraph build_dual(const HuboGraph& graph, std::size_t k_m, CycleSearch mode) {
  std::vector<Plaquette> plaquettes;
  plaquettes.reserve(graph.vertex_count());
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
    plaquettes.push_back({graph.coefficients[v], graph.rotation[v]});
  }
  std::vector<GaugeOperator> sites;
  for (auto& cycle : find_efficient_cycles(graph, k_m, mode)) {
    sites.push_back({std::move(cycle), 1});
  }
  try {
    return GGraph(graph.edge_count(), std::move(plaquettes), std::move(sites));
  } catch (const ConsistencyError& e) {
    throw ConsistencyError(std::string("cycle search produced an invalid gauge operator: ") +
                           e.what());
  }
}

GGraph gen_torus_lattice(std::size_t L) {
  if (L < 2) throw SizeError("torus lattice needs L >= 2, got " + std::to_string(L));
  auto link = [L](std::size_t x, std::size_t y, std::size_t dir) {
    return static_cast<Index>(2 * ((x % L) * L + (y % L)) + dir);
  };
  std::vector<Plaquette> plaquettes;
  std::vector<GaugeOperator> sites;
  for (std::size_t x = 0; x < L; ++x) {
    for (std::size_t y = 0; y < L; ++y) {
      // Counter-clockwise around the face with lower-left corner (x, y).
      plaquettes.push_back({-1.0, {link(x, y, 0), link(x + 1, y, 1), link(x, y + 1, 0), link(x, y, 1)}});
      sites.push_back({{link(x, y, 0), link(x, y, 1), link(x + L - 1, y, 0), link(x, y + L - 1, 1)}, 1});
    }
  }
  return GGraph(2 * L * L, std::move(plaquettes), std::move(sites));
}

namespace {

bool connected(std::size_t n, const std::vector<std::pair<Index, Index>>& edges) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  std::size_t components = n;
  for (auto [a, b] : edges) {
    auto ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

constexpr int kPairingAttempts = 100000;

}  // namespace

std::vector<std::pair<Index, Index>> random_four_regular_graph(std::size_t n_vertices,
                                                               std::uint64_t seed) {
  if (n_vertices < 5) {
    throw SizeError("a simple 4-regular graph needs at least 5 vertices, got " +
                    std::to_string(n_vertices));
  }
  std::mt19937_64 rng(seed);
  std::vector<Index> stubs;
  for (std::size_t v = 0; v < n_vertices; ++v) stubs.insert(stubs.end(), 4, static_cast<Index>(v));
  for (int attempt = 0; attempt < kPairingAttempts; ++attempt) {
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::vector<std::pair<Index, Index>> edges;
    edges.reserve(stubs.size() / 2);
    bool ok = true;
    for (std::size_t k = 0; k < stubs.size(); k += 2) {
      Index a = stubs[k], b = stubs[k + 1];
      if (a == b) {
        ok = false;
        break;
      }
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    if (!ok) continue;
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) continue;
    if (!connected(n_vertices, edges)) continue;
    return edges;
  }
  throw GenerationError("pairing model found no simple connected 4-regular graph on " +
                        std::to_string(n_vertices) + " vertices after " +
                        std::to_string(kPairingAttempts) + " attempts; try another seed");
}

GGraph gen_four_regular_dual(std::size_t n_vertices, std::uint64_t seed, std::size_t k_m) {
  const auto edges = random_four_regular_graph(n_vertices, seed);
  std::vector<std::vector<Index>> incident(n_vertices);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    incident[edges[k].first].push_back(static_cast<Index>(k));
    incident[edges[k].second].push_back(static_cast<Index>(k));
  }
  std::vector<Term> terms;
  for (auto& links : incident) terms.push_back(Term{-1.0, {}, std::move(links)});
  const HuboPolynomial poly(edges.size(), std::move(terms));
  return build_dual(build_hubo_graph(poly), k_m, CycleSearch::kShortest);
}

std::string serialize_ggraph(const GGraph& g) {
  std::ostringstream out;
  out << "links " << g.n_links() << '\n';
  for (const auto& p : g.plaquettes()) {
    out << "plaq " << format_double(p.coupling);
    for (Index l : p.links) out << ' ' << (l + 1);
    out << '\n';
  }
  for (const auto& s : g.sites()) {
    out << "site";
    for (Index l : s.links) out << ' ' << (l + 1);
    out << '\n';
  }
  return out.str();
}

GGraph parse_ggraph(std::string_view text) {
  std::size_t n_links = 0;
  bool have_header = false;
  std::vector<Plaquette> plaquettes;
  std::vector<GaugeOperator> sites;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;

  auto read_links = [&](std::istringstream& ls, std::vector<Index>& links) {
    std::string tok;
    while (ls >> tok) {
      std::size_t idx = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), idx);
      if (ec != std::errc{} || ptr != tok.data() + tok.size() || idx == 0) {
        throw ParseError(line_no, "bad link index '" + tok + "'");
      }
      if (idx > n_links) {
        throw ParseError(line_no, "link " + tok + " exceeds links " + std::to_string(n_links));
      }
      links.push_back(static_cast<Index>(idx - 1));
    }
    if (links.empty()) throw ParseError(line_no, "no links listed");
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (!have_header) {
      if (key != "links" || !(ls >> n_links)) throw ParseError(line_no, "expected 'links <n>'");
      std::string extra;
      if (ls >> extra) throw ParseError(line_no, "trailing text after header");
      have_header = true;
    } else if (key == "plaq") {
      Plaquette p;
      std::string coef;
      if (!(ls >> coef)) throw ParseError(line_no, "plaquette without coupling");
      auto [ptr, ec] = std::from_chars(coef.data(), coef.data() + coef.size(), p.coupling);
      if (ec != std::errc{} || ptr != coef.data() + coef.size()) {
        throw ParseError(line_no, "bad coupling '" + coef + "'");
      }
      read_links(ls, p.links);
      plaquettes.push_back(std::move(p));
    } else if (key == "site") {
      GaugeOperator s;
      read_links(ls, s.links);
      sites.push_back(std::move(s));
    } else {
      throw ParseError(line_no, "unknown record '" + key + "'");
    }
  }
  if (!have_header) throw ParseError(line_no, "missing 'links <n>' header");
  return GGraph(n_links, std::move(plaquettes), std::move(sites));
}

GGraph read_ggraph(const std::string& path) { return parse_ggraph(read_text_file(path)); }

void write_ggraph(const GGraph& g, const std::string& path) {
  write_text_file(path, serialize_ggraph(g));
}

}  // namespace z2hubo
