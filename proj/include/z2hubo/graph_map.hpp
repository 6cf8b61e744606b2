#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "z2hubo/hubo.hpp"

namespace z2hubo {

/// HUBO-graph: one vertex per term, one edge per variable.
///
/// An edge joins the two terms containing its variable. A variable in a
/// single term gives a dangling edge (one endpoint); a variable in no term
/// gives an edge with no endpoint.
struct HuboGraph {
  static constexpr std::int64_t kNone = -1;

  struct Edge {
    std::int64_t u = kNone;
    std::int64_t v = kNone;

    bool dangling() const noexcept { return u != kNone && v == kNone; }
    bool unused() const noexcept { return u == kNone; }
    bool proper() const noexcept { return v != kNone; }
    std::int64_t other(std::int64_t w) const noexcept { return w == u ? v : u; }
  };

  std::vector<double> coefficients;  // per vertex
  std::vector<Edge> edges;           // per variable
  /// Per vertex: incident edges in the term's written order, dangling edges included.
  std::vector<std::vector<Index>> rotation;

  std::size_t vertex_count() const noexcept { return coefficients.size(); }
  std::size_t edge_count() const noexcept { return edges.size(); }
  std::size_t dangling_count() const noexcept;
  std::size_t degree(std::size_t vertex) const { return rotation[vertex].size(); }
};

/// Throws MappingError naming the first variable that occurs in three or more terms.
HuboGraph build_hubo_graph(const HuboPolynomial& poly);

/// A cycle as its sorted edge (= link) indices.
using Cycle = std::vector<Index>;

enum class CycleSearch {
  /// Faces when every face is a short chordless cycle, else kShortest.
  kAuto,
  /// Faces of the embedding given by each term's written variable order.
  kFaces,
  /// Shortest chordless cycle(s) through every edge.
  kShortest,
};

/// Efficient cycles of length <= k_m, canonically sorted and deduplicated.
///
/// kShortest: for every proper edge, all shortest cycles through it (BFS in the
/// graph minus the edge), restricted to length <= k_m and filtered to chordless
/// cycles. A cycle with a chord splits into two shorter ones, so it is never
/// efficient.
///
/// kFaces: trace the faces of the rotation system (successor of the arrival
/// edge in the written order of the next term). Faces longer than k_m, not
/// simple, or crossed by a chord between non-neighbouring vertices are dropped.
///
/// kAuto uses kFaces when no face was dropped and falls back to kShortest
/// otherwise.
std::vector<Cycle> find_efficient_cycles(const HuboGraph& graph, std::size_t k_m,
                                         CycleSearch mode = CycleSearch::kAuto);

/// True if no edge outside the cycle joins two of its vertices.
bool is_chordless(const HuboGraph& graph, const Cycle& cycle);

/// True if the edges form a single simple cycle.
bool is_simple_cycle(const HuboGraph& graph, const Cycle& cycle);

struct Plaquette {
  double coupling = 0.0;
  /// Links in cyclic order.
  std::vector<Index> links;
};

struct GaugeOperator {
  /// Sorted link indices.
  std::vector<Index> links;
  int target_eigenvalue = 1;
};

/// The dual G-graph: spins on links, HUBO terms as plaquettes, efficient cycles as sites.
///
/// Construction checks link ranges and that every site overlaps every plaquette
/// in an even number of links; violations throw ConsistencyError.
class GGraph {
 public:
  GGraph() = default;
  GGraph(std::size_t n_links, std::vector<Plaquette> plaquettes, std::vector<GaugeOperator> sites);

  std::size_t n_links() const noexcept { return n_links_; }
  const std::vector<Plaquette>& plaquettes() const noexcept { return plaquettes_; }
  const std::vector<GaugeOperator>& sites() const noexcept { return sites_; }

  /// Plaquettes / sites containing each link.
  std::span<const Index> plaquettes_of(std::size_t link) const;
  std::span<const Index> sites_of(std::size_t link) const;

  /// Sum over plaquettes of J_p times the product of the plaquette's spins.
  double energy(const SpinConfig& s) const;

  /// -sum |J_p|: the energy when every plaquette is satisfied.
  double satisfied_energy() const;

  /// Plaquettes as HUBO terms; link order is kept as the written order.
  HuboPolynomial to_polynomial() const;

 private:
  std::size_t n_links_ = 0;
  std::vector<Plaquette> plaquettes_;
  std::vector<GaugeOperator> sites_;
  std::vector<Index> plaq_offsets_, plaq_index_;
  std::vector<Index> site_offsets_, site_index_;
};

/// Plaquettes from the term vertices, sites from find_efficient_cycles.
GGraph build_dual(const HuboGraph& graph, std::size_t k_m, CycleSearch mode = CycleSearch::kAuto);

/// Periodic L x L lattice, J_p = -1. Link (x, y, dir) has index 2(xL+y)+dir,
/// dir 0 = horizontal edge (x,y)-(x+1,y), dir 1 = vertical edge (x,y)-(x,y+1).
/// Sites are the L^2 vertex stars. Throws SizeError for L < 2.
GGraph gen_torus_lattice(std::size_t L);

inline constexpr std::size_t kDefaultMaxCycle = 6;

/// Simple connected random 4-regular graph from the pairing model (rejection
/// of loops, multi-edges and disconnected samples), returned as edge list
/// with u < v, sorted. Deterministic under seed.
std::vector<std::pair<Index, Index>> random_four_regular_graph(std::size_t n_vertices,
                                                               std::uint64_t seed);

/// G-graph dual to a random 4-regular graph: 2n links, one J_p = -1 plaquette
/// per vertex, sites = shortest chordless cycles of length <= k_m.
GGraph gen_four_regular_dual(std::size_t n_vertices, std::uint64_t seed,
                             std::size_t k_m = kDefaultMaxCycle);

/// Text form: `links <n>`, `plaq <J> <l1> ... <lk>`, `site <l1> ... <lk>`, 1-based, `#` comments.
std::string serialize_ggraph(const GGraph& g);
GGraph parse_ggraph(std::string_view text);
GGraph read_ggraph(const std::string& path);
void write_ggraph(const GGraph& g, const std::string& path);

}  // namespace z2hubo
