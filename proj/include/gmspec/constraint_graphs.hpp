#pragma once

// Constraint graphs on H(alpha_{Z(m)}, 2q), the multigraph obtained by gluing
// q copies of the m-layer Z shape and q copies of its transpose in a cycle.
// A constraint graph is represented by the partition of V(H) it induces;
// |E(C)| = |V| - #blocks.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gmspec/combinatorics.hpp"

namespace gmspec::constraints {

enum class Letter : std::uint8_t { kA = 0, kB = 1 };

struct HVertex {
  Letter letter;
  std::uint32_t copy;   // i, 1-based
  std::uint32_t layer;  // j, 1-based (wheel index)
};

enum class EdgeKind : std::uint8_t { kWheel, kSpoke };

struct HEdge {
  std::uint32_t u;
  std::uint32_t v;
  EdgeKind kind;
  std::uint32_t layer;  // wheel j, or the lower wheel j of a spoke between W_j and W_{j+1}
  std::uint32_t index;  // wheel: 1..2q around the cycle; spoke: x in e_{x,j}, 1..2q
};

class HGraph {
 public:
  HGraph(std::uint32_t m, std::uint32_t q);

  std::uint32_t m() const { return m_; }
  std::uint32_t q() const { return q_; }
  std::uint32_t vertex_count() const { return 2 * m_ * q_; }
  std::uint32_t piece_count() const { return 2 * q_; }

  /// Vertex id in enumeration order: wheel-major, then copy, a before b.
  std::uint32_t id(Letter letter, std::uint32_t copy, std::uint32_t layer) const;
  HVertex vertex(std::uint32_t id) const;
  std::string label(std::uint32_t id) const;

  /// 1-based position on its wheel's 2q-cycle: a_{i,j} -> 2i-1, b_{i,j} -> 2i.
  std::uint32_t wheel_position(std::uint32_t id) const { return id % (2 * q_) + 1; }

  /// Bit p set iff the vertex lies in piece p (P_i -> 2(i-1), P_i^T -> 2i-1).
  std::uint64_t piece_mask(std::uint32_t id) const { return piece_masks_[id]; }

  const std::vector<HEdge>& edges() const { return edges_; }
  /// Spokes between W_layer and W_{layer+1}, ordered by index x = 1..2q.
  std::vector<HEdge> spokes(std::uint32_t layer) const;
  bool is_spoke_endpoint(std::uint32_t id) const;

 private:
  std::uint32_t m_;
  std::uint32_t q_;
  std::vector<std::uint64_t> piece_masks_;
  std::vector<HEdge> edges_;
};

HGraph build_H(std::uint32_t m, std::uint32_t q);

/// Canonical restricted-growth encoding of a partition of V(H).
class ConstraintPartition {
 public:
  ConstraintPartition() = default;
  /// `assignment[v]` is a block label; relabelled canonically.
  explicit ConstraintPartition(std::vector<std::uint8_t> assignment);
  /// Blocks given as vertex-id lists; vertices not mentioned become singletons.
  static ConstraintPartition from_blocks(std::uint32_t vertex_count,
                                         const std::vector<std::vector<std::uint32_t>>& blocks);

  std::uint32_t vertex_count() const { return static_cast<std::uint32_t>(block_of_.size()); }
  std::uint32_t block_count() const { return block_count_; }
  std::uint32_t edge_count() const { return vertex_count() - block_count_; }
  std::uint8_t block_of(std::uint32_t v) const { return block_of_[v]; }
  bool same_block(std::uint32_t u, std::uint32_t v) const { return block_of_[u] == block_of_[v]; }
  bool is_isolated(std::uint32_t v) const;
  std::vector<std::vector<std::uint32_t>> blocks() const;
  std::span<const std::uint8_t> assignment() const { return block_of_; }

  friend bool operator==(const ConstraintPartition&, const ConstraintPartition&) = default;

 private:
  std::vector<std::uint8_t> block_of_;
  std::uint32_t block_count_ = 0;
};

/// Blocks of vertex labels, e.g. [["a_1_1","a_2_1"],["b_1_1"],...].
std::string render_partition(const HGraph& h, const ConstraintPartition& c);

bool is_piecewise_injective(const HGraph& h, const ConstraintPartition& c);

/// 1 iff every edge of the quotient multigraph H/C has even multiplicity.
/// Throws InvalidArgument when c is not piecewise injective.
int val(const HGraph& h, const ConstraintPartition& c);

// Structural predicates. These accept any partition of V(H).
bool is_well_behaved(const HGraph& h, const ConstraintPartition& c);
bool is_wheel_respecting(const HGraph& h, const ConstraintPartition& c);
bool is_parity_preserving(const HGraph& h, const ConstraintPartition& c);
bool is_non_crossing(const HGraph& h, const ConstraintPartition& c);
/// Each wheel's induced partition has exactly q-1 edges.
bool wheels_each_have_q_minus_one_edges(const HGraph& h, const ConstraintPartition& c);
/// If e_{i,j} = e_{t,j} and e_{s,j} = e_{u,j} with i<s<t<u then all four coincide.
bool spoke_noncrossing_holds(const HGraph& h, const ConstraintPartition& c);
/// a_{s,j} = a_{t,j} implies a_{s,j+1} = a_{t,j+1} and spokes e_{x,j},
/// x in [2s-1, 2t-2] are only equal among themselves; the b-analogue goes
/// down one layer with x in [2s, 2t-1].
bool precontract_holds(const HGraph& h, const ConstraintPartition& c);
/// Some singleton block among {a_{i,1}} and {b_{i,m}} (vertices on no spoke).
bool has_spokeless_isolated_vertex(const HGraph& h, const ConstraintPartition& c);

struct PredicateResults {
  bool well_behaved = false;
  bool wheel_respecting = false;
  bool parity_preserving = false;
  bool non_crossing = false;
  bool wheel_edges_q_minus_one = false;
  bool spoke_noncrossing = false;
  bool precontract = false;
  bool spokeless_isolated_vertex = false;  // vacuously true for q = 1

  bool all() const;
  /// Names of the predicates that failed.
  std::vector<std::string> failures() const;
};

PredicateResults evaluate_predicates(const HGraph& h, const ConstraintPartition& c);

struct EnumerationOptions {
  unsigned threads = 1;
  bool check_structure = false;
  bool keep_partitions = false;
  bool allow_slow = false;
  std::uint32_t max_vertices = 12;       // default desk-scale limit
  std::uint32_t slow_max_vertices = 16;  // with allow_slow
};

struct Violation {
  std::vector<std::string> predicates;
  ConstraintPartition partition;
  std::string rendered;
};

struct DominanceReport {
  std::uint32_t m = 0;
  std::uint32_t q = 0;
  std::uint64_t dominant_count = 0;
  std::uint64_t leaves_visited = 0;  // partitions reaching val evaluation
  bool structure_checked = false;
  std::vector<ConstraintPartition> partitions;      // when keep_partitions
  std::vector<PredicateResults> predicate_results;  // parallel to partitions
  std::vector<Violation> violations;
};

/// Exhaustive enumeration of val = 1 partitions with exactly m(q-1) edges.
/// Throws Infeasible when 2mq exceeds the configured vertex limit.
DominanceReport enumerate_dominant(std::uint32_t m, std::uint32_t q,
                                   const EnumerationOptions& options = {});

/// enumerate_dominant with check_structure forced on; throws
/// VerificationFailure naming the first counterexample.
DominanceReport verify_structure(std::uint32_t m, std::uint32_t q,
                                 EnumerationOptions options = {});

/// Calls visit(partition, val) for every piecewise-injective partition of
/// V(H) whose block count lies in [min_blocks, max_blocks].
void for_each_partition(const HGraph& h, std::uint32_t min_blocks, std::uint32_t max_blocks,
                        const std::function<void(const ConstraintPartition&, int)>& visit);

/// Number of val = 1 partitions keyed by block count (all piecewise-injective
/// partitions are visited).
std::map<std::uint32_t, std::uint64_t> nonzero_partitions_by_blocks(std::uint32_t m,
                                                                    std::uint32_t q);

/// Smallest |E(C)| over val = 1 partitions.
std::uint32_t min_nonzero_edge_count(std::uint32_t m, std::uint32_t q);

/// sum_C N(C) val(C) with N(C) = n!/(n - #blocks)!, i.e. E[tr((M M^T)^q)]
/// for the unnormalised graph matrix on G(n,1/2).
combinatorics::BigInt expected_trace_from_partitions(std::uint32_t m, std::uint32_t q,
                                                     std::uint32_t n);

}  // namespace gmspec::constraints
