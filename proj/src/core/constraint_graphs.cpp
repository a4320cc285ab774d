#include "gmspec/constraint_graphs.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gmspec/error.hpp"
#include "gmspec/parallel.hpp"

namespace gmspec::constraints {

// ---------------------------------------------------------------- HGraph

HGraph::HGraph(std::uint32_t m, std::uint32_t q) : m_(m), q_(q) {
  if (m == 0 || q == 0) throw InvalidArgument("build_H: m and q must be >= 1");
  if (2 * q > 64 || 2 * m * q > 64)
    throw InvalidArgument("build_H: at most 64 vertices and 64 pieces are supported");

  piece_masks_.assign(vertex_count(), 0);
  for (std::uint32_t i = 1; i <= q; ++i) {
    const std::uint32_t next = i % q + 1;
    const std::uint64_t p = std::uint64_t{1} << (2 * (i - 1));
    const std::uint64_t pt = std::uint64_t{1} << (2 * (i - 1) + 1);
    for (std::uint32_t j = 1; j <= m; ++j) {
      piece_masks_[id(Letter::kA, i, j)] |= p;
      piece_masks_[id(Letter::kB, i, j)] |= p | pt;
      piece_masks_[id(Letter::kA, next, j)] |= pt;
    }
  }

  for (std::uint32_t j = 1; j <= m; ++j) {
    for (std::uint32_t i = 1; i <= q; ++i) {
      const std::uint32_t next = i % q + 1;
      edges_.push_back({id(Letter::kA, i, j), id(Letter::kB, i, j), EdgeKind::kWheel, j, 2 * i - 1});
      edges_.push_back({id(Letter::kB, i, j), id(Letter::kA, next, j), EdgeKind::kWheel, j, 2 * i});
    }
  }
  for (std::uint32_t j = 1; j < m; ++j) {
    for (std::uint32_t i = 1; i <= q; ++i) {
      const std::uint32_t next = i % q + 1;
      edges_.push_back(
          {id(Letter::kA, i, j + 1), id(Letter::kB, i, j), EdgeKind::kSpoke, j, 2 * i - 1});
      edges_.push_back(
          {id(Letter::kB, i, j), id(Letter::kA, next, j + 1), EdgeKind::kSpoke, j, 2 * i});
    }
  }
}

std::uint32_t HGraph::id(Letter letter, std::uint32_t copy, std::uint32_t layer) const {
  return (layer - 1) * 2 * q_ + 2 * (copy - 1) + static_cast<std::uint32_t>(letter);
}

HVertex HGraph::vertex(std::uint32_t id) const {
  const std::uint32_t layer = id / (2 * q_) + 1;
  const std::uint32_t pos = id % (2 * q_);
  return HVertex{(pos & 1U) ? Letter::kB : Letter::kA, pos / 2 + 1, layer};
}

std::string HGraph::label(std::uint32_t id) const {
  const HVertex v = vertex(id);
  return std::string(v.letter == Letter::kA ? "a" : "b") + "_" + std::to_string(v.copy) + "_" +
         std::to_string(v.layer);
}

std::vector<HEdge> HGraph::spokes(std::uint32_t layer) const {
  std::vector<HEdge> out;
  for (const auto& e : edges_)
    if (e.kind == EdgeKind::kSpoke && e.layer == layer) out.push_back(e);
  std::sort(out.begin(), out.end(), [](const HEdge& x, const HEdge& y) { return x.index < y.index; });
  return out;
}

bool HGraph::is_spoke_endpoint(std::uint32_t id) const {
  const HVertex v = vertex(id);
  // a_{i,j} touches spokes for j >= 2, b_{i,j} for j <= m-1
  return v.letter == Letter::kA ? v.layer >= 2 : v.layer + 1 <= m_;
}

HGraph build_H(std::uint32_t m, std::uint32_t q) { return HGraph(m, q); }

// ------------------------------------------------------- ConstraintPartition

ConstraintPartition::ConstraintPartition(std::vector<std::uint8_t> assignment)
    : block_of_(std::move(assignment)) {
  std::array<int, 256> relabel;
  relabel.fill(-1);
  std::uint32_t next = 0;
  for (auto& b : block_of_) {
    if (relabel[b] < 0) relabel[b] = static_cast<int>(next++);
    b = static_cast<std::uint8_t>(relabel[b]);
  }
  block_count_ = next;
}

ConstraintPartition ConstraintPartition::from_blocks(
    std::uint32_t vertex_count, const std::vector<std::vector<std::uint32_t>>& blocks) {
  if (vertex_count > 255) throw InvalidArgument("partition: too many vertices");
  std::vector<int> label(vertex_count, -1);
  int next = 0;
  for (const auto& block : blocks) {
    for (auto v : block) {
      if (v >= vertex_count) throw InvalidArgument("partition: vertex id out of range");
      if (label[v] >= 0) throw InvalidArgument("partition: vertex listed in two blocks");
      label[v] = next;
    }
    if (!block.empty()) ++next;
  }
  std::vector<std::uint8_t> assignment(vertex_count);
  for (std::uint32_t v = 0; v < vertex_count; ++v) {
    if (label[v] < 0) label[v] = next++;
    assignment[v] = static_cast<std::uint8_t>(label[v]);
  }
  return ConstraintPartition(std::move(assignment));
}

bool ConstraintPartition::is_isolated(std::uint32_t v) const {
  for (std::uint32_t u = 0; u < vertex_count(); ++u)
    if (u != v && block_of_[u] == block_of_[v]) return false;
  return true;
}

std::vector<std::vector<std::uint32_t>> ConstraintPartition::blocks() const {
  std::vector<std::vector<std::uint32_t>> out(block_count_);
  for (std::uint32_t v = 0; v < vertex_count(); ++v) out[block_of_[v]].push_back(v);
  return out;
}

std::string render_partition(const HGraph& h, const ConstraintPartition& c) {
  std::ostringstream os;
  os << '[';
  bool first_block = true;
  for (const auto& block : c.blocks()) {
    if (!first_block) os << ',';
    first_block = false;
    os << '[';
    for (std::size_t k = 0; k < block.size(); ++k) {
      if (k) os << ',';
      os << '"' << h.label(block[k]) << '"';
    }
    os << ']';
  }
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------- val

namespace {

void require_matching(const HGraph& h, const ConstraintPartition& c) {
  if (c.vertex_count() != h.vertex_count())
    throw InvalidArgument("partition size does not match V(H)");
}

// Parity of quotient edge multiplicities. Blocks index rows of a 64x64 bit
// matrix; an edge toggles bit (lo, hi).
int quotient_parity_even(const HGraph& h, std::span<const std::uint8_t> block_of) {
  std::array<std::uint64_t, 64> rows{};
  for (const auto& e : h.edges()) {
    std::uint8_t bu = block_of[e.u];
    std::uint8_t bv = block_of[e.v];
    if (bu == bv) {
      // endpoints of an H edge always share a piece, so piecewise
      // injectivity rules this out
      throw std::logic_error("self-loop in quotient H/C: " + h.label(e.u) + " ~ " + h.label(e.v));
    }
    if (bu > bv) std::swap(bu, bv);
    rows[bu] ^= std::uint64_t{1} << bv;
  }
  for (auto r : rows)
    if (r) return 0;
  return 1;
}

}  // namespace

bool is_piecewise_injective(const HGraph& h, const ConstraintPartition& c) {
  require_matching(h, c);
  std::vector<std::uint64_t> mask(c.block_count(), 0);
  for (std::uint32_t v = 0; v < c.vertex_count(); ++v) {
    const std::uint64_t pm = h.piece_mask(v);
    if (mask[c.block_of(v)] & pm) return false;
    mask[c.block_of(v)] |= pm;
  }
  return true;
}

int val(const HGraph& h, const ConstraintPartition& c) {
  if (!is_piecewise_injective(h, c))
    throw InvalidArgument("val: partition is not piecewise injective");
  return quotient_parity_even(h, c.assignment());
}

// ------------------------------------------------------------ predicates

bool is_well_behaved(const HGraph& h, const ConstraintPartition& c) {
  require_matching(h, c);
  for (const auto& block : c.blocks()) {
    const HVertex first = h.vertex(block.front());
    for (auto v : block) {
      const HVertex hv = h.vertex(v);
      if (hv.letter != first.letter || hv.layer != first.layer) return false;
    }
  }
  return true;
}

bool is_wheel_respecting(const HGraph& h, const ConstraintPartition& c) {
  require_matching(h, c);
  for (const auto& block : c.blocks()) {
    const std::uint32_t layer = h.vertex(block.front()).layer;
    for (auto v : block)
      if (h.vertex(v).layer != layer) return false;
  }
  return true;
}

namespace {

// Block restricted to wheel j, as sorted wheel positions; empty groups dropped.
std::vector<std::vector<std::uint32_t>> wheel_groups(const HGraph& h, const ConstraintPartition& c,
                                                     std::uint32_t layer) {
  std::map<std::uint8_t, std::vector<std::uint32_t>> groups;
  for (std::uint32_t i = 1; i <= h.q(); ++i) {
    for (Letter l : {Letter::kA, Letter::kB}) {
      const std::uint32_t v = h.id(l, i, layer);
      groups[c.block_of(v)].push_back(h.wheel_position(v));
    }
  }
  std::vector<std::vector<std::uint32_t>> out;
  for (auto& [_, g] : groups) {
    std::sort(g.begin(), g.end());
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace

bool is_parity_preserving(const HGraph& h, const ConstraintPartition& c) {
  require_matching(h, c);
  for (std::uint32_t j = 1; j <= h.m(); ++j) {
    for (const auto& g : wheel_groups(h, c, j))
      for (auto p : g)
        if ((p - g.front()) % 2 != 0) return false;
  }
  return true;
}

bool is_non_crossing(const HGraph& h, const ConstraintPartition& c) {
  require_matching(h, c);
  const std::uint32_t len = 2 * h.q();
  for (std::uint32_t j = 1; j <= h.m(); ++j) {
    // group label per position on this wheel
    std::vector<int> group(len + 1, -1);
    const auto groups = wheel_groups(h, c, j);
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (auto p : groups[g]) group[p] = static_cast<int>(g);
    for (std::uint32_t w = 1; w <= len; ++w)
      for (std::uint32_t x = w + 1; x <= len; ++x)
        for (std::uint32_t y = x + 1; y <= len; ++y) {
          if (group[y] != group[w] || group[x] == group[w]) continue;
          for (std::uint32_t z = y + 1; z <= len; ++z)
            if (group[z] == group[x]) return false;
        }
  }
  return true;
}

bool wheels_each_have_q_minus_one_edges(const HGraph& h, const ConstraintPartition& c) {
  require_matching(h, c);
  for (std::uint32_t j = 1; j <= h.m(); ++j) {
    const auto groups = wheel_groups(h, c, j);
    if (2 * h.q() - groups.size() != h.q() - 1) return false;
  }
  return true;
}

namespace {

// Spoke e is identified with spoke f under C when both endpoint blocks agree.
using SpokeKey = std::pair<std::uint8_t, std::uint8_t>;

std::vector<SpokeKey> spoke_keys(const HGraph& h, const ConstraintPartition& c,
                                 std::uint32_t layer) {
  std::vector<SpokeKey> keys;
  for (const auto& e : h.spokes(layer)) {
    std::uint8_t x = c.block_of(e.u);
    std::uint8_t y = c.block_of(e.v);
    if (x > y) std::swap(x, y);
    keys.emplace_back(x, y);
  }
  return keys;
}

}  // namespace

bool spoke_noncrossing_holds(const HGraph& h, const ConstraintPartition& c) {
  require_matching(h, c);
  for (std::uint32_t j = 1; j < h.m(); ++j) {
    const auto keys = spoke_keys(h, c, j);  // keys[x-1] for e_{x,j}
    const std::size_t len = keys.size();
    for (std::size_t i = 0; i < len; ++i)
      for (std::size_t s = i + 1; s < len; ++s)
        for (std::size_t t = s + 1; t < len; ++t) {
          if (keys[t] != keys[i]) continue;
          for (std::size_t u = t + 1; u < len; ++u)
            if (keys[u] == keys[s] && keys[s] != keys[i]) return false;
        }
  }
  return true;
}

bool precontract_holds(const HGraph& h, const ConstraintPartition& c) {
  require_matching(h, c);
  const std::uint32_t q = h.q();
  const std::uint32_t m = h.m();
  // spokes in [lo, hi] (1-based x) may only be identified with spokes inside
  auto closed_interval = [&](std::uint32_t layer, std::uint32_t lo, std::uint32_t hi) {
    const auto keys = spoke_keys(h, c, layer);
    for (std::uint32_t x = lo; x <= hi; ++x)
      for (std::uint32_t y = 1; y <= keys.size(); ++y) {
        if (y >= lo && y <= hi) continue;
        if (keys[x - 1] == keys[y - 1]) return false;
      }
    return true;
  };
  for (std::uint32_t s = 1; s <= q; ++s) {
    for (std::uint32_t t = s + 1; t <= q; ++t) {
      for (std::uint32_t j = 1; j + 1 <= m; ++j) {
        if (!c.same_block(h.id(Letter::kA, s, j), h.id(Letter::kA, t, j))) continue;
        if (!c.same_block(h.id(Letter::kA, s, j + 1), h.id(Letter::kA, t, j + 1))) return false;
        if (!closed_interval(j, 2 * s - 1, 2 * t - 2)) return false;
      }
      for (std::uint32_t j = 2; j <= m; ++j) {
        if (!c.same_block(h.id(Letter::kB, s, j), h.id(Letter::kB, t, j))) continue;
        if (!c.same_block(h.id(Letter::kB, s, j - 1), h.id(Letter::kB, t, j - 1))) return false;
        if (!closed_interval(j - 1, 2 * s, 2 * t - 1)) return false;
      }
    }
  }
  return true;
}

bool has_spokeless_isolated_vertex(const HGraph& h, const ConstraintPartition& c) {
  require_matching(h, c);
  for (std::uint32_t i = 1; i <= h.q(); ++i) {
    if (c.is_isolated(h.id(Letter::kA, i, 1))) return true;
    if (c.is_isolated(h.id(Letter::kB, i, h.m()))) return true;
  }
  return false;
}

bool PredicateResults::all() const { return failures().empty(); }

std::vector<std::string> PredicateResults::failures() const {
  std::vector<std::string> out;
  if (!well_behaved) out.emplace_back("well_behaved");
  if (!wheel_respecting) out.emplace_back("wheel_respecting");
  if (!parity_preserving) out.emplace_back("parity_preserving");
  if (!non_crossing) out.emplace_back("non_crossing");
  if (!wheel_edges_q_minus_one) out.emplace_back("wheel_edges_q_minus_one");
  if (!spoke_noncrossing) out.emplace_back("spoke_noncrossing");
  if (!precontract) out.emplace_back("precontract");
  if (!spokeless_isolated_vertex) out.emplace_back("spokeless_isolated_vertex");
  return out;
}

PredicateResults evaluate_predicates(const HGraph& h, const ConstraintPartition& c) {
  PredicateResults r;
  r.well_behaved = is_well_behaved(h, c);
  r.wheel_respecting = is_wheel_respecting(h, c);
  r.parity_preserving = is_parity_preserving(h, c);
  r.non_crossing = is_non_crossing(h, c);
  r.wheel_edges_q_minus_one = wheels_each_have_q_minus_one_edges(h, c);
  r.spoke_noncrossing = spoke_noncrossing_holds(h, c);
  r.precontract = precontract_holds(h, c);
  r.spokeless_isolated_vertex = h.q() < 2 || has_spokeless_isolated_vertex(h, c);
  return r;
}

// ----------------------------------------------------------- enumeration

namespace {

// Restricted-growth backtracking over V(H) in id order. A vertex may join an
// existing block only if that block has no vertex from any of its pieces.
class PartitionSearch {
 public:
  PartitionSearch(const HGraph& h, std::uint32_t min_blocks, std::uint32_t max_blocks)
      : h_(h),
        nv_(h.vertex_count()),
        min_blocks_(min_blocks),
        max_blocks_(max_blocks),
        assign_(nv_, 0),
        block_mask_(nv_, 0) {}

  // Valid prefixes of length `depth`, in lexicographic order.
  std::vector<std::vector<std::uint8_t>> prefixes(std::uint32_t depth) {
    std::vector<std::vector<std::uint8_t>> out;
    descend(0, 0, depth, [&](std::uint32_t) {
      out.emplace_back(assign_.begin(), assign_.begin() + depth);
    });
    return out;
  }

  // Runs leaf(assignment, blocks, val) for every completion of `prefix`.
  template <typename Leaf>
  void run(std::span<const std::uint8_t> prefix, Leaf&& leaf) {
    std::fill(block_mask_.begin(), block_mask_.end(), 0);
    std::uint32_t used = 0;
    for (std::uint32_t k = 0; k < prefix.size(); ++k) {
      assign_[k] = prefix[k];
      block_mask_[prefix[k]] |= h_.piece_mask(k);
      used = std::max<std::uint32_t>(used, prefix[k] + 1U);
    }
    descend(static_cast<std::uint32_t>(prefix.size()), used, nv_, [&](std::uint32_t blocks) {
      leaf(std::span<const std::uint8_t>(assign_), blocks,
           quotient_parity_even(h_, assign_));
    });
  }

 private:
  template <typename Visit>
  void descend(std::uint32_t k, std::uint32_t used, std::uint32_t stop, Visit&& visit) {
    if (k == stop) {
      if (stop < nv_ || used >= min_blocks_) visit(used);
      return;
    }
    const std::uint32_t remaining = nv_ - k;
    const std::uint64_t pm = h_.piece_mask(k);
    // joining an existing block keeps `used`; needs used + remaining - 1 >= min
    if (used + remaining - 1 >= min_blocks_) {
      for (std::uint32_t b = 0; b < used; ++b) {
        if (block_mask_[b] & pm) continue;
        assign_[k] = static_cast<std::uint8_t>(b);
        block_mask_[b] |= pm;
        descend(k + 1, used, stop, visit);
        block_mask_[b] &= ~pm;
      }
    }
    if (used + 1 <= max_blocks_) {
      assign_[k] = static_cast<std::uint8_t>(used);
      block_mask_[used] = pm;
      descend(k + 1, used + 1, stop, visit);
      block_mask_[used] = 0;
    }
  }

  const HGraph& h_;
  std::uint32_t nv_;
  std::uint32_t min_blocks_;
  std::uint32_t max_blocks_;
  std::vector<std::uint8_t> assign_;
  std::vector<std::uint64_t> block_mask_;
};

// Splits the search tree at a shallow depth so subtrees can go to workers;
// per-subtree results are merged in prefix order.
template <typename Acc, typename Leaf>
std::vector<Acc> search_subtrees(const HGraph& h, std::uint32_t min_blocks,
                                 std::uint32_t max_blocks, unsigned threads, Leaf leaf) {
  const unsigned workers = resolve_threads(threads);
  const std::uint32_t depth = workers <= 1 ? 0 : std::min<std::uint32_t>(h.vertex_count(), 8);
  PartitionSearch root(h, min_blocks, max_blocks);
  const auto prefixes = depth == 0 ? std::vector<std::vector<std::uint8_t>>{{}} : root.prefixes(depth);
  std::vector<Acc> results(prefixes.size());
  parallel_for(prefixes.size(), workers, [&](std::size_t p) {
    PartitionSearch search(h, min_blocks, max_blocks);
    Acc& acc = results[p];
    search.run(prefixes[p], [&](std::span<const std::uint8_t> a, std::uint32_t blocks, int v) {
      leaf(acc, a, blocks, v);
    });
  });
  return results;
}

void check_budget(std::uint32_t m, std::uint32_t q, const EnumerationOptions& opt) {
  const std::uint32_t nv = 2 * m * q;
  const std::uint32_t limit = opt.allow_slow ? opt.slow_max_vertices : opt.max_vertices;
  if (nv > limit) {
    std::ostringstream os;
    os << "enumerating H(m=" << m << ", q=" << q << ") with " << nv
       << " vertices is infeasible at desk scale: limit is " << limit << " vertices";
    if (!opt.allow_slow) os << " (allow_slow raises it to " << opt.slow_max_vertices << ")";
    throw Infeasible(os.str());
  }
}

}  // namespace

DominanceReport enumerate_dominant(std::uint32_t m, std::uint32_t q,
                                   const EnumerationOptions& options) {
  if (m == 0 || q == 0) throw InvalidArgument("enumerate_dominant: m and q must be >= 1");
  check_budget(m, q, options);
  const HGraph h(m, q);
  const std::uint32_t target_blocks = 2 * m * q - m * (q - 1);

  struct Acc {
    std::uint64_t count = 0;
    std::uint64_t leaves = 0;
    std::vector<ConstraintPartition> partitions;
    std::vector<PredicateResults> results;
    std::vector<Violation> violations;
  };
  auto leaf = [&](Acc& acc, std::span<const std::uint8_t> a, std::uint32_t, int v) {
    ++acc.leaves;
    if (!v) return;
    ++acc.count;
    if (!options.check_structure && !options.keep_partitions) return;
    ConstraintPartition c(std::vector<std::uint8_t>(a.begin(), a.end()));
    PredicateResults r;
    if (options.check_structure) {
      r = evaluate_predicates(h, c);
      if (!r.all()) acc.violations.push_back({r.failures(), c, render_partition(h, c)});
    }
    if (options.keep_partitions) {
      acc.partitions.push_back(std::move(c));
      acc.results.push_back(r);
    }
  };
  auto parts = search_subtrees<Acc>(h, target_blocks, target_blocks, options.threads, leaf);

  DominanceReport report;
  report.m = m;
  report.q = q;
  report.structure_checked = options.check_structure;
  for (auto& acc : parts) {
    report.dominant_count += acc.count;
    report.leaves_visited += acc.leaves;
    std::move(acc.partitions.begin(), acc.partitions.end(), std::back_inserter(report.partitions));
    std::move(acc.results.begin(), acc.results.end(), std::back_inserter(report.predicate_results));
    std::move(acc.violations.begin(), acc.violations.end(), std::back_inserter(report.violations));
  }
  return report;
}

DominanceReport verify_structure(std::uint32_t m, std::uint32_t q, EnumerationOptions options) {
  options.check_structure = true;
  DominanceReport report = enumerate_dominant(m, q, options);
  if (!report.violations.empty()) {
    const Violation& v = report.violations.front();
    std::string names;
    for (const auto& p : v.predicates) names += (names.empty() ? "" : ", ") + p;
    throw VerificationFailure("dominant constraint graph on H(m=" + std::to_string(m) +
                              ", q=" + std::to_string(q) + ") violates " + names + ": " +
                              v.rendered);
  }
  return report;
}

void for_each_partition(const HGraph& h, std::uint32_t min_blocks, std::uint32_t max_blocks,
                        const std::function<void(const ConstraintPartition&, int)>& visit) {
  PartitionSearch search(h, min_blocks, max_blocks);
  search.run({}, [&](std::span<const std::uint8_t> a, std::uint32_t, int v) {
    visit(ConstraintPartition(std::vector<std::uint8_t>(a.begin(), a.end())), v);
  });
}

std::map<std::uint32_t, std::uint64_t> nonzero_partitions_by_blocks(std::uint32_t m,
                                                                    std::uint32_t q) {
  const HGraph h(m, q);
  std::map<std::uint32_t, std::uint64_t> out;
  PartitionSearch search(h, 1, h.vertex_count());
  search.run({}, [&](std::span<const std::uint8_t>, std::uint32_t blocks, int v) {
    if (v) ++out[blocks];
  });
  return out;
}

std::uint32_t min_nonzero_edge_count(std::uint32_t m, std::uint32_t q) {
  const auto by_blocks = nonzero_partitions_by_blocks(m, q);
  if (by_blocks.empty()) throw Error("no nonzero-valued constraint graph found");
  return 2 * m * q - by_blocks.rbegin()->first;
}

combinatorics::BigInt expected_trace_from_partitions(std::uint32_t m, std::uint32_t q,
                                                     std::uint32_t n) {
  combinatorics::BigInt total = 0;
  for (const auto& [blocks, count] : nonzero_partitions_by_blocks(m, q)) {
    if (blocks > n) continue;
    combinatorics::BigInt falling = 1;
    for (std::uint32_t k = 0; k < blocks; ++k) falling *= (n - k);
    total += falling * count;
  }
  return total;
}

}  // namespace gmspec::constraints
