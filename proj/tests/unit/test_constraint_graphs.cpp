#include <doctest.h>

#include <functional>
#include <map>
#include <set>

#include "gmspec/combinatorics.hpp"
#include "gmspec/constraint_graphs.hpp"
#include "gmspec/error.hpp"
#include "gmspec/graph_matrix.hpp"

using namespace gmspec::constraints;
namespace cb = gmspec::combinatorics;

namespace {

using Blocks = std::vector<std::vector<std::uint32_t>>;

ConstraintPartition blocks(const HGraph& h, const Blocks& b) {
  return ConstraintPartition::from_blocks(h.vertex_count(), b);
}

std::uint32_t id(const HGraph& h, char letter, std::uint32_t copy, std::uint32_t layer) {
  return h.id(letter == 'a' ? Letter::kA : Letter::kB, copy, layer);
}

// Naive oracle: all set partitions of V(H) by unpruned restricted growth,
// piecewise injectivity and val recomputed here from the edge list.
struct NaiveCount {
  std::map<std::uint32_t, std::uint64_t> nonzero_by_edges;
};

NaiveCount naive_enumeration(const HGraph& h) {
  const std::uint32_t nv = h.vertex_count();
  std::vector<std::uint8_t> label(nv, 0);
  NaiveCount out;
  std::function<void(std::uint32_t, std::uint8_t)> rec = [&](std::uint32_t v, std::uint8_t used) {
    if (v == nv) {
      for (std::uint32_t x = 0; x < nv; ++x)
        for (std::uint32_t y = x + 1; y < nv; ++y)
          if (label[x] == label[y] && (h.piece_mask(x) & h.piece_mask(y))) return;
      std::map<std::pair<int, int>, int> mult;
      for (const auto& e : h.edges()) {
        int p = label[e.u], q = label[e.v];
        if (p > q) std::swap(p, q);
        ++mult[{p, q}];
      }
      for (const auto& [k, c] : mult)
        if (c % 2) return;
      ++out.nonzero_by_edges[nv - used];
      return;
    }
    for (std::uint8_t b = 0; b <= used; ++b) {
      label[v] = b;
      rec(v + 1, b == used ? used + 1 : used);
    }
  };
  rec(0, 0);
  return out;
}

}  // namespace

TEST_CASE("H graph construction") {
  SUBCASE("m = 1, q = 2 is a 4-cycle") {
    const HGraph h(1, 2);
    CHECK(h.vertex_count() == 4);
    CHECK(h.edges().size() == 4);
    std::vector<int> degree(4, 0);
    for (const auto& e : h.edges()) {
      ++degree[e.u];
      ++degree[e.v];
      CHECK(e.kind == EdgeKind::kWheel);
    }
    CHECK(degree == std::vector<int>{2, 2, 2, 2});
    CHECK(h.label(0) == "a_1_1");
    CHECK(h.label(1) == "b_1_1");
    CHECK(h.label(2) == "a_2_1");
  }
  SUBCASE("m = 2, q = 3 has 12 vertices and 18 edges") {
    const HGraph h(2, 3);
    CHECK(h.vertex_count() == 12);
    std::size_t wheel = 0, spoke = 0;
    for (const auto& e : h.edges()) (e.kind == EdgeKind::kWheel ? wheel : spoke)++;
    CHECK(wheel == 12);
    CHECK(spoke == 6);
  }
  SUBCASE("m = 2, q = 1 doubles the spoke {a_12, b_11}") {
    const HGraph h(2, 1);
    const auto s = h.spokes(1);
    REQUIRE(s.size() == 2);
    const std::set<std::uint32_t> e1{s[0].u, s[0].v}, e2{s[1].u, s[1].v};
    CHECK(e1 == e2);
    CHECK(e1 == std::set<std::uint32_t>{id(h, 'a', 1, 2), id(h, 'b', 1, 1)});
  }
  SUBCASE("edge count (2m-1) 2q and pieces") {
    for (unsigned m = 1; m <= 3; ++m)
      for (unsigned q = 1; q <= 3; ++q) {
        const HGraph h(m, q);
        CHECK(h.edges().size() == (2 * m - 1) * 2 * q);
        // Every H edge joins two vertices sharing a piece.
        for (const auto& e : h.edges()) CHECK((h.piece_mask(e.u) & h.piece_mask(e.v)) != 0);
      }
  }
  CHECK_THROWS_AS(HGraph(0, 1), gmspec::InvalidArgument);
}

TEST_CASE("partition encoding") {
  const ConstraintPartition p(std::vector<std::uint8_t>{5, 5, 2, 7});
  CHECK(p.block_count() == 3);
  CHECK(p.edge_count() == 1);
  CHECK(p == ConstraintPartition(std::vector<std::uint8_t>{0, 0, 1, 2}));
  CHECK(p.is_isolated(2));
  CHECK_FALSE(p.is_isolated(0));
  const HGraph h(1, 2);
  CHECK(render_partition(h, p) == R"([["a_1_1","b_1_1"],["a_2_1"],["b_2_1"]])");
  CHECK_THROWS_AS(ConstraintPartition::from_blocks(4, {{0, 1}, {1, 2}}), gmspec::InvalidArgument);
}

TEST_CASE("val examples") {
  const HGraph cyc(1, 2);
  const auto singletons = blocks(cyc, {});
  CHECK(val(cyc, singletons) == 0);
  const auto glued = blocks(cyc, {{0, 2}});  // {i1, i3}
  CHECK(val(cyc, glued) == 1);
  const HGraph z1(2, 1);
  CHECK(val(z1, blocks(z1, {})) == 1);
  CHECK_THROWS_AS(val(cyc, blocks(cyc, {{0, 1}})), gmspec::InvalidArgument);
}

TEST_CASE("structural predicate examples") {
  const HGraph cyc(1, 2);
  CHECK(is_parity_preserving(cyc, blocks(cyc, {{0, 2}})));
  CHECK(is_non_crossing(cyc, blocks(cyc, {{0, 2}})));
  CHECK_FALSE(is_parity_preserving(cyc, blocks(cyc, {{0, 1}})));

  const HGraph oct(1, 4);
  CHECK_FALSE(is_non_crossing(oct, blocks(oct, {{0, 4}, {2, 6}})));
  CHECK(is_non_crossing(oct, blocks(oct, {{0, 6}, {2, 4}})));

  const HGraph h3(1, 3);
  CHECK(is_well_behaved(h3, blocks(h3, {{id(h3, 'a', 1, 1), id(h3, 'a', 3, 1)}})));
  CHECK_FALSE(is_well_behaved(h3, blocks(h3, {{id(h3, 'a', 1, 1), id(h3, 'b', 2, 1)}})));

  const HGraph h22(2, 2);
  const auto cross = blocks(h22, {{id(h22, 'a', 1, 1), id(h22, 'a', 1, 2)}});
  CHECK_FALSE(is_well_behaved(h22, cross));
  CHECK_FALSE(is_wheel_respecting(h22, cross));
  CHECK(is_wheel_respecting(h22, blocks(h22, {{id(h22, 'a', 1, 1), id(h22, 'a', 2, 1)}})));
}

TEST_CASE("pre-contract and spoke closure detect violations") {
  const HGraph h(2, 2);
  // a_{1,1} ~ a_{2,1} without a_{1,2} ~ a_{2,2}.
  const auto bad = blocks(h, {{id(h, 'a', 1, 1), id(h, 'a', 2, 1)}});
  CHECK_FALSE(precontract_holds(h, bad));
  const auto good = blocks(h, {{id(h, 'a', 1, 1), id(h, 'a', 2, 1)}, {id(h, 'a', 1, 2), id(h, 'a', 2, 2)}});
  CHECK(precontract_holds(h, good));
  CHECK(spoke_noncrossing_holds(h, blocks(h, {})));
  CHECK(has_spokeless_isolated_vertex(h, blocks(h, {})));
}

TEST_CASE("dominant counts match the closed form") {
  const struct {
    unsigned m, q;
    std::uint64_t count;
  } cases[] = {{1, 1, 1}, {1, 2, 2}, {1, 3, 5}, {1, 4, 14}, {1, 5, 42},
               {2, 1, 1}, {2, 2, 3}, {2, 3, 12}, {3, 2, 4}};
  for (const auto& c : cases) {
    CAPTURE(c.m);
    CAPTURE(c.q);
    const auto r = enumerate_dominant(c.m, c.q, {.threads = 1, .check_structure = true});
    CHECK(r.dominant_count == c.count);
    CHECK(cb::generalized_catalan(c.m, c.q) == c.count);
    CHECK(r.violations.empty());
  }
}

TEST_CASE("pruned enumeration agrees with a naive oracle") {
  for (auto [m, q] : std::vector<std::pair<unsigned, unsigned>>{{1, 2}, {1, 3}, {1, 4}, {2, 1}, {2, 2}, {3, 1}}) {
    CAPTURE(m);
    CAPTURE(q);
    const HGraph h(m, q);
    const auto naive = naive_enumeration(h);
    REQUIRE_FALSE(naive.nonzero_by_edges.empty());
    const auto [min_edges, count] = *naive.nonzero_by_edges.begin();
    CHECK(min_edges == m * (q - 1));
    CHECK(min_nonzero_edge_count(m, q) == min_edges);
    CHECK(enumerate_dominant(m, q).dominant_count == count);
    // Block-count histogram of all nonzero partitions.
    std::map<std::uint32_t, std::uint64_t> by_blocks;
    for (auto [e, c] : naive.nonzero_by_edges) by_blocks[h.vertex_count() - e] = c;
    CHECK(nonzero_partitions_by_blocks(m, q) == by_blocks);
  }
}

TEST_CASE("parallel enumeration is identical to serial") {
  EnumerationOptions serial{.threads = 1, .keep_partitions = true};
  EnumerationOptions parallel{.threads = 4, .keep_partitions = true};
  const auto a = enumerate_dominant(2, 3, serial);
  const auto b = enumerate_dominant(2, 3, parallel);
  CHECK(a.dominant_count == b.dominant_count);
  CHECK(a.leaves_visited == b.leaves_visited);
  CHECK(a.partitions == b.partitions);
}

TEST_CASE("every dominant graph with q >= 2 has at least 2m singleton blocks") {
  for (auto [m, q] : std::vector<std::pair<unsigned, unsigned>>{{1, 4}, {2, 2}, {2, 3}, {3, 2}}) {
    const auto r = enumerate_dominant(m, q, {.keep_partitions = true});
    for (const auto& p : r.partitions) {
      std::uint32_t singles = 0;
      for (std::uint32_t v = 0; v < p.vertex_count(); ++v) singles += p.is_isolated(v);
      CHECK(singles >= 2 * m);
      CHECK(p.edge_count() == m * (q - 1));
    }
  }
}

TEST_CASE("verify_structure passes on dominant graphs and reports all predicates") {
  const auto r = verify_structure(2, 2, {.keep_partitions = true});
  CHECK(r.structure_checked);
  REQUIRE(r.partitions.size() == 3);
  for (const auto& pr : r.predicate_results) CHECK(pr.all());
  CHECK(verify_structure(1, 4).dominant_count == 14);
  PredicateResults failing;
  CHECK(failing.failures().size() == 8);
}

TEST_CASE("feasibility budget") {
  CHECK_THROWS_AS(enumerate_dominant(2, 4), gmspec::Infeasible);
  CHECK_THROWS_AS(enumerate_dominant(3, 3), gmspec::Infeasible);
  try {
    enumerate_dominant(2, 4);
  } catch (const gmspec::Infeasible& e) {
    CHECK(std::string(e.what()).find("infeasible at desk scale") != std::string::npos);
    CHECK(std::string(e.what()).find("12") != std::string::npos);
  }
  CHECK_THROWS_AS(enumerate_dominant(3, 3, {.allow_slow = true}), gmspec::Infeasible);
}

TEST_CASE("tiny exact trace identity") {
  // Average of tr((M M^T)^2) over all 64 graphs on 4 vertices vs sum_C N(C) val(C).
  const auto lhs = gmspec::graph::exact_expected_trace_bruteforce(1, 2, 4);
  const auto rhs = expected_trace_from_partitions(1, 2, 4);
  CHECK(lhs == cb::BigRational(rhs));
  CHECK(rhs == 60);
  // Further sizes within reach of full graph enumeration.
  CHECK(gmspec::graph::exact_expected_trace_bruteforce(1, 3, 5) ==
        cb::BigRational(expected_trace_from_partitions(1, 3, 5)));
  CHECK(gmspec::graph::exact_expected_trace_bruteforce(2, 2, 6) ==
        cb::BigRational(expected_trace_from_partitions(2, 2, 6)));
  CHECK(gmspec::graph::exact_expected_trace_bruteforce(2, 1, 5) ==
        cb::BigRational(expected_trace_from_partitions(2, 1, 5)));
}

TEST_CASE("finite-n expectation and its limit") {
  // E[tr((M M^T)^2)] / (r n^4) for m = 2: leading coefficient D(2,2) = 3.
  auto normalised = [](unsigned n) {
    const auto e = expected_trace_from_partitions(2, 2, n);
    const double r = static_cast<double>(gmspec::graph::matrix_dimension(n, 2));
    return e.convert_to<double>() / (r * std::pow(static_cast<double>(n), 4));
  };
  CHECK(std::abs(normalised(40) - 2.2754) < 1e-3);  // still 24% below the limit at n = 40
  CHECK(std::abs(normalised(100000) - 3.0) < 1e-3);
  CHECK(normalised(20) < normalised(40));

  const unsigned n = 14;
  const double emp = gmspec::graph::empirical_trace_moment(2, 2, n, 60, 5);
  CHECK(std::abs(emp - normalised(n)) < 0.05 * normalised(n));
}
