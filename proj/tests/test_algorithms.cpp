#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "tsm/algorithms.hpp"
#include "tsm/errors.hpp"

using namespace tsm;
using namespace tsm::alg;

namespace {

Wavefront wf(std::initializer_list<TimeValue> xs) { return Wavefront(xs); }

// a->b:2, b->c:2, b->d:4, c->a:1, c->d:1.
Graph worked_graph() {
  Graph g;
  g.nodes = {"a", "b", "c", "d"};
  g.edges = {{0, 1, 2}, {1, 2, 2}, {1, 3, 4}, {2, 0, 1}, {2, 3, 1}};
  return g;
}

// The cheap path to b is direct, but c explores into b long after b was
// visited. The unamended mask lets that late exploration through.
Graph corruption_graph() {
  Graph g;
  g.nodes = {"a", "b", "c"};
  g.edges = {{0, 1, 1}, {0, 2, 10}, {2, 1, 1}};
  return g;
}

Graph random_graph(std::mt19937& rng, std::size_t n, double p,
                   std::uint64_t wmax) {
  Graph g;
  for (std::size_t i = 0; i < n; ++i) g.nodes.push_back("n" + std::to_string(i));
  std::bernoulli_distribution edge(p);
  std::uniform_int_distribution<std::uint64_t> weight(1, wmax);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t d = 0; d < n; ++d) {
      if (s != d && edge(rng)) g.edges.push_back({s, d, weight(rng)});
    }
  }
  return g;
}

// Narrow range first, wider on overflow. Mirrors how a caller sizes the
// datapath without analyzing the graph up front.
DijkstraResult dijkstra_auto_bits(const Graph& g, const std::string& source) {
  DijkstraOptions opt;
  opt.bits = 5;
  try {
    return temporal_dijkstra(g, source, opt);
  } catch (const RangeViolation&) {
    opt.bits = 8;
    return temporal_dijkstra(g, source, opt);
  }
}

std::size_t finite_count(const TropicalMatrix& m, std::size_t row) {
  std::size_t c = 0;
  for (std::size_t col = 0; col < m.n(); ++col) {
    if (m.at(row, col).finite()) ++c;
  }
  return c;
}

}  // namespace

TEST_CASE("graph basics") {
  Graph g = worked_graph();
  CHECK(g.index_of("a") == 0);
  CHECK(g.index_of("d") == 3);
  CHECK_THROWS_AS(g.index_of("z"), NodeNotFound);

  TropicalMatrix a = adjacency_matrix(g);
  REQUIRE(a.n() == 4);
  CHECK(a.at(1, 0) == TimeValue(2));
  CHECK(a.at(2, 1) == TimeValue(2));
  CHECK(a.at(3, 1) == TimeValue(4));
  CHECK(a.at(0, 2) == TimeValue(1));
  CHECK(a.at(3, 2) == TimeValue(1));
  std::size_t finite = 0;
  for (std::size_t r = 0; r < 4; ++r) finite += finite_count(a, r);
  CHECK(finite == g.edges.size());
}

TEST_CASE("temporal dijkstra on the worked graph") {
  Graph g = worked_graph();
  DijkstraResult res = temporal_dijkstra(g, "a");

  CHECK(res.distances == wf({0, 2, 4, 5}));
  CHECK(res.visit_order == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(res.norm_constants == std::vector<TimeValue>{2, 2, 1, 0});
  CHECK(res.machine.width == 4);

  CHECK(res.parent_matrix.at(1, 0) == TimeValue(2));
  CHECK(res.parent_matrix.at(2, 1) == TimeValue(2));
  CHECK(res.parent_matrix.at(3, 2) == TimeValue(1));
  CHECK(finite_count(res.parent_matrix, 0) == 0);

  TreeCheck check = validate_tree(g, 0, res.parent_matrix, res.distances);
  CHECK(check.ok);
  CHECK(check.detail.empty());

  CHECK(recover_distances(res.visit_order, res.norm_constants, 4) ==
        res.distances);

  // One matrix-programming step plus eleven instructions per iteration.
  CHECK(res.trace.size() == 1 + 11 * 4);
  CHECK(res.trace[0].instruction.opcode == Opcode::PROGRAM_MATRIX);
}

TEST_CASE("temporal dijkstra from an interior source") {
  Graph g = worked_graph();
  DijkstraResult res = temporal_dijkstra(g, "b");
  ClassicalDijkstra oracle = classical_dijkstra(g, "b");
  CHECK(res.distances == oracle.distances);
  CHECK(res.distances == wf({3, 0, 2, 3}));
  CHECK(validate_tree(g, 1, res.parent_matrix, oracle.distances).ok);
}

TEST_CASE("temporal dijkstra input validation") {
  Graph g = worked_graph();
  CHECK_THROWS_AS(temporal_dijkstra(g, "nope"), NodeNotFound);
  CHECK_THROWS_AS(classical_dijkstra(g, "nope"), NodeNotFound);

  // A 3-bit range tops out at 7 and rejects the weight 9 while programming.
  Graph wide;
  wide.nodes = {"a", "b"};
  wide.edges = {{0, 1, 9}};
  DijkstraOptions opt;
  opt.bits = 3;
  CHECK_THROWS_AS(temporal_dijkstra(wide, "a", opt), RangeViolation);
}

TEST_CASE("unreachable nodes stay infinite") {
  Graph g;
  g.nodes = {"a", "b", "c"};
  g.edges = {{0, 1, 1}};
  DijkstraResult res = temporal_dijkstra(g, "a");
  CHECK(res.distances == wf({0, 1, kInf}));
  CHECK(res.visit_order == std::vector<std::size_t>{0, 1});
  CHECK(finite_count(res.parent_matrix, 2) == 0);
  CHECK(validate_tree(g, 0, res.parent_matrix, res.distances).ok);
}

TEST_CASE("unamended exploration mask corrupts the parent matrix") {
  Graph g = corruption_graph();
  ClassicalDijkstra oracle = classical_dijkstra(g, "a");
  REQUIRE(oracle.distances == wf({0, 1, 10}));

  SUBCASE("amended mask yields a valid tree") {
    DijkstraResult res = temporal_dijkstra(g, "a");
    CHECK(res.distances == oracle.distances);
    CHECK(res.parent_matrix.at(1, 0) == TimeValue(1));
    CHECK(finite_count(res.parent_matrix, 1) == 1);
    CHECK(validate_tree(g, 0, res.parent_matrix, res.distances).ok);
  }

  SUBCASE("literal mask reparents b through c") {
    DijkstraOptions opt;
    opt.literal_f = true;
    DijkstraResult res = temporal_dijkstra(g, "a", opt);
    // Distances are unaffected; only the recorded tree is wrong.
    CHECK(res.distances == oracle.distances);
    CHECK(res.parent_matrix.at(1, 2).finite());
    CHECK_FALSE(res.parent_matrix.at(1, 0).finite());
    TreeCheck check = validate_tree(g, 0, res.parent_matrix, res.distances);
    CHECK_FALSE(check.ok);
    CHECK(check.detail.find("path sum") != std::string::npos);
  }
}

TEST_CASE("validate_tree rejects tampering") {
  Graph g = worked_graph();
  DijkstraResult res = temporal_dijkstra(g, "a");
  REQUIRE(validate_tree(g, 0, res.parent_matrix, res.distances).ok);

  SUBCASE("dimension mismatch") {
    TropicalMatrix small(3);
    CHECK_FALSE(validate_tree(g, 0, small, res.distances).ok);
  }
  SUBCASE("second finite entry in a row") {
    TropicalMatrix pm = res.parent_matrix;
    pm.at(1, 2) = TimeValue(1);
    CHECK_FALSE(validate_tree(g, 0, pm, res.distances).ok);
  }
  SUBCASE("wrong edge weight") {
    TropicalMatrix pm = res.parent_matrix;
    pm.at(1, 0) = TimeValue(3);
    CHECK_FALSE(validate_tree(g, 0, pm, res.distances).ok);
  }
  SUBCASE("parent along a nonexistent edge") {
    TropicalMatrix pm = res.parent_matrix;
    pm.at(1, 0) = kInf;
    pm.at(1, 3) = TimeValue(2);
    CHECK_FALSE(validate_tree(g, 0, pm, res.distances).ok);
  }
  SUBCASE("reachable row left empty") {
    TropicalMatrix pm = res.parent_matrix;
    pm.at(3, 2) = kInf;
    CHECK_FALSE(validate_tree(g, 0, pm, res.distances).ok);
  }
  SUBCASE("source row must stay empty") {
    TropicalMatrix pm = res.parent_matrix;
    pm.at(0, 2) = TimeValue(1);
    CHECK_FALSE(validate_tree(g, 0, pm, res.distances).ok);
  }
}

TEST_CASE("random graphs agree with the classical oracle") {
  std::mt19937 rng(101);
  std::uniform_int_distribution<std::size_t> size(2, 12);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = size(rng);
    Graph g = random_graph(rng, n, 0.35, 7);
    DijkstraResult res = dijkstra_auto_bits(g, g.nodes[0]);
    ClassicalDijkstra oracle = classical_dijkstra(g, g.nodes[0]);
    REQUIRE(res.distances == oracle.distances);
    REQUIRE(validate_tree(g, 0, res.parent_matrix, oracle.distances).ok);
    REQUIRE(recover_distances(res.visit_order, res.norm_constants, n) ==
            oracle.distances);
    // Distances never decrease along the visit order.
    for (std::size_t k = 1; k < res.visit_order.size(); ++k) {
      REQUIRE(res.distances[res.visit_order[k - 1]] <=
              res.distances[res.visit_order[k]]);
    }
  }
}

TEST_CASE("recover_distances") {
  CHECK(recover_distances({2, 0}, {TimeValue(3), TimeValue(0)}, 3) ==
        wf({3, kInf, 0}));
  CHECK(recover_distances({}, {}, 2) == wf({kInf, kInf}));
}

TEST_CASE("sequence encoding") {
  CHECK(encode_sequence("GATC") == wf({0, 1, 2, 3}));
  CHECK(encode_sequence("gattaca") == wf({0, 1, 2, 2, 1, 3, 1}));
  CHECK_THROWS_AS(encode_sequence("GAUC"), InvalidAlphabet);
  CHECK_THROWS_AS(encode_sequence("G C"), InvalidAlphabet);
}

TEST_CASE("classical alignment oracle") {
  CHECK(classical_nw({"G", "G", 1, 1}) == 0);
  CHECK(classical_nw({"G", "A", 1, 1}) == 1);
  CHECK(classical_nw({"G", "A", 1, 5}) == 2);
  CHECK(classical_nw({"GATTACA", "GCATGCA", 2, 3}) == 7);
}

TEST_CASE("temporal alignment matches the classical oracle") {
  SUBCASE("worked examples") {
    AlignmentProblem p{"GATTACA", "GCATGCA", 2, 3};
    NwResult res = temporal_nw(p);
    CHECK(res.cost == TimeValue(7));
    CHECK_FALSE(res.trace.empty());
  }
  SUBCASE("single symbols") {
    CHECK(temporal_nw({"G", "G", 1, 1}).cost == TimeValue(0));
    CHECK(temporal_nw({"G", "A", 1, 1}).cost == TimeValue(1));
    CHECK(temporal_nw({"G", "A", 1, 5}).cost == TimeValue(2));
  }
  SUBCASE("random pairs") {
    std::mt19937 rng(202);
    std::uniform_int_distribution<std::size_t> len(1, 10);
    std::uniform_int_distribution<int> base(0, 3);
    std::uniform_int_distribution<std::uint64_t> cost(1, 3);
    const char* alphabet = "GATC";
    for (int rep = 0; rep < 40; ++rep) {
      const std::size_t n = len(rng);
      AlignmentProblem p;
      for (std::size_t i = 0; i < n; ++i) {
        p.x.push_back(alphabet[base(rng)]);
        p.y.push_back(alphabet[base(rng)]);
      }
      p.sigma = cost(rng);
      p.m = cost(rng);
      CHECK(temporal_nw(p).cost == TimeValue(classical_nw(p)));
    }
  }
  SUBCASE("dynamic range tracks the worst-case score") {
    CHECK(temporal_nw({"G", "A", 1, 1}).machine.range.bits == 5);
    AlignmentProblem big{"GATTACAGATTA", "GCATGCATGCAT", 3, 3};
    CHECK(temporal_nw(big).machine.range.bits == 7);
    CHECK(temporal_nw(big).cost == TimeValue(classical_nw(big)));
  }
}

TEST_CASE("temporal alignment input validation") {
  CHECK_THROWS_AS(temporal_nw({"GA", "G", 1, 1}), DimensionMismatch);
  CHECK_THROWS_AS(temporal_nw({"", "", 1, 1}), Error);
  CHECK_THROWS_AS(temporal_nw({"G", "A", 0, 1}), Error);
  CHECK_THROWS_AS(temporal_nw({"G", "A", 1, 0}), Error);
}

TEST_CASE("closure on the worked graph") {
  Graph g = worked_graph();
  TropicalMatrix a = adjacency_matrix(g);

  SUBCASE("zero hops returns the input") {
    ClosureResult res = closure(a, make_onehot(4, 1), 0);
    CHECK(res.y == make_onehot(4, 1));
    // Only the matrix programming step is traced; no hop instructions ran.
    REQUIRE(res.trace.size() == 1);
    CHECK(res.trace[0].instruction.opcode == Opcode::PROGRAM_MATRIX);
  }
  SUBCASE("one hop from b") {
    ClosureResult res = closure(a, make_onehot(4, 1), 1);
    CHECK(res.y == wf({kInf, 0, 2, 4}));
  }
  SUBCASE("n-1 hops reaches the fixpoint") {
    ClosureResult res = closure(a, make_onehot(4, 1), 3);
    CHECK(res.y == minplus_bellman_ford(a, make_onehot(4, 1)));
    CHECK(res.y == wf({3, 0, 2, 3}));
  }
  SUBCASE("explicit bits are honored") {
    ClosureOptions opt;
    opt.bits = 6;
    CHECK(closure(a, make_onehot(4, 0), 2, opt).machine.range.bits == 6);
  }
  SUBCASE("automatic bits cover the hop bound") {
    ClosureResult res = closure(a, make_onehot(4, 0), 3);
    CHECK(res.machine.range.bits >= 5);
  }
}

TEST_CASE("closure agrees with relaxation on random graphs") {
  std::mt19937 rng(303);
  std::uniform_int_distribution<std::size_t> size(2, 12);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = size(rng);
    Graph g = random_graph(rng, n, 0.3, 7);
    TropicalMatrix a = adjacency_matrix(g);
    Wavefront x = make_onehot(n, rep % n);
    CHECK(closure(a, x, n - 1).y == minplus_bellman_ford(a, x));

    // Adding a hop can only tighten the reachability wavefront.
    const std::size_t k = rep % n;
    const Wavefront yk = closure(a, x, k).y;
    const Wavefront yk1 = closure(a, x, k + 1).y;
    for (std::size_t i = 0; i < n; ++i) REQUIRE(yk1[i] <= yk[i]);
  }
}

TEST_CASE("closure input validation") {
  TropicalMatrix a(3);
  CHECK_THROWS_AS(closure(a, Wavefront(2, TimeValue(0)), 1), DimensionMismatch);
  CHECK_THROWS_AS(minplus_bellman_ford(a, Wavefront(2, TimeValue(0))),
                  DimensionMismatch);
}
