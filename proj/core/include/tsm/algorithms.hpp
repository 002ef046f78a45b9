#pragma once

// Graph and alignment workloads driven over the state machine, plus
// independent classical oracles for each. The oracles share no arithmetic
// helpers with the machine path.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsm/state_machine.hpp"
#include "tsm/tropical_core.hpp"

namespace tsm::alg {

// Weighted directed graph. Node order is fixed by first appearance; weights
// are nonnegative; (src, dst) pairs are unique; self loops are dropped on
// ingestion.
struct Graph {
  struct Edge {
    std::size_t src = 0;
    std::size_t dst = 0;
    std::uint64_t weight = 0;
  };

  std::vector<std::string> nodes;
  std::vector<Edge> edges;

  std::size_t index_of(const std::string& name) const;  // NodeNotFound
};

// Entry (row dst, column src) holds the edge weight, so column i lists the
// outgoing edges of node i.
TropicalMatrix adjacency_matrix(const Graph& g);

struct DijkstraOptions {
  // Unamended exploration mask f := d -| e. Reproduces the parent-matrix
  // corruption on graphs with edges into already-visited nodes.
  bool literal_f = false;
  unsigned bits = 5;
  OverflowPolicy policy = OverflowPolicy::STRICT;
  CostTable costs{};
};

struct DijkstraResult {
  // Row j holds at most one finite entry; a finite entry at column i records
  // the tree edge i -> j with its weight.
  TropicalMatrix parent_matrix;
  std::vector<std::size_t> visit_order;
  // One constant per iteration, emitted by the projective distance update.
  std::vector<TimeValue> norm_constants;
  // Absolute distances per node index; unreachable nodes are infinite.
  std::vector<TimeValue> distances;
  std::vector<TraceEntry> trace;
  MachineConfig machine;
};

DijkstraResult temporal_dijkstra(const Graph& g, const std::string& source,
                                 const DijkstraOptions& opt = {});

struct ClassicalDijkstra {
  std::vector<TimeValue> distances;
  std::vector<std::optional<std::size_t>> parent;
};

// Textbook binary-heap implementation over plain integers.
ClassicalDijkstra classical_dijkstra(const Graph& g, const std::string& source);

// distances[visit_order[k]] = sum of norm_constants[0..k-1]; nodes that were
// never visited stay infinite.
std::vector<TimeValue> recover_distances(
    const std::vector<std::size_t>& visit_order,
    const std::vector<TimeValue>& norm_constants, std::size_t node_count);

struct TreeCheck {
  bool ok = true;
  std::string detail;
};

// Validates the parent matrix as a shortest-path tree against oracle
// distances: reachable non-source rows have exactly one finite entry, the
// entry equals the graph's edge weight, and parent distance plus weight equals
// the node's distance. Source and unreachable rows must be all-infinity.
TreeCheck validate_tree(const Graph& g, std::size_t source,
                        const TropicalMatrix& parent_matrix,
                        const std::vector<TimeValue>& oracle_distances);

// Equal-length sequences over {G, A, T, C}, encoded G=0, A=1, T=2, C=3.
struct AlignmentProblem {
  std::string x;
  std::string y;
  std::uint64_t sigma = 1;  // indel cost, >= 1
  std::uint64_t m = 1;      // mismatch cost, >= 1
};

std::vector<TimeValue> encode_sequence(const std::string& s);

struct NwResult {
  TimeValue cost{0};
  std::vector<TraceEntry> trace;
  MachineConfig machine;
};

// Skew-diagonal forward pass on the machine. The dynamic range is sized
// automatically from the worst-case score 2n * max(sigma, m), floor 5 bits.
NwResult temporal_nw(const AlignmentProblem& p, const CostTable& costs = {});

// Textbook O(n^2) dynamic program over plain integers.
std::uint64_t classical_nw(const AlignmentProblem& p);

struct ClosureOptions {
  // 0 means size automatically from max_finite(x) + hops * max_finite(A).
  unsigned bits = 0;
  OverflowPolicy policy = OverflowPolicy::STRICT;
  CostTable costs{};
};

struct ClosureResult {
  Wavefront y;
  std::vector<TraceEntry> trace;
  MachineConfig machine;
};

// y = min over k in [0, hops] of A^k (x) computed by iterated machine VMM
// with a running elementwise min. hops = n-1 reaches the fixpoint.
ClosureResult closure(const TropicalMatrix& a, const Wavefront& x,
                      std::size_t hops, const ClosureOptions& opt = {});

// Standard relaxation to fixpoint over plain integers.
Wavefront minplus_bellman_ford(const TropicalMatrix& a, const Wavefront& x);

}  // namespace tsm::alg
