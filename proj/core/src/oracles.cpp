// Classical reference implementations. These run over raw 64-bit integers
// with UINT64_MAX as the unreachable sentinel and deliberately avoid the
// tropical_core helpers, so they stay independent of the machine path.

#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "tsm/algorithms.hpp"

namespace tsm::alg {

namespace {
constexpr std::uint64_t kUnreach = std::numeric_limits<std::uint64_t>::max();
}

ClassicalDijkstra classical_dijkstra(const Graph& g,
                                     const std::string& source) {
  const std::size_t n = g.nodes.size();
  const std::size_t s = g.index_of(source);

  std::vector<std::vector<std::pair<std::size_t, std::uint64_t>>> adj(n);
  for (const auto& e : g.edges) adj[e.src].emplace_back(e.dst, e.weight);

  std::vector<std::uint64_t> dist(n, kUnreach);
  std::vector<std::optional<std::size_t>> parent(n);
  using Item = std::pair<std::uint64_t, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[s] = 0;
  heap.emplace(0, s);

  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d != dist[u]) continue;
    for (auto [v, w] : adj[u]) {
      std::uint64_t cand = d + w;
      if (cand < dist[v]) {
        dist[v] = cand;
        parent[v] = u;
        heap.emplace(cand, v);
      }
    }
  }

  ClassicalDijkstra out;
  out.distances.resize(n, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    if (dist[i] != kUnreach) out.distances[i] = TimeValue(dist[i]);
  }
  out.parent = std::move(parent);
  return out;
}

std::uint64_t classical_nw(const AlignmentProblem& p) {
  if (p.x.size() != p.y.size()) {
    throw DimensionMismatch("sequences must have equal length");
  }
  const std::size_t n = p.x.size();
  if (n == 0) throw Error("sequences must be non-empty");
  std::vector<TimeValue> xc = encode_sequence(p.x);
  std::vector<TimeValue> yc = encode_sequence(p.y);

  std::vector<std::vector<std::uint64_t>> m(n + 1,
                                            std::vector<std::uint64_t>(n + 1));
  for (std::size_t i = 0; i <= n; ++i) m[i][0] = i * p.sigma;
  for (std::size_t j = 0; j <= n; ++j) m[0][j] = j * p.sigma;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      std::uint64_t sub =
          m[i - 1][j - 1] + (xc[i - 1] == yc[j - 1] ? 0 : p.m);
      std::uint64_t del = m[i - 1][j] + p.sigma;
      std::uint64_t ins = m[i][j - 1] + p.sigma;
      m[i][j] = std::min(sub, std::min(del, ins));
    }
  }
  return m[n][n];
}

Wavefront minplus_bellman_ford(const TropicalMatrix& a, const Wavefront& x) {
  const std::size_t n = a.n();
  if (x.size() != n) {
    throw DimensionMismatch("vector length does not match matrix dimension");
  }
  std::vector<std::uint64_t> y(n, kUnreach);
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i].finite()) y[i] = x[i].ticks();
  }
  for (std::size_t round = 0; round + 1 < n || round == 0; ++round) {
    bool changed = false;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        if (y[i] == kUnreach || a.at(j, i).is_inf()) continue;
        std::uint64_t cand = y[i] + a.at(j, i).ticks();
        if (cand < y[j]) {
          y[j] = cand;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  Wavefront out(n, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] != kUnreach) out[i] = TimeValue(y[i]);
  }
  return out;
}

}  // namespace tsm::alg
