#include "tsm/algorithms.hpp"

#include <algorithm>
#include <cctype>

namespace tsm::alg {

std::size_t Graph::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] == name) return i;
  }
  throw NodeNotFound("node " + name + " is not in the graph");
}

TropicalMatrix adjacency_matrix(const Graph& g) {
  TropicalMatrix a(g.nodes.size());
  for (const auto& e : g.edges) a.at(e.dst, e.src) = TimeValue(e.weight);
  return a;
}

namespace {

// Register roles for the shortest-path-tree kernel. The iteration body fits
// the default 8-register file exactly.
constexpr const char* kD = "r0";      // unvisited distance slack
constexpr const char* kV = "r1";      // visited mask (0 = visited)
constexpr const char* kN = "r2";      // one-hot current node
constexpr const char* kE = "r3";      // neighbor exploration
constexpr const char* kT = "r4";      // visited-masked exploration
constexpr const char* kF = "r5";      // newly found shortest paths
constexpr const char* kFs = "r6";     // binary mask of found nodes
constexpr const char* kTmp = "r7";    // scratch for in-place updates
constexpr const char* kA = "m0";      // adjacency
constexpr const char* kP = "m1";      // parent matrix

std::vector<Instruction> dijkstra_iteration(bool literal_f) {
  std::vector<Instruction> body;
  body.push_back(isa::argmin(kD, kN));
  body.push_back(isa::vmm(kA, kN, kE));
  if (literal_f) {
    body.push_back(isa::ew_inhibit(kD, kE, kF));
  } else {
    // Amended mask: block edges into already-visited nodes before comparing
    // against the current distances.
    body.push_back(isa::ew_inhibit(kV, kE, kT));
    body.push_back(isa::ew_inhibit(kD, kT, kF));
  }
  // v := v min n and d' := d min f go through scratch; an instruction may not
  // name its destination as a source.
  body.push_back(isa::ew_min(kV, kN, kTmp));
  body.push_back(isa::move(kTmp, kV));
  body.push_back(isa::ew_min(kD, kF, kTmp));
  body.push_back(isa::ew_inhibit(kV, kTmp, kD, WriteMode::PROJECTIVE));
  body.push_back(isa::binarize(kF, kFs, WriteMode::PROJECTIVE));
  body.push_back(isa::inhibit_rows(kFs, kP));
  body.push_back(isa::write_column(kN, kF, kP));
  return body;
}

std::size_t finite_index(const Wavefront& onehot) {
  for (std::size_t i = 0; i < onehot.size(); ++i) {
    if (onehot[i].finite()) return i;
  }
  throw Error("selector has no finite element");
}

unsigned bits_for(std::uint64_t value, unsigned floor_bits) {
  unsigned bits = floor_bits;
  while (bits < 62 && ((std::uint64_t{1} << bits) - 1) < value) ++bits;
  if (((std::uint64_t{1} << bits) - 1) < value) {
    throw RangeViolation("required dynamic range exceeds 62 bits");
  }
  return bits;
}

}  // namespace

DijkstraResult temporal_dijkstra(const Graph& g, const std::string& source,
                                 const DijkstraOptions& opt) {
  const std::size_t n = g.nodes.size();
  const std::size_t s = g.index_of(source);

  MachineConfig cfg;
  cfg.width = n;
  cfg.register_count = 8;
  cfg.bank_count = 2;
  cfg.range.bits = opt.bits;
  cfg.range.policy = opt.policy;
  cfg.costs = opt.costs;
  Machine machine(cfg);

  DijkstraResult result;
  result.machine = cfg;

  auto run_step = [&](const Instruction& instr, std::size_t iteration) {
    try {
      result.trace.push_back(machine.execute(instr));
    } catch (const RangeViolation& ex) {
      throw RangeViolation("iteration " + std::to_string(iteration) + ", " +
                           opcode_name(instr.opcode) + ": " + ex.what());
    }
  };

  run_step(isa::program_matrix(adjacency_matrix(g), kA), 0);
  machine.host_write(kD, make_onehot(n, s));
  machine.host_write(kV, make_filled(n, kInf));

  const std::vector<Instruction> body = dijkstra_iteration(opt.literal_f);

  std::size_t iteration = 0;
  while (machine.halt_test(kD)) {
    ++iteration;
    if (iteration > n) {
      throw Error("shortest-path kernel did not converge");
    }
    for (const auto& instr : body) run_step(instr, iteration);

    result.visit_order.push_back(finite_index(machine.host_read(kN)));
    // The projective distance update sits three entries before the end of the
    // iteration, ahead of BINARIZE, INHIBIT_ROWS, and WRITE_COLUMN.
    const TraceEntry& update = result.trace[result.trace.size() - 4];
    result.norm_constants.push_back(update.norm_constant_emitted);
  }

  result.parent_matrix = machine.bank_entries(kP);
  result.distances =
      recover_distances(result.visit_order, result.norm_constants, n);
  return result;
}

std::vector<TimeValue> recover_distances(
    const std::vector<std::size_t>& visit_order,
    const std::vector<TimeValue>& norm_constants, std::size_t node_count) {
  std::vector<TimeValue> distances(node_count, kInf);
  TimeValue acc{0};
  for (std::size_t k = 0; k < visit_order.size(); ++k) {
    distances[visit_order[k]] = acc;
    if (k < norm_constants.size()) acc = t_mul(acc, norm_constants[k]);
  }
  return distances;
}

TreeCheck validate_tree(const Graph& g, std::size_t source,
                        const TropicalMatrix& parent_matrix,
                        const std::vector<TimeValue>& oracle_distances) {
  const std::size_t n = g.nodes.size();
  auto fail = [](std::string detail) {
    return TreeCheck{false, std::move(detail)};
  };
  if (parent_matrix.n() != n || oracle_distances.size() != n) {
    return fail("dimension mismatch");
  }

  for (std::size_t j = 0; j < n; ++j) {
    std::size_t finite_count = 0;
    std::size_t parent = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (parent_matrix.at(j, i).finite()) {
        ++finite_count;
        parent = i;
      }
    }
    const bool reachable = oracle_distances[j].finite();
    if (j == source || !reachable) {
      if (finite_count != 0) {
        return fail("row " + g.nodes[j] + " should be empty");
      }
      continue;
    }
    if (finite_count != 1) {
      return fail("row " + g.nodes[j] + " has " +
                  std::to_string(finite_count) + " finite entries");
    }
    const TimeValue w = parent_matrix.at(j, parent);
    bool edge_found = false;
    for (const auto& e : g.edges) {
      if (e.src == parent && e.dst == j) {
        edge_found = true;
        if (TimeValue(e.weight) != w) {
          return fail("row " + g.nodes[j] + " records weight " + w.str() +
                      " for an edge of weight " + std::to_string(e.weight));
        }
        break;
      }
    }
    if (!edge_found) {
      return fail("row " + g.nodes[j] + " records a nonexistent edge from " +
                  g.nodes[parent]);
    }
    if (!oracle_distances[parent].finite() ||
        t_mul(oracle_distances[parent], w) != oracle_distances[j]) {
      return fail("path sum through " + g.nodes[parent] + " into " +
                  g.nodes[j] + " does not match the distance");
    }
  }
  return {};
}

std::vector<TimeValue> encode_sequence(const std::string& s) {
  std::vector<TimeValue> out;
  out.reserve(s.size());
  for (char c : s) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
      case 'G': out.push_back(TimeValue(0)); break;
      case 'A': out.push_back(TimeValue(1)); break;
      case 'T': out.push_back(TimeValue(2)); break;
      case 'C': out.push_back(TimeValue(3)); break;
      default:
        throw InvalidAlphabet(std::string("character '") + c +
                              "' is not one of G, A, T, C");
    }
  }
  return out;
}

namespace {

// Register roles for the alignment kernel.
constexpr const char* kXk = "r0";   // sequence slice codes
constexpr const char* kYk = "r1";   // reversed sequence slice codes
constexpr const char* kCr = "r2";   // raw coincidence, later the r vector
constexpr const char* kC = "r3";    // normalized match mask (0 match, inf mismatch)
constexpr const char* kAv = "r4";   // a = sigma (x) mu[k-1]
constexpr const char* kAsh = "r5";  // a shifted left by one
constexpr const char* kMb = "r6";   // broadcast mismatch cost
constexpr const char* kMc = "r7";   // m min c
constexpr const char* kB = "r8";    // diagonal candidates
constexpr const char* kM1 = "r9";   // mu[k-1], padded
constexpr const char* kM2 = "r10";  // aligned slice of mu[k-2], padded
constexpr const char* kT1 = "r11";  // min(a, b)

Wavefront pad_to(const Wavefront& w, std::size_t width) {
  Wavefront out(width, kInf);
  std::copy(w.begin(), w.end(), out.begin());
  return out;
}

}  // namespace

NwResult temporal_nw(const AlignmentProblem& p, const CostTable& costs) {
  if (p.x.size() != p.y.size()) {
    throw DimensionMismatch("sequences must have equal length");
  }
  const std::size_t n = p.x.size();
  if (n == 0) throw Error("sequences must be non-empty");
  if (p.sigma == 0 || p.m == 0) {
    throw Error("indel and mismatch costs must be at least 1");
  }
  const std::vector<TimeValue> xc = encode_sequence(p.x);
  const std::vector<TimeValue> yc = encode_sequence(p.y);

  // Worst-case score cell is (i+j) * sigma at i+j = 2n; mismatch chains are
  // bounded by the same product with m.
  const std::uint64_t bound = 2 * n * std::max(p.sigma, p.m);
  const std::size_t width = n + 1;

  MachineConfig cfg;
  cfg.width = width;
  cfg.register_count = 12;
  cfg.bank_count = 0;
  cfg.range.bits = bits_for(bound, 5);
  cfg.costs = costs;
  Machine machine(cfg);

  NwResult result;
  result.machine = cfg;

  machine.host_write(kMb, make_filled(width, TimeValue(p.m)));

  // mu[0] = [0], mu[1] = [sigma, sigma].
  Wavefront mu_prev2{TimeValue(0)};
  Wavefront mu_prev{TimeValue(p.sigma), TimeValue(p.sigma)};

  auto exec = [&](const Instruction& instr) {
    result.trace.push_back(machine.execute(instr));
  };

  for (std::size_t k = 2; k <= 2 * n; ++k) {
    const bool rising = k <= n;
    const std::size_t c_len = rising ? k - 1 : 2 * n - k + 1;

    // Match vector over gene codes. Rising: x[j] vs y[k-2-j].
    // Falling: x[k-n-1+p] vs y[n-1-p].
    Wavefront xs(c_len), ys(c_len);
    for (std::size_t j = 0; j < c_len; ++j) {
      if (rising) {
        xs[j] = xc[j];
        ys[j] = yc[k - 2 - j];
      } else {
        xs[j] = xc[k - n - 1 + j];
        ys[j] = yc[n - 1 - j];
      }
    }
    machine.host_write(kXk, pad_to(xs, width));
    machine.host_write(kYk, pad_to(ys, width));
    exec(isa::coincidence(kXk, kYk, kCr, TimeValue(1)));
    exec(isa::binarize(kCr, kC, WriteMode::PROJECTIVE));

    // Aligned slice of mu[k-2]: whole vector while k <= n+1, otherwise both
    // boundary elements drop out.
    Wavefront mu2_slice;
    if (k <= n + 1) {
      mu2_slice = mu_prev2;
    } else {
      mu2_slice.assign(mu_prev2.begin() + 1, mu_prev2.end() - 1);
    }
    machine.host_write(kM2, pad_to(mu2_slice, width));
    exec(isa::ew_min(kC, kMb, kMc));
    exec(isa::tropmul(kMc, kM2, kB));

    machine.host_write(kM1, pad_to(mu_prev, width));
    exec(isa::scale(TimeValue(p.sigma), kM1, kAv));

    const std::size_t a_len = mu_prev.size();
    Wavefront a = machine.host_read(kAv);
    Wavefront a_shift(a.begin() + 1, a.end());
    machine.host_write(kAsh, pad_to(a_shift, width));

    exec(isa::ew_min(kAv, kB, kT1));
    exec(isa::ew_min(kT1, kAsh, kCr));

    const Wavefront r = machine.host_read(kCr);
    Wavefront mu_k;
    if (rising) {
      // Boundary cells take the pure indel path.
      mu_k.reserve(k + 1);
      mu_k.push_back(a[0]);
      for (std::size_t j = 0; j < c_len; ++j) mu_k.push_back(r[j]);
      mu_k.push_back(a[a_len - 1]);
    } else {
      mu_k.assign(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(c_len));
    }
    mu_prev2 = std::move(mu_prev);
    mu_prev = std::move(mu_k);
  }

  if (mu_prev.size() != 1) {
    throw Error("alignment kernel produced a malformed final diagonal");
  }
  result.cost = mu_prev[0];
  return result;
}

ClosureResult closure(const TropicalMatrix& a, const Wavefront& x,
                      std::size_t hops, const ClosureOptions& opt) {
  const std::size_t n = a.n();
  if (x.size() != n) {
    throw DimensionMismatch("vector length does not match matrix dimension");
  }

  unsigned bits = opt.bits;
  if (bits == 0) {
    std::uint64_t max_a = 0;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        if (a.at(j, i).finite()) max_a = std::max(max_a, a.at(j, i).ticks());
      }
    }
    std::uint64_t max_x = 0;
    for (auto e : x) {
      if (e.finite()) max_x = std::max(max_x, e.ticks());
    }
    bits = bits_for(max_x + hops * max_a, 5);
  }

  MachineConfig cfg;
  cfg.width = n;
  cfg.register_count = 4;
  cfg.bank_count = 1;
  cfg.range.bits = bits;
  cfg.range.policy = opt.policy;
  cfg.costs = opt.costs;
  Machine machine(cfg);

  ClosureResult result;
  result.machine = cfg;

  auto exec = [&](const Instruction& instr) {
    result.trace.push_back(machine.execute(instr));
  };

  exec(isa::program_matrix(a, "m0"));
  machine.host_write("r0", x);  // accumulator
  machine.host_write("r1", x);  // current hop term

  for (std::size_t k = 0; k < hops; ++k) {
    exec(isa::vmm("m0", "r1", "r2"));
    exec(isa::ew_min("r0", "r2", "r3"));
    exec(isa::move("r3", "r0"));
    exec(isa::move("r2", "r1"));
  }

  result.y = machine.host_read("r0");
  return result;
}

}  // namespace tsm::alg
