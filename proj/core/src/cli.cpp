#include "tsm/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tsm/errors.hpp"

namespace tsm::cli {

namespace {

using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint64_t parse_weight(const std::string& tok, std::size_t line_no) {
  if (tok.size() > 1 && tok[0] == '-' &&
      std::all_of(tok.begin() + 1, tok.end(),
                  [](unsigned char c) { return std::isdigit(c); })) {
    throw NegativeWeight(
        "line " + std::to_string(line_no) + ": negative weight " + tok,
        line_no);
  }
  std::uint64_t value = 0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec == std::errc::result_out_of_range) {
    throw ParseError("line " + std::to_string(line_no) + ": weight " + tok +
                         " is out of range",
                     line_no);
  }
  if (ec != std::errc() || ptr != end) {
    throw ParseError("line " + std::to_string(line_no) + ": weight " + tok +
                         " is not a nonnegative integer",
                     line_no);
  }
  return value;
}

json time_to_json(TimeValue t) {
  if (t.is_inf()) return json("inf");
  return json(t.ticks());
}

TimeValue time_from_json(const json& j, const std::string& context) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    throw Error(context + ": the only string tick is \"inf\"");
  }
  if (j.is_number_unsigned()) return TimeValue(j.get<std::uint64_t>());
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return TimeValue(static_cast<std::uint64_t>(j.get<std::int64_t>()));
  }
  throw Error(context + ": ticks are nonnegative integers or \"inf\"");
}

json wavefront_to_json(const Wavefront& w) {
  json arr = json::array();
  for (TimeValue t : w) arr.push_back(time_to_json(t));
  return arr;
}

json machine_to_json(const MachineConfig& mc) {
  const char* policy = mc.range.policy == OverflowPolicy::STRICT
                           ? "STRICT"
                           : "SATURATE_TO_INFINITY";
  return json{
      {"width", mc.width},
      {"register_count", mc.register_count},
      {"bank_count", mc.bank_count},
      {"bits", mc.range.bits},
      {"t_max", mc.range.t_max().ticks()},
      {"overflow_policy", policy},
      {"costs",
       {{"read_pJ_per_line", mc.costs.read_pJ_per_line},
        {"write_pJ_per_line", mc.costs.write_pJ_per_line},
        {"vmm_fJ_per_cell", mc.costs.vmm_fJ_per_cell},
        {"ew_pJ_per_32_channels", mc.costs.ew_pJ_per_32_channels},
        {"vmm_latency_ns_per_cell", mc.costs.vmm_latency_ns_per_cell},
        {"other_op_latency_ns", mc.costs.other_op_latency_ns},
        {"matrix_program_pJ_per_cell", mc.costs.matrix_program_pJ_per_cell}}}};
}

json costs_to_json(const CostReport& r) {
  json per = json::object();
  for (const auto& [op, c] : r.per_opcode) {
    per[opcode_name(op)] = json{{"count", c.count},
                                {"transitions", c.transitions},
                                {"energy_pJ", c.energy_pJ},
                                {"latency_ns", c.latency_ns}};
  }
  json totals = json{{"energy_pJ", r.energy_pJ},
                     {"latency_ns", r.latency_ns},
                     {"transitions", r.transitions},
                     {"edges_traversed", r.edges_traversed},
                     {"GETS", r.gets},
                     {"GETJ", r.getj}};
  return json{{"totals", totals}, {"per_opcode", per}};
}

std::size_t total_overflow_events(const std::vector<TraceEntry>& trace) {
  std::size_t n = 0;
  for (const auto& e : trace) n += e.overflow_events;
  return n;
}

void write_report(const std::string& path, const json& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << report.dump(2) << "\n";
  if (!out) throw Error("failed writing " + path);
}

void print_costs(std::ostream& out, const CostReport& r) {
  out << "\n"
      << std::left << std::setw(16) << "opcode" << std::right << std::setw(7)
      << "count" << std::setw(13) << "transitions" << std::setw(14)
      << "energy_pJ" << std::setw(14) << "latency_ns" << "\n";
  for (const auto& [op, c] : r.per_opcode) {
    out << std::left << std::setw(16) << opcode_name(op) << std::right
        << std::setw(7) << c.count << std::setw(13) << c.transitions
        << std::setw(14) << c.energy_pJ << std::setw(14) << c.latency_ns
        << "\n";
  }
  out << "totals: " << r.energy_pJ << " pJ, " << r.latency_ns << " ns, "
      << r.transitions << " transitions, " << r.edges_traversed << " edges";
  if (r.edges_traversed > 0) {
    out << ", GETS " << r.gets << ", GETJ " << r.getj;
  }
  out << "\n";
}

void print_warnings(std::ostream& out, const std::vector<std::string>& warns) {
  for (const auto& w : warns) out << "warning: " << w << "\n";
}

CostTable load_costs(const std::string& path) {
  if (path.empty()) return CostTable{};
  return CostTable::from_json_file(path);
}

std::uint64_t checked_sum(std::uint64_t a, std::uint64_t b) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b) {
    throw RangeViolation("expression bound overflows");
  }
  return a + b;
}

// Sound upper bound on every finite value the expression can produce,
// tracking the maximum across all subexpressions so intermediates fit too.
std::uint64_t expr_bound(const lang::Expr& e, const lang::Bindings& b,
                         std::uint64_t& global) {
  std::uint64_t v = 0;
  switch (e.kind) {
    case lang::ExprKind::VAR: {
      auto it = b.find(e.name);
      if (it == b.end()) {
        throw UnboundVariable("variable " + e.name + " has no binding");
      }
      for (TimeValue t : it->second) {
        if (t.finite()) v = std::max(v, t.ticks());
      }
      break;
    }
    case lang::ExprKind::CONST:
      v = e.value.finite() ? e.value.ticks() : 0;
      break;
    case lang::ExprKind::ADD:
    case lang::ExprKind::MAX:
      v = std::max(expr_bound(*e.left, b, global),
                   expr_bound(*e.right, b, global));
      break;
    case lang::ExprKind::MUL:
      v = checked_sum(expr_bound(*e.left, b, global),
                      expr_bound(*e.right, b, global));
      break;
    case lang::ExprKind::INHIBIT:
      expr_bound(*e.left, b, global);
      v = expr_bound(*e.right, b, global);
      break;
  }
  global = std::max(global, v);
  return v;
}

unsigned bits_covering(std::uint64_t value, unsigned floor_bits) {
  unsigned bits = floor_bits;
  while (bits < 62 && ((std::uint64_t{1} << bits) - 1) < value) ++bits;
  if (((std::uint64_t{1} << bits) - 1) < value) {
    throw RangeViolation("required dynamic range exceeds 62 bits");
  }
  return bits;
}

// Truncated closure over plain integers: min over k in [0, hops] of A^k x.
std::vector<std::uint64_t> hop_reference(const alg::Graph& g, std::size_t s,
                                         std::size_t hops) {
  constexpr std::uint64_t kUnreach = std::numeric_limits<std::uint64_t>::max();
  const std::size_t n = g.nodes.size();
  std::vector<std::uint64_t> best(n, kUnreach);
  std::vector<std::uint64_t> frontier(n, kUnreach);
  best[s] = 0;
  frontier[s] = 0;
  for (std::size_t k = 0; k < hops; ++k) {
    std::vector<std::uint64_t> next(n, kUnreach);
    for (const auto& e : g.edges) {
      if (frontier[e.src] == kUnreach) continue;
      next[e.dst] = std::min(next[e.dst], frontier[e.src] + e.weight);
    }
    for (std::size_t i = 0; i < n; ++i) best[i] = std::min(best[i], next[i]);
    frontier = std::move(next);
  }
  return best;
}

bool matches_reference(const Wavefront& y,
                       const std::vector<std::uint64_t>& ref) {
  constexpr std::uint64_t kUnreach = std::numeric_limits<std::uint64_t>::max();
  if (y.size() != ref.size()) return false;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i].is_inf() != (ref[i] == kUnreach)) return false;
    if (y[i].finite() && y[i].ticks() != ref[i]) return false;
  }
  return true;
}

int report_error(std::ostream& err, const std::exception& ex) {
  err << "error: " << ex.what() << "\n";
  return 1;
}

}  // namespace

alg::Graph parse_graph_text(const std::string& text) {
  alg::Graph g;
  std::map<std::string, std::size_t> index;
  std::set<std::pair<std::size_t, std::size_t>> seen;

  auto node_id = [&](const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    const std::size_t id = g.nodes.size();
    g.nodes.push_back(name);
    index.emplace(name, id);
    return id;
  };

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream tokens(line);
    std::vector<std::string> tok;
    std::string t;
    while (tokens >> t) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 3) {
      throw ParseError("line " + std::to_string(line_no) + ": expected `src dst weight`, got " +
                           std::to_string(tok.size()) + " tokens",
                       line_no);
    }
    const std::uint64_t w = parse_weight(tok[2], line_no);
    const std::size_t src = node_id(tok[0]);
    const std::size_t dst = node_id(tok[1]);
    if (src == dst) continue;
    if (!seen.emplace(src, dst).second) {
      throw ParseError("line " + std::to_string(line_no) + ": duplicate edge " +
                           tok[0] + " -> " + tok[1],
                       line_no);
    }
    g.edges.push_back({src, dst, w});
  }
  return g;
}

alg::Graph parse_graph_file(const std::string& path) {
  return parse_graph_text(slurp(path));
}

lang::Bindings parse_bindings_text(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error("bindings must be a JSON object of tick arrays");
  }
  lang::Bindings b;
  for (const auto& [name, value] : doc.items()) {
    if (!value.is_array()) {
      throw Error("binding " + name + " must be an array");
    }
    Wavefront w;
    w.reserve(value.size());
    for (const auto& el : value) {
      w.push_back(time_from_json(el, "binding " + name));
    }
    b.emplace(name, std::move(w));
  }
  return b;
}

lang::Bindings parse_bindings_file(const std::string& path) {
  return parse_bindings_text(slurp(path));
}

int run_dijkstra(const DijkstraCommand& cmd, std::ostream& out,
                 std::ostream& err) {
  try {
    const alg::Graph g = parse_graph_file(cmd.graph_path);
    alg::DijkstraOptions opt;
    opt.literal_f = cmd.literal_f;
    opt.bits = cmd.bits;
    opt.costs = load_costs(cmd.cost_model_path);
    const alg::DijkstraResult res = alg::temporal_dijkstra(g, cmd.source, opt);

    const alg::ClassicalDijkstra oracle = alg::classical_dijkstra(g, cmd.source);
    const bool distances_match = res.distances == oracle.distances;
    const alg::TreeCheck tree = alg::validate_tree(
        g, g.index_of(cmd.source), res.parent_matrix, oracle.distances);
    const bool ok = distances_match && tree.ok;

    const CostReport costs =
        cost_report(res.trace, kernel_edges(res.trace, res.machine.width));

    std::vector<std::string> warnings;
    if (cmd.literal_f) {
      warnings.push_back(
          "unamended exploration mask; the parent matrix may record non-tree "
          "edges");
    }
    if (const std::size_t ov = total_overflow_events(res.trace); ov > 0) {
      warnings.push_back(std::to_string(ov) + " value(s) saturated to inf");
    }
    if (!distances_match) warnings.push_back("distances diverge from oracle");
    if (!tree.ok) warnings.push_back("parent matrix: " + tree.detail);

    json distances = json::object();
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      distances[g.nodes[i]] = time_to_json(res.distances[i]);
    }
    json tree_edges = json::array();
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const TimeValue w = res.parent_matrix.at(j, i);
        if (w.finite()) {
          tree_edges.push_back(json{{"from", g.nodes[i]},
                                    {"to", g.nodes[j]},
                                    {"weight", w.ticks()}});
        }
      }
    }
    json visit = json::array();
    for (std::size_t v : res.visit_order) visit.push_back(g.nodes[v]);
    json constants = json::array();
    for (TimeValue c : res.norm_constants) constants.push_back(time_to_json(c));

    json report = json{
        {"command", "dijkstra"},
        {"inputs",
         {{"graph", cmd.graph_path},
          {"source", cmd.source},
          {"bits", cmd.bits},
          {"cost_model",
           cmd.cost_model_path.empty() ? json(nullptr)
                                       : json(cmd.cost_model_path)},
          {"literal_f", cmd.literal_f}}},
        {"machine", machine_to_json(res.machine)},
        {"results",
         {{"nodes", g.nodes},
          {"distances", distances},
          {"visit_order", visit},
          {"norm_constants", constants},
          {"tree_edges", tree_edges}}},
        {"oracle_match", ok},
        {"costs", costs_to_json(costs)},
        {"warnings", warnings}};
    if (!cmd.out_path.empty()) write_report(cmd.out_path, report);

    out << "graph " << cmd.graph_path << ": " << g.nodes.size() << " nodes, "
        << g.edges.size() << " edges\n";
    out << "source " << cmd.source << ", bits " << cmd.bits << " (t_max "
        << res.machine.range.t_max().str() << "), "
        << (cmd.literal_f ? "unamended" : "amended") << " mask\n\n";
    out << std::left << std::setw(12) << "node" << std::setw(12) << "distance"
        << "parent\n";
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      std::string parent = "-";
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (res.parent_matrix.at(j, i).finite()) parent = g.nodes[i];
      }
      out << std::left << std::setw(12) << g.nodes[j] << std::setw(12)
          << res.distances[j].str() << parent << "\n";
    }
    out << "\nvisit order:";
    for (std::size_t v : res.visit_order) out << " " << g.nodes[v];
    out << "\noracle match: " << (ok ? "yes" : "NO") << "\n";
    print_costs(out, costs);
    print_warnings(out, warnings);
    return ok ? 0 : 1;
  } catch (const std::exception& ex) {
    return report_error(err, ex);
  }
}

int run_nw(const NwCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    alg::AlignmentProblem p;
    p.x = cmd.x;
    p.y = cmd.y;
    p.sigma = cmd.indel;
    p.m = cmd.mismatch;
    const alg::NwResult res = alg::temporal_nw(p, load_costs(cmd.cost_model_path));
    const std::uint64_t oracle = alg::classical_nw(p);
    const bool ok = res.cost.finite() && res.cost.ticks() == oracle;

    const CostReport costs =
        cost_report(res.trace, kernel_edges(res.trace, res.machine.width));
    std::vector<std::string> warnings;
    if (const std::size_t ov = total_overflow_events(res.trace); ov > 0) {
      warnings.push_back(std::to_string(ov) + " value(s) saturated to inf");
    }
    if (!ok) warnings.push_back("alignment cost diverges from oracle");

    json report = json{{"command", "nw"},
                       {"inputs",
                        {{"x", cmd.x},
                         {"y", cmd.y},
                         {"indel", cmd.indel},
                         {"mismatch", cmd.mismatch},
                         {"cost_model",
                          cmd.cost_model_path.empty()
                              ? json(nullptr)
                              : json(cmd.cost_model_path)}}},
                       {"machine", machine_to_json(res.machine)},
                       {"results",
                        {{"cost", time_to_json(res.cost)},
                         {"oracle_cost", oracle}}},
                       {"oracle_match", ok},
                       {"costs", costs_to_json(costs)},
                       {"warnings", warnings}};
    if (!cmd.out_path.empty()) write_report(cmd.out_path, report);

    out << "x " << cmd.x << "\ny " << cmd.y << "\nindel " << cmd.indel
        << ", mismatch " << cmd.mismatch << "\n";
    out << "alignment cost: " << res.cost.str() << " (oracle " << oracle
        << ")\n";
    out << "oracle match: " << (ok ? "yes" : "NO") << "\n";
    print_costs(out, costs);
    print_warnings(out, warnings);
    return ok ? 0 : 1;
  } catch (const std::exception& ex) {
    return report_error(err, ex);
  }
}

int run_closure(const ClosureCommand& cmd, std::ostream& out,
                std::ostream& err) {
  try {
    const alg::Graph g = parse_graph_file(cmd.graph_path);
    const std::size_t s = g.index_of(cmd.source);
    alg::ClosureOptions opt;
    opt.bits = cmd.bits;
    opt.costs = load_costs(cmd.cost_model_path);
    const alg::ClosureResult res = alg::closure(
        adjacency_matrix(g), make_onehot(g.nodes.size(), s), cmd.hops, opt);

    const bool ok = matches_reference(res.y, hop_reference(g, s, cmd.hops));
    const CostReport costs =
        cost_report(res.trace, kernel_edges(res.trace, res.machine.width));
    std::vector<std::string> warnings;
    if (const std::size_t ov = total_overflow_events(res.trace); ov > 0) {
      warnings.push_back(std::to_string(ov) + " value(s) saturated to inf");
    }
    if (!ok) warnings.push_back("wavefront diverges from oracle");

    json wavefront = json::object();
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      wavefront[g.nodes[i]] = time_to_json(res.y[i]);
    }
    json report = json{{"command", "closure"},
                       {"inputs",
                        {{"graph", cmd.graph_path},
                         {"source", cmd.source},
                         {"hops", cmd.hops},
                         {"bits", cmd.bits}}},
                       {"machine", machine_to_json(res.machine)},
                       {"results",
                        {{"nodes", g.nodes}, {"wavefront", wavefront}}},
                       {"oracle_match", ok},
                       {"costs", costs_to_json(costs)},
                       {"warnings", warnings}};
    if (!cmd.out_path.empty()) write_report(cmd.out_path, report);

    out << "graph " << cmd.graph_path << ": " << g.nodes.size() << " nodes, "
        << g.edges.size() << " edges\n";
    out << "source " << cmd.source << ", hops " << cmd.hops << ", bits "
        << res.machine.range.bits << "\n\n";
    out << std::left << std::setw(12) << "node" << "arrival\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      out << std::left << std::setw(12) << g.nodes[i] << res.y[i].str()
          << "\n";
    }
    out << "\noracle match: " << (ok ? "yes" : "NO") << "\n";
    print_costs(out, costs);
    print_warnings(out, warnings);
    return ok ? 0 : 1;
  } catch (const std::exception& ex) {
    return report_error(err, ex);
  }
}

int run_eval(const EvalCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    const lang::ExprPtr expr = lang::parse(cmd.expr);
    const lang::Bindings binds =
        cmd.bind_path.empty() ? lang::Bindings{} : parse_bindings_file(cmd.bind_path);
    const lang::CompiledProgram prog = lang::compile(*expr);

    std::size_t width = 1;
    if (!binds.empty()) {
      width = binds.begin()->second.size();
      for (const auto& [name, w] : binds) {
        if (w.size() != width) {
          throw DimensionMismatch("binding " + name + " has length " +
                                  std::to_string(w.size()) + ", expected " +
                                  std::to_string(width));
        }
      }
    }
    if (width == 0) {
      throw DimensionMismatch("bindings must not be empty vectors");
    }

    std::uint64_t bound = 0;
    expr_bound(*expr, binds, bound);

    MachineConfig mc;
    mc.width = width;
    mc.register_count = std::max<std::size_t>(prog.registers_needed, 1);
    mc.bank_count = 0;
    mc.range.bits = bits_covering(bound, 5);
    Machine machine(mc);

    for (const auto& [reg, value] : prog.const_preloads) {
      machine.host_write(reg, make_filled(width, value));
    }
    for (const auto& [var, reg] : prog.var_registers) {
      machine.host_write(reg, binds.at(var));
    }
    std::vector<TraceEntry> trace;
    trace.reserve(prog.instructions.size());
    for (const auto& instr : prog.instructions) {
      trace.push_back(machine.execute(instr));
    }
    const Wavefront y = machine.host_read(prog.result_register);
    const Wavefront ref = lang::direct_eval(*expr, binds);
    const bool ok = y == ref;

    const CostReport costs = cost_report(trace, kernel_edges(trace, width));
    std::vector<std::string> warnings;
    if (!ok) warnings.push_back("wavefront diverges from direct evaluation");

    json report = json{{"command", "eval"},
                       {"inputs",
                        {{"expr", cmd.expr},
                         {"bind", cmd.bind_path.empty()
                                      ? json(nullptr)
                                      : json(cmd.bind_path)}}},
                       {"machine", machine_to_json(mc)},
                       {"results",
                        {{"canonical", lang::print(*expr)},
                         {"wavefront", wavefront_to_json(y)},
                         {"transitions", prog.transitions}}},
                       {"oracle_match", ok},
                       {"costs", costs_to_json(costs)},
                       {"warnings", warnings}};
    if (!cmd.out_path.empty()) write_report(cmd.out_path, report);

    out << "expression: " << lang::print(*expr) << "\n";
    out << "wavefront:";
    for (TimeValue t : y) out << " " << t.str();
    out << "\ntransitions: " << prog.transitions << "\n";
    out << "oracle match: " << (ok ? "yes" : "NO") << "\n";
    print_costs(out, costs);
    print_warnings(out, warnings);
    return ok ? 0 : 1;
  } catch (const std::exception& ex) {
    return report_error(err, ex);
  }
}

}  // namespace tsm::cli
