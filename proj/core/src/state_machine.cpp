#include "tsm/state_machine.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace tsm {

const char* opcode_name(Opcode op) {
  switch (op) {
    case Opcode::VMM: return "VMM";
    case Opcode::EW_MIN: return "EW_MIN";
    case Opcode::EW_MAX: return "EW_MAX";
    case Opcode::EW_INHIBIT: return "EW_INHIBIT";
    case Opcode::TROPMUL: return "TROPMUL";
    case Opcode::ARGMIN: return "ARGMIN";
    case Opcode::BINARIZE: return "BINARIZE";
    case Opcode::COINCIDENCE: return "COINCIDENCE";
    case Opcode::MIN_REDUCE: return "MIN_REDUCE";
    case Opcode::MAX_REDUCE: return "MAX_REDUCE";
    case Opcode::SCALE: return "SCALE";
    case Opcode::WRITE_COLUMN: return "WRITE_COLUMN";
    case Opcode::INHIBIT_ROWS: return "INHIBIT_ROWS";
    case Opcode::PROGRAM_MATRIX: return "PROGRAM_MATRIX";
    case Opcode::MOVE: return "MOVE";
  }
  return "UNKNOWN";
}

namespace isa {

static Instruction binary_op(Opcode op, std::string u, std::string v,
                             std::string dst, WriteMode mode) {
  Instruction i;
  i.opcode = op;
  i.sources = {std::move(u), std::move(v)};
  i.destination = std::move(dst);
  i.write_mode = mode;
  return i;
}

static Instruction unary_op(Opcode op, std::string x, std::string dst,
                            WriteMode mode) {
  Instruction i;
  i.opcode = op;
  i.sources = {std::move(x)};
  i.destination = std::move(dst);
  i.write_mode = mode;
  return i;
}

Instruction vmm(std::string bank, std::string x, std::string dst,
                WriteMode mode) {
  return binary_op(Opcode::VMM, std::move(bank), std::move(x), std::move(dst),
                   mode);
}
Instruction ew_min(std::string u, std::string v, std::string dst,
                   WriteMode mode) {
  return binary_op(Opcode::EW_MIN, std::move(u), std::move(v), std::move(dst),
                   mode);
}
Instruction ew_max(std::string u, std::string v, std::string dst,
                   WriteMode mode) {
  return binary_op(Opcode::EW_MAX, std::move(u), std::move(v), std::move(dst),
                   mode);
}
Instruction ew_inhibit(std::string inhibitor, std::string data, std::string dst,
                       WriteMode mode) {
  return binary_op(Opcode::EW_INHIBIT, std::move(inhibitor), std::move(data),
                   std::move(dst), mode);
}
Instruction tropmul(std::string u, std::string v, std::string dst,
                    WriteMode mode) {
  return binary_op(Opcode::TROPMUL, std::move(u), std::move(v), std::move(dst),
                   mode);
}
Instruction argmin(std::string x, std::string dst, WriteMode mode) {
  return unary_op(Opcode::ARGMIN, std::move(x), std::move(dst), mode);
}
Instruction binarize(std::string x, std::string dst, WriteMode mode,
                     std::optional<TimeValue> t_max) {
  Instruction i = unary_op(Opcode::BINARIZE, std::move(x), std::move(dst), mode);
  i.immediate = t_max;
  return i;
}
Instruction coincidence(std::string u, std::string v, std::string dst,
                        TimeValue epsilon, WriteMode mode) {
  Instruction i = binary_op(Opcode::COINCIDENCE, std::move(u), std::move(v),
                            std::move(dst), mode);
  i.immediate = epsilon;
  return i;
}
Instruction min_reduce(std::string x, std::string dst) {
  return unary_op(Opcode::MIN_REDUCE, std::move(x), std::move(dst),
                  WriteMode::DIRECT);
}
Instruction max_reduce(std::string x, std::string dst) {
  return unary_op(Opcode::MAX_REDUCE, std::move(x), std::move(dst),
                  WriteMode::DIRECT);
}
Instruction scale(TimeValue delay, std::string x, std::string dst,
                  WriteMode mode) {
  Instruction i = unary_op(Opcode::SCALE, std::move(x), std::move(dst), mode);
  i.immediate = delay;
  return i;
}
Instruction write_column(std::string onehot, std::string data,
                         std::string bank) {
  Instruction i;
  i.opcode = Opcode::WRITE_COLUMN;
  i.sources = {std::move(onehot), std::move(data)};
  i.destination = std::move(bank);
  return i;
}
Instruction inhibit_rows(std::string mask, std::string bank) {
  Instruction i;
  i.opcode = Opcode::INHIBIT_ROWS;
  i.sources = {std::move(mask)};
  i.destination = std::move(bank);
  return i;
}
Instruction program_matrix(TropicalMatrix a, std::string bank) {
  Instruction i;
  i.opcode = Opcode::PROGRAM_MATRIX;
  i.destination = std::move(bank);
  i.matrix = std::make_shared<const TropicalMatrix>(std::move(a));
  return i;
}
Instruction move(std::string src, std::string dst, WriteMode mode) {
  return unary_op(Opcode::MOVE, std::move(src), std::move(dst), mode);
}

}  // namespace isa

Machine::Machine(MachineConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.width == 0) throw Error("machine width must be at least 1");
  if (cfg_.register_count == 0) throw Error("machine needs at least 1 register");
  if (cfg_.range.bits == 0 || cfg_.range.bits > 62) {
    throw Error("range bits must be in [1, 62]");
  }
  regs_.reserve(cfg_.register_count);
  for (std::size_t i = 0; i < cfg_.register_count; ++i) {
    regs_.emplace_back(register_name(i), cfg_.width);
    reg_index_[register_name(i)] = i;
  }
  banks_.reserve(cfg_.bank_count);
  for (std::size_t i = 0; i < cfg_.bank_count; ++i) {
    banks_.emplace_back(bank_name(i), cfg_.width);
    bank_index_[bank_name(i)] = i;
  }
}

VectorRegister& Machine::reg(const std::string& name) {
  auto it = reg_index_.find(name);
  if (it == reg_index_.end()) throw Error("unknown register " + name);
  return regs_[it->second];
}
const VectorRegister& Machine::reg(const std::string& name) const {
  auto it = reg_index_.find(name);
  if (it == reg_index_.end()) throw Error("unknown register " + name);
  return regs_[it->second];
}
MatrixBank& Machine::bank(const std::string& name) {
  auto it = bank_index_.find(name);
  if (it == bank_index_.end()) throw Error("unknown matrix bank " + name);
  return banks_[it->second];
}
const MatrixBank& Machine::bank(const std::string& name) const {
  auto it = bank_index_.find(name);
  if (it == bank_index_.end()) throw Error("unknown matrix bank " + name);
  return banks_[it->second];
}
bool Machine::is_bank(const std::string& name) const {
  return bank_index_.count(name) != 0;
}

const Wavefront& Machine::source_vector(const Instruction& instr,
                                        std::size_t i) {
  if (i >= instr.sources.size()) {
    throw Error(std::string(opcode_name(instr.opcode)) +
                " is missing a source operand");
  }
  return reg(instr.sources[i]).read();
}

void Machine::write_result(const Instruction& instr, Wavefront value,
                           TraceEntry& e) {
  VectorRegister& dst = reg(instr.destination);
  if (instr.write_mode == WriteMode::PROJECTIVE) {
    auto pw = dst.write_projective(value, cfg_.range);
    e.norm_constant_emitted = pw.constant;
    e.overflow_events += pw.overflow_events;
  } else {
    e.overflow_events += dst.write_direct(value, cfg_.range);
  }
  e.lines_written = cfg_.width;
}

void Machine::finalize_costs(TraceEntry& e) const {
  const CostTable& c = cfg_.costs;
  e.energy_pJ = static_cast<double>(e.lines_read) * c.read_pJ_per_line +
                static_cast<double>(e.lines_written) * c.write_pJ_per_line +
                static_cast<double>(e.vmm_cells) * (c.vmm_fJ_per_cell / 1000.0) +
                static_cast<double>(e.ew_channels) *
                    (c.ew_pJ_per_32_channels / 32.0) +
                static_cast<double>(e.program_cells) *
                    c.matrix_program_pJ_per_cell;
  if (e.instruction.opcode == Opcode::VMM) {
    e.latency_ns = c.vmm_latency_ns_per_cell *
                   static_cast<double>(cfg_.width) *
                   static_cast<double>(cfg_.width);
  } else {
    e.latency_ns =
        c.other_op_latency_ns * static_cast<double>(e.transitions_consumed);
  }
}

TraceEntry Machine::execute(const Instruction& instr) {
  TraceEntry e;
  e.instruction = instr;
  const std::size_t n = cfg_.width;

  for (const auto& s : instr.sources) {
    if (s == instr.destination) {
      throw HazardViolation(std::string(opcode_name(instr.opcode)) +
                            " names " + s + " as both source and destination");
    }
  }

  auto expect_sources = [&](std::size_t count) {
    if (instr.sources.size() != count) {
      throw Error(std::string(opcode_name(instr.opcode)) + " takes " +
                  std::to_string(count) + " source operand(s)");
    }
  };

  switch (instr.opcode) {
    case Opcode::VMM: {
      expect_sources(2);
      const MatrixBank& a = bank(instr.sources[0]);
      const Wavefront& x = reg(instr.sources[1]).read();
      write_result(instr, vmm(a.entries(), x), e);
      e.lines_read = n;
      e.vmm_cells = n * n;
      e.transitions_consumed = 1;
      break;
    }
    case Opcode::EW_MIN:
    case Opcode::EW_MAX:
    case Opcode::EW_INHIBIT: {
      expect_sources(2);
      const Wavefront& u = source_vector(instr, 0);
      const Wavefront& v = source_vector(instr, 1);
      EwOp op = instr.opcode == Opcode::EW_MIN   ? EwOp::MIN
                : instr.opcode == Opcode::EW_MAX ? EwOp::MAX
                                                 : EwOp::INHIBIT;
      write_result(instr, ew(op, u, v), e);
      e.lines_read = 2 * n;
      e.ew_channels = n;
      e.transitions_consumed = 1;
      break;
    }
    case Opcode::COINCIDENCE: {
      expect_sources(2);
      if (!instr.immediate) {
        throw Error("COINCIDENCE requires a window immediate");
      }
      if (instr.immediate->is_inf()) {
        throw Error("coincidence window must be finite");
      }
      const Wavefront& u = source_vector(instr, 0);
      const Wavefront& v = source_vector(instr, 1);
      if (u.size() != v.size()) {
        throw DimensionMismatch("coincidence operands differ in length");
      }
      Wavefront out(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) {
        out[i] = coincidence(u[i], v[i], instr.immediate->ticks());
      }
      write_result(instr, std::move(out), e);
      e.lines_read = 2 * n;
      e.ew_channels = n;
      e.transitions_consumed = 1;
      break;
    }
    case Opcode::TROPMUL: {
      expect_sources(2);
      const Wavefront& u = source_vector(instr, 0);
      const Wavefront& v = source_vector(instr, 1);
      write_result(instr, ew_mul(u, v), e);
      // Store phase writes the delay bank, playback phase writes the result.
      e.lines_read = 2 * n;
      e.lines_written = 2 * n;
      e.transitions_consumed = 2;
      break;
    }
    case Opcode::ARGMIN: {
      expect_sources(1);
      write_result(instr, argmin_onehot(source_vector(instr, 0)), e);
      e.lines_read = n;
      e.ew_channels = n;
      e.transitions_consumed = 1;
      break;
    }
    case Opcode::BINARIZE: {
      expect_sources(1);
      TimeValue threshold = instr.immediate.value_or(cfg_.range.t_max());
      write_result(instr, binarize(source_vector(instr, 0), threshold), e);
      e.lines_read = n;
      e.ew_channels = n;
      e.transitions_consumed = 1;
      break;
    }
    case Opcode::SCALE: {
      expect_sources(1);
      if (!instr.immediate) {
        throw Error("SCALE requires a delay immediate");
      }
      write_result(instr, scale(*instr.immediate, source_vector(instr, 0)), e);
      e.lines_read = n;
      e.ew_channels = n;
      e.transitions_consumed = 1;
      break;
    }
    case Opcode::MIN_REDUCE:
    case Opcode::MAX_REDUCE: {
      expect_sources(1);
      const Wavefront& x = source_vector(instr, 0);
      TimeValue v = instr.opcode == Opcode::MIN_REDUCE ? min_reduce(x)
                                                       : max_reduce(x);
      // Scalar results occupy line 0; the remaining lines stay infinite.
      Wavefront out(n, kInf);
      out[0] = v;
      write_result(instr, std::move(out), e);
      e.lines_read = n;
      e.lines_written = 1;
      e.ew_channels = n;
      e.transitions_consumed = 1;
      break;
    }
    case Opcode::WRITE_COLUMN: {
      expect_sources(2);
      const Wavefront& onehot = source_vector(instr, 0);
      const Wavefront& data = source_vector(instr, 1);
      e.overflow_events +=
          bank(instr.destination).write_column(onehot, data, cfg_.range);
      e.lines_read = 2 * n;
      e.lines_written = n;
      e.transitions_consumed = 1;
      break;
    }
    case Opcode::INHIBIT_ROWS: {
      expect_sources(1);
      const Wavefront& mask = source_vector(instr, 0);
      bank(instr.destination).inhibit_rows(mask);
      // Each of the n row transitions rewrites one full width-n row.
      e.lines_read = n;
      e.lines_written = n * n;
      e.ew_channels = n * n;
      e.transitions_consumed = n;
      break;
    }
    case Opcode::PROGRAM_MATRIX: {
      expect_sources(0);
      if (!instr.matrix) {
        throw Error("PROGRAM_MATRIX requires a matrix payload");
      }
      e.overflow_events +=
          bank(instr.destination).program(*instr.matrix, cfg_.range);
      e.program_cells = n * n;
      e.transitions_consumed = 1;
      break;
    }
    case Opcode::MOVE: {
      expect_sources(1);
      write_result(instr, source_vector(instr, 0), e);
      e.lines_read = n;
      e.transitions_consumed = 1;
      break;
    }
  }

  finalize_costs(e);
  return e;
}

RunOutcome Machine::run(const std::vector<Instruction>& program) {
  RunOutcome out;
  for (std::size_t i = 0; i < program.size(); ++i) {
    try {
      out.trace.push_back(execute(program[i]));
    } catch (const std::exception& ex) {
      out.ok = false;
      out.error = ex.what();
      out.failed_index = i;
      break;
    }
  }
  return out;
}

void Machine::host_write(const std::string& name, const Wavefront& w,
                         WriteMode mode) {
  if (mode == WriteMode::PROJECTIVE) {
    reg(name).write_projective(w, cfg_.range);
  } else {
    reg(name).write_direct(w, cfg_.range);
  }
}

const Wavefront& Machine::host_read(const std::string& name) const {
  return reg(name).read();
}

TimeValue Machine::norm_constant(const std::string& name) const {
  return reg(name).norm_constant();
}

void Machine::host_program(const std::string& name, const TropicalMatrix& a) {
  bank(name).program(a, cfg_.range);
}

const TropicalMatrix& Machine::bank_entries(const std::string& name) const {
  return bank(name).entries();
}

bool Machine::halt_test(const std::string& name) const {
  return min_reduce(reg(name).read()).finite();
}

CostReport cost_report(const std::vector<TraceEntry>& trace,
                       std::size_t edges_traversed) {
  CostReport r;
  r.edges_traversed = edges_traversed;
  for (const auto& e : trace) {
    r.energy_pJ += e.energy_pJ;
    r.latency_ns += e.latency_ns;
    r.transitions += e.transitions_consumed;
    OpcodeCost& oc = r.per_opcode[e.instruction.opcode];
    oc.count += 1;
    oc.transitions += e.transitions_consumed;
    oc.energy_pJ += e.energy_pJ;
    oc.latency_ns += e.latency_ns;
  }
  if (edges_traversed > 0 && r.latency_ns > 0.0) {
    r.gets = static_cast<double>(edges_traversed) / r.latency_ns;
  }
  if (edges_traversed > 0 && r.energy_pJ > 0.0) {
    r.getj = static_cast<double>(edges_traversed) / (r.energy_pJ / 1000.0);
  }
  return r;
}

std::size_t kernel_edges(const std::vector<TraceEntry>& trace,
                         std::size_t width) {
  for (const auto& e : trace) {
    if (e.instruction.opcode == Opcode::VMM) return width * width;
  }
  return 0;
}

namespace {

using nlohmann::json;

json parse_object(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(what + " must be a JSON object");
  }
  return j;
}

double cost_field(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) throw Error(std::string("cost field ") + key + " must be a number");
  double d = v.get<double>();
  if (d < 0.0) throw Error(std::string("cost field ") + key + " must be >= 0");
  return d;
}

const char* const kCostKeys[] = {
    "read_pJ_per_line",     "write_pJ_per_line",
    "vmm_fJ_per_cell",      "ew_pJ_per_32_channels",
    "vmm_latency_ns_per_cell", "other_op_latency_ns",
    "matrix_program_pJ_per_cell"};

bool is_cost_key(const std::string& key) {
  for (const char* k : kCostKeys) {
    if (key == k) return true;
  }
  return false;
}

CostTable cost_table_from_json(const json& j) {
  CostTable t;
  t.read_pJ_per_line = cost_field(j, "read_pJ_per_line", t.read_pJ_per_line);
  t.write_pJ_per_line = cost_field(j, "write_pJ_per_line", t.write_pJ_per_line);
  t.vmm_fJ_per_cell = cost_field(j, "vmm_fJ_per_cell", t.vmm_fJ_per_cell);
  t.ew_pJ_per_32_channels =
      cost_field(j, "ew_pJ_per_32_channels", t.ew_pJ_per_32_channels);
  t.vmm_latency_ns_per_cell =
      cost_field(j, "vmm_latency_ns_per_cell", t.vmm_latency_ns_per_cell);
  t.other_op_latency_ns =
      cost_field(j, "other_op_latency_ns", t.other_op_latency_ns);
  t.matrix_program_pJ_per_cell =
      cost_field(j, "matrix_program_pJ_per_cell", t.matrix_program_pJ_per_cell);
  return t;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

CostTable CostTable::from_json_text(const std::string& text) {
  json j = parse_object(text, "cost table");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!is_cost_key(it.key())) {
      throw Error("unknown cost table key " + it.key());
    }
  }
  return cost_table_from_json(j);
}

CostTable CostTable::from_json_file(const std::string& path) {
  return from_json_text(read_file(path));
}

MachineConfig MachineConfig::from_json_text(const std::string& text) {
  json j = parse_object(text, "machine config");
  MachineConfig cfg;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "width") {
      cfg.width = it.value().get<std::size_t>();
    } else if (key == "register_count") {
      cfg.register_count = it.value().get<std::size_t>();
    } else if (key == "bank_count") {
      cfg.bank_count = it.value().get<std::size_t>();
    } else if (key == "bits") {
      cfg.range.bits = it.value().get<unsigned>();
    } else if (key == "overflow_policy") {
      std::string p = it.value().get<std::string>();
      if (p == "STRICT") {
        cfg.range.policy = OverflowPolicy::STRICT;
      } else if (p == "SATURATE_TO_INFINITY") {
        cfg.range.policy = OverflowPolicy::SATURATE_TO_INFINITY;
      } else {
        throw Error("overflow_policy must be STRICT or SATURATE_TO_INFINITY");
      }
    } else if (is_cost_key(key)) {
      // handled below
    } else {
      throw Error("unknown machine config key " + key);
    }
  }
  cfg.costs = cost_table_from_json(j);
  return cfg;
}

MachineConfig MachineConfig::from_json_file(const std::string& path) {
  return from_json_text(read_file(path));
}

}  // namespace tsm
