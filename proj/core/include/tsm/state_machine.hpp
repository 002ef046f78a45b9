#pragma once

// The temporal state machine: a register file and matrix banks from
// wavefront_memory, an arithmetic unit of pure tropical operations, an
// instruction set executed one transition at a time, and per-transition
// energy/latency accounting.
//
// Control flow (loops, conditionals, slicing) lives in the host driver.
// Host loads and readouts are free; instructions pay per the cost table.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tsm/tropical_core.hpp"
#include "tsm/wavefront_memory.hpp"

namespace tsm {

enum class Opcode {
  VMM,
  EW_MIN,
  EW_MAX,
  EW_INHIBIT,
  TROPMUL,
  ARGMIN,
  BINARIZE,
  COINCIDENCE,
  MIN_REDUCE,
  MAX_REDUCE,
  SCALE,
  WRITE_COLUMN,
  INHIBIT_ROWS,
  PROGRAM_MATRIX,
  MOVE,
};

const char* opcode_name(Opcode op);

enum class WriteMode { DIRECT, PROJECTIVE };

// One state-machine operation. The destination must differ from every source;
// playback and capture of the same storage cannot overlap.
struct Instruction {
  Opcode opcode{};
  // Register or bank names. Conventions:
  //   VMM:           { bank, input register }
  //   EW_*, TROPMUL, COINCIDENCE: { left/inhibitor register, right register }
  //   WRITE_COLUMN:  { one-hot selector register, data register }
  //   INHIBIT_ROWS:  { mask register }
  //   one-operand ops: { input register }
  //   PROGRAM_MATRIX: {} (payload carried in `matrix`)
  std::vector<std::string> sources;
  std::string destination;
  WriteMode write_mode = WriteMode::DIRECT;
  // SCALE delay constant, BINARIZE threshold (defaults to the machine t_max),
  // COINCIDENCE window.
  std::optional<TimeValue> immediate;
  std::shared_ptr<const TropicalMatrix> matrix;
};

// Builders for readable program construction.
namespace isa {
Instruction vmm(std::string bank, std::string x, std::string dst,
                WriteMode mode = WriteMode::DIRECT);
Instruction ew_min(std::string u, std::string v, std::string dst,
                   WriteMode mode = WriteMode::DIRECT);
Instruction ew_max(std::string u, std::string v, std::string dst,
                   WriteMode mode = WriteMode::DIRECT);
Instruction ew_inhibit(std::string inhibitor, std::string data, std::string dst,
                       WriteMode mode = WriteMode::DIRECT);
Instruction tropmul(std::string u, std::string v, std::string dst,
                    WriteMode mode = WriteMode::DIRECT);
Instruction argmin(std::string x, std::string dst,
                   WriteMode mode = WriteMode::DIRECT);
Instruction binarize(std::string x, std::string dst,
                     WriteMode mode = WriteMode::DIRECT,
                     std::optional<TimeValue> t_max = std::nullopt);
Instruction coincidence(std::string u, std::string v, std::string dst,
                        TimeValue epsilon,
                        WriteMode mode = WriteMode::DIRECT);
Instruction min_reduce(std::string x, std::string dst);
Instruction max_reduce(std::string x, std::string dst);
Instruction scale(TimeValue delay, std::string x, std::string dst,
                  WriteMode mode = WriteMode::DIRECT);
Instruction write_column(std::string onehot, std::string data, std::string bank);
Instruction inhibit_rows(std::string mask, std::string bank);
Instruction program_matrix(TropicalMatrix a, std::string bank);
Instruction move(std::string src, std::string dst,
                 WriteMode mode = WriteMode::DIRECT);
}  // namespace isa

// Log of one executed instruction. energy_pJ equals the sum of the
// per-category products with the cost table.
struct TraceEntry {
  Instruction instruction;
  std::size_t transitions_consumed = 0;
  std::size_t lines_read = 0;
  std::size_t lines_written = 0;
  std::size_t vmm_cells = 0;
  std::size_t ew_channels = 0;
  std::size_t program_cells = 0;
  double energy_pJ = 0.0;
  double latency_ns = 0.0;
  TimeValue norm_constant_emitted{0};
  std::size_t overflow_events = 0;
};

// Per-primitive energy and latency constants. All entries must be >= 0.
// JSON keys match the field names exactly.
struct CostTable {
  double read_pJ_per_line = 2.0;
  double write_pJ_per_line = 10.0;
  double vmm_fJ_per_cell = 700.0;
  double ew_pJ_per_32_channels = 1.0;
  // A VMM transition on an n-wide machine takes n^2 * this.
  double vmm_latency_ns_per_cell = 0.1;
  double other_op_latency_ns = 10.0;
  double matrix_program_pJ_per_cell = 10.0;

  static CostTable from_json_text(const std::string& text);
  static CostTable from_json_file(const std::string& path);
};

struct MachineConfig {
  std::size_t width = 32;
  std::size_t register_count = 8;
  std::size_t bank_count = 2;
  RangeConfig range{};
  CostTable costs{};

  static MachineConfig from_json_text(const std::string& text);
  static MachineConfig from_json_file(const std::string& path);
};

struct OpcodeCost {
  std::size_t count = 0;
  std::size_t transitions = 0;
  double energy_pJ = 0.0;
  double latency_ns = 0.0;
};

// Aggregated totals over a trace. gets = edges / total latency in ns,
// getj = edges / total energy in nJ; both 0 when edges_traversed is 0.
struct CostReport {
  double energy_pJ = 0.0;
  double latency_ns = 0.0;
  std::size_t transitions = 0;
  std::size_t edges_traversed = 0;
  double gets = 0.0;
  double getj = 0.0;
  std::map<Opcode, OpcodeCost> per_opcode;
};

CostReport cost_report(const std::vector<TraceEntry>& trace,
                       std::size_t edges_traversed);

// Kernel-level edge count for GETS/GETJ: the crossbar evaluates all width^2
// cells, so a trace that performed any VMM traversed the whole graph once.
std::size_t kernel_edges(const std::vector<TraceEntry>& trace,
                         std::size_t width);

// Result of running a program: the trace is partial when ok is false, and
// failed_index names the instruction that raised error.
struct RunOutcome {
  std::vector<TraceEntry> trace;
  bool ok = true;
  std::string error;
  std::size_t failed_index = 0;
};

class Machine {
 public:
  explicit Machine(MachineConfig cfg);

  const MachineConfig& config() const { return cfg_; }

  // Registers are named r0..r{register_count-1}, banks m0..m{bank_count-1}.
  static std::string register_name(std::size_t i) { return "r" + std::to_string(i); }
  static std::string bank_name(std::size_t i) { return "m" + std::to_string(i); }

  // Executes one instruction and returns its trace entry. Throws typed errors
  // (HazardViolation, RangeViolation, DimensionMismatch, ...).
  TraceEntry execute(const Instruction& instr);

  // Executes sequentially, stopping at the first error with the partial trace.
  RunOutcome run(const std::vector<Instruction>& program);

  // Host-side access at zero modeled cost.
  void host_write(const std::string& reg, const Wavefront& w,
                  WriteMode mode = WriteMode::DIRECT);
  const Wavefront& host_read(const std::string& reg) const;
  TimeValue norm_constant(const std::string& reg) const;
  void host_program(const std::string& bank, const TropicalMatrix& a);
  const TropicalMatrix& bank_entries(const std::string& bank) const;

  // True iff the register holds any finite element.
  bool halt_test(const std::string& reg) const;

 private:
  VectorRegister& reg(const std::string& name);
  const VectorRegister& reg(const std::string& name) const;
  MatrixBank& bank(const std::string& name);
  const MatrixBank& bank(const std::string& name) const;
  bool is_bank(const std::string& name) const;

  const Wavefront& source_vector(const Instruction& instr, std::size_t i);
  void write_result(const Instruction& instr, Wavefront value, TraceEntry& e);
  void finalize_costs(TraceEntry& e) const;

  MachineConfig cfg_;
  std::vector<VectorRegister> regs_;
  std::vector<MatrixBank> banks_;
  std::unordered_map<std::string, std::size_t> reg_index_;
  std::unordered_map<std::string, std::size_t> bank_index_;
};

}  // namespace tsm
