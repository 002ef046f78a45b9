#pragma once

// Front end shared by the command-line tool and the end-to-end tests. Each
// run_* function drives one subcommand: ingest inputs, execute the kernel,
// compare against the oracle, print a table on `out`, and write a JSON report
// when requested. The return value is the process exit code, 0 iff the
// computation succeeded and the oracle matched.

#include <cstdint>
#include <iosfwd>
#include <string>

#include "tsm/algorithms.hpp"
#include "tsm/tropical_lang.hpp"

namespace tsm::cli {

// One edge per line, whitespace separated `src dst weight`. `#` starts a
// comment. Node names are arbitrary tokens ordered by first appearance.
// Weights are nonnegative integers. Duplicate (src, dst) pairs are rejected;
// self loops are dropped.
alg::Graph parse_graph_text(const std::string& text);
alg::Graph parse_graph_file(const std::string& path);

// JSON object mapping variable names to arrays of ticks, with infinity
// spelled "inf".
lang::Bindings parse_bindings_text(const std::string& text);
lang::Bindings parse_bindings_file(const std::string& path);

struct DijkstraCommand {
  std::string graph_path;
  std::string source;
  unsigned bits = 5;
  std::string cost_model_path;  // empty: built-in default costs
  bool literal_f = false;
  std::string out_path;  // empty: no JSON report file
};

struct NwCommand {
  std::string x;
  std::string y;
  std::uint64_t indel = 1;
  std::uint64_t mismatch = 1;
  std::string cost_model_path;
  std::string out_path;
};

struct ClosureCommand {
  std::string graph_path;
  std::string source;
  std::size_t hops = 0;
  unsigned bits = 0;  // 0: sized automatically
  std::string cost_model_path;
  std::string out_path;
};

struct EvalCommand {
  std::string expr;
  std::string bind_path;  // empty: constant expression, width 1
  std::string out_path;
};

int run_dijkstra(const DijkstraCommand& cmd, std::ostream& out,
                 std::ostream& err);
int run_nw(const NwCommand& cmd, std::ostream& out, std::ostream& err);
int run_closure(const ClosureCommand& cmd, std::ostream& out,
                std::ostream& err);
int run_eval(const EvalCommand& cmd, std::ostream& out, std::ostream& err);

}  // namespace tsm::cli
