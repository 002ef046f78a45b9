#pragma once

// A minimal tropical expression language and its compiler to instruction
// sequences, with a direct evaluator as oracle.
//
// Grammar (all binary operators left-associative):
//   expr    := addmax ( "-|" addmax )*          lowest precedence
//   addmax  := term ( ("+" | "^") term )*
//   term    := factor ( "*" factor )*           highest precedence
//   factor  := IDENT | INT | "inf" | "(" expr ")"
// Operators: "+" is min, "^" is max, "*" is tropical multiplication (delay),
// "-|" inhibits its right operand by its left. Identifiers match
// [a-z][a-z0-9_]*; "inf" is reserved.

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsm/state_machine.hpp"
#include "tsm/tropical_core.hpp"

namespace tsm::lang {

enum class ExprKind { VAR, CONST, ADD, MAX, MUL, INHIBIT };

// Immutable expression tree. For INHIBIT the left child is the inhibitor.
struct Expr {
  ExprKind kind{};
  std::string name;          // VAR
  TimeValue value{0};        // CONST
  std::shared_ptr<const Expr> left;
  std::shared_ptr<const Expr> right;
};

using ExprPtr = std::shared_ptr<const Expr>;

ExprPtr parse(std::string_view src);

// Fully parenthesized canonical form; parse(print(e)) is structurally
// identical to e.
std::string print(const Expr& e);

bool expr_equal(const Expr& a, const Expr& b);

// All wavefronts must share one width.
using Bindings = std::map<std::string, Wavefront>;

struct CompiledProgram {
  std::vector<Instruction> instructions;
  // Broadcast constants the host loads before running.
  std::vector<std::pair<std::string, TimeValue>> const_preloads;
  // Variable name -> register the host loads it into.
  std::map<std::string, std::string> var_registers;
  std::string result_register;
  std::size_t registers_needed = 0;
  std::size_t transitions = 0;
};

// Post-order emission into fresh temporaries. Constant subtrees fold at
// compile time; a constant multiplied into a vector becomes SCALE; a constant
// joined elementwise with a vector goes through a broadcast preload register.
CompiledProgram compile(const Expr& e);

// parse + compile + load + run + read back. The machine is sized to the
// bindings' width and the compiled register demand; cfg supplies range and
// cost parameters.
Wavefront evaluate(std::string_view src, const Bindings& b,
                   const MachineConfig& cfg = MachineConfig{});

// Recursive evaluation over tropical_core only. Must agree with evaluate.
Wavefront direct_eval(const Expr& e, const Bindings& b);

}  // namespace tsm::lang
