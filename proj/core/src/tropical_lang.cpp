#include "tsm/tropical_lang.hpp"

#include <cctype>
#include <charconv>
#include <set>

namespace tsm::lang {

namespace {

enum class Tok { END, IDENT, INT, INF, PLUS, CARET, STAR, INHIB, LPAREN, RPAREN };

struct Token {
  Tok kind = Tok::END;
  std::string text;
  std::uint64_t value = 0;
  std::size_t position = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& current() const { return tok_; }

  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
    tok_ = Token{};
    tok_.position = pos_;
    if (pos_ >= src_.size()) {
      tok_.kind = Tok::END;
      return;
    }
    char c = src_[pos_];
    if (c == '(') { tok_.kind = Tok::LPAREN; ++pos_; return; }
    if (c == ')') { tok_.kind = Tok::RPAREN; ++pos_; return; }
    if (c == '+') { tok_.kind = Tok::PLUS; ++pos_; return; }
    if (c == '^') { tok_.kind = Tok::CARET; ++pos_; return; }
    if (c == '*') { tok_.kind = Tok::STAR; ++pos_; return; }
    if (c == '-') {
      if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '|') {
        tok_.kind = Tok::INHIB;
        pos_ += 2;
        return;
      }
      throw SyntaxError("expected '-|' at position " + std::to_string(pos_),
                        pos_);
    }
    if (c >= '0' && c <= '9') {
      std::size_t start = pos_;
      while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
      std::string_view digits = src_.substr(start, pos_ - start);
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (ec != std::errc{} || p != digits.data() + digits.size() ||
          v >= (std::uint64_t{1} << 62)) {
        throw SyntaxError("integer literal too large at position " +
                          std::to_string(start), start);
      }
      tok_.kind = Tok::INT;
      tok_.value = v;
      return;
    }
    if (c >= 'a' && c <= 'z') {
      std::size_t start = pos_;
      ++pos_;
      while (pos_ < src_.size()) {
        char d = src_[pos_];
        if ((d >= 'a' && d <= 'z') || (d >= '0' && d <= '9') || d == '_') {
          ++pos_;
        } else {
          break;
        }
      }
      tok_.text = std::string(src_.substr(start, pos_ - start));
      tok_.kind = tok_.text == "inf" ? Tok::INF : Tok::IDENT;
      return;
    }
    throw SyntaxError(std::string("unexpected character '") + c +
                      "' at position " + std::to_string(pos_), pos_);
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_;
};

ExprPtr make_leaf_var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::VAR;
  e->name = std::move(name);
  return e;
}

ExprPtr make_leaf_const(TimeValue v) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::CONST;
  e->value = v;
  return e;
}

ExprPtr make_binary(ExprKind kind, ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->left = std::move(l);
  e->right = std::move(r);
  return e;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  ExprPtr parse_full() {
    ExprPtr e = parse_inhibit();
    if (lex_.current().kind != Tok::END) {
      throw SyntaxError("unexpected trailing input at position " +
                        std::to_string(lex_.current().position),
                        lex_.current().position);
    }
    return e;
  }

 private:
  ExprPtr parse_inhibit() {
    ExprPtr e = parse_addmax();
    while (lex_.current().kind == Tok::INHIB) {
      lex_.advance();
      e = make_binary(ExprKind::INHIBIT, std::move(e), parse_addmax());
    }
    return e;
  }

  ExprPtr parse_addmax() {
    ExprPtr e = parse_term();
    while (lex_.current().kind == Tok::PLUS ||
           lex_.current().kind == Tok::CARET) {
      ExprKind k = lex_.current().kind == Tok::PLUS ? ExprKind::ADD
                                                    : ExprKind::MAX;
      lex_.advance();
      e = make_binary(k, std::move(e), parse_term());
    }
    return e;
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_factor();
    while (lex_.current().kind == Tok::STAR) {
      lex_.advance();
      e = make_binary(ExprKind::MUL, std::move(e), parse_factor());
    }
    return e;
  }

  ExprPtr parse_factor() {
    const Token& t = lex_.current();
    switch (t.kind) {
      case Tok::IDENT: {
        std::string name = t.text;
        lex_.advance();
        return make_leaf_var(std::move(name));
      }
      case Tok::INT: {
        TimeValue v(t.value);
        lex_.advance();
        return make_leaf_const(v);
      }
      case Tok::INF:
        lex_.advance();
        return make_leaf_const(kInf);
      case Tok::LPAREN: {
        lex_.advance();
        ExprPtr e = parse_inhibit();
        if (lex_.current().kind != Tok::RPAREN) {
          throw SyntaxError("expected ')' at position " +
                            std::to_string(lex_.current().position),
                            lex_.current().position);
        }
        lex_.advance();
        return e;
      }
      default:
        throw SyntaxError("expected an operand at position " +
                          std::to_string(t.position), t.position);
    }
  }

  Lexer lex_;
};

const char* op_spelling(ExprKind k) {
  switch (k) {
    case ExprKind::ADD: return "+";
    case ExprKind::MAX: return "^";
    case ExprKind::MUL: return "*";
    case ExprKind::INHIBIT: return "-|";
    default: return "?";
  }
}

TimeValue fold_const(ExprKind k, TimeValue a, TimeValue b) {
  switch (k) {
    case ExprKind::ADD: return t_add(a, b);
    case ExprKind::MAX: return t_max(a, b);
    case ExprKind::MUL: return t_mul(a, b);
    case ExprKind::INHIBIT: return t_inhibit(a, b);
    default: throw Error("not a binary operator");
  }
}

void collect_vars(const Expr& e, std::vector<std::string>& order,
                  std::set<std::string>& seen) {
  if (e.kind == ExprKind::VAR) {
    if (seen.insert(e.name).second) order.push_back(e.name);
    return;
  }
  if (e.left) collect_vars(*e.left, order, seen);
  if (e.right) collect_vars(*e.right, order, seen);
}

// Register allocation for compile(): variables first, then broadcast
// constants (never freed), then reusable temporaries.
class Allocator {
 public:
  explicit Allocator(const std::vector<std::string>& vars) {
    for (const auto& v : vars) {
      var_regs_[v] = Machine::register_name(next_);
      ++next_;
    }
  }

  const std::string& var_reg(const std::string& name) { return var_regs_.at(name); }

  std::string const_reg(TimeValue v, CompiledProgram& prog) {
    auto key = v.is_inf() ? ~std::uint64_t{0} : v.ticks();
    auto it = const_regs_.find(key);
    if (it != const_regs_.end()) return it->second;
    std::string r = Machine::register_name(next_);
    ++next_;
    const_regs_[key] = r;
    prog.const_preloads.emplace_back(r, v);
    return r;
  }

  std::string temp() {
    if (!free_.empty()) {
      std::string r = free_.back();
      free_.pop_back();
      return r;
    }
    std::string r = Machine::register_name(next_);
    ++next_;
    temps_.insert(r);
    return r;
  }

  void release(const std::string& r) {
    if (temps_.count(r)) free_.push_back(r);
  }

  std::size_t total() const { return next_; }

  const std::map<std::string, std::string>& var_regs() const { return var_regs_; }

 private:
  std::size_t next_ = 0;
  std::map<std::string, std::string> var_regs_;
  std::map<std::uint64_t, std::string> const_regs_;
  std::set<std::string> temps_;
  std::vector<std::string> free_;
};

struct Operand {
  bool is_const = false;
  TimeValue value{0};
  std::string reg;
};

Operand emit(const Expr& e, Allocator& alloc, CompiledProgram& prog) {
  switch (e.kind) {
    case ExprKind::VAR:
      return {false, 0, alloc.var_reg(e.name)};
    case ExprKind::CONST:
      return {true, e.value, {}};
    default:
      break;
  }

  Operand l = emit(*e.left, alloc, prog);
  Operand r = emit(*e.right, alloc, prog);

  if (l.is_const && r.is_const) {
    return {true, fold_const(e.kind, l.value, r.value), {}};
  }

  if (e.kind == ExprKind::MUL) {
    // Constant factors become static delay elements.
    if (l.is_const || r.is_const) {
      TimeValue c = l.is_const ? l.value : r.value;
      const std::string& src = l.is_const ? r.reg : l.reg;
      std::string dst = alloc.temp();
      prog.instructions.push_back(isa::scale(c, src, dst));
      alloc.release(src);
      return {false, 0, dst};
    }
    std::string dst = alloc.temp();
    prog.instructions.push_back(isa::tropmul(l.reg, r.reg, dst));
    alloc.release(l.reg);
    alloc.release(r.reg);
    return {false, 0, dst};
  }

  // Elementwise min/max/inhibit: a constant side goes through a broadcast
  // register so operand order (inhibitor vs data) is preserved.
  std::string lreg = l.is_const ? alloc.const_reg(l.value, prog) : l.reg;
  std::string rreg = r.is_const ? alloc.const_reg(r.value, prog) : r.reg;
  std::string dst = alloc.temp();
  switch (e.kind) {
    case ExprKind::ADD:
      prog.instructions.push_back(isa::ew_min(lreg, rreg, dst));
      break;
    case ExprKind::MAX:
      prog.instructions.push_back(isa::ew_max(lreg, rreg, dst));
      break;
    case ExprKind::INHIBIT:
      prog.instructions.push_back(isa::ew_inhibit(lreg, rreg, dst));
      break;
    default:
      throw Error("not a binary operator");
  }
  alloc.release(lreg);
  alloc.release(rreg);
  return {false, 0, dst};
}

}  // namespace

ExprPtr parse(std::string_view src) {
  if (src.empty()) throw SyntaxError("empty expression", 0);
  Parser p(src);
  return p.parse_full();
}

std::string print(const Expr& e) {
  switch (e.kind) {
    case ExprKind::VAR:
      return e.name;
    case ExprKind::CONST:
      return e.value.str();
    default:
      return "(" + print(*e.left) + " " + op_spelling(e.kind) + " " +
             print(*e.right) + ")";
  }
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::VAR:
      return a.name == b.name;
    case ExprKind::CONST:
      return a.value == b.value;
    default:
      return expr_equal(*a.left, *b.left) && expr_equal(*a.right, *b.right);
  }
}

CompiledProgram compile(const Expr& e) {
  CompiledProgram prog;
  std::vector<std::string> vars;
  std::set<std::string> seen;
  collect_vars(e, vars, seen);
  Allocator alloc(vars);

  Operand result = emit(e, alloc, prog);
  if (result.is_const) {
    result.reg = alloc.const_reg(result.value, prog);
  }
  prog.result_register = result.reg;
  prog.var_registers = alloc.var_regs();
  prog.registers_needed = alloc.total();
  prog.transitions = 0;
  for (const auto& i : prog.instructions) {
    prog.transitions += i.opcode == Opcode::TROPMUL ? 2 : 1;
  }
  return prog;
}

Wavefront evaluate(std::string_view src, const Bindings& b,
                   const MachineConfig& cfg) {
  ExprPtr e = parse(src);
  CompiledProgram prog = compile(*e);

  std::size_t width = 1;
  if (!b.empty()) {
    width = b.begin()->second.size();
    for (const auto& [name, w] : b) {
      if (w.size() != width) {
        throw DimensionMismatch("binding " + name + " has length " +
                                std::to_string(w.size()) + ", expected " +
                                std::to_string(width));
      }
    }
  }
  if (width == 0) throw DimensionMismatch("bindings must not be empty vectors");

  MachineConfig mc = cfg;
  mc.width = width;
  mc.register_count = std::max(cfg.register_count, prog.registers_needed);
  mc.bank_count = 0;
  Machine machine(mc);

  for (const auto& [reg, value] : prog.const_preloads) {
    machine.host_write(reg, make_filled(width, value));
  }
  for (const auto& [var, reg] : prog.var_registers) {
    auto it = b.find(var);
    if (it == b.end()) {
      throw UnboundVariable("variable " + var + " has no binding");
    }
    machine.host_write(reg, it->second);
  }
  for (const auto& instr : prog.instructions) {
    machine.execute(instr);
  }
  return machine.host_read(prog.result_register);
}

namespace {

struct Val {
  bool scalar = false;
  TimeValue s{0};
  Wavefront v;
};

Val direct_value(const Expr& e, const Bindings& b) {
  switch (e.kind) {
    case ExprKind::VAR: {
      auto it = b.find(e.name);
      if (it == b.end()) {
        throw UnboundVariable("variable " + e.name + " has no binding");
      }
      return {false, 0, it->second};
    }
    case ExprKind::CONST:
      return {true, e.value, {}};
    default:
      break;
  }
  Val l = direct_value(*e.left, b);
  Val r = direct_value(*e.right, b);
  if (l.scalar && r.scalar) {
    return {true, fold_const(e.kind, l.s, r.s), {}};
  }
  std::size_t width = l.scalar ? r.v.size() : l.v.size();
  Wavefront lv = l.scalar ? make_filled(width, l.s) : std::move(l.v);
  Wavefront rv = r.scalar ? make_filled(width, r.s) : std::move(r.v);
  switch (e.kind) {
    case ExprKind::ADD:
      return {false, 0, ew(EwOp::MIN, lv, rv)};
    case ExprKind::MAX:
      return {false, 0, ew(EwOp::MAX, lv, rv)};
    case ExprKind::MUL:
      return {false, 0, ew_mul(lv, rv)};
    case ExprKind::INHIBIT:
      return {false, 0, ew(EwOp::INHIBIT, lv, rv)};
    default:
      throw Error("not a binary operator");
  }
}

}  // namespace

Wavefront direct_eval(const Expr& e, const Bindings& b) {
  std::size_t width = 1;
  if (!b.empty()) {
    width = b.begin()->second.size();
    for (const auto& [name, w] : b) {
      if (w.size() != width) {
        throw DimensionMismatch("binding " + name + " has length " +
                                std::to_string(w.size()) + ", expected " +
                                std::to_string(width));
      }
    }
  }
  Val v = direct_value(e, b);
  if (v.scalar) return make_filled(width, v.s);
  return v.v;
}

}  // namespace tsm::lang
