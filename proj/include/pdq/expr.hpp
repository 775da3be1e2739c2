#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pdq/state.hpp"

namespace pdq {

/// Raised when an intensity expression fails to parse. `position` is the
/// zero-based offset into the source text where the problem was detected.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " (at position " +
                           std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Raised when evaluating an expression hits a domain error (division by
/// zero, log of a non-positive value, NaN from pow, or a final value that is
/// negative or non-finite). Carries the offending state.
class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& message, const StateX& s)
      : std::runtime_error(message + " at state (n=" + std::to_string(s.n) +
                           ", x=" + std::to_string(s.x) +
                           ", y=" + std::to_string(s.y) + ")"),
        state_(s) {}

  const StateX& state() const { return state_; }

 private:
  StateX state_;
};

enum class ExprKind : std::uint8_t {
  constant,
  var_n,
  var_x,
  var_y,
  add,
  sub,
  mul,
  div,
  pow,
  call_exp,
  call_log,
  call_min,
  call_max,
  call_if_gt,
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprKind kind = ExprKind::constant;
  double value = 0.0;          // meaningful only for ExprKind::constant
  std::vector<ExprPtr> args;   // children, left to right
};

namespace detail {

inline const char* expr_fn_name(ExprKind k) {
  switch (k) {
    case ExprKind::call_exp: return "exp";
    case ExprKind::call_log: return "log";
    case ExprKind::call_min: return "min";
    case ExprKind::call_max: return "max";
    case ExprKind::call_if_gt: return "if_gt";
    default: return "";
  }
}

// Shortest decimal form that round-trips through a double.
inline std::string format_number(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline int expr_precedence(const ExprNode& e) {
  switch (e.kind) {
    case ExprKind::add:
    case ExprKind::sub: return 1;
    case ExprKind::mul:
    case ExprKind::div: return 2;
    case ExprKind::pow: return 3;
    default: return 4;
  }
}

inline void print_expr(const ExprNode& e, int min_prec, std::string& out) {
  const int prec = expr_precedence(e);
  const bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (e.kind) {
    case ExprKind::constant: out += format_number(e.value); break;
    case ExprKind::var_n: out += 'n'; break;
    case ExprKind::var_x: out += 'x'; break;
    case ExprKind::var_y: out += 'y'; break;
    case ExprKind::add:
    case ExprKind::sub:
    case ExprKind::mul:
    case ExprKind::div: {
      // Left-associative: the right child needs strictly higher precedence
      // so that parse(print(tree)) reproduces the tree.
      const char sym = e.kind == ExprKind::add   ? '+'
                       : e.kind == ExprKind::sub ? '-'
                       : e.kind == ExprKind::mul ? '*'
                                                 : '/';
      print_expr(*e.args[0], prec, out);
      out += sym;
      print_expr(*e.args[1], prec + 1, out);
      break;
    }
    case ExprKind::pow:
      // Grammar only allows atoms around '^'.
      print_expr(*e.args[0], 4, out);
      out += '^';
      print_expr(*e.args[1], 4, out);
      break;
    default: {
      out += expr_fn_name(e.kind);
      out += '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print_expr(*e.args[i], 1, out);
      }
      out += ')';
      break;
    }
  }
  if (parens) out += ')';
}

// Plain recursive evaluator. Used for analysis (guard crossings, tests);
// the hot path uses the compiled program below. No sign/domain policing
// beyond what the math itself produces.
inline double eval_node(const ExprNode& e, const StateX& s) {
  switch (e.kind) {
    case ExprKind::constant: return e.value;
    case ExprKind::var_n: return static_cast<double>(s.n);
    case ExprKind::var_x: return s.x;
    case ExprKind::var_y: return s.y;
    case ExprKind::add: return eval_node(*e.args[0], s) + eval_node(*e.args[1], s);
    case ExprKind::sub: return eval_node(*e.args[0], s) - eval_node(*e.args[1], s);
    case ExprKind::mul: return eval_node(*e.args[0], s) * eval_node(*e.args[1], s);
    case ExprKind::div: return eval_node(*e.args[0], s) / eval_node(*e.args[1], s);
    case ExprKind::pow:
      return std::pow(eval_node(*e.args[0], s), eval_node(*e.args[1], s));
    case ExprKind::call_exp: return std::exp(eval_node(*e.args[0], s));
    case ExprKind::call_log: return std::log(eval_node(*e.args[0], s));
    case ExprKind::call_min:
      return std::fmin(eval_node(*e.args[0], s), eval_node(*e.args[1], s));
    case ExprKind::call_max:
      return std::fmax(eval_node(*e.args[0], s), eval_node(*e.args[1], s));
    case ExprKind::call_if_gt:
      return eval_node(*e.args[0], s) > eval_node(*e.args[1], s)
                 ? eval_node(*e.args[2], s)
                 : eval_node(*e.args[3], s);
  }
  return 0.0;
}

enum class Op : std::uint8_t {
  push_const,
  push_n,
  push_x,
  push_y,
  add,
  sub,
  mul,
  div,
  pow,
  fexp,
  flog,
  fmin,
  fmax,
  jle,   // pop b, a; if !(a > b) skip forward by `jump`
  jmp,   // skip forward by `jump`
};

struct Instr {
  Op op;
  std::int32_t jump = 0;
  double imm = 0.0;
};

// Postfix compilation with forward jumps so that only the taken branch of
// if_gt is evaluated (the untaken branch may be out of domain on purpose).
inline void compile_node(const ExprNode& e, std::vector<Instr>& prog) {
  switch (e.kind) {
    case ExprKind::constant:
      prog.push_back({Op::push_const, 0, e.value});
      return;
    case ExprKind::var_n: prog.push_back({Op::push_n}); return;
    case ExprKind::var_x: prog.push_back({Op::push_x}); return;
    case ExprKind::var_y: prog.push_back({Op::push_y}); return;
    case ExprKind::add:
    case ExprKind::sub:
    case ExprKind::mul:
    case ExprKind::div:
    case ExprKind::pow: {
      compile_node(*e.args[0], prog);
      compile_node(*e.args[1], prog);
      Op op = e.kind == ExprKind::add   ? Op::add
              : e.kind == ExprKind::sub ? Op::sub
              : e.kind == ExprKind::mul ? Op::mul
              : e.kind == ExprKind::div ? Op::div
                                        : Op::pow;
      prog.push_back({op});
      return;
    }
    case ExprKind::call_exp:
      compile_node(*e.args[0], prog);
      prog.push_back({Op::fexp});
      return;
    case ExprKind::call_log:
      compile_node(*e.args[0], prog);
      prog.push_back({Op::flog});
      return;
    case ExprKind::call_min:
    case ExprKind::call_max:
      compile_node(*e.args[0], prog);
      compile_node(*e.args[1], prog);
      prog.push_back({e.kind == ExprKind::call_min ? Op::fmin : Op::fmax});
      return;
    case ExprKind::call_if_gt: {
      compile_node(*e.args[0], prog);
      compile_node(*e.args[1], prog);
      const std::size_t jle_at = prog.size();
      prog.push_back({Op::jle});
      compile_node(*e.args[2], prog);
      const std::size_t jmp_at = prog.size();
      prog.push_back({Op::jmp});
      compile_node(*e.args[3], prog);
      prog[jle_at].jump = static_cast<std::int32_t>(jmp_at - jle_at);
      prog[jmp_at].jump = static_cast<std::int32_t>(prog.size() - jmp_at - 1);
      return;
    }
  }
}

inline bool contains_guard(const ExprNode& e) {
  if (e.kind == ExprKind::call_if_gt || e.kind == ExprKind::call_min ||
      e.kind == ExprKind::call_max)
    return true;
  for (const auto& a : e.args)
    if (contains_guard(*a)) return true;
  return false;
}

constexpr std::size_t kExprStackMax = 128;

inline std::size_t stack_need(const std::vector<Instr>& prog) {
  // Branches only ever leave one value; a conservative linear scan suffices.
  std::size_t depth = 0, peak = 0;
  for (const auto& in : prog) {
    switch (in.op) {
      case Op::push_const:
      case Op::push_n:
      case Op::push_x:
      case Op::push_y:
        ++depth;
        peak = std::max(peak, depth);
        break;
      case Op::fexp:
      case Op::flog:
      case Op::jmp:
        break;
      default:
        --depth;  // binary ops and jle consume one net
        break;
    }
  }
  return peak;
}

}  // namespace detail

/// A parsed and compiled intensity expression in the variables n, x, y.
/// Evaluation enforces that the final value is finite and non-negative.
class IntensityExpr {
 public:
  IntensityExpr() = default;

  static IntensityExpr parse(std::string_view text);

  double operator()(const StateX& s) const {
    double stack[detail::kExprStackMax];
    std::size_t sp = 0;
    const auto* prog = prog_.data();
    const std::size_t len = prog_.size();
    for (std::size_t pc = 0; pc < len;) {
      const detail::Instr& in = prog[pc++];
      switch (in.op) {
        case detail::Op::push_const: stack[sp++] = in.imm; break;
        case detail::Op::push_n: stack[sp++] = static_cast<double>(s.n); break;
        case detail::Op::push_x: stack[sp++] = s.x; break;
        case detail::Op::push_y: stack[sp++] = s.y; break;
        case detail::Op::add: --sp; stack[sp - 1] += stack[sp]; break;
        case detail::Op::sub: --sp; stack[sp - 1] -= stack[sp]; break;
        case detail::Op::mul: --sp; stack[sp - 1] *= stack[sp]; break;
        case detail::Op::div:
          --sp;
          if (stack[sp] == 0.0) throw EvalError("division by zero", s);
          stack[sp - 1] /= stack[sp];
          break;
        case detail::Op::pow: {
          --sp;
          const double r = std::pow(stack[sp - 1], stack[sp]);
          if (std::isnan(r)) throw EvalError("pow out of domain", s);
          stack[sp - 1] = r;
          break;
        }
        case detail::Op::fexp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
        case detail::Op::flog:
          if (stack[sp - 1] <= 0.0)
            throw EvalError("log of non-positive value", s);
          stack[sp - 1] = std::log(stack[sp - 1]);
          break;
        case detail::Op::fmin:
          --sp;
          stack[sp - 1] = std::fmin(stack[sp - 1], stack[sp]);
          break;
        case detail::Op::fmax:
          --sp;
          stack[sp - 1] = std::fmax(stack[sp - 1], stack[sp]);
          break;
        case detail::Op::jle:
          sp -= 2;
          if (!(stack[sp] > stack[sp + 1])) pc += in.jump;
          break;
        case detail::Op::jmp: pc += in.jump; break;
      }
    }
    const double v = stack[0];
    if (!std::isfinite(v) || v < 0.0)
      throw EvalError("intensity evaluated to " + detail::format_number(v), s);
    return v;
  }

  const ExprNode& root() const { return *root_; }
  bool parsed() const { return root_ != nullptr; }

  /// True if the expression contains if_gt/min/max, i.e. may be piecewise.
  bool has_guards() const { return guards_; }

  /// Canonical text form: parse(str()) reproduces the same tree.
  std::string str() const {
    std::string out;
    detail::print_expr(*root_, 1, out);
    return out;
  }

 private:
  explicit IntensityExpr(ExprPtr root) : root_(std::move(root)) {
    detail::compile_node(*root_, prog_);
    guards_ = detail::contains_guard(*root_);
    if (detail::stack_need(prog_) > detail::kExprStackMax)
      throw ParseError("expression nests too deeply", 0);
  }

  ExprPtr root_;
  std::vector<detail::Instr> prog_;
  bool guards_ = false;

  friend class ExprParser;
};

namespace detail {

struct Token {
  enum Kind { number, ident, sym, end } kind = end;
  double num = 0.0;
  std::string text;
  char symbol = 0;
  std::size_t pos = 0;
};

}  // namespace detail

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) { advance(); }

  ExprPtr parse_full() {
    ExprPtr e = parse_expr();
    if (tok_.kind != detail::Token::end)
      throw ParseError("unexpected trailing input", tok_.pos);
    return e;
  }

 private:
  using Token = detail::Token;

  ExprPtr parse_expr() {
    ExprPtr left = parse_term();
    while (is_sym('+') || is_sym('-')) {
      const ExprKind k = tok_.symbol == '+' ? ExprKind::add : ExprKind::sub;
      advance();
      ExprPtr right = parse_term();
      left = make(k, {left, right});
    }
    return left;
  }

  ExprPtr parse_term() {
    ExprPtr left = parse_factor();
    while (is_sym('*') || is_sym('/')) {
      const ExprKind k = tok_.symbol == '*' ? ExprKind::mul : ExprKind::div;
      advance();
      ExprPtr right = parse_factor();
      left = make(k, {left, right});
    }
    return left;
  }

  ExprPtr parse_factor() {
    ExprPtr base = parse_atom();
    if (is_sym('^')) {
      advance();
      ExprPtr e = parse_atom();
      return make(ExprKind::pow, {base, e});
    }
    return base;
  }

  ExprPtr parse_atom() {
    if (tok_.kind == Token::number) {
      auto node = std::make_shared<ExprNode>();
      node->kind = ExprKind::constant;
      node->value = tok_.num;
      advance();
      return node;
    }
    if (tok_.kind == Token::ident) {
      const std::string name = tok_.text;
      const std::size_t at = tok_.pos;
      advance();
      if (name == "n" || name == "x" || name == "y") {
        auto node = std::make_shared<ExprNode>();
        node->kind = name == "n"   ? ExprKind::var_n
                     : name == "x" ? ExprKind::var_x
                                   : ExprKind::var_y;
        return node;
      }
      ExprKind fn;
      std::size_t arity;
      if (name == "exp") { fn = ExprKind::call_exp; arity = 1; }
      else if (name == "log") { fn = ExprKind::call_log; arity = 1; }
      else if (name == "min") { fn = ExprKind::call_min; arity = 2; }
      else if (name == "max") { fn = ExprKind::call_max; arity = 2; }
      else if (name == "if_gt") { fn = ExprKind::call_if_gt; arity = 4; }
      else throw ParseError("unknown identifier '" + name + "'", at);
      expect('(');
      std::vector<ExprPtr> args;
      args.push_back(parse_expr());
      while (is_sym(',')) {
        advance();
        args.push_back(parse_expr());
      }
      if (args.size() != arity)
        throw ParseError("'" + name + "' expects " + std::to_string(arity) +
                             " argument(s), got " + std::to_string(args.size()),
                         at);
      expect(')');
      return make(fn, std::move(args));
    }
    if (is_sym('(')) {
      advance();
      ExprPtr e = parse_expr();
      expect(')');
      return e;
    }
    throw ParseError("expected a number, variable, function, or '('",
                     tok_.pos);
  }

  static ExprPtr make(ExprKind k, std::vector<ExprPtr> args) {
    auto node = std::make_shared<ExprNode>();
    node->kind = k;
    node->args = std::move(args);
    return node;
  }

  bool is_sym(char c) const {
    return tok_.kind == Token::sym && tok_.symbol == c;
  }

  void expect(char c) {
    if (!is_sym(c))
      throw ParseError(std::string("expected '") + c + "'", tok_.pos);
    advance();
  }

  void advance() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r'))
      ++pos_;
    tok_ = Token{};
    tok_.pos = pos_;
    if (pos_ >= text_.size()) {
      tok_.kind = Token::end;
      return;
    }
    const char c = text_[pos_];
    if ((c >= '0' && c <= '9') || c == '.') {
      const char* begin = text_.data() + pos_;
      const char* end = text_.data() + text_.size();
      double value = 0.0;
      auto res = std::from_chars(begin, end, value);
      if (res.ec != std::errc() || !std::isfinite(value))
        throw ParseError("malformed number", pos_);
      tok_.kind = Token::number;
      tok_.num = value;
      pos_ += static_cast<std::size_t>(res.ptr - begin);
      return;
    }
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
      std::size_t e = pos_;
      while (e < text_.size() &&
             ((text_[e] >= 'a' && text_[e] <= 'z') ||
              (text_[e] >= 'A' && text_[e] <= 'Z') ||
              (text_[e] >= '0' && text_[e] <= '9') || text_[e] == '_'))
        ++e;
      tok_.kind = Token::ident;
      tok_.text = std::string(text_.substr(pos_, e - pos_));
      pos_ = e;
      return;
    }
    if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^' || c == '(' ||
        c == ')' || c == ',') {
      tok_.kind = Token::sym;
      tok_.symbol = c;
      ++pos_;
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  detail::Token tok_;
};

inline IntensityExpr IntensityExpr::parse(std::string_view text) {
  ExprParser p(text);
  return IntensityExpr(p.parse_full());
}

inline IntensityExpr parse_intensity(std::string_view text) {
  return IntensityExpr::parse(text);
}

inline double eval_intensity(const IntensityExpr& e, const StateX& s) {
  return e(s);
}

/// Structural equality of expression trees (constants compared exactly).
inline bool expr_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  if (a.kind == ExprKind::constant && a.value != b.value) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!expr_equal(*a.args[i], *b.args[i])) return false;
  return true;
}

}  // namespace pdq
