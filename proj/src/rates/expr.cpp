#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "mcpert/errors.hpp"
#include "mcpert/rates.hpp"

namespace mcpert {

namespace {

enum class Op { literal, pi, time, neg, add, sub, mul, div, sin, cos, exp, min, max };

struct Instr {
  Op op;
  double value = 0.0;
};

}  // namespace

// Postfix program; evaluated on a small value stack.
struct RateExpr::Program {
  std::vector<Instr> code;
  std::size_t max_depth = 0;
  bool uses_time = false;
};

namespace {

class Parser {
public:
  explicit Parser(std::string_view src) : src_(src) {}

  RateExpr::Program run() {
    skip_ws();
    if (pos_ == src_.size()) throw ParseError("empty rate expression", pos_);
    expr();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    return std::move(prog_);
  }

private:
  void emit(Op op, double v = 0.0) {
    prog_.code.push_back({op, v});
    switch (op) {
      case Op::literal:
      case Op::pi:
      case Op::time:
        ++depth_;
        break;
      case Op::add:
      case Op::sub:
      case Op::mul:
      case Op::div:
      case Op::min:
      case Op::max:
        --depth_;
        break;
      default:
        break;
    }
    if (op == Op::time) prog_.uses_time = true;
    prog_.max_depth = std::max(prog_.max_depth, depth_);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) throw ParseError(std::string("expected '") + c + "' before end of input", pos_);
      throw ParseError(std::string("expected '") + c + "' but found '" + src_[pos_] + "'", pos_);
    }
  }

  void expr() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        emit(Op::add);
      } else if (accept('-')) {
        term();
        emit(Op::sub);
      } else {
        return;
      }
    }
  }

  void term() {
    factor();
    for (;;) {
      if (accept('*')) {
        factor();
        emit(Op::mul);
      } else if (accept('/')) {
        factor();
        emit(Op::div);
      } else {
        return;
      }
    }
  }

  void factor() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = src_[pos_];
    if (c == '-') {
      ++pos_;
      factor();
      emit(Op::neg);
      return;
    }
    if (c == '(') {
      ++pos_;
      expr();
      expect(')');
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      identifier();
      return;
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  void number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t n = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) throw ParseError("malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      const std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;  // "2e" is the literal 2 followed by an identifier
    }
    double v = 0.0;
    const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_ || !std::isfinite(v))
      throw ParseError("malformed number", start);
    emit(Op::literal, v);
  }

  void identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name == "t") {
      emit(Op::time);
      return;
    }
    if (name == "pi") {
      emit(Op::pi, std::numbers::pi);
      return;
    }
    Op fn;
    int arity = 1;
    if (name == "sin") {
      fn = Op::sin;
    } else if (name == "cos") {
      fn = Op::cos;
    } else if (name == "exp") {
      fn = Op::exp;
    } else if (name == "min") {
      fn = Op::min;
      arity = 2;
    } else if (name == "max") {
      fn = Op::max;
      arity = 2;
    } else {
      throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }
    expect('(');
    expr();
    if (arity == 2) {
      if (!accept(',')) throw ParseError(std::string(name) + " takes two arguments", pos_);
      expr();
    } else if (accept(',')) {
      throw ParseError(std::string(name) + " takes one argument", pos_ - 1);
    }
    expect(')');
    emit(fn);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;
  RateExpr::Program prog_;
};

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RateExpr RateExpr::parse(std::string_view source) {
  return RateExpr(std::make_shared<const Program>(Parser(source).run()));
}

double RateExpr::operator()(double t) const {
  const auto& code = program_->code;
  std::array<double, 32> small{};
  std::vector<double> large;
  double* stack = small.data();
  if (program_->max_depth > small.size()) {
    large.resize(program_->max_depth);
    stack = large.data();
  }
  std::size_t top = 0;
  for (const Instr& in : code) {
    switch (in.op) {
      case Op::literal:
      case Op::pi:
        stack[top++] = in.value;
        break;
      case Op::time:
        stack[top++] = t;
        break;
      case Op::neg:
        stack[top - 1] = -stack[top - 1];
        break;
      case Op::add:
        --top;
        stack[top - 1] += stack[top];
        break;
      case Op::sub:
        --top;
        stack[top - 1] -= stack[top];
        break;
      case Op::mul:
        --top;
        stack[top - 1] *= stack[top];
        break;
      case Op::div:
        --top;
        if (stack[top] == 0.0) throw EvaluationError("division by zero in rate expression", t);
        stack[top - 1] /= stack[top];
        break;
      case Op::sin:
        stack[top - 1] = std::sin(stack[top - 1]);
        break;
      case Op::cos:
        stack[top - 1] = std::cos(stack[top - 1]);
        break;
      case Op::exp:
        stack[top - 1] = std::exp(stack[top - 1]);
        break;
      case Op::min:
        --top;
        stack[top - 1] = std::min(stack[top - 1], stack[top]);
        break;
      case Op::max:
        --top;
        stack[top - 1] = std::max(stack[top - 1], stack[top]);
        break;
    }
  }
  const double v = stack[0];
  if (!std::isfinite(v)) throw EvaluationError("non-finite rate value", t);
  return v;
}

std::string RateExpr::to_string() const {
  std::vector<std::string> st;
  auto pop = [&st] {
    std::string s = std::move(st.back());
    st.pop_back();
    return s;
  };
  for (const Instr& in : program_->code) {
    switch (in.op) {
      case Op::literal:
        st.push_back(format_number(in.value));
        break;
      case Op::pi:
        st.emplace_back("pi");
        break;
      case Op::time:
        st.emplace_back("t");
        break;
      case Op::neg:
        st.push_back("(-" + pop() + ")");
        break;
      case Op::add:
      case Op::sub:
      case Op::mul:
      case Op::div: {
        std::string b = pop();
        std::string a = pop();
        const char* sym = in.op == Op::add ? " + " : in.op == Op::sub ? " - " : in.op == Op::mul ? " * " : " / ";
        st.push_back("(" + a + sym + b + ")");
        break;
      }
      case Op::sin:
        st.push_back("sin(" + pop() + ")");
        break;
      case Op::cos:
        st.push_back("cos(" + pop() + ")");
        break;
      case Op::exp:
        st.push_back("exp(" + pop() + ")");
        break;
      case Op::min:
      case Op::max: {
        std::string b = pop();
        std::string a = pop();
        st.push_back(std::string(in.op == Op::min ? "min(" : "max(") + a + ", " + b + ")");
        break;
      }
    }
  }
  return st.back();
}

bool RateExpr::depends_on_time() const noexcept { return program_->uses_time; }

}  // namespace mcpert
