#include "kcontract/io/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>

namespace kc::io {

class ExpressionParser {
 public:
  explicit ExpressionParser(const std::string& s) : s_(s) {}

  Expression run() {
    Expression e;
    e.text_ = s_;
    out_ = &e;
    skip();
    if (pos_ >= s_.size()) throw ParseError("empty expression", pos_);
    expr();
    skip();
    if (pos_ < s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    int depth = 0;
    int peak = 0;
    for (const auto& in : e.code_) {
      if (in.op == Op::constant || in.op == Op::variable) {
        peak = std::max(peak, ++depth);
      } else if (in.op == Op::add || in.op == Op::sub || in.op == Op::mul || in.op == Op::div) {
        --depth;
      }
    }
    if (peak > Expression::kMaxDepth) throw ParseError("expression nested too deeply", 0);
    return e;
  }

 private:
  using Op = Expression::Op;

  void emit(Op op, double v = 0.0, int idx = 0) { out_->code_.push_back({op, v, idx}); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  void expr() {
    term();
    while (true) {
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
    unary();
    while (true) {
      if (accept('*')) {
        unary();
        emit(Op::mul);
      } else if (accept('/')) {
        unary();
        emit(Op::div);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept('-')) {
      unary();
      emit(Op::neg);
    } else if (accept('+')) {
      unary();
    } else {
      power();
    }
  }

  void power() {
    primary();
    if (accept('^')) {
      skip();
      const std::size_t at = pos_;
      bool negative = accept('-');
      skip();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) throw ParseError("exponent must be an integer literal", at);
      if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
        throw ParseError("exponent must be an integer literal", at);
      const int p = std::stoi(s_.substr(start, pos_ - start));
      emit(Op::pow, 0.0, negative ? -p : p);
    }
  }

  void primary() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      expr();
      expect(')');
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) throw ParseError("malformed number", pos_);
      pos_ += static_cast<std::size_t>(end - begin);
      emit(Op::constant, v);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string word = s_.substr(start, pos_ - start);
      if (word == "sin" || word == "cos") {
        expect('(');
        expr();
        expect(')');
        emit(word == "sin" ? Op::sin : Op::cos);
        return;
      }
      if (word.size() >= 2 && word[0] == 'x') {
        bool digits = true;
        for (std::size_t i = 1; i < word.size(); ++i) digits = digits && std::isdigit(static_cast<unsigned char>(word[i]));
        if (digits && word[1] != '0') {
          const int idx = std::stoi(word.substr(1));
          out_->max_var_ = std::max(out_->max_var_, idx);
          emit(Op::variable, 0.0, idx - 1);
          return;
        }
      }
      throw ParseError("unknown identifier '" + word + "'", start);
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  Expression* out_ = nullptr;
};

Expression Expression::parse(const std::string& text) { return ExpressionParser(text).run(); }

double Expression::eval(const Vector& x) const {
  double stack[kMaxDepth];
  int sp = 0;
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::constant: stack[sp++] = in.value; break;
      case Op::variable: stack[sp++] = x(in.index); break;
      case Op::add: --sp; stack[sp - 1] += stack[sp]; break;
      case Op::sub: --sp; stack[sp - 1] -= stack[sp]; break;
      case Op::mul: --sp; stack[sp - 1] *= stack[sp]; break;
      case Op::div: --sp; stack[sp - 1] /= stack[sp]; break;
      case Op::neg: stack[sp - 1] = -stack[sp - 1]; break;
      case Op::pow: {
        const double b = stack[sp - 1];
        const int p = std::abs(in.index);
        double r = 1.0;
        for (int i = 0; i < p; ++i) r *= b;
        stack[sp - 1] = in.index < 0 ? 1.0 / r : r;
        break;
      }
      case Op::sin: stack[sp - 1] = std::sin(stack[sp - 1]); break;
      case Op::cos: stack[sp - 1] = std::cos(stack[sp - 1]); break;
    }
  }
  return stack[0];
}

double Expression::eval_grad(const Vector& x, Vector& grad) const {
  const Eigen::Index n = x.size();
  std::vector<double> val;
  std::vector<Vector> der;
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::constant:
        val.push_back(in.value);
        der.push_back(Vector::Zero(n));
        break;
      case Op::variable:
        val.push_back(x(in.index));
        der.push_back(Vector::Unit(n, in.index));
        break;
      case Op::neg:
        val.back() = -val.back();
        der.back() = -der.back();
        break;
      case Op::sin:
        der.back() *= std::cos(val.back());
        val.back() = std::sin(val.back());
        break;
      case Op::cos:
        der.back() *= -std::sin(val.back());
        val.back() = std::cos(val.back());
        break;
      case Op::pow: {
        const double b = val.back();
        const int p = in.index;
        const double r = std::pow(b, p);
        der.back() *= (p == 0) ? 0.0 : p * std::pow(b, p - 1);
        val.back() = r;
        break;
      }
      default: {
        const double bv = val.back();
        const Vector bd = der.back();
        val.pop_back();
        der.pop_back();
        double& av = val.back();
        Vector& ad = der.back();
        if (in.op == Op::add) {
          av += bv;
          ad += bd;
        } else if (in.op == Op::sub) {
          av -= bv;
          ad -= bd;
        } else if (in.op == Op::mul) {
          ad = ad * bv + av * bd;
          av *= bv;
        } else {
          ad = (ad * bv - av * bd) / (bv * bv);
          av /= bv;
        }
      }
    }
  }
  grad = der.back();
  return val.back();
}

namespace {

Interval imul(Interval a, Interval b) {
  const double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

Interval ipow(Interval a, int p) {
  if (p == 0) return {1.0, 1.0};
  if (p < 0) {
    const Interval d = ipow(a, -p);
    if (d.lo <= 0.0 && d.hi >= 0.0) {
      return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }
    return {1.0 / d.hi, 1.0 / d.lo};
  }
  const double l = std::pow(a.lo, p);
  const double h = std::pow(a.hi, p);
  if (p % 2 == 1) return {l, h};
  if (a.lo >= 0.0) return {l, h};
  if (a.hi <= 0.0) return {h, l};
  return {0.0, std::max(l, h)};
}

// Range of sin over [lo, hi].
Interval isin(Interval a) {
  constexpr double pi = std::numbers::pi;
  if (!(std::isfinite(a.lo) && std::isfinite(a.hi)) || a.hi - a.lo >= 2.0 * pi) return {-1.0, 1.0};
  double lo = std::min(std::sin(a.lo), std::sin(a.hi));
  double hi = std::max(std::sin(a.lo), std::sin(a.hi));
  // Peaks at pi/2 + 2 pi m, troughs at -pi/2 + 2 pi m.
  if (std::ceil((a.lo - pi / 2) / (2 * pi)) <= std::floor((a.hi - pi / 2) / (2 * pi))) hi = 1.0;
  if (std::ceil((a.lo + pi / 2) / (2 * pi)) <= std::floor((a.hi + pi / 2) / (2 * pi))) lo = -1.0;
  return {lo, hi};
}

}  // namespace

Interval Expression::eval_interval(const std::vector<Interval>& box) const {
  std::vector<Interval> st;
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::constant: st.push_back({in.value, in.value}); break;
      case Op::variable:
        if (in.index >= static_cast<int>(box.size())) throw std::invalid_argument("variable outside the box");
        st.push_back(box[in.index]);
        break;
      case Op::neg: st.back() = {-st.back().hi, -st.back().lo}; break;
      case Op::pow: st.back() = ipow(st.back(), in.index); break;
      case Op::sin: st.back() = isin(st.back()); break;
      case Op::cos: st.back() = isin({st.back().lo + std::numbers::pi / 2, st.back().hi + std::numbers::pi / 2}); break;
      default: {
        const Interval b = st.back();
        st.pop_back();
        Interval& a = st.back();
        if (in.op == Op::add) {
          a = {a.lo + b.lo, a.hi + b.hi};
        } else if (in.op == Op::sub) {
          a = {a.lo - b.hi, a.hi - b.lo};
        } else if (in.op == Op::mul) {
          a = imul(a, b);
        } else if (b.lo <= 0.0 && b.hi >= 0.0) {
          a = {-inf, inf};
        } else {
          a = imul(a, {1.0 / b.hi, 1.0 / b.lo});
        }
      }
    }
  }
  return st.back();
}

}  // namespace kc::io
