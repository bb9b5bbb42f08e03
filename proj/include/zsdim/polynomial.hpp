#pragma once

// Integer-coefficient polynomials in named variables, parsed from text such as
// "x^2 - 3*x*y + 1".

#include <gmpxx.h>

#include <cctype>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zsdim/error.hpp"
#include "zsdim/exactalg.hpp"

namespace zsdim {

class Polynomial {
 public:
  using Exponents = std::vector<unsigned>;

  Polynomial() = default;
  explicit Polynomial(std::size_t vars) : vars_(vars) {}

  static Polynomial constant(std::size_t vars, const mpz_class& c) {
    Polynomial p(vars);
    if (c != 0) p.terms_[Exponents(vars, 0)] = c;
    return p;
  }

  static Polynomial variable(std::size_t vars, std::size_t i) {
    Polynomial p(vars);
    Exponents e(vars, 0);
    e.at(i) = 1;
    p.terms_[e] = 1;
    return p;
  }

  /// Parses an expression over the given variable names. Grammar:
  ///   expr   := term (('+' | '-') term)*
  ///   term   := unary ('*' unary)*
  ///   unary  := '-' unary | power
  ///   power  := atom ('^' integer)?
  ///   atom   := integer | name | '(' expr ')'
  static Polynomial parse(std::string_view text, std::span<const std::string> variables);

  std::size_t variable_count() const noexcept { return vars_; }
  const std::map<Exponents, mpz_class>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  Polynomial& operator+=(const Polynomial& o) {
    check(o);
    for (const auto& [e, c] : o.terms_) {
      auto& slot = terms_[e];
      slot += c;
      if (slot == 0) terms_.erase(e);
    }
    return *this;
  }
  Polynomial operator-() const {
    Polynomial p = *this;
    for (auto& [e, c] : p.terms_) c = -c;
    return p;
  }
  Polynomial& operator-=(const Polynomial& o) { return *this += -o; }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check(b);
    Polynomial out(a.vars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(a.vars_);
        for (std::size_t i = 0; i < a.vars_; ++i) e[i] = ea[i] + eb[i];
        auto& slot = out.terms_[e];
        slot += ca * cb;
        if (slot == 0) out.terms_.erase(e);
      }
    }
    return out;
  }

  Polynomial pow(unsigned k) const {
    Polynomial out = constant(vars_, 1);
    for (unsigned i = 0; i < k; ++i) out = out * *this;
    return out;
  }

  Scalar evaluate(const Field& f, std::span<const Scalar> point) const {
    if (point.size() != vars_) {
      throw InvalidInput("point has " + std::to_string(point.size()) + " coordinates, polynomial expects " +
                         std::to_string(vars_));
    }
    Scalar sum(f);
    for (const auto& [e, c] : terms_) {
      Scalar term(f, mpq_class(c));
      for (std::size_t i = 0; i < vars_; ++i) {
        for (unsigned k = 0; k < e[i]; ++k) term *= point[i];
      }
      sum += term;
    }
    return sum;
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void check(const Polynomial& o) const {
    if (o.vars_ != vars_) throw InvalidInput("polynomials over different variable sets");
  }

  std::size_t vars_ = 0;
  std::map<Exponents, mpz_class> terms_;
};

namespace detail {

class PolyParser {
 public:
  PolyParser(std::string text, std::span<const std::string> vars) : text_(std::move(text)), vars_(vars) {}

  Polynomial run() {
    Polynomial p = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw InvalidInput("polynomial '" + text_ + "': " + why + " at offset " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    Polynomial p = term();
    while (true) {
      if (eat('+')) {
        p += term();
      } else if (eat('-')) {
        p -= term();
      } else {
        return p;
      }
    }
  }

  Polynomial term() {
    Polynomial p = unary();
    while (eat('*')) p = p * unary();
    return p;
  }

  Polynomial unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = atom();
    if (eat('^')) {
      skip();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("exponent must be a non-negative integer");
      const unsigned long k = std::stoul(text_.substr(start, pos_ - start));
      if (k > 64) fail("exponent too large");
      return base.pow(static_cast<unsigned>(k));
    }
    return base;
  }

  Polynomial atom() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial p = expr();
      if (!eat(')')) fail("missing ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return Polynomial::constant(vars_.size(), mpz_class(text_.substr(start, pos_ - start)));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name = text_.substr(start, pos_ - start);
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == name) return Polynomial::variable(vars_.size(), i);
      }
      fail("unknown variable '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string text_;
  std::span<const std::string> vars_;
  std::size_t pos_ = 0;
};

// Accept the typographic operators as well as ASCII ones.
inline std::string normalize_operators(std::string_view in) {
  std::string out;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in.substr(i, 3) == "\xE2\x88\x92") {  // U+2212 minus
      out += '-';
      i += 2;
    } else if (in.substr(i, 2) == "\xC2\xB7") {  // U+00B7 middle dot
      out += '*';
      i += 1;
    } else {
      out += in[i];
    }
  }
  return out;
}

}  // namespace detail

inline Polynomial Polynomial::parse(std::string_view text, std::span<const std::string> variables) {
  return detail::PolyParser(detail::normalize_operators(text), variables).run();
}

}  // namespace zsdim
