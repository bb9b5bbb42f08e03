#pragma once

// Exact field arithmetic (rationals and prime fields) and the small amount of
// linear algebra the rest of the library needs: rank, nullspace witnesses,
// span membership.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zsdim/error.hpp"

namespace zsdim {

/// Largest admissible prime modulus. Residues are below 2^32, so a product
/// of two residues fits in 64 bits.
inline constexpr std::uint64_t kMaxPrime = (std::uint64_t{1} << 32) - 1;

class Field {
 public:
  enum class Kind { rational, prime };

  static Field rational() noexcept { return Field(Kind::rational, 0); }

  static Field prime(std::uint64_t p) {
    if (p < 2 || p > kMaxPrime) {
      throw InvalidInput("prime modulus out of range: " + std::to_string(p));
    }
    for (std::uint64_t q = 2; q * q <= p; ++q) {
      if (p % q == 0) throw InvalidInput("modulus is not prime: " + std::to_string(p));
    }
    return Field(Kind::prime, p);
  }

  Kind kind() const noexcept { return kind_; }
  bool is_rational() const noexcept { return kind_ == Kind::rational; }
  bool is_prime() const noexcept { return kind_ == Kind::prime; }
  std::uint64_t modulus() const noexcept { return p_; }

  std::string name() const { return is_rational() ? "Q" : "F_" + std::to_string(p_); }

  friend bool operator==(const Field&, const Field&) = default;

 private:
  Field(Kind k, std::uint64_t p) : kind_(k), p_(p) {}

  Kind kind_;
  std::uint64_t p_;
};

namespace detail {

inline std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
  std::uint64_t result = 1 % p;
  base %= p;
  while (exp > 0) {
    if (exp & 1) result = result * base % p;
    base = base * base % p;
    exp >>= 1;
  }
  return result;
}

inline std::uint64_t reduce_mpz(const mpz_class& v, std::uint64_t p) {
  mpz_class r = v % static_cast<unsigned long>(p);
  if (r < 0) r += static_cast<unsigned long>(p);
  return r.get_ui();
}

}  // namespace detail

/// An exact element of a field. Rationals are kept in lowest terms with a
/// positive denominator; prime-field values are residues in [0, p).
class Scalar {
 public:
  Scalar() : Scalar(Field::rational()) {}
  explicit Scalar(Field f) : field_(f) {}

  Scalar(Field f, long long v) : field_(f) {
    if (f.is_rational()) {
      q_ = mpq_class(static_cast<signed long>(v));
    } else {
      long long m = v % static_cast<long long>(f.modulus());
      if (m < 0) m += static_cast<long long>(f.modulus());
      r_ = static_cast<std::uint64_t>(m);
    }
  }

  /// Over F_p the fraction is mapped through the canonical ring map Z_(p) -> F_p.
  Scalar(Field f, const mpq_class& q) : field_(f) {
    if (f.is_rational()) {
      q_ = q;
      q_.canonicalize();
    } else {
      const std::uint64_t p = f.modulus();
      const std::uint64_t den = detail::reduce_mpz(q.get_den(), p);
      if (den == 0) throw InvalidInput("denominator divisible by field characteristic");
      r_ = detail::reduce_mpz(q.get_num(), p) * detail::mod_pow(den, p - 2, p) % p;
    }
  }

  /// Parses "7", "-3", or "5/12".
  static Scalar parse(Field f, std::string_view text) {
    std::string s(text);
    if (s.empty()) throw InvalidInput("empty scalar literal");
    mpq_class q;
    if (q.set_str(s, 10) != 0 || q.get_den() == 0) {
      throw InvalidInput("bad scalar literal: " + s);
    }
    q.canonicalize();
    return Scalar(f, q);
  }

  const Field& field() const noexcept { return field_; }

  bool is_zero() const { return field_.is_rational() ? sgn(q_) == 0 : r_ == 0; }
  bool is_one() const { return field_.is_rational() ? q_ == 1 : r_ == 1; }

  const mpq_class& rational() const noexcept { return q_; }
  std::uint64_t residue() const noexcept { return r_; }

  Scalar inverse() const {
    if (is_zero()) throw InvalidInput("inverse of zero");
    Scalar out(field_);
    if (field_.is_rational()) {
      out.q_ = 1 / q_;
      out.q_.canonicalize();
    } else {
      out.r_ = detail::mod_pow(r_, field_.modulus() - 2, field_.modulus());
    }
    return out;
  }

  Scalar operator-() const {
    Scalar out(field_);
    if (field_.is_rational()) {
      out.q_ = -q_;
    } else {
      out.r_ = r_ == 0 ? 0 : field_.modulus() - r_;
    }
    return out;
  }

  Scalar& operator+=(const Scalar& o) {
    check(o);
    if (field_.is_rational()) {
      q_ += o.q_;
    } else {
      r_ = (r_ + o.r_) % field_.modulus();
    }
    return *this;
  }
  Scalar& operator-=(const Scalar& o) { return *this += -o; }
  Scalar& operator*=(const Scalar& o) {
    check(o);
    if (field_.is_rational()) {
      q_ *= o.q_;
    } else {
      r_ = r_ * o.r_ % field_.modulus();
    }
    return *this;
  }
  Scalar& operator/=(const Scalar& o) { return *this *= o.inverse(); }

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

  friend bool operator==(const Scalar& a, const Scalar& b) {
    if (a.field_ != b.field_) return false;
    return a.field_.is_rational() ? a.q_ == b.q_ : a.r_ == b.r_;
  }

  std::string str() const { return field_.is_rational() ? q_.get_str() : std::to_string(r_); }

  friend std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

 private:
  void check(const Scalar& o) const {
    if (field_ != o.field_) {
      throw InvalidInput("field mismatch: " + field_.name() + " vs " + o.field_.name());
    }
  }

  Field field_;
  mpq_class q_;
  std::uint64_t r_ = 0;
};

/// A vector of F^d, d >= 1, all entries over one field.
class Vector {
 public:
  Vector(Field f, std::size_t d) : field_(f), entries_(d, Scalar(f)) {
    if (d == 0) throw InvalidInput("vector dimension must be at least 1");
  }

  explicit Vector(std::vector<Scalar> entries) : field_(Field::rational()), entries_(std::move(entries)) {
    if (entries_.empty()) throw InvalidInput("vector dimension must be at least 1");
    field_ = entries_.front().field();
    for (const auto& e : entries_) {
      if (e.field() != field_) throw InvalidInput("vector entries over different fields");
    }
  }

  static Vector of(Field f, std::initializer_list<long long> values) {
    std::vector<Scalar> e;
    e.reserve(values.size());
    for (long long v : values) e.emplace_back(f, v);
    return Vector(std::move(e));
  }

  static Vector unit(Field f, std::size_t d, std::size_t i) {
    Vector v(f, d);
    v.entries_.at(i) = Scalar(f, 1);
    return v;
  }

  const Field& field() const noexcept { return field_; }
  std::size_t size() const noexcept { return entries_.size(); }

  const Scalar& operator[](std::size_t i) const { return entries_[i]; }
  Scalar& operator[](std::size_t i) { return entries_[i]; }

  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  bool is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const Scalar& s) { return s.is_zero(); });
  }

  Vector& operator+=(const Vector& o) {
    check(o);
    for (std::size_t i = 0; i < size(); ++i) entries_[i] += o.entries_[i];
    return *this;
  }
  Vector& operator-=(const Vector& o) {
    check(o);
    for (std::size_t i = 0; i < size(); ++i) entries_[i] -= o.entries_[i];
    return *this;
  }
  Vector& operator*=(const Scalar& s) {
    for (auto& e : entries_) e *= s;
    return *this;
  }
  friend Vector operator+(Vector a, const Vector& b) { return a += b; }
  friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
  friend Vector operator*(const Scalar& s, Vector v) { return v *= s; }

  friend bool operator==(const Vector& a, const Vector& b) {
    return a.field_ == b.field_ && a.entries_ == b.entries_;
  }

  /// Projective normal form: scaled so the first nonzero entry is 1.
  /// The zero vector is returned unchanged.
  Vector canonical() const {
    for (const auto& e : entries_) {
      if (!e.is_zero()) {
        Vector out = *this;
        out *= e.inverse();
        return out;
      }
    }
    return *this;
  }

  /// Lexicographic order on entries; rationals by value, residues by value.
  friend bool operator<(const Vector& a, const Vector& b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      const Scalar& x = a.entries_[i];
      const Scalar& y = b.entries_[i];
      if (x == y) continue;
      if (x.field().is_rational()) return x.rational() < y.rational();
      return x.residue() < y.residue();
    }
    return a.size() < b.size();
  }

  std::string str() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < size(); ++i) os << (i ? "," : "") << entries_[i];
    os << ')';
    return os.str();
  }

  void check(const Vector& o) const {
    if (o.size() != size()) {
      throw InvalidInput("dimension mismatch: " + std::to_string(size()) + " vs " + std::to_string(o.size()));
    }
    if (o.field_ != field_) throw InvalidInput("field mismatch: " + field_.name() + " vs " + o.field_.name());
  }

 private:
  Field field_;
  std::vector<Scalar> entries_;
};

inline Scalar dot(const Vector& a, const Vector& b) {
  a.check(b);
  Scalar sum(a.field());
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

/// Dense row-major matrix; may have zero rows (an empty system).
class Matrix {
 public:
  Matrix(Field f, std::size_t rows, std::size_t cols)
      : field_(f), rows_(rows), cols_(cols), data_(rows * cols, Scalar(f)) {}

  static Matrix from_rows(Field f, std::size_t cols, std::span<const Vector> rows) {
    Matrix m(f, rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) throw InvalidInput("ragged rows: expected width " + std::to_string(cols));
      if (rows[r].field() != f) throw InvalidInput("field mismatch in matrix rows");
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
  }

  /// Convenience for non-empty row lists.
  static Matrix from_rows(std::span<const Vector> rows) {
    if (rows.empty()) throw InvalidInput("cannot infer shape of an empty row list");
    return from_rows(rows.front().field(), rows.front().size(), rows);
  }

  static Matrix identity(Field f, std::size_t n) {
    Matrix m(f, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Scalar(f, 1);
    return m;
  }

  const Field& field() const noexcept { return field_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Scalar& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Scalar& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Vector row(std::size_t r) const {
    std::vector<Scalar> e(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                          data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
    return Vector(std::move(e));
  }

  Matrix transpose() const {
    Matrix t(field_, cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  Vector operator*(const Vector& v) const {
    if (v.size() != cols_) throw InvalidInput("dimension mismatch in matrix-vector product");
    if (rows_ == 0) throw InvalidInput("product of an empty matrix has no vector shape");
    Vector out(field_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      Scalar s(field_);
      for (std::size_t c = 0; c < cols_; ++c) s += (*this)(r, c) * v[c];
      out[r] = s;
    }
    return out;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
  }

 private:
  Field field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Scalar> data_;
};

struct Echelon {
  Matrix reduced;
  std::vector<std::size_t> pivot_cols;
};

/// Reduced row echelon form. The pivot in each column is the first row (at or
/// below the current one) holding a nonzero entry, so output is deterministic.
inline Echelon reduced_row_echelon(Matrix m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t pick = r;
    while (pick < m.rows() && m(pick, c).is_zero()) ++pick;
    if (pick == m.rows()) continue;
    m.swap_rows(r, pick);
    const Scalar inv = m(r, c).inverse();
    for (std::size_t k = c; k < m.cols(); ++k) m(r, k) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c).is_zero()) continue;
      const Scalar factor = m(i, c);
      for (std::size_t k = c; k < m.cols(); ++k) m(i, k) -= factor * m(r, k);
    }
    pivots.push_back(c);
    ++r;
  }
  return Echelon{std::move(m), std::move(pivots)};
}

inline std::size_t rank(const Matrix& m) { return reduced_row_echelon(m).pivot_cols.size(); }

inline std::size_t rank(std::span<const Vector> vs) {
  if (vs.empty()) return 0;
  return rank(Matrix::from_rows(vs));
}

/// A nonzero b with m*b = 0 in projective normal form, or nullopt when m has
/// full column rank. Uses the lowest free column of the echelon form.
inline std::optional<Vector> nullspace_witness(const Matrix& m) {
  if (m.cols() == 0) return std::nullopt;
  const Echelon e = reduced_row_echelon(m);
  if (e.pivot_cols.size() == m.cols()) return std::nullopt;
  std::size_t free_col = 0;
  for (std::size_t pc : e.pivot_cols) {
    if (pc != free_col) break;
    ++free_col;
  }
  Vector b(m.field(), m.cols());
  b[free_col] = Scalar(m.field(), 1);
  for (std::size_t r = 0; r < e.pivot_cols.size(); ++r) b[e.pivot_cols[r]] = -e.reduced(r, free_col);
  return b.canonical();
}

/// Basis of the nullspace, one vector per free column (not canonicalized).
inline std::vector<Vector> nullspace_basis(const Matrix& m) {
  const Echelon e = reduced_row_echelon(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (std::size_t pc : e.pivot_cols) is_pivot[pc] = true;
  std::vector<Vector> basis;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (is_pivot[j]) continue;
    Vector b(m.field(), m.cols());
    b[j] = Scalar(m.field(), 1);
    for (std::size_t r = 0; r < e.pivot_cols.size(); ++r) b[e.pivot_cols[r]] = -e.reduced(r, j);
    basis.push_back(std::move(b));
  }
  return basis;
}

inline bool independent(std::span<const Vector> vs) { return rank(vs) == vs.size(); }

/// v in Span(basis), by rank comparison. The empty basis spans {0}.
inline bool in_span(const Vector& v, std::span<const Vector> basis) {
  for (const auto& b : basis) v.check(b);
  if (v.is_zero()) return true;
  if (basis.empty()) return false;
  std::vector<Vector> all(basis.begin(), basis.end());
  const std::size_t r = rank(all);
  all.push_back(v);
  return rank(all) == r;
}

/// Incrementally maintained row space in reduced echelon form; answers many
/// membership queries against one span without re-eliminating.
class RowSpace {
 public:
  RowSpace(Field f, std::size_t dim) : field_(f), dim_(dim) {}

  const Field& field() const noexcept { return field_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t rank() const noexcept { return rows_.size(); }
  bool full() const noexcept { return rows_.size() == dim_; }

  /// Reduces v against the stored rows; the result is zero iff v is in the span.
  Vector reduce(Vector v) const {
    if (v.size() != dim_ || v.field() != field_) throw InvalidInput("vector does not match the row space");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Scalar c = v[pivots_[i]];
      if (c.is_zero()) continue;
      for (std::size_t k = 0; k < dim_; ++k) {
        if (!rows_[i][k].is_zero()) v[k] -= c * rows_[i][k];
      }
    }
    return v;
  }

  bool contains(const Vector& v) const { return reduce(v).is_zero(); }

  /// Adds v; returns false when v was already in the span.
  bool add(const Vector& v) {
    Vector r = reduce(v);
    std::size_t pc = 0;
    while (pc < dim_ && r[pc].is_zero()) ++pc;
    if (pc == dim_) return false;
    r *= r[pc].inverse();
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Scalar c = rows_[i][pc];
      if (c.is_zero()) continue;
      for (std::size_t k = 0; k < dim_; ++k) rows_[i][k] -= c * r[k];
    }
    rows_.push_back(std::move(r));
    pivots_.push_back(pc);
    return true;
  }

 private:
  Field field_;
  std::size_t dim_;
  std::vector<Vector> rows_;
  std::vector<std::size_t> pivots_;
};

inline bool same_span(std::span<const Vector> a, std::span<const Vector> b) {
  const std::size_t ra = rank(a);
  if (ra != rank(b)) return false;
  std::vector<Vector> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  return rank(all) == ra;
}

}  // namespace zsdim
