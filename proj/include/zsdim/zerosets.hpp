#pragma once

// Function tuples f : X -> F^d, their zero sets Z_{f,a} = {c : a . f(c) = 0},
// linear-independence tests, and exact enumeration of the trace of the family
// of all zero sets on a finite sample.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "zsdim/error.hpp"
#include "zsdim/exactalg.hpp"
#include "zsdim/polynomial.hpp"
#include "zsdim/setsystem.hpp"

namespace zsdim {

/// Opaque point descriptor: an integer, an integer pair, or an explicit
/// vector, all stored as a coordinate list interpreted by the evaluator.
using Point = std::vector<Scalar>;

inline std::string point_label(const Point& p) {
  if (p.size() == 1) return p.front().str();
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + p[i].str();
  return s + ")";
}

inline Point point_of(Field f, std::initializer_list<long long> coords) {
  Point p;
  for (long long c : coords) p.emplace_back(f, c);
  return p;
}

inline Point point_of(const Vector& v) { return Point(v.begin(), v.end()); }

/// A deterministic, restartable enumeration of points. open() starts a fresh
/// pass; the returned generator yields nullopt once a finite stream ends.
class PointStream {
 public:
  using Next = std::function<std::optional<Point>()>;

  PointStream(std::function<Next()> open, std::string description)
      : open_(std::move(open)), description_(std::move(description)) {}

  Next open() const { return open_(); }
  const std::string& description() const noexcept { return description_; }

  std::vector<Point> prefix(std::size_t n) const {
    std::vector<Point> out;
    auto next = open();
    while (out.size() < n) {
      auto p = next();
      if (!p) break;
      out.push_back(std::move(*p));
    }
    return out;
  }

  /// 0, 1, 2, ...
  static PointStream naturals(Field f) {
    return PointStream(
        [f]() -> Next {
          auto i = std::make_shared<long long>(0);
          return [f, i]() -> std::optional<Point> { return Point{Scalar(f, (*i)++)}; };
        },
        "naturals");
  }

  /// Z^k in growing max-norm shells around the origin, lexicographic within
  /// each shell.
  static PointStream integer_shells(Field f, std::size_t vars) {
    if (vars == 0) throw InvalidInput("point arity must be positive");
    struct State {
      long long radius = 0;
      std::vector<long long> coords;
      bool started = false;
    };
    return PointStream(
        [f, vars]() -> Next {
          auto st = std::make_shared<State>();
          return [f, vars, st]() -> std::optional<Point> {
            while (true) {
              if (!st->started) {
                st->started = true;
                st->coords.assign(vars, -st->radius);
              } else {
                std::size_t pos = vars;
                while (pos > 0) {
                  --pos;
                  if (st->coords[pos] < st->radius) {
                    ++st->coords[pos];
                    std::fill(st->coords.begin() + static_cast<std::ptrdiff_t>(pos) + 1, st->coords.end(),
                              -st->radius);
                    break;
                  }
                  if (pos == 0) {
                    ++st->radius;
                    st->coords.assign(vars, -st->radius);
                    break;
                  }
                }
              }
              long long norm = 0;
              for (long long c : st->coords) norm = std::max(norm, c < 0 ? -c : c);
              if (norm == st->radius) {
                Point p;
                for (long long c : st->coords) p.emplace_back(f, c);
                return p;
              }
            }
          };
        },
        "integer shells in Z^" + std::to_string(vars));
  }

  /// All of F_p^k in lexicographic order.
  static PointStream field_domain(Field f, std::size_t vars) {
    if (!f.is_prime()) throw InvalidInput("field_domain needs a prime field");
    if (vars == 0) throw InvalidInput("point arity must be positive");
    return PointStream(
        [f, vars]() -> Next {
          auto digits = std::make_shared<std::vector<std::uint64_t>>(vars, 0);
          auto done = std::make_shared<bool>(false);
          return [f, vars, digits, done]() -> std::optional<Point> {
            if (*done) return std::nullopt;
            Point p;
            for (std::uint64_t dgt : *digits) p.emplace_back(f, static_cast<long long>(dgt));
            std::size_t pos = vars;
            while (true) {
              if (pos == 0) {
                *done = true;
                break;
              }
              --pos;
              if (++(*digits)[pos] < f.modulus()) break;
              (*digits)[pos] = 0;
            }
            return p;
          };
        },
        f.name() + "^" + std::to_string(vars) + " lexicographic");
  }

  static PointStream explicit_points(std::vector<Point> points) {
    auto shared = std::make_shared<const std::vector<Point>>(std::move(points));
    return PointStream(
        [shared]() -> Next {
          auto i = std::make_shared<std::size_t>(0);
          return [shared, i]() -> std::optional<Point> {
            if (*i >= shared->size()) return std::nullopt;
            return (*shared)[(*i)++];
          };
        },
        "explicit list of " + std::to_string(shared->size()) + " points");
  }

  static PointStream default_for(Field f, std::size_t vars) {
    if (f.is_prime()) return field_domain(f, vars);
    return vars == 1 ? naturals(f) : integer_shells(f, vars);
  }

 private:
  std::function<Next()> open_;
  std::string description_;
};

/// f : X -> F^d presented as an evaluator plus a point stream over X.
struct Instance {
  std::string name;
  Field field = Field::rational();
  std::size_t dim = 1;
  std::function<Vector(const Point&)> evaluator;
  PointStream stream = PointStream::naturals(Field::rational());
  /// Symbolic form, present for polynomial families.
  std::vector<std::string> variables;
  std::vector<Polynomial> polynomials;

  bool is_polynomial() const noexcept { return !polynomials.empty(); }

  Vector image(const Point& p) const {
    Vector v = evaluator(p);
    if (v.size() != dim || v.field() != field) {
      throw InvalidInput("evaluator of '" + name + "' returned a vector outside " + field.name() + "^" +
                         std::to_string(dim));
    }
    return v;
  }
};

inline Instance polynomial_instance(std::string name, Field f, std::vector<std::string> variables,
                                    const std::vector<std::string>& expressions,
                                    std::optional<PointStream> stream = std::nullopt) {
  if (expressions.empty()) throw InvalidInput("a function tuple needs at least one function");
  if (variables.empty()) throw InvalidInput("a polynomial family needs at least one variable");
  Instance inst;
  inst.name = std::move(name);
  inst.field = f;
  inst.dim = expressions.size();
  inst.variables = std::move(variables);
  for (const auto& e : expressions) inst.polynomials.push_back(Polynomial::parse(e, inst.variables));
  inst.stream = stream ? *stream : PointStream::default_for(f, inst.variables.size());
  auto polys = inst.polynomials;
  inst.evaluator = [f, polys](const Point& p) {
    std::vector<Scalar> out;
    out.reserve(polys.size());
    for (const auto& poly : polys) out.push_back(poly.evaluate(f, p));
    return Vector(std::move(out));
  };
  return inst;
}

/// (1, x, ..., x^{d-1}).
inline Instance moment_curve(Field f, std::size_t d) {
  if (d == 0) throw InvalidInput("dimension must be at least 1");
  std::vector<std::string> exprs;
  for (std::size_t i = 0; i < d; ++i) exprs.push_back(i == 0 ? "1" : "x^" + std::to_string(i));
  return polynomial_instance("moment_curve(" + std::to_string(d) + ") over " + f.name(), f, {"x"}, exprs);
}

/// (x^2, xy, y^2, x, y, 1): zero sets are the conic sections.
inline Instance conics(Field f = Field::rational()) {
  return polynomial_instance("conics over " + f.name(), f, {"x", "y"}, {"x^2", "x*y", "y^2", "x", "y", "1"});
}

/// (x^2, y^2, x, y, 1): carrier of the axes-aligned ellipses.
inline Instance ellipse_carrier(Field f = Field::rational()) {
  return polynomial_instance("ellipse_carrier over " + f.name(), f, {"x", "y"}, {"x^2", "y^2", "x", "y", "1"});
}

/// Identity embedding of an explicit list of vectors.
inline Instance explicit_vectors(std::string name, Field f, std::size_t d, std::vector<Vector> points) {
  Instance inst;
  inst.name = std::move(name);
  inst.field = f;
  inst.dim = d;
  std::vector<Point> pts;
  for (const auto& v : points) {
    if (v.size() != d || v.field() != f) throw InvalidInput("explicit point outside " + f.name() + "^" + std::to_string(d));
    pts.push_back(point_of(v));
  }
  inst.stream = PointStream::explicit_points(std::move(pts));
  inst.evaluator = [](const Point& p) { return Vector(p); };
  return inst;
}

/// g(j) = j + 1, the injection N -> F \ {0} used by the plane-union family.
inline Scalar plane_union_gain(Field f, std::size_t j) {
  if (f.is_prime() && j + 1 >= f.modulus()) {
    throw InvalidInput("g(j) = j+1 is not injective into " + f.name() + "\\{0} for j = " + std::to_string(j));
  }
  return Scalar(f, static_cast<long long>(j) + 1);
}

/// c_{i,j} = e_0 + g(j) e_{i+1}, a point of the plane span{e_0, e_{i+1}}.
inline Vector plane_union_point(Field f, std::size_t d, std::size_t i, std::size_t j) {
  if (d < 3) throw InvalidInput("the plane-union family needs d >= 3");
  if (i + 1 >= d) throw InvalidInput("plane index out of range");
  Vector v = Vector::unit(f, d, 0);
  v[i + 1] = plane_union_gain(f, j);
  return v;
}

/// X = union of the planes span{e_0, e_{i+1}}, i < d-1, with f the identity
/// embedding. The stream yields c_{i,j} for j = 0, 1, ... (i fastest); over
/// F_p it stops at j = p - 2.
inline Instance high_vcden(Field f, std::size_t d) {
  if (d < 3) throw InvalidInput("the plane-union family needs d >= 3");
  Instance inst;
  inst.name = "high_vcden(" + std::to_string(d) + ") over " + f.name();
  inst.field = f;
  inst.dim = d;
  inst.evaluator = [](const Point& p) { return Vector(p); };
  inst.stream = PointStream(
      [f, d]() -> PointStream::Next {
        auto k = std::make_shared<std::size_t>(0);
        return [f, d, k]() -> std::optional<Point> {
          const std::size_t j = *k / (d - 1);
          const std::size_t i = *k % (d - 1);
          if (f.is_prime() && j + 1 >= f.modulus()) return std::nullopt;
          ++*k;
          return point_of(plane_union_point(f, d, i, j));
        };
      },
      "c_{i,j} = e0 + (j+1) e_{i+1}, j-major");
  return inst;
}

/// The finite sample a trace family lives on, with cached images.
struct Sample {
  std::vector<Point> points;
  std::vector<Vector> images;

  std::size_t size() const noexcept { return points.size(); }

  GroundSet ground() const {
    std::vector<std::string> labels;
    for (const auto& p : points) labels.push_back(point_label(p));
    return GroundSet(std::move(labels));
  }
};

inline Sample make_sample(const Instance& inst, std::vector<Point> points) {
  if (points.size() > kMaxWidth) throw ResourceLimit("sample larger than " + std::to_string(kMaxWidth) + " points");
  std::set<std::string> seen;
  Sample s;
  for (auto& p : points) {
    if (!seen.insert(point_label(p)).second) throw InvalidInput("duplicate sample point " + point_label(p));
    s.images.push_back(inst.image(p));
    s.points.push_back(std::move(p));
  }
  return s;
}

inline Sample stream_sample(const Instance& inst, std::size_t n) {
  auto pts = inst.stream.prefix(n);
  if (pts.size() < n) throw InvalidInput("stream of '" + inst.name + "' has fewer than " + std::to_string(n) + " points");
  return make_sample(inst, std::move(pts));
}

/// Membership mask of Z_{f,a} on the sample.
inline Mask trace_of(const Sample& sample, const Vector& a) {
  Mask m = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (dot(a, sample.images[i]).is_zero()) m |= Mask{1} << i;
  }
  return m;
}

struct ZeroSet {
  Mask members = 0;
  Vector witness;
};

inline ZeroSet zero_set(const Instance& inst, const Sample& sample, const Vector& a) {
  if (a.size() != inst.dim || a.field() != inst.field) throw InvalidInput("coefficient vector outside F^d");
  if (a.is_zero()) throw InvalidInput("zero sets need a nonzero coefficient vector");
  return ZeroSet{trace_of(sample, a), a.canonical()};
}

enum class EnumerationMethod { projective_bruteforce, flat_lattice };

/// The trace of C_f on a sample; every set carries its witness.
struct ZeroSetFamily {
  Sample sample;
  SetFamily family;
  EnumerationMethod method;

  std::vector<ZeroSet> zero_sets() const {
    std::vector<ZeroSet> out;
    for (std::size_t i = 0; i < family.size(); ++i) out.push_back(ZeroSet{family.sets()[i], *family.witness(i)});
    return out;
  }
};

/// Every witness reproduces its membership bits.
inline bool witnesses_verify(const ZeroSetFamily& z) {
  for (std::size_t i = 0; i < z.family.size(); ++i) {
    const auto& w = z.family.witness(i);
    if (!w || w->is_zero() || trace_of(z.sample, *w) != z.family.sets()[i]) return false;
  }
  return true;
}

namespace detail {

inline ZeroSetFamily assemble(const Sample& sample, std::vector<ZeroSet> found, EnumerationMethod method) {
  std::sort(found.begin(), found.end(), [](const ZeroSet& a, const ZeroSet& b) { return a.witness < b.witness; });
  SetFamily fam(sample.ground());
  for (auto& z : found) fam.insert(z.members, std::move(z.witness));
  return ZeroSetFamily{sample, std::move(fam), method};
}

/// Calls fn(v) for every projective representative of F_p^k \ {0}, ordered by
/// leading position, then lexicographically. Stops early if fn returns true.
template <typename Fn>
bool for_each_projective(Field f, std::size_t k, Fn&& fn) {
  const std::uint64_t p = f.modulus();
  for (std::size_t lead = 0; lead < k; ++lead) {
    const std::size_t free = k - lead - 1;
    std::vector<std::uint64_t> digits(free, 0);
    while (true) {
      Vector v(f, k);
      v[lead] = Scalar(f, 1);
      for (std::size_t t = 0; t < free; ++t) v[lead + 1 + t] = Scalar(f, static_cast<long long>(digits[t]));
      if (fn(v)) return true;
      std::size_t pos = free;
      bool carried = true;
      while (carried && pos > 0) {
        --pos;
        carried = ++digits[pos] == p;
        if (carried) digits[pos] = 0;
      }
      if (carried) break;
    }
  }
  return false;
}

inline double int_pow(double b, std::size_t e) {
  double r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace detail

/// Bound on p^d for exhaustive projective enumeration.
inline constexpr double kMaxProjectiveSearch = 1 << 20;
/// Bound on the number of flats visited by the lattice enumerator.
inline constexpr std::size_t kMaxFlats = 20000;

/// Trace family by trying every projective coefficient vector; finite fields only.
inline ZeroSetFamily enumerate_family_bruteforce(const Instance& inst, const Sample& sample) {
  if (!inst.field.is_prime()) throw InvalidInput("brute-force enumeration needs a finite field");
  if (detail::int_pow(static_cast<double>(inst.field.modulus()), inst.dim) > kMaxProjectiveSearch) {
    throw ResourceLimit(inst.field.name() + "^" + std::to_string(inst.dim) + " is too large to enumerate");
  }
  std::map<Mask, Vector> first;
  detail::for_each_projective(inst.field, inst.dim, [&](const Vector& a) {
    first.try_emplace(trace_of(sample, a), a);
    return false;
  });
  std::vector<ZeroSet> found;
  for (auto& [m, a] : first) found.push_back(ZeroSet{m, a});
  return detail::assemble(sample, std::move(found), EnumerationMethod::projective_bruteforce);
}

/// Trace family through the intersection lattice of the hyperplanes
/// H_x = f(x)^perp in coefficient space. A flat L is identified by its closed
/// point set T(L) = {x : L inside H_x}; T(L) is a trace iff some a in L avoids
/// every H_y with y outside T(L).
inline ZeroSetFamily enumerate_family_flats(const Instance& inst, const Sample& sample) {
  const std::size_t n = sample.size();
  const std::size_t d = inst.dim;
  const Field f = inst.field;

  auto closure = [&](Mask generators) {
    RowSpace rs(f, d);
    for (std::size_t i = 0; i < n; ++i) {
      if ((generators >> i) & 1) rs.add(sample.images[i]);
    }
    Mask closed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (rs.contains(sample.images[i])) closed |= Mask{1} << i;
    }
    return std::pair{closed, rs.rank()};
  };

  auto find_witness = [&](Mask closed) -> std::optional<Vector> {
    std::vector<Vector> rows;
    std::vector<const Vector*> outside;
    for (std::size_t i = 0; i < n; ++i) {
      if ((closed >> i) & 1) {
        rows.push_back(sample.images[i]);
      } else {
        outside.push_back(&sample.images[i]);
      }
    }
    const std::vector<Vector> basis = nullspace_basis(Matrix::from_rows(f, d, rows));
    const std::size_t k = basis.size();
    auto combine = [&](const std::vector<Scalar>& t) {
      Vector a(f, d);
      for (std::size_t i = 0; i < k; ++i) a += t[i] * basis[i];
      return a;
    };
    auto avoids = [&](const Vector& a) {
      if (a.is_zero()) return false;
      return std::all_of(outside.begin(), outside.end(), [&](const Vector* y) { return !dot(a, *y).is_zero(); });
    };
    // Points (1, m, m^2, ...) of the moment curve meet each hyperplane of the
    // parameter space at most k-1 times, so this succeeds over an infinite field.
    const std::size_t tries = outside.size() * (k > 0 ? k - 1 : 0) + 1;
    const std::size_t limit = f.is_prime() ? std::min<std::size_t>(tries, f.modulus()) : tries;
    for (std::size_t m = 0; m < limit; ++m) {
      std::vector<Scalar> t;
      Scalar power(f, 1);
      for (std::size_t i = 0; i < k; ++i) {
        t.push_back(power);
        power *= Scalar(f, static_cast<long long>(m));
      }
      Vector a = combine(t);
      if (avoids(a)) return a.canonical();
    }
    if (f.is_rational()) throw Error("internal: moment-curve witness search failed over Q");
    if (detail::int_pow(static_cast<double>(f.modulus()), k) > kMaxProjectiveSearch) {
      throw ResourceLimit("flat of dimension " + std::to_string(k) + " too large to search over " + f.name());
    }
    std::optional<Vector> hit;
    detail::for_each_projective(f, k, [&](const Vector& t) {
      Vector a = combine(std::vector<Scalar>(t.begin(), t.end()));
      if (avoids(a)) {
        hit = a.canonical();
        return true;
      }
      return false;
    });
    return hit;
  };

  std::vector<ZeroSet> found;
  std::unordered_set<Mask> visited;
  std::queue<Mask> frontier;
  const auto [root, root_rank] = closure(0);
  if (root_rank != 0) throw Error("internal: closure of the empty set has positive rank");
  visited.insert(root);
  frontier.push(root);
  while (!frontier.empty()) {
    const Mask t = frontier.front();
    frontier.pop();
    if (auto a = find_witness(t)) found.push_back(ZeroSet{t, std::move(*a)});
    for (std::size_t x = 0; x < n; ++x) {
      if ((t >> x) & 1) continue;
      const auto [next, r] = closure(t | (Mask{1} << x));
      if (r == d || visited.count(next)) continue;
      if (visited.size() >= kMaxFlats) {
        throw ResourceLimit("hyperplane lattice exceeds " + std::to_string(kMaxFlats) + " flats");
      }
      visited.insert(next);
      frontier.push(next);
    }
  }
  return detail::assemble(sample, std::move(found), EnumerationMethod::flat_lattice);
}

/// Brute force on small finite fields, the lattice otherwise.
inline ZeroSetFamily enumerate_family(const Instance& inst, const Sample& sample) {
  if (inst.field.is_prime() &&
      detail::int_pow(static_cast<double>(inst.field.modulus()), inst.dim) <= kMaxProjectiveSearch) {
    return enumerate_family_bruteforce(inst, sample);
  }
  return enumerate_family_flats(inst, sample);
}

struct IndependenceVerdict {
  enum class Kind { independent, dependent, inconclusive };
  Kind kind = Kind::inconclusive;
  /// independent: d points whose images form a basis.
  std::vector<Point> points;
  /// dependent / inconclusive: a nonzero a with a . f(c) = 0 on every point seen.
  std::optional<Vector> annihilator;
  std::size_t scanned = 0;
  std::size_t image_rank = 0;
  bool stream_exhausted = false;
};

namespace detail {

/// True when sum a_i f_i is the zero polynomial (Q only: over infinite
/// fields polynomial identity and function identity agree).
inline bool annihilates_symbolically(const Instance& inst, const Vector& a) {
  if (!inst.is_polynomial() || !inst.field.is_rational()) return false;
  mpz_class lcm = 1;
  for (const auto& s : a) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), s.rational().get_den_mpz_t());
  const std::size_t vars = inst.variables.size();
  Polynomial sum(vars);
  for (std::size_t i = 0; i < inst.dim; ++i) {
    const mpq_class c = a[i].rational() * lcm;
    sum += Polynomial::constant(vars, c.get_num()) * inst.polynomials[i];
  }
  return sum.is_zero();
}

}  // namespace detail

/// Scans the stream for d points with independent images. A rank deficit is
/// reported as dependent only when it is certified: the stream (hence X) was
/// exhausted, or the annihilating combination vanishes as a polynomial.
inline IndependenceVerdict linearly_independent(const Instance& inst, std::size_t budget) {
  if (budget < inst.dim) throw InvalidInput("budget must be at least d");
  IndependenceVerdict v;
  RowSpace rs(inst.field, inst.dim);
  std::vector<Vector> kept;
  auto next = inst.stream.open();
  while (v.scanned < budget) {
    auto p = next();
    if (!p) {
      v.stream_exhausted = true;
      break;
    }
    ++v.scanned;
    Vector img = inst.image(*p);
    if (rs.add(img)) {
      kept.push_back(img);
      v.points.push_back(*p);
      if (rs.full()) break;
    }
  }
  v.image_rank = rs.rank();
  if (rs.full()) {
    v.kind = IndependenceVerdict::Kind::independent;
    return v;
  }
  if (v.stream_exhausted && v.scanned < inst.dim) {
    throw InvalidInput("stream of '" + inst.name + "' has only " + std::to_string(v.scanned) + " points, below d = " +
                       std::to_string(inst.dim));
  }
  v.points.clear();
  v.annihilator = nullspace_witness(Matrix::from_rows(inst.field, inst.dim, kept));
  const bool certified = v.stream_exhausted || detail::annihilates_symbolically(inst, *v.annihilator);
  v.kind = certified ? IndependenceVerdict::Kind::dependent : IndependenceVerdict::Kind::inconclusive;
  return v;
}

/// The three equivalent characterizations of independence, each decided by
/// its own route. nullopt means the route could not decide within budget.
struct IndependenceConditions {
  /// (1) f_0..f_{d-1} independent as functions X -> F.
  std::optional<bool> functions_independent;
  /// (2) every nonzero a has some c with a . f(c) != 0.
  std::optional<bool> no_vanishing_combination;
  /// (3) f(X) lies in no proper subspace of F^d.
  std::optional<bool> image_spans;
  std::optional<Vector> vanishing_combination;

  bool consistent() const {
    std::vector<bool> known;
    for (const auto& c : {functions_independent, no_vanishing_combination, image_spans}) {
      if (c) known.push_back(*c);
    }
    return std::adjacent_find(known.begin(), known.end(), std::not_equal_to<>()) == known.end();
  }
};

inline IndependenceConditions independence_conditions(const Instance& inst, std::size_t budget) {
  IndependenceConditions out;
  const std::vector<Point> prefix = inst.stream.prefix(budget + 1);
  const bool finite = prefix.size() <= budget;
  const std::size_t used = std::min(prefix.size(), budget);
  std::vector<Vector> images;
  for (std::size_t i = 0; i < used; ++i) images.push_back(inst.image(prefix[i]));

  // (1) Functions as vectors: the |X| x d value table when X is finite, the
  // monomial coefficient matrix for polynomials over Q.
  if (finite || !(inst.is_polynomial() && inst.field.is_rational())) {
    Matrix table(inst.field, images.size(), inst.dim);
    for (std::size_t r = 0; r < images.size(); ++r)
      for (std::size_t c = 0; c < inst.dim; ++c) table(r, c) = images[r][c];
    const std::size_t r = rank(table.transpose());
    if (r == inst.dim) {
      out.functions_independent = true;
    } else if (finite) {
      out.functions_independent = false;
    }
  } else {
    std::set<Polynomial::Exponents> monomials;
    for (const auto& p : inst.polynomials)
      for (const auto& [e, c] : p.terms()) monomials.insert(e);
    Matrix coeffs(inst.field, monomials.size(), inst.dim);
    std::size_t row = 0;
    for (const auto& e : monomials) {
      for (std::size_t c = 0; c < inst.dim; ++c) {
        auto it = inst.polynomials[c].terms().find(e);
        if (it != inst.polynomials[c].terms().end()) coeffs(row, c) = Scalar(inst.field, mpq_class(it->second));
      }
      ++row;
    }
    out.functions_independent = rank(coeffs) == inst.dim;
  }

  // (2) Look for a nonzero a vanishing on all of X: exhaustively over a finite
  // field with finite X, otherwise from the orthogonal complement of the sampled images.
  if (finite && inst.field.is_prime() &&
      detail::int_pow(static_cast<double>(inst.field.modulus()), inst.dim) <= kMaxProjectiveSearch) {
    std::optional<Vector> hit;
    detail::for_each_projective(inst.field, inst.dim, [&](const Vector& a) {
      for (const auto& img : images) {
        if (!dot(a, img).is_zero()) return false;
      }
      hit = a;
      return true;
    });
    out.no_vanishing_combination = !hit.has_value();
    out.vanishing_combination = hit;
  } else {
    RowSpace rs(inst.field, inst.dim);
    std::vector<Vector> basis;
    for (const auto& img : images) {
      if (rs.add(img)) basis.push_back(img);
    }
    if (rs.full()) {
      out.no_vanishing_combination = true;
    } else {
      Vector a = *nullspace_witness(Matrix::from_rows(inst.field, inst.dim, basis));
      if (finite || detail::annihilates_symbolically(inst, a)) {
        out.no_vanishing_combination = false;
        out.vanishing_combination = a;
      }
    }
  }

  // (3) Rank of the sampled image; a deficit is decisive only once X is exhausted
  // or a vanishing combination was certified.
  const std::size_t r = rank(Matrix::from_rows(inst.field, inst.dim, images));
  if (r == inst.dim) {
    out.image_spans = true;
  } else if (finite || out.vanishing_combination) {
    out.image_spans = false;
  }
  return out;
}

/// Blocks of the partition used when f(X) lies in finitely many lines.
struct DensityZeroReport {
  std::vector<Mask> blocks;  // S_i = f^{-1}(V_i \ {0}), one per distinct line
  Mask zero_block = 0;       // S_k = f^{-1}(0)
  std::size_t family_size = 0;
  std::uint64_t bound = 0;   // 2^k
  bool within_bound = false;
  bool traces_are_block_unions = false;
  ZeroSetFamily family;
};

inline DensityZeroReport density_zero_partition(const Instance& inst, const Sample& sample,
                                                const std::vector<std::vector<Vector>>& lines) {
  std::vector<std::vector<Vector>> distinct;
  for (const auto& line : lines) {
    if (line.empty() || rank(line) != 1) throw InvalidInput("each line must span a 1-dimensional subspace");
    const bool repeat = std::any_of(distinct.begin(), distinct.end(),
                                    [&](const std::vector<Vector>& l) { return same_span(l, line); });
    if (!repeat) distinct.push_back(line);
  }
  DensityZeroReport rep{std::vector<Mask>(distinct.size(), 0), 0, 0, 0, false, false,
                        ZeroSetFamily{sample, SetFamily(sample.ground()), EnumerationMethod::flat_lattice}};
  for (std::size_t x = 0; x < sample.size(); ++x) {
    const Vector& img = sample.images[x];
    if (img.is_zero()) {
      rep.zero_block |= Mask{1} << x;
      continue;
    }
    bool covered = false;
    for (std::size_t i = 0; i < distinct.size() && !covered; ++i) {
      if (in_span(img, distinct[i])) {
        rep.blocks[i] |= Mask{1} << x;
        covered = true;
      }
    }
    if (!covered) throw InvalidInput("image of " + point_label(sample.points[x]) + " lies on none of the lines");
  }
  rep.family = enumerate_family(inst, sample);
  rep.family_size = rep.family.family.size();
  rep.bound = std::uint64_t{1} << distinct.size();
  rep.within_bound = rep.family_size <= rep.bound;
  rep.traces_are_block_unions = std::all_of(rep.family.family.sets().begin(), rep.family.family.sets().end(), [&](Mask t) {
    if ((t & rep.zero_block) != rep.zero_block) return false;
    return std::all_of(rep.blocks.begin(), rep.blocks.end(),
                       [&](Mask b) { return (t & b) == 0 || (t & b) == b; });
  });
  return rep;
}

}  // namespace zsdim
