#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "caustica/bipoly.hpp"
#include "caustica/catalog.hpp"
#include "caustica/error.hpp"
#include "caustica/unipoly.hpp"

namespace caustica {

/// Polynomial in homogeneous coordinates (X, Y, U).
class TriPoly {
 public:
  using Exponent = std::array<int, 3>;
  using TermMap = std::map<Exponent, cplx>;

  TriPoly& add_term(int i, int j, int k, cplx c) {
    if (c == cplx(0.0)) return *this;
    auto [it, inserted] = terms_.try_emplace(Exponent{i, j, k}, c);
    if (!inserted) {
      it->second += c;
      if (it->second == cplx(0.0)) terms_.erase(it);
    }
    return *this;
  }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  cplx coeff(int i, int j, int k) const {
    auto it = terms_.find(Exponent{i, j, k});
    return it == terms_.end() ? cplx(0.0) : it->second;
  }

  /// The common weighted degree of every term, or -1 if the terms disagree (or p is zero).
  int homogeneous_degree(const Weights& w) const {
    int d = -1;
    for (const auto& [e, c] : terms_) {
      const int td = w.a0 * e[0] + w.a1 * e[1] + w.a2 * e[2];
      if (d == -1) d = td;
      else if (td != d) return -1;
    }
    return d;
  }

  cplx eval(cplx X, cplx Y, cplx U) const {
    cplx acc = 0.0;
    for (const auto& [e, c] : terms_) acc += c * std::pow(X, e[0]) * std::pow(Y, e[1]) * std::pow(U, e[2]);
    return acc;
  }

  /// Setting U = 1 recovers an affine polynomial.
  BiPoly dehomogenize() const {
    BiPoly p;
    for (const auto& [e, c] : terms_) p.add_term(e[0], e[1], c);
    return p;
  }

  /// The restriction to the line at infinity U = 0.
  TriPoly at_infinity() const {
    TriPoly r;
    for (const auto& [e, c] : terms_)
      if (e[2] == 0) r.add_term(e[0], e[1], 0, c);
    return r;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      cplx shown = c;
      if (!first) {
        if (c.imag() == 0.0 && c.real() < 0) {
          out += " - ";
          shown = -c;
        } else {
          out += " + ";
        }
      }
      std::string powers;
      detail::append_power(powers, "X", e[0]);
      detail::append_power(powers, "Y", e[1]);
      detail::append_power(powers, "U", e[2]);
      if (powers.empty()) out += detail::format_coeff(shown);
      else if (shown == cplx(1.0)) out += powers;
      else if (shown == cplx(-1.0)) out += "-" + powers;
      else out += detail::format_coeff(shown) + "*" + powers;
      first = false;
    }
    return out;
  }

  friend bool operator==(const TriPoly&, const TriPoly&) = default;

 private:
  TermMap terms_;
};

struct WeightedHomogPair {
  TriPoly q1;
  TriPoly q2;
  Weights weights;
  int d1 = 0;
  int d2 = 0;
};

inline int weighted_degree(const BiPoly& p, const Weights& w) {
  if (p.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "weighted degree of the zero polynomial");
  return p.weighted_degree(w.a0, w.a1);
}

/// x^i y^j of weighted degree e becomes X^i Y^j U^(d-e); the constant `shift` becomes shift*U^d.
inline TriPoly homogenize(const BiPoly& p, cplx shift, const Weights& w, int d) {
  TriPoly q;
  for (const auto& [m, c] : p.terms()) {
    const int e = w.a0 * m.i + w.a1 * m.j;
    if (e > d) throw Error(ErrorCode::InvalidArgument, "term degree exceeds homogenizing degree");
    q.add_term(m.i, m.j, (d - e) / w.a2, c);
  }
  q.add_term(0, 0, d / w.a2, shift);
  return q;
}

/// The shifted system (f1 - s1, f2 - s2) lifted to WP(a0, a1, 1).
inline WeightedHomogPair homogenize(const PlaneMap& m, const TargetPoint& s, const Weights& w) {
  WeightedHomogPair hp;
  hp.weights = w;
  hp.d1 = weighted_degree(m.f1(), w);
  hp.d2 = weighted_degree(m.f2(), w);
  hp.q1 = homogenize(m.f1(), -s.s1, w, hp.d1);
  hp.q2 = homogenize(m.f2(), -s.s2, w, hp.d2);
  return hp;
}

inline WeightedHomogPair homogenize(const PlaneMap& m, const TargetPoint& s) {
  return homogenize(m, s, m.weights());
}

enum class Chart { Y1, X1 };

/// A point [X:Y:0] on the line at infinity, normalized in its chart.
struct InfinityPoint {
  cplx X;
  cplx Y;
  Chart chart = Chart::Y1;

  std::string label() const {
    auto fmt = [](cplx v) {
      if (v.imag() == 0.0 && v.real() == std::round(v.real())) return std::to_string(static_cast<long long>(v.real()));
      return detail::format_coeff(v);
    };
    return "[" + fmt(X) + ":" + fmt(Y) + ":0]";
  }
  friend bool operator==(const InfinityPoint&, const InfinityPoint&) = default;
};

namespace detail {

inline UniPoly y_chart_restriction(const TriPoly& q0) {
  std::vector<cplx> c;
  for (const auto& [e, coef] : q0.terms()) {
    if (c.size() <= static_cast<std::size_t>(e[0])) c.resize(static_cast<std::size_t>(e[0]) + 1);
    c[static_cast<std::size_t>(e[0])] += coef;
  }
  return UniPoly(std::move(c));
}

// Representative of [X:1:0] under X ~ zeta X, zeta ranging over the (a1/g)-th roots of unity.
inline cplx canonical_x(cplx X, const Weights& w) {
  const int order = w.a1 / std::gcd(w.a0, w.a1);
  if (order <= 1 || X == cplx(0.0)) return X;
  const double sector = 2 * std::numbers::pi / order;
  double arg = std::arg(X);
  if (arg < 0) arg += 2 * std::numbers::pi;
  const double reduced = std::fmod(arg, sector);
  return std::polar(std::abs(X), reduced);
}

}  // namespace detail

/// Common zeros of the pair on U = 0, up to weighted scaling.
///
/// Axis points are decided exactly from the presence of pure-X / pure-Y terms; points with
/// X, Y both nonzero come from the Y = 1 chart, where q1(X,1,0) and q2(X,1,0) must share a root.
inline std::vector<InfinityPoint> roots_at_infinity(const WeightedHomogPair& hp, double tol = 1e-9) {
  const Weights& w = hp.weights;
  if (hp.q1.homogeneous_degree(w) < 0 || hp.q2.homogeneous_degree(w) < 0)
    throw Error(ErrorCode::NonHomogeneousInput, "pair is not weighted-homogeneous under " + w.to_string());
  const TriPoly r1 = hp.q1.at_infinity();
  const TriPoly r2 = hp.q2.at_infinity();
  if (r1.is_zero() && r2.is_zero())
    throw Error(ErrorCode::NonIsolatedInfinity, "both polynomials vanish on the whole line at infinity");

  std::vector<InfinityPoint> out;
  auto pure_x_vanishes = [](const TriPoly& r) {
    return std::none_of(r.terms().begin(), r.terms().end(), [](const auto& t) { return t.first[1] == 0; });
  };
  auto pure_y_vanishes = [](const TriPoly& r) {
    return std::none_of(r.terms().begin(), r.terms().end(), [](const auto& t) { return t.first[0] == 0; });
  };
  if (pure_x_vanishes(r1) && pure_x_vanishes(r2)) out.push_back({1.0, 0.0, Chart::X1});
  if (pure_y_vanishes(r1) && pure_y_vanishes(r2)) out.push_back({0.0, 1.0, Chart::Y1});

  const UniPoly g1 = detail::y_chart_restriction(r1);
  const UniPoly g2 = detail::y_chart_restriction(r2);
  std::vector<cplx> candidates;
  auto nonzero_roots = [](const UniPoly& g) {
    std::vector<cplx> rs;
    if (g.degree() < 1) return rs;
    for (const auto& r : uniroots(g).roots)
      if (std::abs(r.value) > 1e-12) rs.push_back(r.value);
    return rs;
  };
  auto vanishes_at = [tol](const UniPoly& g, cplx z) {
    double scale = 0.0;
    for (std::size_t k = 0; k < g.coeffs().size(); ++k) scale += std::abs(g.coeffs()[k]) * std::pow(std::abs(z), static_cast<double>(k));
    return std::abs(g(z)) <= tol * scale;
  };
  if (g1.is_zero()) candidates = nonzero_roots(g2);
  else if (g2.is_zero()) candidates = nonzero_roots(g1);
  else {
    const UniPoly& lo = g1.degree() <= g2.degree() ? g1 : g2;
    const UniPoly& hi = g1.degree() <= g2.degree() ? g2 : g1;
    for (cplx z : nonzero_roots(lo))
      if (vanishes_at(hi, z)) candidates.push_back(z);
  }
  std::vector<InfinityPoint> mixed;
  for (cplx z : candidates) {
    const InfinityPoint p{detail::canonical_x(z, w), 1.0, Chart::Y1};
    const bool dup = std::any_of(mixed.begin(), mixed.end(), [&](const InfinityPoint& q) {
      return std::abs(q.X - p.X) <= 1e-8 * (1 + std::abs(p.X));
    });
    if (!dup) mixed.push_back(p);
  }
  out.insert(out.end(), mixed.begin(), mixed.end());
  return out;
}

enum class AxisPoint { X, Y };

struct SingularPoint {
  AxisPoint location;
  int local_group_order = 1;

  std::string label() const { return location == AxisPoint::X ? "[1:0:0]" : "[0:1:0]"; }
  friend bool operator==(const SingularPoint&, const SingularPoint&) = default;
};

/// Axis points with nontrivial stabilizer Z/a_i. The affine chart (a2 = 1) is always regular.
inline std::vector<SingularPoint> singular_points(const Weights& w) {
  std::vector<SingularPoint> out;
  if (w.a0 > 1) out.push_back({AxisPoint::X, w.a0});
  if (w.a1 > 1) out.push_back({AxisPoint::Y, w.a1});
  return out;
}

/// d1*d2/(a0*a1) for a pair without roots at infinity.
inline int weighted_bezout(const WeightedHomogPair& hp) {
  if (!roots_at_infinity(hp).empty())
    throw Error(ErrorCode::RootsAtInfinityPresent, "Bezout count needs an empty line at infinity");
  const int num = hp.d1 * hp.d2;
  const int den = hp.weights.a0 * hp.weights.a1;
  if (num % den != 0)
    throw Error(ErrorCode::NonIntegerCount,
                std::to_string(num) + "/" + std::to_string(den) + " under weights " + hp.weights.to_string());
  return num / den;
}

}  // namespace caustica
