#pragma once

#include <algorithm>
#include <complex>
#include <compare>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "caustica/error.hpp"

namespace caustica {

using cplx = std::complex<double>;
using cplxl = std::complex<long double>;

enum class Var { x, y };

constexpr Var other(Var v) { return v == Var::x ? Var::y : Var::x; }

struct Monomial {
  int i = 0;  // exponent of x
  int j = 0;  // exponent of y
  auto operator<=>(const Monomial&) const = default;
};

/// Sparse bivariate polynomial over C.
///
/// Terms are keyed by exponent pair and never hold an exact zero coefficient,
/// so `terms().empty()` is the zero polynomial.
class BiPoly {
 public:
  using TermMap = std::map<Monomial, cplx>;

  BiPoly() = default;

  static BiPoly constant(cplx c) { return monomial(0, 0, c); }

  static BiPoly monomial(int i, int j, cplx c = 1.0) {
    BiPoly p;
    p.add_term(i, j, c);
    return p;
  }

  /// Accumulates c into the (i, j) coefficient; a sum that lands on zero erases the term.
  BiPoly& add_term(int i, int j, cplx c) {
    if (i < 0 || j < 0) throw Error(ErrorCode::InvalidArgument, "negative exponent in BiPoly term");
    if (c == cplx(0.0)) return *this;
    auto [it, inserted] = terms_.try_emplace(Monomial{i, j}, c);
    if (!inserted) {
      it->second += c;
      if (it->second == cplx(0.0)) terms_.erase(it);
    }
    return *this;
  }

  cplx coeff(int i, int j) const {
    auto it = terms_.find(Monomial{i, j});
    return it == terms_.end() ? cplx(0.0) : it->second;
  }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Total degree, -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, m.i + m.j);
    return d;
  }

  int degree_in(Var v) const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, v == Var::x ? m.i : m.j);
    return d;
  }

  /// max(a0*i + a1*j) over terms, -1 for the zero polynomial.
  int weighted_degree(int a0, int a1) const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, a0 * m.i + a1 * m.j);
    return d;
  }

  double max_abs_coeff() const {
    double r = 0.0;
    for (const auto& [m, c] : terms_) r = std::max(r, std::abs(c));
    return r;
  }

  bool is_real() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const auto& t) { return t.second.imag() == 0.0; });
  }

  /// Horner in x within each power of y, then Horner in y.
  template <typename T>
  std::complex<T> eval(std::complex<T> x, std::complex<T> y) const {
    if (terms_.empty()) return {};
    const int dy = degree_in(Var::y);
    std::vector<std::vector<std::complex<T>>> rows(static_cast<std::size_t>(dy) + 1);
    for (const auto& [m, c] : terms_) {
      auto& row = rows[static_cast<std::size_t>(m.j)];
      if (row.size() <= static_cast<std::size_t>(m.i)) row.resize(static_cast<std::size_t>(m.i) + 1);
      row[static_cast<std::size_t>(m.i)] = std::complex<T>(static_cast<T>(c.real()), static_cast<T>(c.imag()));
    }
    std::complex<T> acc{};
    for (auto row = rows.rbegin(); row != rows.rend(); ++row) {
      std::complex<T> inner{};
      for (auto a = row->rbegin(); a != row->rend(); ++a) inner = inner * x + *a;
      acc = acc * y + inner;
    }
    return acc;
  }

  cplx operator()(cplx x, cplx y) const { return eval<double>(x, y); }

  /// Sum of |coeff| |x|^i |y|^j, the natural scale for rounding error in eval.
  template <typename T>
  T abs_eval(T ax, T ay) const {
    T acc = 0;
    for (const auto& [m, c] : terms_) {
      T term = static_cast<T>(std::abs(c));
      for (int k = 0; k < m.i; ++k) term *= ax;
      for (int k = 0; k < m.j; ++k) term *= ay;
      acc += term;
    }
    return acc;
  }

  BiPoly partial(Var v) const {
    BiPoly d;
    for (const auto& [m, c] : terms_) {
      const int e = v == Var::x ? m.i : m.j;
      if (e == 0) continue;
      if (v == Var::x) d.add_term(m.i - 1, m.j, c * static_cast<double>(e));
      else d.add_term(m.i, m.j - 1, c * static_cast<double>(e));
    }
    return d;
  }

  BiPoly& operator+=(const BiPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m.i, m.j, c);
    return *this;
  }
  BiPoly& operator-=(const BiPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m.i, m.j, -c);
    return *this;
  }
  BiPoly& operator*=(cplx s) {
    if (s == cplx(0.0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend BiPoly operator+(BiPoly a, const BiPoly& b) { return a += b; }
  friend BiPoly operator-(BiPoly a, const BiPoly& b) { return a -= b; }
  friend BiPoly operator*(BiPoly a, cplx s) { return a *= s; }
  friend BiPoly operator*(cplx s, BiPoly a) { return a *= s; }
  friend BiPoly operator*(const BiPoly& a, const BiPoly& b) {
    BiPoly r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma.i + mb.i, ma.j + mb.j, ca * cb);
    return r;
  }
  friend bool operator==(const BiPoly&, const BiPoly&) = default;

  std::string to_string() const;

 private:
  TermMap terms_;
};

inline cplx eval(const BiPoly& p, cplx x, cplx y) { return p.eval<double>(x, y); }
inline BiPoly partial(const BiPoly& p, Var v) { return p.partial(v); }

namespace detail {

inline std::string format_coeff(cplx c) {
  std::ostringstream os;
  os.precision(12);
  if (c.imag() == 0.0) os << c.real();
  else os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
  return os.str();
}

inline void append_power(std::string& out, const char* var, int e) {
  if (e == 0) return;
  if (!out.empty() && out.back() != ' ') out += "*";
  out += var;
  if (e > 1) out += "^" + std::to_string(e);
}

}  // namespace detail

inline std::string BiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  // Highest total degree first reads most naturally.
  std::vector<std::pair<Monomial, cplx>> sorted(terms_.begin(), terms_.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.first.i + a.first.j > b.first.i + b.first.j;
  });
  bool first = true;
  for (const auto& [m, c] : sorted) {
    cplx shown = c;
    if (!first) {
      if (c.imag() == 0.0 && c.real() < 0) {
        out += " - ";
        shown = -c;
      } else {
        out += " + ";
      }
    }
    std::string term;
    const bool unit = shown == cplx(1.0) && (m.i + m.j) > 0;
    const bool neg_unit = shown == cplx(-1.0) && (m.i + m.j) > 0;
    if (neg_unit) term = "-";
    else if (!unit) term = detail::format_coeff(shown);
    std::string powers;
    detail::append_power(powers, "x", m.i);
    detail::append_power(powers, "y", m.j);
    if (!term.empty() && term != "-" && !powers.empty()) term += "*";
    out += term + powers;
    first = false;
  }
  return out;
}

}  // namespace caustica
