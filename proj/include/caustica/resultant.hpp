#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "caustica/bipoly.hpp"
#include "caustica/error.hpp"
#include "caustica/unipoly.hpp"

namespace caustica {

/// Determinant by LU with partial pivoting; `a` is row-major n x n and is consumed.
inline cplx lu_determinant(std::vector<cplx> a, std::size_t n) {
  cplx det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(a[r * n + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      det = -det;
    }
    const cplx d = a[col * n + col];
    det *= d;
    for (std::size_t r = col + 1; r < n; ++r) {
      const cplx f = a[r * n + col] / d;
      if (f == cplx(0.0)) continue;
      for (std::size_t c = col + 1; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
    }
  }
  return det;
}

/// Sylvester resultant of two univariate coefficient lists (lowest degree first).
///
/// The formal degrees are the list lengths minus one, even when the leading entry is zero.
inline cplx sylvester_resultant(std::span<const cplx> p, std::span<const cplx> q) {
  const std::size_t m = p.size() - 1;
  const std::size_t n = q.size() - 1;
  const std::size_t size = m + n;
  if (size == 0) return 1.0;
  std::vector<cplx> s(size * size);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k <= m; ++k) s[r * size + r + k] = p[m - k];
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t k = 0; k <= n; ++k) s[(n + r) * size + r + k] = q[n - k];
  return lu_determinant(std::move(s), size);
}

struct ResultantOptions {
  // Leading coefficients (in the eliminated variable) below this fraction of the
  // largest coefficient are treated as zero.
  double leading_zero_tol = 1e-12;
  // Interpolated coefficients below this fraction of the largest are trimmed.
  double trim_tol = 1e-11;
};

namespace detail {

// p as a polynomial in `v` whose coefficients are polynomials in the other variable.
inline std::vector<UniPoly> split_by(const BiPoly& p, Var v) {
  const int d = std::max(p.degree_in(v), 0);
  std::vector<std::vector<cplx>> rows(static_cast<std::size_t>(d) + 1);
  for (const auto& [m, c] : p.terms()) {
    const int ev = v == Var::x ? m.i : m.j;
    const int ew = v == Var::x ? m.j : m.i;
    auto& row = rows[static_cast<std::size_t>(ev)];
    if (row.size() <= static_cast<std::size_t>(ew)) row.resize(static_cast<std::size_t>(ew) + 1);
    row[static_cast<std::size_t>(ew)] += c;
  }
  std::vector<UniPoly> out;
  for (auto& r : rows) out.emplace_back(std::move(r));
  return out;
}

inline void drop_numeric_leading(std::vector<UniPoly>& coeffs, double tol, const char* name,
                                 std::vector<std::string>* warnings) {
  double scale = 0.0;
  for (const auto& c : coeffs) scale = std::max(scale, c.max_abs_coeff());
  while (coeffs.size() > 1 && coeffs.back().max_abs_coeff() < tol * scale) {
    if (!coeffs.back().is_zero() && warnings)
      warnings->push_back(std::string("numerically vanishing leading coefficient dropped from ") + name);
    coeffs.pop_back();
  }
}

}  // namespace detail

/// Res(p, q; eliminate) as a univariate polynomial in the surviving variable.
///
/// The Sylvester determinant is evaluated at roots of unity and the coefficients are
/// recovered by an inverse DFT; the degree bound is min(n*deg_w p + m*deg_w q, deg p deg q).
inline UniPoly resultant_eliminate(const BiPoly& p, const BiPoly& q, Var eliminate,
                                   const ResultantOptions& opt = {},
                                   std::vector<std::string>* warnings = nullptr) {
  if (p.is_zero() || q.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "resultant of a zero polynomial");
  auto pc = detail::split_by(p, eliminate);
  auto qc = detail::split_by(q, eliminate);
  detail::drop_numeric_leading(pc, opt.leading_zero_tol, "p", warnings);
  detail::drop_numeric_leading(qc, opt.leading_zero_tol, "q", warnings);
  const int m = static_cast<int>(pc.size()) - 1;
  const int n = static_cast<int>(qc.size()) - 1;
  if (m == 0 && n == 0) throw Error(ErrorCode::BothConstantInVar, "neither polynomial involves the eliminated variable");

  auto max_deg = [](const std::vector<UniPoly>& cs) {
    int d = 0;
    for (const auto& c : cs) d = std::max(d, c.degree());
    return d;
  };
  const int bound = std::min(n * max_deg(pc) + m * max_deg(qc), p.degree() * q.degree());
  const int samples = bound + 1;

  std::vector<cplx> values(static_cast<std::size_t>(samples));
  std::vector<cplx> pv(pc.size()), qv(qc.size());
  for (int k = 0; k < samples; ++k) {
    const cplx w = std::polar(1.0, 2 * std::numbers::pi * k / samples);
    for (std::size_t t = 0; t < pc.size(); ++t) pv[t] = pc[t](w);
    for (std::size_t t = 0; t < qc.size(); ++t) qv[t] = qc[t](w);
    values[static_cast<std::size_t>(k)] = sylvester_resultant(pv, qv);
  }
  std::vector<cplx> coeffs(static_cast<std::size_t>(samples));
  for (int j = 0; j < samples; ++j) {
    cplx acc = 0.0;
    for (int k = 0; k < samples; ++k)
      acc += values[static_cast<std::size_t>(k)] * std::polar(1.0, -2 * std::numbers::pi * j * k / samples);
    coeffs[static_cast<std::size_t>(j)] = acc / static_cast<double>(samples);
  }
  // Interpolation leaves rounding noise where the exact coefficient is zero.
  double scale = 0.0;
  for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
  for (auto& c : coeffs) {
    if (std::abs(c.real()) <= 0.25 * opt.trim_tol * scale) c.real(0.0);
    if (std::abs(c.imag()) <= 0.25 * opt.trim_tol * scale) c.imag(0.0);
  }
  return UniPoly(std::move(coeffs)).trimmed_relative(opt.trim_tol);
}

}  // namespace caustica
