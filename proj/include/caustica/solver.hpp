#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "caustica/bipoly.hpp"
#include "caustica/catalog.hpp"
#include "caustica/error.hpp"
#include "caustica/jacobian.hpp"
#include "caustica/resultant.hpp"
#include "caustica/unipoly.hpp"

namespace caustica {

struct Preimage {
  cplx x;
  cplx y;
  cplx magnification;  // NaN for merged near-critical clusters
  cplx jac_det;
  double residual = 0.0;
  bool is_real = false;
  int multiplicity = 1;
};

enum class SolveStatus { Ok, CausticTarget, DegenerateSystem };

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Ok: return "Ok";
    case SolveStatus::CausticTarget: return "CausticTarget";
    case SolveStatus::DegenerateSystem: return "DegenerateSystem";
  }
  return "?";
}

struct PreimageSet {
  std::vector<Preimage> preimages;
  int bezout_expected = 0;
  FamilyId family;
  TargetPoint target;
  SolveStatus status = SolveStatus::Ok;
  std::string diagnostic;
  double min_abs_jac = 0.0;
  double caustic_threshold = 0.0;

  int count_with_multiplicity() const {
    int n = 0;
    for (const auto& p : preimages) n += p.multiplicity;
    return n;
  }
  int real_count() const {
    int n = 0;
    for (const auto& p : preimages)
      if (p.is_real) n += p.multiplicity;
    return n;
  }
  double max_abs_magnification() const {
    double r = 0.0;
    for (const auto& p : preimages)
      if (std::isfinite(std::abs(p.magnification))) r = std::max(r, std::abs(p.magnification));
    return r;
  }
};

struct SolverOptions {
  std::uint64_t seed = 0x5eedcafe1234ULL;
  // Target is near-caustic when min |det Jac| < caustic_rel_tol * PlaneMap::jacobian_scale().
  double caustic_rel_tol = 1e-6;
  // Pre-image residual bound, relative to 1 + |s|.
  double residual_tol = 1e-9;
};

namespace detail {

struct RootLD {
  lcplx x, y;
};

inline long double max_component(lcplx x, lcplx y) { return std::max(std::abs(x), std::abs(y)); }

/// 2x2 Newton on (f1 - s1, f2 - s2) in extended precision.
inline bool newton_polish(const PlaneMap& m, lcplx s1, lcplx s2, lcplx& x, lcplx& y, long double& residual) {
  const long double tiny = 16 * std::numeric_limits<long double>::epsilon();
  bool converged = false;
  int extra = 0;
  for (int it = 0; it < 80; ++it) {
    const lcplx r1 = m.f1().eval(x, y) - s1;
    const lcplx r2 = m.f2().eval(x, y) - s2;
    const lcplx a = m.f1x().eval(x, y), b = m.f1y().eval(x, y);
    const lcplx c = m.f2x().eval(x, y), d = m.f2y().eval(x, y);
    const lcplx det = a * d - b * c;
    if (det == lcplx(0)) break;
    const lcplx dx = (d * r1 - b * r2) / det;
    const lcplx dy = (a * r2 - c * r1) / det;
    x -= dx;
    y -= dy;
    if (!std::isfinite(std::abs(x)) || !std::isfinite(std::abs(y)) || max_component(x, y) > 1e12L) return false;
    if (std::abs(dx) + std::abs(dy) <= tiny * (1 + std::abs(x) + std::abs(y))) {
      converged = true;
      if (++extra >= 2) break;
    }
  }
  const lcplx r1 = m.f1().eval(x, y) - s1;
  const lcplx r2 = m.f2().eval(x, y) - s2;
  residual = std::max(std::abs(r1), std::abs(r2));
  return converged || residual == 0;
}

inline bool same_root(const RootLD& a, const RootLD& b) {
  const long double scale = 1 + std::abs(a.x) + std::abs(a.y);
  return std::abs(a.x - b.x) + std::abs(a.y - b.y) <= 1e-10L * scale;
}

}  // namespace detail

/// All complex pre-images of s, with status instead of exceptions for caustic or degenerate targets.
///
/// Resultant elimination in the map's preferred variable, back-substitution of every
/// resultant root, and 2x2 Newton polish in extended precision. If the count falls short of
/// the weighted Bezout number the other variable is eliminated as well and the results merged.
inline PreimageSet solve_preimages(const PlaneMap& m, const TargetPoint& s, const SolverOptions& opt = {}) {
  using detail::lcplx;
  PreimageSet out;
  out.family = m.family();
  out.target = s;
  out.bezout_expected = m.expected_count();

  const BiPoly p1 = m.f1() - BiPoly::constant(s.s1);
  const BiPoly p2 = m.f2() - BiPoly::constant(s.s2);
  const lcplx s1 = detail::widen(s.s1), s2 = detail::widen(s.s2);
  const long double res_bound = opt.residual_tol * (1 + s.magnitude());
  const bool real_problem = m.is_real() && s.is_real();

  std::vector<detail::RootLD> found;
  auto consider = [&](lcplx x, lcplx y) {
    long double residual = 0;
    if (!detail::newton_polish(m, s1, s2, x, y, residual) || !(residual <= res_bound)) return;
    if (real_problem) {
      const long double im = std::max(std::abs(x.imag()), std::abs(y.imag()));
      if (im <= 1e-8L * (1 + std::abs(x) + std::abs(y))) {
        lcplx xr(x.real(), 0), yr(y.real(), 0);
        long double rr = 0;
        if (detail::newton_polish(m, s1, s2, xr, yr, rr) && rr <= res_bound) {
          x = xr;
          y = yr;
        }
      }
    }
    const detail::RootLD cand{x, y};
    for (const auto& f : found)
      if (detail::same_root(f, cand)) return;
    found.push_back(cand);
  };

  auto attempt = [&](Var v, std::uint64_t seed) {
    UniPoly r;
    try {
      r = resultant_eliminate(p1, p2, v);
    } catch (const Error&) {
      return;
    }
    if (r.degree() < 1) return;
    RootList roots;
    RootOptions ro;
    ro.seed = seed;
    try {
      roots = uniroots(r, ro);
    } catch (const Error&) {
      return;
    }
    const Var keep = v;  // restrict_to keeps the eliminated variable free
    for (const auto& w : roots.roots) {
      for (const BiPoly* pk : {&p1, &p2}) {
        UniPoly u = restrict_to(*pk, keep, w.value).trimmed_relative(1e-14);
        if (u.degree() < 1) continue;
        RootList vs;
        try {
          vs = uniroots(u, ro);
        } catch (const Error&) {
          continue;
        }
        for (const auto& vr : vs.roots) {
          const lcplx vv = detail::widen(vr.value), ww = detail::widen(w.value);
          if (v == Var::x) consider(vv, ww);
          else consider(ww, vv);
        }
      }
    }
  };

  attempt(m.elimination_var(), opt.seed);
  if (static_cast<int>(found.size()) != out.bezout_expected) attempt(other(m.elimination_var()), opt.seed + 1);
  if (static_cast<int>(found.size()) < out.bezout_expected) attempt(m.elimination_var(), opt.seed + 2);

  const double threshold = opt.caustic_rel_tol * m.jacobian_scale();
  out.caustic_threshold = threshold;
  out.min_abs_jac = std::numeric_limits<double>::infinity();
  for (const auto& r : found) {
    Preimage p;
    p.x = detail::narrow(r.x);
    p.y = detail::narrow(r.y);
    // Evaluated at the stored coordinates so magnification(m, p.x, p.y) reproduces it exactly.
    const lcplx jac = jacobian_det<long double>(m, detail::widen(p.x), detail::widen(p.y));
    p.jac_det = detail::narrow(jac);
    p.magnification = detail::narrow(lcplx(1) / jac);
    const lcplx r1 = m.f1().eval(r.x, r.y) - s1, r2 = m.f2().eval(r.x, r.y) - s2;
    p.residual = static_cast<double>(std::max(std::abs(r1), std::abs(r2)));
    p.is_real = std::max(std::abs(p.x.imag()), std::abs(p.y.imag())) <=
                1e-8 * (1 + std::abs(p.x) + std::abs(p.y));
    out.min_abs_jac = std::min(out.min_abs_jac, std::abs(p.jac_det));
    out.preimages.push_back(p);
  }

  // Roots merged at a near-critical point absorb the count deficit.
  int deficit = out.bezout_expected - static_cast<int>(out.preimages.size());
  for (auto& p : out.preimages) {
    if (std::abs(p.jac_det) >= threshold) continue;
    p.magnification = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    if (deficit > 0) {
      ++p.multiplicity;
      --deficit;
    }
  }

  std::sort(out.preimages.begin(), out.preimages.end(), [](const Preimage& a, const Preimage& b) {
    if (a.is_real != b.is_real) return a.is_real;
    if (a.x.real() != b.x.real()) return a.x.real() < b.x.real();
    if (a.y.real() != b.y.real()) return a.y.real() < b.y.real();
    if (a.x.imag() != b.x.imag()) return a.x.imag() < b.x.imag();
    return a.y.imag() < b.y.imag();
  });

  if (out.count_with_multiplicity() != out.bezout_expected) {
    out.status = SolveStatus::DegenerateSystem;
    out.diagnostic = "found " + std::to_string(out.count_with_multiplicity()) + " pre-images, expected " +
                     std::to_string(out.bezout_expected);
  } else if (out.min_abs_jac < threshold) {
    out.status = SolveStatus::CausticTarget;
    out.diagnostic = "min |det Jac| = " + std::to_string(out.min_abs_jac) + " below " + std::to_string(threshold);
  }
  return out;
}

inline void throw_on_status(const PreimageSet& ps) {
  if (ps.status == SolveStatus::CausticTarget) throw Error(ErrorCode::CausticTarget, ps.diagnostic);
  if (ps.status == SolveStatus::DegenerateSystem) throw Error(ErrorCode::DegenerateSystem, ps.diagnostic);
}

/// As solve_preimages, but throws CausticTarget or DegenerateSystem.
inline PreimageSet preimages(const PlaneMap& m, const TargetPoint& s, const SolverOptions& opt = {}) {
  PreimageSet ps = solve_preimages(m, s, opt);
  throw_on_status(ps);
  return ps;
}

/// 1 / det Jac f at (x, y). Throws OnCriticalCurve below the caustic tolerance.
inline cplx magnification(const PlaneMap& m, cplx x, cplx y, const SolverOptions& opt = {}) {
  const detail::lcplx jac = jacobian_det<long double>(m, detail::widen(x), detail::widen(y));
  if (!(std::abs(jac) >= opt.caustic_rel_tol * m.jacobian_scale()))
    throw Error(ErrorCode::OnCriticalCurve, "|det Jac| = " + std::to_string(static_cast<double>(std::abs(jac))));
  return detail::narrow(detail::lcplx(1) / jac);
}

enum class MagMode { real_only, all_complex };

/// Sum of h(x_i, y_i) * M_i over all complex pre-images.
inline cplx moment_sum(const PreimageSet& ps, const BiPoly& h) {
  throw_on_status(ps);
  detail::lcplx acc{};
  for (const auto& p : ps.preimages)
    acc += h.eval<long double>(detail::widen(p.x), detail::widen(p.y)) * detail::widen(p.magnification);
  return detail::narrow(acc);
}

inline cplx total_signed_magnification(const PreimageSet& ps, MagMode mode) {
  if (mode == MagMode::all_complex) return moment_sum(ps, BiPoly::constant(1.0));
  throw_on_status(ps);
  detail::lcplx acc{};
  for (const auto& p : ps.preimages)
    if (p.is_real) acc += detail::widen(p.magnification);
  return detail::narrow(acc);
}

}  // namespace caustica
