#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "caustica/catalog.hpp"
#include "caustica/jacobian.hpp"
#include "caustica/solver.hpp"
#include "caustica/wproj.hpp"

namespace caustica {

enum class GrtVerdict { VanishesByNoRootsAtInfinity, VanishesByDegreeCriterion, Inconclusive };

inline std::string to_string(GrtVerdict v) {
  switch (v) {
    case GrtVerdict::VanishesByNoRootsAtInfinity: return "VanishesByNoRootsAtInfinity";
    case GrtVerdict::VanishesByDegreeCriterion: return "VanishesByDegreeCriterion";
    case GrtVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct ResidueReport {
  FamilyId family;
  TargetPoint target;
  Weights weights;
  int d1 = 0;
  int d2 = 0;
  BiPoly numerator;       // h; the constant 1 by default
  int numerator_degree = 0;
  cplx affine_residue_sum;
  double max_abs_residue = 0.0;
  double tolerance = 0.0;  // tol_rel * max(1, max_abs_residue)
  bool numeric_ok = false;  // |affine_residue_sum| <= tolerance
  std::vector<InfinityPoint> infinity_roots;
  GrtVerdict grt_verdict = GrtVerdict::Inconclusive;
  int preimage_count = 0;

  /// A vanishing guarantee that the numbers confirm.
  bool verified() const { return grt_verdict != GrtVerdict::Inconclusive && numeric_ok; }
};

/// Res of h dx dy / (P1 P2) at a simple common root is 1/J; this is the h = 1 case.
inline cplx residue_at_root(const PlaneMap& m, cplx x, cplx y, const SolverOptions& opt = {}) {
  const auto jac = jacobian_det<long double>(m, detail::widen(x), detail::widen(y));
  if (!(std::abs(jac) >= opt.caustic_rel_tol * m.jacobian_scale()))
    throw Error(ErrorCode::NonSimpleRoot, "|J| = " + std::to_string(static_cast<double>(std::abs(jac))));
  return detail::narrow(detail::lcplx(1) / jac);
}

/// deg h < d1 + d2 - a0 - a1: the form h dx dy / (P1 P2) has negative weighted degree.
constexpr bool degree_criterion(int h_deg, int d1, int d2, const Weights& w) {
  return h_deg < d1 + d2 - w.a0 - w.a1;
}

struct GrtOptions {
  SolverOptions solver;
  double tol_rel = 1e-9;
};

/// Sums h/J over all complex pre-images and states whether the residue theorem forces zero.
inline ResidueReport verify_grt(const PlaneMap& m, const TargetPoint& s, const std::optional<BiPoly>& h = std::nullopt,
                                const GrtOptions& opt = {}) {
  ResidueReport rep;
  rep.family = m.family();
  rep.target = s;
  rep.weights = m.weights();
  rep.numerator = h ? *h : BiPoly::constant(1.0);
  const bool trivial_h = rep.numerator == BiPoly::constant(1.0);
  rep.numerator_degree = rep.numerator.is_zero() ? -1 : weighted_degree(rep.numerator, m.weights());

  const PreimageSet ps = preimages(m, s, opt.solver);
  rep.preimage_count = ps.count_with_multiplicity();
  rep.affine_residue_sum = moment_sum(ps, rep.numerator);
  for (const auto& p : ps.preimages)
    rep.max_abs_residue = std::max(rep.max_abs_residue, std::abs(rep.numerator(p.x, p.y) * p.magnification));
  rep.tolerance = opt.tol_rel * std::max(1.0, rep.max_abs_residue);
  rep.numeric_ok = std::abs(rep.affine_residue_sum) <= rep.tolerance;

  const WeightedHomogPair hp = homogenize(m, s, m.weights());
  rep.d1 = hp.d1;
  rep.d2 = hp.d2;
  rep.infinity_roots = roots_at_infinity(hp);
  if (rep.infinity_roots.empty() && degree_criterion(std::max(rep.numerator_degree, 0), hp.d1, hp.d2, hp.weights))
    rep.grt_verdict = trivial_h ? GrtVerdict::VanishesByNoRootsAtInfinity : GrtVerdict::VanishesByDegreeCriterion;
  return rep;
}

}  // namespace caustica
