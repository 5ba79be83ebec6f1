// D5 from map to residues: solve, sum magnifications, then look at the line at infinity
// in the assigned weights and in the ordinary projective plane.
#include <cstdio>

#include "caustica/catalog.hpp"
#include "caustica/residue.hpp"
#include "caustica/solver.hpp"
#include "caustica/wproj.hpp"

using namespace caustica;

int main() {
  const FamilyId id = FamilyId::D(5, +1);
  const ParamVector params{{"c2", 0.3}, {"c3", -0.7}};
  const PlaneMap m = build_family(id, params);
  const TargetPoint s{1.2, -0.4};

  std::printf("%s\n  f1 = %s\n  f2 = %s\n", id.label().c_str(), m.f1().to_string().c_str(), m.f2().to_string().c_str());

  const PreimageSet ps = preimages(m, s);
  std::printf("pre-images of (%.2f, %.2f): %d (weighted Bezout %d)\n", s.s1.real(), s.s2.real(),
              ps.count_with_multiplicity(), ps.bezout_expected);
  for (const auto& p : ps.preimages)
    std::printf("  x = %+.6f%+.6fi  y = %+.6f%+.6fi  M = %+.6e%+.6ei\n", p.x.real(), p.x.imag(), p.y.real(),
                p.y.imag(), p.magnification.real(), p.magnification.imag());
  const cplx total = total_signed_magnification(ps, MagMode::all_complex);
  const cplx real_only = total_signed_magnification(ps, MagMode::real_only);
  std::printf("sum over all pre-images: %.3e%+.3ei\n", total.real(), total.imag());
  std::printf("sum over real pre-images only: %.6f\n", real_only.real());

  for (const Weights& w : {m.weights(), Weights::make(1, 1, 1)}) {
    const auto hp = homogenize(m, s, w);
    const auto roots = roots_at_infinity(hp);
    std::printf("WP%s: degrees (%d, %d), roots at infinity:", w.to_string().c_str(), hp.d1, hp.d2);
    if (roots.empty()) std::printf(" none");
    for (const auto& r : roots) std::printf(" %s", r.label().c_str());
    std::printf("\n");
  }

  const ResidueReport rep = verify_grt(m, s);
  std::printf("verdict: %s, |sum| = %.3e\n", to_string(rep.grt_verdict).c_str(), std::abs(rep.affine_residue_sum));
  return rep.verified() ? 0 : 1;
}
