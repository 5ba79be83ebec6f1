#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "caustica/catalog.hpp"
#include "caustica/solver.hpp"

namespace caustica {

/// Every Table 1 family over the tested ranges: A2..A8 (all sign tuples), D4..D8 (both signs), E6 (both), E7, E8.
inline std::vector<FamilyId> table_families() {
  std::vector<FamilyId> out;
  for (int n = 2; n <= 8; ++n)
    for (int sx : {1, -1})
      for (int sy : {1, -1}) out.push_back(FamilyId::A(n, sx, sy));
  for (int n = 4; n <= 8; ++n)
    for (int s : {1, -1}) out.push_back(FamilyId::D(n, s));
  out.push_back(FamilyId::E6(1));
  out.push_back(FamilyId::E6(-1));
  out.push_back(FamilyId::E7());
  out.push_back(FamilyId::E8());
  return out;
}

inline std::vector<FamilyId> lensing_families() {
  return {FamilyId::elliptic_umbilic(), FamilyId::hyperbolic_umbilic()};
}

struct SamplingOptions {
  double param_half_width = 2.0;
  double target_half_width = 5.0;
  int max_rejections = 100;
  SolverOptions solver;
};

/// Seeded source of parameter vectors and targets. Doubles are built from the top 53 bits so
/// the sequence is identical across standard libraries.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  ParamVector params(const FamilyId& id, double half_width) {
    ParamVector p;
    for (const auto& name : required_params(id)) p.set(name, uniform(-half_width, half_width));
    return p;
  }

  TargetPoint target(double half_width) {
    const double s1 = uniform(-half_width, half_width);
    const double s2 = uniform(-half_width, half_width);
    return TargetPoint{s1, s2};
  }

  std::uint64_t next_seed() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

struct Draw {
  ParamVector params;
  TargetPoint target;
  PreimageSet preimages;
  int rejections = 0;
};

/// A (params, target) draw whose target is off the caustic. DegenerateSystem outcomes are
/// returned rather than resampled; nullopt only if every attempt landed on a caustic.
inline std::optional<Draw> draw_generic(const FamilyId& id, Sampler& sampler, const SamplingOptions& opt = {},
                                        const BuildOptions& build = {}) {
  Draw d;
  for (; d.rejections <= opt.max_rejections; ++d.rejections) {
    d.params = sampler.params(id, opt.param_half_width);
    d.target = sampler.target(opt.target_half_width);
    SolverOptions so = opt.solver;
    so.seed = sampler.next_seed();
    d.preimages = solve_preimages(build_family(id, d.params, build), d.target, so);
    if (d.preimages.status != SolveStatus::CausticTarget) return d;
  }
  return std::nullopt;
}

}  // namespace caustica
