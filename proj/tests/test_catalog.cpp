#include <gtest/gtest.h>

#include <random>

#include "caustica/catalog.hpp"
#include "caustica/jacobian.hpp"
#include "caustica/sampling.hpp"
#include "caustica/solver.hpp"

using namespace caustica;

namespace {

// Independent constructors, written from the generating functions by hand.
std::pair<BiPoly, BiPoly> hand_A(int n, double sx, const ParamVector& p) {
  BiPoly f1, f2;
  f1.add_term(n, 0, sx * (n + 1)).add_term(1, 1, -4.0);
  for (int k = 3; k <= n - 1; ++k) f1.add_term(k - 1, 0, static_cast<double>(k) * p.get("c" + std::to_string(k)));
  f2.add_term(0, 1, -2.0);
  return {f1, f2};
}

std::pair<BiPoly, BiPoly> hand_D(int n, double s, const ParamVector& p) {
  BiPoly f1, f2;
  f1.add_term(1, 1, 2.0);
  f2.add_term(2, 0, 1.0).add_term(0, n - 2, s * (n - 1));
  for (int k = 2; k <= n - 2; ++k) f2.add_term(0, k - 1, static_cast<double>(k) * p.get("c" + std::to_string(k)));
  return {f1, f2};
}

std::pair<BiPoly, BiPoly> hand_E6(double s, const ParamVector& p) {
  const cplx c1 = p.get("c1"), c2 = p.get("c2"), c3 = p.get("c3");
  BiPoly f1, f2;
  f1.add_term(2, 0, 3.0).add_term(0, 2, c3).add_term(0, 1, c1);
  f2.add_term(0, 3, 4.0 * s).add_term(1, 1, 2.0 * c3).add_term(0, 1, 2.0 * c2).add_term(1, 0, c1);
  return {f1, f2};
}

std::pair<BiPoly, BiPoly> hand_E7(const ParamVector& p) {
  const cplx c1 = p.get("c1"), c2 = p.get("c2"), c3 = p.get("c3"), c4 = p.get("c4");
  BiPoly f1, f2;
  f1.add_term(2, 0, 3.0).add_term(0, 3, 1.0).add_term(0, 1, c1);
  f2.add_term(1, 2, 3.0).add_term(0, 3, 4.0 * c4).add_term(0, 2, 3.0 * c3).add_term(0, 1, 2.0 * c2).add_term(1, 0, c1);
  return {f1, f2};
}

std::pair<BiPoly, BiPoly> hand_E8(const ParamVector& p) {
  const cplx c1 = p.get("c1"), c2 = p.get("c2"), c3 = p.get("c3"), c4 = p.get("c4"), c5 = p.get("c5");
  BiPoly f1, f2;
  f1.add_term(2, 0, 3.0).add_term(0, 3, c5).add_term(0, 2, c4).add_term(0, 1, c1);
  f2.add_term(0, 4, 5.0)
      .add_term(1, 2, 3.0 * c5)
      .add_term(1, 1, 2.0 * c4)
      .add_term(0, 2, 3.0 * c3)
      .add_term(0, 1, 2.0 * c2)
      .add_term(1, 0, c1);
  return {f1, f2};
}

ParamVector random_params(const FamilyId& id, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  ParamVector p;
  for (const auto& name : required_params(id)) p.set(name, u(rng));
  return p;
}

}  // namespace

TEST(Catalog, D5Example) {
  const PlaneMap m = build_family(FamilyId::D(5, 1), {{"c2", 1.0}, {"c3", 1.0}});
  BiPoly f1, f2;
  f1.add_term(1, 1, 2.0);
  f2.add_term(2, 0, 1.0).add_term(0, 3, 4.0).add_term(0, 2, 3.0).add_term(0, 1, 2.0);
  EXPECT_EQ(m.f1(), f1);
  EXPECT_EQ(m.f2(), f2);
  EXPECT_EQ(m.d1(), 5);
  EXPECT_EQ(m.d2(), 6);
}

TEST(Catalog, HyperbolicUmbilicExample) {
  const PlaneMap m = build_family(FamilyId::hyperbolic_umbilic(), {{"c", 1.0}});
  BiPoly f1, f2;
  f1.add_term(2, 0, 1.0).add_term(0, 1, 2.0);
  f2.add_term(0, 2, 1.0).add_term(1, 0, 2.0);
  EXPECT_EQ(m.f1(), f1);
  EXPECT_EQ(m.f2(), f2);
}

TEST(Catalog, EllipticUmbilicMap) {
  const PlaneMap m = build_family(FamilyId::elliptic_umbilic(), {{"c", 0.5}});
  BiPoly f1, f2;
  f1.add_term(2, 0, 1.0).add_term(0, 2, -1.0);
  f2.add_term(1, 1, -2.0).add_term(0, 1, 2.0);
  EXPECT_EQ(m.f1(), f1);
  EXPECT_EQ(m.f2(), f2);
}

TEST(Catalog, A2Example) {
  const PlaneMap m = build_family(FamilyId::A(2, 1, 1), {});
  BiPoly f1, f2;
  f1.add_term(2, 0, 3.0).add_term(1, 1, -4.0);
  f2.add_term(0, 1, -2.0);
  EXPECT_EQ(m.f1(), f1);
  EXPECT_EQ(m.f2(), f2);
}

TEST(Catalog, LegacyFoldVariant) {
  BuildOptions o;
  o.legacy_fold = true;
  const PlaneMap m = build_family(FamilyId::A(2, -1, 1), {}, o);
  EXPECT_EQ(m.f1(), BiPoly::monomial(2, 0, -3.0));
  EXPECT_EQ(m.f2(), BiPoly::monomial(0, 1, -2.0));
  EXPECT_THROW(build_family(FamilyId::A(3), {}, o), Error);
}

TEST(Catalog, MatchesHandCodedConstructors) {
  std::mt19937_64 rng(21);
  for (const auto& id : table_families()) {
    const ParamVector p = random_params(id, rng);
    const PlaneMap m = build_family(id, p);
    std::pair<BiPoly, BiPoly> expect;
    switch (id.kind) {
      case FamilyKind::A: expect = hand_A(id.n, id.signs[0], p); break;
      case FamilyKind::D: expect = hand_D(id.n, id.signs[0], p); break;
      case FamilyKind::E6: expect = hand_E6(id.signs[0], p); break;
      case FamilyKind::E7: expect = hand_E7(p); break;
      case FamilyKind::E8: expect = hand_E8(p); break;
      default: FAIL();
    }
    EXPECT_EQ(m.f1(), expect.first) << id.label();
    EXPECT_EQ(m.f2(), expect.second) << id.label();
  }
}

TEST(Catalog, ComponentShapes) {
  std::mt19937_64 rng(22);
  for (const auto& id : table_families()) {
    const PlaneMap m = build_family(id, random_params(id, rng));
    if (id.kind == FamilyKind::A) EXPECT_EQ(m.f2(), BiPoly::monomial(0, 1, -2.0)) << id.label();
    if (id.kind == FamilyKind::D) EXPECT_EQ(m.f1(), BiPoly::monomial(1, 1, 2.0)) << id.label();
  }
}

TEST(Catalog, GeneratingFunctionA2) {
  const cplx s1(1.25), s2(-0.5);
  const BiPoly F = generating_function(FamilyId::A(2), {}, TargetPoint{s1, s2});
  BiPoly expect;
  expect.add_term(3, 0, 1.0).add_term(0, 2, 1.0).add_term(2, 0, s2).add_term(1, 0, -s1).add_term(0, 1, s2);
  EXPECT_EQ(F, expect);
}

TEST(Catalog, GeneratingFunctionEllipticAtOrigin) {
  const BiPoly F = generating_function(FamilyId::elliptic_umbilic(), {{"c", 0.0}}, TargetPoint{0.0, 0.0});
  BiPoly expect;
  expect.add_term(3, 0, 1.0 / 3.0).add_term(1, 2, -1.0);
  EXPECT_EQ(F, expect);
}

TEST(Catalog, GradientVanishesAtPreimages) {
  Sampler sampler(31);
  std::vector<FamilyId> ids = table_families();
  for (const auto& id : lensing_families()) ids.push_back(id);
  for (const auto& id : ids) {
    auto d = draw_generic(id, sampler);
    ASSERT_TRUE(d.has_value());
    const BiPoly F = generating_function(id, d->params, d->target);
    const BiPoly Fx = F.partial(Var::x), Fy = F.partial(Var::y);
    for (const auto& p : d->preimages.preimages) {
      const double scale = 1 + d->target.magnitude();
      EXPECT_LE(std::abs(Fx(p.x, p.y)), 1e-9 * scale) << id.label();
      EXPECT_LE(std::abs(Fy(p.x, p.y)), 1e-9 * scale) << id.label();
    }
  }
}

TEST(Catalog, JacobianEqualsHessianForDELensing) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<FamilyId> ids;
  for (const auto& id : table_families())
    if (id.kind != FamilyKind::A) ids.push_back(id);
  for (const auto& id : lensing_families()) ids.push_back(id);
  for (const auto& id : ids) {
    const ParamVector p = random_params(id, rng);
    const PlaneMap m = build_family(id, p);
    for (int k = 0; k < 100; ++k) {
      const TargetPoint s{u(rng), u(rng)};
      const BiPoly F = generating_function(id, p, s);
      const cplx x(u(rng), u(rng)), y(u(rng), u(rng));
      const cplx j = jacobian_det(m, x, y), h = hessian_det<double>(F, x, y);
      EXPECT_LE(std::abs(j - h), 1e-10 * std::max(1.0, std::abs(j))) << id.label();
    }
  }
}

TEST(Catalog, AnJacobianIsMinusSignYTimesHessianAtPreimages) {
  Sampler sampler(43);
  for (int n = 2; n <= 8; ++n)
    for (int sx : {1, -1})
      for (int sy : {1, -1}) {
        const FamilyId id = FamilyId::A(n, sx, sy);
        auto d = draw_generic(id, sampler);
        ASSERT_TRUE(d.has_value());
        ASSERT_EQ(d->preimages.status, SolveStatus::Ok);
        const BiPoly F = generating_function(id, d->params, d->target);
        for (const auto& p : d->preimages.preimages) {
          const cplx h = hessian_det<double>(F, p.x, p.y);
          EXPECT_LE(std::abs(p.jac_det + static_cast<double>(sy) * h), 1e-9 * std::abs(p.jac_det)) << id.label();
        }
      }
}

TEST(Catalog, AssignedWeights) {
  EXPECT_EQ(assigned_weights(FamilyId::D(5)), Weights::make(3, 2, 1));
  EXPECT_EQ(assigned_weights(FamilyId::E8()), Weights::make(3, 2, 1));
  EXPECT_EQ(assigned_weights(FamilyId::E7()), Weights::make(3, 2, 1));
  EXPECT_EQ(assigned_weights(FamilyId::A(7)), Weights::make(1, 1, 1));
  EXPECT_EQ(assigned_weights(FamilyId::E6(-1)), Weights::make(1, 1, 1));
  EXPECT_EQ(assigned_weights(FamilyId::D(4)), Weights::make(2, 2, 1));
  for (const auto& id : lensing_families()) EXPECT_EQ(assigned_weights(id), Weights::make(1, 1, 1));
  for (const auto& id : table_families()) {
    const Weights w = assigned_weights(id);
    EXPECT_EQ(w.a2, 1);
    EXPECT_EQ(std::gcd(std::gcd(w.a0, w.a1), w.a2), 1);
  }
}

TEST(Catalog, WeightsValidation) {
  EXPECT_THROW(Weights::make(0, 1, 1), Error);
  EXPECT_THROW(Weights::make(3, 2, 2), Error);
  EXPECT_NO_THROW(Weights::make(4, 2, 1));
}

TEST(Catalog, InvalidFamilies) {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code_of([] { FamilyId::A(1); }), ErrorCode::UnknownFamily);
  EXPECT_EQ(code_of([] { FamilyId::D(3); }), ErrorCode::UnknownFamily);
  EXPECT_EQ(code_of([] { FamilyId::checked({FamilyKind::E7, 0, {1}}); }), ErrorCode::UnknownFamily);
  EXPECT_EQ(code_of([] { parse_kind("F4"); }), ErrorCode::UnknownFamily);
  EXPECT_EQ(code_of([] { build_family(FamilyId::D(5), {{"c2", 1.0}}); }), ErrorCode::MissingParam);
  EXPECT_EQ(code_of([] { build_family(FamilyId::A(2), {{"c3", 1.0}}); }), ErrorCode::ExtraParam);
  try {
    build_family(FamilyId::E7(), {{"c1", 1.0}, {"c2", 1.0}, {"c3", 1.0}});
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("c4"), std::string::npos);
  }
}

TEST(Catalog, RequiredParams) {
  EXPECT_EQ(required_params(FamilyId::A(2)).size(), 0u);
  EXPECT_EQ(required_params(FamilyId::A(6)), (std::vector<std::string>{"c3", "c4", "c5"}));
  EXPECT_EQ(required_params(FamilyId::D(6)), (std::vector<std::string>{"c2", "c3", "c4"}));
  EXPECT_EQ(required_params(FamilyId::E8()).size(), 5u);
  EXPECT_EQ(required_params(FamilyId::hyperbolic_umbilic()), (std::vector<std::string>{"c"}));
}

TEST(Catalog, Labels) {
  EXPECT_EQ(FamilyId::A(3, 1, -1).label(), "A3(+,-)");
  EXPECT_EQ(FamilyId::D(5, -1).label(), "D5-");
  EXPECT_EQ(FamilyId::E7().label(), "E7");
}
