#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "caustica/bipoly.hpp"
#include "caustica/error.hpp"

namespace caustica {

enum class FamilyKind { A, D, E6, E7, E8, EllipticUmbilic, HyperbolicUmbilic };

/// One singularity family: kind, index n (A and D only) and sign choices.
///
/// A carries (sign of x^{n+1}, sign of y^2), D the sign of y^{n-1}, E6 the sign of
/// y^4; the others carry none. Signs are +1 or -1.
struct FamilyId {
  FamilyKind kind = FamilyKind::A;
  int n = 0;
  std::vector<int> signs;

  static FamilyId A(int n, int sign_x = 1, int sign_y = 1) { return checked({FamilyKind::A, n, {sign_x, sign_y}}); }
  static FamilyId D(int n, int sign = 1) { return checked({FamilyKind::D, n, {sign}}); }
  static FamilyId E6(int sign = 1) { return checked({FamilyKind::E6, 0, {sign}}); }
  static FamilyId E7() { return checked({FamilyKind::E7, 0, {}}); }
  static FamilyId E8() { return checked({FamilyKind::E8, 0, {}}); }
  static FamilyId elliptic_umbilic() { return checked({FamilyKind::EllipticUmbilic, 0, {}}); }
  static FamilyId hyperbolic_umbilic() { return checked({FamilyKind::HyperbolicUmbilic, 0, {}}); }

  /// Throws UnknownFamily when n or the sign list does not fit the kind.
  static FamilyId checked(FamilyId id) {
    auto fail = [&](const std::string& why) { throw Error(ErrorCode::UnknownFamily, why); };
    std::size_t want_signs = 0;
    switch (id.kind) {
      case FamilyKind::A:
        if (id.n < 2) fail("A_n requires n >= 2, got " + std::to_string(id.n));
        want_signs = 2;
        break;
      case FamilyKind::D:
        if (id.n < 4) fail("D_n requires n >= 4, got " + std::to_string(id.n));
        want_signs = 1;
        break;
      case FamilyKind::E6:
        want_signs = 1;
        [[fallthrough]];
      default:
        if (id.n != 0) fail("family carries no index n");
    }
    if (id.signs.size() != want_signs) fail("wrong number of sign choices");
    for (int s : id.signs)
      if (s != 1 && s != -1) fail("sign choices must be +1 or -1");
    return id;
  }

  bool is_lensing() const { return kind == FamilyKind::EllipticUmbilic || kind == FamilyKind::HyperbolicUmbilic; }

  std::string label() const {
    auto sg = [](int s) { return s > 0 ? "+" : "-"; };
    switch (kind) {
      case FamilyKind::A: return "A" + std::to_string(n) + "(" + sg(signs[0]) + "," + sg(signs[1]) + ")";
      case FamilyKind::D: return "D" + std::to_string(n) + sg(signs[0]);
      case FamilyKind::E6: return std::string("E6") + sg(signs[0]);
      case FamilyKind::E7: return "E7";
      case FamilyKind::E8: return "E8";
      case FamilyKind::EllipticUmbilic: return "EllipticUmbilic";
      case FamilyKind::HyperbolicUmbilic: return "HyperbolicUmbilic";
    }
    return "?";
  }

  friend bool operator==(const FamilyId&, const FamilyId&) = default;
};

inline std::string kind_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::A: return "A";
    case FamilyKind::D: return "D";
    case FamilyKind::E6: return "E6";
    case FamilyKind::E7: return "E7";
    case FamilyKind::E8: return "E8";
    case FamilyKind::EllipticUmbilic: return "EllipticUmbilic";
    case FamilyKind::HyperbolicUmbilic: return "HyperbolicUmbilic";
  }
  return "?";
}

/// Accepts the canonical kind names plus the lensing aliases used on the command line.
inline FamilyKind parse_kind(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "a") return FamilyKind::A;
  if (s == "d") return FamilyKind::D;
  if (s == "e6") return FamilyKind::E6;
  if (s == "e7") return FamilyKind::E7;
  if (s == "e8") return FamilyKind::E8;
  if (s == "ellipticumbilic" || s == "elliptic" || s == "d4-lens" || s == "ell") return FamilyKind::EllipticUmbilic;
  if (s == "hyperbolicumbilic" || s == "hyperbolic" || s == "d4+lens" || s == "hyp") return FamilyKind::HyperbolicUmbilic;
  throw Error(ErrorCode::UnknownFamily, "unknown family '" + name + "'");
}

/// Named parameter values. Real at the public surface; complex values are accepted for testing.
class ParamVector {
 public:
  ParamVector() = default;
  ParamVector(std::initializer_list<std::pair<const std::string, double>> init) {
    for (const auto& [k, v] : init) values_[k] = v;
  }

  ParamVector& set(const std::string& name, double v) {
    values_[name] = v;
    return *this;
  }
  ParamVector& set_complex(const std::string& name, cplx v) {
    values_[name] = v;
    return *this;
  }

  bool contains(const std::string& name) const { return values_.count(name) > 0; }
  cplx get(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw Error(ErrorCode::MissingParam, name);
    return it->second;
  }
  const std::map<std::string, cplx>& values() const { return values_; }
  bool is_real() const {
    return std::all_of(values_.begin(), values_.end(), [](const auto& kv) { return kv.second.imag() == 0.0; });
  }

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::map<std::string, cplx> values_;
};

/// Exactly the parameter names the family's normal form uses.
inline std::vector<std::string> required_params(const FamilyId& id) {
  std::vector<std::string> names;
  auto range = [&names](int lo, int hi) {
    for (int k = lo; k <= hi; ++k) names.push_back("c" + std::to_string(k));
  };
  switch (id.kind) {
    case FamilyKind::A: range(3, id.n - 1); break;
    case FamilyKind::D: range(2, id.n - 2); break;
    case FamilyKind::E6: range(1, 3); break;
    case FamilyKind::E7: range(1, 4); break;
    case FamilyKind::E8: range(1, 5); break;
    case FamilyKind::EllipticUmbilic:
    case FamilyKind::HyperbolicUmbilic: names.push_back("c"); break;
  }
  return names;
}

struct Weights {
  int a0 = 1;
  int a1 = 1;
  int a2 = 1;

  /// Positive, a2 == 1, gcd(a0, a1, a2) == 1.
  static Weights make(int a0, int a1, int a2 = 1) {
    if (a0 < 1 || a1 < 1 || a2 < 1) throw Error(ErrorCode::InvalidWeights, "weights must be positive");
    if (a2 != 1) throw Error(ErrorCode::InvalidWeights, "the affine coordinate U must have weight 1");
    if (std::gcd(std::gcd(a0, a1), a2) != 1) throw Error(ErrorCode::InvalidWeights, "weights must be coprime");
    return Weights{a0, a1, a2};
  }

  std::string to_string() const {
    return "(" + std::to_string(a0) + "," + std::to_string(a1) + "," + std::to_string(a2) + ")";
  }

  friend bool operator==(const Weights&, const Weights&) = default;
};

inline Weights assigned_weights(const FamilyId& id) {
  switch (id.kind) {
    case FamilyKind::A:
    case FamilyKind::E6:
    case FamilyKind::EllipticUmbilic:
    case FamilyKind::HyperbolicUmbilic: return Weights::make(1, 1, 1);
    case FamilyKind::D: return Weights::make(id.n - 2, 2, 1);
    case FamilyKind::E7:
    case FamilyKind::E8: return Weights::make(3, 2, 1);
  }
  throw Error(ErrorCode::UnknownFamily, "no weights for family");
}

struct BuildOptions {
  // A_2 only: the (±3x^2, -2y) fold without the -4xy cross term.
  bool legacy_fold = false;
};

/// The plane map f_c = (f1, f2) of one family at bound parameter values. Immutable.
class PlaneMap {
 public:
  PlaneMap(FamilyId family, ParamVector params, BiPoly f1, BiPoly f2, Weights weights,
           std::optional<Var> eliminate = std::nullopt)
      : family_(std::move(family)),
        params_(std::move(params)),
        f1_(std::move(f1)),
        f2_(std::move(f2)),
        weights_(weights) {
    if (f1_.is_zero() || f2_.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "map component is zero");
    d1_ = f1_.weighted_degree(weights_.a0, weights_.a1);
    d2_ = f2_.weighted_degree(weights_.a0, weights_.a1);
    f1x_ = f1_.partial(Var::x);
    f1y_ = f1_.partial(Var::y);
    f2x_ = f2_.partial(Var::x);
    f2y_ = f2_.partial(Var::y);
    jac_ = f1x_ * f2y_ - f1y_ * f2x_;
    eliminate_ = eliminate ? *eliminate : pick_elimination();
    jac_scale_ = compute_jacobian_scale();
  }

  const FamilyId& family() const { return family_; }
  const ParamVector& params() const { return params_; }
  const BiPoly& f1() const { return f1_; }
  const BiPoly& f2() const { return f2_; }
  const Weights& weights() const { return weights_; }
  int d1() const { return d1_; }
  int d2() const { return d2_; }

  const BiPoly& f1x() const { return f1x_; }
  const BiPoly& f1y() const { return f1y_; }
  const BiPoly& f2x() const { return f2x_; }
  const BiPoly& f2y() const { return f2y_; }
  /// det Jac f as a polynomial.
  const BiPoly& jacobian_poly() const { return jac_; }

  Var elimination_var() const { return eliminate_; }
  /// Median |det Jac| over a 9x9 grid on [-1,1]^2: the unit-box scale used by caustic tests.
  double jacobian_scale() const { return jac_scale_; }

  /// d1*d2/(a0*a1), or 0 when that is not an integer.
  int expected_count() const {
    const int num = d1_ * d2_;
    const int den = weights_.a0 * weights_.a1;
    return num % den == 0 ? num / den : 0;
  }

  bool is_real() const { return f1_.is_real() && f2_.is_real(); }

 private:
  Var pick_elimination() const {
    // Eliminate whichever variable appears with lower degree in the sparser component.
    const int x_deg = std::min(f1_.degree_in(Var::x), f2_.degree_in(Var::x));
    const int y_deg = std::min(f1_.degree_in(Var::y), f2_.degree_in(Var::y));
    if (x_deg <= 0 && y_deg > 0) return Var::y;
    if (y_deg <= 0 && x_deg > 0) return Var::x;
    const int x_max = std::max(f1_.degree_in(Var::x), f2_.degree_in(Var::x));
    const int y_max = std::max(f1_.degree_in(Var::y), f2_.degree_in(Var::y));
    return x_max <= y_max ? Var::x : Var::y;
  }

  double compute_jacobian_scale() const {
    std::vector<double> mags;
    for (int i = 0; i <= 8; ++i)
      for (int j = 0; j <= 8; ++j) {
        const double v = std::abs(jac_(cplx(-1.0 + 0.25 * i), cplx(-1.0 + 0.25 * j)));
        if (v > 0) mags.push_back(v);
      }
    if (mags.empty()) return 1.0;
    std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2), mags.end());
    return mags[mags.size() / 2];
  }

  FamilyId family_;
  ParamVector params_;
  BiPoly f1_, f2_;
  Weights weights_;
  int d1_ = 0, d2_ = 0;
  BiPoly f1x_, f1y_, f2x_, f2y_, jac_;
  Var eliminate_ = Var::x;
  double jac_scale_ = 1.0;
};

namespace detail {

inline void check_params(const FamilyId& id, const ParamVector& params) {
  const auto need = required_params(id);
  for (const auto& name : need)
    if (!params.contains(name)) throw Error(ErrorCode::MissingParam, name + " (family " + id.label() + ")");
  for (const auto& [name, v] : params.values())
    if (std::find(need.begin(), need.end(), name) == need.end())
      throw Error(ErrorCode::ExtraParam, name + " (family " + id.label() + ")");
}

inline cplx c_k(const ParamVector& p, int k) { return p.get("c" + std::to_string(k)); }

}  // namespace detail

/// The family's plane map f_c with the given parameters bound.
inline PlaneMap build_family(const FamilyId& raw_id, const ParamVector& params, const BuildOptions& opt = {}) {
  const FamilyId id = FamilyId::checked(raw_id);
  detail::check_params(id, params);
  BiPoly f1, f2;
  Var eliminate = Var::x;
  switch (id.kind) {
    case FamilyKind::A: {
      const int n = id.n;
      const double sx = id.signs[0];
      if (opt.legacy_fold) {
        if (n != 2) throw Error(ErrorCode::InvalidArgument, "legacy_fold applies to A_2 only");
        f1.add_term(2, 0, 3.0 * sx);
      } else {
        f1.add_term(n, 0, sx * (n + 1));
        for (int k = 3; k <= n - 1; ++k) f1.add_term(k - 1, 0, static_cast<double>(k) * detail::c_k(params, k));
        f1.add_term(1, 1, -4.0);
      }
      f2.add_term(0, 1, -2.0);
      eliminate = Var::y;
      break;
    }
    case FamilyKind::D: {
      const int n = id.n;
      f1.add_term(1, 1, 2.0);
      f2.add_term(2, 0, 1.0);
      f2.add_term(0, n - 2, static_cast<double>(id.signs[0]) * (n - 1));
      for (int k = 2; k <= n - 2; ++k) f2.add_term(0, k - 1, static_cast<double>(k) * detail::c_k(params, k));
      break;
    }
    case FamilyKind::E6: {
      const cplx c1 = detail::c_k(params, 1), c2 = detail::c_k(params, 2), c3 = detail::c_k(params, 3);
      f1.add_term(2, 0, 3.0).add_term(0, 2, c3).add_term(0, 1, c1);
      f2.add_term(0, 3, 4.0 * id.signs[0]).add_term(1, 1, 2.0 * c3).add_term(0, 1, 2.0 * c2).add_term(1, 0, c1);
      break;
    }
    case FamilyKind::E7: {
      const cplx c1 = detail::c_k(params, 1), c2 = detail::c_k(params, 2), c3 = detail::c_k(params, 3),
                 c4 = detail::c_k(params, 4);
      f1.add_term(2, 0, 3.0).add_term(0, 3, 1.0).add_term(0, 1, c1);
      f2.add_term(1, 2, 3.0).add_term(0, 3, 4.0 * c4).add_term(0, 2, 3.0 * c3).add_term(0, 1, 2.0 * c2).add_term(1, 0, c1);
      break;
    }
    case FamilyKind::E8: {
      const cplx c1 = detail::c_k(params, 1), c2 = detail::c_k(params, 2), c3 = detail::c_k(params, 3),
                 c4 = detail::c_k(params, 4), c5 = detail::c_k(params, 5);
      f1.add_term(2, 0, 3.0).add_term(0, 3, c5).add_term(0, 2, c4).add_term(0, 1, c1);
      f2.add_term(0, 4, 5.0)
          .add_term(1, 2, 3.0 * c5)
          .add_term(1, 1, 2.0 * c4)
          .add_term(0, 2, 3.0 * c3)
          .add_term(0, 1, 2.0 * c2)
          .add_term(1, 0, c1);
      break;
    }
    case FamilyKind::EllipticUmbilic: {
      const cplx c = params.get("c");
      f1.add_term(2, 0, 1.0).add_term(0, 2, -1.0);
      f2.add_term(1, 1, -2.0).add_term(0, 1, 4.0 * c);
      break;
    }
    case FamilyKind::HyperbolicUmbilic: {
      const cplx c = params.get("c");
      f1.add_term(2, 0, 1.0).add_term(0, 1, 2.0 * c);
      f2.add_term(0, 2, 1.0).add_term(1, 0, 2.0 * c);
      break;
    }
  }
  return PlaneMap(id, params, std::move(f1), std::move(f2), assigned_weights(id), eliminate);
}

/// Target point s = (s1, s2); complex values are allowed for testing.
struct TargetPoint {
  cplx s1 = 0.0;
  cplx s2 = 0.0;

  double magnitude() const { return std::hypot(std::abs(s1), std::abs(s2)); }
  bool is_real() const { return s1.imag() == 0.0 && s2.imag() == 0.0; }
  friend bool operator==(const TargetPoint&, const TargetPoint&) = default;
};

/// F_{c,s} (or the time-delay function T_{c,s} for the lensing maps), constant term omitted
/// for the Table-1 families. Its critical points are the pre-images of s under build_family.
inline BiPoly generating_function(const FamilyId& raw_id, const ParamVector& params, const TargetPoint& s,
                                  const BuildOptions& opt = {}) {
  const FamilyId id = FamilyId::checked(raw_id);
  detail::check_params(id, params);
  BiPoly F;
  switch (id.kind) {
    case FamilyKind::A: {
      const int n = id.n;
      const double sx = id.signs[0], sy = id.signs[1];
      if (opt.legacy_fold && n != 2) throw Error(ErrorCode::InvalidArgument, "legacy_fold applies to A_2 only");
      F.add_term(n + 1, 0, sx).add_term(0, 2, sy);
      for (int k = 3; k <= n - 1; ++k) F.add_term(k, 0, detail::c_k(params, k));
      if (!opt.legacy_fold) F.add_term(2, 0, s.s2);
      F.add_term(1, 0, -s.s1).add_term(0, 1, sy * s.s2);
      break;
    }
    case FamilyKind::D: {
      const int n = id.n;
      F.add_term(2, 1, 1.0).add_term(0, n - 1, static_cast<double>(id.signs[0]));
      for (int k = 2; k <= n - 2; ++k) F.add_term(0, k, detail::c_k(params, k));
      F.add_term(0, 1, -s.s2).add_term(1, 0, -s.s1);
      break;
    }
    case FamilyKind::E6:
      F.add_term(3, 0, 1.0)
          .add_term(0, 4, static_cast<double>(id.signs[0]))
          .add_term(1, 2, detail::c_k(params, 3))
          .add_term(0, 2, detail::c_k(params, 2))
          .add_term(1, 1, detail::c_k(params, 1))
          .add_term(0, 1, -s.s2)
          .add_term(1, 0, -s.s1);
      break;
    case FamilyKind::E7:
      F.add_term(3, 0, 1.0)
          .add_term(1, 3, 1.0)
          .add_term(0, 4, detail::c_k(params, 4))
          .add_term(0, 3, detail::c_k(params, 3))
          .add_term(0, 2, detail::c_k(params, 2))
          .add_term(1, 1, detail::c_k(params, 1))
          .add_term(0, 1, -s.s2)
          .add_term(1, 0, -s.s1);
      break;
    case FamilyKind::E8:
      F.add_term(3, 0, 1.0)
          .add_term(0, 5, 1.0)
          .add_term(1, 3, detail::c_k(params, 5))
          .add_term(1, 2, detail::c_k(params, 4))
          .add_term(0, 3, detail::c_k(params, 3))
          .add_term(0, 2, detail::c_k(params, 2))
          .add_term(1, 1, detail::c_k(params, 1))
          .add_term(0, 1, -s.s2)
          .add_term(1, 0, -s.s1);
      break;
    case FamilyKind::EllipticUmbilic:
    case FamilyKind::HyperbolicUmbilic: {
      const cplx c = params.get("c");
      F.add_term(0, 0, 0.5 * (s.s1 * s.s1 + s.s2 * s.s2)).add_term(1, 0, -s.s1).add_term(0, 1, -s.s2);
      if (id.kind == FamilyKind::EllipticUmbilic) {
        F.add_term(3, 0, 1.0 / 3.0).add_term(1, 2, -1.0).add_term(0, 2, 2.0 * c);
      } else {
        F.add_term(3, 0, 1.0 / 3.0).add_term(0, 3, 1.0 / 3.0).add_term(1, 1, 2.0 * c);
      }
      break;
    }
  }
  return F;
}

/// det Hess F at (x, y).
template <typename T>
std::complex<T> hessian_det(const BiPoly& F, std::complex<T> x, std::complex<T> y) {
  const BiPoly fx = F.partial(Var::x);
  const BiPoly fxx = fx.partial(Var::x), fxy = fx.partial(Var::y), fyy = F.partial(Var::y).partial(Var::y);
  return fxx.eval(x, y) * fyy.eval(x, y) - fxy.eval(x, y) * fxy.eval(x, y);
}

}  // namespace caustica
