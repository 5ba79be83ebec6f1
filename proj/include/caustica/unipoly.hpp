#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "caustica/bipoly.hpp"
#include "caustica/error.hpp"

namespace caustica {

/// Dense univariate polynomial, lowest degree first, trailing zeros trimmed.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

  const std::vector<cplx>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  cplx leading() const { return coeffs_.empty() ? cplx(0.0) : coeffs_.back(); }
  cplx operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : cplx(0.0); }

  template <typename T>
  std::complex<T> eval(std::complex<T> z) const {
    std::complex<T> acc{};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
      acc = acc * z + std::complex<T>(static_cast<T>(it->real()), static_cast<T>(it->imag()));
    return acc;
  }
  cplx operator()(cplx z) const { return eval<double>(z); }

  UniPoly derivative() const {
    std::vector<cplx> d;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d.push_back(coeffs_[k] * static_cast<double>(k));
    return UniPoly(std::move(d));
  }

  double max_abs_coeff() const {
    double r = 0.0;
    for (const auto& c : coeffs_) r = std::max(r, std::abs(c));
    return r;
  }

  /// Drops leading coefficients with |a_k| <= rel_tol * max|a|.
  UniPoly trimmed_relative(double rel_tol) const {
    const double cutoff = rel_tol * max_abs_coeff();
    std::vector<cplx> c = coeffs_;
    while (!c.empty() && std::abs(c.back()) <= cutoff) c.pop_back();
    return UniPoly(std::move(c));
  }

  friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<cplx> r(a.coeffs_.size() + b.coeffs_.size() - 1);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) r[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return UniPoly(std::move(r));
  }
  friend bool operator==(const UniPoly&, const UniPoly&) = default;

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == cplx(0.0)) coeffs_.pop_back();
  }

  std::vector<cplx> coeffs_;
};

/// Restricts p to a fixed value of one variable, giving a polynomial in the other.
inline UniPoly restrict_to(const BiPoly& p, Var keep, cplx fixed) {
  const int d = std::max(p.degree_in(keep), 0);
  std::vector<cplx> c(static_cast<std::size_t>(d) + 1);
  for (const auto& [m, coef] : p.terms()) {
    const int e_keep = keep == Var::x ? m.i : m.j;
    const int e_fixed = keep == Var::x ? m.j : m.i;
    c[static_cast<std::size_t>(e_keep)] += coef * std::pow(fixed, e_fixed);
  }
  return UniPoly(std::move(c));
}

struct Root {
  cplx value;
  int multiplicity = 1;
  double residual = 0.0;
};

struct RootList {
  std::vector<Root> roots;

  int total_multiplicity() const {
    int n = 0;
    for (const auto& r : roots) n += r.multiplicity;
    return n;
  }
};

struct RootOptions {
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
  int max_iterations = 800;
  // Single-linkage radius for candidate clusters; a candidate only merges if the
  // derivative test below confirms a multiple root.
  double cluster_radius = 1e-4;
  double merge_radius = 1e-8;
  double multiplicity_tol = 1e-7;
  double residual_tol = 1e-9;
};

namespace detail {

using lcplx = std::complex<long double>;

inline lcplx widen(cplx z) { return {z.real(), z.imag()}; }
inline cplx narrow(lcplx z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

// |p^(k)(z)| / sum_j |a_j| j!/(j-k)! |z|^(j-k): relative size of the k-th derivative.
inline long double relative_derivative(const std::vector<lcplx>& a, lcplx z, int k) {
  lcplx val{};
  long double scale = 0;
  const long double az = std::abs(z);
  for (int j = static_cast<int>(a.size()) - 1; j >= k; --j) {
    long double fall = 1;
    for (int t = 0; t < k; ++t) fall *= static_cast<long double>(j - t);
    val = val * z + a[static_cast<std::size_t>(j)] * fall;
    scale = scale * az + std::abs(a[static_cast<std::size_t>(j)]) * fall;
  }
  return scale > 0 ? std::abs(val) / scale : 0;
}

inline lcplx horner(const std::vector<lcplx>& a, lcplx z, lcplx* deriv) {
  lcplx p{}, dp{};
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    dp = dp * z + p;
    p = p * z + *it;
  }
  if (deriv) *deriv = dp;
  return p;
}

}  // namespace detail

/// All complex roots of p with multiplicities.
///
/// Aberth-Ehrlich iteration from a randomly perturbed circle, Newton polish in
/// extended precision, then merging of clusters that pass a derivative test for
/// a multiple root. Throws DidNotConverge when a root fails the residual bound.
inline RootList uniroots(const UniPoly& p, const RootOptions& opt = {}) {
  using detail::lcplx;
  if (p.degree() < 1) throw Error(ErrorCode::InvalidArgument, "uniroots needs degree >= 1");

  const double norm = p.max_abs_coeff();
  std::vector<lcplx> a;
  for (const auto& c : p.coeffs()) a.push_back(detail::widen(c / norm));
  const int n = p.degree();

  // Exact zeros are deflated up front.
  int zero_mult = 0;
  while (a[static_cast<std::size_t>(zero_mult)] == lcplx(0)) ++zero_mult;
  std::vector<lcplx> b(a.begin() + zero_mult, a.end());
  const int m = n - zero_mult;

  std::vector<lcplx> z(static_cast<std::size_t>(m));
  int iterations = 0;
  if (m > 0) {
    const long double ratio = std::abs(b.front()) / std::abs(b.back());
    long double radius = std::pow(ratio, 1.0L / m);
    if (!(radius > 0) || !std::isfinite(radius)) radius = 1;
    std::mt19937_64 rng(opt.seed);
    auto unit = [&rng] { return static_cast<long double>(rng() >> 11) * 0x1.0p-53L; };
    const long double offset = 2 * std::numbers::pi_v<long double> * unit();
    for (int k = 0; k < m; ++k) {
      const long double jitter = 0.25L * unit();
      const long double theta = offset + 2 * std::numbers::pi_v<long double> * (k + jitter) / m;
      z[static_cast<std::size_t>(k)] = std::polar(radius * (1 + 0.1L * unit()), theta);
    }

    std::vector<bool> done(static_cast<std::size_t>(m), false);
    const long double eps = std::numeric_limits<long double>::epsilon();
    int active = m;
    for (; iterations < opt.max_iterations && active > 0; ++iterations) {
      for (int k = 0; k < m; ++k) {
        if (done[static_cast<std::size_t>(k)]) continue;
        lcplx& zk = z[static_cast<std::size_t>(k)];
        lcplx dp;
        const lcplx pv = detail::horner(b, zk, &dp);
        if (pv == lcplx(0)) {
          done[static_cast<std::size_t>(k)] = true;
          --active;
          continue;
        }
        const lcplx newton = dp == lcplx(0) ? lcplx(1e-3L) : pv / dp;
        lcplx repulsion{};
        for (int j = 0; j < m; ++j) {
          if (j == k) continue;
          const lcplx diff = zk - z[static_cast<std::size_t>(j)];
          if (diff != lcplx(0)) repulsion += 1.0L / diff;
        }
        const lcplx step = newton / (1.0L - newton * repulsion);
        zk -= step;
        if (std::abs(step) <= 8 * eps * std::abs(zk) || std::abs(step) < 1e-300L) {
          done[static_cast<std::size_t>(k)] = true;
          --active;
        }
      }
    }
  }

  // Newton polish helps isolated roots; clustered ones are left for the merge test.
  for (auto& zk : z) {
    for (int it = 0; it < 3; ++it) {
      lcplx dp;
      const lcplx pv = detail::horner(b, zk, &dp);
      if (dp == lcplx(0)) break;
      const lcplx step = pv / dp;
      if (!std::isfinite(std::abs(step))) break;
      zk -= step;
    }
  }

  // Cluster candidates by single linkage, then accept a cluster of size k only if
  // p, p', ..., p^(k-1) all nearly vanish at its centroid.
  std::vector<int> parent(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&parent](int i) {
    while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
    return i;
  };
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j)
      if (std::abs(z[i] - z[j]) <= opt.cluster_radius * (1 + std::abs(z[i])))
        parent[static_cast<std::size_t>(find(static_cast<int>(i)))] = find(static_cast<int>(j));

  RootList out;
  std::vector<std::vector<std::size_t>> groups(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) groups[static_cast<std::size_t>(find(static_cast<int>(i)))].push_back(i);

  auto residual_of = [&a, n](lcplx r) {
    const long double mag = std::abs(r);
    return static_cast<double>(std::abs(detail::horner(a, r, nullptr)) / (1 + std::pow(mag, static_cast<long double>(n))));
  };
  auto emit = [&](lcplx value, int mult) {
    out.roots.push_back(Root{detail::narrow(value), mult, residual_of(value)});
  };

  for (const auto& g : groups) {
    if (g.empty()) continue;
    if (g.size() == 1) {
      emit(z[g.front()], 1);
      continue;
    }
    lcplx centroid{};
    for (auto idx : g) centroid += z[idx];
    centroid /= static_cast<long double>(g.size());
    bool multiple = true;
    for (int k = 0; k < static_cast<int>(g.size()) && multiple; ++k)
      multiple = detail::relative_derivative(b, centroid, k) <= opt.multiplicity_tol;
    if (multiple) {
      emit(centroid, static_cast<int>(g.size()));
      continue;
    }
    // Distinct close roots: still merge any pair that coincides to merge_radius.
    std::vector<std::pair<lcplx, int>> kept;
    for (auto idx : g) {
      auto hit = std::find_if(kept.begin(), kept.end(), [&](const auto& kv) {
        return std::abs(kv.first - z[idx]) <= opt.merge_radius * (1 + std::abs(z[idx]));
      });
      if (hit != kept.end()) ++hit->second;
      else kept.emplace_back(z[idx], 1);
    }
    for (const auto& [v, mlt] : kept) emit(v, mlt);
  }
  if (zero_mult > 0) out.roots.push_back(Root{cplx(0.0), zero_mult, 0.0});

  for (const auto& r : out.roots) {
    if (!(r.residual <= opt.residual_tol)) {
      throw Error(ErrorCode::DidNotConverge,
                  "root residual " + std::to_string(r.residual) + " after " + std::to_string(iterations) +
                      " Aberth iterations");
    }
  }
  std::sort(out.roots.begin(), out.roots.end(), [](const Root& l, const Root& r) {
    if (l.value.real() != r.value.real()) return l.value.real() < r.value.real();
    return l.value.imag() < r.value.imag();
  });
  return out;
}

}  // namespace caustica
