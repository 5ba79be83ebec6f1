#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "caustica/catalog.hpp"
#include "caustica/error.hpp"
#include "caustica/jacobian.hpp"
#include "caustica/solver.hpp"

namespace caustica {

struct BBox {
  double xmin = -4.0;
  double xmax = 4.0;
  double ymin = -4.0;
  double ymax = 4.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool valid() const { return xmax > xmin && ymax > ymin; }
  static BBox square(double half) { return {-half, half, -half, half}; }
};

inline constexpr double kDefaultPreimageHalfWidth = 4.0;
inline constexpr double kDefaultTargetHalfWidth = 6.0;
inline constexpr int kDefaultResolution = 128;

using Point2 = std::array<double, 2>;

/// Critical-curve points (ordered along polylines) and their caustic images.
struct CausticSample {
  std::vector<Point2> critical_points;
  std::vector<Point2> caustic_points;
  std::vector<double> det_jac;
  std::vector<std::size_t> polyline_starts;  // index of the first point of each polyline
  ParamVector params;
};

struct CausticOptions {
  int newton_steps = 5;
  int max_extra_steps = 20;
  double on_curve_tol = 1e-8;
};

namespace detail {

// Edge ids: horizontal edge (i,j)-(i+1,j) and vertical edge (i,j)-(i,j+1) on an (n+1)^2 vertex grid.
inline std::size_t h_edge(int i, int j, int n) { return 2 * (static_cast<std::size_t>(j) * (n + 1) + i); }
inline std::size_t v_edge(int i, int j, int n) { return 2 * (static_cast<std::size_t>(j) * (n + 1) + i) + 1; }

inline double real_jac(const BiPoly& jac, double x, double y) { return jac(cplx(x), cplx(y)).real(); }

}  // namespace detail

/// Marching squares on det Jac over the grid, then Newton steps along grad det Jac onto the zero set.
inline CausticSample critical_curve(const PlaneMap& m, const BBox& box, int resolution, const CausticOptions& opt = {}) {
  if (!box.valid()) throw Error(ErrorCode::InvalidArgument, "degenerate bounding box");
  if (resolution < 16) throw Error(ErrorCode::InvalidArgument, "resolution must be at least 16");
  const int n = resolution;
  const BiPoly& jac = m.jacobian_poly();
  const BiPoly jx = jac.partial(Var::x), jy = jac.partial(Var::y);
  const double dx = box.width() / n, dy = box.height() / n;
  auto gx = [&](int i) { return box.xmin + dx * i; };
  auto gy = [&](int j) { return box.ymin + dy * j; };

  std::vector<double> val(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) val[static_cast<std::size_t>(j) * (n + 1) + i] = detail::real_jac(jac, gx(i), gy(j));
  auto v = [&](int i, int j) { return val[static_cast<std::size_t>(j) * (n + 1) + i]; };
  auto positive = [&](int i, int j) { return v(i, j) >= 0.0; };

  // Crossing location on each edge with a sign change.
  std::map<std::size_t, Point2> crossing;
  auto edge_point = [&](std::size_t id) -> Point2 {
    auto it = crossing.find(id);
    if (it != crossing.end()) return it->second;
    const int cell = static_cast<int>(id / 2);
    const int i = cell % (n + 1), j = cell / (n + 1);
    Point2 p;
    if (id % 2 == 0) {
      const double t = v(i, j) / (v(i, j) - v(i + 1, j));
      p = {gx(i) + t * dx, gy(j)};
    } else {
      const double t = v(i, j) / (v(i, j) - v(i, j + 1));
      p = {gx(i), gy(j) + t * dy};
    }
    crossing.emplace(id, p);
    return p;
  };

  std::map<std::size_t, std::vector<std::size_t>> adjacency;
  auto link = [&](std::size_t a, std::size_t b) {
    edge_point(a);
    edge_point(b);
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  };

  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const bool s00 = positive(i, j), s10 = positive(i + 1, j), s11 = positive(i + 1, j + 1), s01 = positive(i, j + 1);
      const std::size_t bottom = detail::h_edge(i, j, n), top = detail::h_edge(i, j + 1, n);
      const std::size_t left = detail::v_edge(i, j, n), right = detail::v_edge(i + 1, j, n);
      std::vector<std::size_t> hits;
      if (s00 != s10) hits.push_back(bottom);
      if (s10 != s11) hits.push_back(right);
      if (s11 != s01) hits.push_back(top);
      if (s01 != s00) hits.push_back(left);
      if (hits.size() == 2) {
        link(hits[0], hits[1]);
      } else if (hits.size() == 4) {
        const double center = detail::real_jac(jac, gx(i) + 0.5 * dx, gy(j) + 0.5 * dy);
        if ((center >= 0.0) == s00) {
          link(bottom, right);
          link(top, left);
        } else {
          link(left, bottom);
          link(right, top);
        }
      }
    }
  }
  if (adjacency.empty()) throw Error(ErrorCode::EmptyCriticalSet, "det Jac has no sign change in the box");

  // Walk open chains from their endpoints first, then the closed loops.
  std::vector<std::vector<std::size_t>> chains;
  std::map<std::size_t, bool> seen;
  auto walk = [&](std::size_t start) {
    std::vector<std::size_t> chain{start};
    seen[start] = true;
    std::size_t prev = start, cur = start;
    while (true) {
      std::size_t next = cur;
      for (std::size_t nb : adjacency[cur])
        if (!seen[nb]) {
          next = nb;
          break;
        }
      if (next == cur) break;
      seen[next] = true;
      chain.push_back(next);
      prev = cur;
      cur = next;
    }
    (void)prev;
    chains.push_back(std::move(chain));
  };
  for (const auto& [id, nbs] : adjacency)
    if (nbs.size() == 1 && !seen[id]) walk(id);
  for (const auto& [id, nbs] : adjacency)
    if (!seen[id]) walk(id);

  CausticSample out;
  out.params = m.params();
  auto refine = [&](Point2 p) {
    for (int step = 0; step < opt.newton_steps + opt.max_extra_steps; ++step) {
      const double f = detail::real_jac(jac, p[0], p[1]);
      if (step >= opt.newton_steps && std::abs(f) <= opt.on_curve_tol) break;
      const double gxv = detail::real_jac(jx, p[0], p[1]), gyv = detail::real_jac(jy, p[0], p[1]);
      const double g2 = gxv * gxv + gyv * gyv;
      if (g2 == 0.0) break;
      p[0] -= f * gxv / g2;
      p[1] -= f * gyv / g2;
    }
    return p;
  };
  for (const auto& chain : chains) {
    bool started = false;
    for (std::size_t id : chain) {
      const Point2 p = refine(crossing[id]);
      const double f = detail::real_jac(jac, p[0], p[1]);
      if (!(std::abs(f) <= opt.on_curve_tol)) {
        started = false;
        continue;
      }
      if (!started) {
        out.polyline_starts.push_back(out.critical_points.size());
        started = true;
      } else {
        // A grid vertex on the curve is the crossing of both of its edges.
        const Point2& last = out.critical_points.back();
        if (std::abs(last[0] - p[0]) + std::abs(last[1] - p[1]) <= 1e-12 * (1 + std::abs(p[0]) + std::abs(p[1])))
          continue;
      }
      out.critical_points.push_back(p);
      out.caustic_points.push_back({m.f1()(cplx(p[0]), cplx(p[1])).real(), m.f2()(cplx(p[0]), cplx(p[1])).real()});
      out.det_jac.push_back(f);
    }
  }
  if (out.critical_points.empty()) throw Error(ErrorCode::EmptyCriticalSet, "no refined critical points");
  return out;
}

struct RegionCell {
  double s1 = 0.0;
  double s2 = 0.0;
  int real_count = 0;
  int complex_count = 0;  // all pre-images, with multiplicity
  double real_sum = 0.0;  // real-only signed magnification
  cplx all_sum;           // all-complex signed magnification
  double min_abs_jac = 0.0;
  bool flagged = false;  // near-caustic or solver failure; counts are not meaningful
  SolveStatus status = SolveStatus::Ok;
};

/// Per-cell real image counts and magnification sums over a target-plane grid, row-major in s2.
struct RegionMap {
  BBox bbox;
  int resolution = 0;
  std::vector<RegionCell> cells;

  const RegionCell& at(int i, int j) const { return cells[static_cast<std::size_t>(j) * resolution + i]; }
};

struct RegionOptions {
  SolverOptions solver;
  double near_caustic_jac = 1e-5;
  unsigned threads = 0;  // 0: hardware concurrency
};

inline RegionMap classify_regions(const PlaneMap& m, const BBox& box, int resolution, const RegionOptions& opt = {}) {
  if (!box.valid()) throw Error(ErrorCode::InvalidArgument, "degenerate bounding box");
  if (resolution < 16) throw Error(ErrorCode::InvalidArgument, "resolution must be at least 16");
  RegionMap rm;
  rm.bbox = box;
  rm.resolution = resolution;
  rm.cells.resize(static_cast<std::size_t>(resolution) * resolution);
  const double dx = box.width() / resolution, dy = box.height() / resolution;

  auto run_row = [&](int j) {
    for (int i = 0; i < resolution; ++i) {
      RegionCell& cell = rm.cells[static_cast<std::size_t>(j) * resolution + i];
      cell.s1 = box.xmin + (i + 0.5) * dx;
      cell.s2 = box.ymin + (j + 0.5) * dy;
      const PreimageSet ps = solve_preimages(m, TargetPoint{cell.s1, cell.s2}, opt.solver);
      cell.status = ps.status;
      cell.min_abs_jac = ps.min_abs_jac;
      cell.complex_count = ps.count_with_multiplicity();
      cell.real_count = ps.real_count();
      cell.flagged = ps.status != SolveStatus::Ok || ps.min_abs_jac < opt.near_caustic_jac;
      if (!cell.flagged) {
        cell.real_sum = total_signed_magnification(ps, MagMode::real_only).real();
        cell.all_sum = total_signed_magnification(ps, MagMode::all_complex);
      }
    }
  };

  unsigned workers = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(resolution));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int j = static_cast<int>(w); j < resolution; j += static_cast<int>(workers)) run_row(j);
    });
  for (auto& t : pool) t.join();
  return rm;
}

struct SweepRange {
  std::string param = "c";
  double lo = 0.0;
  double hi = 1.0;
  int steps = 10;
};

/// One CausticSample per value of the swept parameter; the other parameters stay frozen.
inline std::vector<CausticSample> caustic_metamorphosis_sweep(const FamilyId& id, const ParamVector& frozen,
                                                              const SweepRange& range, const BBox& box, int resolution,
                                                              const BuildOptions& build = {}) {
  if (range.steps < 1) throw Error(ErrorCode::InvalidArgument, "sweep needs at least one step");
  const auto names = required_params(id);
  if (std::find(names.begin(), names.end(), range.param) == names.end())
    throw Error(ErrorCode::ExtraParam, range.param + " is not a parameter of " + id.label());
  std::vector<CausticSample> out;
  for (int k = 0; k < range.steps; ++k) {
    const double value = range.steps == 1 ? range.lo
                        : k == range.steps - 1 ? range.hi
                                               : range.lo + (range.hi - range.lo) * k / (range.steps - 1);
    ParamVector p = frozen;
    p.set(range.param, value);
    out.push_back(critical_curve(build_family(id, p, build), box, resolution));
  }
  return out;
}

}  // namespace caustica
