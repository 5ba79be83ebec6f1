#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "caustica/caustic.hpp"
#include "caustica/catalog.hpp"
#include "caustica/residue.hpp"
#include "caustica/solver.hpp"
#include "caustica/wproj.hpp"
#include "json.hpp"

namespace caustica::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Non-finite doubles become null.
inline json real_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline double real_from(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

inline json complex_json(cplx z) { return json{{"re", real_json(z.real())}, {"im", real_json(z.imag())}}; }

inline cplx complex_from(const json& j) { return {real_from(j.at("re")), real_from(j.at("im"))}; }

inline json family_json(const FamilyId& id) {
  return json{{"label", id.label()}, {"kind", kind_name(id.kind)}, {"n", id.n}, {"signs", id.signs}};
}

inline FamilyId family_from(const json& j) {
  FamilyId id;
  id.kind = parse_kind(j.at("kind").get<std::string>());
  id.n = j.at("n").get<int>();
  id.signs = j.at("signs").get<std::vector<int>>();
  return FamilyId::checked(id);
}

inline json params_json(const ParamVector& p) {
  json out = json::object();
  for (const auto& [k, v] : p.values()) out[k] = complex_json(v);
  return out;
}

inline ParamVector params_from(const json& j) {
  ParamVector p;
  for (const auto& [k, v] : j.items()) p.set_complex(k, complex_from(v));
  return p;
}

inline json target_json(const TargetPoint& s) { return json{{"s1", complex_json(s.s1)}, {"s2", complex_json(s.s2)}}; }

inline TargetPoint target_from(const json& j) { return {complex_from(j.at("s1")), complex_from(j.at("s2"))}; }

inline json weights_json(const Weights& w) { return json::array({w.a0, w.a1, w.a2}); }

inline json preimage_set_json(const PreimageSet& ps, const ParamVector& params) {
  json pre = json::array();
  for (const auto& p : ps.preimages)
    pre.push_back({{"x", complex_json(p.x)},
                   {"y", complex_json(p.y)},
                   {"magnification", complex_json(p.magnification)},
                   {"jac_det", complex_json(p.jac_det)},
                   {"residual", real_json(p.residual)},
                   {"is_real", p.is_real},
                   {"multiplicity", p.multiplicity}});
  json out{{"schema_version", kSchemaVersion},
           {"artifact", "preimages"},
           {"family", family_json(ps.family)},
           {"params", params_json(params)},
           {"target", target_json(ps.target)},
           {"status", to_string(ps.status)},
           {"bezout_expected", ps.bezout_expected},
           {"count", ps.count_with_multiplicity()},
           {"real_count", ps.real_count()},
           {"min_abs_jac", real_json(ps.min_abs_jac)},
           {"preimages", pre}};
  if (!ps.diagnostic.empty()) out["diagnostic"] = ps.diagnostic;
  if (ps.status == SolveStatus::Ok) {
    out["total_magnification"] = complex_json(total_signed_magnification(ps, MagMode::all_complex));
    out["real_magnification"] = complex_json(total_signed_magnification(ps, MagMode::real_only));
  }
  return out;
}

inline PreimageSet preimage_set_from(const json& j) {
  PreimageSet ps;
  ps.family = family_from(j.at("family"));
  ps.target = target_from(j.at("target"));
  ps.bezout_expected = j.at("bezout_expected").get<int>();
  const std::string status = j.at("status").get<std::string>();
  ps.status = status == "Ok" ? SolveStatus::Ok
              : status == "CausticTarget" ? SolveStatus::CausticTarget
                                          : SolveStatus::DegenerateSystem;
  if (j.contains("diagnostic")) ps.diagnostic = j.at("diagnostic").get<std::string>();
  ps.min_abs_jac = real_from(j.at("min_abs_jac"));
  for (const auto& e : j.at("preimages")) {
    Preimage p;
    p.x = complex_from(e.at("x"));
    p.y = complex_from(e.at("y"));
    p.magnification = complex_from(e.at("magnification"));
    p.jac_det = complex_from(e.at("jac_det"));
    p.residual = real_from(e.at("residual"));
    p.is_real = e.at("is_real").get<bool>();
    p.multiplicity = e.at("multiplicity").get<int>();
    ps.preimages.push_back(p);
  }
  return ps;
}

inline json infinity_point_json(const InfinityPoint& p) {
  return json{{"label", p.label()}, {"X", complex_json(p.X)}, {"Y", complex_json(p.Y)},
              {"chart", p.chart == Chart::Y1 ? "Y=1" : "X=1"}};
}

inline json residue_report_json(const ResidueReport& r, const ParamVector& params) {
  json inf = json::array();
  for (const auto& p : r.infinity_roots) inf.push_back(infinity_point_json(p));
  return json{{"schema_version", kSchemaVersion},
              {"artifact", "residue_report"},
              {"family", family_json(r.family)},
              {"params", params_json(params)},
              {"target", target_json(r.target)},
              {"weights", weights_json(r.weights)},
              {"d1", r.d1},
              {"d2", r.d2},
              {"numerator", r.numerator.to_string()},
              {"numerator_degree", r.numerator_degree},
              {"affine_residue_sum", complex_json(r.affine_residue_sum)},
              {"max_abs_residue", r.max_abs_residue},
              {"tolerance", r.tolerance},
              {"numeric_ok", r.numeric_ok},
              {"infinity_roots", inf},
              {"verdict", to_string(r.grt_verdict)},
              {"preimage_count", r.preimage_count},
              {"verified", r.verified()}};
}

struct InfinityReport {
  FamilyId family;
  Weights weights;
  WeightedHomogPair pair;
  std::vector<InfinityPoint> roots;
  std::vector<SingularPoint> singular;
};

inline json infinity_report_json(const InfinityReport& r, const ParamVector& params, const TargetPoint& s) {
  json roots = json::array(), sing = json::array();
  for (const auto& p : r.roots) roots.push_back(infinity_point_json(p));
  for (const auto& p : r.singular) sing.push_back({{"label", p.label()}, {"local_group_order", p.local_group_order}});
  json out{{"schema_version", kSchemaVersion},
           {"artifact", "infinity"},
           {"family", family_json(r.family)},
           {"params", params_json(params)},
           {"target", target_json(s)},
           {"weights", weights_json(r.weights)},
           {"d1", r.pair.d1},
           {"d2", r.pair.d2},
           {"q1", r.pair.q1.to_string()},
           {"q2", r.pair.q2.to_string()},
           {"infinity_roots", roots},
           {"singular_points", sing}};
  if (r.roots.empty()) {
    try {
      out["weighted_bezout"] = weighted_bezout(r.pair);
    } catch (const Error& e) {
      out["weighted_bezout_error"] = e.what();
    }
  }
  return out;
}

/// Shortest round-trip decimal form, as the JSON writer uses.
inline std::string num(double v) { return json(v).dump(); }

inline void write_caustic_csv(std::ostream& os, const std::vector<CausticSample>& samples, bool header = true) {
  if (header) os << "step,x,y,s1,s2,det_jac\n";
  for (std::size_t step = 0; step < samples.size(); ++step) {
    const auto& s = samples[step];
    for (std::size_t i = 0; i < s.critical_points.size(); ++i)
      os << step << ',' << num(s.critical_points[i][0]) << ',' << num(s.critical_points[i][1]) << ','
         << num(s.caustic_points[i][0]) << ',' << num(s.caustic_points[i][1]) << ',' << num(s.det_jac[i]) << '\n';
  }
}

inline json caustic_json(const std::vector<CausticSample>& samples, const FamilyId& id) {
  json steps = json::array();
  for (const auto& s : samples) {
    json pts = json::array();
    for (std::size_t i = 0; i < s.critical_points.size(); ++i)
      pts.push_back({s.critical_points[i][0], s.critical_points[i][1], s.caustic_points[i][0], s.caustic_points[i][1],
                     s.det_jac[i]});
    steps.push_back({{"params", params_json(s.params)}, {"polyline_starts", s.polyline_starts}, {"points", pts}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"artifact", "caustic"},
              {"family", family_json(id)},
              {"point_columns", {"x", "y", "s1", "s2", "det_jac"}},
              {"steps", steps}};
}

inline void write_regions_csv(std::ostream& os, const RegionMap& rm) {
  os << "i,j,s1,s2,real_count,complex_count,flagged,real_sum,all_sum_re,all_sum_im,min_abs_jac\n";
  for (int j = 0; j < rm.resolution; ++j)
    for (int i = 0; i < rm.resolution; ++i) {
      const auto& c = rm.at(i, j);
      os << i << ',' << j << ',' << num(c.s1) << ',' << num(c.s2) << ',' << c.real_count << ',' << c.complex_count
         << ',' << (c.flagged ? 1 : 0) << ',' << num(c.real_sum) << ',' << num(c.all_sum.real()) << ','
         << num(c.all_sum.imag()) << ',' << num(c.min_abs_jac) << '\n';
    }
}

inline json regions_json(const RegionMap& rm, const FamilyId& id, const ParamVector& params) {
  json cells = json::array();
  for (const auto& c : rm.cells)
    cells.push_back({{"s1", c.s1},
                     {"s2", c.s2},
                     {"real_count", c.real_count},
                     {"complex_count", c.complex_count},
                     {"flagged", c.flagged},
                     {"status", to_string(c.status)},
                     {"real_sum", c.real_sum},
                     {"all_sum", complex_json(c.all_sum)},
                     {"min_abs_jac", real_json(c.min_abs_jac)}});
  return json{{"schema_version", kSchemaVersion},
              {"artifact", "regions"},
              {"family", family_json(id)},
              {"params", params_json(params)},
              {"bbox", {rm.bbox.xmin, rm.bbox.xmax, rm.bbox.ymin, rm.bbox.ymax}},
              {"resolution", rm.resolution},
              {"cells", cells}};
}

}  // namespace caustica::io
