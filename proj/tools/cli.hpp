#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "caustica/caustic.hpp"
#include "caustica/catalog.hpp"
#include "caustica/residue.hpp"
#include "caustica/sampling.hpp"
#include "caustica/solver.hpp"
#include "caustica/wproj.hpp"
#include "io.hpp"

namespace caustica::cli {

enum Exit : int {
  kOk = 0,
  kVerificationFailed = 1,
  kCausticTarget = 2,
  kDegenerateSystem = 3,
  kIoError = 4,
  kUsage = 5,
};

inline constexpr std::uint64_t kDefaultSeed = 1;

struct RunConfig {
  std::string family;
  int n = 0;
  std::string signs;
  std::string params;
  std::string target;
  std::string weights;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string format;
  std::string out;
  std::string bbox;
  int res = kDefaultResolution;
  std::string c_range = "0.2,2";
  int steps = 10;
  std::string sweep_param;
  bool regions = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw UsageError("not a number: '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw UsageError("not a number: '" + s + "'");
  }
}

inline std::vector<double> parse_doubles(const std::string& s, std::size_t count, const std::string& what) {
  const auto parts = split(s, ',');
  if (parts.size() != count) throw UsageError(what + " needs " + std::to_string(count) + " comma-separated numbers");
  std::vector<double> out;
  for (const auto& p : parts) out.push_back(parse_double(p));
  return out;
}

inline std::uint64_t parse_seed(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw UsageError("invalid seed '" + s + "'");
  return v;
}

/// "A", "A5", "D5", "E6", "E7", "elliptic", ... with --n and --signs ("+,-", "+-", "-").
inline FamilyId parse_family(const std::string& name, int n, const std::string& signs) {
  if (name.empty()) throw UsageError("--family is required");
  std::string kind = name;
  int idx = n;
  if ((name[0] == 'A' || name[0] == 'a' || name[0] == 'D' || name[0] == 'd') && name.size() > 1 &&
      std::isdigit(static_cast<unsigned char>(name[1]))) {
    kind = name.substr(0, 1);
    const int parsed = std::atoi(name.c_str() + 1);
    if (n != 0 && n != parsed) throw UsageError("--n disagrees with family " + name);
    idx = parsed;
  }
  FamilyId id;
  id.kind = parse_kind(kind);
  std::vector<int> sg;
  for (char ch : signs) {
    if (ch == '+') sg.push_back(1);
    else if (ch == '-') sg.push_back(-1);
    else if (ch != ',' && !std::isspace(static_cast<unsigned char>(ch)))
      throw UsageError("signs must be + or -");
  }
  switch (id.kind) {
    case FamilyKind::A:
      id.n = idx;
      if (sg.empty()) sg = {1, 1};
      break;
    case FamilyKind::D:
      id.n = idx;
      if (sg.empty()) sg = {1};
      break;
    case FamilyKind::E6:
      if (sg.empty()) sg = {1};
      break;
    default:
      break;
  }
  id.signs = sg;
  return FamilyId::checked(id);
}

inline ParamVector parse_params(const std::string& s) {
  ParamVector p;
  if (s.empty()) return p;
  for (const auto& item : split(s, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("parameter assignment must be name=value: '" + item + "'");
    p.set(item.substr(0, eq), parse_double(item.substr(eq + 1)));
  }
  return p;
}

inline BBox parse_bbox(const std::string& s, double default_half) {
  if (s.empty()) return BBox::square(default_half);
  const auto v = parse_doubles(s, 4, "--bbox");
  const BBox b{v[0], v[1], v[2], v[3]};
  if (!b.valid()) throw UsageError("--bbox must be xmin,xmax,ymin,ymax with min < max");
  return b;
}

/// --seed, then CAUSTICA_SEED, then the default.
inline std::uint64_t resolve_seed(const RunConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("CAUSTICA_SEED"); env && *env) return parse_seed(env);
  return kDefaultSeed;
}

/// Family, parameters and target; whatever is not given on the command line is drawn from the seed.
struct Instance {
  FamilyId id;
  ParamVector params;
  TargetPoint target;
  std::uint64_t seed = 0;
  SolverOptions solver;
};

inline Instance resolve_instance(const RunConfig& cfg, bool need_target = true, const std::string& skip_param = "") {
  Instance in;
  in.id = parse_family(cfg.family, cfg.n, cfg.signs);
  in.seed = resolve_seed(cfg);
  in.solver.seed = in.seed;
  Sampler sampler(in.seed);
  const SamplingOptions so;
  if (!cfg.params.empty()) {
    in.params = parse_params(cfg.params);
  } else {
    for (const auto& name : required_params(in.id)) {
      const double v = sampler.uniform(-so.param_half_width, so.param_half_width);
      if (name != skip_param) in.params.set(name, v);
    }
  }
  if (!cfg.target.empty()) {
    const auto t = parse_doubles(cfg.target, 2, "--target");
    in.target = TargetPoint{t[0], t[1]};
  } else if (need_target) {
    const PlaneMap m = build_family(in.id, in.params);
    for (int attempt = 0; attempt <= so.max_rejections; ++attempt) {
      in.target = sampler.target(so.target_half_width);
      if (solve_preimages(m, in.target, in.solver).status != SolveStatus::CausticTarget) break;
    }
  }
  return in;
}

inline void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out.empty() || cfg.out == "-") {
    out << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw IoError("cannot open '" + cfg.out + "' for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("write to '" + cfg.out + "' failed");
}

inline std::string format_or(const RunConfig& cfg, const std::string& fallback, std::initializer_list<const char*> allowed) {
  const std::string f = cfg.format.empty() ? fallback : cfg.format;
  for (const char* a : allowed)
    if (f == a) return f;
  throw UsageError("format '" + f + "' not supported by this command");
}

inline std::string fmt_complex(cplx z) {
  std::ostringstream os;
  os << std::setprecision(12) << z.real();
  if (z.imag() != 0.0) os << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

inline int cmd_families(const RunConfig& cfg, std::ostream& out) {
  const std::string format = format_or(cfg, "human", {"human", "json"});
  std::vector<FamilyId> ids;
  for (int n = 2; n <= 8; ++n) ids.push_back(FamilyId::A(n));
  for (int n = 4; n <= 8; ++n) ids.push_back(FamilyId::D(n));
  ids.push_back(FamilyId::E6());
  ids.push_back(FamilyId::E7());
  ids.push_back(FamilyId::E8());
  ids.push_back(FamilyId::elliptic_umbilic());
  ids.push_back(FamilyId::hyperbolic_umbilic());

  io::json rows = io::json::array();
  std::ostringstream human;
  human << std::left << std::setw(18) << "family" << std::setw(10) << "weights" << std::setw(10) << "degrees"
        << std::setw(7) << "count" << "params\n";
  for (const auto& id : ids) {
    ParamVector p;
    for (const auto& name : required_params(id)) p.set(name, 1.0);
    const PlaneMap m = build_family(id, p);
    const auto names = required_params(id);
    std::string plist;
    for (const auto& nm : names) plist += (plist.empty() ? "" : ",") + nm;
    std::string name = id.is_lensing() ? id.label() : kind_name(id.kind);
    if (id.kind == FamilyKind::A || id.kind == FamilyKind::D) name += std::to_string(id.n);
    const std::string signs = id.kind == FamilyKind::A ? "(+-,+-)" : (id.kind == FamilyKind::D || id.kind == FamilyKind::E6) ? "+-" : "";
    rows.push_back({{"family", name},
                    {"signs", signs},
                    {"params", names},
                    {"weights", io::weights_json(m.weights())},
                    {"degrees", {m.d1(), m.d2()}},
                    {"count", m.expected_count()}});
    human << std::setw(18) << (name + signs) << std::setw(10) << m.weights().to_string() << std::setw(10)
          << ("(" + std::to_string(m.d1()) + "," + std::to_string(m.d2()) + ")") << std::setw(7) << m.expected_count()
          << plist << "\n";
  }
  if (format == "json") emit(cfg, out, io::json{{"schema_version", io::kSchemaVersion}, {"artifact", "families"}, {"families", rows}}.dump(2) + "\n");
  else emit(cfg, out, human.str());
  return kOk;
}

inline int status_exit(SolveStatus s) {
  switch (s) {
    case SolveStatus::Ok: return kOk;
    case SolveStatus::CausticTarget: return kCausticTarget;
    case SolveStatus::DegenerateSystem: return kDegenerateSystem;
  }
  return kVerificationFailed;
}

inline int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const std::string format = format_or(cfg, "json", {"json", "human", "csv"});
  const Instance in = resolve_instance(cfg);
  const PlaneMap m = build_family(in.id, in.params);
  const PreimageSet ps = solve_preimages(m, in.target, in.solver);
  if (format == "json") {
    io::json j = io::preimage_set_json(ps, in.params);
    j["seed"] = in.seed;
    emit(cfg, out, j.dump(2) + "\n");
  } else if (format == "csv") {
    std::ostringstream os;
    os << "x_re,x_im,y_re,y_im,magnification_re,magnification_im,jac_det_re,jac_det_im,is_real,multiplicity\n";
    for (const auto& p : ps.preimages)
      os << io::num(p.x.real()) << ',' << io::num(p.x.imag()) << ',' << io::num(p.y.real()) << ','
         << io::num(p.y.imag()) << ',' << io::num(p.magnification.real()) << ',' << io::num(p.magnification.imag())
         << ',' << io::num(p.jac_det.real()) << ',' << io::num(p.jac_det.imag()) << ',' << (p.is_real ? 1 : 0) << ','
         << p.multiplicity << '\n';
    emit(cfg, out, os.str());
  } else {
    std::ostringstream os;
    os << ps.family.label() << " at s = (" << fmt_complex(in.target.s1) << ", " << fmt_complex(in.target.s2)
       << "): " << to_string(ps.status) << ", " << ps.count_with_multiplicity() << " of " << ps.bezout_expected
       << " pre-images, " << ps.real_count() << " real\n";
    for (const auto& p : ps.preimages)
      os << "  x = " << fmt_complex(p.x) << ", y = " << fmt_complex(p.y) << ", M = " << fmt_complex(p.magnification)
         << (p.multiplicity > 1 ? "  (multiplicity " + std::to_string(p.multiplicity) + ")" : "") << "\n";
    if (ps.status == SolveStatus::Ok)
      os << "  sum M = " << fmt_complex(total_signed_magnification(ps, MagMode::all_complex)) << "\n";
    else
      os << "  " << ps.diagnostic << "\n";
    emit(cfg, out, os.str());
  }
  return status_exit(ps.status);
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const std::string format = format_or(cfg, "json", {"json", "human"});
  const Instance in = resolve_instance(cfg);
  const PlaneMap m = build_family(in.id, in.params);
  GrtOptions go;
  go.solver = in.solver;
  if (cfg.tol) go.tol_rel = *cfg.tol;
  const ResidueReport r = verify_grt(m, in.target, std::nullopt, go);
  if (format == "json") {
    io::json j = io::residue_report_json(r, in.params);
    j["seed"] = in.seed;
    emit(cfg, out, j.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << r.family.label() << " in WP" << r.weights.to_string() << ", degrees (" << r.d1 << "," << r.d2
       << "): " << to_string(r.grt_verdict) << "\n  sum of residues = " << fmt_complex(r.affine_residue_sum)
       << " (tolerance " << r.tolerance << ", " << r.preimage_count << " pre-images)\n  "
       << (r.verified() ? "verified" : "NOT verified") << "\n";
    emit(cfg, out, os.str());
  }
  return r.verified() ? kOk : kVerificationFailed;
}

inline int cmd_infinity(const RunConfig& cfg, std::ostream& out) {
  const std::string format = format_or(cfg, "json", {"json", "human"});
  const Instance in = resolve_instance(cfg);
  const PlaneMap m = build_family(in.id, in.params);
  io::InfinityReport r;
  r.family = in.id;
  if (cfg.weights.empty()) {
    r.weights = m.weights();
  } else {
    const auto w = parse_doubles(cfg.weights, 3, "--weights");
    for (double v : w)
      if (v != std::floor(v)) throw UsageError("weights must be integers");
    r.weights = Weights::make(static_cast<int>(w[0]), static_cast<int>(w[1]), static_cast<int>(w[2]));
  }
  r.pair = homogenize(m, in.target, r.weights);
  r.roots = roots_at_infinity(r.pair);
  r.singular = singular_points(r.weights);
  if (format == "json") {
    emit(cfg, out, io::infinity_report_json(r, in.params, in.target).dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << in.id.label() << " in WP" << r.weights.to_string() << "\n  q1 = " << r.pair.q1.to_string()
       << "\n  q2 = " << r.pair.q2.to_string() << "\n  roots at infinity:";
    if (r.roots.empty()) os << " none";
    for (const auto& p : r.roots) os << " " << p.label();
    os << "\n  singular points:";
    if (r.singular.empty()) os << " none";
    for (const auto& p : r.singular) os << " " << p.label() << " Z/" << p.local_group_order;
    os << "\n";
    emit(cfg, out, os.str());
  }
  return kOk;
}

inline int cmd_caustic(const RunConfig& cfg, std::ostream& out) {
  const std::string format = format_or(cfg, "csv", {"csv", "json"});
  const Instance in = resolve_instance(cfg, false);
  const PlaneMap m = build_family(in.id, in.params);
  if (cfg.regions) {
    RegionOptions ro;
    ro.solver = in.solver;
    const RegionMap rm = classify_regions(m, parse_bbox(cfg.bbox, kDefaultTargetHalfWidth), cfg.res, ro);
    if (format == "json") emit(cfg, out, io::regions_json(rm, in.id, in.params).dump(2) + "\n");
    else {
      std::ostringstream os;
      io::write_regions_csv(os, rm);
      emit(cfg, out, os.str());
    }
    return kOk;
  }
  const std::vector<CausticSample> samples{critical_curve(m, parse_bbox(cfg.bbox, kDefaultPreimageHalfWidth), cfg.res)};
  if (format == "json") emit(cfg, out, io::caustic_json(samples, in.id).dump(2) + "\n");
  else {
    std::ostringstream os;
    io::write_caustic_csv(os, samples);
    emit(cfg, out, os.str());
  }
  return kOk;
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const std::string format = format_or(cfg, "csv", {"csv", "json"});
  const FamilyId id = parse_family(cfg.family, cfg.n, cfg.signs);
  const auto names = required_params(id);
  if (names.empty()) throw UsageError(id.label() + " has no parameter to sweep");
  SweepRange range;
  range.param = cfg.sweep_param.empty() ? names.front() : cfg.sweep_param;
  const auto cr = parse_doubles(cfg.c_range, 2, "--c-range");
  range.lo = cr[0];
  range.hi = cr[1];
  range.steps = cfg.steps;
  Instance in = resolve_instance(cfg, false, range.param);
  ParamVector frozen;
  for (const auto& [k, v] : in.params.values())
    if (k != range.param) frozen.set_complex(k, v);
  const auto samples =
      caustic_metamorphosis_sweep(id, frozen, range, parse_bbox(cfg.bbox, kDefaultPreimageHalfWidth), cfg.res);
  if (format == "json") emit(cfg, out, io::caustic_json(samples, id).dump(2) + "\n");
  else {
    std::ostringstream os;
    io::write_caustic_csv(os, samples);
    emit(cfg, out, os.str());
  }
  return kOk;
}

inline int exit_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::CausticTarget:
    case ErrorCode::OnCriticalCurve:
    case ErrorCode::NonSimpleRoot: return kCausticTarget;
    case ErrorCode::DegenerateSystem:
    case ErrorCode::DidNotConverge: return kDegenerateSystem;
    default: return kUsage;
  }
}

inline void add_instance_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--family", cfg.family, "A, D, E6, E7, E8, elliptic, hyperbolic (A5, D4 accepted)")->required();
  sub->add_option("--n", cfg.n, "index for A_n and D_n");
  sub->add_option("--signs", cfg.signs, "sign choices, e.g. +,- for A_n");
  sub->add_option("--params", cfg.params, "k=v,... (drawn from the seed when omitted)");
  sub->add_option("--seed", cfg.seed, "64-bit seed (falls back to CAUSTICA_SEED)");
  sub->add_option("--format", cfg.format, "json, csv or human");
  sub->add_option("--out", cfg.out, "output path (stdout when omitted)");
}

/// Parses argv and runs one subcommand. Never throws; the return value is the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"caustica: pre-images, magnification relations and caustics of the A, D, E singularity maps"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto* families = app.add_subcommand("families", "list families, weights, weighted degrees and image counts");
  families->add_option("--format", cfg.format, "human or json");
  families->add_option("--out", cfg.out, "output path");

  auto* solve = app.add_subcommand("solve", "all complex pre-images of a target with magnifications");
  add_instance_options(solve, cfg);
  solve->add_option("--target", cfg.target, "s1,s2");

  auto* verify = app.add_subcommand("verify", "residue-theorem check of the vanishing magnification sum");
  add_instance_options(verify, cfg);
  verify->add_option("--target", cfg.target, "s1,s2");
  verify->add_option("--tol", cfg.tol, "relative tolerance of the residue sum (default 1e-9)");

  auto* infinity = app.add_subcommand("infinity", "roots at infinity and singular points in weighted projective space");
  add_instance_options(infinity, cfg);
  infinity->add_option("--target", cfg.target, "s1,s2");
  infinity->add_option("--weights", cfg.weights, "a0,a1,1 (assigned weights when omitted)");

  auto* caustic = app.add_subcommand("caustic", "critical curve and caustic points, or a region map with --regions");
  add_instance_options(caustic, cfg);
  caustic->add_option("--bbox", cfg.bbox, "xmin,xmax,ymin,ymax");
  caustic->add_option("--res", cfg.res, "grid resolution (>= 16)");
  caustic->add_flag("--regions", cfg.regions, "classify target cells by real pre-image count");

  auto* sweep = app.add_subcommand("sweep", "caustics along one parameter, others frozen");
  add_instance_options(sweep, cfg);
  sweep->add_option("--bbox", cfg.bbox, "xmin,xmax,ymin,ymax");
  sweep->add_option("--res", cfg.res, "grid resolution (>= 16)");
  sweep->add_option("--c-range", cfg.c_range, "lo,hi");
  sweep->add_option("--steps", cfg.steps, "number of parameter values");
  sweep->add_option("--sweep-param", cfg.sweep_param, "parameter to vary (default: the first one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*families) return cmd_families(cfg, out);
    if (*solve) return cmd_solve(cfg, out);
    if (*verify) return cmd_verify(cfg, out);
    if (*infinity) return cmd_infinity(cfg, out);
    if (*caustic) return cmd_caustic(cfg, out);
    if (*sweep) return cmd_sweep(cfg, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace caustica::cli
