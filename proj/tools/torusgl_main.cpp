// Command-line front end: construct self-dual minimizers, sweep the slope
// integrand, emit phase-diagram data, and run the verification battery.
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "torusgl/torusgl.hpp"

using nlohmann::ordered_json;
using namespace tgl;

namespace {

struct CommonOpts {
  std::string lattice = "square";
  double basis_u = 0.0;  // explicit basis overrides the preset when set
  double basis_w = 0.0;
  bool basis_given = false;
  int grid = 64;
  int theta_trunc = 10;
  double tol = 1e-10;
  std::string out;
  std::string format = "csv";
  int jobs = 1;
  std::string config_path;
};

// config file setters, keyed by the long option name without dashes
using Setters = std::map<std::string, std::function<void(const std::string&)>>;

double cfg_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw config_error("config: bad numeric value for " + key + ": " + v);
  }
}

int cfg_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw config_error("config: bad integer value for " + key + ": " + v);
  }
}

void add_common(CLI::App* sub, CommonOpts& o, Setters& set) {
  sub->add_option("--lattice", o.lattice, "lattice preset: square or hex");
  sub->add_option("--u", o.basis_u, "explicit basis: horizontal period (with --w)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--w", o.basis_w, "explicit basis: shear of the second vector");
  sub->add_option("--grid", o.grid, "samples per direction");
  sub->add_option("--theta-trunc", o.theta_trunc, "theta series truncation");
  sub->add_option("--tol", o.tol, "solver residual tolerance");
  sub->add_option("--out", o.out, "output path (default: TORUSGL_OUT dir or cwd)");
  sub->add_option("--format", o.format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--jobs", o.jobs, "worker threads for independent sub-tasks")
      ->check(CLI::PositiveNumber);
  sub->add_option("--config", o.config_path,
                  "key=value configuration file; flags take precedence");

  set["lattice"] = [&o](const std::string& v) { o.lattice = v; };
  set["u"] = [&o](const std::string& v) {
    o.basis_u = cfg_double("u", v);
    o.basis_given = true;
  };
  set["w"] = [&o](const std::string& v) { o.basis_w = cfg_double("w", v); };
  set["grid"] = [&o](const std::string& v) { o.grid = cfg_int("grid", v); };
  set["theta-trunc"] = [&o](const std::string& v) {
    o.theta_trunc = cfg_int("theta-trunc", v);
  };
  set["tol"] = [&o](const std::string& v) { o.tol = cfg_double("tol", v); };
  set["out"] = [&o](const std::string& v) { o.out = v; };
  set["format"] = [&o](const std::string& v) {
    if (v != "csv" && v != "json")
      throw config_error("config: format must be csv or json, got " + v);
    o.format = v;
  };
  set["jobs"] = [&o](const std::string& v) { o.jobs = cfg_int("jobs", v); };
}

std::string trimmed(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// apply config values to options not already given on the command line
void apply_config(CLI::App* sub, const std::string& path, const Setters& set) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trimmed(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) +
                         ": expected key=value");
    const std::string key = trimmed(line.substr(0, eq));
    const std::string value = trimmed(line.substr(eq + 1));
    const auto it = set.find(key);
    if (it == set.end())
      throw config_error("config line " + std::to_string(lineno) +
                         ": unknown key " + key);
    if (sub->count("--" + key) > 0) continue;
    it->second(value);
  }
}

Lattice resolve_lattice(const CommonOpts& o) {
  if (o.basis_given) return make_lattice(o.basis_u, o.basis_w);
  return lattice_preset(o.lattice);
}

SolverConfig resolve_config(const CommonOpts& o) {
  SolverConfig cfg;
  cfg.grid_n = o.grid;
  cfg.theta.truncation = o.theta_trunc;
  cfg.tol_residual = o.tol;
  if (!(o.tol > 0.0)) throw config_error("tolerance must be positive");
  return cfg;
}

std::string out_path(const std::string& flag_out, const std::string& fallback) {
  if (!flag_out.empty()) return flag_out;
  const char* dir = std::getenv("TORUSGL_OUT");
  if (dir && *dir) return std::string(dir) + "/" + fallback;
  return fallback;
}

std::vector<double> parse_value_list(const std::string& spec) {
  std::vector<double> vals;
  if (spec.find(':') != std::string::npos) {
    double a, b, step;
    char c1, c2;
    std::istringstream is(spec);
    if (!(is >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0)
      throw config_error("bad range spec (want start:stop:step): " + spec);
    const double dir = (b >= a) ? 1.0 : -1.0;
    for (double v = a; dir * (v - b) <= 1e-12; v += dir * step) vals.push_back(v);
  } else {
    std::istringstream is(spec);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      if (tok.empty()) continue;
      vals.push_back(std::stod(tok));
    }
  }
  if (vals.empty()) throw config_error("empty value list: " + spec);
  return vals;
}

void parallel_for(int jobs, int count, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<size_t>(jobs));
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------- solve ----

int cmd_solve(const CommonOpts& o, double H, const std::string& fields_path) {
  const Lattice lat = resolve_lattice(o);
  const SolverConfig cfg = resolve_config(o);
  const SolutionPair p = build_pair(lat, H, cfg);

  EnergyReport rep = energy_total(p.u, p.a, kInvSqrt2, p.H_int, p.H_int, &p.curl_a);
  rep.a_plus = a_plus(p.u, p.a, p.H_int, &p.curl_a);
  rep.bkn_defect = bkn_defect(p.u, p.a, p.H_int, &p.curl_a);
  const GlResidual gl = gl_residual(p.u, p.a, kInvSqrt2, p.H_int, &p.curl_a);

  ordered_json j;
  j["H_int"] = p.H_int;
  j["mu"] = p.mu;
  j["grid_n"] = p.grid.n;
  j["theta_truncation"] = p.theta.truncation;
  j["degenerate"] = p.degenerate;
  j["int_u2"] = p.int_u2;
  j["int_u2_expected"] = 1.0 - kSqrt2 * p.H_int;
  j["int_potential_raw"] = p.int_one_minus_u2_sq;
  j["int_curl2"] = p.int_curl2;
  j["energy"] = report_to_json(rep);
  j["chi"] = chi(p);
  j["pde_residual"] = p.pde_residual;
  j["dplus_max"] = p.dplus_max;
  j["second_bog_max"] = p.second_bog_max;
  j["gl_field_eq"] = gl.field_eq;
  j["gl_gauge_eq"] = gl.gauge_eq;
  if (p.degenerate) {
    j["zero"] = nullptr;
  } else {
    j["zero"] = {{"x", p.zero.x}, {"y", p.zero.y}, {"s", p.zero.s},
                 {"t", p.zero.t}, {"winding", p.zero.winding}};
  }
  j["solver"] = {{"newton_iterations", p.diag.newton_iterations},
                 {"cg_iterations", p.diag.cg_iterations},
                 {"residual_history", p.diag.residual_history}};

  if (o.format == "json") {
    write_text_file(out_path(o.out, "solve.json"), j.dump(2) + "\n");
  } else {
    std::vector<std::string> keys, vals;
    auto put = [&](const std::string& k, double v) {
      keys.push_back(k);
      vals.push_back(sci(v));
    };
    put("H_int", p.H_int);
    put("mu", p.mu);
    keys.push_back("grid_n");
    vals.push_back(std::to_string(p.grid.n));
    keys.push_back("degenerate");
    vals.push_back(p.degenerate ? "1" : "0");
    put("int_u2", p.int_u2);
    put("int_u2_expected", 1.0 - kSqrt2 * p.H_int);
    put("kinetic", rep.kinetic);
    put("potential", rep.potential);
    put("field", rep.field);
    put("internal", rep.internal);
    put("magnetic_gap", rep.magnetic_gap);
    put("total", rep.total);
    put("a_plus", rep.a_plus);
    put("bkn_defect", rep.bkn_defect);
    put("chi", chi(p));
    put("pde_residual", p.pde_residual);
    put("dplus_max", p.dplus_max);
    put("second_bog_max", p.second_bog_max);
    put("gl_field_eq", gl.field_eq);
    put("gl_gauge_eq", gl.gauge_eq);
    put("zero_x", p.degenerate ? std::nan("") : p.zero.x);
    put("zero_y", p.degenerate ? std::nan("") : p.zero.y);
    std::string header;
    for (size_t i = 0; i < keys.size(); ++i) header += (i ? "," : "") + keys[i];
    write_text_file(out_path(o.out, "solve.csv"), csv_table(header, {vals}));
  }

  if (!fields_path.empty()) {
    std::vector<std::vector<std::string>> rows;
    const Grid& g = p.grid;
    rows.reserve(static_cast<size_t>(g.size()));
    for (int i = 0; i < g.n; ++i)
      for (int jj = 0; jj < g.n; ++jj) {
        const int k = g.idx(i, jj);
        rows.push_back({sci(g.s(i)), sci(g.t(jj)), sci(g.x(i, jj)), sci(g.y(i, jj)),
                        sci(p.u.v[k].real()), sci(p.u.v[k].imag()),
                        sci(std::abs(p.u.v[k])), sci(p.f.v[k]), sci(p.a.x[k]),
                        sci(p.a.y[k]), sci(p.curl_a.v[k])});
      }
    write_text_file(fields_path,
                    csv_table("s,t,x,y,re_u,im_u,abs_u,f,a_x,a_y,curl_a", rows));
  }

  std::cout << "solved H_int=" << sci(p.H_int) << " internal=" << sci(rep.internal)
            << " int_u2=" << sci(p.int_u2)
            << (p.degenerate ? " (degenerate endpoint branch)" : "") << "\n";
  return 0;
}

// ------------------------------------------------------------ chi sweep ----

int cmd_chi_sweep(const CommonOpts& o, const std::string& h_grid_spec) {
  const Lattice lat = resolve_lattice(o);
  const SolverConfig cfg = resolve_config(o);
  const std::vector<double> H =
      h_grid_spec.empty() ? default_H_grid() : parse_value_list(h_grid_spec);
  const SEstimate est = estimate_S(lat, H, cfg);

  if (o.format == "json") {
    ordered_json j;
    j["rows"] = ordered_json::array();
    for (const auto& r : est.rows)
      j["rows"].push_back({{"H_int", r.H_int},
                           {"chi", r.chi},
                           {"curl_energy", r.curl_energy},
                           {"grid_n", r.grid_n}});
    j["S_grid"] = est.grid_sup;
    j["S_extrapolated"] = est.extrapolated;
    j["complete"] = est.complete;
    if (!est.complete) j["error"] = est.error;
    write_text_file(out_path(o.out, "chi_sweep.json"), j.dump(2) + "\n");
  } else {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : est.rows)
      rows.push_back({sci(r.H_int), sci(r.chi), sci(r.curl_energy)});
    std::vector<std::string> trailer = {"# S_grid = " + sci(est.grid_sup),
                                        "# S_extrapolated = " + sci(est.extrapolated)};
    if (!est.complete) trailer.push_back("# incomplete: " + est.error);
    write_text_file(out_path(o.out, "chi_sweep.csv"),
                    csv_table("H_int,chi,curl_energy", rows, trailer));
  }
  std::cout << "chi sweep: " << est.rows.size() << " rows, S_grid="
            << sci(est.grid_sup) << " S_extrapolated=" << sci(est.extrapolated)
            << "\n";
  if (!est.complete) {
    ordered_json diag;
    diag["error"] = "solver_failure";
    diag["message"] = est.error;
    diag["completed_rows"] = est.rows.size();
    std::cerr << diag.dump() << "\n";
    return 3;
  }
  return 0;
}

// ---------------------------------------------------------------- phase ----

int cmd_phase(const CommonOpts& o, const std::string& k_range_spec,
              const std::string& h_grid_spec,
              const std::vector<std::string>& classify_specs) {
  const Lattice lat = resolve_lattice(o);
  const SolverConfig cfg = resolve_config(o);
  const std::vector<double> H =
      h_grid_spec.empty() ? default_H_grid() : parse_value_list(h_grid_spec);
  const SEstimate est = estimate_S(lat, H, cfg);
  if (!est.complete) {
    ordered_json diag;
    diag["error"] = "solver_failure";
    diag["message"] = est.error;
    std::cerr << diag.dump() << "\n";
    return 3;
  }

  const std::vector<double> ks = parse_value_list(
      k_range_spec.empty() ? std::string("0.3:2.0:0.05") : k_range_spec);
  std::vector<DiagramRow> rows(ks.size());
  parallel_for(o.jobs, static_cast<int>(ks.size()), [&](int i) {
    rows[static_cast<size_t>(i)] =
        diagram_rows({ks[static_cast<size_t>(i)]}, est.family).front();
  });

  std::vector<PhasePoint> points;
  for (const auto& spec : classify_specs) {
    const auto kv = parse_value_list(spec);
    if (kv.size() != 2) throw config_error("--classify wants k,H pairs: " + spec);
    points.push_back(classify(kv[0], kv[1], est.family));
  }

  if (o.format == "json") {
    ordered_json j;
    j["diagram"] = ordered_json::array();
    for (const auto& r : rows)
      j["diagram"].push_back({{"k", r.k},
                              {"hc1_lower", r.hc1_lower},
                              {"hc1_upper", r.hc1_upper},
                              {"hc2", r.hc2}});
    j["points"] = ordered_json::array();
    for (const auto& p : points)
      j["points"].push_back({{"k", p.k},
                             {"H_ext", p.H_ext},
                             {"phase", phase_name(p.phase)},
                             {"hc1_lower", p.hc1_lower},
                             {"hc1_upper", p.hc1_upper},
                             {"hc2", p.hc2}});
    write_text_file(out_path(o.out, "phase.json"), j.dump(2) + "\n");
  } else {
    std::vector<std::vector<std::string>> table;
    for (const auto& r : rows)
      table.push_back({sci(r.k), sci(r.hc1_lower), sci(r.hc1_upper), sci(r.hc2)});
    write_text_file(out_path(o.out, "phase.csv"),
                    csv_table("k,hc1_lower,hc1_upper,hc2", table));
  }
  for (const auto& p : points)
    std::cout << "classify k=" << sci(p.k) << " H_ext=" << sci(p.H_ext) << " -> "
              << phase_name(p.phase) << " (hc1 in [" << sci(p.hc1_lower) << ", "
              << sci(p.hc1_upper) << "], hc2=" << sci(p.hc2) << ")\n";
  std::cout << "phase diagram: " << rows.size() << " rows\n";
  return 0;
}

// --------------------------------------------------------------- verify ----

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

int cmd_verify(const CommonOpts& o, double fault_scale) {
  const Lattice lat = resolve_lattice(o);
  const SolverConfig cfg = resolve_config(o);
  const Grid grid = make_grid(lat, cfg.grid_n);
  const ThetaParams tp = cfg.theta;

  std::vector<Check> checks;
  std::vector<std::string> warnings;
  auto add = [&](const std::string& name, double value, double threshold) {
    checks.push_back({name, value, threshold, value < threshold});
  };

  // ground-state block
  const SectionField u0 = eval_u0(lat, grid, tp, 2);
  add("lplus_u0_max", max_abs(apply_L_plus(u0)), 1e-10);
  add("u0_density_integral", std::fabs(norm2_mean(u0) - lat.u * kInvSqrt2), 1e-10);
  const ZeroLocation z0 = locate_zero(u0);
  add("u0_zero_offset",
      std::hypot(z0.s - 0.5, z0.t - 0.5) + std::fabs(z0.winding - 1) +
          std::fabs(z0.total_winding - 1),
      2.0 / grid.n);
  add("rayleigh_quotient", std::fabs(rayleigh_H(u0) - kTwoPi), 1e-8);
  add("quasiperiod_defect", quasiperiod_defect(u0), 1e-10);
  add("second_level_quotient",
      std::fabs(rayleigh_H(apply_L_plus_star(u0)) - 6.0 * kPi), 1e-8);

  // solved pairs (fault hook scales u after the solve)
  double worst_pde = 0, worst_dplus = 0, worst_bog2 = 0, worst_density = 0;
  double worst_pot = 0, worst_kin = 0, worst_internal = 0, worst_bkn = 0;
  double worst_gl1 = 0, worst_gl2 = 0;
  std::vector<QuasimodeData> family;
  for (double H : {0.3, 0.5}) {
    SolutionPair p = build_pair(lat, H, cfg);
    if (fault_scale != 1.0) {
      for (auto& z : p.u.v) z *= fault_scale;
      for (auto& z : p.u.dx) z *= fault_scale;
      for (auto& z : p.u.dy) z *= fault_scale;
      for (auto& z : p.u.dxx) z *= fault_scale;
      for (auto& z : p.u.dxy) z *= fault_scale;
      for (auto& z : p.u.dyy) z *= fault_scale;
      const auto raw = tgl::detail::raw_integrals(p.u, p.a, &p.curl_a);
      p.int_u2 = raw.u2;
      p.int_one_minus_u2_sq = raw.potential_raw;
      p.int_kinetic_plain = raw.kinetic_plain;
      double bog2 = 0.0;
      for (int k = 0; k < p.grid.size(); ++k)
        bog2 = std::max(bog2, std::fabs(p.mu * (kTwoPi + p.curl_a.v[k]) -
                                        (1.0 - std::norm(p.u.v[k]))));
      p.second_bog_max = bog2;
    }
    const double mupi = p.mu * kPi;
    worst_pde = std::max(worst_pde, p.pde_residual);
    worst_dplus = std::max(worst_dplus, p.dplus_max);
    worst_bog2 = std::max(worst_bog2, p.second_bog_max);
    worst_density = std::max(worst_density, std::fabs(p.int_u2 - (1.0 - kSqrt2 * H)));
    worst_pot = std::max(worst_pot,
                         std::fabs(p.int_one_minus_u2_sq -
                                   p.mu * p.mu * (4 * kPi * kPi + p.int_curl2)) /
                             p.int_one_minus_u2_sq);
    worst_kin = std::max(worst_kin,
                         std::fabs(0.5 * p.mu * p.int_kinetic_plain +
                                   0.5 * p.mu * p.mu * p.int_curl2 -
                                   (mupi - 2 * mupi * mupi)) /
                             (mupi - 2 * mupi * mupi));
    const EnergyReport rep = energy_internal(p.u, p.a, kInvSqrt2, H, &p.curl_a);
    worst_internal = std::max(worst_internal,
                              std::fabs(rep.internal - m_E_closed_form(H)));
    worst_bkn = std::max(worst_bkn, bkn_defect(p.u, p.a, H, &p.curl_a));
    const GlResidual gl = gl_residual(p.u, p.a, kInvSqrt2, H, &p.curl_a);
    worst_gl1 = std::max(worst_gl1, gl.field_eq);
    worst_gl2 = std::max(worst_gl2, gl.gauge_eq);
    family.push_back(quasimode_data(p));
  }
  add("pde_residual", worst_pde, 1e-8);
  add("dplus_max", worst_dplus, 1e-8);
  add("second_bog_max", worst_bog2, 1e-8);
  add("density_identity", worst_density, 1e-6);
  add("potential_identity_rel", worst_pot, 1e-6);
  add("kinetic_identity_rel", worst_kin, 1e-6);
  add("internal_vs_closed_form", worst_internal, 1e-6);
  add("bkn_solved", worst_bkn, 1e-8);
  add("gl_field_eq", worst_gl1, 1e-6);
  add("gl_gauge_eq", worst_gl2, 1e-6);

  // randomized identity battery
  {
    std::vector<double> defects(25, 0.0);
    const SectionField base = eval_u0(lat, grid, tp, 2);
    parallel_for(o.jobs, 25, [&](int i) {
      std::mt19937_64 rng(777000u + static_cast<unsigned>(i));
      const AdmissiblePair p = random_admissible_pair(lat, grid, tp, base, rng);
      defects[static_cast<size_t>(i)] = bkn_defect(p.u, p.a, p.H_int, &p.curl_a);
    });
    double worst = 0.0;
    for (double d : defects) worst = std::max(worst, d);
    add("bkn_random_battery", worst, 1e-8);
  }

  // threshold functional at the self-dual point
  add("hc1_upper_selfdual",
      std::fabs(hc1_upper_bound(kInvSqrt2, family).value - kInvSqrt2), 1e-9);
  {
    double prev = 0.0;
    bool monotone = true;
    for (double k : {0.75, 0.9, 1.2, 2.0}) {
      const double v = k * hc1_upper_bound(k, family).value;
      if (v < prev - 1e-12) monotone = false;
      prev = v;
    }
    add("k_hc1_upper_monotone", monotone ? 0.0 : 1.0, 0.5);
  }

  // refinement drift warning (not a failure)
  {
    SolverConfig fine = cfg;
    fine.grid_n = 2 * cfg.grid_n;
    const SolutionPair coarse = build_pair(lat, 0.3, cfg);
    const SolutionPair refined = build_pair(lat, 0.3, fine);
    const double drift = std::fabs(coarse.int_u2 - refined.int_u2);
    if (drift > 1e-6)
      warnings.push_back("refinement drift " + sci(drift) +
                         " at grid " + std::to_string(cfg.grid_n) +
                         "; increase --grid");
  }

  bool all_pass = true;
  for (const auto& c : checks) {
    all_pass = all_pass && c.pass;
    std::cout << (c.pass ? "[ ok ] " : "[FAIL] ") << c.name << " = " << sci(c.value)
              << " (threshold " << sci(c.threshold) << ")\n";
  }
  for (const auto& w : warnings) std::cout << "[warn] " << w << "\n";
  std::cout << (all_pass ? "verify: all checks passed\n"
                         : "verify: some checks FAILED\n");

  ordered_json j;
  j["grid_n"] = cfg.grid_n;
  j["lattice"] = o.lattice;
  j["fault_scale"] = fault_scale;
  j["checks"] = ordered_json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name},
                           {"value", c.value},
                           {"threshold", c.threshold},
                           {"pass", c.pass}});
  j["warnings"] = warnings;
  j["all_pass"] = all_pass;
  write_text_file(out_path(o.out, "verify.json"), j.dump(2) + "\n");
  return all_pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-dual vortex lattices on the unit torus"};
  app.require_subcommand(1);

  CommonOpts so, co, po, vo;
  Setters so_set, co_set, po_set, vo_set;
  double H = 0.0;
  std::string fields_path, h_grid_spec_chi, h_grid_spec_phase, k_range_spec;
  std::vector<std::string> classify_specs;
  double fault_scale = 1.0;
  bool h_given = false;

  CLI::App* solve = app.add_subcommand("solve", "construct the minimizer at one field");
  add_common(solve, so, so_set);
  solve->add_option("--H", H, "internal magnetic field");
  solve->add_option("--fields", fields_path, "write per-point fields CSV here");
  so_set["H"] = [&](const std::string& v) {
    H = cfg_double("H", v);
    h_given = true;
  };
  so_set["fields"] = [&](const std::string& v) { fields_path = v; };

  CLI::App* chi = app.add_subcommand("chi-sweep", "slope integrand along a field grid");
  add_common(chi, co, co_set);
  chi->add_option("--H-grid", h_grid_spec_chi,
                  "descending fields: list a,b,... or range hi:lo:step");
  co_set["H-grid"] = [&](const std::string& v) { h_grid_spec_chi = v; };

  CLI::App* phase = app.add_subcommand("phase", "critical-field bounds over a coupling range");
  add_common(phase, po, po_set);
  phase->add_option("--k-range", k_range_spec, "couplings: list or range lo:hi:step");
  phase->add_option("--H-grid", h_grid_spec_phase, "family fields (descending)");
  phase->add_option("--classify", classify_specs, "classify points, repeatable: k,H");
  po_set["k-range"] = [&](const std::string& v) { k_range_spec = v; };
  po_set["H-grid"] = [&](const std::string& v) { h_grid_spec_phase = v; };
  po_set["classify"] = [&](const std::string& v) { classify_specs.push_back(v); };

  CLI::App* verify = app.add_subcommand("verify", "identity and residual battery");
  add_common(verify, vo, vo_set);
  verify->add_option("--fault-scale", fault_scale,
                     "test hook: scale the solved order parameter");
  vo_set["fault-scale"] = [&](const std::string& v) {
    fault_scale = cfg_double("fault-scale", v);
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  so.basis_given = solve->count("--u") > 0;
  co.basis_given = chi->count("--u") > 0;
  po.basis_given = phase->count("--u") > 0;
  vo.basis_given = verify->count("--u") > 0;
  h_given = solve->count("--H") > 0;

  try {
    if (solve->parsed()) {
      apply_config(solve, so.config_path, so_set);
      if (!h_given)
        throw config_error("solve: the internal field --H is required");
      return cmd_solve(so, H, fields_path);
    }
    if (chi->parsed()) {
      apply_config(chi, co.config_path, co_set);
      return cmd_chi_sweep(co, h_grid_spec_chi);
    }
    if (phase->parsed()) {
      apply_config(phase, po.config_path, po_set);
      return cmd_phase(po, k_range_spec, h_grid_spec_phase, classify_specs);
    }
    if (verify->parsed()) {
      apply_config(verify, vo.config_path, vo_set);
      return cmd_verify(vo, fault_scale);
    }
  } catch (const solver_error& e) {
    ordered_json diag;
    diag["error"] = "solver_failure";
    diag["message"] = e.what();
    diag["residual_history"] = e.residual_history;
    std::cerr << diag.dump() << "\n";
    return 3;
  } catch (const integrity_error& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return 3;
  } catch (const config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const contract_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
