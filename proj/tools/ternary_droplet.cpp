// Command-line front end: every computation in the library as a subcommand
// with JSON configuration, flag overrides, and plain-text outputs.
//
// Exit codes: 0 success, 1 computation diagnostic (a requested check fails,
// the flow loses stability), 2 configuration error (bad flags, malformed or
// unknown JSON, parameters out of range).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ternary/lens.hpp"
#include "ternary/limit_energy.hpp"
#include "ternary/phase_field.hpp"
#include "ternary/sharp_energy.hpp"
#include "ternary/torus_green.hpp"

using nlohmann::json;
using namespace ternary;

namespace {

constexpr const char *kVersion = "1.0.0";

json load_config(const std::string &path) {
  std::ifstream f(path);
  if (!f)
    throw std::invalid_argument("cannot open config file: " + path);
  return json::parse(f); // parse_error propagates as a configuration error
}

// strict schema: every present key must be known
void reject_unknown(const json &j, const std::vector<std::string> &allowed,
                    const std::string &where) {
  if (j.is_null())
    return;
  if (!j.is_object())
    throw std::invalid_argument(where + ": expected a JSON object");
  for (const auto &item : j.items()) {
    bool known = false;
    for (const auto &k : allowed)
      if (item.key() == k)
        known = true;
    if (!known)
      throw std::invalid_argument(where + ": unknown key '" + item.key() + "'");
  }
}

template <class T>
T get_or(const json &j, const std::string &key, T fallback) {
  if (j.is_object() && j.contains(key) && !j[key].is_null())
    return j[key].get<T>();
  return fallback;
}

json meta_block(const std::string &command) {
  return json{{"tool", "ternary-droplet"}, {"version", kVersion},
              {"command", command}};
}

void emit(const json &report) { std::printf("%s\n", report.dump(2).c_str()); }

// ---- shared sections -----------------------------------------------------

ConstantsOptions parse_constants_options(const json &sec) {
  reject_unknown(sec,
                 {"grid_n", "reference_area", "eta_ref", "mean_quadrature_n",
                  "c3_override", "gamma00", "gamma10", "gamma20"},
                 "constants");
  ConstantsOptions opt;
  opt.grid_n = get_or(sec, "grid_n", opt.grid_n);
  opt.reference_area = get_or(sec, "reference_area", opt.reference_area);
  opt.eta_ref = get_or(sec, "eta_ref", opt.eta_ref);
  opt.mean_quadrature_n = get_or(sec, "mean_quadrature_n", opt.mean_quadrature_n);
  if (sec.is_object() && sec.contains("c3_override") && !sec["c3_override"].is_null())
    opt.c3_override = sec["c3_override"].get<double>();
  return opt;
}

struct Couplings {
  double Gamma00 = 1.0, Gamma10 = 1.0, Gamma20 = 1.0;
};

Couplings parse_couplings(const json &sec) {
  Couplings c;
  c.Gamma00 = get_or(sec, "gamma00", c.Gamma00);
  c.Gamma10 = get_or(sec, "gamma10", c.Gamma10);
  c.Gamma20 = get_or(sec, "gamma20", c.Gamma20);
  return c;
}

json constants_report(const LimitConstants &c) {
  json r{{"c1", c.c1},
         {"c2_ball", c.c2_ball},
         {"c2_lens", c.c2_lens},
         {"c3", c.c3},
         {"c3_overridden", c.c3_overridden},
         {"c2_ball_planar", c.c2_ball_planar},
         {"c2_lens_planar", c.c2_lens_planar},
         {"eta_ref", c.eta_ref},
         {"reference_area", c.reference_area},
         {"grid_n", c.grid_n},
         {"robin", c.robin},
         {"sup_regular", c.sup_regular},
         {"gamma00", c.gamma00},
         {"gamma10", c.gamma10},
         {"gamma20", c.gamma20}};
  if (c.c2_lens > 0.0) {
    const Thresholds t = thresholds(c);
    r["thresholds"] = {{"concavity", t.concavity},
                       {"continuous_count_base", t.continuous_count_base},
                       {"two_mass", t.two_mass}};
  }
  return r;
}

// ---- commands ------------------------------------------------------------

int cmd_constants(const json &cfg) {
  const json sec = cfg.value("constants", json::object());
  const ConstantsOptions opt = parse_constants_options(sec);
  const Couplings k = parse_couplings(sec);
  TorusGreen g;
  const LimitConstants c =
      compute_constants(g, k.Gamma00, k.Gamma10, k.Gamma20, opt);
  json r = constants_report(c);
  r["c_isoper"] = isoperimetric_constant();
  r["c3R"] = c3R_constant(c.sup_regular);
  r["meta"] = meta_block("constants");
  emit(r);
  return 0;
}

int cmd_split(const json &cfg, bool bruteforce) {
  const json sec = cfg.value("split", json::object());
  reject_unknown(sec, {"mass", "bruteforce", "mass_grid_divisions", "window"},
                 "split");
  const double M = get_or(sec, "mass", 4.0);
  bruteforce = bruteforce || get_or(sec, "bruteforce", false);
  const int divisions = get_or(sec, "mass_grid_divisions", 200);
  const int window = get_or(sec, "window", 2);
  const json csec = cfg.value("constants", json::object());
  const Couplings k = parse_couplings(csec);
  TorusGreen g;
  const LimitConstants c = compute_constants(g, k.Gamma00, k.Gamma10,
                                             k.Gamma20,
                                             parse_constants_options(csec));
  const SplitResult best = optimal_split(M, c);
  const Thresholds t = thresholds(c);
  json r{{"mass", M},
         {"count", best.count},
         {"droplet_mass", best.masses.empty() ? 0.0 : best.masses.front()},
         {"energy", best.energy},
         {"thresholds",
          {{"concavity", t.concavity},
           {"continuous_count_base", t.continuous_count_base},
           {"two_mass", t.two_mass}}},
         {"continuous_count", M / t.continuous_count_base}};
  json table = json::array();
  for (int n = std::max(1, best.count - window); n <= best.count + window; ++n)
    table.push_back(json{{"count", n}, {"energy", equal_split_energy(M, n, c)}});
  r["window"] = table;
  if (bruteforce) {
    const SplitResult bf = split_bruteforce(M, c, M / divisions);
    r["bruteforce"] = {{"count", bf.count},
                       {"energy", bf.energy},
                       {"masses", bf.masses},
                       {"gap_to_closed_form", bf.energy - best.energy}};
  }
  r["meta"] = meta_block("split");
  emit(r);
  return 0;
}

int cmd_lens(const json &cfg, bool run_oracle, const std::string &out_dir) {
  const json sec = cfg.value("lens", json::object());
  reject_unknown(sec, {"mass", "samples", "oracle", "segments"}, "lens");
  const double m = get_or(sec, "mass", 1.0);
  const int samples = get_or(sec, "samples", 256);
  const int segments = get_or(sec, "segments", 256);
  run_oracle = run_oracle || get_or(sec, "oracle", false);
  if (m <= 0.0)
    throw std::invalid_argument("lens: mass must be positive");
  const std::string csv =
      (std::filesystem::path(out_dir) / "lens_profile.csv").string();
  std::filesystem::create_directories(out_dir);
  lens_profile_csv(csv, m, samples);
  json r{{"mass", m},
         {"chord", lens_chord(m)},
         {"radius", lens_radius(lens_chord(m))},
         {"height", lens_height(lens_chord(m))},
         {"perimeter", lens_perimeter(m)},
         {"contact_angle_deg", lens_contact_angle() * 180.0 / kPi},
         {"c1", c1_constant()},
         {"profile_csv", csv}};
  if (run_oracle) {
    const ShapeOracleResult o = shape_oracle(m, segments);
    r["oracle"] = {{"objective", o.objective},
                   {"chord", o.chord},
                   {"closed_form_objective", c1_constant() * std::sqrt(m)},
                   {"profile_deviation", o.profile_dev}};
  }
  r["meta"] = meta_block("lens");
  emit(r);
  return 0;
}

SharpConfig parse_sharp_config(const json &sec) {
  reject_unknown(sec, {"lo", "hi", "droplets"}, "energy.config");
  SharpConfig c;
  c.lo = get_or(sec, "lo", c.lo);
  c.hi = get_or(sec, "hi", c.hi);
  c.droplets.clear();
  for (const json &dj : sec.value("droplets", json::array())) {
    reject_unknown(dj, {"kind", "x", "y", "mass", "band"}, "energy.droplet");
    Droplet d;
    const std::string kind = get_or<std::string>(dj, "kind", "lens");
    if (kind == "lens")
      d.kind = DropletKind::lens;
    else if (kind == "disc")
      d.kind = DropletKind::disc;
    else
      throw std::invalid_argument("energy: droplet kind must be lens or disc");
    d.x = get_or(dj, "x", 0.0);
    d.y = get_or(dj, "y", 0.0);
    d.mass = get_or(dj, "mass", 1.0);
    d.band = get_or(dj, "band", 1);
    c.droplets.push_back(d);
  }
  return c;
}

DropletConfig parse_droplet_config(const json &sec) {
  reject_unknown(sec, {"masses", "placements"}, "energy.recovery");
  DropletConfig d;
  d.masses = sec.value("masses", std::vector<double>{1.0});
  for (const std::string &s :
       sec.value("placements", std::vector<std::string>{"interface"})) {
    if (s == "interface")
      d.placements.push_back(Placement::on_interface);
    else if (s == "bulk")
      d.placements.push_back(Placement::in_bulk);
    else
      throw std::invalid_argument(
          "energy: placements entries must be 'interface' or 'bulk'");
  }
  d.validate();
  return d;
}

int cmd_energy(const json &cfg, const std::string &out_dir) {
  const json sec = cfg.value("energy", json::object());
  reject_unknown(sec,
                 {"eta_list", "sigma", "gamma11", "gamma12", "gamma22",
                  "gamma10", "gamma20", "gamma00", "raster_n", "supersample",
                  "config", "recovery", "reference_gap"},
                 "energy");
  std::vector<double> etas =
      sec.value("eta_list", std::vector<double>{0.125, 0.0625, 0.03125});
  ModelParams p;
  p.sigma = get_or(sec, "sigma", p.sigma);
  p.gamma11 = get_or(sec, "gamma11", p.gamma11);
  p.gamma12 = get_or(sec, "gamma12", p.gamma12);
  p.gamma22 = get_or(sec, "gamma22", p.gamma22);
  p.Gamma10 = get_or(sec, "gamma10", p.Gamma10);
  p.Gamma20 = get_or(sec, "gamma20", p.Gamma20);
  p.Gamma00 = get_or(sec, "gamma00", p.Gamma00);
  p.raster_n = get_or(sec, "raster_n", p.raster_n);
  p.supersample = get_or(sec, "supersample", p.supersample);

  const bool recovery_mode = sec.contains("recovery");
  DropletConfig rec;
  SharpConfig fixed;
  if (recovery_mode)
    rec = parse_droplet_config(sec["recovery"]);
  else
    fixed = parse_sharp_config(sec.value("config", json::object()));

  std::optional<double> reference = std::nullopt;
  if (get_or(sec, "reference_gap", recovery_mode)) {
    const json csec = cfg.value("constants", json::object());
    Couplings k = parse_couplings(csec);
    k.Gamma00 = p.Gamma00; // the ladder's couplings take precedence
    k.Gamma10 = p.Gamma10;
    k.Gamma20 = p.Gamma20;
    TorusGreen g;
    const LimitConstants c = compute_constants(
        g, k.Gamma00, k.Gamma10, k.Gamma20, parse_constants_options(csec));
    if (recovery_mode) {
      const Energy0 e = E0(rec, rec.total_mass(), c);
      reference = e.value;
    }
  }

  TorusGreen g;
  std::filesystem::create_directories(out_dir);
  const std::string csv_path =
      (std::filesystem::path(out_dir) / "energy_ladder.csv").string();
  std::ofstream csv(csv_path);
  csv.precision(12);
  csv << "eta,total,lamellar,first_order";
  if (reference)
    csv << ",reference,gap";
  csv << "\n";
  for (double eta : etas) {
    ModelParams pe = p;
    pe.eta = eta;
    const SharpConfig conf = recovery_mode ? recovery_first(rec, eta) : fixed;
    const double total = sharp_energy(conf, pe, g);
    const double lam = lamellar_energy(conf, pe, g);
    const double fo = (total - lam) / eta;
    csv << eta << "," << total << "," << lam << "," << fo;
    if (reference)
      csv << "," << *reference << "," << (fo - *reference);
    csv << "\n";
    std::fprintf(stderr, "eta %.6f  total %.8f  lamellar %.8f  first %.8f\n",
                 eta, total, lam, fo);
  }
  csv.close();
  json r{{"csv", csv_path}, {"etas", etas}, {"meta", meta_block("energy")}};
  if (reference)
    r["reference"] = *reference;
  emit(r);
  return 0;
}

int cmd_check(const json &cfg, double gamma_scale) {
  const json sec = cfg.value("check", json::object());
  reject_unknown(sec,
                 {"gamma11", "gamma12", "gamma22", "gamma10", "gamma20",
                  "gamma00", "mass", "safety", "gamma_scale"},
                 "check");
  const double scale = gamma_scale * get_or(sec, "gamma_scale", 1.0);
  const double g11 = scale * get_or(sec, "gamma11", 0.5);
  const double g12 = scale * get_or(sec, "gamma12", 0.25);
  const double g22 = scale * get_or(sec, "gamma22", 0.5);
  const double G10 = scale * get_or(sec, "gamma10", 0.25);
  const double G20 = scale * get_or(sec, "gamma20", 0.25);
  const double G00 = scale * get_or(sec, "gamma00", 0.1);
  const double M = get_or(sec, "mass", 1.0);
  const double s = get_or(sec, "safety", 0.5);
  TorusGreen g;
  const double sup = g.sup_regular_part();
  const CheckResult zeroth = check_negative_coefficients_zeroth(g11, g12, g22, sup);
  const CheckResult first =
      check_negative_coefficients_first(G10, G20, G00, M, s, sup);
  json r{{"sup_regular", sup},
         {"c3R", c3R_constant(sup)},
         {"c_isoper", isoperimetric_constant()},
         {"zeroth",
          {{"ok", zeroth.ok}, {"lhs", zeroth.lhs}, {"rhs", zeroth.rhs},
           {"margin", zeroth.margin}}},
         {"first",
          {{"ok", first.ok}, {"lhs", first.lhs}, {"rhs", first.rhs},
           {"margin", first.margin}}},
         {"meta", meta_block("check")}};
  emit(r);
  return zeroth.ok && first.ok ? 0 : 1;
}

int cmd_simulate(const json &cfg, const std::string &out_dir,
                 std::optional<int> steps_flag,
                 std::optional<std::uint64_t> seed_flag,
                 std::optional<int> n_flag) {
  const json sec = cfg.value("simulate", json::object());
  reject_unknown(sec,
                 {"n", "epsilon", "M1", "M2", "W1", "W2", "W0", "g11", "g12",
                  "g22", "g10", "g20", "g00", "dt", "dt_factor", "steps",
                  "record_every", "noise", "seed", "init", "frame_every"},
                 "simulate");
  FlowParams p;
  p.n = n_flag.value_or(get_or(sec, "n", p.n));
  p.epsilon = get_or(sec, "epsilon", p.epsilon);
  p.M1 = get_or(sec, "M1", p.M1);
  p.M2 = get_or(sec, "M2", p.M2);
  p.W1 = get_or(sec, "W1", p.W1);
  p.W2 = get_or(sec, "W2", p.W2);
  p.W0 = get_or(sec, "W0", p.W0);
  p.g11 = get_or(sec, "g11", p.g11);
  p.g12 = get_or(sec, "g12", p.g12);
  p.g22 = get_or(sec, "g22", p.g22);
  p.g10 = get_or(sec, "g10", p.g10);
  p.g20 = get_or(sec, "g20", p.g20);
  p.g00 = get_or(sec, "g00", p.g00);
  p.dt = get_or(sec, "dt", p.dt);
  p.dt_factor = get_or(sec, "dt_factor", p.dt_factor);
  p.steps = steps_flag.value_or(get_or(sec, "steps", p.steps));
  p.record_every = get_or(sec, "record_every", p.record_every);
  p.noise = get_or(sec, "noise", p.noise);
  p.seed = seed_flag.value_or(get_or(sec, "seed", p.seed));
  const int frame_every = get_or(sec, "frame_every", 0);
  const std::string init = get_or<std::string>(sec, "init", "interface_bands");
  if (init == "interface_bands")
    p.init_u0 = InitU0::kInterfaceBands;
  else if (init == "uniform")
    p.init_u0 = InitU0::kUniform;
  else
    throw std::invalid_argument(
        "simulate: init must be 'interface_bands' or 'uniform'");

  PhaseFlow flow(p);
  std::filesystem::create_directories(out_dir);
  const auto out = [&](const std::string &name) {
    return (std::filesystem::path(out_dir) / name).string();
  };

  SimResult res;
  res.state = flow.init_lamellar();
  save_phase_pgm(out("frame_000000.pgm"), res.state);
  const double dt = p.time_step();
  auto record = [&](int k) {
    TraceRow row;
    row.step = k;
    row.time = k * dt;
    row.energy = flow.energy(res.state);
    row.m1 = res.state.u1.mean();
    row.m2 = res.state.u2.mean();
    row.m0 = 1.0 - row.m1 - row.m2;
    res.trace.push_back(row);
  };
  record(0);
  for (int k = 1; k <= p.steps; ++k) {
    flow.step(res.state);
    if (k % p.record_every == 0 || k == p.steps)
      record(k);
    if (frame_every > 0 && k % frame_every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "frame_%06d.pgm", k);
      save_phase_pgm(out(name), res.state);
    }
  }
  res.final_energy = res.trace.back().energy;
  res.localization = flow.localization(res.state);
  save_phase_pgm(out("final.pgm"), res.state);
  save_trace_csv(out("trace.csv"), res.trace);

  // stability diagnostic: the recorded energies must not increase once the
  // initial data has relaxed (first recorded interval excluded)
  bool stable = true;
  for (std::size_t i = 2; i < res.trace.size(); ++i)
    if (res.trace[i].energy > res.trace[i - 1].energy + 1e-9)
      stable = false;
  double mass_drift = 0.0;
  for (const TraceRow &row : res.trace)
    mass_drift = std::max({mass_drift, std::abs(row.m1 - p.M1),
                           std::abs(row.m2 - p.M2)});

  json r{{"n", p.n},
         {"epsilon", p.epsilon},
         {"steps", p.steps},
         {"dt", dt},
         {"seed", p.seed},
         {"init", init},
         {"final_energy", res.final_energy},
         {"localization", res.localization},
         {"mass_drift", mass_drift},
         {"stable", stable},
         {"trace_csv", out("trace.csv")},
         {"final_pgm", out("final.pgm")},
         {"meta", meta_block("simulate")}};
  json fp{{"M1", p.M1}, {"M2", p.M2}, {"W1", p.W1}, {"W2", p.W2},
          {"W0", p.W0}, {"g11", p.g11}, {"g12", p.g12}, {"g22", p.g22},
          {"g10", p.g10}, {"g20", p.g20}, {"g00", p.g00},
          {"dt_factor", p.dt_factor}, {"noise", p.noise},
          {"record_every", p.record_every}};
  r["parameters"] = fp;
  {
    std::ofstream mf(out("meta.json"));
    mf << r.dump(2) << "\n";
  }
  emit(r);
  return stable ? 0 : 1;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"droplet-regime analysis of the ternary nonlocal "
               "isoperimetric system on the torus"};
  app.require_subcommand(1);
  app.fallthrough(); // global --config/--out may follow the subcommand

  std::string config_path, out_dir = ".";
  app.add_option("--config", config_path, "JSON configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory for generated files");

  auto *sc_constants =
      app.add_subcommand("constants", "limit energy coefficients c1, c2, c3");
  int grid_override = 0;
  sc_constants->add_option("--grid", grid_override,
                           "override the constants raster grid");

  auto *sc_split = app.add_subcommand("split", "optimal droplet splitting");
  bool bruteforce = false;
  double mass_override = 0.0;
  sc_split->add_flag("--bruteforce", bruteforce,
                     "cross-check against the mass-grid dynamic program");
  sc_split->add_option("--mass", mass_override, "total droplet mass");

  auto *sc_lens = app.add_subcommand("lens", "optimal lens geometry");
  bool lens_oracle = false;
  double lens_mass = 0.0;
  sc_lens->add_flag("--oracle", lens_oracle,
                    "run the discrete shape minimization for comparison");
  sc_lens->add_option("--mass", lens_mass, "lens mass");

  auto *sc_energy =
      app.add_subcommand("energy", "sharp-interface energy ladder");

  auto *sc_check =
      app.add_subcommand("check", "admissibility conditions on the couplings");
  double gamma_scale = 1.0;
  sc_check->add_option("--gamma-scale", gamma_scale,
                       "scale every coupling before checking");

  auto *sc_sim = app.add_subcommand("simulate", "diffuse-interface flow");
  int steps_override = 0, n_override = 0;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  sc_sim->add_option("--steps", steps_override, "override step count");
  sc_sim->add_option("--n", n_override, "override grid size");
  sc_sim->add_option("--seed", seed_override, "override RNG seed")
      ->each([&](const std::string &) { seed_set = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0)
      return app.exit(e); // help text
    app.exit(e);
    return 2;
  }

  try {
    json cfg = json::object();
    if (!config_path.empty())
      cfg = load_config(config_path);
    reject_unknown(cfg,
                   {"constants", "split", "lens", "energy", "check",
                    "simulate"},
                   "config");
    if (sc_constants->parsed()) {
      if (grid_override > 0)
        cfg["constants"]["grid_n"] = grid_override;
      return cmd_constants(cfg);
    }
    if (sc_split->parsed()) {
      if (mass_override > 0.0)
        cfg["split"]["mass"] = mass_override;
      return cmd_split(cfg, bruteforce);
    }
    if (sc_lens->parsed()) {
      if (lens_mass > 0.0)
        cfg["lens"]["mass"] = lens_mass;
      return cmd_lens(cfg, lens_oracle, out_dir);
    }
    if (sc_energy->parsed())
      return cmd_energy(cfg, out_dir);
    if (sc_check->parsed())
      return cmd_check(cfg, gamma_scale);
    if (sc_sim->parsed())
      return cmd_simulate(
          cfg, out_dir,
          steps_override > 0 ? std::optional<int>(steps_override) : std::nullopt,
          seed_set ? std::optional<std::uint64_t>(seed_override) : std::nullopt,
          n_override > 0 ? std::optional<int>(n_override) : std::nullopt);
    return 2;
  } catch (const json::exception &e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument &e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error &e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "computation error: %s\n", e.what());
    return 1;
  }
}
