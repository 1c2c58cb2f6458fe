#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// TOOL_PATH is injected by the build as the absolute binary location
const std::string kTool = TOOL_PATH;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_tool(const std::string &args) {
  static int counter = 0;
  const fs::path cap =
      fs::temp_directory_path() / ("cli_capture_" + std::to_string(counter++) +
                                   "_" + std::to_string(::getpid()) + ".txt");
  const std::string cmd =
      kTool + " " + args + " > " + cap.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream f(cap);
  std::stringstream ss;
  ss << f.rdbuf();
  r.out = ss.str();
  fs::remove(cap);
  return r;
}

json run_json(const std::string &args, int expect_code = 0) {
  const RunResult r = run_tool(args);
  REQUIRE(r.exit_code == expect_code);
  return json::parse(r.out);
}

fs::path temp_dir(const std::string &tag) {
  const fs::path d = fs::temp_directory_path() /
                     ("cli_" + tag + "_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

fs::path write_config(const std::string &tag, const json &cfg) {
  const fs::path p = temp_dir("cfg") / (tag + ".json");
  std::ofstream f(p);
  f << cfg.dump(2) << "\n";
  return p;
}

std::vector<std::vector<double>> read_csv(const fs::path &p,
                                          std::string *header = nullptr) {
  std::ifstream f(p);
  REQUIRE(f.good());
  std::string line;
  std::getline(f, line);
  if (header)
    *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(f, line)) {
    if (line.empty())
      continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

} // namespace

TEST_CASE("usage errors") {
  CHECK(run_tool("").exit_code == 2);          // a subcommand is required
  CHECK(run_tool("frobnicate").exit_code == 2);
  CHECK(run_tool("--help").exit_code == 0);
  CHECK(run_tool("constants --config /nonexistent.json").exit_code == 2);
}

TEST_CASE("configuration errors") {
  const fs::path bad = temp_dir("cfg") / "bad.json";
  {
    std::ofstream f(bad);
    f << "{ not json";
  }
  CHECK(run_tool("constants --config " + bad.string()).exit_code == 2);

  const fs::path unknown_top =
      write_config("unknown_top", json{{"consants", json::object()}});
  CHECK(run_tool("constants --config " + unknown_top.string()).exit_code == 2);

  const fs::path unknown_inner = write_config(
      "unknown_inner", json{{"split", {{"mass", 1.0}, {"masss", 2.0}}}});
  CHECK(run_tool("split --config " + unknown_inner.string()).exit_code == 2);

  const fs::path bad_range =
      write_config("bad_range", json{{"simulate", {{"epsilon", -0.5}}}});
  CHECK(run_tool("simulate --config " + bad_range.string()).exit_code == 2);
}

TEST_CASE("constants report") {
  const json r = run_json("constants");
  CHECK(r["meta"]["tool"] == "ternary-droplet");
  CHECK(r["meta"]["command"] == "constants");
  CHECK(r["c1"].get<double>() == Catch::Approx(2.2166368213).margin(1e-6));
  CHECK(std::abs(r["c3"].get<double>()) < 1e-6);
  CHECK(r["c2_lens"].get<double>() < r["c2_ball"].get<double>());
  CHECK(r["c2_lens"].get<double>() > 0.0);
  CHECK(r["thresholds"]["two_mass"].get<double>() >
        r["thresholds"]["concavity"].get<double>());
  CHECK(r["c_isoper"].get<double>() ==
        Catch::Approx(2.0 * std::sqrt(2.0)).margin(1e-12));
}

TEST_CASE("constants respects overrides") {
  const fs::path cfg = write_config(
      "c3_override", json{{"constants", {{"c3_override", 0.125}}}});
  const json r = run_json("constants --config " + cfg.string());
  CHECK(r["c3"].get<double>() == 0.125);
  CHECK(r["c3_overridden"].get<bool>());
}

TEST_CASE("split command") {
  const json small = run_json("split --mass 0.05");
  CHECK(small["count"].get<int>() == 1);
  CHECK(small["droplet_mass"].get<double>() == Catch::Approx(0.05));

  const json r = run_json("split --mass 4 --bruteforce");
  const int count = r["count"].get<int>();
  CHECK(count >= 1);
  CHECK(r["droplet_mass"].get<double>() ==
        Catch::Approx(4.0 / count).margin(1e-12));
  const json bf = r["bruteforce"];
  CHECK(bf["count"].get<int>() == count);
  const double v = r["energy"].get<double>();
  CHECK(std::abs(bf["gap_to_closed_form"].get<double>()) <
        1e-6 * (1.0 + std::abs(v)));
  const auto masses = bf["masses"].get<std::vector<double>>();
  REQUIRE(!masses.empty());
  for (double m : masses)
    CHECK(m == Catch::Approx(masses.front()).margin(4.0 / 200 + 1e-12));
  // the reported window brackets the optimum
  for (const json &row : r["window"])
    CHECK(row["energy"].get<double>() >= v - 1e-12);
}

TEST_CASE("lens command with oracle") {
  const fs::path out = temp_dir("lens_out");
  const json r =
      run_json("lens --mass 1 --oracle --out " + out.string());
  CHECK(r["chord"].get<double>() == Catch::Approx(1.5627736502).margin(1e-6));
  CHECK(r["contact_angle_deg"].get<double>() ==
        Catch::Approx(120.0).margin(1e-9));
  CHECK(r["c1"].get<double>() == Catch::Approx(2.2166368213).margin(1e-6));
  CHECK(r["oracle"]["objective"].get<double>() ==
        Catch::Approx(r["c1"].get<double>()).margin(2e-3));
  CHECK(r["oracle"]["profile_deviation"].get<double>() < 1e-2);
  std::string header;
  const auto rows = read_csv(out / "lens_profile.csv", &header);
  CHECK(header == "x,f");
  CHECK(rows.size() == 257);
  fs::remove_all(out);
}

TEST_CASE("energy command: fixed configuration without droplets") {
  const fs::path out = temp_dir("energy_flat");
  const fs::path cfg = write_config(
      "energy_flat",
      json{{"energy",
            {{"eta_list", {0.125}},
             {"raster_n", 128},
             {"config", {{"droplets", json::array()}}}}}});
  const json r =
      run_json("energy --config " + cfg.string() + " --out " + out.string());
  std::string header;
  const auto rows = read_csv(out / "energy_ladder.csv", &header);
  CHECK(header == "eta,total,lamellar,first_order");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][0] == Catch::Approx(0.125));
  CHECK(std::abs(rows[0][3]) < 1e-9); // no droplets, no first-order excess
  fs::remove_all(out);
}

TEST_CASE("energy command: recovery ladder narrows the limit gap") {
  const fs::path out = temp_dir("energy_ladder");
  const fs::path cfg = write_config(
      "energy_ladder",
      json{{"energy",
            {{"eta_list", {0.125, 0.0625, 0.03125}},
             {"raster_n", 256},
             {"recovery",
              {{"masses", {1.0}}, {"placements", {"interface"}}}}}}});
  const json r =
      run_json("energy --config " + cfg.string() + " --out " + out.string());
  CHECK(r.contains("reference"));
  std::string header;
  const auto rows = read_csv(out / "energy_ladder.csv", &header);
  CHECK(header == "eta,total,lamellar,first_order,reference,gap");
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(std::abs(rows[i][5]) < std::abs(rows[i - 1][5]));
  fs::remove_all(out);
}

TEST_CASE("energy command: interface placement beats bulk placement") {
  const fs::path out = temp_dir("energy_place");
  auto run_placement = [&](const std::string &where) {
    const fs::path cfg = write_config(
        "energy_place_" + where,
        json{{"energy",
              {{"eta_list", {0.03125}},
               {"raster_n", 256},
               {"reference_gap", false},
               {"recovery",
                {{"masses", {1.0}}, {"placements", {where}}}}}}});
    run_json("energy --config " + cfg.string() + " --out " + out.string());
    return read_csv(out / "energy_ladder.csv")[0][3];
  };
  const double on_interface = run_placement("interface");
  const double in_bulk = run_placement("bulk");
  CHECK(on_interface < in_bulk);
  fs::remove_all(out);
}

TEST_CASE("check command exit codes track the admissibility margins") {
  const json ok = run_json("check");
  CHECK(ok["zeroth"]["ok"].get<bool>());
  CHECK(ok["first"]["ok"].get<bool>());

  // the first-order inequality is linear in the coupling scale, so the
  // reported ratio pins the exact flip point
  const double flip =
      ok["first"]["rhs"].get<double>() / ok["first"]["lhs"].get<double>();
  std::ostringstream below, above;
  below << "check --gamma-scale " << std::setprecision(16) << flip * (1 - 1e-9);
  above << "check --gamma-scale " << std::setprecision(16) << flip * (1 + 1e-9);
  const json jb = run_json(below.str(), 0);
  CHECK(jb["first"]["ok"].get<bool>());
  const RunResult ra = run_tool(above.str());
  CHECK(ra.exit_code == 1);
  CHECK_FALSE(json::parse(ra.out)["first"]["ok"].get<bool>());

  const RunResult big = run_tool("check --gamma-scale 1e6");
  CHECK(big.exit_code == 1);
  const json jbig = json::parse(big.out);
  CHECK_FALSE(jbig["zeroth"]["ok"].get<bool>());
  CHECK_FALSE(jbig["first"]["ok"].get<bool>());
}

TEST_CASE("simulate command") {
  const fs::path out = temp_dir("sim_a");
  const json r = run_json("simulate --n 64 --steps 200 --out " + out.string());
  CHECK(r["stable"].get<bool>());
  CHECK(r["mass_drift"].get<double>() < 1e-10);
  CHECK(fs::exists(out / "frame_000000.pgm"));
  CHECK(fs::exists(out / "final.pgm"));
  CHECK(fs::exists(out / "trace.csv"));
  CHECK(fs::exists(out / "meta.json"));
  {
    std::ifstream mf(out / "meta.json");
    const json meta = json::parse(mf);
    CHECK(meta["n"].get<int>() == 64);
    CHECK(meta["steps"].get<int>() == 200);
  }
  std::string header;
  const auto rows = read_csv(out / "trace.csv", &header);
  CHECK(header == "step,time,energy,m1,m2,m0");
  REQUIRE(rows.size() >= 3);
  for (std::size_t i = 2; i < rows.size(); ++i)
    CHECK(rows[i][2] <= rows[i - 1][2] + 1e-9);

  // same seed reproduces the run byte for byte, a fresh seed does not
  const fs::path out2 = temp_dir("sim_b");
  run_json("simulate --n 64 --steps 200 --out " + out2.string());
  auto slurp = [](const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  CHECK(slurp(out / "trace.csv") == slurp(out2 / "trace.csv"));
  CHECK(slurp(out / "final.pgm") == slurp(out2 / "final.pgm"));

  // a fresh seed perturbs the trajectory; the relaxed label raster may
  // coincide, the recorded energies do not
  const fs::path out3 = temp_dir("sim_c");
  run_json("simulate --n 64 --steps 200 --seed 7 --out " + out3.string());
  CHECK(slurp(out / "trace.csv") != slurp(out3 / "trace.csv"));

  fs::remove_all(out);
  fs::remove_all(out2);
  fs::remove_all(out3);
}

TEST_CASE("simulate accepts the uniform initialization") {
  const fs::path out = temp_dir("sim_uniform");
  const fs::path cfg = write_config(
      "sim_uniform",
      json{{"simulate",
            {{"n", 64}, {"steps", 100}, {"init", "uniform"}}}});
  const json r =
      run_json("simulate --config " + cfg.string() + " --out " + out.string());
  CHECK(r["init"] == "uniform");
  const fs::path badcfg = write_config(
      "sim_badinit", json{{"simulate", {{"init", "stripes"}}}});
  CHECK(run_tool("simulate --config " + badcfg.string()).exit_code == 2);
  fs::remove_all(out);
}
