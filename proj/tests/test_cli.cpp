#include "rydgate/cli.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rydgate;
using nlohmann::json;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rydgate");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> lines;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<double> split_csv_numbers(const std::string& line) {
  std::vector<double> v;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) v.push_back(std::stod(cell));
  return v;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

}  // namespace

TEST(cli, simulate_geometric_report) {
  const auto r = run_cli({"simulate", "--protocol", "geometric", "--kappa", "1.65", "--omega", "1"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const json j = json::parse(r.out);
  for (const char* key : {"phases", "controlled_phase_wrapped", "controlled_phase_unwrapped", "leakage_max", "fidelity",
                          "gate_time", "pulse_area", "rydberg_time"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_NEAR(std::abs(j["controlled_phase_wrapped"].get<double>()), kPi, 0.05);
  EXPECT_NEAR(j["gate_time"].get<double>(), gate_time_geometric(1.65, 1.0), 1e-12);
}

TEST(cli, simulate_blockade_gate_time) {
  const auto r = run_cli({"simulate", "--protocol", "blockade", "--omega", "1", "--v", "100"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NEAR(json::parse(r.out)["gate_time"].get<double>(), 4 * kPi, 1e-12);
}

TEST(cli, simulate_from_spacing) {
  const auto r = run_cli({"simulate", "--kappa", "1.65", "--c6", "64", "--r0", "2"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NEAR(json::parse(r.out)["gate_time"].get<double>(), gate_time_geometric(1.65, 1.65), 1e-12);
}

TEST(cli, invalid_configs_exit_2) {
  EXPECT_EQ(run_cli({"simulate", "--protocol", "geometric", "--kappa", "1.65", "--omega", "0"}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({"simulate", "--kappa", "1.65"}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({"simulate", "--kappa", "1", "--omega", "1", "--v", "1"}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({"simulate", "--protocol", "blockade", "--omega", "1"}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({"simulate", "--protocol", "other", "--omega", "1", "--v", "1"}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({"sweep", "--kappa-min", "2", "--kappa-max", "1"}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({"sweep", "--n", "1"}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({"sweep", "--bogus", "1"}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({"blockade-scan", "--v", "5"}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({}).code, cli::kExitConfig);
}

TEST(cli, sweep_csv_format) {
  const auto r = run_cli({"sweep", "--kappa-min", "0.144", "--kappa-max", "1.65", "--n", "12"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.out.find('\r'), std::string::npos);
  ASSERT_EQ(r.out.back(), '\n');
  const auto lines = split_lines(r.out);
  ASSERT_EQ(lines.size(), 13u);
  EXPECT_EQ(lines[0], cli::kSweepHeader);

  const auto first = split_csv_numbers(lines[1]);
  const auto last = split_csv_numbers(lines.back());
  ASSERT_EQ(first.size(), 7u);
  EXPECT_EQ(first[0], 0.144);
  EXPECT_LT(first[2], 2.0);
  EXPECT_EQ(last[0], 1.65);
  EXPECT_NEAR(last[2], 3.95486201690, 1e-11);
  EXPECT_NEAR(std::abs(last[3]), kPi, 0.05);
}

TEST(cli, sweep_values_round_trip_at_12_digits) {
  const auto r = run_cli({"sweep", "--kappa-min", "0.3", "--kappa-max", "2.7", "--n", "9"});
  ASSERT_EQ(r.code, cli::kExitOk);
  const auto recs = sweep_kappa(0.3, 2.7, 9);
  const auto lines = split_lines(r.out);
  ASSERT_EQ(lines.size(), recs.size() + 1);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto v = split_csv_numbers(lines[i + 1]);
    const double expected[] = {recs[i].kappa,         recs[i].v_over_omega,    recs[i].gate_time_omega_over_pi,
                               recs[i].phi_c_wrapped, recs[i].phi_c_unwrapped, recs[i].leakage_max,
                               recs[i].fidelity_cz};
    for (int c = 0; c < 7; ++c) {
      EXPECT_EQ(cli::fmt12(v[c]), cli::fmt12(expected[c]));
      EXPECT_LE(std::abs(v[c] - expected[c]), 5e-12 * std::abs(expected[c]) + 1e-300);
    }
  }
}

TEST(cli, sweep_endpoints_only) {
  const auto r = run_cli({"sweep", "--kappa-min", "1", "--kappa-max", "2", "--n", "2"});
  ASSERT_EQ(r.code, cli::kExitOk);
  EXPECT_EQ(split_lines(r.out).size(), 3u);
}

TEST(cli, sweep_json) {
  const auto r = run_cli({"sweep", "--n", "3", "--format", "json"});
  ASSERT_EQ(r.code, cli::kExitOk);
  const json j = json::parse(r.out);
  ASSERT_EQ(j.size(), 3u);
  EXPECT_TRUE(j[0].contains("fidelity_cz"));
}

TEST(cli, calibrate_minus_pi) {
  const auto r = run_cli({"calibrate", "--target-phi", "-3.14159265", "--bracket", "1.0", "2.5"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["kappa"].get<double>(), 1.65, 0.01);
  EXPECT_LE(std::abs(j["residual_rad"].get<double>()), 1e-6);
  EXPECT_TRUE(j["report"].contains("fidelity"));
}

TEST(cli, calibrate_without_root_exits_3_with_table) {
  const auto r = run_cli({"calibrate", "--target-phi", "0.5", "--bracket", "3.0", "3.5", "--scan-points", "10"});
  EXPECT_EQ(r.code, cli::kExitNonConvergence);
  EXPECT_TRUE(r.out.empty());
  const auto lines = split_lines(r.err);
  ASSERT_EQ(lines.size(), 12u);
  EXPECT_EQ(lines[1], "kappa,phi_c_wrapped_rad");
  EXPECT_EQ(split_csv_numbers(lines[2])[0], 3.0);
}

TEST(cli, compare_table) {
  const auto r = run_cli({"compare", "--omega", "1", "--kappa", "1.65", "--blockade-v", "100"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto lines = split_lines(r.out);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[1].rfind("blockade,", 0), 0u);
  EXPECT_EQ(lines[2].rfind("geometric,", 0), 0u);
  auto field = [](const std::string& line, int idx) {
    std::istringstream in(line);
    std::string cell;
    for (int i = 0; i <= idx; ++i) std::getline(in, cell, ',');
    return std::stod(cell);
  };
  EXPECT_NEAR(field(lines[1], 3), 4.0, 1e-10);
  EXPECT_NEAR(field(lines[2], 3), 3.95486201690, 1e-11);

  const auto rj = run_cli({"compare", "--format", "json"});
  ASSERT_EQ(rj.code, cli::kExitOk);
  const json j = json::parse(rj.out);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_TRUE(j[0].contains("pulse_area") && j[1].contains("rydberg_time"));
}

TEST(cli, blockade_scan) {
  const auto r = run_cli({"blockade-scan", "--v", "50", "100", "--format", "json"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const json j = json::parse(r.out);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0]["gate_time"], j[1]["gate_time"]);
}

TEST(cli, robustness_echoes_seed_and_is_deterministic) {
  const std::vector<std::string> args = {"robustness", "--kappa", "1.65", "--omega", "1", "--sigma-omega", "0.01",
                                         "--sigma-r", "0.01", "--samples", "100", "--seed", "42"};
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  ASSERT_EQ(a.code, cli::kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  const json j = json::parse(a.out);
  EXPECT_EQ(j["seed"].get<std::uint64_t>(), 42u);
  EXPECT_EQ(j["n_samples"].get<std::size_t>(), 100u);
}

TEST(cli, config_file_and_flag_override) {
  const auto cfg = temp_file("rydgate_test_sweep.cfg",
                             "# sweep settings\nkappa-min = 0.5\nkappa-max = 2.0\nn = 4   # four rows\n\nformat = csv\n");
  const auto from_file = run_cli({"sweep", "--config", cfg.string()});
  ASSERT_EQ(from_file.code, cli::kExitOk) << from_file.err;
  EXPECT_EQ(split_lines(from_file.out).size(), 5u);
  EXPECT_EQ(from_file.out, run_cli({"sweep", "--kappa-min", "0.5", "--kappa-max", "2.0", "--n", "4"}).out);

  const auto overridden = run_cli({"sweep", "--config", cfg.string(), "--n", "6"});
  ASSERT_EQ(overridden.code, cli::kExitOk) << overridden.err;
  EXPECT_EQ(split_lines(overridden.out).size(), 7u);
  std::filesystem::remove(cfg);
}

TEST(cli, config_file_errors) {
  const auto unknown = temp_file("rydgate_test_unknown.cfg", "kappa-min = 0.5\nwavelength = 3\n");
  EXPECT_EQ(run_cli({"sweep", "--config", unknown.string()}).code, cli::kExitConfig);
  const auto malformed = temp_file("rydgate_test_malformed.cfg", "kappa-min 0.5\n");
  EXPECT_EQ(run_cli({"sweep", "--config", malformed.string()}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({"sweep", "--config", "/nonexistent/rydgate.cfg"}).code, cli::kExitConfig);
  std::filesystem::remove(unknown);
  std::filesystem::remove(malformed);
}

TEST(cli, output_file) {
  const auto path = std::filesystem::temp_directory_path() / "rydgate_test_out.csv";
  const auto r = run_cli({"sweep", "--n", "2", "--output", path.string()});
  ASSERT_EQ(r.code, cli::kExitOk);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), run_cli({"sweep", "--n", "2"}).out);
  std::filesystem::remove(path);
}

TEST(cli, help_exits_zero) {
  const auto r = run_cli({"--help"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("sweep"), std::string::npos);
}
