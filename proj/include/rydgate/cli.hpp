#pragma once

// Command-line front end. Subcommands:
//
//   simulate       one protocol -> GateReport JSON
//   sweep          kappa sweep of the geometric protocol -> CSV (or JSON)
//   calibrate      kappa* for a target controlled phase -> JSON
//   compare        blockade vs geometric at equal Omega -> CSV (or JSON)
//   robustness     Monte Carlo fidelity statistics -> JSON
//   blockade-scan  blockade protocol over several V -> CSV (or JSON)
//
// Every option may also come from `--config FILE`, a text file of
// `key = value` lines (key is the long option name without dashes, `#` starts
// a comment, list values are whitespace separated). Flags on the command line
// override file values; unknown keys are errors.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence.

#include "rydgate/calibration.hpp"
#include "rydgate/robustness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rydgate::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNonConvergence = 3;

inline constexpr const char* kSweepHeader =
    "kappa,v_over_omega,gate_time_omega_over_pi,phi_c_wrapped_rad,phi_c_unwrapped_rad,leakage_max,fidelity_cz";

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// 12 significant digits, as used in every CSV column.
inline std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// Parses `key = value` lines into (key, tokens) pairs in file order.
inline std::vector<std::pair<std::string, std::vector<std::string>>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    std::vector<std::string> tokens;
    std::istringstream vs(line.substr(eq + 1));
    for (std::string tok; vs >> tok;) tokens.push_back(tok);
    if (tokens.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": missing value for '" + key + "'");
    out.emplace_back(key, std::move(tokens));
  }
  return out;
}

/// Expands `--config FILE` into flags placed before the user's own flags;
/// keys the user also passed on the command line are dropped from the file.
inline std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> user;
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      user.push_back(args[i]);
    }
  }
  if (!path) return user;

  std::ifstream f(*path);
  if (!f) throw ConfigError("cannot read config file '" + *path + "'");
  std::stringstream ss;
  ss << f.rdbuf();

  auto user_has = [&](const std::string& key) {
    const std::string flag = "--" + key;
    for (const auto& a : user)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };

  // user[0] is the program name, user[1] the subcommand (if any).
  const std::size_t head = std::min<std::size_t>(user.size(), 2);
  std::vector<std::string> out(user.begin(), user.begin() + static_cast<std::ptrdiff_t>(head));
  for (const auto& [key, tokens] : parse_config_text(ss.str())) {
    if (key == "config") throw ConfigError("config files cannot include other config files");
    if (user_has(key)) continue;
    out.push_back("--" + key);
    out.insert(out.end(), tokens.begin(), tokens.end());
  }
  out.insert(out.end(), user.begin() + static_cast<std::ptrdiff_t>(head), user.end());
  return out;
}

struct ProtocolArgs {
  std::string protocol = "geometric";
  std::optional<double> kappa;
  std::optional<double> omega;
  std::optional<double> v;
  std::optional<double> c6;
  std::optional<double> r0;

  void add_to(CLI::App& app) {
    app.add_option("--protocol", protocol, "geometric or blockade")->check(CLI::IsMember({"geometric", "blockade"}));
    app.add_option("--kappa", kappa, "Omega / V for the geometric protocol");
    app.add_option("--omega", omega, "Rabi frequency Omega");
    app.add_option("--v", v, "Interaction strength V");
    app.add_option("--c6", c6, "van der Waals coefficient (V = C6 / R^6)");
    app.add_option("--r0", r0, "Nominal atomic spacing R");
  }

  std::optional<double> interaction() const {
    if (v && r0) throw ConfigError("give either --v or --r0, not both");
    if (r0) return v_of_spacing(c6.value_or(1.0), *r0);
    if (c6 && !v) throw ConfigError("--c6 needs --r0");
    return v;
  }

  GateProtocol resolve() const {
    const auto vv = interaction();
    auto positive = [](const std::optional<double>& x, const char* name) {
      if (x && !(*x > 0.0 && std::isfinite(*x))) throw ConfigError(std::string(name) + " must be finite and > 0");
    };
    positive(kappa, "--kappa");
    positive(omega, "--omega");
    positive(vv, "interaction V");
    if (protocol == "blockade") {
      if (kappa) throw ConfigError("--kappa applies only to the geometric protocol");
      if (!omega || !vv) throw ConfigError("blockade protocol needs --omega and --v (or --c6/--r0)");
      return GateProtocol::blockade(*omega, *vv);
    }
    const int given = int(kappa.has_value()) + int(omega.has_value()) + int(vv.has_value());
    if (given != 2) throw ConfigError("geometric protocol needs exactly two of --kappa, --omega, --v");
    if (kappa && omega) return GateProtocol::geometric(*kappa, *omega);
    if (kappa) return GateProtocol::geometric(*kappa, *kappa * *vv);
    return GateProtocol::geometric(*omega / *vv, *omega);
  }
};

inline nlohmann::ordered_json phases_json(const PhaseArray& p) {
  return {{"00", p[0]}, {"01", p[1]}, {"10", p[2]}, {"11", p[3]}};
}

inline nlohmann::ordered_json protocol_json(const GateProtocol& p) {
  nlohmann::ordered_json j;
  j["protocol"] = p.name();
  j["omega"] = p.omega;
  j["v"] = p.v();
  j["v_over_omega"] = p.v() / p.omega;
  if (p.kind == GateProtocol::Kind::Geometric) j["kappa"] = p.kappa;
  return j;
}

inline nlohmann::ordered_json report_json(const GateReport& r, double omega) {
  nlohmann::ordered_json j;
  j["phases"] = phases_json(r.phases);
  j["leakage"] = phases_json(r.leakage);
  j["phases_reliable"] = r.phases_reliable;
  j["controlled_phase_wrapped"] = r.controlled_phase;
  j["controlled_phase_unwrapped"] = r.controlled_phase_unwrapped;
  j["leakage_max"] = r.leakage_max;
  j["target_phi"] = r.target_phi;
  j["fidelity"] = r.fidelity;
  j["gate_time"] = r.gate_time;
  j["gate_time_omega_over_pi"] = r.gate_time * omega / kPi;
  j["pulse_area"] = r.pulse_area;
  j["rydberg_time"] = r.rydberg_time;
  return j;
}

inline nlohmann::ordered_json stats_json(const FidelityStats& s) {
  nlohmann::ordered_json j;
  j["n_samples"] = s.n_samples;
  j["seed"] = s.seed;
  j["target_phi"] = s.target_phi;
  j["nominal_fidelity"] = s.nominal_fidelity;
  j["mean_fidelity"] = s.mean_fidelity;
  j["mean_infidelity"] = 1.0 - s.mean_fidelity;
  j["std_fidelity"] = s.std_fidelity;
  nlohmann::ordered_json pct;
  for (std::size_t k = 0; k < kPercentileLevels.size(); ++k)
    pct["p" + std::to_string(static_cast<int>(kPercentileLevels[k]))] = s.percentiles[k];
  j["percentiles"] = pct;
  j["mean_phi_c_error"] = s.mean_phi_c_error;
  return j;
}

inline std::string sweep_csv(const std::vector<SweepRecord>& recs) {
  std::string s = std::string(kSweepHeader) + "\n";
  for (const auto& r : recs) {
    s += fmt12(r.kappa) + "," + fmt12(r.v_over_omega) + "," + fmt12(r.gate_time_omega_over_pi) + "," +
         fmt12(r.phi_c_wrapped) + "," + fmt12(r.phi_c_unwrapped) + "," + fmt12(r.leakage_max) + "," +
         fmt12(r.fidelity_cz) + "\n";
  }
  return s;
}

struct Outcome {
  int code = kExitOk;
  std::string text;
};

/// Runs the CLI on `args` (args[0] is the program name). Output goes to `out`
/// unless --output names a file; diagnostics go to `err`.
inline int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  CLI::App app{"Two-atom Rydberg gate simulator and calibration toolkit", "rydgate"};
  app.require_subcommand(1);
  std::string output_path;
  std::string sweep_format = "csv", compare_format = "csv", scan_format = "csv";

  auto add_common = [&](CLI::App* sub, std::string* format) {
    sub->add_option("--output", output_path, "Write the result to this file instead of stdout");
    if (format) sub->add_option("--format", *format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };

  std::function<Outcome()> action;

  // simulate
  ProtocolArgs sim;
  double sim_target = kPi;
  auto* simulate = app.add_subcommand("simulate", "Propagate one protocol and print its gate report");
  sim.add_to(*simulate);
  simulate->add_option("--target-phi", sim_target, "Target controlled phase for the fidelity (default pi)");
  add_common(simulate, nullptr);
  simulate->callback([&] {
    action = [&] {
      const GateProtocol p = sim.resolve();
      const GateReport rep = analyze(p.sequence(), sim_target);
      nlohmann::ordered_json j = protocol_json(p);
      j.update(report_json(rep, p.omega));
      return Outcome{kExitOk, j.dump(2) + "\n"};
    };
  });

  // sweep
  double k_min = 0.1, k_max = 3.0, sweep_omega = 1.0;
  std::size_t sweep_n = 59;
  auto* sweep = app.add_subcommand("sweep", "Sweep kappa for the geometric protocol");
  sweep->add_option("--kappa-min", k_min, "Smallest kappa");
  sweep->add_option("--kappa-max", k_max, "Largest kappa");
  sweep->add_option("--n", sweep_n, "Number of kappa values (>= 2)");
  sweep->add_option("--omega", sweep_omega, "Rabi frequency Omega");
  add_common(sweep, &sweep_format);
  sweep->callback([&] {
    action = [&] {
      if (!(sweep_omega > 0.0)) throw ConfigError("--omega must be > 0");
      if (!(k_min > 0.0) || !(k_max > k_min) || sweep_n < 2)
        throw ConfigError("need 0 < --kappa-min < --kappa-max and --n >= 2");
      const auto recs = sweep_kappa(k_min, k_max, sweep_n, sweep_omega);
      if (sweep_format == "csv") return Outcome{kExitOk, sweep_csv(recs)};
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& r : recs)
        arr.push_back({{"kappa", r.kappa},
                       {"v_over_omega", r.v_over_omega},
                       {"gate_time", r.gate_time},
                       {"gate_time_omega_over_pi", r.gate_time_omega_over_pi},
                       {"phi_c_wrapped_rad", r.phi_c_wrapped},
                       {"phi_c_unwrapped_rad", r.phi_c_unwrapped},
                       {"leakage_max", r.leakage_max},
                       {"fidelity_cz", r.fidelity_cz}});
      return Outcome{kExitOk, arr.dump(2) + "\n"};
    };
  });

  // calibrate
  double cal_target = -kPi;
  std::vector<double> bracket = {1.0, 2.5};
  CalibrationOptions cal_opt;
  auto* calibrate = app.add_subcommand("calibrate", "Find kappa giving a target controlled phase");
  calibrate->add_option("--target-phi", cal_target, "Target controlled phase in radians (default -pi)");
  calibrate->add_option("--bracket", bracket, "kappa search interval: LO HI")->expected(2);
  calibrate->add_option("--seed-kappa", cal_opt.seed, "Prefer the root nearest this kappa");
  calibrate->add_option("--scan-points", cal_opt.scan_points, "Coarse scan resolution");
  calibrate->add_option("--omega", cal_opt.omega, "Rabi frequency Omega");
  add_common(calibrate, nullptr);
  calibrate->callback([&] {
    action = [&] {
      if (!(cal_opt.omega > 0.0)) throw ConfigError("--omega must be > 0");
      if (!(bracket[0] > 0.0) || !(bracket[1] > bracket[0])) throw ConfigError("--bracket needs 0 < LO < HI");
      if (cal_opt.scan_points < 2) throw ConfigError("--scan-points must be >= 2");
      const CalibrationResult res = calibrate_kappa(cal_target, bracket[0], bracket[1], cal_opt);
      nlohmann::ordered_json j;
      j["kappa"] = res.kappa;
      j["v_over_omega"] = 1.0 / res.kappa;
      j["residual_rad"] = res.residual;
      j["iterations"] = res.iterations;
      j["report"] = report_json(res.report, cal_opt.omega);
      return Outcome{kExitOk, j.dump(2) + "\n"};
    };
  });

  // compare
  double cmp_omega = 1.0, cmp_kappa = 1.65, cmp_bv = 100.0;
  auto* compare = app.add_subcommand("compare", "Blockade vs geometric protocol at equal Omega");
  compare->add_option("--omega", cmp_omega, "Rabi frequency Omega shared by both protocols");
  compare->add_option("--kappa", cmp_kappa, "kappa of the geometric protocol");
  compare->add_option("--blockade-v", cmp_bv, "Interaction strength V of the blockade protocol");
  add_common(compare, &compare_format);
  compare->callback([&] {
    action = [&] {
      if (!(cmp_omega > 0.0) || !(cmp_kappa > 0.0)) throw ConfigError("--omega and --kappa must be > 0");
      if (!(cmp_bv >= kBlockadeMinRatio * cmp_omega)) throw ConfigError("--blockade-v must be >= 10 Omega");
      const std::vector<GateProtocol> ps = {GateProtocol::blockade(cmp_omega, cmp_bv),
                                            GateProtocol::geometric(cmp_kappa, cmp_omega)};
      std::vector<GateReport> reps(ps.size());
      parallel_for(ps.size(), [&](std::size_t i) { reps[i] = analyze(ps[i].sequence(), kPi); });
      if (compare_format == "json") {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < ps.size(); ++i) {
          nlohmann::ordered_json j = protocol_json(ps[i]);
          j.update(report_json(reps[i], cmp_omega));
          arr.push_back(j);
        }
        return Outcome{kExitOk, arr.dump(2) + "\n"};
      }
      std::string s =
          "protocol,v_over_omega,gate_time,gate_time_omega_over_pi,fidelity_cz,phi_c_wrapped_rad,leakage_max,pulse_area,"
          "rydberg_time\n";
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto& r = reps[i];
        s += std::string(ps[i].name()) + "," + fmt12(ps[i].v() / cmp_omega) + "," + fmt12(r.gate_time) + "," +
             fmt12(r.gate_time * cmp_omega / kPi) + "," + fmt12(r.fidelity) + "," + fmt12(r.controlled_phase) + "," +
             fmt12(r.leakage_max) + "," + fmt12(r.pulse_area) + "," + fmt12(r.rydberg_time) + "\n";
      }
      return Outcome{kExitOk, s};
    };
  });

  // robustness
  ProtocolArgs rob;
  double sigma_omega = 0.0, sigma_r = 0.0;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  std::optional<double> rob_target;
  auto* robustness = app.add_subcommand("robustness", "Monte Carlo fidelity under Rabi and spacing noise");
  rob.add_to(*robustness);
  robustness->add_option("--sigma-omega", sigma_omega, "Relative std of Omega");
  robustness->add_option("--sigma-r", sigma_r, "Relative std of the spacing R");
  robustness->add_option("--samples", samples, "Number of samples");
  robustness->add_option("--seed", seed, "64-bit seed");
  robustness->add_option("--target-phi", rob_target, "Target phase (default: noiseless phi_c)");
  add_common(robustness, nullptr);
  robustness->callback([&] {
    action = [&] {
      const GateProtocol p = rob.resolve();
      if (!(sigma_omega >= 0.0) || !(sigma_r >= 0.0)) throw ConfigError("sigmas must be >= 0");
      if (samples < 1) throw ConfigError("--samples must be >= 1");
      const double c6 = rob.c6.value_or(1.0);
      NoiseModel noise{sigma_omega, sigma_r, c6, rob.r0.value_or(spacing_for(c6, p.v())), seed};
      MonteCarloOptions opt;
      opt.target_phi = rob_target;
      const FidelityStats st = monte_carlo_fidelity(p, noise, samples, opt);
      nlohmann::ordered_json j = protocol_json(p);
      j["sigma_omega_rel"] = sigma_omega;
      j["sigma_r_rel"] = sigma_r;
      j["c6"] = noise.c6;
      j["r0"] = noise.r0;
      j.update(stats_json(st));
      return Outcome{kExitOk, j.dump(2) + "\n"};
    };
  });

  // blockade-scan
  double scan_omega = 1.0;
  std::vector<double> scan_v = {50, 100, 200, 400};
  auto* bscan = app.add_subcommand("blockade-scan", "Blockade protocol across interaction strengths");
  bscan->add_option("--omega", scan_omega, "Rabi frequency Omega");
  bscan->add_option("--v", scan_v, "Interaction strengths (each >= 10 Omega)");
  add_common(bscan, &scan_format);
  bscan->callback([&] {
    action = [&] {
      if (!(scan_omega > 0.0)) throw ConfigError("--omega must be > 0");
      for (double v : scan_v)
        if (!(v >= kBlockadeMinRatio * scan_omega)) throw ConfigError("every --v must be >= 10 Omega");
      const auto recs = blockade_invariance_scan(scan_omega, scan_v);
      if (scan_format == "json") {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : recs)
          arr.push_back({{"v", r.v},
                         {"v_over_omega", r.v_over_omega},
                         {"gate_time", r.gate_time},
                         {"gate_time_omega_over_pi", r.gate_time_omega_over_pi},
                         {"phases", phases_json(r.phases)},
                         {"phi_c_wrapped_rad", r.phi_c_wrapped},
                         {"fidelity_cz", r.fidelity_cz},
                         {"infidelity", r.infidelity},
                         {"leakage_max", r.leakage_max}});
        return Outcome{kExitOk, arr.dump(2) + "\n"};
      }
      std::string s = "v_over_omega,gate_time_omega_over_pi,phi_00,phi_01,phi_10,phi_11,phi_c_wrapped_rad,fidelity_cz,infidelity,leakage_max\n";
      for (const auto& r : recs) {
        s += fmt12(r.v_over_omega) + "," + fmt12(r.gate_time_omega_over_pi);
        for (double ph : r.phases) s += "," + fmt12(ph);
        s += "," + fmt12(r.phi_c_wrapped) + "," + fmt12(r.fidelity_cz) + "," + fmt12(r.infidelity) + "," +
             fmt12(r.leakage_max) + "\n";
      }
      return Outcome{kExitOk, s};
    };
  });

  // CLI11 wants argv-style input in reverse order.
  std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  Outcome result;
  try {
    result = action();
  } catch (const CalibrationError& e) {
    err << "error: " << e.what() << "\n";
    err << "kappa,phi_c_wrapped_rad\n";
    for (const auto& [k, phi] : e.table()) err << fmt12(k) << "," << fmt12(phi) << "\n";
    return kExitNonConvergence;
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  if (!output_path.empty()) {
    std::ofstream f(output_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << output_path << "'\n";
      return kExitConfig;
    }
    f << result.text;
  } else {
    out << result.text;
  }
  return result.code;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace rydgate::cli
