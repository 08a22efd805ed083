#pragma once

// Kappa sweeps of the geometric protocol, calibration of kappa to a target
// controlled phase, and the blockade interaction-independence scan.

#include "rydgate/analysis.hpp"
#include "rydgate/parallel.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rydgate {

struct SweepRecord {
  double kappa = 0.0;
  double v_over_omega = 0.0;
  double gate_time = 0.0;
  double gate_time_omega_over_pi = 0.0;
  double phi_c_wrapped = 0.0;
  double phi_c_unwrapped = 0.0;
  double leakage_max = 0.0;
  double fidelity_cz = 0.0;
};

inline SweepRecord geometric_record(double kappa, double omega = 1.0) {
  const auto params = GeometricProtocolParams::from_kappa_omega(kappa, omega);
  const PulseSequence seq = geometric_sequence(params);
  const GateReport rep = analyze(seq, kPi, /*with_rydberg_time=*/false);
  SweepRecord r;
  r.kappa = kappa;
  r.v_over_omega = params.v() / omega;
  r.gate_time = rep.gate_time;
  r.gate_time_omega_over_pi = rep.gate_time * omega / kPi;
  r.phi_c_wrapped = rep.controlled_phase;
  r.phi_c_unwrapped = rep.controlled_phase_unwrapped;
  r.leakage_max = rep.leakage_max;
  r.fidelity_cz = rep.fidelity;
  return r;
}

/// n uniformly spaced kappa values including both endpoints.
inline std::vector<double> kappa_grid(double k_min, double k_max, std::size_t n) {
  if (!(k_min > 0.0) || !(k_max > k_min) || !std::isfinite(k_max) || n < 2)
    throw std::invalid_argument("sweep: need 0 < k_min < k_max and n >= 2");
  std::vector<double> ks(n);
  const double step = (k_max - k_min) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) ks[i] = (i + 1 == n) ? k_max : k_min + step * static_cast<double>(i);
  return ks;
}

inline std::vector<SweepRecord> sweep_kappa(double k_min, double k_max, std::size_t n, double omega = 1.0) {
  if (!(omega > 0.0)) throw std::invalid_argument("sweep: Omega must be > 0");
  const auto ks = kappa_grid(k_min, k_max, n);
  std::vector<SweepRecord> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = geometric_record(ks[i], omega); });
  return out;
}

class CalibrationError : public std::runtime_error {
 public:
  using Table = std::vector<std::pair<double, double>>;

  CalibrationError(const std::string& what, Table table) : std::runtime_error(what), table_(std::move(table)) {}

  /// Scanned (kappa, wrapped phi_c) pairs.
  const Table& table() const noexcept { return table_; }

 private:
  Table table_;
};

struct CalibrationOptions {
  double seed = 1.65;
  std::size_t scan_points = 200;
  double omega = 1.0;
  double tolerance = 1e-6;
};

struct CalibrationResult {
  double kappa = 0.0;
  /// wrap(phi_c(kappa) - target).
  double residual = 0.0;
  int iterations = 0;
  GateReport report;
};

/// Finds kappa with wrap(phi_c(kappa) - target) = 0 inside [k_lo, k_hi].
///
/// phi_c(kappa) is not assumed monotone: a coarse scan collects every
/// sign change of the error that is not a 2 pi wrap jump, the one nearest the
/// seed is chosen, and bisection refines it to machine resolution.
inline CalibrationResult calibrate_kappa(double target_phi, double k_lo, double k_hi,
                                         const CalibrationOptions& opt = {}) {
  if (!(k_lo > 0.0) || !(k_hi > k_lo)) throw std::invalid_argument("calibrate_kappa: need 0 < k_lo < k_hi");
  if (opt.scan_points < 2) throw std::invalid_argument("calibrate_kappa: scan_points must be >= 2");

  auto phi_c = [&](double k) {
    const Operator u = sequence_unitary(geometric_sequence(GeometricProtocolParams::from_kappa_omega(k, opt.omega)));
    return controlled_phase(phases_and_leakage(u).phases);
  };
  auto error = [&](double k) { return wrap_phase(phi_c(k) - target_phi); };

  const auto ks = kappa_grid(k_lo, k_hi, opt.scan_points);
  std::vector<double> phis(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) { phis[i] = phi_c(ks[i]); });

  CalibrationError::Table table;
  table.reserve(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) table.emplace_back(ks[i], phis[i]);

  double lo = 0.0, hi = 0.0, e_lo = 0.0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
    const double a = wrap_phase(phis[i] - target_phi);
    const double b = wrap_phase(phis[i + 1] - target_phi);
    if (a * b > 0.0 || std::abs(a - b) >= kPi) continue;
    const double dist = (opt.seed >= ks[i] && opt.seed <= ks[i + 1]) ? 0.0
                                                                     : std::min(std::abs(opt.seed - ks[i]), std::abs(opt.seed - ks[i + 1]));
    if (dist < best_dist) best_dist = dist, lo = ks[i], hi = ks[i + 1], e_lo = a;
  }
  if (!std::isfinite(best_dist)) {
    std::ostringstream os;
    os << "calibrate_kappa: no sign change of wrap(phi_c - " << target_phi << ") in [" << k_lo << ", " << k_hi << "]";
    throw CalibrationError(os.str(), std::move(table));
  }

  CalibrationResult res;
  double k = lo;
  double e = e_lo;
  if (e_lo == 0.0) {
    k = lo;
  } else {
    for (; res.iterations < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++res.iterations) {
      const double mid = 0.5 * (lo + hi);
      const double em = error(mid);
      k = mid, e = em;
      if (em == 0.0) break;
      if ((em < 0.0) == (e_lo < 0.0)) lo = mid, e_lo = em;
      else hi = mid;
    }
  }
  if (std::abs(e) > opt.tolerance) {
    std::ostringstream os;
    os << "calibrate_kappa: bisection ended with residual " << e << " rad at kappa " << k;
    throw CalibrationError(os.str(), std::move(table));
  }
  res.kappa = k;
  res.residual = e;
  res.report = analyze(geometric_sequence(GeometricProtocolParams::from_kappa_omega(k, opt.omega)), target_phi);
  return res;
}

struct BlockadeScanRecord {
  double v = 0.0;
  double v_over_omega = 0.0;
  double gate_time = 0.0;
  double gate_time_omega_over_pi = 0.0;
  PhaseArray phases{};
  double phi_c_wrapped = 0.0;
  double fidelity_cz = 0.0;
  double infidelity = 0.0;
  double leakage_max = 0.0;
};

inline constexpr double kBlockadeMinRatio = 10.0;

inline std::vector<BlockadeScanRecord> blockade_invariance_scan(double omega, const std::vector<double>& v_values) {
  if (!(omega > 0.0)) throw std::invalid_argument("blockade_invariance_scan: Omega must be > 0");
  for (double v : v_values)
    if (!(v >= kBlockadeMinRatio * omega)) throw std::invalid_argument("blockade_invariance_scan: every V must be >= 10 Omega");
  std::vector<BlockadeScanRecord> out(v_values.size());
  parallel_for(v_values.size(), [&](std::size_t i) {
    const double v = v_values[i];
    const PulseSequence seq = blockade_pdp_sequence({omega, v});
    const Operator u = sequence_unitary(seq);
    const DiagonalPhases dp = phases_and_leakage(u);
    BlockadeScanRecord r;
    r.v = v;
    r.v_over_omega = v / omega;
    r.gate_time = seq.total_duration();
    r.gate_time_omega_over_pi = r.gate_time * omega / kPi;
    r.phases = dp.phases;
    r.phi_c_wrapped = controlled_phase(dp.phases);
    r.fidelity_cz = fidelity_cphase(u, kPi);
    r.infidelity = 1.0 - r.fidelity_cz;
    r.leakage_max = dp.leakage_max;
    out[i] = r;
  });
  return out;
}

}  // namespace rydgate
