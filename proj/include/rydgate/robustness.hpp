#pragma once

// Monte Carlo gate statistics under quasi-static Rabi-amplitude and
// atomic-spacing noise. Spacing noise reaches the Hamiltonian through
// V = C6 / R^6.
//
// Random numbers: sample i uses its own std::mt19937_64 seeded with
// splitmix64(seed + (i + 1) * 0x9E3779B97F4A7C15). Two 53-bit uniforms
// u = ((x >> 11) + 1) * 2^-53 in (0, 1] feed one Box-Muller pair:
// eps_omega = sqrt(-2 ln u1) cos(2 pi u2), eps_r = sqrt(-2 ln u1) sin(2 pi u2).
// Results therefore depend only on (seed, sample index), never on threading.

#include "rydgate/analysis.hpp"
#include "rydgate/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace rydgate {

inline double v_of_spacing(double c6, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("v_of_spacing: spacing must be > 0");
  const double r3 = r * r * r;
  return c6 / (r3 * r3);
}

/// Spacing giving interaction v for the given C6 (inverse of v_of_spacing).
inline double spacing_for(double c6, double v) {
  if (!(v > 0.0) || !(c6 > 0.0)) throw std::invalid_argument("spacing_for: C6 and V must be > 0");
  return std::pow(c6 / v, 1.0 / 6.0);
}

struct NoiseModel {
  double sigma_omega_rel = 0.0;
  double sigma_r_rel = 0.0;
  double c6 = 1.0;
  double r0 = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(sigma_omega_rel >= 0.0) || !(sigma_r_rel >= 0.0)) throw std::invalid_argument("NoiseModel: sigmas must be >= 0");
    if (!(r0 > 0.0)) throw std::invalid_argument("NoiseModel: r0 must be > 0");
    if (!std::isfinite(c6)) throw std::invalid_argument("NoiseModel: C6 must be finite");
  }

  double nominal_v() const { return v_of_spacing(c6, r0); }
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed + (index + 1) * 0x9E3779B97F4A7C15ull);
}

/// Two independent standard normal deviates for sample `index`.
inline std::array<double, 2> gaussian_pair(std::uint64_t seed, std::uint64_t index) {
  std::mt19937_64 gen(substream_seed(seed, index));
  auto uniform = [&gen] { return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53; };
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  return {radius * std::cos(2.0 * kPi * u2), radius * std::sin(2.0 * kPi * u2)};
}

/// The programmed schedule of `nominal` (durations, detunings, phases, which
/// atoms are driven) with the physical Rabi frequencies scaled by
/// `rabi_scale` and the interaction replaced by `v`.
inline PulseSequence with_physical_parameters(const PulseSequence& nominal, double rabi_scale, double v) {
  std::vector<PulseSegment> segs = nominal.segments();
  for (auto& s : segs) {
    for (auto* d : {&s.drive1, &s.drive2})
      if (*d) **d = DriveParams(std::abs(rabi_scale) * (*d)->rabi(), (*d)->detuning(), (*d)->phase());
    s.ryd.v = v;
  }
  return PulseSequence(std::move(segs));
}

struct FidelityStats {
  std::size_t n_samples = 0;
  double mean_fidelity = 0.0;
  double std_fidelity = 0.0;
  /// Percentiles 1, 5, 50, 95, 99 of F.
  std::array<double, 5> percentiles{};
  double mean_phi_c_error = 0.0;
  double nominal_fidelity = 0.0;
  double target_phi = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr std::array<double, 5> kPercentileLevels = {1.0, 5.0, 50.0, 95.0, 99.0};

/// Linear-interpolation percentile of sorted data (q in [0, 100]).
inline double percentile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct MonteCarloOptions {
  /// Target controlled phase; defaults to the noiseless gate's own phi_c.
  std::optional<double> target_phi;
};

/// Per-sample outcome, exposed for tests and diagnostics.
struct NoiseSample {
  double omega = 0.0;
  double v = 0.0;
  double fidelity = 0.0;
  double phi_c_error = 0.0;
};

/// V_s = C6 / R_s^6 is evaluated as v_nom / (R_s / r0)^6, which is the same law
/// (C6 / r0^6 = v_nom is checked by the caller) but reproduces v_nom exactly at zero noise.
inline NoiseSample run_noise_sample(const PulseSequence& nominal_seq, double omega, double v_nom,
                                    const NoiseModel& noise, double target_phi, std::size_t index) {
  const auto z = gaussian_pair(noise.seed, index);
  const double rabi_scale = 1.0 + noise.sigma_omega_rel * z[0];
  const double stretch = 1.0 + noise.sigma_r_rel * z[1];
  if (!(stretch > 0.0)) throw std::invalid_argument("run_noise_sample: sampled spacing is not positive");
  NoiseSample s;
  s.omega = omega * std::abs(rabi_scale);
  s.v = v_nom / v_of_spacing(1.0, stretch);
  const Operator u = sequence_unitary(with_physical_parameters(nominal_seq, rabi_scale, s.v));
  s.fidelity = fidelity_cphase(u, target_phi);
  s.phi_c_error = std::abs(wrap_phase(controlled_phase(phases_and_leakage(u).phases) - target_phi));
  return s;
}

/// The protocol's nominal V must equal C6 / r0^6 (relative 1e-9).
inline FidelityStats monte_carlo_fidelity(const GateProtocol& protocol, const NoiseModel& noise, std::size_t n,
                                          const MonteCarloOptions& opt = {}) {
  noise.validate();
  if (n < 1) throw std::invalid_argument("monte_carlo_fidelity: need at least one sample");
  const double v_nom = protocol.v();
  if (std::abs(noise.nominal_v() - v_nom) > 1e-9 * std::abs(v_nom))
    throw std::invalid_argument("monte_carlo_fidelity: C6 / r0^6 does not match the protocol's nominal V");

  const PulseSequence nominal_seq = protocol.sequence();
  const Operator u_nom = sequence_unitary(nominal_seq);
  const double target = opt.target_phi.value_or(controlled_phase(phases_and_leakage(u_nom).phases));

  std::vector<NoiseSample> samples(n);
  parallel_for(n, [&](std::size_t i) { samples[i] = run_noise_sample(nominal_seq, protocol.omega, v_nom, noise, target, i); });

  FidelityStats st;
  st.n_samples = n;
  st.seed = noise.seed;
  st.target_phi = target;
  st.nominal_fidelity = fidelity_cphase(u_nom, target);
  std::vector<double> f(n);
  // Welford running moments: identical samples give their value back exactly.
  double mean = 0.0, m2 = 0.0, err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = samples[i].fidelity;
    const double k = static_cast<double>(i + 1);
    const double delta = f[i] - mean;
    mean += delta / k;
    m2 += delta * (f[i] - mean);
    err += (samples[i].phi_c_error - err) / k;
  }
  st.mean_fidelity = mean;
  st.mean_phi_c_error = err;
  st.std_fidelity = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
  std::sort(f.begin(), f.end());
  for (std::size_t k = 0; k < kPercentileLevels.size(); ++k) st.percentiles[k] = percentile_sorted(f, kPercentileLevels[k]);
  return st;
}

/// Convenience: noise model whose nominal spacing reproduces the protocol's V.
inline NoiseModel noise_for(const GateProtocol& protocol, double sigma_omega_rel, double sigma_r_rel,
                            std::uint64_t seed, double c6 = 1.0) {
  return {sigma_omega_rel, sigma_r_rel, c6, spacing_for(c6, protocol.v()), seed};
}

struct ContrastRow {
  const char* protocol = "";
  double v_over_omega = 0.0;
  FidelityStats stats;
};

/// Same relative spacing noise applied to the geometric protocol at `kappa`
/// and to the blockade protocol at V = blockade_ratio * Omega. Reported, not judged.
inline std::vector<ContrastRow> spacing_noise_contrast(double sigma_r_rel, std::size_t n, std::uint64_t seed,
                                                       double kappa = 1.65, double blockade_ratio = 20.0,
                                                       double omega = 1.0) {
  std::vector<ContrastRow> rows;
  for (const auto& p : {GateProtocol::geometric(kappa, omega), GateProtocol::blockade(omega, blockade_ratio * omega)}) {
    rows.push_back({p.name(), p.v() / omega, monte_carlo_fidelity(p, noise_for(p, 0.0, sigma_r_rel, seed), n)});
  }
  return rows;
}

}  // namespace rydgate
