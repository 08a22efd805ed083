#pragma once

// Gate protocols: the four-segment phase-toggled geometric sequence for weak
// interaction and the pi / 2pi / pi blockade sequence, with closed-form times.

#include "rydgate/propagation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rydgate {

/// Geometric (weak-interaction) protocol: Omega = kappa * V, Delta = -V/2.
class GeometricProtocolParams {
 public:
  static GeometricProtocolParams from_kappa_v(double kappa, double v) {
    check(kappa > 0.0 && std::isfinite(kappa), "kappa must be finite and > 0");
    check(v > 0.0 && std::isfinite(v), "V must be finite and > 0");
    return {kappa, v};
  }
  static GeometricProtocolParams from_kappa_omega(double kappa, double omega) {
    check(kappa > 0.0 && std::isfinite(kappa), "kappa must be finite and > 0");
    check(omega > 0.0 && std::isfinite(omega), "Omega must be finite and > 0");
    return {kappa, omega / kappa};
  }

  double kappa() const { return kappa_; }
  double v() const { return v_; }
  double omega() const { return kappa_ * v_; }
  double detuning() const { return -0.5 * v_; }
  /// Frequency sqrt(4 Omega^2 + V^2/4) of the cyclic condition.
  double cyclic_frequency() const { return std::sqrt(4.0 * omega() * omega() + 0.25 * v_ * v_); }
  /// Single segment time T with cyclic_frequency() * T = 2 pi.
  double segment_time() const { return 2.0 * kPi / cyclic_frequency(); }

 private:
  GeometricProtocolParams(double kappa, double v) : kappa_(kappa), v_(v) {}
  static void check(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("GeometricProtocolParams: ") + what);
  }

  double kappa_;
  double v_;
};

struct BlockadeProtocolParams {
  double rabi = 1.0;
  double v = 100.0;

  void validate() const {
    if (!(rabi > 0.0) || !std::isfinite(rabi)) throw std::invalid_argument("BlockadeProtocolParams: rabi must be > 0");
    if (!std::isfinite(v)) throw std::invalid_argument("BlockadeProtocolParams: V must be finite");
  }
};

/// Laser phases of the four geometric segments.
inline constexpr double kGeometricPhases[4] = {0.0, kPi / 2, 0.0, kPi / 2};

inline PulseSequence geometric_sequence(const GeometricProtocolParams& p) {
  const double t = p.segment_time();
  std::vector<PulseSegment> segs;
  segs.reserve(4);
  for (double phase : kGeometricPhases) {
    const DriveParams d(p.omega(), p.detuning(), phase);
    segs.push_back({t, d, d, {p.v()}});
  }
  return PulseSequence(std::move(segs));
}

inline PulseSequence blockade_pdp_sequence(const BlockadeProtocolParams& p) {
  p.validate();
  const DriveParams d(p.rabi, 0.0, 0.0);
  const RydbergParams ryd{p.v};
  const double pi_time = kPi / p.rabi;
  return PulseSequence({
      {pi_time, d, std::nullopt, ryd},
      {2.0 * pi_time, std::nullopt, d, ryd},
      {pi_time, d, std::nullopt, ryd},
  });
}

/// T_t = 4T = 8 pi / (Omega sqrt(4 + 1/(4 kappa^2))).
inline double gate_time_geometric(double kappa, double omega) {
  if (!(kappa > 0.0) || !(omega > 0.0)) throw std::invalid_argument("gate_time_geometric: kappa and Omega must be > 0");
  return 8.0 * kPi / (omega * std::sqrt(4.0 + 1.0 / (4.0 * kappa * kappa)));
}

inline double gate_time_blockade(double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("gate_time_blockade: Omega must be > 0");
  return 4.0 * kPi / omega;
}

/// Either protocol at a given Rabi frequency.
struct GateProtocol {
  enum class Kind { Geometric, Blockade };

  Kind kind = Kind::Geometric;
  double omega = 1.0;
  /// Geometric only.
  double kappa = 1.65;
  /// Blockade only; the geometric V is omega / kappa.
  double blockade_v = 100.0;

  static GateProtocol geometric(double kappa, double omega) { return {Kind::Geometric, omega, kappa, 0.0}; }
  static GateProtocol blockade(double omega, double v) { return {Kind::Blockade, omega, 0.0, v}; }

  double v() const { return kind == Kind::Geometric ? omega / kappa : blockade_v; }
  const char* name() const { return kind == Kind::Geometric ? "geometric" : "blockade"; }

  PulseSequence sequence() const {
    if (kind == Kind::Geometric) return geometric_sequence(GeometricProtocolParams::from_kappa_omega(kappa, omega));
    return blockade_pdp_sequence({omega, blockade_v});
  }

  double closed_form_gate_time() const {
    return kind == Kind::Geometric ? gate_time_geometric(kappa, omega) : gate_time_blockade(omega);
  }
};

}  // namespace rydgate
