#pragma once

// Piecewise-constant pulse schedules and their exact propagators, plus a
// midpoint-sampled propagator for smoothly time-dependent controls.

#include "rydgate/hamiltonians.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rydgate {

struct PulseSegment {
  double duration = 0.0;
  std::optional<DriveParams> drive1;
  std::optional<DriveParams> drive2;
  RydbergParams ryd;

  Operator hamiltonian() const { return h_full(drive1, drive2, ryd); }

  void validate() const {
    if (!(duration > 0.0) || !std::isfinite(duration))
      throw std::invalid_argument("PulseSegment: duration must be finite and > 0");
    if (!std::isfinite(ryd.v)) throw std::invalid_argument("PulseSegment: interaction strength must be finite");
  }
};

class PulseSequence {
 public:
  explicit PulseSequence(std::vector<PulseSegment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw std::invalid_argument("PulseSequence: needs at least one segment");
    for (const auto& s : segments_) s.validate();
  }

  const std::vector<PulseSegment>& segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  const PulseSegment& operator[](std::size_t i) const { return segments_[i]; }

  double total_duration() const {
    double t = 0.0;
    for (const auto& s : segments_) t += s.duration;
    return t;
  }

 private:
  std::vector<PulseSegment> segments_;
};

inline Operator segment_unitary(const PulseSegment& seg) {
  seg.validate();
  return expm_hermitian(seg.hamiltonian(), seg.duration);
}

/// U = U_n ... U_2 U_1; segment 1 acts first.
inline Operator sequence_unitary(const PulseSequence& seq) {
  Operator u = Operator::Identity();
  for (const auto& seg : seq.segments()) u = segment_unitary(seg) * u;
  return u;
}

inline StateVector propagate(const Operator& u, const StateVector& psi) { return u * psi; }

/// Time-dependent controls sampled on a uniform grid. `drives(t)` returns the
/// per-atom drive at time t; V is constant.
struct SampledControls {
  using DrivePair = std::pair<std::optional<DriveParams>, std::optional<DriveParams>>;

  double total_duration = 0.0;
  /// Initial step; refined by halving until converged.
  double dt = 0.0;
  std::function<DrivePair(double)> drives;
  RydbergParams ryd;
};

/// Product of exact exponentials with controls sampled at each step midpoint.
inline Operator sampled_unitary_fixed(const SampledControls& c, std::size_t steps) {
  if (steps == 0) throw std::invalid_argument("sampled_unitary_fixed: steps must be > 0");
  const double h = c.total_duration / static_cast<double>(steps);
  Operator u = Operator::Identity();
  for (std::size_t k = 0; k < steps; ++k) {
    const double tm = (static_cast<double>(k) + 0.5) * h;
    const auto [d1, d2] = c.drives(tm);
    u = expm_hermitian(h_full(d1, d2, c.ryd), h) * u;
  }
  return u;
}

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(double residual, std::size_t steps)
      : std::runtime_error(message(residual, steps)), residual_(residual), steps_(steps) {}

  double residual() const noexcept { return residual_; }
  std::size_t steps() const noexcept { return steps_; }

 private:
  static std::string message(double residual, std::size_t steps) {
    std::ostringstream os;
    os << "sampled_unitary: not converged after refining to " << steps << " steps (residual " << residual << ")";
    return os.str();
  }

  double residual_;
  std::size_t steps_;
};

struct SampledResult {
  Operator unitary;
  /// max |U(dt) - U(dt/2)| at the final refinement.
  double residual = 0.0;
  std::size_t steps = 0;
};

inline SampledResult sampled_unitary(const SampledControls& c, double tol = 1e-8, int max_halvings = 14) {
  if (!(c.total_duration > 0.0) || !(c.dt > 0.0)) throw std::invalid_argument("sampled_unitary: duration and dt must be > 0");
  if (!c.drives) throw std::invalid_argument("sampled_unitary: no control function");
  auto steps = static_cast<std::size_t>(std::ceil(c.total_duration / c.dt - 1e-9));
  if (steps == 0) steps = 1;
  Operator coarse = sampled_unitary_fixed(c, steps);
  double residual = 0.0;
  for (int i = 0; i < max_halvings; ++i) {
    steps *= 2;
    Operator fine = sampled_unitary_fixed(c, steps);
    residual = max_abs(fine - coarse);
    if (residual < tol) return {fine, residual, steps};
    coarse = std::move(fine);
  }
  throw NonConvergenceError(residual, steps);
}

}  // namespace rydgate
