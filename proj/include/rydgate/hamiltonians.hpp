#pragma once

// Hamiltonian builders for two driven three-level atoms with Rydberg-Rydberg
// interaction, the invariant blocks of the symmetric-drive case, the literal
// blockade effective model, and the direct spin-spin couplings.
//
// Phase convention: a drive (Omega, Delta, phi) on atom k contributes
//   (Omega/2) e^{+i phi} |r><1| + (Omega/2) e^{-i phi} |1><r| + Delta |r><r|,
// i.e. the laser phase rides on the raising operator.

#include "rydgate/statespace.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace rydgate {

class DriveParams {
 public:
  DriveParams() = default;
  DriveParams(double rabi, double detuning, double phase)
      : rabi_(rabi), detuning_(detuning), phase_(wrap_phase(phase)) {
    if (!(rabi >= 0.0) || !std::isfinite(rabi)) throw std::invalid_argument("DriveParams: rabi must be finite and >= 0");
    if (!std::isfinite(detuning) || !std::isfinite(phase))
      throw std::invalid_argument("DriveParams: detuning and phase must be finite");
  }

  double rabi() const { return rabi_; }
  double detuning() const { return detuning_; }
  /// Phase wrapped into (-pi, pi].
  double phase() const { return phase_; }

  friend bool operator==(const DriveParams&, const DriveParams&) = default;

 private:
  double rabi_ = 0.0;
  double detuning_ = 0.0;
  double phase_ = 0.0;
};

struct RydbergParams {
  double v = 0.0;
  friend bool operator==(const RydbergParams&, const RydbergParams&) = default;
};

enum class CouplingKind { XY, ZZ, PM };

struct CouplingSpec {
  CouplingKind kind = CouplingKind::ZZ;
  double j = 0.0;
};

/// Single-atom drive term on {|0>,|1>,|r>}.
inline Mat3 single_atom_drive(const DriveParams& d) {
  const Complex raise = 0.5 * d.rabi() * std::polar(1.0, d.phase());
  Mat3 h = Mat3::Zero();
  h(code(Level::RYD), code(Level::G1)) = raise;
  h(code(Level::G1), code(Level::RYD)) = std::conj(raise);
  h(code(Level::RYD), code(Level::RYD)) = d.detuning();
  return h;
}

/// Full two-atom Hamiltonian. An absent drive contributes nothing for that atom.
inline Operator h_full(const std::optional<DriveParams>& d1, const std::optional<DriveParams>& d2,
                       const RydbergParams& ryd) {
  const Mat3 id = Mat3::Identity();
  Operator h = ryd.v * kron(ket_bra(Level::RYD, Level::RYD), ket_bra(Level::RYD, Level::RYD));
  if (d1) h += kron(single_atom_drive(*d1), id);
  if (d2) h += kron(id, single_atom_drive(*d2));
  return h;
}

inline Operator h_full_symmetric(const DriveParams& d, const RydbergParams& ryd) { return h_full(d, d, ryd); }

/// Block over {|01>, |0r>} (identically {|10>, |r0>}).
inline Mat2 h_block_01(const DriveParams& d) {
  const Complex raise = 0.5 * d.rabi() * std::polar(1.0, d.phase());
  Mat2 h;
  h << 0.0, std::conj(raise), raise, d.detuning();
  return h;
}

/// Block over {|11>, |R>, |rr>} for a symmetric drive on both atoms.
inline Mat3 h_block_11(const DriveParams& d, const RydbergParams& ryd) {
  const Complex raise = std::sqrt(0.5) * d.rabi() * std::polar(1.0, d.phase());
  Mat3 h = Mat3::Zero();
  h(1, 0) = h(2, 1) = raise;
  h(0, 1) = h(1, 2) = std::conj(raise);
  h(1, 1) = d.detuning();
  h(2, 2) = ryd.v + 2.0 * d.detuning();
  return h;
}

/// Literal blockade effective model on {|R>, |b>}.
struct BlockadeEffective {
  Mat2 h;
  /// tan(theta11) = Omega / Delta, theta11 in [0, pi].
  double theta11 = 0.0;
  /// |b> expressed over {|11>, |R>, |rr>}.
  Eigen::Matrix<Complex, 3, 1> b_state;
};

inline BlockadeEffective h_blockade_eff(const DriveParams& d) {
  BlockadeEffective out;
  out.theta11 = std::atan2(d.rabi(), d.detuning());
  const Complex coupling = d.rabi() * std::polar(1.0, d.phase());
  out.h << d.detuning(), coupling, std::conj(coupling), 0.0;
  out.b_state << std::sin(out.theta11 / 2.0) * std::polar(1.0, -2.0 * d.phase()), 0.0, std::cos(out.theta11 / 2.0);
  return out;
}

namespace pauli {
inline Eigen::Matrix2cd x() { return (Eigen::Matrix2cd() << 0, 1, 1, 0).finished(); }
inline Eigen::Matrix2cd y() { return (Eigen::Matrix2cd() << 0, Complex(0, -1), Complex(0, 1), 0).finished(); }
inline Eigen::Matrix2cd z() { return (Eigen::Matrix2cd() << 1, 0, 0, -1).finished(); }
/// sigma_+ = |0><1| in the (|0>, |1>) ordering with sigma_z|0> = |0>.
inline Eigen::Matrix2cd plus() { return (Eigen::Matrix2cd() << 0, 1, 0, 0).finished(); }
inline Eigen::Matrix2cd minus() { return plus().adjoint(); }
}  // namespace pauli

inline Mat4 kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

/// Direct two-qubit coupling over {|00>, |01>, |10>, |11>}.
inline Mat4 h_direct(const CouplingSpec& spec) {
  using namespace pauli;
  switch (spec.kind) {
    case CouplingKind::XY:
      return spec.j * (kron2(x(), x()) + kron2(y(), y()));
    case CouplingKind::ZZ:
      return 0.25 * spec.j * kron2(z(), z());
    case CouplingKind::PM:
      return spec.j * (kron2(plus(), minus()) + kron2(minus(), plus()));
  }
  throw std::invalid_argument("h_direct: unknown coupling kind");
}

/// Projector onto the span of the given (orthonormal) 9-vectors.
inline Operator projector(std::initializer_list<StateVector> states) {
  Operator p = Operator::Zero();
  for (const auto& s : states) p += s * s.adjoint();
  return p;
}

}  // namespace rydgate
