#pragma once

// Linear algebra over the two-atom Hilbert space {|0>,|1>,|r>} x {|0>,|1>,|r>}.
//
// Basis ordering is row-major over (atom 1, atom 2): index = 3*code(a) + code(b),
// so |00> = 0, |01> = 1, |0r> = 2, |10> = 3, ..., |rr> = 8. hbar = 1; Hamiltonians
// carry angular-frequency units and times are in inverse units.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rydgate {

using Complex = std::complex<double>;

inline constexpr std::size_t kDim = 9;
inline constexpr double kPi = 3.14159265358979323846;

using Mat2 = Eigen::Matrix<Complex, 2, 2>;
using Mat3 = Eigen::Matrix<Complex, 3, 3>;
using Mat4 = Eigen::Matrix<Complex, 4, 4>;
using Operator = Eigen::Matrix<Complex, 9, 9>;
using StateVector = Eigen::Matrix<Complex, 9, 1>;

/// Wraps an angle into (-pi, pi]; -pi maps to +pi.
inline double wrap_phase(double x) {
  double r = std::remainder(x, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

enum class Level : int { G0 = 0, G1 = 1, RYD = 2 };

constexpr int code(Level l) { return static_cast<int>(l); }

constexpr int basis_index(Level a, Level b) { return 3 * code(a) + code(b); }

/// Named indices of the nine product states.
namespace basis {
inline constexpr int k00 = basis_index(Level::G0, Level::G0);
inline constexpr int k01 = basis_index(Level::G0, Level::G1);
inline constexpr int k0r = basis_index(Level::G0, Level::RYD);
inline constexpr int k10 = basis_index(Level::G1, Level::G0);
inline constexpr int k11 = basis_index(Level::G1, Level::G1);
inline constexpr int k1r = basis_index(Level::G1, Level::RYD);
inline constexpr int kr0 = basis_index(Level::RYD, Level::G0);
inline constexpr int kr1 = basis_index(Level::RYD, Level::G1);
inline constexpr int krr = basis_index(Level::RYD, Level::RYD);

/// Computational states in the order 00, 01, 10, 11.
inline constexpr int kComputational[4] = {k00, k01, k10, k11};
}  // namespace basis

/// Number of atoms in |r> for basis index i (0, 1 or 2).
constexpr int rydberg_count(int i) { return (i / 3 == 2 ? 1 : 0) + (i % 3 == 2 ? 1 : 0); }

inline StateVector basis_state(int i) {
  StateVector v = StateVector::Zero();
  v(i) = 1.0;
  return v;
}

inline StateVector basis_state(Level a, Level b) { return basis_state(basis_index(a, b)); }

/// Symmetric single-excitation state |R> = (|1r> + |r1>)/sqrt(2).
inline StateVector bright_state() {
  StateVector v = StateVector::Zero();
  v(basis::k1r) = v(basis::kr1) = 1.0 / std::sqrt(2.0);
  return v;
}

/// Antisymmetric single-excitation state |A> = (|1r> - |r1>)/sqrt(2).
inline StateVector antisymmetric_state() {
  StateVector v = StateVector::Zero();
  v(basis::k1r) = 1.0 / std::sqrt(2.0);
  v(basis::kr1) = -1.0 / std::sqrt(2.0);
  return v;
}

/// Single-atom outer product |a><b| on the 3-level space.
inline Mat3 ket_bra(Level a, Level b) {
  Mat3 m = Mat3::Zero();
  m(code(a), code(b)) = 1.0;
  return m;
}

/// Kronecker product: (A (x) B)[3i+k, 3j+l] = A[i,j] * B[k,l].
inline Operator kron(const Mat3& a, const Mat3& b) {
  Operator out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      out.block<3, 3>(3 * i, 3 * j) = a(i, j) * b;
  return out;
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
double hermitian_defect(const Eigen::MatrixBase<Derived>& h) {
  return max_abs(h - h.adjoint());
}

/// max |(U^dagger U - I)_ij|.
template <typename Derived>
double unitarity_defect(const Eigen::MatrixBase<Derived>& u) {
  using M = typename Derived::PlainObject;
  return max_abs(u.adjoint() * u - M::Identity(u.rows(), u.cols()));
}

class NonHermitianError : public std::invalid_argument {
 public:
  explicit NonHermitianError(double asymmetry)
      : std::invalid_argument(message(asymmetry)), asymmetry_(asymmetry) {}

  double asymmetry() const noexcept { return asymmetry_; }

 private:
  static std::string message(double asymmetry) {
    std::ostringstream os;
    os << "expm_hermitian: input is not Hermitian (max |H - H^dagger| = " << asymmetry << ")";
    return os.str();
  }

  double asymmetry_;
};

inline constexpr double kHermitianTol = 1e-12;

/// exp(-i H t) for Hermitian H via spectral decomposition.
///
/// Works for any fixed or dynamic square size. The input is checked to be
/// Hermitian to 1e-12 (relative to max(1, |H|_max)); the exponential is built
/// from the eigenbasis of the symmetrized matrix so the result is unitary to
/// rounding.
template <typename Derived>
typename Derived::PlainObject expm_hermitian(const Eigen::MatrixBase<Derived>& h, double t) {
  using M = typename Derived::PlainObject;
  if (!std::isfinite(t)) throw std::invalid_argument("expm_hermitian: non-finite time");
  const double asym = hermitian_defect(h);
  if (asym > kHermitianTol * std::max(1.0, max_abs(h))) throw NonHermitianError(asym);
  if (t == 0.0) return M::Identity(h.rows(), h.cols());
  const M sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<M> es(sym);
  const auto& vecs = es.eigenvectors();
  const auto& vals = es.eigenvalues();
  M phased = vecs;
  for (Eigen::Index k = 0; k < vals.size(); ++k) phased.col(k) *= std::polar(1.0, -vals(k) * t);
  return phased * vecs.adjoint();
}

/// Restriction of a 9x9 operator to the listed basis indices.
template <int N>
Eigen::Matrix<Complex, N, N> restrict_to(const Operator& op, const int (&idx)[N]) {
  Eigen::Matrix<Complex, N, N> out;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) out(i, j) = op(idx[i], idx[j]);
  return out;
}

/// 4x4 block of `op` on the computational states (00, 01, 10, 11).
inline Mat4 computational_block(const Operator& op) { return restrict_to(op, basis::kComputational); }

/// 9x9 operator acting as `block` on the computational states and as identity elsewhere.
inline Operator embed_computational(const Mat4& block) {
  Operator out = Operator::Identity();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out(basis::kComputational[i], basis::kComputational[j]) = block(i, j);
  return out;
}

}  // namespace rydgate
