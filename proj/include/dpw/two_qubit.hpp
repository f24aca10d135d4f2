#pragma once

#include <complex>
#include <random>

#include <Eigen/Dense>

namespace dpw {

using Complex = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;

// Product basis ordering, qubit A on the left tensor factor:
//   0: |+z_A,+z_B>   1: |+z_A,-z_B>   2: |-z_A,+z_B>   3: |-z_A,-z_B>
enum class Qubit { A, B };
enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

const Matrix2& pauli_x();
const Matrix2& pauli_y();
const Matrix2& pauli_z();
const Matrix2& identity2();

Matrix4 kron(const Matrix2& a, const Matrix2& b);

/// Hermitian observable on the two-qubit space.
class TwoQubitOperator {
 public:
  static TwoQubitOperator from_matrix(const Matrix4& m);

  const Matrix4& matrix() const { return m_; }
  double operator_norm() const;  // largest |eigenvalue|

  TwoQubitOperator operator+(const TwoQubitOperator& o) const;
  TwoQubitOperator operator-(const TwoQubitOperator& o) const;
  TwoQubitOperator operator*(double s) const;

 private:
  explicit TwoQubitOperator(Matrix4 m) : m_(std::move(m)) {}
  Matrix4 m_;
};

/// Unit-trace, Hermitian, positive-semidefinite two-qubit state.
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(const Matrix4& m);

  const Matrix4& matrix() const { return m_; }
  double purity() const;

 private:
  explicit DensityMatrix(Matrix4 m) : m_(std::move(m)) {}
  Matrix4 m_;
};

struct ChshSettings {
  double alpha, alpha_prime, beta, beta_prime;
};

// sigma_x cos(theta) + sigma_y sin(theta) on one factor, identity on the other
TwoQubitOperator local_observable(double theta, Qubit q);

// E(theta_a, theta_b) = sigma(theta_a) (x) sigma(theta_b); squares to identity
TwoQubitOperator correlator_operator(double theta_a, double theta_b);

// E(a,b) + E(a,b') + E(a',b) - E(a',b'); operator norm <= 2*sqrt(2)
TwoQubitOperator chsh_operator(const ChshSettings& s);

// Settings reaching |<B>| = 2*sqrt(2) on the given Bell state.
ChshSettings optimal_chsh_settings(BellKind kind);

DensityMatrix bell_state(BellKind kind);

// (1-p)/4 * I + p |Psi-><Psi-|, p in [0,1]
DensityMatrix werner_state(double p);

// Convex mixture of `terms` Haar-random pure product states with
// Dirichlet(1,...,1) weights.
DensityMatrix random_separable_state(std::mt19937_64& rng, int terms = 4);

// Partial transpose over qubit B has a negative eigenvalue. Exact
// entanglement detection for two qubits.
bool ppt_is_entangled(const DensityMatrix& rho);

// Tr(op * rho); throws if the imaginary residue exceeds 1e-9.
double expectation(const TwoQubitOperator& op, const DensityMatrix& rho);

}  // namespace dpw
