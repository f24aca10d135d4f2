#include "dpw/two_qubit.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace dpw {

namespace {

constexpr double kHermTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kPsdTol = -1e-10;
constexpr double kImagTol = 1e-9;

const Complex kI{0.0, 1.0};

double max_abs(const Matrix4& m) { return m.cwiseAbs().maxCoeff(); }

void check_density(const Matrix4& m, const char* who) {
  if (std::abs(m.trace() - Complex{1.0, 0.0}) > kTraceTol) {
    throw std::invalid_argument(std::string(who) + ": trace differs from 1");
  }
  if (max_abs(m - m.adjoint()) > kHermTol) {
    throw std::invalid_argument(std::string(who) + ": matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix4> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < kPsdTol) {
    throw std::invalid_argument(std::string(who) + ": negative eigenvalue");
  }
}

Eigen::Vector4cd bell_vector(BellKind kind) {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  switch (kind) {
    case BellKind::PhiPlus:  v(0) = r; v(3) = r;  break;
    case BellKind::PhiMinus: v(0) = r; v(3) = -r; break;
    case BellKind::PsiPlus:  v(1) = r; v(2) = r;  break;
    case BellKind::PsiMinus: v(1) = r; v(2) = -r; break;
  }
  return v;
}

void check_angle(double theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("observable angle must be finite");
  }
}

// Partial transpose over qubit B: transpose each 2x2 block in the B index.
Matrix4 partial_transpose_b(const Matrix4& m) {
  Matrix4 out = m;
  for (int a = 0; a < 2; ++a) {
    for (int ap = 0; ap < 2; ++ap) {
      out(2 * a, 2 * ap + 1) = m(2 * a + 1, 2 * ap);
      out(2 * a + 1, 2 * ap) = m(2 * a, 2 * ap + 1);
    }
  }
  return out;
}

}  // namespace

const Matrix2& pauli_x() {
  static const Matrix2 m = (Matrix2() << 0, 1, 1, 0).finished();
  return m;
}

const Matrix2& pauli_y() {
  static const Matrix2 m = (Matrix2() << 0, -kI, kI, 0).finished();
  return m;
}

const Matrix2& pauli_z() {
  static const Matrix2 m = (Matrix2() << 1, 0, 0, -1).finished();
  return m;
}

const Matrix2& identity2() {
  static const Matrix2 m = Matrix2::Identity();
  return m;
}

Matrix4 kron(const Matrix2& a, const Matrix2& b) {
  Matrix4 z;
  z.block<2, 2>(0, 0) = a(0, 0) * b;
  z.block<2, 2>(0, 2) = a(0, 1) * b;
  z.block<2, 2>(2, 0) = a(1, 0) * b;
  z.block<2, 2>(2, 2) = a(1, 1) * b;
  return z;
}

TwoQubitOperator TwoQubitOperator::from_matrix(const Matrix4& m) {
  if (max_abs(m - m.adjoint()) > kHermTol) {
    throw std::invalid_argument("TwoQubitOperator: matrix is not Hermitian");
  }
  return TwoQubitOperator(m);
}

double TwoQubitOperator::operator_norm() const {
  Eigen::SelfAdjointEigenSolver<Matrix4> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

TwoQubitOperator TwoQubitOperator::operator+(const TwoQubitOperator& o) const {
  return TwoQubitOperator(m_ + o.m_);
}

TwoQubitOperator TwoQubitOperator::operator-(const TwoQubitOperator& o) const {
  return TwoQubitOperator(m_ - o.m_);
}

TwoQubitOperator TwoQubitOperator::operator*(double s) const {
  return TwoQubitOperator(m_ * s);
}

DensityMatrix DensityMatrix::from_matrix(const Matrix4& m) {
  check_density(m, "DensityMatrix");
  return DensityMatrix(m);
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

TwoQubitOperator local_observable(double theta, Qubit q) {
  check_angle(theta);
  const Matrix2 sig = std::cos(theta) * pauli_x() + std::sin(theta) * pauli_y();
  const Matrix4 m =
      q == Qubit::A ? kron(sig, identity2()) : kron(identity2(), sig);
  return TwoQubitOperator::from_matrix(m);
}

TwoQubitOperator correlator_operator(double theta_a, double theta_b) {
  check_angle(theta_a);
  check_angle(theta_b);
  const Matrix2 sa = std::cos(theta_a) * pauli_x() + std::sin(theta_a) * pauli_y();
  const Matrix2 sb = std::cos(theta_b) * pauli_x() + std::sin(theta_b) * pauli_y();
  return TwoQubitOperator::from_matrix(kron(sa, sb));
}

TwoQubitOperator chsh_operator(const ChshSettings& s) {
  return correlator_operator(s.alpha, s.beta) +
         correlator_operator(s.alpha, s.beta_prime) +
         correlator_operator(s.alpha_prime, s.beta) -
         correlator_operator(s.alpha_prime, s.beta_prime);
}

ChshSettings optimal_chsh_settings(BellKind kind) {
  const double q = M_PI / 4.0;
  switch (kind) {
    case BellKind::PhiPlus:
    case BellKind::PhiMinus:
      // E(a,b) = +-cos(a+b) on Phi states
      return {0.0, M_PI / 2.0, -q, q};
    case BellKind::PsiPlus:
    case BellKind::PsiMinus:
      // E(a,b) = +-cos(a-b) on Psi states
      return {0.0, M_PI / 2.0, q, -q};
  }
  throw std::invalid_argument("unknown Bell kind");
}

DensityMatrix bell_state(BellKind kind) {
  const Eigen::Vector4cd v = bell_vector(kind);
  return DensityMatrix::from_matrix(v * v.adjoint());
}

DensityMatrix werner_state(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("werner_state: p must lie in [0,1]");
  }
  const Eigen::Vector4cd v = bell_vector(BellKind::PsiMinus);
  const Matrix4 m =
      (1.0 - p) / 4.0 * Matrix4::Identity() + p * (v * v.adjoint());
  return DensityMatrix::from_matrix(m);
}

DensityMatrix random_separable_state(std::mt19937_64& rng, int terms) {
  if (terms < 1) {
    throw std::invalid_argument("random_separable_state: terms must be >= 1");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);

  auto haar_qubit = [&]() {
    Eigen::Vector2cd v;
    v(0) = Complex{gauss(rng), gauss(rng)};
    v(1) = Complex{gauss(rng), gauss(rng)};
    v /= v.norm();
    return v;
  };

  std::vector<double> w(static_cast<size_t>(terms));
  double wsum = 0.0;
  for (auto& x : w) {
    x = expo(rng);
    wsum += x;
  }

  Matrix4 m = Matrix4::Zero();
  for (int k = 0; k < terms; ++k) {
    const Eigen::Vector2cd a = haar_qubit();
    const Eigen::Vector2cd b = haar_qubit();
    const Matrix2 pa = a * a.adjoint();
    const Matrix2 pb = b * b.adjoint();
    m += (w[static_cast<size_t>(k)] / wsum) * kron(pa, pb);
  }
  return DensityMatrix::from_matrix(m);
}

bool ppt_is_entangled(const DensityMatrix& rho) {
  check_density(rho.matrix(), "ppt_is_entangled");
  Eigen::SelfAdjointEigenSolver<Matrix4> es(partial_transpose_b(rho.matrix()),
                                            Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() < kPsdTol;
}

double expectation(const TwoQubitOperator& op, const DensityMatrix& rho) {
  const Complex tr = (op.matrix() * rho.matrix()).trace();
  if (std::abs(tr.imag()) > kImagTol) {
    throw std::runtime_error("expectation: imaginary residue exceeds 1e-9");
  }
  return tr.real();
}

}  // namespace dpw
