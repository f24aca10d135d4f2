#include "dpw/criteria.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpw/analytic.hpp"

namespace dpw {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

Verdict make_analytic_verdict(double value, double threshold) {
  return {value, threshold, std::abs(value) > threshold, kNan};
}

Verdict make_mc_verdict(const McEstimate& e, double threshold) {
  const double excess = std::abs(e.value) - threshold;
  const double margin = e.std_error > 0.0
                            ? excess / e.std_error
                            : (excess > 0.0
                                   ? std::numeric_limits<double>::infinity()
                                   : -std::numeric_limits<double>::infinity());
  return {e.value, threshold, excess > 3.0 * e.std_error, margin};
}

ControlSetting star_of(const ControlSetting& on) {
  if (on.tag != SettingTag::On) {
    throw std::invalid_argument("mc_chsh_like_estimate: expected an On setting");
  }
  return ControlSetting::on_star(on.omega_p, on.n);
}

}  // namespace

TwoQubitOperator chsh_like_operator(ChshLikeKind,
                                    const AveragedCorrelators& c) {
  return c.off_off + c.on_off + c.off_on - c.on_on;
}

TwoQubitOperator witness_operator(BellKind kind, const TwoQubitOperator& B) {
  const TwoQubitOperator two_id =
      TwoQubitOperator::from_matrix(2.0 * Matrix4::Identity());
  switch (kind) {
    case BellKind::PhiPlus:
    case BellKind::PsiPlus:
      return two_id - B;
    case BellKind::PhiMinus:
    case BellKind::PsiMinus:
      return two_id + B;
  }
  throw std::invalid_argument("witness_operator: unknown Bell kind");
}

Verdict separability_verdict(double value) {
  return make_analytic_verdict(value, 2.0);
}

Verdict separability_verdict(const McEstimate& estimate) {
  return make_mc_verdict(estimate, 2.0);
}

Verdict non_gaussianity_verdict(double value) {
  return make_analytic_verdict(value, b0_max());
}

Verdict non_gaussianity_verdict(const McEstimate& estimate) {
  return make_mc_verdict(estimate, b0_max());
}

Verdict standard_chsh_verdict(const DensityMatrix& rho,
                              const ChshSettings& settings) {
  return make_analytic_verdict(expectation(chsh_operator(settings), rho), 2.0);
}

McEstimate ChshLikeEstimate::expectation_on(const DensityMatrix& rho) const {
  const double w_plus =
      0.5 * (expectation(correlator_operator(0.0, 0.0), rho) +
             expectation(correlator_operator(M_PI / 2.0, M_PI / 2.0), rho));
  const double w_minus =
      0.5 * (expectation(correlator_operator(0.0, 0.0), rho) -
             expectation(correlator_operator(M_PI / 2.0, M_PI / 2.0), rho));
  return {expectation(op, rho),
          std::hypot(se_plus * w_plus, se_minus * w_minus), n_trajectories, 0};
}

ChshLikeEstimate mc_chsh_like_estimate(ChshLikeKind kind,
                                       const NoiseKind& noise,
                                       const CorrelationModel& corr,
                                       const ControlSetting& on,
                                       const McRunConfig& cfg,
                                       const ControlSetting& off) {
  const ControlSetting b_on =
      kind == ChshLikeKind::Phi ? on : star_of(on);

  const std::array<std::pair<ControlSetting, ControlSetting>, 4> pairs = {
      std::pair{off, off}, {on, off}, {off, b_on}, {on, b_on}};
  const std::array<double, 4> signs = {1.0, 1.0, 1.0, -1.0};

  double coeff_plus = 0.0, coeff_minus = 0.0;
  double var_plus = 0.0, var_minus = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    McRunConfig sub = cfg;
    sub.seed = trajectory_seed(cfg.seed, 0x100000ULL + k);
    const CorrelatorCoefficients c = estimate_corr_coefficients(
        noise, corr, pairs[k].first, pairs[k].second, sub);
    coeff_plus += signs[k] * c.cos_diff.value;
    coeff_minus += signs[k] * c.cos_sum.value;
    var_plus += c.cos_diff.std_error * c.cos_diff.std_error;
    var_minus += c.cos_sum.std_error * c.cos_sum.std_error;
  }

  CorrelatorCoefficients total;
  total.cos_diff.value = coeff_plus;
  total.cos_sum.value = coeff_minus;
  ChshLikeEstimate out{avg_correlator_from_coefficients(total),
                       std::sqrt(var_plus), std::sqrt(var_minus),
                       cfg.n_trajectories};
  return out;
}

TwoQubitOperator gaussian_chsh_like_operator(ChshLikeKind kind, double chi_a,
                                             double chi_b, double chi_ab) {
  if (std::abs(chi_ab) > std::sqrt(chi_a * chi_b) + 1e-12) {
    throw std::invalid_argument(
        "gaussian_chsh_like_operator: cross term violates Cauchy-Schwarz");
  }
  auto gaussian_corr = [](double ca, double cb, double cab) {
    AttenuationSet s;
    s.chi_a = {ca, 0.0, false};
    s.chi_b = {cb, 0.0, false};
    s.chi_curly = {cab, 0.0, false};
    s.chi_square = {-cab, 0.0, false};
    s.chi_ab = {cab, 0.0, false};
    return assemble_avg_correlator(s);
  };
  // On* swaps the curly and square cross terms, i.e. flips chi_ab here.
  const double last = kind == ChshLikeKind::Phi ? chi_ab : -chi_ab;
  AveragedCorrelators c{gaussian_corr(0.0, 0.0, 0.0),
                        gaussian_corr(chi_a, 0.0, 0.0),
                        gaussian_corr(0.0, chi_b, 0.0),
                        gaussian_corr(chi_a, chi_b, last)};
  return chsh_like_operator(kind, c);
}

}  // namespace dpw
