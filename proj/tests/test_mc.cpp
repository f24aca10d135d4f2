#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dpw/analytic.hpp"
#include "dpw/mc.hpp"
#include "support/test_support.hpp"

using namespace dpw;

namespace {

OuTrajectory sampled_wave(double omega, double phase_shift, double T,
                          double dt) {
  OuTrajectory traj;
  traj.dt = dt;
  traj.horizon = T;
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  traj.samples.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    traj.samples[k] = std::sin(omega * k * dt + phase_shift);
  }
  return traj;
}

// fine-grid quadrature oracle evaluating the true waveform, not the samples
double wave_phase_oracle(const FilterFunction& f, double omega,
                         double phase_shift, double dt_fine) {
  double total = 0.0;
  for (const auto& seg : f.segments()) {
    const auto steps =
        static_cast<std::size_t>(std::ceil((seg.end - seg.start) / dt_fine));
    const double h = (seg.end - seg.start) / static_cast<double>(steps);
    double acc =
        0.5 * (std::sin(omega * seg.start + phase_shift) +
               std::sin(omega * seg.end + phase_shift));
    for (std::size_t k = 1; k < steps; ++k) {
      acc += std::sin(omega * (seg.start + k * h) + phase_shift);
    }
    total += seg.sign * acc * h;
  }
  return total;
}

}  // namespace

TEST_CASE("phase accumulation: DC rejection and decoupling") {
  const FilterFunction f = carr_purcell(3, 0.9);
  RtnTrajectory constant{2.5, 1, {}, f.duration()};
  CHECK(std::abs(accumulate_phase(f, SiteTrajectory{constant})) <
        1e-13 * f.duration());

  const SiteTrajectory any{constant};
  CHECK(accumulate_phase(DecoupledMarker{}, any) == 0.0);
}

TEST_CASE("phase accumulation: exact telegraph integration by hand") {
  const FilterFunction f = carr_purcell(1, 2.0);  // +1 on [0,1), -1 on [1,2]
  RtnTrajectory traj{2.0, 1, {0.3}, 2.0};
  // +2*0.3 - 2*0.7 + 2*1.0 = 1.2
  CHECK(accumulate_phase(f, SiteTrajectory{traj}) ==
        doctest::Approx(1.2).epsilon(1e-14));

  RtnTrajectory mismatched{1.0, 1, {}, 3.0};
  CHECK_THROWS_AS(accumulate_phase(f, SiteTrajectory{mismatched}),
                  std::invalid_argument);
}

TEST_CASE("phase accumulation: sampled waves match fine-grid quadrature") {
  const double omega = M_PI;
  const FilterFunction f = carr_purcell(2, M_PI / omega);
  const double dt = 5e-5;
  for (double shift : {0.0, M_PI / 2.0}) {
    const OuTrajectory wave = sampled_wave(omega, shift, f.duration(), dt);
    const double mine = accumulate_phase(f, SiteTrajectory{wave});
    const double oracle = wave_phase_oracle(f, omega, shift, dt / 100.0);
    CHECK(std::abs(mine - oracle) < 1e-8);
  }
  // the cosine-phase wave sits in the filter passband: 4/pi
  const OuTrajectory cosine =
      sampled_wave(omega, M_PI / 2.0, f.duration(), dt);
  CHECK(accumulate_phase(f, SiteTrajectory{cosine}) ==
        doctest::Approx(4.0 / M_PI).epsilon(1e-6));
}

TEST_CASE("phase accumulation: off-grid switches, sub-cell segments") {
  // ramp xi(t) = t sampled coarsely; interpolation and partial-cell
  // trapezoids are exact on linear paths
  OuTrajectory ramp;
  ramp.dt = 0.25;
  ramp.horizon = 1.0;
  ramp.samples = {0.0, 0.25, 0.5, 0.75, 1.0};

  // both switches off-grid; middle segment shorter than one cell
  const FilterFunction f({0.2, 0.3}, 1, 1.0);
  // int f t dt = [0,0.2] - [0.2,0.3] + [0.3,1] of t dt
  const double expected = 0.02 - 0.025 + 0.455;
  CHECK(accumulate_phase(f, SiteTrajectory{ramp}) ==
        doctest::Approx(expected).epsilon(1e-12));

  // sub-cell segment with no interior node at all
  const FilterFunction g({0.26, 0.49}, 1, 1.0);
  const double expected_g = 0.0338 - 0.5 * (0.49 * 0.49 - 0.26 * 0.26) +
                            0.5 * (1.0 - 0.49 * 0.49);
  CHECK(accumulate_phase(g, SiteTrajectory{ramp}) ==
        doctest::Approx(expected_g).epsilon(1e-12));
}

TEST_CASE("per-trajectory correlator values") {
  const DensityMatrix phi = bell_state(BellKind::PhiPlus);
  CHECK(per_trajectory_correlator(phi, {0.0, 0.0}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  const DensityMatrix mixed = werner_state(0.0);
  for (int i = 0; i < 100; ++i) {
    const PhasePair p{angle(rng), angle(rng)};
    CHECK(per_trajectory_correlator(phi, p) ==
          doctest::Approx(std::cos(p.alpha + p.beta)).epsilon(1e-12));
    CHECK(std::abs(per_trajectory_correlator(mixed, p)) < 1e-12);
  }
}

TEST_CASE("decoupled runs have zero variance") {
  const DensityMatrix phi = bell_state(BellKind::PhiPlus);
  const McEstimate e = mc_average_correlator(
      phi, NoiseKind{OuParams{1.0, 0.5}}, CorrelationModel::perfect(),
      ControlSetting::off_ideal(), ControlSetting::off_ideal(),
      {2000, 7, 2});
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.std_error == 0.0);

  CHECK_THROWS_AS(
      mc_average_correlator(phi, NoiseKind{OuParams{1.0, 0.5}},
                            CorrelationModel::perfect(),
                            ControlSetting::off_ideal(),
                            ControlSetting::off_ideal(), {500, 7, 1}),
      std::invalid_argument);
}

TEST_CASE("perfectly correlated OU matches the quadrature closed form") {
  const ControlSetting on = ControlSetting::on(M_PI, 2);
  const FilterFunction f = carr_purcell(2, 1.0);
  const OuParams noise{1.0, 0.5};
  const double chi = gaussian_attenuation_quadrature(f, f, noise);
  const DensityMatrix phi = bell_state(BellKind::PhiPlus);

  const McEstimate on_on = mc_average_correlator(
      phi, NoiseKind{noise}, CorrelationModel::perfect(), on, on,
      {100000, 42, 0});
  CHECK(std::abs(on_on.value - std::exp(-4.0 * chi)) <=
        3.0 * on_on.std_error);

  const McEstimate indep = mc_average_correlator(
      phi, NoiseKind{noise}, CorrelationModel::independent(), on, on,
      {100000, 43, 0});
  CHECK(std::abs(indep.value - std::exp(-2.0 * chi)) <=
        3.0 * indep.std_error);

  const McEstimate on_off = mc_average_correlator(
      phi, NoiseKind{noise}, CorrelationModel::perfect(), on,
      ControlSetting::off_ideal(), {100000, 44, 0});
  CHECK(std::abs(on_off.value - std::exp(-chi)) <= 3.0 * on_off.std_error);
}

TEST_CASE("attenuation estimation against the Gaussian closed form") {
  const ControlSetting on = ControlSetting::on(M_PI, 2);
  const FilterFunction f = carr_purcell(2, 1.0);
  const OuParams noise{0.9, 0.5};
  const double chi = gaussian_attenuation_quadrature(f, f, noise);

  const AttenuationSet s =
      estimate_attenuations(NoiseKind{noise}, CorrelationModel::perfect(), on,
                            on, {100000, 45, 0});
  CHECK_FALSE(s.chi_a.saturated);
  CHECK(std::abs(s.chi_a.value - chi) <= 3.0 * s.chi_a.std_error);
  CHECK(std::abs(s.chi_b.value - chi) <= 3.0 * s.chi_b.std_error);
  // identical filters, perfect correlation: the difference phase vanishes
  CHECK(std::abs(s.chi_curly.value - s.chi_a.value) <=
        3.0 * std::hypot(s.chi_curly.std_error, s.chi_a.std_error));
  CHECK(std::abs(s.chi_square.value + s.chi_a.value) <=
        3.0 * std::hypot(s.chi_square.std_error, s.chi_a.std_error));
  CHECK(std::abs(s.chi_ab.value - chi) <= 3.0 * s.chi_ab.std_error);

  const AttenuationSet ind =
      estimate_attenuations(NoiseKind{noise}, CorrelationModel::independent(),
                            on, on, {100000, 46, 0});
  CHECK(std::abs(ind.chi_curly.value) <= 3.0 * ind.chi_curly.std_error);
  CHECK(std::abs(ind.chi_square.value) <= 3.0 * ind.chi_square.std_error);
}

TEST_CASE("attenuations of noiseless runs are exactly zero") {
  const ControlSetting on = ControlSetting::on(M_PI, 2);
  const AttenuationSet s = estimate_attenuations(
      NoiseKind{OuParams{0.0, 0.5}}, CorrelationModel::perfect(), on, on,
      {2000, 47, 1});
  CHECK(s.chi_a.value == 0.0);
  CHECK(s.chi_b.value == 0.0);
  CHECK(s.chi_curly.value == 0.0);
  CHECK(s.chi_square.value == 0.0);
}

TEST_CASE("On* swaps the two cross attenuations") {
  const ControlSetting on = ControlSetting::on(M_PI, 2);
  const ControlSetting star = ControlSetting::on_star(M_PI, 2);
  const OuParams noise{0.8, 0.5};

  const AttenuationSet plain = estimate_attenuations(
      NoiseKind{noise}, CorrelationModel::shared(0.6), on, on, {80000, 48, 0});
  const AttenuationSet swapped = estimate_attenuations(
      NoiseKind{noise}, CorrelationModel::shared(0.6), on, star,
      {80000, 49, 0});

  CHECK(std::abs(swapped.chi_curly.value - plain.chi_square.value) <=
        3.0 * std::hypot(swapped.chi_curly.std_error,
                         plain.chi_square.std_error));
  CHECK(std::abs(swapped.chi_square.value - plain.chi_curly.value) <=
        3.0 * std::hypot(swapped.chi_square.std_error,
                         plain.chi_curly.std_error));
  // the local attenuation is insensitive to the leading flip
  CHECK(std::abs(swapped.chi_b.value - plain.chi_b.value) <=
        3.0 * std::hypot(swapped.chi_b.std_error, plain.chi_b.std_error));
}

TEST_CASE("deep decoherence saturates instead of lying") {
  const ControlSetting on = ControlSetting::on(M_PI, 4);
  const AttenuationSet s = estimate_attenuations(
      NoiseKind{OuParams{12.0, 0.5}}, CorrelationModel::perfect(), on, on,
      {4000, 50, 1});
  CHECK(s.chi_a.saturated);
  CHECK(std::isinf(s.chi_a.value));
  CHECK_THROWS_AS(assemble_avg_correlator(s), std::invalid_argument);
}

TEST_CASE("operator assembly reproduces the tabulated limits") {
  auto flat = [](double a, double b, double curly, double square) {
    AttenuationSet s;
    s.chi_a = {a, 0, false};
    s.chi_b = {b, 0, false};
    s.chi_curly = {curly, 0, false};
    s.chi_square = {square, 0, false};
    s.chi_ab = {(curly - square) / 2.0, 0, false};
    return s;
  };
  const Matrix4 e00 = correlator_operator(0.0, 0.0).matrix();
  const Matrix4 eyy = correlator_operator(M_PI / 2.0, M_PI / 2.0).matrix();

  CHECK((assemble_avg_correlator(flat(0, 0, 0, 0)).matrix() - e00)
            .cwiseAbs()
            .maxCoeff() < 1e-14);

  const double chi = 0.37;
  CHECK((assemble_avg_correlator(flat(chi, 0, 0, 0)).matrix() -
         std::exp(-chi) * e00)
            .cwiseAbs()
            .maxCoeff() < 1e-14);

  const Matrix4 expected = 0.5 * (e00 + eyy) +
                           std::exp(-4.0 * chi) * 0.5 * (e00 - eyy);
  CHECK((assemble_avg_correlator(flat(chi, chi, chi, -chi)).matrix() - expected)
            .cwiseAbs()
            .maxCoeff() < 1e-14);
}

TEST_CASE("MC average equals the assembled-operator expectation") {
  // same seed on both routes: the estimates share trajectories, so they can
  // only differ through the dropped sin cross terms
  const ControlSetting on = ControlSetting::on(M_PI, 2);
  const DensityMatrix phi = bell_state(BellKind::PhiPlus);
  std::mt19937_64 rng(51);
  const DensityMatrix sep = random_separable_state(rng);

  struct Combo {
    NoiseKind kind;
    CorrelationModel corr;
    ControlSetting a, b;
  };
  const Combo combos[] = {
      {NoiseKind{OuParams{0.9, 0.5}}, CorrelationModel::perfect(), on, on},
      {NoiseKind{OuParams{0.9, 0.5}}, CorrelationModel::shared(0.5), on, on},
      {NoiseKind{OuParams{0.9, 0.5}}, CorrelationModel::independent(), on,
       ControlSetting::off_ideal()},
      {NoiseKind{RtnParams{0.6, 1.0}}, CorrelationModel::perfect(), on, on},
  };
  int subseed = 0;
  for (const auto& combo : combos) {
    for (const DensityMatrix* rho : {&phi, &sep}) {
      const McRunConfig cfg{50000, 520 + static_cast<std::uint64_t>(subseed++),
                            0};
      const McEstimate direct = mc_average_correlator(
          *rho, combo.kind, combo.corr, combo.a, combo.b, cfg);
      const AttenuationSet chi =
          estimate_attenuations(combo.kind, combo.corr, combo.a, combo.b, cfg);
      const double assembled = expectation(assemble_avg_correlator(chi), *rho);
      CHECK(std::abs(direct.value - assembled) <=
            3.0 * direct.std_error + 1e-9);
    }
  }
}

TEST_CASE("standard error scales as the square root of the ensemble") {
  const ControlSetting on = ControlSetting::on(M_PI, 2);
  const DensityMatrix phi = bell_state(BellKind::PhiPlus);
  const NoiseKind noise{OuParams{0.9, 0.5}};
  double prev_se = 0.0;
  int level = 0;
  for (std::uint64_t n : {1000ULL, 10000ULL, 100000ULL}) {
    const McEstimate e =
        mc_average_correlator(phi, noise, CorrelationModel::perfect(), on, on,
                              {n, 53, 0});
    if (level > 0) {
      const double ratio = prev_se / e.std_error;
      CHECK(ratio > std::sqrt(10.0) / 1.5);
      CHECK(ratio < std::sqrt(10.0) * 1.5);
    }
    prev_se = e.std_error;
    ++level;
  }
}

TEST_CASE("results are bit-identical for any worker count") {
  const ControlSetting on = ControlSetting::on(M_PI, 2);
  const DensityMatrix phi = bell_state(BellKind::PhiPlus);
  const NoiseKind noise{OuParams{0.9, 0.5}};

  McEstimate ref;
  for (int workers : {1, 4, 16}) {
    const McEstimate e =
        mc_average_correlator(phi, noise, CorrelationModel::perfect(), on, on,
                              {20000, 54, workers});
    if (workers == 1) {
      ref = e;
    } else {
      CHECK(e.value == ref.value);
      CHECK(e.std_error == ref.std_error);
    }
  }
}

TEST_CASE("experiment resolution rejects inconsistent inputs") {
  CHECK_THROWS_AS(
      NoiseExperiment::resolve(NoiseKind{RtnParams{1.0, 1.0}},
                               CorrelationModel::shared(0.5),
                               ControlSetting::on(M_PI, 2),
                               ControlSetting::off_ideal()),
      std::invalid_argument);
  // mismatched durations: T = 2 vs T = 3
  CHECK_THROWS_AS(
      NoiseExperiment::resolve(NoiseKind{OuParams{1.0, 0.5}},
                               CorrelationModel::perfect(),
                               ControlSetting::on(M_PI, 2),
                               ControlSetting::on(M_PI, 3)),
      std::invalid_argument);
}
