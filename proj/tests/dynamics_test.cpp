#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

namespace polyrep::testing {
namespace {

IntegratorConfig<double> config(Method m, double dt, double t_end, int record_every = 1) {
  IntegratorConfig<double> c;
  c.method = m;
  c.dt = dt;
  c.t_end = t_end;
  c.record_every = record_every;
  return c;
}

Measure harvest_start() {
  return make_probability_1d(Space::interval(0.0, 1.0), {0.0, 0.5, 1.0}, {0.3, 0.3, 0.4});
}

Measure harvest_target() {
  const double t = 1.0 / 3.0;
  return make_probability_1d(Space::interval(0.0, 1.0), {0.0, 0.5, 1.0}, {t, t, t});
}

/// Error in the mean at t_end against the closed form, for u = 2 - zw.
double mean_error(Method m, double dt, double t_end, double m0) {
  const double beta = (1.0 - m0) / 2.0;
  const auto traj = integrate(kernel_2mzw(), two_point(beta, 1.0 - beta),
                              config(m, dt, t_end, 1'000'000));
  const auto& w = traj.weights.back();
  return std::abs((w(1) - w(0)) - mean_2mzw(m0, t_end));
}

TEST(ReplicatorRhs, WorkedValues) {
  const auto k = kernel_2mzw();
  EXPECT_EQ(replicator_rhs(k, pstar2()), Vector<double>::Zero(2));
  const auto d = replicator_rhs(k, two_point(0.6, 0.4));
  EXPECT_NEAR(d(0), -0.096, 1e-15);
  EXPECT_NEAR(d(1), 0.096, 1e-15);
  EXPECT_NEAR(d.sum(), 0.0, 1e-15);
  EXPECT_EQ(replicator_rhs(k, Measure::dirac(unit_box(), pt(0.3)))(0), 0.0);
}

TEST(RestPointResidual, WorkedValues) {
  EXPECT_EQ(rest_point_residual(kernel_harvest(), harvest_target()), 0.0);
  EXPECT_EQ(rest_point_residual(kernel_2mzw(), pstar2()), 0.0);

  // Brute force: rows 2 - z m against E = 2 - m^2 with m = -0.2.
  const auto q = two_point(0.6, 0.4);
  const auto a = atoms(q);
  const double e = double_sum(u_2mzw, a, a);
  double oracle = 0.0;
  for (const auto& atom : a)
    oracle = std::max(oracle, std::abs(double_sum(u_2mzw, {{atom.x, 1.0}}, a) - e));
  EXPECT_NEAR(oracle, 0.24, 1e-15);
  EXPECT_NEAR(rest_point_residual(kernel_2mzw(), q), oracle, 1e-15);
}

TEST(IntegratorConfig, StepCapFollowsBound) {
  const auto k = kernel_2mzw();  // bound 3, cap 1/30
  EXPECT_THROW(integrate(k, pstar2(), config(Method::Exponential, 0.05, 1.0)), StepSizeTooLarge);
  EXPECT_NO_THROW(integrate(k, pstar2(), config(Method::Exponential, 0.1 / 3.0, 1.0)));
  EXPECT_THROW(validate(config(Method::RK4, 0.01, 0.001), 3.0), InvalidIntegratorConfig);
  EXPECT_THROW(validate(config(Method::RK4, 0.0, 1.0), 3.0), InvalidIntegratorConfig);
  EXPECT_THROW(validate(config(Method::RK4, 0.01, 1.0, 0), 3.0), InvalidIntegratorConfig);
}

TEST(Integrate, TargetSupportMustBeInsideStart) {
  const auto q0 = make_probability_1d(unit_box(), {-1.0, 0.0}, {0.5, 0.5});
  EXPECT_THROW(integrate(kernel_2mzw(), q0, config(Method::Exponential, 0.01, 1.0),
                         std::optional<Measure>(pstar2())),
               AbsoluteContinuityViolated);
}

TEST(Integrate, ConstantKernelFreezesState) {
  const auto k = kernel_affine(5, 0, 0, 0);
  const auto q0 = make_probability_1d(unit_box(), {-0.7, 0.1, 0.9}, {0.2, 0.5, 0.3});
  for (Method m : {Method::Exponential, Method::RK4}) {
    const auto traj = integrate(k, q0, config(m, 0.01, 2.0));
    for (const auto& w : traj.weights)
      EXPECT_LE((w - q0.weights()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Integrate, RestPointStaysPut) {
  for (Method m : {Method::Exponential, Method::RK4}) {
    const auto traj = integrate(kernel_2mzw(), pstar2(), config(m, 0.02, 3.0));
    for (const auto& w : traj.weights)
      EXPECT_LE((w - pstar2().weights()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Integrate, RecordsOnStrideAndFinalTime) {
  const auto traj = integrate(kernel_2mzw(), two_point(0.6, 0.4),
                              config(Method::Exponential, 0.01, 1.005, 10),
                              std::optional<Measure>(pstar2()));
  ASSERT_EQ(traj.size(), 12u);  // t = 0, 0.1, ..., 1.0, 1.005
  EXPECT_EQ(traj.times.front(), 0.0);
  EXPECT_EQ(traj.times.back(), 1.005);
  EXPECT_EQ(traj.v_values.size(), traj.size());
  EXPECT_EQ(traj.distances.size(), traj.size());
  EXPECT_EQ(traj.mass_errors.size(), traj.size());
  for (std::size_t i = 1; i < traj.size(); ++i) EXPECT_GT(traj.times[i], traj.times[i - 1]);
}

TEST(Integrate, NoDiagnosticsWithoutTarget) {
  const auto traj = integrate(kernel_2mzw(), two_point(0.6, 0.4),
                              config(Method::Exponential, 0.01, 0.5));
  EXPECT_FALSE(traj.has_diagnostics());
  EXPECT_TRUE(traj.v_values.empty());
}

TEST(Integrate, TracksClosedFormMean) {
  const auto traj = integrate(kernel_2mzw(), two_point(0.6, 0.4),
                              config(Method::Exponential, 0.01, 10.0),
                              std::optional<Measure>(pstar2()));
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double m = mean_2mzw(-0.2, traj.times[i]);
    const auto& w = traj.weights[i];
    EXPECT_NEAR(w(1) - w(0), m, 1e-9) << "t = " << traj.times[i];
    EXPECT_NEAR(traj.distances[i], std::abs(m), 1e-9);
    EXPECT_NEAR(traj.v_values[i], -0.5 * std::log1p(-m * m), 1e-10);
  }
  EXPECT_LT(traj.distances.back(), 1e-3);
}

TEST(Integrate, CoordinationKernelDiverges) {
  const auto traj = integrate(kernel_affine(0, 0, 0, 1), two_point(0.45, 0.55),
                              config(Method::Exponential, 0.01, 15.0, 100));
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& w = traj.weights[i];
    EXPECT_NEAR(w(1) - w(0), mean_zw(0.1, traj.times[i]), 1e-9);
  }
}

TEST(Integrate, SupportAndMassPreserved) {
  Gen g(31);
  const auto s = Space::interval(0.0, 1.0);
  const auto h = kernel_harvest();
  for (int trial = 0; trial < 20; ++trial) {
    const auto q0 = g.measure_1d(s, 6);
    for (Method m : {Method::Exponential, Method::RK4}) {
      const auto traj = integrate(h, q0, config(m, 0.01, 3.0, 5));
      for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto& w = traj.weights[i];
        EXPECT_EQ(w.size(), q0.size());
        EXPECT_GT(w.minCoeff(), 0.0);
        EXPECT_LE(std::abs(w.sum() - 1.0), 1e-9);
        EXPECT_LE(traj.mass_errors[i], 1e-9);
      }
    }
  }
}

TEST(Integrate, MethodsAgreeOnBothGames) {
  struct Case {
    Kernel k;
    Measure q0;
  };
  const Case cases[] = {{kernel_harvest(), harvest_start()}, {kernel_2mzw(), two_point(0.6, 0.4)}};
  for (const auto& c : cases) {
    const auto a = integrate(c.k, c.q0, config(Method::Exponential, 1e-3, 1.0, 100));
    const auto b = integrate(c.k, c.q0, config(Method::RK4, 1e-3, 1.0, 100));
    EXPECT_LE(variational_distance(a.final_state(), b.final_state()), 1e-6);
  }
}

TEST(Integrate, FourthOrderConvergence) {
  // Step sizes large enough that the error sits well above roundoff.
  for (Method m : {Method::RK4, Method::Exponential}) {
    const double coarse = mean_error(m, 1.0 / 30.0, 2.0, -0.6);
    const double fine = mean_error(m, 1.0 / 60.0, 2.0, -0.6);
    EXPECT_GE(std::log2(coarse / fine), 3.5) << to_string(m) << " " << coarse << " " << fine;
  }
}

TEST(Integrate, LyapunovSlopeDefectShrinksFirstOrder) {
  // (V(t+h) - V(t)) / h against -margin(Q(t)); the defect is O(h).
  auto defect = [](double h) {
    const auto traj = integrate(kernel_2mzw(), two_point(0.7, 0.3),
                                config(Method::Exponential, h, 2.0),
                                std::optional<Measure>(pstar2()));
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
      const double slope = (traj.v_values[i + 1] - traj.v_values[i]) / h;
      const double m = mean_1d(traj.state(i));
      worst = std::max(worst, std::abs(slope + m * m));  // margin = m^2 here
    }
    return worst;
  };
  const double d1 = defect(0.02), d2 = defect(0.01), d3 = defect(0.005);
  EXPECT_NEAR(d1 / d2, 2.0, 0.2);
  EXPECT_NEAR(d2 / d3, 2.0, 0.2);
}

TEST(Integrate, DeterministicRepeat) {
  const auto a = integrate(kernel_harvest(), harvest_start(), config(Method::RK4, 0.01, 2.0),
                           std::optional<Measure>(harvest_target()));
  const auto b = integrate(kernel_harvest(), harvest_start(), config(Method::RK4, 0.01, 2.0),
                           std::optional<Measure>(harvest_target()));
  EXPECT_EQ(a.times, b.times);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.v_values, b.v_values);
}

}  // namespace
}  // namespace polyrep::testing
