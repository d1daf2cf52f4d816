#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "stpanel/ar1.hpp"

using namespace stpanel;
using namespace test_helpers;

TEST_CASE("fit_ar1 is exact on a noiseless recursion") {
    Eigen::VectorXd e(20);
    e(0) = 1.0;
    for (int t = 1; t < 20; ++t) e(t) = 0.5 * e(t - 1);
    const Ar1Fit fit = fit_ar1(e);
    CHECK(fit.rho_hat == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(fit.innovations.cwiseAbs().maxCoeff() < 1e-15);
    CHECK(fit.innovation_variance < 1e-28);
}

TEST_CASE("fit_ar1 on white noise estimates rho near zero") {
    const Eigen::VectorXd e = random_vector(5000, 42);
    CHECK(std::abs(fit_ar1(e).rho_hat) < 0.05);
}

TEST_CASE("fit_ar1 is consistent on a long simulated AR(1) path") {
    const Eigen::VectorXd e = simulate_ar1(0.5, 2.0, 5000, 7);
    const Ar1Fit fit = fit_ar1(e);
    CHECK(fit.rho_hat >= 0.45);
    CHECK(fit.rho_hat <= 0.55);
    // innovation variance should land near the generating value 4
    CHECK(fit.innovation_variance == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("fit_ar1 rho is invariant to scaling the series") {
    const Eigen::VectorXd e = simulate_ar1(0.3, 1.0, 200, 9);
    const double base = fit_ar1(e).rho_hat;
    for (double c : {-3.0, 0.001, 1e6}) {
        CHECK(fit_ar1((c * e).eval()).rho_hat == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("fit_ar1 clamps the estimate into (-0.999, 0.999)") {
    Eigen::VectorXd e(10);
    e(0) = 1.0;
    for (int t = 1; t < 10; ++t) e(t) = 1.5 * e(t - 1);  // explosive input
    CHECK(fit_ar1(e).rho_hat == doctest::Approx(0.999));
}

TEST_CASE("fit_ar1 rejects degenerate and too-short series") {
    Eigen::VectorXd zeros_but_last = Eigen::VectorXd::Zero(5);
    zeros_but_last(4) = 1.0;  // all lagged values zero
    CHECK_THROWS_AS(fit_ar1(zeros_but_last), DegenerateSeries);
    CHECK_THROWS_AS(fit_ar1(Eigen::VectorXd::Ones(2)), DimensionMismatch);
}
