#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "extqv/error.hpp"
#include "extqv/models.hpp"

using namespace extqv;

namespace {

/// E[h(Y)], Y ~ N(0, v), by the composite Simpson rule on [-14 sd, 14 sd].
double gauss_expect(const std::function<double(double)>& h, double v) {
    const double sd = std::sqrt(v);
    const int N = 20000;
    const double a = -14.0 * sd, b = 14.0 * sd, dx = (b - a) / N;
    double s = 0.0;
    for (int i = 0; i <= N; ++i) {
        const double y = a + i * dx;
        const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * h(y) * std::exp(-y * y / (2 * v));
    }
    return s * dx / 3.0 / std::sqrt(2 * std::numbers::pi * v);
}

/// Generator of the eps = 1 fast process applied to phi, by central differences.
double generator(const MultiscaleModel& m, const std::function<double(double)>& phi, double y) {
    const double h = 1e-4;
    const double d1 = (phi(y + h) - phi(y - h)) / (2 * h);
    const double d2 = (phi(y + h) - 2 * phi(y) + phi(y - h)) / (h * h);
    const double b = m.beta(y);
    return m.g(y) * d1 + 0.5 * b * b * d2;
}

}  // namespace

TEST_CASE("catalog targets") {
    CHECK(theoretical_sigma2("toy_ou", 1.0) == 1.0);
    CHECK(theoretical_sigma2("cubic", 0.1) == doctest::Approx(0.22).epsilon(1e-15));
    CHECK(theoretical_sigma2("one_minus_y2", 1.0) == 2.0);
    CHECK(theoretical_sigma2("sin_sin", std::sqrt(0.5)) == doctest::Approx(0.5));
    CHECK(theoretical_sigma2("ou_with_drift", 1.0) == 1.0);
    CHECK_THROWS_AS(theoretical_sigma2("toy", 1.0), ConfigError);
    CHECK(catalog().size() == 5);
}

TEST_CASE("finite-eps OU expectation") {
    CHECK(ou_finite_eps_expectation(1.0, 0.05) == doctest::Approx(0.9975).epsilon(1e-12));
    CHECK(ou_finite_eps_expectation(1.0, 0.20) == doctest::Approx(0.9600).epsilon(1e-12));
    CHECK(ou_finite_eps_expectation(2.0, 1e-4) == doctest::Approx(4.0).epsilon(1e-7));
    double prev = 0.0;
    for (double eps = 0.95; eps > 0.01; eps -= 0.01) {
        const double v = ou_finite_eps_expectation(1.0, eps);
        CHECK(v < 1.0);
        CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS_AS(ou_finite_eps_expectation(1.0, 0.0), ConfigError);
}

TEST_CASE("Gaussian-model constants re-derived from the corrector") {
    struct Case {
        const char* id;
        std::function<double(double)> phi;
        double expected;
    };
    const Case cases[] = {
        {"toy_ou", [](double y) { return y; }, 1.0},
        {"cubic", [](double y) { return y * y * y / 3 + 2 * y; }, 22.0},
        {"one_minus_y2", [](double y) { return (1 - y * y) / 2; }, 2.0},
        {"ou_with_drift", [](double y) { return y; }, 1.0},
    };
    for (const auto& c : cases) {
        const auto& m = find_model(c.id);
        // phi solves L phi = -f with zero mean
        for (double y : {-2.0, -0.3, 0.0, 0.7, 1.9}) {
            CHECK(generator(m, c.phi, y) == doctest::Approx(-m.f(y)).epsilon(1e-5));
        }
        CHECK(std::abs(gauss_expect(c.phi, m.invariant.variance)) < 1e-10);
        const double s2 = 2 * gauss_expect([&](double y) { return m.f(y) * c.phi(y); },
                                           m.invariant.variance);
        CHECK(s2 == doctest::Approx(c.expected).epsilon(1e-10));
        CHECK(m.sigma2_factor == c.expected);
    }
}

TEST_CASE("centering holds for every catalog model") {
    for (const auto& m : catalog()) {
        auto rng = make_rng(17, 0);
        const auto r = verify_centering(m.name, 100000, rng);
        INFO(m.name, " mean=", r.mean, " se=", r.std_error);
        CHECK(r.pass);
        CHECK(r.std_error > 0.0);
    }
}

TEST_CASE("centering input errors") {
    auto rng = make_rng(1, 1);
    CHECK_THROWS_AS(verify_centering("cubic", 1, rng), ConfigError);
    CHECK_THROWS_AS(verify_centering("quartic", 100, rng), ConfigError);
}
