#include <doctest.h>

#include <cmath>

#include "extqv/error.hpp"
#include "extqv/sdecore.hpp"

using namespace extqv;

namespace {

SimConfig toy(double sigma, double eps, std::size_t n) {
    SimConfig c;
    c.model_id = "toy_ou";
    c.sigma = sigma;
    c.epsilon = eps;
    c.grid = Grid(n, 1.0);
    return c;
}

}  // namespace

TEST_CASE("grid arithmetic") {
    Grid g(10, 2.0);
    CHECK(g.delta() == 0.2);
    CHECK(g.points() == 11);
    CHECK(g.time(10) == doctest::Approx(2.0));
    CHECK_THROWS_AS(Grid(0, 1.0), ConfigError);
    CHECK_THROWS_AS(Grid(5, 0.0), ConfigError);
}

TEST_CASE("sigma = 0 gives a constant slow path") {
    for (auto model : {"toy_ou", "cubic", "one_minus_y2", "sin_sin"}) {
        auto c = toy(0.0, 0.1, 500);
        c.model_id = model;
        c.x0 = 1.5;
        c.init = default_init(find_model(model));
        auto rng = make_rng(3, 0);
        const auto p = simulate(c, rng);
        for (double v : p.slow) REQUIRE(v == 1.5);
    }
}

TEST_CASE("single Euler step matches the closed form") {
    auto c = toy(0.7, 0.2, 1);
    c.x0 = 0.3;
    c.keep_fast = true;
    auto rng = make_rng(11, 4);
    const auto p = simulate(c, rng);
    REQUIRE(p.slow.size() == 2);
    const double expected = 0.3 + 1.0 * (0.7 / 0.2) * p.fast[0];
    CHECK(p.slow[1] == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("exact_ou stationary fast path has variance 1/2") {
    auto c = toy(1.0, 0.1, 100000);
    c.integrator = Integrator::exact_ou;
    c.keep_fast = true;
    auto rng = make_rng(99, 0);
    const auto p = simulate(c, rng);
    double s = 0.0, s2 = 0.0;
    for (double y : p.fast) {
        s += y;
        s2 += y * y;
    }
    const double N = static_cast<double>(p.fast.size());
    const double mean = s / N;
    const double var = s2 / N - mean * mean;
    // Sample variance of an AR(1) with lag-one correlation rho:
    // Var ~ 2 v^2 / N * (1 + rho^2) / (1 - rho^2).
    const double rho = std::exp(-c.grid.delta() / (c.epsilon * c.epsilon));
    const double se = 0.5 * std::sqrt(2.0 / N * (1 + rho * rho) / (1 - rho * rho));
    CHECK(std::abs(var - 0.5) <= 3.0 * se);
}

TEST_CASE("exact_ou transition has conditional mean exp(-h/eps^2) y") {
    SimConfig c = toy(1.0, 0.1, 100000);
    c.grid = Grid(100000, 100.0);  // h / eps^2 = 0.1
    c.integrator = Integrator::exact_ou;
    c.keep_fast = true;
    auto rng = make_rng(5, 5);
    const auto p = simulate(c, rng);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 1; k < p.fast.size(); ++k) {
        sxy += p.fast[k - 1] * p.fast[k];
        sxx += p.fast[k - 1] * p.fast[k - 1];
    }
    const double slope = sxy / sxx;
    const double decay = std::exp(-0.1);
    double rss = 0.0;
    for (std::size_t k = 1; k < p.fast.size(); ++k) {
        const double r = p.fast[k] - slope * p.fast[k - 1];
        rss += r * r;
    }
    const double se = std::sqrt(rss / (p.fast.size() - 2) / sxx);
    CHECK(std::abs(slope - decay) <= 3.0 * se);
}

TEST_CASE("simulation is bitwise reproducible") {
    for (auto integ : {Integrator::euler, Integrator::exact_ou}) {
        auto c = toy(1.0, 0.05, 20000);
        c.integrator = integ;
        auto r1 = make_rng(42, 17);
        auto r2 = make_rng(42, 17);
        CHECK(simulate(c, r1).slow == simulate(c, r2).slow);
    }
}

TEST_CASE("slow path is linear in sigma on a shared stream") {
    auto c1 = toy(1.0, 0.1, 5000);
    auto ca = toy(2.75, 0.1, 5000);
    auto r1 = make_rng(8, 2);
    auto ra = make_rng(8, 2);
    const auto p1 = simulate(c1, r1);
    const auto pa = simulate(ca, ra);
    double scale = 0.0;
    for (double v : p1.slow) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < p1.slow.size(); ++i) {
        REQUIRE(pa.slow[i] == 2.75 * p1.slow[i]);
        if (i > 0) {
            const double d1 = p1.slow[i] - p1.slow[i - 1];
            const double da = pa.slow[i] - pa.slow[i - 1];
            REQUIRE(std::abs(da - 2.75 * d1) <= 1e-12 * 2.75 * scale);
        }
    }
}

TEST_CASE("invalid configurations are rejected") {
    auto rng = make_rng(1, 0);
    auto c = toy(1.0, 0.1, 100);
    c.model_id = "nope";
    CHECK_THROWS_AS(simulate(c, rng), ConfigError);

    c = toy(1.0, 0.1, 100);
    c.model_id = "sin_sin";
    c.init = InitPolicy{InitKind::burn_in, -1.0};
    c.integrator = Integrator::exact_ou;
    CHECK_THROWS_AS(simulate(c, rng), ConfigError);

    c.integrator = Integrator::euler;
    c.init = InitPolicy{InitKind::stationary_exact, -1.0};
    CHECK_THROWS_AS(simulate(c, rng), ConfigError);

    c = toy(1.0, 1.5, 100);
    CHECK_THROWS_AS(simulate(c, rng), ConfigError);
    c = toy(-1.0, 0.1, 100);
    CHECK_THROWS_AS(simulate(c, rng), ConfigError);
    c = toy(1.0, 0.1, 100);
    c.substeps = 0;
    CHECK_THROWS_AS(simulate(c, rng), ConfigError);
}

TEST_CASE("unstable Euler step is reported, sub-stepping cures it") {
    auto c = toy(1.0, 0.01, 200);  // h / eps^2 = 50
    auto rng = make_rng(1, 0);
    try {
        simulate(c, rng);
        FAIL("expected SimulationError");
    } catch (const SimulationError& e) {
        CHECK(e.step() > 0);
        CHECK(e.step() <= 200);
    }
    c.substeps = 100;
    auto rng2 = make_rng(1, 0);
    CHECK_NOTHROW(simulate(c, rng2));
}

TEST_CASE("burn-in initialization for sin_sin") {
    SimConfig c;
    c.model_id = "sin_sin";
    c.sigma = std::sqrt(0.5);
    c.epsilon = 0.05;
    c.grid = Grid(2000, 1.0);
    c.init = default_init(find_model("sin_sin"));
    CHECK(c.init.kind == InitKind::burn_in);
    auto rng = make_rng(3, 3);
    const auto p = simulate(c, rng);
    p.validate();
    CHECK(p.slow.front() == 0.0);
}

TEST_CASE("subsample keeps multiples of the stride and the endpoint") {
    SamplePath p;
    p.grid = Grid(10, 1.0);
    for (int i = 0; i <= 10; ++i) p.slow.push_back(i * i);
    CHECK(subsample(p, 1).slow == p.slow);
    CHECK(subsample(p, 10).slow == std::vector<double>{0, 100});
    CHECK(subsample_indices(10, 4) == std::vector<std::size_t>{0, 4, 8, 10});
    CHECK(subsample_indices(10, 5) == std::vector<std::size_t>{0, 5, 10});
    const auto s = subsample(p, 4);
    CHECK(s.slow == std::vector<double>{0, 16, 64, 100});
    CHECK(s.grid.n == 3);
    CHECK_THROWS_AS(subsample(p, 0), ConfigError);
    CHECK_THROWS_AS(subsample(p, 11), ConfigError);
}
