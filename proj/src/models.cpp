#include "extqv/models.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "extqv/error.hpp"

namespace extqv {

namespace {

double identity(double y) { return y; }
double neg_identity(double y) { return -y; }
double one(double) { return 1.0; }
double sqrt_two(double) { return std::numbers::sqrt2; }
double cube(double y) { return y * y * y; }
double one_minus_square(double y) { return 1.0 - y * y; }
double sine(double y) { return std::sin(y); }
double neg_sine(double y) { return -std::sin(y); }

constexpr std::array<MultiscaleModel, 5> kCatalog = {{
    {ModelId::toy_ou, "toy_ou", identity, neg_identity, one, nullptr,
     {true, 0.0, 0.5}, 1.0, true, 1.0},
    // Corrector y^3/3 + 2y: 2 E[y^3 (y^3/3 + 2y)] = 2 (15/3 + 6) = 22.
    {ModelId::cubic, "cubic", cube, neg_identity, sqrt_two, nullptr,
     {true, 0.0, 1.0}, 22.0, true, std::numbers::sqrt2},
    // Corrector (1 - y^2)/2: E[(1 - y^2)^2] = 2.
    {ModelId::one_minus_y2, "one_minus_y2", one_minus_square, neg_identity, sqrt_two, nullptr,
     {true, 0.0, 1.0}, 2.0, true, std::numbers::sqrt2},
    {ModelId::sin_sin, "sin_sin", sine, neg_sine, one, nullptr,
     {false, 0.0, 0.0}, 1.0, false, 1.0},
    {ModelId::ou_with_drift, "ou_with_drift", identity, neg_identity, one, sine,
     {true, 0.0, 0.5}, 1.0, true, 1.0},
}};

}  // namespace

std::span<const MultiscaleModel> catalog() { return kCatalog; }

const MultiscaleModel& find_model(std::string_view model_id) {
    for (const auto& m : kCatalog) {
        if (m.name == model_id) return m;
    }
    throw ConfigError("unknown model '" + std::string(model_id) + "'");
}

const MultiscaleModel& find_model(ModelId id) {
    for (const auto& m : kCatalog) {
        if (m.id == id) return m;
    }
    throw ConfigError("unknown model id");
}

double theoretical_sigma2(const MultiscaleModel& model, double sigma) {
    return model.sigma2_factor * sigma * sigma;
}

double theoretical_sigma2(std::string_view model_id, double sigma) {
    return theoretical_sigma2(find_model(model_id), sigma);
}

double ou_finite_eps_expectation(double sigma, double epsilon) {
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    const double e2 = epsilon * epsilon;
    return sigma * sigma * (1.0 + e2 * std::expm1(-1.0 / e2));
}

CenteringReport verify_centering(std::string_view model_id, std::size_t samples, RngStream& rng) {
    const auto& model = find_model(model_id);
    if (samples < 2) throw ConfigError("verify_centering needs at least 2 samples");

    double sum = 0.0, comp = 0.0;
    double sum_sq = 0.0;
    auto add = [&](double v) {
        // Neumaier on the first moment; second moment only feeds the stderr.
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
        sum_sq += v * v;
    };

    if (model.invariant.gaussian) {
        const double sd = std::sqrt(model.invariant.variance);
        for (std::size_t i = 0; i < samples; ++i) {
            add(model.f(model.invariant.mean + sd * rng.normal()));
        }
    } else {
        // eps = 1 fast dynamics; relaxation time is O(1).
        constexpr double h = 0.01;
        constexpr std::size_t burn_steps = 1000;
        constexpr std::size_t lag_steps = 400;
        const double sqrt_h = std::sqrt(h);
        double y = 0.0;
        auto step = [&] { y += model.g(y) * h + model.beta(y) * sqrt_h * rng.normal(); };
        for (std::size_t i = 0; i < burn_steps; ++i) step();
        for (std::size_t s = 0; s < samples; ++s) {
            for (std::size_t i = 0; i < lag_steps; ++i) step();
            add(model.f(y));
        }
    }

    const double n = static_cast<double>(samples);
    CenteringReport r;
    r.mean = (sum + comp) / n;
    const double var = std::max(0.0, (sum_sq - n * r.mean * r.mean) / (n - 1.0));
    r.std_error = std::sqrt(var / n);
    r.pass = std::abs(r.mean) <= 4.0 * r.std_error;
    return r;
}

}  // namespace extqv
