#include "extqv/sdecore.hpp"

#include <cmath>
#include <numbers>

#include "extqv/error.hpp"

namespace extqv {

Grid::Grid(std::size_t steps, double horizon) : n(steps), T(horizon) {
    if (steps < 1) throw ConfigError("grid needs n >= 1");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("grid needs T > 0");
}

void SamplePath::validate() const {
    if (slow.size() != grid.points()) throw ConfigError("slow path length does not match grid");
    if (has_fast() && fast.size() != grid.points()) {
        throw ConfigError("fast path length does not match grid");
    }
    for (double v : slow) {
        if (!std::isfinite(v)) throw ConfigError("slow path contains a non-finite value");
    }
    for (double v : fast) {
        if (!std::isfinite(v)) throw ConfigError("fast path contains a non-finite value");
    }
}

void SimConfig::validate() const {
    const auto& model = find_model(model_id);
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be >= 0");
    if (!std::isfinite(x0)) throw ConfigError("x0 must be finite");
    if (grid.n < 1 || !(grid.T > 0.0)) throw ConfigError("grid needs n >= 1 and T > 0");
    if (substeps < 1) throw ConfigError("substeps must be >= 1");
    if (!std::isfinite(init.burn_in_T)) throw ConfigError("burn_in_T must be finite");
    if (integrator == Integrator::exact_ou && !model.linear_ou_fast) {
        throw ConfigError("exact_ou integrator requires a linear OU fast process; model '" +
                          std::string(model.name) + "' has none");
    }
    if (init.kind == InitKind::stationary_exact && !model.invariant.gaussian) {
        throw ConfigError("model '" + std::string(model.name) +
                          "' has no exact invariant sampler; use burn_in initialization");
    }
}

InitPolicy default_init(const MultiscaleModel& model) {
    return model.invariant.gaussian ? InitPolicy{InitKind::stationary_exact, -1.0}
                                    : InitPolicy{InitKind::burn_in, -1.0};
}

namespace {

template <ModelId Id>
struct Dynamics;

template <>
struct Dynamics<ModelId::toy_ou> {
    static constexpr bool has_drift = false;
    static double f(double y) { return y; }
    static double g(double y) { return -y; }
    static double beta(double) { return 1.0; }
    static double drift(double) { return 0.0; }
};

template <>
struct Dynamics<ModelId::cubic> {
    static constexpr bool has_drift = false;
    static double f(double y) { return y * y * y; }
    static double g(double y) { return -y; }
    static double beta(double) { return std::numbers::sqrt2; }
    static double drift(double) { return 0.0; }
};

template <>
struct Dynamics<ModelId::one_minus_y2> {
    static constexpr bool has_drift = false;
    static double f(double y) { return 1.0 - y * y; }
    static double g(double y) { return -y; }
    static double beta(double) { return std::numbers::sqrt2; }
    static double drift(double) { return 0.0; }
};

template <>
struct Dynamics<ModelId::sin_sin> {
    static constexpr bool has_drift = false;
    static double f(double y) { return std::sin(y); }
    static double g(double y) { return -std::sin(y); }
    static double beta(double) { return 1.0; }
    static double drift(double) { return 0.0; }
};

template <>
struct Dynamics<ModelId::ou_with_drift> {
    static constexpr bool has_drift = true;
    static double f(double y) { return y; }
    static double g(double y) { return -y; }
    static double beta(double) { return 1.0; }
    static double drift(double x) { return std::sin(x); }
};

template <ModelId Id, bool Exact>
SamplePath integrate(const SimConfig& cfg, const MultiscaleModel& model, RngStream& rng) {
    using Dyn = Dynamics<Id>;

    const std::size_t n = cfg.grid.n;
    const double h = cfg.grid.delta() / static_cast<double>(cfg.substeps);
    const double inv_eps = 1.0 / cfg.epsilon;
    const double inv_eps2 = inv_eps * inv_eps;
    const double sqrt_h = std::sqrt(h);
    const double h_over_eps = h * inv_eps;
    const double decay = std::exp(-h * inv_eps2);
    const double ou_sd = model.beta_const * std::sqrt(-std::expm1(-2.0 * h * inv_eps2) / 2.0);

    auto fast_step = [&](double y) {
        const double xi = rng.normal();
        if constexpr (Exact) {
            return decay * y + ou_sd * xi;
        } else {
            return y + Dyn::g(y) * h * inv_eps2 + Dyn::beta(y) * sqrt_h * inv_eps * xi;
        }
    };

    double y = model.invariant.gaussian ? model.invariant.mean : 0.0;
    if (cfg.init.kind == InitKind::stationary_exact) {
        y = model.invariant.mean + std::sqrt(model.invariant.variance) * rng.normal();
    } else {
        const double t_burn =
            cfg.init.burn_in_T < 0.0 ? 10.0 * cfg.epsilon * cfg.epsilon : cfg.init.burn_in_T;
        const auto burn_steps = static_cast<std::size_t>(std::ceil(t_burn / h));
        for (std::size_t i = 0; i < burn_steps; ++i) y = fast_step(y);
        if (!std::isfinite(y)) throw SimulationError("fast process diverged during burn-in", 0);
    }

    SamplePath path;
    path.grid = cfg.grid;
    path.slow.resize(n + 1);
    if (cfg.keep_fast) path.fast.resize(n + 1);

    // Without slow drift, accumulate the sigma = 1 integral and scale on output.
    double x = Dyn::has_drift ? cfg.x0 : 0.0;
    const double slow_scale = Dyn::has_drift ? 1.0 : cfg.sigma;
    const double drive = Dyn::has_drift ? cfg.sigma * h_over_eps : h_over_eps;

    auto record = [&](std::size_t k) {
        path.slow[k] = Dyn::has_drift ? x : cfg.x0 + slow_scale * x;
        if (cfg.keep_fast) path.fast[k] = y;
    };
    record(0);

    for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t s = 0; s < cfg.substeps; ++s) {
            const double fy = Dyn::f(y);
            if constexpr (Dyn::has_drift) {
                x += drive * fy + Dyn::drift(x) * h;
            } else {
                x += drive * fy;
            }
            y = fast_step(y);
        }
        if (!std::isfinite(x) || !std::isfinite(y)) {
            throw SimulationError("non-finite state at grid step " + std::to_string(k) +
                                      "; increase substeps",
                                  k);
        }
        record(k);
    }
    return path;
}

template <ModelId Id>
SamplePath dispatch_integrator(const SimConfig& cfg, const MultiscaleModel& model, RngStream& rng) {
    if (cfg.integrator == Integrator::exact_ou) return integrate<Id, true>(cfg, model, rng);
    return integrate<Id, false>(cfg, model, rng);
}

}  // namespace

SamplePath simulate(const SimConfig& config, RngStream& rng) {
    config.validate();
    const auto& model = find_model(config.model_id);
    switch (model.id) {
        case ModelId::toy_ou:
            return dispatch_integrator<ModelId::toy_ou>(config, model, rng);
        case ModelId::cubic:
            return dispatch_integrator<ModelId::cubic>(config, model, rng);
        case ModelId::one_minus_y2:
            return dispatch_integrator<ModelId::one_minus_y2>(config, model, rng);
        case ModelId::sin_sin:
            return dispatch_integrator<ModelId::sin_sin>(config, model, rng);
        case ModelId::ou_with_drift:
            return dispatch_integrator<ModelId::ou_with_drift>(config, model, rng);
    }
    throw ConfigError("unhandled model");
}

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t stride) {
    if (stride < 1 || stride > n) {
        throw ConfigError("stride " + std::to_string(stride) + " outside [1, " + std::to_string(n) +
                          "]");
    }
    std::vector<std::size_t> idx;
    idx.reserve(n / stride + 2);
    for (std::size_t i = 0; i < n; i += stride) idx.push_back(i);
    idx.push_back(n);
    return idx;
}

SamplePath subsample(const SamplePath& path, std::size_t stride) {
    const auto idx = subsample_indices(path.grid.n, stride);
    SamplePath out;
    out.grid = Grid(idx.size() - 1, path.grid.T);
    out.slow.reserve(idx.size());
    for (auto i : idx) out.slow.push_back(path.slow[i]);
    if (path.has_fast()) {
        out.fast.reserve(idx.size());
        for (auto i : idx) out.fast.push_back(path.fast[i]);
    }
    return out;
}

}  // namespace extqv
