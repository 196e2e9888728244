#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "extqv/models.hpp"
#include "extqv/rng.hpp"

namespace extqv {

/// Homogeneous observation grid t_i = i * delta, i = 0..n, delta = T / n.
struct Grid {
    std::size_t n = 0;
    double T = 1.0;

    Grid() = default;
    /// Throws ConfigError unless n >= 1 and T > 0.
    Grid(std::size_t steps, double horizon);

    double delta() const noexcept { return T / static_cast<double>(n); }
    double time(std::size_t i) const noexcept { return static_cast<double>(i) * delta(); }
    std::size_t points() const noexcept { return n + 1; }
};

/// Slow path (and optionally the fast path) sampled on a grid.
struct SamplePath {
    Grid grid;
    std::vector<double> slow;
    std::vector<double> fast;  ///< empty when the fast path was not kept

    bool has_fast() const noexcept { return !fast.empty(); }
    /// Throws ConfigError on length mismatch or non-finite values.
    void validate() const;
};

enum class Integrator { euler, exact_ou };
enum class InitKind { stationary_exact, burn_in };

struct InitPolicy {
    InitKind kind = InitKind::stationary_exact;
    /// Burn-in horizon; negative selects the default 10 * eps^2.
    double burn_in_T = -1.0;
};

struct SimConfig {
    std::string model_id = "toy_ou";
    double epsilon = 0.1;
    double sigma = 1.0;
    double x0 = 0.0;
    Grid grid{1000, 1.0};
    std::uint64_t seed = 0;
    Integrator integrator = Integrator::euler;
    std::size_t substeps = 1;
    InitPolicy init{};
    bool keep_fast = false;

    void validate() const;
};

/// Burn-in policy when the model has no exact invariant sampler, stationary otherwise.
InitPolicy default_init(const MultiscaleModel& model);

/// Integrate the fast/slow system and record both components at grid points.
///
/// Per internal sub-step h = delta / substeps (Euler):
///     y <- y + g(y) h / eps^2 + beta(y) sqrt(h) xi / eps
///     x <- x + sigma f(y) h / eps + h_drift(x) h
/// In exact_ou mode the fast update is the exact OU transition
///     y <- exp(-h/eps^2) y + beta sqrt((1 - exp(-2h/eps^2)) / 2) xi.
/// For models without slow drift x is accumulated with sigma = 1 and scaled
/// once on output, so sigma-sweeps on a shared stream are exact multiples.
///
/// Throws ConfigError for invalid configs and SimulationError when the state
/// becomes non-finite.
SamplePath simulate(const SimConfig& config, RngStream& rng);

/// Restrict to indices {0, stride, 2 stride, ...} plus the final index n.
/// The returned grid keeps T and counts the retained increments; the final
/// block may be shorter than stride.
SamplePath subsample(const SamplePath& path, std::size_t stride);

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t stride);

}  // namespace extqv
