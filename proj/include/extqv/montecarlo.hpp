#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "extqv/estimators.hpp"
#include "extqv/sdecore.hpp"

namespace extqv {

struct ExperimentConfig {
    std::string model_id = "toy_ou";
    double sigma = 1.0;
    double x0 = 0.0;
    std::vector<double> epsilons{0.1};
    std::vector<std::size_t> ns{1000};
    std::size_t M = 200;
    std::vector<EstimatorSpec> estimators{EstimatorSpec{}};
    std::uint64_t master_seed = 0;
    Integrator integrator = Integrator::euler;
    std::size_t substeps = 1;
    std::optional<InitPolicy> init;  ///< model default when unset
    double T = 1.0;

    void validate() const;
    /// SimConfig for one cell; the seed field carries the cell seed.
    SimConfig sim_config(double epsilon, std::size_t n) const;
};

/// Canonical key=value text of a config; parseable back by the CLI and the
/// input of config_digest.
std::string canonical_config(const ExperimentConfig& config);
/// 16 hex digits of FNV-1a 64 over canonical_config.
std::string config_digest(const ExperimentConfig& config);

std::uint64_t fnv1a64(std::string_view bytes);

/// Seed of the cell (model, eps, n, T) under a master seed. Adding cells to a
/// sweep never changes the draws of existing cells.
std::uint64_t cell_seed(std::uint64_t master_seed, std::string_view model_id, double epsilon,
                        std::size_t n, double T);

struct EstimatorSummary {
    EstimatorSpec spec;
    double mean = 0.0;
    double mse = 0.0;        ///< mean of (estimate - target)^2
    double std_error = 0.0;  ///< sample sd / sqrt(M)
};

struct CellResult {
    std::string model_id;
    double sigma = 0.0;
    double epsilon = 0.0;
    std::size_t n = 0;
    std::size_t M = 0;
    double sigma2_target = 0.0;
    std::uint64_t seed = 0;  ///< master seed
    std::int64_t wall_ms = 0;
    std::vector<EstimatorSummary> estimates;  ///< one per configured estimator, same order
    bool failed = false;
    std::string error;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::string config_digest;
    std::vector<CellResult> cells;

    std::size_t failures() const;
};

struct RunOptions {
    /// OpenMP worker count; 0 uses omp_get_max_threads().
    int workers = 0;
};

/// M realisations of one (eps, n) cell. Realisation m draws from stream
/// (cell_seed, m); every estimator sees the same M paths. Estimates are
/// reduced in realisation order, so the result does not depend on the
/// worker count. Throws SimulationError naming the cell and realisation.
CellResult run_cell(const ExperimentConfig& config, double epsilon, std::size_t n,
                    const RunOptions& options = {});

/// Serial reference for run_cell; no OpenMP.
CellResult run_cell_reference(const ExperimentConfig& config, double epsilon, std::size_t n);

/// Cross product over eps ascending, n ascending. A failing cell is kept with
/// failed = true and its message; the other cells still run.
ExperimentResult sweep(const ExperimentConfig& config, const RunOptions& options = {});

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least squares of log(mse) on log(eps). Needs >= 2 points, all positive,
/// with at least two distinct eps.
SlopeFit slope_fit(std::span<const std::pair<double, double>> points);

struct CellRanking {
    double epsilon = 0.0;
    std::size_t n = 0;
    std::vector<std::pair<std::string, double>> by_mse;  ///< ascending MSE
    std::string winner;
};

struct ComparisonReport {
    ExperimentResult result;
    std::vector<CellRanking> rankings;
};

/// Sweep with shared streams and per-cell MSE ranking. The config must list
/// extqv and subsampled_qv:alpha=0.5.
ComparisonReport compare_estimators(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace extqv
