#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "extqv/rng.hpp"

namespace extqv {

enum class ModelId { toy_ou, cubic, one_minus_y2, sin_sin, ou_with_drift };

using ScalarFn = double (*)(double);

/// Stationary law of the fast process, when it can be sampled directly.
struct InvariantLaw {
    bool gaussian = false;  ///< false: burn-in only
    double mean = 0.0;
    double variance = 0.0;
};

/// One catalog fast/slow system
///
///     dx = (sigma/eps) f(y) dt + h_drift(x) dt
///     dy = (1/eps^2) g(y) dt + (beta(y)/eps) dV
///
/// sigma is factored out of f, so f is the sigma = 1 slow drive.
struct MultiscaleModel {
    ModelId id;
    std::string_view name;
    ScalarFn f;
    ScalarFn g;
    ScalarFn beta;
    ScalarFn h_drift;  ///< nullptr when the slow equation has no drift
    InvariantLaw invariant;
    /// Homogenized coefficient divided by sigma^2.
    double sigma2_factor;
    /// g(y) = -y and beta constant, so the fast transition is known exactly.
    bool linear_ou_fast;
    double beta_const;  ///< beta value when linear_ou_fast
};

std::span<const MultiscaleModel> catalog();

/// Throws ConfigError naming the identifier when it is not in the catalog.
const MultiscaleModel& find_model(std::string_view model_id);
const MultiscaleModel& find_model(ModelId id);

/// Homogenized diffusion coefficient used as ground truth for MSE.
double theoretical_sigma2(std::string_view model_id, double sigma);
double theoretical_sigma2(const MultiscaleModel& model, double sigma);

/// n -> infinity expectation of ExtQV for toy_ou at fixed eps:
/// sigma^2 (1 + eps^2 (exp(-1/eps^2) - 1)).
double ou_finite_eps_expectation(double sigma, double epsilon);

struct CenteringReport {
    double mean = 0.0;
    double std_error = 0.0;
    bool pass = false;
};

/// Monte Carlo estimate of E[f(y)] under the invariant law. Gaussian laws are
/// sampled directly; burn-in models are sampled from one long fast path
/// (eps = 1) at a lag of several relaxation times. Passes iff
/// |mean| <= 4 * std_error.
CenteringReport verify_centering(std::string_view model_id, std::size_t samples, RngStream& rng);

}  // namespace extqv
