#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "extqv/sdecore.hpp"

namespace extqv {

/// Ordered grid indices of the local extrema, endpoints 0 and n included.
struct ExtremalPartition {
    std::vector<std::size_t> indices;
};

enum class EstimatorKind { qv, extqv, extqv_crossterm, total2var, subsampled_qv };

struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::extqv;
    std::optional<double> alpha;        ///< subsampling exponent, stride = eps^alpha / delta
    std::optional<std::size_t> stride;  ///< explicit stride

    /// Throws ConfigError unless subsampled_qv carries exactly one of alpha/stride
    /// and other kinds carry neither.
    void validate() const;
    /// Stable textual form, e.g. "extqv" or "subsampled_qv:alpha=0.5".
    std::string label() const;
};

/// Parses the textual form produced by EstimatorSpec::label().
EstimatorSpec parse_estimator(std::string_view text);
std::string_view kind_name(EstimatorKind kind);

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// All statistics take the slow-path values and need at least two points;
// shorter input throws ConfigError.

/// Sum of squared increments.
double quadratic_variation(std::span<const double> x);

/// Interior indices where the run-merged increment sign changes, plus both
/// endpoints. A zero increment inherits the sign of the most recent nonzero
/// increment; leading zeros take the first nonzero sign. A constant path
/// yields {0, n}.
ExtremalPartition extremal_partition(std::span<const double> x);

/// Sum of squared increments over the extremal partition.
double ext_qv(std::span<const double> x);

/// ExtQV through its expansion: QV plus twice the products of increment pairs
/// whose run-merged signs agree over the whole span between them. Computed in
/// one pass from increments alone, without building a partition.
double ext_qv_crossterm(std::span<const double> x);

/// Supremum of squared-increment sums over partitions, attained on a subset
/// of the extremal points (endpoints forced). O(k^2) in the number k of
/// extremal points. Returned as the squared sum, not its square root.
double total_2_variation(std::span<const double> x);

/// Stride used by subsampled_qv: the explicit stride, or
/// clamp(round(eps^alpha / delta), 1, n).
std::size_t subsample_stride(const EstimatorSpec& spec, const Grid& grid, double epsilon);

double subsampled_qv(const SamplePath& path, const EstimatorSpec& spec, double epsilon);

double quadratic_variation(const SamplePath& path);
ExtremalPartition extremal_partition(const SamplePath& path);
double ext_qv(const SamplePath& path);
double ext_qv_crossterm(const SamplePath& path);
double total_2_variation(const SamplePath& path);

/// Evaluate any estimator on a path; epsilon is only read by alpha-based
/// subsampling.
double evaluate(const EstimatorSpec& spec, const SamplePath& path, double epsilon);

}  // namespace extqv
