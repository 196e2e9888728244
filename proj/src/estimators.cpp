#include "extqv/estimators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "extqv/error.hpp"
#include "extqv/numfmt.hpp"

namespace extqv {

namespace {

void require_points(std::span<const double> x) {
    if (x.size() < 2) throw ConfigError("path needs at least 2 points");
}

int sign_of(double d) { return (d > 0.0) - (d < 0.0); }

/// Run-merged sign of every increment; all zero for a constant path.
std::vector<int> merged_signs(std::span<const double> x) {
    const std::size_t n = x.size() - 1;
    std::vector<int> s(n);
    int first = 0;
    for (std::size_t i = 0; i < n && first == 0; ++i) first = sign_of(x[i + 1] - x[i]);
    int last = first;
    for (std::size_t i = 0; i < n; ++i) {
        const int d = sign_of(x[i + 1] - x[i]);
        if (d != 0) last = d;
        s[i] = last;
    }
    return s;
}

}  // namespace

std::string_view kind_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::qv: return "qv";
        case EstimatorKind::extqv: return "extqv";
        case EstimatorKind::extqv_crossterm: return "extqv_crossterm";
        case EstimatorKind::total2var: return "total2var";
        case EstimatorKind::subsampled_qv: return "subsampled_qv";
    }
    return "?";
}

void EstimatorSpec::validate() const {
    if (kind == EstimatorKind::subsampled_qv) {
        if (alpha.has_value() == stride.has_value()) {
            throw ConfigError("subsampled_qv needs exactly one of alpha or stride");
        }
        if (alpha && !(*alpha > 0.0 && *alpha < 1.0)) {
            throw ConfigError("subsampling exponent alpha must lie in (0, 1)");
        }
        if (stride && *stride < 1) throw ConfigError("stride must be >= 1");
    } else if (alpha || stride) {
        throw ConfigError("alpha/stride only apply to subsampled_qv");
    }
}

std::string EstimatorSpec::label() const {
    std::string out(kind_name(kind));
    if (alpha) out += ":alpha=" + format_double(*alpha);
    if (stride) out += ":stride=" + std::to_string(*stride);
    return out;
}

EstimatorSpec parse_estimator(std::string_view text) {
    const auto colon = text.find(':');
    const auto name = text.substr(0, colon);
    EstimatorSpec spec;
    bool known = false;
    for (auto k : {EstimatorKind::qv, EstimatorKind::extqv, EstimatorKind::extqv_crossterm,
                   EstimatorKind::total2var, EstimatorKind::subsampled_qv}) {
        if (kind_name(k) == name) {
            spec.kind = k;
            known = true;
        }
    }
    if (!known) throw ConfigError("unknown estimator '" + std::string(name) + "'");

    if (colon != std::string_view::npos) {
        auto param = text.substr(colon + 1);
        const auto eq = param.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("estimator parameter '" + std::string(param) + "' needs key=value");
        }
        const auto key = param.substr(0, eq);
        const auto value = param.substr(eq + 1);
        const char* first = value.data();
        const char* last = value.data() + value.size();
        if (key == "alpha") {
            double a = 0.0;
            auto [p, ec] = std::from_chars(first, last, a);
            if (ec != std::errc{} || p != last) {
                throw ConfigError("bad alpha '" + std::string(value) + "'");
            }
            spec.alpha = a;
        } else if (key == "stride") {
            std::size_t m = 0;
            auto [p, ec] = std::from_chars(first, last, m);
            if (ec != std::errc{} || p != last) {
                throw ConfigError("bad stride '" + std::string(value) + "'");
            }
            spec.stride = m;
        } else {
            throw ConfigError("unknown estimator parameter '" + std::string(key) + "'");
        }
    }
    spec.validate();
    return spec;
}

double quadratic_variation(std::span<const double> x) {
    require_points(x);
    CompensatedSum acc;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double d = x[i] - x[i - 1];
        acc.add(d * d);
    }
    return acc.value();
}

ExtremalPartition extremal_partition(std::span<const double> x) {
    require_points(x);
    const auto s = merged_signs(x);
    ExtremalPartition part;
    part.indices.push_back(0);
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i - 1] != s[i]) part.indices.push_back(i);
    }
    part.indices.push_back(x.size() - 1);
    return part;
}

double ext_qv(std::span<const double> x) {
    const auto part = extremal_partition(x);
    CompensatedSum acc;
    for (std::size_t k = 1; k < part.indices.size(); ++k) {
        const double d = x[part.indices[k]] - x[part.indices[k - 1]];
        acc.add(d * d);
    }
    return acc.value();
}

double ext_qv_crossterm(std::span<const double> x) {
    require_points(x);
    // sum_{i<j} dx_i dx_j over same-sign spans equals, for each j, dx_j times
    // the sum of the earlier increments in its run.
    CompensatedSum squares;
    CompensatedSum cross;
    double run_sum = 0.0;
    int run_sign = 0;
    for (std::size_t j = 1; j < x.size(); ++j) {
        const double d = x[j] - x[j - 1];
        squares.add(d * d);
        const int s = sign_of(d);
        // A zero increment continues the current run and contributes no product.
        if (s == 0) continue;
        if (s == run_sign) {
            cross.add(d * run_sum);
            run_sum += d;
        } else {
            run_sign = s;
            run_sum = d;
        }
    }
    return squares.value() + 2.0 * cross.value();
}

double total_2_variation(std::span<const double> x) {
    const auto part = extremal_partition(x);
    const auto& idx = part.indices;
    const std::size_t k = idx.size();
    std::vector<double> best(k, 0.0);
    for (std::size_t j = 1; j < k; ++j) {
        const double vj = x[idx[j]];
        double m = -1.0;
        for (std::size_t i = 0; i < j; ++i) {
            const double d = vj - x[idx[i]];
            m = std::max(m, best[i] + d * d);
        }
        best[j] = m;
    }
    return best[k - 1];
}

std::size_t subsample_stride(const EstimatorSpec& spec, const Grid& grid, double epsilon) {
    if (spec.kind != EstimatorKind::subsampled_qv) {
        throw ConfigError("subsample_stride needs a subsampled_qv spec");
    }
    spec.validate();
    if (spec.stride) return *spec.stride;
    if (!(epsilon > 0.0)) throw ConfigError("alpha-based subsampling needs epsilon > 0");
    const double m = std::round(std::pow(epsilon, *spec.alpha) / grid.delta());
    return static_cast<std::size_t>(std::clamp(m, 1.0, static_cast<double>(grid.n)));
}

double subsampled_qv(const SamplePath& path, const EstimatorSpec& spec, double epsilon) {
    require_points(path.slow);
    const std::size_t m = subsample_stride(spec, path.grid, epsilon);
    const auto idx = subsample_indices(path.grid.n, m);
    CompensatedSum acc;
    for (std::size_t k = 1; k < idx.size(); ++k) {
        const double d = path.slow[idx[k]] - path.slow[idx[k - 1]];
        acc.add(d * d);
    }
    return acc.value();
}

double quadratic_variation(const SamplePath& path) { return quadratic_variation(path.slow); }
ExtremalPartition extremal_partition(const SamplePath& path) { return extremal_partition(path.slow); }
double ext_qv(const SamplePath& path) { return ext_qv(path.slow); }
double ext_qv_crossterm(const SamplePath& path) { return ext_qv_crossterm(path.slow); }
double total_2_variation(const SamplePath& path) { return total_2_variation(path.slow); }

double evaluate(const EstimatorSpec& spec, const SamplePath& path, double epsilon) {
    switch (spec.kind) {
        case EstimatorKind::qv: return quadratic_variation(path.slow);
        case EstimatorKind::extqv: return ext_qv(path.slow);
        case EstimatorKind::extqv_crossterm: return ext_qv_crossterm(path.slow);
        case EstimatorKind::total2var: return total_2_variation(path.slow);
        case EstimatorKind::subsampled_qv: return subsampled_qv(path, spec, epsilon);
    }
    throw ConfigError("unhandled estimator kind");
}

}  // namespace extqv
