#pragma once

// Test-only reference computations. Each one works from the definitions
// directly and shares no code with the library routine it checks.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace oracle {

inline int sgn(double d) { return (d > 0.0) - (d < 0.0); }

/// Run-merged increment signs computed from scratch.
inline std::vector<int> run_merged(std::span<const double> x) {
    std::vector<int> raw;
    for (std::size_t i = 1; i < x.size(); ++i) raw.push_back(sgn(x[i] - x[i - 1]));
    int first = 0;
    for (int s : raw) {
        if (s != 0) {
            first = s;
            break;
        }
    }
    int last = first;
    for (int& s : raw) {
        if (s != 0) last = s;
        s = last;
    }
    return raw;
}

/// Direct double sum: QV + 2 sum_{j} sum_{i<j} dx_i dx_j prod 1{s_i = ... = s_j}.
inline double crossterm_double_sum(std::span<const double> x) {
    const auto s = run_merged(x);
    const std::size_t n = s.size();
    long double qv = 0.0L, cross = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
        const long double dj = x[j + 1] - x[j];
        qv += dj * dj;
        for (std::size_t i = 0; i < j; ++i) {
            bool same = true;
            for (std::size_t k = i; k < j; ++k) same = same && (s[k] == s[k + 1]);
            if (same) cross += static_cast<long double>(x[i + 1] - x[i]) * dj;
        }
    }
    return static_cast<double>(qv + 2.0L * cross);
}

/// Indices of sign changes plus endpoints, from run_merged.
inline std::vector<std::size_t> extremal_indices(std::span<const double> x) {
    const auto s = run_merged(x);
    std::vector<std::size_t> idx{0};
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i] != s[i - 1]) idx.push_back(i);
    }
    idx.push_back(x.size() - 1);
    return idx;
}

/// Max over every subset of interior extremal points of the squared-increment sum.
inline double exhaustive_total2var(std::span<const double> x) {
    const auto e = extremal_indices(x);
    const std::size_t interior = e.size() - 2;
    double best = 0.0;
    for (std::uint64_t mask = 0; mask < (1ull << interior); ++mask) {
        double prev = x[e.front()];
        double sum = 0.0;
        for (std::size_t b = 0; b < interior; ++b) {
            if (mask & (1ull << b)) {
                const double v = x[e[b + 1]];
                sum += (v - prev) * (v - prev);
                prev = v;
            }
        }
        sum += (x[e.back()] - prev) * (x[e.back()] - prev);
        best = std::max(best, sum);
    }
    return best;
}

/// E[ExtQV] for n i.i.d. N(0, s2) increments, from the sign-run expansion:
/// n s2 + 4 sum_{k=2}^{n} (n+1-k) m^2 2^{-(k-2)}, m = E[D 1{D > 0}] = sqrt(s2 / (2 pi)).
inline double iid_gaussian_extqv_mean(std::size_t n, double s2) {
    const double m2 = s2 / (2.0 * std::numbers::pi);
    long double cross = 0.0L;
    long double w = 1.0L;
    for (std::size_t k = 2; k <= n; ++k) {
        cross += static_cast<long double>(n + 1 - k) * w;
        w *= 0.5L;
        if (w < 1e-40L) break;
    }
    return static_cast<double>(n * s2 + 4.0L * m2 * cross);
}

/// Random path of n+1 points; with ties, values are drawn from a small
/// integer set so that zero increments and plateaus are common.
inline std::vector<double> random_path(std::mt19937_64& gen, std::size_t n, bool ties) {
    std::vector<double> x(n + 1);
    if (ties) {
        std::uniform_int_distribution<int> d(-2, 2);
        for (auto& v : x) v = d(gen);
    } else {
        std::normal_distribution<double> d(0.0, 1.0);
        double acc = 0.0;
        x[0] = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            acc += d(gen);
            x[i] = acc;
        }
    }
    return x;
}

}  // namespace oracle
