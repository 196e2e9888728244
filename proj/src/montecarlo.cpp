#include "extqv/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <omp.h>

#include "extqv/error.hpp"
#include "extqv/models.hpp"
#include "extqv/numfmt.hpp"

namespace extqv {

namespace {

std::string_view integrator_name(Integrator i) {
    return i == Integrator::exact_ou ? "exact_ou" : "euler";
}

template <class T>
std::vector<T> sorted_unique(std::vector<T> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

/// Estimates of every estimator on realisation m.
void realise(const ExperimentConfig& config, const SimConfig& sim, std::size_t m,
             std::span<double> out) {
    auto rng = make_rng(sim.seed, m);
    const auto path = simulate(sim, rng);
    for (std::size_t k = 0; k < config.estimators.size(); ++k) {
        out[k] = evaluate(config.estimators[k], path, sim.epsilon);
    }
}

CellResult start_cell(const ExperimentConfig& config, double epsilon, std::size_t n) {
    CellResult cell;
    cell.model_id = config.model_id;
    cell.sigma = config.sigma;
    cell.epsilon = epsilon;
    cell.n = n;
    cell.M = config.M;
    cell.sigma2_target = theoretical_sigma2(config.model_id, config.sigma);
    cell.seed = config.master_seed;
    return cell;
}

void summarise(const ExperimentConfig& config, std::span<const double> estimates, CellResult& cell) {
    const std::size_t K = config.estimators.size();
    const std::size_t M = config.M;
    const double target = cell.sigma2_target;
    cell.estimates.clear();
    for (std::size_t k = 0; k < K; ++k) {
        CompensatedSum sum, sq_err;
        for (std::size_t m = 0; m < M; ++m) {
            const double e = estimates[m * K + k];
            sum.add(e);
            sq_err.add((e - target) * (e - target));
        }
        EstimatorSummary s;
        s.spec = config.estimators[k];
        s.mean = sum.value() / static_cast<double>(M);
        s.mse = sq_err.value() / static_cast<double>(M);
        if (M > 1) {
            CompensatedSum dev;
            for (std::size_t m = 0; m < M; ++m) {
                const double d = estimates[m * K + k] - s.mean;
                dev.add(d * d);
            }
            const double var = dev.value() / static_cast<double>(M - 1);
            s.std_error = std::sqrt(var / static_cast<double>(M));
        }
        cell.estimates.push_back(s);
    }
}

[[noreturn]] void throw_realisation_failure(const CellResult& cell, std::size_t m,
                                            const std::string& what) {
    throw RuntimeFailure("cell (model=" + cell.model_id + ", eps=" + format_double(cell.epsilon) +
                         ", n=" + std::to_string(cell.n) + ") realisation " + std::to_string(m) +
                         ": " + what);
}

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 t0)
        .count();
}

}  // namespace

void ExperimentConfig::validate() const {
    find_model(model_id);
    if (M < 1) throw ConfigError("M must be >= 1");
    if (epsilons.empty()) throw ConfigError("epsilon list is empty");
    if (ns.empty()) throw ConfigError("n list is empty");
    if (estimators.empty()) throw ConfigError("estimator list is empty");
    for (const auto& e : estimators) e.validate();
    for (double eps : epsilons) {
        for (std::size_t n : ns) sim_config(eps, n).validate();
    }
}

SimConfig ExperimentConfig::sim_config(double epsilon, std::size_t n) const {
    SimConfig s;
    s.model_id = model_id;
    s.epsilon = epsilon;
    s.sigma = sigma;
    s.x0 = x0;
    s.grid = Grid(n, T);
    s.seed = cell_seed(master_seed, model_id, epsilon, n, T);
    s.integrator = integrator;
    s.substeps = substeps;
    s.init = init ? *init : default_init(find_model(model_id));
    return s;
}

std::string canonical_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "[sim]\n";
    out << "model = " << c.model_id << "\n";
    out << "sigma = " << format_double(c.sigma) << "\n";
    out << "x0 = " << format_double(c.x0) << "\n";
    out << "epsilon = ";
    for (std::size_t i = 0; i < c.epsilons.size(); ++i) out << (i ? "," : "") << format_double(c.epsilons[i]);
    out << "\n";
    out << "n = ";
    for (std::size_t i = 0; i < c.ns.size(); ++i) out << (i ? "," : "") << c.ns[i];
    out << "\n";
    out << "T = " << format_double(c.T) << "\n";
    out << "seed = " << c.master_seed << "\n";
    out << "integrator = " << integrator_name(c.integrator) << "\n";
    out << "substeps = " << c.substeps << "\n";
    if (!c.init) {
        out << "init = auto\n";
    } else {
        out << "init = " << (c.init->kind == InitKind::burn_in ? "burn_in" : "stationary_exact")
            << "\n";
        out << "burn_in_T = " << format_double(c.init->burn_in_T) << "\n";
    }
    out << "\n[experiment]\n";
    out << "M = " << c.M << "\n";
    out << "estimators = ";
    for (std::size_t i = 0; i < c.estimators.size(); ++i) {
        out << (i ? "," : "") << c.estimators[i].label();
    }
    out << "\n";
    return out.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string config_digest(const ExperimentConfig& config) {
    char buf[17];
    const auto h = fnv1a64(canonical_config(config));
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t cell_seed(std::uint64_t master_seed, std::string_view model_id, double epsilon,
                        std::size_t n, double T) {
    std::string key(model_id);
    key += '|' + std::to_string(std::bit_cast<std::uint64_t>(epsilon));
    key += '|' + std::to_string(n);
    key += '|' + std::to_string(std::bit_cast<std::uint64_t>(T));
    return splitmix64(master_seed ^ splitmix64(fnv1a64(key)));
}

std::size_t ExperimentResult::failures() const {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [](const CellResult& c) { return c.failed; }));
}

CellResult run_cell_reference(const ExperimentConfig& config, double epsilon, std::size_t n) {
    const auto t0 = std::chrono::steady_clock::now();
    auto cell = start_cell(config, epsilon, n);
    const auto sim = config.sim_config(epsilon, n);
    const std::size_t K = config.estimators.size();
    std::vector<double> estimates(config.M * K);
    for (std::size_t m = 0; m < config.M; ++m) {
        try {
            realise(config, sim, m, std::span(estimates).subspan(m * K, K));
        } catch (const RuntimeFailure& e) {
            throw_realisation_failure(cell, m, e.what());
        }
    }
    summarise(config, estimates, cell);
    cell.wall_ms = elapsed_ms(t0);
    return cell;
}

CellResult run_cell(const ExperimentConfig& config, double epsilon, std::size_t n,
                    const RunOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    auto cell = start_cell(config, epsilon, n);
    const auto sim = config.sim_config(epsilon, n);
    sim.validate();
    const std::size_t K = config.estimators.size();
    const auto M = static_cast<std::int64_t>(config.M);
    std::vector<double> estimates(config.M * K);
    std::vector<std::string> errors(config.M);
    const int workers = options.workers > 0 ? options.workers : omp_get_max_threads();

#pragma omp parallel for num_threads(workers) schedule(dynamic)
    for (std::int64_t m = 0; m < M; ++m) {
        const auto i = static_cast<std::size_t>(m);
        try {
            realise(config, sim, i, std::span(estimates).subspan(i * K, K));
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }

    for (std::size_t m = 0; m < config.M; ++m) {
        if (!errors[m].empty()) throw_realisation_failure(cell, m, errors[m]);
    }
    summarise(config, estimates, cell);
    cell.wall_ms = elapsed_ms(t0);
    return cell;
}

ExperimentResult sweep(const ExperimentConfig& config, const RunOptions& options) {
    config.validate();
    ExperimentResult result;
    result.config = config;
    result.config_digest = config_digest(config);
    for (double eps : sorted_unique(config.epsilons)) {
        for (std::size_t n : sorted_unique(config.ns)) {
            try {
                result.cells.push_back(run_cell(config, eps, n, options));
            } catch (const RuntimeFailure& e) {
                auto cell = start_cell(config, eps, n);
                cell.failed = true;
                cell.error = e.what();
                result.cells.push_back(std::move(cell));
            }
        }
    }
    return result;
}

SlopeFit slope_fit(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw ConfigError("slope_fit needs at least 2 points");
    std::vector<double> lx, ly;
    for (auto [eps, mse] : points) {
        if (!(eps > 0.0) || !(mse > 0.0)) {
            throw ConfigError("slope_fit needs positive (epsilon, mse) values");
        }
        lx.push_back(std::log(eps));
        ly.push_back(std::log(mse));
    }
    const double k = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw ConfigError("slope_fit needs at least two distinct epsilon values");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

ComparisonReport compare_estimators(const ExperimentConfig& config, const RunOptions& options) {
    const auto has = [&](auto pred) {
        return std::any_of(config.estimators.begin(), config.estimators.end(), pred);
    };
    if (!has([](const EstimatorSpec& e) { return e.kind == EstimatorKind::extqv; })) {
        throw ConfigError("compare needs extqv among the estimators");
    }
    if (!has([](const EstimatorSpec& e) {
            return e.kind == EstimatorKind::subsampled_qv && e.alpha && *e.alpha == 0.5;
        })) {
        throw ConfigError("compare needs subsampled_qv:alpha=0.5 among the estimators");
    }

    ComparisonReport report;
    report.result = sweep(config, options);
    for (const auto& cell : report.result.cells) {
        if (cell.failed) continue;
        CellRanking r;
        r.epsilon = cell.epsilon;
        r.n = cell.n;
        for (const auto& s : cell.estimates) r.by_mse.emplace_back(s.spec.label(), s.mse);
        std::stable_sort(r.by_mse.begin(), r.by_mse.end(),
                         [](const auto& a, const auto& b) { return a.second < b.second; });
        r.winner = r.by_mse.front().first;
        report.rankings.push_back(std::move(r));
    }
    return report;
}

}  // namespace extqv
