#include "extqv/cli.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "extqv/csv.hpp"
#include "extqv/error.hpp"

namespace extqv::cli {

namespace fs = std::filesystem;

namespace {

struct KeyDef {
    const char* section;
    const char* key;
    const char* flag;
    const char* help;
};

// Canonical keys; file keys live in the named section, flags use the flag name.
constexpr KeyDef kKeys[] = {
    {"sim", "model", "--model", "catalog model id"},
    {"sim", "sigma", "--sigma", "model parameter sigma"},
    {"sim", "x0", "--x0", "initial slow value"},
    {"sim", "epsilon", "--epsilon", "scale separation(s), comma separated"},
    {"sim", "n", "--n", "grid step count(s), comma separated"},
    {"sim", "T", "--T", "time horizon"},
    {"sim", "seed", "--seed", "64-bit master seed"},
    {"sim", "integrator", "--integrator", "euler | exact_ou"},
    {"sim", "substeps", "--substeps", "internal sub-steps per grid step"},
    {"sim", "init", "--init", "auto | stationary_exact | burn_in"},
    {"sim", "burn_in_T", "--burn-in-T", "burn-in horizon (negative: 10 eps^2)"},
    {"sim", "keep_fast", "--keep-fast", "simulate: also write the fast path (true|false)"},
    {"experiment", "M", "--M", "realisations per cell"},
    {"experiment", "estimators", "--estimators",
     "comma list: qv, extqv, extqv_crossterm, total2var, subsampled_qv:alpha=A|stride=S"},
    {"experiment", "workers", "--workers", "OpenMP workers (0 = all)"},
    {"io", "output_dir", "--output-dir", "artifact directory"},
    {"io", "format", "--format", "csv | ndjson"},
    {"io", "input", "--input", "estimate: path CSV to read"},
    {"figures", "path_epsilon", "--path-epsilon", "figures-data: eps of the overlay path"},
    {"figures", "path_n", "--path-n", "figures-data: n of the overlay path"},
};

constexpr std::size_t kMaxDeskN = 1'000'000;

struct RawValue {
    std::string value;
    std::string source;
};

using RawSettings = std::map<std::string, RawValue>;

const KeyDef* find_key(std::string_view section, std::string_view key) {
    for (const auto& k : kKeys) {
        if (k.section == section && k.key == key) return &k;
    }
    return nullptr;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

RawSettings read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("config file '" + path + "': " + e.message() + " (line " +
                          std::to_string(e.line()) + ")");
    }
    RawSettings raw;
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            throw ConfigError("key '" + section + "' in file '" + path +
                              "' must be inside a section");
        }
        bool known_section = false;
        for (const auto& k : kKeys) known_section |= (section == k.section);
        if (!known_section) {
            throw ConfigError("unknown section [" + section + "] in file '" + path + "'");
        }
        for (const auto& [key, value] : body) {
            if (!find_key(section, key)) {
                throw ConfigError("unknown key '" + key + "' in section [" + section +
                                  "] of file '" + path + "'");
            }
            raw[key] = {trim(value.get_value<std::string>()), "file '" + path + "'"};
        }
    }
    return raw;
}

[[noreturn]] void mismatch(const std::string& key, const RawValue& v, const std::string& expected) {
    throw ConfigError("key '" + key + "' (" + v.source + "): expected " + expected + ", got '" +
                      v.value + "'");
}

double to_double(const std::string& key, const RawValue& v, std::string_view text) {
    double d = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
    if (ec != std::errc{} || p != text.data() + text.size() || text.empty()) {
        mismatch(key, v, "a real number");
    }
    return d;
}

std::uint64_t to_uint(const std::string& key, const RawValue& v, std::string_view text) {
    std::uint64_t u = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), u);
    if (ec != std::errc{} || p != text.data() + text.size() || text.empty()) {
        // Accept exact scientific forms such as 1e5 for grid sizes.
        double d = 0.0;
        auto [q, ec2] = std::from_chars(text.data(), text.data() + text.size(), d);
        if (ec2 != std::errc{} || q != text.data() + text.size() || d < 0.0 ||
            d != std::floor(d) || d > 1.8e19) {
            mismatch(key, v, "a non-negative integer");
        }
        return static_cast<std::uint64_t>(d);
    }
    return u;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

bool to_bool(const std::string& key, const RawValue& v) {
    if (v.value == "true" || v.value == "1" || v.value == "yes" || v.value == "on") return true;
    if (v.value == "false" || v.value == "0" || v.value == "no" || v.value == "off") return false;
    mismatch(key, v, "a boolean");
}

void apply_subcommand_defaults(CliConfig& c) {
    auto& e = c.experiment;
    switch (c.subcommand) {
        case Subcommand::simulate:
            e.epsilons = {0.1};
            e.ns = {1000};
            e.M = 1;
            break;
        case Subcommand::estimate:
            e.estimators = {parse_estimator("qv"), parse_estimator("extqv"),
                            parse_estimator("extqv_crossterm"), parse_estimator("total2var")};
            break;
        case Subcommand::sweep:
        case Subcommand::figures_data:
            e.epsilons = {0.05, 0.10, 0.15, 0.20};
            e.ns = {1000, 10000, 100000};
            e.M = 200;
            break;
        case Subcommand::compare:
            e.epsilons = {0.10};
            e.ns = {100000};
            e.M = 200;
            e.estimators = {parse_estimator("extqv"), parse_estimator("subsampled_qv:alpha=0.5"),
                            parse_estimator("qv")};
            break;
    }
    if (c.paper_scale && c.subcommand != Subcommand::estimate) {
        e.epsilons = {0.05, 0.10, 0.15, 0.20};
        e.ns = {1000, 10000, 100000, 1000000, 10000000};
        e.M = 1000;
    }
}

void resolve(const RawSettings& raw, CliConfig& c) {
    auto& e = c.experiment;
    for (const auto& [key, v] : raw) {
        c.given.insert(key);
        if (key == "model") {
            e.model_id = v.value;
        } else if (key == "sigma") {
            e.sigma = to_double(key, v, v.value);
        } else if (key == "x0") {
            e.x0 = to_double(key, v, v.value);
        } else if (key == "epsilon") {
            e.epsilons.clear();
            for (const auto& s : split_list(v.value)) e.epsilons.push_back(to_double(key, v, s));
            if (e.epsilons.empty()) mismatch(key, v, "a list of reals");
        } else if (key == "n") {
            e.ns.clear();
            for (const auto& s : split_list(v.value)) e.ns.push_back(to_uint(key, v, s));
            if (e.ns.empty()) mismatch(key, v, "a list of positive integers");
        } else if (key == "T") {
            e.T = to_double(key, v, v.value);
        } else if (key == "seed") {
            e.master_seed = to_uint(key, v, v.value);
        } else if (key == "integrator") {
            if (v.value == "euler") {
                e.integrator = Integrator::euler;
            } else if (v.value == "exact_ou") {
                e.integrator = Integrator::exact_ou;
            } else {
                mismatch(key, v, "euler or exact_ou");
            }
        } else if (key == "substeps") {
            e.substeps = to_uint(key, v, v.value);
        } else if (key == "init") {
            if (v.value == "auto") {
                e.init.reset();
            } else if (v.value == "stationary_exact") {
                e.init = InitPolicy{InitKind::stationary_exact, e.init ? e.init->burn_in_T : -1.0};
            } else if (v.value == "burn_in") {
                e.init = InitPolicy{InitKind::burn_in, e.init ? e.init->burn_in_T : -1.0};
            } else {
                mismatch(key, v, "auto, stationary_exact or burn_in");
            }
        } else if (key == "burn_in_T") {
            // Applied after init so the order of keys does not matter.
        } else if (key == "keep_fast") {
            c.keep_fast = to_bool(key, v);
        } else if (key == "M") {
            e.M = to_uint(key, v, v.value);
        } else if (key == "estimators") {
            e.estimators.clear();
            for (const auto& s : split_list(v.value)) {
                try {
                    e.estimators.push_back(parse_estimator(s));
                } catch (const ConfigError& err) {
                    throw ConfigError("key 'estimators' (" + v.source + "): " + err.what());
                }
            }
            if (e.estimators.empty()) mismatch(key, v, "a non-empty estimator list");
        } else if (key == "workers") {
            c.workers = static_cast<int>(to_uint(key, v, v.value));
        } else if (key == "output_dir") {
            c.output_dir = v.value;
        } else if (key == "format") {
            if (v.value == "csv") {
                c.format = Format::csv;
            } else if (v.value == "ndjson") {
                c.format = Format::ndjson;
            } else {
                mismatch(key, v, "csv or ndjson");
            }
        } else if (key == "input") {
            c.input = v.value;
        } else if (key == "path_epsilon") {
            c.path_epsilon = to_double(key, v, v.value);
        } else if (key == "path_n") {
            c.path_n = to_uint(key, v, v.value);
        }
    }
    if (auto it = raw.find("burn_in_T"); it != raw.end()) {
        const double t = to_double("burn_in_T", it->second, it->second.value);
        if (!e.init) e.init = default_init(find_model(e.model_id));
        e.init->burn_in_T = t;
    }
}

void check(const CliConfig& c) {
    const auto& e = c.experiment;
    if (c.subcommand == Subcommand::estimate) {
        if (c.input.empty()) throw ConfigError("estimate needs --input (path CSV)");
        for (const auto& s : e.estimators) s.validate();
        return;
    }
    e.validate();
    if (!c.paper_scale) {
        for (auto n : e.ns) {
            if (n > kMaxDeskN) {
                throw ConfigError("n = " + std::to_string(n) +
                                  " exceeds desk scale (1e6); pass --paper-scale to allow it");
            }
        }
    }
    if (c.subcommand == Subcommand::figures_data) {
        SimConfig probe = e.sim_config(c.path_epsilon, c.path_n);
        probe.validate();
    }
}

}  // namespace

CliConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"ExtQV: diffusion-coefficient estimation for fast/slow SDEs", "extqv"};
    app.require_subcommand(1, 1);

    std::string config_path;
    bool paper_scale = false;
    app.add_option("--config", config_path, "INI config file ([sim], [experiment], [io], [figures])");
    app.add_flag("--paper-scale", paper_scale, "allow n > 1e6; default grid M=1000, n up to 1e7");

    std::map<std::string, std::string> flag_values;
    std::map<std::string, CLI::Option*> flag_opts;
    for (const auto& k : kKeys) {
        flag_opts[k.key] = app.add_option(k.flag, flag_values[k.key], k.help);
    }

    const std::pair<const char*, Subcommand> subs[] = {
        {"simulate", Subcommand::simulate},
        {"estimate", Subcommand::estimate},
        {"sweep", Subcommand::sweep},
        {"compare", Subcommand::compare},
        {"figures-data", Subcommand::figures_data},
    };
    const char* sub_help[] = {
        "write simulated paths as t,x[,y] CSV",
        "print statistics of a path CSV",
        "Monte Carlo sweep over (epsilon, n); results CSV + manifest",
        "rank estimators by MSE on shared paths",
        "write CSVs for the log-log and extremal-overlay figures",
    };
    std::vector<CLI::App*> sub_apps;
    for (std::size_t i = 0; i < std::size(subs); ++i) {
        auto* s = app.add_subcommand(subs[i].first, sub_help[i]);
        s->fallthrough();
        sub_apps.push_back(s);
    }

    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    CliConfig c;
    for (std::size_t i = 0; i < sub_apps.size(); ++i) {
        if (sub_apps[i]->parsed()) c.subcommand = subs[i].second;
    }
    c.paper_scale = paper_scale;
    if (const char* env = std::getenv("EXTQV_OUTPUT_DIR"); env && *env) c.output_dir = env;
    apply_subcommand_defaults(c);

    RawSettings raw;
    if (!config_path.empty()) {
        c.config_path = config_path;
        raw = read_file(config_path);
    }
    for (const auto& k : kKeys) {
        if (flag_opts[k.key]->count() > 0) {
            raw[k.key] = {trim(flag_values[k.key]), std::string("flag ") + k.flag};
        }
    }
    resolve(raw, c);
    c.workers = c.workers < 0 ? 0 : c.workers;
    check(c);
    c.digest = config_digest(c.experiment);
    return c;
}

namespace {

std::string subcommand_name(Subcommand s) {
    switch (s) {
        case Subcommand::simulate: return "simulate";
        case Subcommand::estimate: return "estimate";
        case Subcommand::sweep: return "sweep";
        case Subcommand::compare: return "compare";
        case Subcommand::figures_data: return "figures-data";
    }
    return "?";
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw RuntimeFailure("cannot write '" + p.string() + "'");
    out << content;
    if (!out) throw RuntimeFailure("write failed for '" + p.string() + "'");
}

fs::path prepare_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw RuntimeFailure("cannot create output directory '" + dir + "': " + ec.message());
    return fs::path(dir);
}

void write_manifest(const CliConfig& c, const fs::path& dir, std::int64_t wall_ms,
                    std::size_t cells, std::size_t failures,
                    const std::vector<std::string>& outputs) {
    nlohmann::ordered_json j;
    j["tool"] = "extqv";
    j["version"] = EXTQV_VERSION;
    j["subcommand"] = subcommand_name(c.subcommand);
    j["config_digest"] = c.digest;
    j["master_seed"] = c.experiment.master_seed;
    j["resolved_config"] = canonical_config(c.experiment);
    j["compiler"] = __VERSION__;
    j["openmp"] = _OPENMP;
    j["workers"] = c.workers > 0 ? c.workers : omp_get_max_threads();
    j["wall_ms"] = wall_ms;
    j["cells"] = cells;
    j["failures"] = failures;
    j["outputs"] = outputs;
    write_file(dir / "manifest.json", j.dump(2) + "\n");
    write_file(dir / "resolved.ini", canonical_config(c.experiment));
}

std::string results_text(const CliConfig& c, const ExperimentResult& r) {
    return c.format == Format::ndjson ? results_ndjson(r) : results_csv(r);
}

std::string results_name(const CliConfig& c) {
    return c.format == Format::ndjson ? "results.ndjson" : "results.csv";
}

int run_simulate(const CliConfig& c, std::ostream& out) {
    const auto dir = prepare_dir(c.output_dir);
    const auto& e = c.experiment;
    std::vector<std::string> outputs;
    for (double eps : e.epsilons) {
        for (std::size_t n : e.ns) {
            auto sim = e.sim_config(eps, n);
            sim.keep_fast = c.keep_fast;
            for (std::size_t m = 0; m < e.M; ++m) {
                auto rng = make_rng(sim.seed, m);
                const auto path = simulate(sim, rng);
                std::string name = "path_eps" + format_double(eps) + "_n" + std::to_string(n) +
                                   "_m" + std::to_string(m) + ".csv";
                std::ostringstream buf;
                write_path_csv(buf, path);
                write_file(dir / name, buf.str());
                outputs.push_back(name);
                out << (dir / name).string() << '\n';
            }
        }
    }
    write_manifest(c, dir, 0, 0, 0, outputs);
    return 0;
}

int run_estimate(const CliConfig& c, std::ostream& out) {
    std::ifstream in(c.input);
    if (!in) throw RuntimeFailure("cannot open path CSV '" + c.input + "'");
    const auto path = read_path_csv(in);
    const double eps = c.given.count("epsilon") ? c.experiment.epsilons.front() : 0.0;
    out << "estimator,value\n";
    for (const auto& spec : c.experiment.estimators) {
        out << spec.label() << ',' << format_double(evaluate(spec, path, eps)) << '\n';
    }
    return 0;
}

int run_sweep(const CliConfig& c, std::ostream& out, std::ostream& err) {
    const auto dir = prepare_dir(c.output_dir);
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = sweep(c.experiment, RunOptions{c.workers});
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    write_file(dir / results_name(c), results_text(c, result));
    write_manifest(c, dir, ms, result.cells.size(), result.failures(), {results_name(c)});
    out << (dir / results_name(c)).string() << '\n';
    for (const auto& cell : result.cells) {
        if (cell.failed) err << "failed: " << cell.error << '\n';
    }
    return result.failures() ? 2 : 0;
}

int run_compare(const CliConfig& c, std::ostream& out, std::ostream& err) {
    const auto dir = prepare_dir(c.output_dir);
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = compare_estimators(c.experiment, RunOptions{c.workers});
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    std::ostringstream cmp;
    cmp << "model,sigma,epsilon,n,M,estimator,mse,rank,winner\n";
    for (const auto& r : report.rankings) {
        for (std::size_t i = 0; i < r.by_mse.size(); ++i) {
            cmp << c.experiment.model_id << ',' << format_double(c.experiment.sigma) << ','
                << format_double(r.epsilon) << ',' << r.n << ',' << c.experiment.M << ','
                << r.by_mse[i].first << ',' << format_double(r.by_mse[i].second) << ',' << i + 1
                << ',' << (i == 0 ? 1 : 0) << '\n';
        }
        out << "eps=" << format_double(r.epsilon) << " n=" << r.n << " winner " << r.winner
            << '\n';
    }
    write_file(dir / results_name(c), results_text(c, report.result));
    write_file(dir / "comparison.csv", cmp.str());
    write_manifest(c, dir, ms, report.result.cells.size(), report.result.failures(),
                   {results_name(c), "comparison.csv"});
    for (const auto& cell : report.result.cells) {
        if (cell.failed) err << "failed: " << cell.error << '\n';
    }
    return report.result.failures() ? 2 : 0;
}

int run_figures_data(const CliConfig& c, std::ostream& out, std::ostream& err) {
    const auto dir = prepare_dir(c.output_dir);
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = sweep(c.experiment, RunOptions{c.workers});

    std::ostringstream loglog;
    loglog << "model,n,estimator,epsilon,mse\n";
    for (const auto& cell : result.cells) {
        if (cell.failed) {
            err << "failed: " << cell.error << '\n';
            continue;
        }
        for (const auto& s : cell.estimates) {
            loglog << cell.model_id << ',' << cell.n << ',' << s.spec.label() << ','
                   << format_double(cell.epsilon) << ',' << format_double(s.mse) << '\n';
        }
    }
    write_file(dir / "loglog.csv", loglog.str());

    auto sim = c.experiment.sim_config(c.path_epsilon, c.path_n);
    auto rng = make_rng(sim.seed, 0);
    const auto path = simulate(sim, rng);
    std::ostringstream overlay;
    write_extremal_path_csv(overlay, path);
    write_file(dir / "extremal_path.csv", overlay.str());

    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    write_manifest(c, dir, ms, result.cells.size(), result.failures(),
                   {"loglog.csv", "extremal_path.csv"});
    out << (dir / "loglog.csv").string() << '\n' << (dir / "extremal_path.csv").string() << '\n';
    return result.failures() ? 2 : 0;
}

}  // namespace

int run_command(const CliConfig& c, std::ostream& out, std::ostream& err) {
    switch (c.subcommand) {
        case Subcommand::simulate: return run_simulate(c, out);
        case Subcommand::estimate: return run_estimate(c, out);
        case Subcommand::sweep: return run_sweep(c, out, err);
        case Subcommand::compare: return run_compare(c, out, err);
        case Subcommand::figures_data: return run_figures_data(c, out, err);
    }
    return 1;
}

int main_entry(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    CliConfig config;
    try {
        config = parse_config(args);
    } catch (const HelpRequested& h) {
        std::cout << h.text;
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    }
    try {
        return run_command(config, std::cout, std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace extqv::cli
