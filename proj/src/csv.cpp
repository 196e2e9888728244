#include "extqv/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "extqv/error.hpp"

namespace extqv {

std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_cell(std::string_view text, std::size_t row) {
    while (!text.empty() && (text.back() == '\r' || text.back() == ' ')) text.remove_suffix(1);
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    double v = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size()) {
        throw RuntimeFailure("path CSV row " + std::to_string(row) + ": bad number '" +
                             std::string(text) + "'");
    }
    return v;
}

}  // namespace

std::string results_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << "model,sigma,epsilon,n,M,estimator,alpha,stride,mean,mse,stderr,sigma2_target,seed,"
           "wall_ms\n";
    for (const auto& cell : result.cells) {
        auto row = [&](const EstimatorSpec& spec, const std::string& mean, const std::string& mse,
                       const std::string& se) {
            out << cell.model_id << ',' << format_double(cell.sigma) << ','
                << format_double(cell.epsilon) << ',' << cell.n << ',' << cell.M << ','
                << kind_name(spec.kind) << ',' << (spec.alpha ? format_double(*spec.alpha) : "")
                << ',' << (spec.stride ? std::to_string(*spec.stride) : "") << ',' << mean << ','
                << mse << ',' << se << ',' << format_double(cell.sigma2_target) << ','
                << cell.seed << ',' << cell.wall_ms << '\n';
        };
        if (cell.failed) {
            for (const auto& spec : result.config.estimators) row(spec, "NA", "NA", "NA");
            continue;
        }
        for (const auto& s : cell.estimates) {
            row(s.spec, format_double(s.mean), format_double(s.mse), format_double(s.std_error));
        }
    }
    return out.str();
}

std::string results_ndjson(const ExperimentResult& result) {
    std::ostringstream out;
    for (const auto& cell : result.cells) {
        auto base = [&](const EstimatorSpec& spec) {
            nlohmann::ordered_json j;
            j["model"] = cell.model_id;
            j["sigma"] = cell.sigma;
            j["epsilon"] = cell.epsilon;
            j["n"] = cell.n;
            j["M"] = cell.M;
            j["estimator"] = kind_name(spec.kind);
            j["alpha"] = spec.alpha ? nlohmann::ordered_json(*spec.alpha) : nullptr;
            j["stride"] = spec.stride ? nlohmann::ordered_json(*spec.stride) : nullptr;
            return j;
        };
        auto tail = [&](nlohmann::ordered_json& j) {
            j["sigma2_target"] = cell.sigma2_target;
            j["seed"] = cell.seed;
            j["wall_ms"] = cell.wall_ms;
            out << j.dump() << '\n';
        };
        if (cell.failed) {
            for (const auto& spec : result.config.estimators) {
                auto j = base(spec);
                j["mean"] = nullptr;
                j["mse"] = nullptr;
                j["stderr"] = nullptr;
                j["error"] = cell.error;
                tail(j);
            }
            continue;
        }
        for (const auto& s : cell.estimates) {
            auto j = base(s.spec);
            j["mean"] = s.mean;
            j["mse"] = s.mse;
            j["stderr"] = s.std_error;
            tail(j);
        }
    }
    return out.str();
}

void write_path_csv(std::ostream& out, const SamplePath& path) {
    out << (path.has_fast() ? "t,x,y\n" : "t,x\n");
    for (std::size_t i = 0; i < path.slow.size(); ++i) {
        out << format_double(path.grid.time(i)) << ',' << format_double(path.slow[i]);
        if (path.has_fast()) out << ',' << format_double(path.fast[i]);
        out << '\n';
    }
}

void write_extremal_path_csv(std::ostream& out, const SamplePath& path) {
    const auto part = extremal_partition(path.slow);
    out << "index,t,x,extremal\n";
    std::size_t next = 0;
    for (std::size_t i = 0; i < path.slow.size(); ++i) {
        const bool marked = next < part.indices.size() && part.indices[next] == i;
        if (marked) ++next;
        out << i << ',' << format_double(path.grid.time(i)) << ',' << format_double(path.slow[i])
            << ',' << (marked ? 1 : 0) << '\n';
    }
}

SamplePath read_path_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw RuntimeFailure("path CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line, ',');
    int col_t = -1, col_x = -1, col_y = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "t") col_t = static_cast<int>(c);
        if (header[c] == "x") col_x = static_cast<int>(c);
        if (header[c] == "y") col_y = static_cast<int>(c);
    }
    if (col_x < 0) throw RuntimeFailure("path CSV header has no 'x' column");

    std::vector<double> t, x, y;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto cells = split(line, ',');
        if (cells.size() != header.size()) {
            throw RuntimeFailure("path CSV row " + std::to_string(row) + " has " +
                                 std::to_string(cells.size()) + " fields, expected " +
                                 std::to_string(header.size()));
        }
        x.push_back(parse_cell(cells[col_x], row));
        if (col_t >= 0) t.push_back(parse_cell(cells[col_t], row));
        if (col_y >= 0) y.push_back(parse_cell(cells[col_y], row));
    }
    if (x.size() < 2) throw RuntimeFailure("path CSV needs at least 2 rows");

    SamplePath path;
    const double T = t.empty() ? 1.0 : t.back() - t.front();
    path.grid = Grid(x.size() - 1, T > 0.0 ? T : 1.0);
    path.slow = std::move(x);
    path.fast = std::move(y);
    return path;
}

}  // namespace extqv
