#include "linest/io.hpp"

#include "linest/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace linest {

using nlohmann::json;

namespace {

std::optional<Provenance> provenance_from(std::string_view name) {
    for (auto p : {Provenance::Generative, Provenance::Discriminative, Provenance::OracleLMMSE,
                   Provenance::GenerativeAsymptote, Provenance::DiscriminativeAsymptote,
                   Provenance::GenerativeHighSNR, Provenance::DiscriminativeHighSNR}) {
        if (to_string(p) == name) return p;
    }
    return std::nullopt;
}

// Collects type errors instead of stopping at the first one.
class FieldReader {
public:
    explicit FieldReader(std::vector<std::string>& issues) : issues_(issues) {}

    template <class T>
    void unsigned_int(const json& j, const char* key, T& out) {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_number_unsigned()) {
            issues_.push_back(std::string(key) + " must be a nonnegative integer");
            return;
        }
        out = v.get<T>();
    }

    void number(const json& j, const char* key, double& out) {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_number()) {
            issues_.push_back(std::string(key) + " must be a number");
            return;
        }
        out = v.get<double>();
    }

    void string(const json& j, const char* key, std::string& out) {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_string()) {
            issues_.push_back(std::string(key) + " must be a string");
            return;
        }
        out = v.get<std::string>();
    }

private:
    std::vector<std::string>& issues_;
};

const std::vector<std::string_view> kKnownFields = {
    "name", "N_x", "N_y", "sweep", "snr_grid", "nt_grid", "mc_trials", "seed", "prior_mode",
    "h_mode", "nonlinearity", "noise_mean", "estimators", "ridge"};

void read_nonlinearity(const json& v, Nonlinearity& out, std::vector<std::string>& issues) {
    std::string kind;
    if (v.is_string()) {
        kind = v.get<std::string>();
    } else if (v.is_object() && v.contains("kind") && v.at("kind").is_string()) {
        kind = v.at("kind").get<std::string>();
    } else {
        issues.emplace_back("nonlinearity must be \"linear\" or an object with a \"kind\" field");
        return;
    }
    auto param = [&](const char* key, double fallback) {
        if (!v.is_object() || !v.contains(key)) return fallback;
        if (!v.at(key).is_number()) {
            issues.push_back(std::string("nonlinearity.") + key + " must be a number");
            return fallback;
        }
        return v.at(key).get<double>();
    };
    if (kind == "linear") {
        out = Nonlinearity::linear();
    } else if (kind == "tanh") {
        out = Nonlinearity::tanh(param("scale", 1.0));
    } else if (kind == "cubic") {
        out = Nonlinearity::cubic(param("alpha", 0.1));
    } else {
        issues.push_back("nonlinearity.kind must be one of linear, tanh, cubic (got \"" + kind + "\")");
    }
}

json nonlinearity_json(const Nonlinearity& g) {
    switch (g.kind) {
        case Nonlinearity::Kind::Linear: return json{{"kind", "linear"}};
        case Nonlinearity::Kind::Tanh: return json{{"kind", "tanh"}, {"scale", g.parameter}};
        case Nonlinearity::Kind::Cubic: return json{{"kind", "cubic"}, {"alpha", g.parameter}};
    }
    return json{};
}

json config_json(const ExperimentConfig& cfg) {
    json estimators = json::array();
    for (auto p : cfg.estimators) estimators.push_back(std::string(to_string(p)));
    json j;
    j["name"] = cfg.name;
    j["N_x"] = cfg.nx;
    j["N_y"] = cfg.ny;
    j["sweep"] = std::string(to_string(cfg.sweep));
    j["snr_grid"] = cfg.snr_grid;
    j["nt_grid"] = cfg.nt_grid;
    j["mc_trials"] = cfg.mc_trials;
    j["seed"] = cfg.seed;
    j["prior_mode"] = std::string(to_string(cfg.prior_mode));
    j["h_mode"] = std::string(to_string(cfg.h_mode));
    j["nonlinearity"] = nonlinearity_json(cfg.nonlinearity);
    j["noise_mean"] = cfg.noise_mean;
    j["estimators"] = std::move(estimators);
    j["ridge"] = cfg.ridge;
    return j;
}

json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

}  // namespace

ExperimentConfig load_config(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
    }
    if (!j.is_object()) throw ConfigError({"config must be a JSON object"});

    std::vector<std::string> issues;
    for (const auto& item : j.items()) {
        if (std::find(kKnownFields.begin(), kKnownFields.end(), item.key()) == kKnownFields.end()) {
            issues.push_back("unknown field \"" + item.key() + "\"");
        }
    }

    ExperimentConfig cfg;
    FieldReader read(issues);
    read.string(j, "name", cfg.name);
    read.unsigned_int(j, "N_x", cfg.nx);
    read.unsigned_int(j, "N_y", cfg.ny);
    read.unsigned_int(j, "mc_trials", cfg.mc_trials);
    read.unsigned_int(j, "seed", cfg.seed);
    read.number(j, "noise_mean", cfg.noise_mean);
    read.number(j, "ridge", cfg.ridge);

    std::string text;
    if (j.contains("sweep")) {
        read.string(j, "sweep", text);
        if (text == "snr") cfg.sweep = SweepKind::Snr;
        else if (text == "n_t") cfg.sweep = SweepKind::TrainingSize;
        else if (j.at("sweep").is_string()) issues.push_back("sweep must be \"snr\" or \"n_t\"");
    }
    if (j.contains("prior_mode")) {
        text.clear();
        read.string(j, "prior_mode", text);
        if (text == "true") cfg.prior_mode = PriorMode::TruePrior;
        else if (text == "identity") cfg.prior_mode = PriorMode::IdentityMismatch;
        else if (text == "both") cfg.prior_mode = PriorMode::Both;
        else if (j.at("prior_mode").is_string()) issues.push_back("prior_mode must be \"true\", \"identity\" or \"both\"");
    }
    if (j.contains("h_mode")) {
        text.clear();
        read.string(j, "h_mode", text);
        if (text == "per_trial") cfg.h_mode = HMode::PerTrial;
        else if (text == "fixed_once") cfg.h_mode = HMode::FixedOnce;
        else if (j.at("h_mode").is_string()) issues.push_back("h_mode must be \"per_trial\" or \"fixed_once\"");
    }
    if (j.contains("nonlinearity")) read_nonlinearity(j.at("nonlinearity"), cfg.nonlinearity, issues);

    if (j.contains("snr_grid")) {
        const auto& v = j.at("snr_grid");
        bool ok = v.is_array();
        if (ok) {
            for (const auto& e : v) {
                if (!e.is_number()) { ok = false; break; }
                cfg.snr_grid.push_back(e.get<double>());
            }
        }
        if (!ok) issues.emplace_back("snr_grid must be an array of numbers");
    }
    if (j.contains("nt_grid")) {
        const auto& v = j.at("nt_grid");
        bool ok = v.is_array();
        if (ok) {
            for (const auto& e : v) {
                if (!e.is_number_unsigned()) { ok = false; break; }
                cfg.nt_grid.push_back(e.get<std::size_t>());
            }
        }
        if (!ok) issues.emplace_back("nt_grid must be an array of nonnegative integers");
    }
    if (j.contains("estimators")) {
        const auto& v = j.at("estimators");
        if (!v.is_array()) {
            issues.emplace_back("estimators must be an array of names");
        } else {
            for (const auto& e : v) {
                auto p = e.is_string() ? provenance_from(e.get<std::string>()) : std::nullopt;
                if (!p) {
                    issues.push_back("estimators: unknown estimator " + e.dump());
                    continue;
                }
                if (std::find(cfg.estimators.begin(), cfg.estimators.end(), *p) == cfg.estimators.end()) {
                    cfg.estimators.push_back(*p);
                }
            }
            if (cfg.estimators.empty() && issues.empty()) issues.emplace_back("estimators must not be empty");
        }
    }

    cfg = with_defaults(std::move(cfg));
    for (auto& issue : validate(cfg)) {
        if (std::find(issues.begin(), issues.end(), issue) == issues.end()) issues.push_back(std::move(issue));
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2); }

std::string format_double(double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

std::string report_csv(const MseReport& report) {
    std::string out = "sweep_name,sweep_value,estimator,mean_mse,std_err,trials_ok,trials_failed\n";
    for (const auto& row : report.rows) {
        out += row.sweep_name;
        out += ',';
        out += format_double(row.sweep_value);
        out += ',';
        out += to_string(row.column);
        out += ',';
        if (row.mean_mse) out += format_double(*row.mean_mse);
        out += ',';
        if (row.std_err) out += format_double(*row.std_err);
        out += ',';
        out += std::to_string(row.trials_ok);
        out += ',';
        out += std::to_string(row.trials_failed);
        out += '\n';
    }
    return out;
}

std::string report_metadata_json(const MseReport& report) {
    json cells = json::array();
    std::size_t warnings = 0;
    std::size_t failures = 0;
    for (const auto& row : report.rows) {
        warnings += row.condition_warnings;
        failures += row.trials_failed;
        json cell{{"sweep_name", row.sweep_name},
                  {"sweep_value", row.sweep_value},
                  {"estimator", std::string(to_string(row.column))},
                  {"condition_warnings", row.condition_warnings},
                  {"trials_failed", row.trials_failed},
                  {"gap_to_oracle", optional_number(row.gap_mean)},
                  {"gap_std_err", optional_number(row.gap_std_err)}};
        if (!row.first_failure.empty()) cell["first_failure"] = row.first_failure;
        cells.push_back(std::move(cell));
    }
    json j{{"config", config_json(report.config)},
           {"ridge", report.config.ridge},
           {"condition_warning_threshold", kConditionWarning},
           {"total_condition_warnings", warnings},
           {"total_failures", failures},
           {"cells", std::move(cells)}};
    return j.dump(2);
}

std::vector<Matrix> read_matrix_blocks(std::istream& in, std::string_view source) {
    const std::string src(source);
    std::vector<Matrix> blocks;
    std::string line;
    std::size_t line_no = 0;

    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            return true;
        }
        return false;
    };
    auto fields = [&]() {
        std::vector<double> values;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            auto end = line.find(',', pos);
            if (end == std::string::npos) end = line.size();
            std::string_view cell(line.data() + pos, end - pos);
            while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
            while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) {
                cell.remove_suffix(1);
            }
            if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw IoError(src + ":" + std::to_string(line_no) + ": cannot parse number \"" +
                              std::string(cell) + "\"");
            }
            values.push_back(v);
            pos = end + 1;
        }
        return values;
    };

    while (next_line()) {
        const auto header = fields();
        if (header.size() != 2 || header[0] < 1 || header[1] < 1 || header[0] != std::floor(header[0]) ||
            header[1] != std::floor(header[1])) {
            throw IoError(src + ":" + std::to_string(line_no) + ": expected a \"rows,cols\" header");
        }
        const auto rows = static_cast<Eigen::Index>(header[0]);
        const auto cols = static_cast<Eigen::Index>(header[1]);
        Matrix m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            if (!next_line()) {
                throw IoError(src + ": block " + std::to_string(blocks.size() + 1) + " ends after " +
                              std::to_string(r) + " of " + std::to_string(rows) + " rows");
            }
            const auto values = fields();
            if (static_cast<Eigen::Index>(values.size()) != cols) {
                throw IoError(src + ":" + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                              " values, found " + std::to_string(values.size()));
            }
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values[static_cast<std::size_t>(c)];
        }
        blocks.push_back(std::move(m));
    }
    return blocks;
}

std::vector<Matrix> read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return read_matrix_blocks(in, path);
}

Dataset read_dataset_file(const std::string& path) {
    auto blocks = read_matrix_file(path);
    if (blocks.size() != 2) {
        throw IoError(path + ": a dataset file holds two blocks (X then Y), found " + std::to_string(blocks.size()));
    }
    if (blocks[0].rows() != blocks[1].rows()) {
        throw InvalidInput(path + ": X has " + std::to_string(blocks[0].rows()) + " rows (n_t) but Y has " +
                           std::to_string(blocks[1].rows()));
    }
    return Dataset(std::move(blocks[0]), std::move(blocks[1]));
}

KnownStatistics read_known_file(const std::string& path) {
    auto blocks = read_matrix_file(path);
    if (blocks.size() != 3) {
        throw IoError(path + ": a prior file holds three blocks (mu_y, C_yy, sigma2), found " +
                      std::to_string(blocks.size()));
    }
    const Matrix& mu = blocks[0];
    if (mu.rows() != 1 && mu.cols() != 1) throw InvalidInput(path + ": mu_y must be a vector");
    Vector mu_y = Eigen::Map<const Vector>(mu.data(), mu.size());
    if (blocks[1].rows() != mu_y.size() || blocks[1].cols() != mu_y.size()) {
        throw InvalidInput(path + ": C_yy is " + std::to_string(blocks[1].rows()) + "x" +
                           std::to_string(blocks[1].cols()) + " but mu_y has " + std::to_string(mu_y.size()) +
                           " entries");
    }
    if (blocks[2].size() != 1) throw InvalidInput(path + ": sigma2 must be a 1x1 block");
    return KnownStatistics(GaussianPrior(std::move(mu_y), std::move(blocks[1])), blocks[2](0, 0));
}

}  // namespace linest
