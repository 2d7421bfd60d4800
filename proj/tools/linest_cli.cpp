// linest command-line frontend: run Monte Carlo sweeps, fit estimators on a
// dataset file, validate experiment configs. Talks to the library only through
// the C API.

#include "linest/linest.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

template <class T, void (*Destroy)(T*)>
struct Deleter {
    void operator()(T* p) const { Destroy(p); }
};

using ConfigPtr = std::unique_ptr<linest_config, Deleter<linest_config, linest_config_destroy>>;
using ReportPtr = std::unique_ptr<linest_report, Deleter<linest_report, linest_report_destroy>>;
using DatasetPtr = std::unique_ptr<linest_dataset, Deleter<linest_dataset, linest_dataset_destroy>>;
using KnownPtr = std::unique_ptr<linest_known, Deleter<linest_known, linest_known_destroy>>;
using EstimatorPtr = std::unique_ptr<linest_estimator, Deleter<linest_estimator, linest_estimator_destroy>>;

void report_error(const std::string& context, linest_status status) {
    std::cerr << "error: " << context << ": " << linest_status_string(status) << "\n";
    std::istringstream lines(linest_last_error());
    for (std::string line; std::getline(lines, line);) std::cerr << "  " << line << "\n";
}

std::optional<std::string> read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Writes to a sibling temporary, then renames over the target.
void write_atomically(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::optional<unsigned> threads_from_env() {
    const char* value = std::getenv("LINEST_THREADS");
    if (!value || !*value) return std::nullopt;
    char* end = nullptr;
    const unsigned long n = std::strtoul(value, &end, 10);
    if (*end != '\0') return std::nullopt;
    return static_cast<unsigned>(n);
}

const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Plot MSE curves from a linest results.csv.

usage: python3 plot_results.py [results.csv] [output.png]
"""
import csv
import os
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
src = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "results.csv")
dst = sys.argv[2] if len(sys.argv) > 2 else os.path.splitext(src)[0] + ".png"

curves = defaultdict(lambda: ([], [], []))
sweep_name = None
with open(src, newline="") as f:
    for row in csv.DictReader(f):
        sweep_name = row["sweep_name"]
        if not row["mean_mse"]:
            continue
        xs, ys, es = curves[row["estimator"]]
        xs.append(float(row["sweep_value"]))
        ys.append(float(row["mean_mse"]))
        es.append(float(row["std_err"] or 0.0))

fig, ax = plt.subplots(figsize=(6.4, 4.8))
for name, (xs, ys, es) in sorted(curves.items()):
    ax.errorbar(xs, ys, yerr=es, marker="o", markersize=3, capsize=2, label=name)
ax.set_xscale("log")
ax.set_yscale("log")
ax.set_xlabel("SNR (1/sigma^2)" if sweep_name == "snr" else "training samples n_t")
ax.set_ylabel("MSE")
ax.grid(True, which="both", alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig(dst, dpi=150)
print(dst)
)PY";

int cmd_run(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> trials,
            std::optional<std::uint64_t> seed, std::optional<unsigned> threads_flag) {
    const auto text = read_text(config_path);
    if (!text) {
        std::cerr << "error: cannot read config file " << config_path << "\n";
        return kExitUsage;
    }
    linest_config* raw_cfg = nullptr;
    if (auto st = linest_config_parse(text->c_str(), &raw_cfg); st != LINEST_OK) {
        report_error(config_path, st);
        return kExitFailure;
    }
    ConfigPtr cfg(raw_cfg);
    if (trials) {
        if (auto st = linest_config_set_trials(cfg.get(), *trials); st != LINEST_OK) {
            report_error("--trials", st);
            return kExitFailure;
        }
    }
    if (seed) linest_config_set_seed(cfg.get(), *seed);

    unsigned threads = 0;
    if (threads_flag) threads = *threads_flag;
    else if (auto env = threads_from_env()) threads = *env;

    const auto start = std::chrono::steady_clock::now();
    linest_report* raw_report = nullptr;
    if (auto st = linest_run(cfg.get(), threads, &raw_report); st != LINEST_OK) {
        report_error("run", st);
        return kExitFailure;
    }
    ReportPtr report(raw_report);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const fs::path dir(out_dir);
    const fs::path csv_path = dir / "results.csv";
    const fs::path plot_path = dir / "plot_results.py";
    const fs::path manifest_path = dir / "manifest.json";
    try {
        fs::create_directories(dir);
        write_atomically(csv_path, linest_report_csv(report.get()));
        write_atomically(plot_path, kPlotScript);

        const json metadata = json::parse(linest_report_metadata(report.get()));
        json flagged = json::array();
        for (const auto& cell : metadata.at("cells")) {
            if (cell.at("condition_warnings").get<std::size_t>() > 0 || cell.at("trials_failed").get<std::size_t>() > 0) {
                flagged.push_back(cell);
            }
        }
        json gaps = json::array();
        for (const auto& cell : metadata.at("cells")) {
            if (!cell.at("gap_to_oracle").is_null()) {
                gaps.push_back({{"sweep_value", cell.at("sweep_value")},
                                {"estimator", cell.at("estimator")},
                                {"gap_to_oracle", cell.at("gap_to_oracle")},
                                {"gap_std_err", cell.at("gap_std_err")}});
            }
        }
        const json manifest{
            {"library_version", linest_version()},
            {"config", json::parse(linest_config_json(cfg.get()))},
            {"master_seed", linest_config_seed(cfg.get())},
            {"threads_requested", threads},
            {"wall_clock_seconds", seconds},
            {"warnings",
             {{"condition_warning_threshold", metadata.at("condition_warning_threshold")},
              {"total_condition_warnings", metadata.at("total_condition_warnings")},
              {"total_failures", metadata.at("total_failures")},
              {"cells", std::move(flagged)}}},
            {"oracle_gaps", std::move(gaps)},
            {"outputs",
             {{"results_csv", csv_path.string()},
              {"plot_script", plot_path.string()},
              {"manifest", manifest_path.string()}}}};
        write_atomically(manifest_path, manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "error: writing outputs: " << e.what() << "\n";
        return kExitFailure;
    }

    std::cout << "wrote " << csv_path.string() << ", " << manifest_path.string() << ", " << plot_path.string()
              << " (" << seconds << " s)\n";
    if (const auto warnings = linest_report_condition_warnings(report.get()); warnings > 0) {
        std::cout << "note: " << warnings << " estimator fits had condition estimates above 1e12\n";
    }
    return kExitOk;
}

void print_matrix(const char* name, const std::vector<double>& values, std::size_t rows, std::size_t cols) {
    std::printf("%s (%zux%zu):\n", name, rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        std::printf(" ");
        for (std::size_t c = 0; c < cols; ++c) std::printf(" %.12g", values[r * cols + c]);
        std::printf("\n");
    }
}

int cmd_estimate(const std::string& data_path, const std::string& prior_path, const std::string& method,
                 const std::string& form, double ridge) {
    linest_dataset* raw_data = nullptr;
    if (auto st = linest_dataset_read(data_path.c_str(), &raw_data); st != LINEST_OK) {
        report_error(data_path, st);
        return st == LINEST_ERR_IO ? kExitUsage : kExitFailure;
    }
    DatasetPtr data(raw_data);
    std::size_t n = 0, nx = 0, ny = 0;
    linest_dataset_dims(data.get(), &n, &nx, &ny);

    linest_estimator* raw_est = nullptr;
    if (method == "discriminative") {
        if (auto st = linest_fit_discriminative(data.get(), ridge, &raw_est); st != LINEST_OK) {
            report_error("discriminative fit", st);
            return kExitFailure;
        }
    } else {
        if (prior_path.empty()) {
            std::cerr << "error: --prior is required for --method generative\n";
            return kExitUsage;
        }
        linest_known* raw_known = nullptr;
        if (auto st = linest_known_read(prior_path.c_str(), &raw_known); st != LINEST_OK) {
            report_error(prior_path, st);
            return st == LINEST_ERR_IO ? kExitUsage : kExitFailure;
        }
        KnownPtr known(raw_known);
        const auto gain_form = form == "a" ? LINEST_FORM_A : form == "b" ? LINEST_FORM_B : LINEST_FORM_AUTO;
        if (auto st = linest_fit_generative(data.get(), known.get(), gain_form, ridge, &raw_est); st != LINEST_OK) {
            report_error("generative fit", st);
            return kExitFailure;
        }
    }
    EstimatorPtr est(raw_est);

    std::printf("method: %s\n", method.c_str());
    std::printf("n_t = %zu, N_x = %zu, N_y = %zu\n", n, nx, ny);
    if (linest_estimator_has_model(est.get())) {
        std::vector<double> h(nx * ny), mu(nx);
        linest_estimator_model(est.get(), h.data(), h.size(), mu.data(), mu.size());
        print_matrix("H_hat", h, nx, ny);
        print_matrix("mu_hat", mu, nx, 1);
    }
    std::vector<double> a(ny * nx), b(ny);
    linest_estimator_gain(est.get(), a.data(), a.size());
    linest_estimator_offset(est.get(), b.data(), b.size());
    print_matrix("A", a, ny, nx);
    print_matrix("b", b, ny, 1);
    std::printf("condition: %.6g\n", linest_estimator_condition(est.get()));
    return kExitOk;
}

int cmd_validate(const std::string& config_path) {
    const auto text = read_text(config_path);
    if (!text) {
        std::cerr << "error: cannot read config file " << config_path << "\n";
        return kExitUsage;
    }
    linest_config* raw_cfg = nullptr;
    if (auto st = linest_config_parse(text->c_str(), &raw_cfg); st != LINEST_OK) {
        report_error(config_path, st);
        return kExitFailure;
    }
    ConfigPtr cfg(raw_cfg);
    std::cout << linest_config_json(cfg.get()) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"linest: generative versus discriminative linear estimators"};
    app.set_version_flag("--version", std::string(linest_version()));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "linest_out";
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    auto* run = app.add_subcommand("run", "Run a Monte Carlo sweep described by a JSON config");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();
    run->add_option("--trials", trials, "Override mc_trials");
    run->add_option("--seed", seed, "Override the master seed");
    run->add_option("--threads", threads, "Worker threads (0 = all); overrides LINEST_THREADS");

    std::string data_path;
    std::string prior_path;
    std::string method;
    std::string form = "auto";
    double ridge = 0.0;
    auto* estimate = app.add_subcommand("estimate", "Fit an estimator on a dataset file and print A, b");
    estimate->add_option("--data", data_path, "Dataset file (CSV blocks X then Y)")->required();
    estimate->add_option("--prior", prior_path, "Prior file (CSV blocks mu_y, C_yy, sigma2)");
    estimate->add_option("--method", method, "Estimator")
        ->required()
        ->check(CLI::IsMember({"generative", "discriminative"}));
    estimate->add_option("--form", form, "Generative gain form")
        ->check(CLI::IsMember({"auto", "a", "b"}))
        ->capture_default_str();
    estimate->add_option("--ridge", ridge, "Ridge added to the inverted sample covariance")
        ->check(CLI::NonNegativeNumber);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a config and print it with defaults filled in");
    validate->add_option("config", validate_path, "Experiment config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (*run) return cmd_run(config_path, out_dir, trials, seed, threads);
    if (*estimate) return cmd_estimate(data_path, prior_path, method, form, ridge);
    if (*validate) return cmd_validate(validate_path);
    return kExitUsage;
}
