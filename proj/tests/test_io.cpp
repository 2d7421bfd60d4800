#include "linest/errors.hpp"
#include "linest/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <sstream>

using namespace linest;

namespace {

std::vector<std::string> config_issues(std::string_view text) {
    try {
        load_config(text);
    } catch (const ConfigError& e) {
        return e.issues();
    }
    return {};
}

bool has_issue(const std::vector<std::string>& issues, std::string_view needle) {
    return std::any_of(issues.begin(), issues.end(),
                       [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("load_config fills defaults") {
    const auto cfg = load_config(R"({"sweep": "snr", "mc_trials": 50})");
    CHECK(cfg.nx == 28);
    CHECK(cfg.ny == 30);
    CHECK(cfg.mc_trials == 50);
    CHECK(cfg.snr_grid.size() == 13);
    CHECK(cfg.nt_grid == std::vector<std::size_t>{100});
    CHECK(cfg.prior_mode == PriorMode::Both);
    CHECK(cfg.estimators.size() == 3);
}

TEST_CASE("load_config reads every field") {
    const auto cfg = load_config(R"({
        "name": "t", "N_x": 3, "N_y": 4, "sweep": "n_t", "snr_grid": [2.5], "nt_grid": [10, 20],
        "mc_trials": 9, "seed": 123, "prior_mode": "identity", "h_mode": "fixed_once",
        "nonlinearity": {"kind": "cubic", "alpha": 0.25}, "noise_mean": 0.5,
        "estimators": ["generative", "discriminative"], "ridge": 0.01})");
    CHECK(cfg.name == "t");
    CHECK(cfg.nx == 3);
    CHECK(cfg.ny == 4);
    CHECK(cfg.sweep == SweepKind::TrainingSize);
    CHECK(cfg.snr_grid == std::vector<double>{2.5});
    CHECK(cfg.nt_grid == std::vector<std::size_t>{10, 20});
    CHECK(cfg.mc_trials == 9);
    CHECK(cfg.seed == 123);
    CHECK(cfg.prior_mode == PriorMode::IdentityMismatch);
    CHECK(cfg.h_mode == HMode::FixedOnce);
    CHECK(cfg.nonlinearity == Nonlinearity::cubic(0.25));
    CHECK(cfg.noise_mean == 0.5);
    CHECK(cfg.estimators == std::vector<Provenance>{Provenance::Generative, Provenance::Discriminative});
    CHECK(cfg.ridge == 0.01);
}

TEST_CASE("config round-trips through JSON") {
    auto cfg = load_config(R"({"N_x": 5, "N_y": 6, "nonlinearity": {"kind": "tanh", "scale": 2},
                               "estimators": ["generative", "discriminative"], "snr_grid": [0.1, 3.3333333333333335]})");
    const auto again = load_config(config_to_json(cfg));
    CHECK(again.nx == cfg.nx);
    CHECK(again.snr_grid == cfg.snr_grid);
    CHECK(again.nonlinearity == cfg.nonlinearity);
    CHECK(again.estimators == cfg.estimators);
    CHECK(config_to_json(again) == config_to_json(cfg));
}

TEST_CASE("load_config reports every problem") {
    CHECK(has_issue(config_issues(R"({"mc_trials": 0})"), "mc_trials must be ≥ 1"));
    CHECK(has_issue(config_issues(R"({"ridge": -0.5})"), "ridge must be ≥ 0"));
    CHECK(has_issue(config_issues(R"({"trials": 5})"), "unknown field \"trials\""));
    CHECK(has_issue(config_issues(R"({"N_x": -3})"), "N_x must be a nonnegative integer"));
    CHECK(has_issue(config_issues(R"({"sweep": "time"})"), "sweep must be"));
    CHECK(has_issue(config_issues(R"({"estimators": ["magic"]})"), "unknown estimator"));
    CHECK(has_issue(config_issues(R"({"nonlinearity": {"kind": "tanh"}, "estimators": ["oracle_lmmse"]})"),
                    "oracle_lmmse requires a linear model"));
    CHECK(has_issue(config_issues("{not json"), "not valid JSON"));
    CHECK(has_issue(config_issues("[1, 2]"), "JSON object"));

    const auto many = config_issues(R"({"mc_trials": 0, "ridge": -1, "bogus": true})");
    CHECK(many.size() == 3);
}

TEST_CASE("report_csv") {
    MseReport report;
    MseRow a;
    a.sweep_name = "snr";
    a.sweep_value = 0.5;
    a.column = Column::Generative;
    a.mean_mse = 1.25;
    a.std_err = 0.1;
    a.trials_ok = 10;
    MseRow b = a;
    b.column = Column::Discriminative;
    b.mean_mse.reset();
    b.std_err.reset();
    b.trials_ok = 0;
    b.trials_failed = 10;
    report.rows = {a, b};
    const std::string csv = report_csv(report);
    CHECK(csv ==
          "sweep_name,sweep_value,estimator,mean_mse,std_err,trials_ok,trials_failed\n"
          "snr,0.5,generative,1.25,0.10000000000000001,10,0\n"
          "snr,0.5,discriminative,,,0,10\n");
}

TEST_CASE("report metadata") {
    MseReport report;
    report.config = with_defaults(ExperimentConfig{});
    MseRow a;
    a.sweep_name = "snr";
    a.column = Column::Discriminative;
    a.condition_warnings = 2;
    a.trials_failed = 1;
    a.first_failure = "singular matrix: C_xx_hat";
    a.gap_mean = 0.5;
    report.rows = {a};
    const auto j = nlohmann::json::parse(report_metadata_json(report));
    CHECK(j.at("total_condition_warnings") == 2);
    CHECK(j.at("total_failures") == 1);
    CHECK(j.at("condition_warning_threshold") == 1e12);
    CHECK(j.at("cells")[0].at("first_failure") == "singular matrix: C_xx_hat");
    CHECK(j.at("cells")[0].at("gap_to_oracle") == 0.5);
    CHECK(j.at("cells")[0].at("gap_std_err").is_null());
    CHECK(j.at("config").at("N_x") == 28);
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 5e-5, 123456789.125, -2.5e-300}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("read_matrix_blocks") {
    SUBCASE("two blocks with comments and blank lines") {
        std::istringstream in("# header\n2,2\n1, 2\n3,4\n\n1,3\n+5,-6.5,1e-3\n");
        const auto blocks = read_matrix_blocks(in, "mem");
        REQUIRE(blocks.size() == 2);
        CHECK(blocks[0](1, 0) == 3.0);
        CHECK(blocks[1](0, 1) == -6.5);
        CHECK(blocks[1](0, 2) == 1e-3);
    }
    SUBCASE("bad number") {
        std::istringstream in("1,2\n1,abc\n");
        CHECK_THROWS_WITH_AS(read_matrix_blocks(in, "mem"), doctest::Contains("mem:2"), IoError);
    }
    SUBCASE("short block") {
        std::istringstream in("3,1\n1\n2\n");
        CHECK_THROWS_WITH_AS(read_matrix_blocks(in, "mem"), doctest::Contains("2 of 3 rows"), IoError);
    }
    SUBCASE("wrong column count") {
        std::istringstream in("1,2\n1,2,3\n");
        CHECK_THROWS_WITH_AS(read_matrix_blocks(in, "mem"), doctest::Contains("expected 2 values"), IoError);
    }
    SUBCASE("bad header") {
        std::istringstream in("2.5,1\n1\n");
        CHECK_THROWS_AS(read_matrix_blocks(in, "mem"), IoError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_matrix_file("/nonexistent/file.csv"), IoError);
    }
}
