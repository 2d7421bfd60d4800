#include "linest/linest.h"

#include "linest/errors.hpp"
#include "linest/estimators.hpp"
#include "linest/harness.hpp"
#include "linest/io.hpp"

#include <memory>
#include <new>
#include <optional>
#include <string>

struct linest_dataset {
    linest::Dataset data;
};

struct linest_known {
    linest::KnownStatistics known;
};

struct linest_estimator {
    linest::AffineEstimator est;
    std::optional<linest::FittedModel> model;
};

struct linest_config {
    linest::ExperimentConfig cfg;
    std::string json;
};

struct linest_report {
    linest::MseReport report;
    std::string csv;
    std::string metadata;
    std::size_t warnings = 0;
};

namespace {

thread_local std::string last_error;

linest_status fail(linest_status status, std::string message) {
    last_error = std::move(message);
    return status;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
linest_status guarded(F&& body) {
    try {
        last_error.clear();
        body();
        return LINEST_OK;
    } catch (const linest::SingularMatrix& e) {
        return fail(LINEST_ERR_SINGULAR, e.what());
    } catch (const linest::Error& e) {
        switch (e.code()) {
            case linest::ErrorCode::InvalidInput: return fail(LINEST_ERR_INVALID_INPUT, e.what());
            case linest::ErrorCode::SingularMatrix: return fail(LINEST_ERR_SINGULAR, e.what());
            case linest::ErrorCode::InvalidConfig: return fail(LINEST_ERR_CONFIG, e.what());
            case linest::ErrorCode::Io: return fail(LINEST_ERR_IO, e.what());
        }
        return fail(LINEST_ERR_INTERNAL, e.what());
    } catch (const std::bad_alloc&) {
        return fail(LINEST_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(LINEST_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(LINEST_ERR_INTERNAL, "unknown error");
    }
}

#define LINEST_REQUIRE(cond, what) \
    if (!(cond)) return fail(LINEST_ERR_INVALID_INPUT, what)

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

linest::Matrix from_row_major(const double* p, std::size_t rows, std::size_t cols) {
    return Eigen::Map<const RowMajor>(p, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

void to_row_major(const linest::Matrix& m, double* out) {
    Eigen::Map<RowMajor>(out, m.rows(), m.cols()) = m;
}

void refresh_json(linest_config* c) { c->json = linest::config_to_json(c->cfg); }

}  // namespace

extern "C" {

const char* linest_version(void) { return LINEST_VERSION_STRING; }

const char* linest_status_string(linest_status status) {
    switch (status) {
        case LINEST_OK: return "ok";
        case LINEST_ERR_INVALID_INPUT: return "invalid input";
        case LINEST_ERR_SINGULAR: return "singular matrix";
        case LINEST_ERR_CONFIG: return "invalid config";
        case LINEST_ERR_IO: return "i/o error";
        case LINEST_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* linest_last_error(void) { return last_error.c_str(); }

linest_status linest_dataset_create(size_t n, size_t nx, size_t ny, const double* xs, const double* ys,
                                    linest_dataset** out) {
    LINEST_REQUIRE(out && xs && ys, "linest_dataset_create: null argument");
    return guarded([&] {
        *out = new linest_dataset{linest::Dataset(from_row_major(xs, n, nx), from_row_major(ys, n, ny))};
    });
}

linest_status linest_dataset_read(const char* path, linest_dataset** out) {
    LINEST_REQUIRE(out && path, "linest_dataset_read: null argument");
    return guarded([&] { *out = new linest_dataset{linest::read_dataset_file(path)}; });
}

linest_status linest_dataset_dims(const linest_dataset* data, size_t* n, size_t* nx, size_t* ny) {
    LINEST_REQUIRE(data, "linest_dataset_dims: null dataset");
    if (n) *n = data->data.size();
    if (nx) *nx = data->data.nx();
    if (ny) *ny = data->data.ny();
    return LINEST_OK;
}

void linest_dataset_destroy(linest_dataset* data) { delete data; }

linest_status linest_known_create(size_t ny, const double* mu_y, const double* c_yy, double sigma2,
                                  linest_known** out) {
    LINEST_REQUIRE(out && mu_y && c_yy, "linest_known_create: null argument");
    return guarded([&] {
        linest::Vector mu = Eigen::Map<const linest::Vector>(mu_y, static_cast<Eigen::Index>(ny));
        *out = new linest_known{
            linest::KnownStatistics(linest::GaussianPrior(std::move(mu), from_row_major(c_yy, ny, ny)), sigma2)};
    });
}

linest_status linest_known_read(const char* path, linest_known** out) {
    LINEST_REQUIRE(out && path, "linest_known_read: null argument");
    return guarded([&] { *out = new linest_known{linest::read_known_file(path)}; });
}

void linest_known_destroy(linest_known* known) { delete known; }

linest_status linest_fit_discriminative(const linest_dataset* data, double ridge, linest_estimator** out) {
    LINEST_REQUIRE(out && data, "linest_fit_discriminative: null argument");
    return guarded([&] {
        const auto moments = linest::compute_moments(data->data);
        *out = new linest_estimator{linest::discriminative_estimator(moments, ridge), std::nullopt};
    });
}

linest_status linest_fit_generative(const linest_dataset* data, const linest_known* known, linest_gain_form form,
                                    double ridge, linest_estimator** out) {
    LINEST_REQUIRE(out && data && known, "linest_fit_generative: null argument");
    return guarded([&] {
        if (known->known.prior.ny() != data->data.ny()) {
            throw linest::InvalidInput("prior.mu_y has " + std::to_string(known->known.prior.ny()) +
                                       " entries but dataset N_y = " + std::to_string(data->data.ny()));
        }
        const auto moments = linest::compute_moments(data->data);
        auto fit = linest::fit_ml(moments, ridge);
        const auto gain_form = form == LINEST_FORM_A   ? linest::GainForm::A
                               : form == LINEST_FORM_B ? linest::GainForm::B
                                                       : linest::GainForm::Auto;
        auto est = linest::generative_estimator(fit, known->known, moments, gain_form);
        *out = new linest_estimator{std::move(est), std::move(fit)};
    });
}

linest_status linest_estimator_dims(const linest_estimator* est, size_t* nx, size_t* ny) {
    LINEST_REQUIRE(est, "linest_estimator_dims: null estimator");
    if (nx) *nx = est->est.nx();
    if (ny) *ny = est->est.ny();
    return LINEST_OK;
}

linest_status linest_estimator_gain(const linest_estimator* est, double* a, size_t capacity) {
    LINEST_REQUIRE(est && a, "linest_estimator_gain: null argument");
    LINEST_REQUIRE(capacity >= static_cast<size_t>(est->est.A().size()), "linest_estimator_gain: buffer too small");
    to_row_major(est->est.A(), a);
    return LINEST_OK;
}

linest_status linest_estimator_offset(const linest_estimator* est, double* b, size_t capacity) {
    LINEST_REQUIRE(est && b, "linest_estimator_offset: null argument");
    LINEST_REQUIRE(capacity >= static_cast<size_t>(est->est.b().size()), "linest_estimator_offset: buffer too small");
    Eigen::Map<linest::Vector>(b, est->est.b().size()) = est->est.b();
    return LINEST_OK;
}

int linest_estimator_has_model(const linest_estimator* est) { return est && est->model ? 1 : 0; }

linest_status linest_estimator_model(const linest_estimator* est, double* h_hat, size_t h_capacity, double* mu_hat,
                                     size_t mu_capacity) {
    LINEST_REQUIRE(est && h_hat && mu_hat, "linest_estimator_model: null argument");
    LINEST_REQUIRE(est->model.has_value(), "linest_estimator_model: estimator carries no fitted model");
    const auto& m = *est->model;
    LINEST_REQUIRE(h_capacity >= static_cast<size_t>(m.H_hat.size()) &&
                       mu_capacity >= static_cast<size_t>(m.mu_hat.size()),
                   "linest_estimator_model: buffer too small");
    to_row_major(m.H_hat, h_hat);
    Eigen::Map<linest::Vector>(mu_hat, m.mu_hat.size()) = m.mu_hat;
    return LINEST_OK;
}

double linest_estimator_condition(const linest_estimator* est) { return est ? est->est.condition() : 0.0; }

linest_status linest_estimator_apply(const linest_estimator* est, const double* x, size_t nx, double* y, size_t ny) {
    LINEST_REQUIRE(est && x && y, "linest_estimator_apply: null argument");
    LINEST_REQUIRE(ny == est->est.ny(), "linest_estimator_apply: output length must equal N_y");
    return guarded([&] {
        const linest::Vector in = Eigen::Map<const linest::Vector>(x, static_cast<Eigen::Index>(nx));
        Eigen::Map<linest::Vector>(y, static_cast<Eigen::Index>(ny)) = est->est(in);
    });
}

void linest_estimator_destroy(linest_estimator* est) { delete est; }

linest_status linest_config_parse(const char* json_text, linest_config** out) {
    LINEST_REQUIRE(out && json_text, "linest_config_parse: null argument");
    return guarded([&] {
        auto c = std::make_unique<linest_config>(linest_config{linest::load_config(json_text), {}});
        refresh_json(c.get());
        *out = c.release();
    });
}

linest_status linest_config_set_trials(linest_config* cfg, uint64_t trials) {
    LINEST_REQUIRE(cfg, "linest_config_set_trials: null config");
    if (trials < 1) return fail(LINEST_ERR_CONFIG, "mc_trials must be ≥ 1");
    cfg->cfg.mc_trials = static_cast<std::size_t>(trials);
    return guarded([&] { refresh_json(cfg); });
}

linest_status linest_config_set_seed(linest_config* cfg, uint64_t seed) {
    LINEST_REQUIRE(cfg, "linest_config_set_seed: null config");
    cfg->cfg.seed = seed;
    return guarded([&] { refresh_json(cfg); });
}

uint64_t linest_config_seed(const linest_config* cfg) { return cfg ? cfg->cfg.seed : 0; }

const char* linest_config_json(const linest_config* cfg) { return cfg ? cfg->json.c_str() : ""; }

void linest_config_destroy(linest_config* cfg) { delete cfg; }

linest_status linest_run(const linest_config* cfg, unsigned threads, linest_report** out) {
    LINEST_REQUIRE(cfg && out, "linest_run: null argument");
    return guarded([&] {
        auto r = std::make_unique<linest_report>(
            linest_report{linest::run_experiment(cfg->cfg, threads), {}, {}, 0});
        r->csv = linest::report_csv(r->report);
        r->metadata = linest::report_metadata_json(r->report);
        for (const auto& row : r->report.rows) r->warnings += row.condition_warnings;
        *out = r.release();
    });
}

const char* linest_report_csv(const linest_report* report) { return report ? report->csv.c_str() : ""; }

const char* linest_report_metadata(const linest_report* report) { return report ? report->metadata.c_str() : ""; }

size_t linest_report_condition_warnings(const linest_report* report) { return report ? report->warnings : 0; }

void linest_report_destroy(linest_report* report) { delete report; }

}  // extern "C"
