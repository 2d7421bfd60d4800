#include "linest/estimators.hpp"

#include "linest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace linest {

std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::Generative: return "generative";
        case Provenance::Discriminative: return "discriminative";
        case Provenance::OracleLMMSE: return "oracle_lmmse";
        case Provenance::GenerativeAsymptote: return "generative_asymptote";
        case Provenance::DiscriminativeAsymptote: return "discriminative_asymptote";
        case Provenance::GenerativeHighSNR: return "generative_highsnr";
        case Provenance::DiscriminativeHighSNR: return "discriminative_highsnr";
    }
    return "unknown";
}

AffineEstimator::AffineEstimator(Matrix a, Vector b, Provenance provenance, double condition)
    : a_(std::move(a)), b_(std::move(b)), provenance_(provenance), condition_(condition) {
    if (a_.rows() != b_.size()) {
        throw InvalidInput("estimator: A has " + std::to_string(a_.rows()) + " rows but b has " +
                           std::to_string(b_.size()) + " entries");
    }
}

Vector AffineEstimator::operator()(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != nx()) {
        throw InvalidInput("estimate: x has " + std::to_string(x.size()) + " entries, expected N_x = " +
                           std::to_string(nx()));
    }
    return a_ * x + b_;
}

Vector estimate(const AffineEstimator& est, const Vector& x) { return est(x); }

KnownStatistics::KnownStatistics(GaussianPrior prior_, double sigma2_)
    : prior(std::move(prior_)), sigma2(sigma2_) {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw InvalidInput("known statistics: sigma2 must be positive and finite");
    }
}

FittedModel fit_ml(const SampleMoments& moments, double ridge) {
    // C_yy_hat^-1 C_yx_hat = (C_xy_hat C_yy_hat^-1)^T since C_yy_hat is symmetric.
    auto sol = spd_solve(moments.C_yy, moments.C_yx, ridge, "sample covariance C_yy_hat");
    FittedModel fit;
    fit.H_hat = sol.x.transpose();
    fit.mu_hat = moments.x_bar - fit.H_hat * moments.y_bar;
    fit.condition = sol.condition;
    return fit;
}

FittedModel fit_ml(const Dataset& data, double ridge) { return fit_ml(compute_moments(data), ridge); }

AffineEstimator generative_estimator(const FittedModel& fit, const KnownStatistics& known,
                                     const SampleMoments& moments, GainForm form) {
    const auto nx = moments.nx();
    const auto ny = moments.ny();
    if (static_cast<std::size_t>(fit.H_hat.rows()) != nx || static_cast<std::size_t>(fit.H_hat.cols()) != ny) {
        throw InvalidInput("generative: H_hat is " + std::to_string(fit.H_hat.rows()) + "x" +
                           std::to_string(fit.H_hat.cols()) + ", expected N_x x N_y = " + std::to_string(nx) +
                           "x" + std::to_string(ny));
    }
    if (known.prior.ny() != ny) {
        throw InvalidInput("generative: prior N_y = " + std::to_string(known.prior.ny()) +
                           " but data N_y = " + std::to_string(ny));
    }

    if (form == GainForm::Auto) form = ny <= nx ? GainForm::B : GainForm::A;
    const auto& c = known.prior.C_yy();
    const GainSolution g = form == GainForm::A ? gain_form_a(fit.H_hat, c, known.sigma2)
                                               : gain_form_b(fit.H_hat, c, known.sigma2);

    const Vector& mu_y = known.prior.mu_y();
    const Vector offset = moments.x_bar + fit.H_hat * (mu_y - moments.y_bar);
    Vector b = mu_y - g.gain * offset;
    return {g.gain, std::move(b), Provenance::Generative, std::max(fit.condition, g.condition)};
}

AffineEstimator discriminative_estimator(const SampleMoments& moments, double ridge) {
    // A^T = C_xx_hat^-1 C_xy_hat
    auto sol = spd_solve(moments.C_xx, moments.C_yx.transpose(), ridge, "sample covariance C_xx_hat");
    Matrix a = sol.x.transpose();
    Vector b = moments.y_bar - a * moments.x_bar;
    return {std::move(a), std::move(b), Provenance::Discriminative, sol.condition};
}

AffineEstimator oracle_lmmse(const GaussianPrior& prior, const TrueModel& model) {
    if (!model.g.is_linear()) {
        throw InvalidInput("oracle_lmmse: the oracle is defined for the linear model only");
    }
    if (model.ny() != prior.ny() || static_cast<std::size_t>(model.mu_w.size()) != model.nx()) {
        throw InvalidInput("oracle_lmmse: model and prior dimensions disagree");
    }
    auto g = gain_form_a(model.H, prior.C_yy(), model.sigma2);
    Vector b = prior.mu_y() - g.gain * (model.H * prior.mu_y() + model.mu_w);
    return {std::move(g.gain), std::move(b), Provenance::OracleLMMSE, g.condition};
}

AffineEstimator generative_asymptote(const GaussianPrior& prior, const PopulationMoments& population,
                                     double sigma2) {
    const auto ny = static_cast<Eigen::Index>(prior.ny());
    if (population.C_yx.rows() != ny || population.C_yx.cols() != population.mu_x.size()) {
        throw InvalidInput("generative_asymptote: C_yx must be N_y x N_x");
    }
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
        throw InvalidInput("generative_asymptote: sigma2 must be finite and nonnegative");
    }
    const auto c_inv = spd_solve(prior.C_yy(), Matrix::Identity(ny, ny), 0.0, "C_yy");
    const Matrix ci = 0.5 * (c_inv.x + c_inv.x.transpose());
    const Matrix k = ci * population.C_yx;  // C_yy^-1 C_yx, N_y x N_x
    Matrix inner = k * k.transpose() + sigma2 * ci;
    inner = 0.5 * (inner + inner.transpose());
    auto sol = spd_solve(inner, k, 0.0, "C_yy^-1 C_yx C_xy C_yy^-1 + sigma2 C_yy^-1");
    Vector b = prior.mu_y() - sol.x * population.mu_x;
    return {std::move(sol.x), std::move(b), Provenance::GenerativeAsymptote,
            std::max(c_inv.condition, sol.condition)};
}

AffineEstimator discriminative_asymptote(const PopulationMoments& population) {
    auto sol = spd_solve(population.C_xx, population.C_yx.transpose(), 0.0, "C_xx");
    Matrix a = sol.x.transpose();
    Vector b = population.mu_y - a * population.mu_x;
    return {std::move(a), std::move(b), Provenance::DiscriminativeAsymptote, sol.condition};
}

AffineEstimator generative_highsnr(const GaussianPrior& prior, const Matrix& h, const SampleMoments& moments) {
    if (static_cast<std::size_t>(h.cols()) != prior.ny() || static_cast<std::size_t>(h.rows()) != moments.nx() ||
        moments.ny() != prior.ny()) {
        throw InvalidInput("generative_highsnr: H, prior and moments dimensions disagree");
    }
    auto g = gain_form_a(h, prior.C_yy(), 0.0);
    const Vector& mu_y = prior.mu_y();
    Vector b = mu_y - g.gain * (moments.x_bar + h * (mu_y - moments.y_bar));
    return {std::move(g.gain), std::move(b), Provenance::GenerativeHighSNR, g.condition};
}

AffineEstimator discriminative_highsnr(const Matrix& h, const SampleMoments& moments) {
    if (static_cast<std::size_t>(h.cols()) != moments.ny() || static_cast<std::size_t>(h.rows()) != moments.nx()) {
        throw InvalidInput("discriminative_highsnr: H must be N_x x N_y");
    }
    auto g = gain_form_a(h, moments.C_yy, 0.0);
    Vector b = moments.y_bar - g.gain * moments.x_bar;
    return {std::move(g.gain), std::move(b), Provenance::DiscriminativeHighSNR, g.condition};
}

double empirical_risk(const AffineEstimator& est, const Dataset& data) {
    if (data.nx() != est.nx() || data.ny() != est.ny()) {
        throw InvalidInput("empirical_risk: estimator and dataset dimensions disagree");
    }
    const Matrix residual = (data.ys() - data.xs() * est.A().transpose()).rowwise() - est.b().transpose();
    return residual.squaredNorm() / static_cast<double>(data.size());
}

}  // namespace linest
