#pragma once

// Affine estimators y_hat = A x + b for the partially-known linear Gaussian
// model: the generative route (fit H and mu by maximum likelihood, then take
// the LMMSE rule of the fitted model), the discriminative route (minimize the
// empirical squared error directly over affine maps), the oracle, and the
// closed-form large-sample and noiseless limits of both learned rules.

#include "linest/moments.hpp"
#include "linest/synth.hpp"

#include <string_view>

namespace linest {

enum class Provenance {
    Generative,
    Discriminative,
    OracleLMMSE,
    GenerativeAsymptote,
    DiscriminativeAsymptote,
    GenerativeHighSNR,
    DiscriminativeHighSNR,
};

std::string_view to_string(Provenance p);

/// Maximum-likelihood estimates of the measurement matrix and noise mean.
struct FittedModel {
    Matrix H_hat;  // N_x x N_y
    Vector mu_hat;
    double condition = 0.0;  // of C_yy_hat (+ ridge)
};

class AffineEstimator {
public:
    AffineEstimator(Matrix a, Vector b, Provenance provenance, double condition = 0.0);

    const Matrix& A() const noexcept { return a_; }
    const Vector& b() const noexcept { return b_; }
    Provenance provenance() const noexcept { return provenance_; }
    /// Largest condition estimate met while building the estimator.
    double condition() const noexcept { return condition_; }

    std::size_t nx() const noexcept { return static_cast<std::size_t>(a_.cols()); }
    std::size_t ny() const noexcept { return static_cast<std::size_t>(a_.rows()); }

    Vector operator()(const Vector& x) const;

private:
    Matrix a_;
    Vector b_;
    Provenance provenance_;
    double condition_;
};

/// What the generative estimator knows without data: the target prior and the
/// noise variance.
struct KnownStatistics {
    KnownStatistics(GaussianPrior prior, double sigma2);

    GaussianPrior prior;
    double sigma2;
};

enum class GainForm {
    A,     // invert H C H^T + sigma2 I  (N_x x N_x)
    B,     // invert H^T H + sigma2 C^-1 (N_y x N_y)
    Auto,  // B when N_y <= N_x, else A
};

/// H_hat = C_xy_hat C_yy_hat^-1, mu_hat = x_bar - H_hat y_bar.
FittedModel fit_ml(const SampleMoments& moments, double ridge = 0.0);
FittedModel fit_ml(const Dataset& data, double ridge = 0.0);

/// LMMSE rule of the fitted model:
///   y_hat = mu_y + G (x - x_bar - H_hat (mu_y - y_bar))
/// with G the form-A or form-B gain of (H_hat, C_yy, sigma2).
AffineEstimator generative_estimator(const FittedModel& fit, const KnownStatistics& known,
                                     const SampleMoments& moments, GainForm form = GainForm::Auto);

/// Empirical risk minimizer over affine maps: A = C_yx_hat C_xx_hat^-1,
/// b = y_bar - A x_bar. Depends on nothing but the sample moments.
AffineEstimator discriminative_estimator(const SampleMoments& moments, double ridge = 0.0);

/// LMMSE estimator with the true H, noise mean and variance. Linear models only.
AffineEstimator oracle_lmmse(const GaussianPrior& prior, const TrueModel& model);

/// Large-sample limit of the generative estimator written in population moments:
///   A = (C_yy^-1 C_yx C_xy C_yy^-1 + sigma2 C_yy^-1)^-1 C_yy^-1 C_yx, b = mu_y - A mu_x.
/// C_xx is not used. sigma2 = 0 is accepted when the inner matrix stays invertible.
AffineEstimator generative_asymptote(const GaussianPrior& prior, const PopulationMoments& population,
                                     double sigma2);

/// Large-sample limit of the discriminative estimator: the population LMMSE
/// rule C_yx C_xx^-1 (x - mu_x) + mu_y.
AffineEstimator discriminative_asymptote(const PopulationMoments& population);

/// sigma2 -> 0 limit of the generative estimator with H_hat -> H:
///   y_hat = mu_y + C_yy H^T (H C_yy H^T)^-1 (x - x_bar - H (mu_y - y_bar)).
/// Needs H C_yy H^T nonsingular, so N_y >= N_x.
AffineEstimator generative_highsnr(const GaussianPrior& prior, const Matrix& h, const SampleMoments& moments);

/// sigma2 -> 0 limit of the discriminative estimator:
///   y_hat = y_bar + C_yy_hat H^T (H C_yy_hat H^T)^-1 (x - x_bar).
AffineEstimator discriminative_highsnr(const Matrix& h, const SampleMoments& moments);

Vector estimate(const AffineEstimator& est, const Vector& x);

/// (1/n_t) sum_t ||y_t - A x_t - b||^2.
double empirical_risk(const AffineEstimator& est, const Dataset& data);

}  // namespace linest
