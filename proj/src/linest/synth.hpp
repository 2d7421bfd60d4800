#pragma once

// Synthetic data for the linear Gaussian measurement model x = g(H, y) + w.

#include "linest/moments.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace linest {

/// Counter-based seed. derive(i) mixes the parent value with i through
/// splitmix64, so any (master, index path) always maps to the same stream no
/// matter in which order or on which thread it is requested.
class Seed {
public:
    constexpr explicit Seed(std::uint64_t master) noexcept : value_(master) {}

    constexpr std::uint64_t value() const noexcept { return value_; }

    constexpr Seed derive(std::uint64_t index) const noexcept {
        return Seed(mix(value_ ^ mix(index + 0x9e3779b97f4a7c15ULL)));
    }

    std::mt19937_64 engine() const { return std::mt19937_64(value_); }

    friend constexpr bool operator==(Seed, Seed) = default;

private:
    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t value_;
};

/// y ~ N(mu_y, C_yy). Construction fails unless C_yy is symmetric positive definite.
class GaussianPrior {
public:
    GaussianPrior(Vector mu_y, Matrix c_yy);

    const Vector& mu_y() const noexcept { return mu_y_; }
    const Matrix& C_yy() const noexcept { return c_yy_; }
    /// Lower Cholesky factor L with L L^T = C_yy.
    const Matrix& cholesky_factor() const noexcept { return chol_; }
    std::size_t ny() const noexcept { return static_cast<std::size_t>(mu_y_.size()); }

private:
    Vector mu_y_;
    Matrix c_yy_;
    Matrix chol_;
};

/// Measurement distortion g(H, y).
struct Nonlinearity {
    enum class Kind { Linear, Tanh, Cubic };

    Kind kind = Kind::Linear;
    /// Tanh: saturation scale s in s * tanh(u / s). Cubic: alpha in u + alpha u^3.
    double parameter = 0.0;

    static Nonlinearity linear() { return {}; }
    static Nonlinearity tanh(double scale) { return {Kind::Tanh, scale}; }
    static Nonlinearity cubic(double alpha) { return {Kind::Cubic, alpha}; }

    bool is_linear() const noexcept { return kind == Kind::Linear; }

    /// Applies the elementwise distortion to u = H y in place.
    void apply(Eigen::Ref<Vector> u) const;

    friend bool operator==(const Nonlinearity&, const Nonlinearity&) = default;
};

std::string to_string(const Nonlinearity& g);

struct TrueModel {
    Matrix H;       // N_x x N_y
    Vector mu_w;    // noise mean, N_x
    double sigma2;  // noise variance per coordinate; 0 only for noiseless limit studies
    Nonlinearity g{};

    std::size_t nx() const noexcept { return static_cast<std::size_t>(H.rows()); }
    std::size_t ny() const noexcept { return static_cast<std::size_t>(H.cols()); }
};

/// n draws from the prior, one per row.
Matrix sample_targets(const GaussianPrior& prior, std::size_t n, Seed seed);

/// n pairs x_t = g(H, y_t) + w_t, w_t ~ N(mu_w, sigma2 I).
///
/// Targets come from seed.derive(0) and the standard-normal noise draws from
/// seed.derive(1); both are consumed sample by sample, so the first m pairs of
/// an n-pair draw equal an m-pair draw, and changing sigma2 rescales the same
/// noise realization.
Dataset sample_pairs(const GaussianPrior& prior, const TrueModel& model, std::size_t n, Seed seed);

/// Zero-mean prior with C_yy[i][j] = exp(-|i - j| / 5).
GaussianPrior paper_prior(std::size_t ny);

/// N_x x N_y matrix with i.i.d. standard normal entries.
Matrix random_H(std::size_t nx, std::size_t ny, Seed seed);

/// First and second moments of the joint (x, y) distribution.
struct PopulationMoments {
    Vector mu_x;
    Vector mu_y;
    Matrix C_yx;  // N_y x N_x
    Matrix C_xx;  // N_x x N_x
};

/// Closed-form moments of the linear model: C_xy = H C_yy,
/// C_xx = H C_yy H^T + sigma2 I, mu_x = H mu_y + mu_w.
PopulationMoments linear_population_moments(const GaussianPrior& prior, const TrueModel& model);

/// Moments estimated from a (large) dataset, for models with no closed form.
PopulationMoments empirical_population_moments(const Dataset& data);

}  // namespace linest
