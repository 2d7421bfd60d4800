#pragma once

// Sample statistics of paired (x, y) training data and the symmetric
// positive-definite solves every estimator is built from.

#include <Eigen/Dense>

#include <cstddef>
#include <string_view>

namespace linest {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Condition estimates above this are reported as warnings by the harness.
inline constexpr double kConditionWarning = 1e12;
/// Condition estimates above this are treated as numerically singular.
inline constexpr double kSingularCondition = 1e14;
/// Largest relative Frobenius asymmetry accepted by spd_solve.
inline constexpr double kAsymmetryTolerance = 1e-10;

/// n_t paired samples. Row t of xs is x_t (N_x entries), row t of ys is y_t.
class Dataset {
public:
    Dataset(Matrix xs, Matrix ys);

    const Matrix& xs() const noexcept { return xs_; }
    const Matrix& ys() const noexcept { return ys_; }

    std::size_t size() const noexcept { return static_cast<std::size_t>(xs_.rows()); }
    std::size_t nx() const noexcept { return static_cast<std::size_t>(xs_.cols()); }
    std::size_t ny() const noexcept { return static_cast<std::size_t>(ys_.cols()); }

private:
    Matrix xs_;
    Matrix ys_;
};

/// Means and 1/n_t-normalized covariances of a Dataset.
struct SampleMoments {
    Vector x_bar;
    Vector y_bar;
    Matrix C_yx;  // N_y x N_x
    Matrix C_yy;  // N_y x N_y
    Matrix C_xx;  // N_x x N_x
    std::size_t n = 0;

    auto C_xy() const { return C_yx.transpose(); }

    std::size_t nx() const noexcept { return static_cast<std::size_t>(x_bar.size()); }
    std::size_t ny() const noexcept { return static_cast<std::size_t>(y_bar.size()); }
};

SampleMoments compute_moments(const Dataset& data);

struct SpdSolution {
    Matrix x;
    /// 1-norm condition estimate of the factored matrix (including ridge).
    double condition = 0.0;
};

/// Solves (M + ridge I) X = B through a Cholesky factorization.
///
/// M must be symmetric to kAsymmetryTolerance (relative Frobenius); it is
/// symmetrized before factoring. Throws SingularMatrix, naming `what`, when the
/// factorization fails or the condition estimate exceeds kSingularCondition.
SpdSolution spd_solve(const Matrix& m, const Matrix& b, double ridge = 0.0,
                      std::string_view what = "matrix");

/// Relative Frobenius asymmetry ||M - M^T|| / ||M||; zero for the zero matrix.
double relative_asymmetry(const Matrix& m);

struct GainSolution {
    Matrix gain;  // N_y x N_x
    double condition = 0.0;
};

/// C H^T (H C H^T + sigma2 I)^-1, inverting an N_x x N_x matrix.
GainSolution gain_form_a(const Matrix& h, const Matrix& c, double sigma2);

/// (H^T H + sigma2 C^-1)^-1 H^T, inverting N_y x N_y matrices.
GainSolution gain_form_b(const Matrix& h, const Matrix& c, double sigma2);

struct WoodburyGains {
    GainSolution form_a;
    GainSolution form_b;
};

/// Both sides of the matrix inversion lemma for the LMMSE gain. sigma2 may be
/// zero as long as the respective inner matrices stay invertible.
WoodburyGains woodbury_invert(const Matrix& h, const Matrix& c, double sigma2);

}  // namespace linest
