#include "linest/moments.hpp"

#include "linest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace linest {

Dataset::Dataset(Matrix xs, Matrix ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.rows() == 0 || ys_.rows() == 0) {
        throw InvalidInput("dataset: at least one sample is required");
    }
    if (xs_.rows() != ys_.rows()) {
        throw InvalidInput("dataset: xs has " + std::to_string(xs_.rows()) + " samples but ys has " +
                           std::to_string(ys_.rows()));
    }
    if (xs_.cols() == 0 || ys_.cols() == 0) {
        throw InvalidInput("dataset: N_x and N_y must be at least 1");
    }
    if (!xs_.allFinite() || !ys_.allFinite()) {
        throw InvalidInput("dataset: samples must be finite");
    }
}

namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// a^T a / n, computed on the lower triangle and mirrored, so the result is exactly symmetric.
Matrix gram(const Matrix& a, double n) {
    Matrix g = Matrix::Zero(a.cols(), a.cols());
    g.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose(), 1.0 / n);
    g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
    return g;
}

}  // namespace

SampleMoments compute_moments(const Dataset& data) {
    const auto n = static_cast<double>(data.size());
    SampleMoments out;
    out.n = data.size();
    out.x_bar = data.xs().colwise().mean().transpose();
    out.y_bar = data.ys().colwise().mean().transpose();

    const Matrix xc = data.xs().rowwise() - out.x_bar.transpose();
    const Matrix yc = data.ys().rowwise() - out.y_bar.transpose();
    out.C_yx = yc.transpose() * xc / n;
    out.C_yy = gram(yc, n);
    out.C_xx = gram(xc, n);
    return out;
}

double relative_asymmetry(const Matrix& m) {
    const double scale = m.norm();
    if (scale == 0.0) return 0.0;
    return (m - m.transpose()).norm() / scale;
}

SpdSolution spd_solve(const Matrix& m, const Matrix& b, double ridge, std::string_view what) {
    const std::string name(what);
    if (m.rows() != m.cols()) {
        throw InvalidInput(name + ": expected a square matrix");
    }
    if (b.rows() != m.rows()) {
        throw InvalidInput(name + ": right-hand side has " + std::to_string(b.rows()) +
                           " rows, expected " + std::to_string(m.rows()));
    }
    if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
        throw InvalidInput(name + ": ridge must be a finite nonnegative number");
    }
    if (!m.allFinite()) {
        throw SingularMatrix(name, std::numeric_limits<double>::infinity(), "non-finite entries");
    }
    if (relative_asymmetry(m) > kAsymmetryTolerance) {
        throw InvalidInput(name + ": matrix is not symmetric");
    }

    Matrix sym = symmetrized(m);
    if (ridge > 0.0) sym.diagonal().array() += ridge;

    Eigen::LLT<Matrix> llt(sym);
    if (llt.info() != Eigen::Success) {
        throw SingularMatrix(name, std::numeric_limits<double>::infinity(),
                             "Cholesky factorization failed");
    }
    const double rcond = llt.rcond();
    const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(condition <= kSingularCondition)) {
        throw SingularMatrix(name, condition);
    }
    return {llt.solve(b), condition};
}

namespace {

void check_gain_inputs(const Matrix& h, const Matrix& c, double sigma2) {
    if (c.rows() != c.cols() || c.rows() != h.cols()) {
        throw InvalidInput("gain: C must be N_y x N_y with N_y = H.cols()");
    }
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
        throw InvalidInput("gain: sigma2 must be finite and nonnegative");
    }
}

}  // namespace

GainSolution gain_form_a(const Matrix& h, const Matrix& c, double sigma2) {
    check_gain_inputs(h, c, sigma2);
    const Matrix ch_t = c * h.transpose();  // N_y x N_x
    Matrix inner = symmetrized(h * ch_t);
    inner.diagonal().array() += sigma2;
    // gain = C H^T inner^-1 = (inner^-1 H C)^T
    auto sol = spd_solve(inner, ch_t.transpose(), 0.0, "H C H^T + sigma2 I");
    return {sol.x.transpose(), sol.condition};
}

GainSolution gain_form_b(const Matrix& h, const Matrix& c, double sigma2) {
    check_gain_inputs(h, c, sigma2);
    Matrix inner = symmetrized(h.transpose() * h);
    double condition = 0.0;
    if (sigma2 > 0.0) {
        const auto c_inv = spd_solve(c, Matrix::Identity(c.rows(), c.cols()), 0.0, "C_yy");
        inner += sigma2 * symmetrized(c_inv.x);
        condition = c_inv.condition;
    }
    auto sol = spd_solve(inner, h.transpose(), 0.0, "H^T H + sigma2 C_yy^-1");
    return {std::move(sol.x), std::max(condition, sol.condition)};
}

WoodburyGains woodbury_invert(const Matrix& h, const Matrix& c, double sigma2) {
    return {gain_form_a(h, c, sigma2), gain_form_b(h, c, sigma2)};
}

}  // namespace linest
