#include "linest/errors.hpp"
#include "linest/synth.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace linest;

TEST_CASE("Seed derivation is deterministic and separates streams") {
    const Seed s(42);
    CHECK(s.derive(3) == Seed(42).derive(3));
    CHECK(s.derive(3) != s.derive(4));
    CHECK(s.derive(0) != Seed(43).derive(0));
    CHECK(s.derive(1).derive(2) == Seed(42).derive(1).derive(2));
    auto a = s.derive(7).engine();
    auto b = s.derive(7).engine();
    CHECK(a() == b());
}

TEST_CASE("paper_prior") {
    const auto prior = paper_prior(30);
    CHECK(prior.ny() == 30);
    CHECK(prior.mu_y().isZero(0.0));
    for (int i = 0; i < 30; ++i) CHECK(prior.C_yy()(i, i) == 1.0);
    CHECK(prior.C_yy()(0, 5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(prior.C_yy()(0, 5) == doctest::Approx(0.3679).epsilon(1e-4));
    CHECK(prior.C_yy()(7, 3) == doctest::Approx(std::exp(-0.8)));
    // The factor exists and reproduces C_yy.
    const Matrix& l = prior.cholesky_factor();
    CHECK((l * l.transpose() - prior.C_yy()).norm() <= 1e-12);
}

TEST_CASE("GaussianPrior rejects invalid covariances") {
    Matrix c(2, 2);
    c << 1, 2, 2, 1;  // indefinite
    CHECK_THROWS_AS(GaussianPrior(Vector::Zero(2), c), InvalidInput);
    CHECK_THROWS_AS(GaussianPrior(Vector::Zero(3), Matrix::Identity(2, 2)), InvalidInput);
    CHECK_THROWS_AS(GaussianPrior(Vector::Zero(2), Matrix::Zero(2, 2)), InvalidInput);
}

TEST_CASE("sample_targets law of large numbers") {
    SUBCASE("standard prior") {
        const GaussianPrior prior(Vector::Zero(3), Matrix::Identity(3, 3));
        const Matrix ys = sample_targets(prior, 100000, Seed(1));
        const Vector mean = ys.colwise().mean().transpose();
        CHECK(mean.cwiseAbs().maxCoeff() <= 0.02);
    }
    SUBCASE("shifted prior") {
        Vector mu(3);
        mu << 4, -2, 0.5;
        const GaussianPrior prior(mu, Matrix::Identity(3, 3));
        const Matrix ys = sample_targets(prior, 100000, Seed(2));
        const Vector mean = ys.colwise().mean().transpose();
        CHECK((mean - mu).cwiseAbs().maxCoeff() <= 0.02);
    }
    SUBCASE("exponential-decay covariance") {
        const auto prior = paper_prior(30);
        const Matrix ys = sample_targets(prior, 100000, Seed(3));
        const Matrix yc = ys.rowwise() - ys.colwise().mean();
        const Matrix c = yc.transpose() * yc / static_cast<double>(ys.rows());
        CHECK(std::abs(c(0, 1) - std::exp(-0.2)) <= 0.01);
        CHECK(std::abs(c(0, 1) - 0.8187) <= 0.01);
    }
    SUBCASE("n = 0 is rejected") {
        CHECK_THROWS_AS(sample_targets(paper_prior(2), 0, Seed(1)), InvalidInput);
    }
}

TEST_CASE("sample_pairs linear branch") {
    const auto prior = paper_prior(4);
    SUBCASE("noiseless identity channel reproduces the targets") {
        const TrueModel model{Matrix::Identity(4, 4), Vector::Zero(4), 0.0};
        const auto data = sample_pairs(prior, model, 50, Seed(5));
        CHECK(data.xs() == data.ys());
    }
    SUBCASE("affine evaluation") {
        const GaussianPrior scalar(Vector::Constant(1, 3.0), Matrix::Identity(1, 1));
        const TrueModel model{Matrix::Constant(1, 1, 2.0), Vector::Constant(1, 1.0), 0.0};
        const auto data = sample_pairs(scalar, model, 20, Seed(6));
        for (Eigen::Index t = 0; t < 20; ++t) CHECK(data.xs()(t, 0) == 2.0 * data.ys()(t, 0) + 1.0);
    }
    SUBCASE("dimension mismatch") {
        const TrueModel bad_h{Matrix::Identity(3, 3), Vector::Zero(3), 1.0};
        CHECK_THROWS_AS(sample_pairs(prior, bad_h, 5, Seed(1)), InvalidInput);
        const TrueModel bad_mu{Matrix::Identity(4, 4), Vector::Zero(2), 1.0};
        CHECK_THROWS_AS(sample_pairs(prior, bad_mu, 5, Seed(1)), InvalidInput);
        const TrueModel bad_sigma{Matrix::Identity(4, 4), Vector::Zero(4), -1.0};
        CHECK_THROWS_AS(sample_pairs(prior, bad_sigma, 5, Seed(1)), InvalidInput);
    }
}

TEST_CASE("sample_pairs is deterministic and prefix-nested") {
    const auto prior = paper_prior(5);
    const TrueModel model{random_H(4, 5, Seed(9)), Vector::Constant(4, 0.3), 0.7};
    const auto a = sample_pairs(prior, model, 40, Seed(10));
    const auto b = sample_pairs(prior, model, 40, Seed(10));
    CHECK(a.xs() == b.xs());
    CHECK(a.ys() == b.ys());
    const auto head = sample_pairs(prior, model, 15, Seed(10));
    CHECK(head.xs() == a.xs().topRows(15));
    CHECK(head.ys() == a.ys().topRows(15));
    const auto other = sample_pairs(prior, model, 40, Seed(11));
    CHECK(other.ys() != a.ys());
}

TEST_CASE("sigma2 rescales one noise realization") {
    const auto prior = paper_prior(3);
    TrueModel model{random_H(3, 3, Seed(1)), Vector::Zero(3), 1.0};
    const auto unit = sample_pairs(prior, model, 10, Seed(2));
    model.sigma2 = 0.25;
    const auto quarter = sample_pairs(prior, model, 10, Seed(2));
    CHECK(unit.ys() == quarter.ys());
    const Matrix hy = unit.ys() * model.H.transpose();
    CHECK(((quarter.xs() - hy) - 0.5 * (unit.xs() - hy)).norm() <= 1e-12);
}

TEST_CASE("nonlinear branches") {
    SUBCASE("tanh with a huge scale approaches the linear map") {
        // s tanh(u/s) = u - u^3 / (3 s^2) + ..., so |u| <= 10, s = 1e6 deviates
        // by at most 1000 / 3e12.
        const double s = 1e6;
        const double taylor_bound = 10.0 * 10.0 * 10.0 / (3.0 * s * s) * 1.01;
        const GaussianPrior prior(Vector::Zero(3), Matrix::Identity(3, 3));
        Matrix h(2, 3);
        h << 1.5, -1, 0.5, 2, 0.25, -1.75;
        TrueModel tanh_model{h, Vector::Zero(2), 0.0, Nonlinearity::tanh(s)};
        TrueModel lin_model{h, Vector::Zero(2), 0.0};
        const auto a = sample_pairs(prior, tanh_model, 2000, Seed(3));
        const auto b = sample_pairs(prior, lin_model, 2000, Seed(3));
        const Matrix hy = b.xs();
        double max_dev = 0.0;
        for (Eigen::Index t = 0; t < hy.rows(); ++t) {
            if (hy.row(t).cwiseAbs().maxCoeff() > 10.0) continue;
            max_dev = std::max(max_dev, (a.xs().row(t) - hy.row(t)).cwiseAbs().maxCoeff());
        }
        CHECK(max_dev <= taylor_bound);
        CHECK(max_dev <= 3.4e-10);
    }
    SUBCASE("tanh saturates at its scale") {
        Vector u(3);
        u << 100, -100, 0;
        Nonlinearity::tanh(2.0).apply(u);
        CHECK(u(0) == doctest::Approx(2.0));
        CHECK(u(1) == doctest::Approx(-2.0));
        CHECK(u(2) == 0.0);
    }
    SUBCASE("cubic distortion") {
        Vector u(2);
        u << 2, -1;
        Nonlinearity::cubic(0.5).apply(u);
        CHECK(u(0) == doctest::Approx(6.0));
        CHECK(u(1) == doctest::Approx(-1.5));
        Vector v(2);
        v << 2, -1;
        Nonlinearity::cubic(0.0).apply(v);
        CHECK(v(0) == 2.0);
    }
}

TEST_CASE("random_H") {
    const Matrix a = random_H(28, 30, Seed(77).derive(0));
    const Matrix b = random_H(28, 30, Seed(77).derive(0));
    const Matrix c = random_H(28, 30, Seed(77).derive(1));
    CHECK(a == b);
    CHECK(a != c);
    const double mean = a.mean();
    const double var = (a.array() - mean).square().sum() / static_cast<double>(a.size() - 1);
    CHECK(std::abs(var - 1.0) <= 0.2);
}

TEST_CASE("linear model population identities hold empirically") {
    const auto prior = paper_prior(30);
    const TrueModel model{random_H(28, 30, Seed(4)), Vector::Constant(28, 0.5), 1.0};
    const auto data = sample_pairs(prior, model, 100000, Seed(5));
    const auto m = compute_moments(data);

    const Matrix h_cyy = model.H * m.C_yy;
    CHECK((Matrix(m.C_xy()) - h_cyy).norm() / h_cyy.norm() <= 0.05);

    const auto pop = linear_population_moments(prior, model);
    CHECK((m.C_xx - pop.C_xx).norm() / pop.C_xx.norm() <= 0.05);

    // Noise is independent of the targets.
    const Matrix w = data.xs() - data.ys() * model.H.transpose();
    const Matrix wc = w.rowwise() - w.colwise().mean();
    const Matrix yc = data.ys().rowwise() - data.ys().colwise().mean();
    const Matrix c_wy = wc.transpose() * yc / static_cast<double>(data.size());
    CHECK(c_wy.norm() <= 0.05 * std::sqrt(28.0 * 30.0));
}

TEST_CASE("linear_population_moments") {
    const GaussianPrior prior(Vector::Constant(2, 1.0), Matrix::Identity(2, 2));
    Matrix h(1, 2);
    h << 1, 2;
    const TrueModel model{h, Vector::Constant(1, 0.5), 0.25};
    const auto pop = linear_population_moments(prior, model);
    CHECK(pop.mu_x(0) == doctest::Approx(3.5));
    CHECK(pop.C_yx(0, 0) == doctest::Approx(1.0));
    CHECK(pop.C_yx(1, 0) == doctest::Approx(2.0));
    CHECK(pop.C_xx(0, 0) == doctest::Approx(5.25));
    TrueModel bent = model;
    bent.g = Nonlinearity::tanh(1.0);
    CHECK_THROWS_AS(linear_population_moments(prior, bent), InvalidInput);
}

TEST_CASE("prefix nesting holds for every draw length") {
    const auto prior = paper_prior(30);
    const TrueModel model{random_H(28, 30, Seed(21)), Vector::Constant(28, 0.1), 0.3, Nonlinearity::tanh(2.0)};
    const auto full = sample_pairs(prior, model, 300, Seed(22));
    for (std::size_t n = 1; n <= 300; n += 7) {
        const auto head = sample_pairs(prior, model, n, Seed(22));
        const auto rows = static_cast<Eigen::Index>(n);
        CHECK(head.xs() == full.xs().topRows(rows));
        CHECK(head.ys() == full.ys().topRows(rows));
    }
}
