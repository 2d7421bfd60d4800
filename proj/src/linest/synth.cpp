#include "linest/synth.hpp"

#include "linest/errors.hpp"

#include <cmath>
#include <sstream>

namespace linest {

GaussianPrior::GaussianPrior(Vector mu_y, Matrix c_yy) : mu_y_(std::move(mu_y)), c_yy_(std::move(c_yy)) {
    if (mu_y_.size() == 0) {
        throw InvalidInput("prior: N_y must be at least 1");
    }
    if (c_yy_.rows() != mu_y_.size() || c_yy_.cols() != mu_y_.size()) {
        throw InvalidInput("prior: C_yy must be " + std::to_string(mu_y_.size()) + "x" +
                           std::to_string(mu_y_.size()) + " to match mu_y");
    }
    if (!mu_y_.allFinite() || !c_yy_.allFinite()) {
        throw InvalidInput("prior: entries must be finite");
    }
    if (relative_asymmetry(c_yy_) > kAsymmetryTolerance) {
        throw InvalidInput("prior: C_yy is not symmetric");
    }
    c_yy_ = 0.5 * (c_yy_ + c_yy_.transpose());
    Eigen::LLT<Matrix> llt(c_yy_);
    if (llt.info() != Eigen::Success) {
        throw InvalidInput("prior: C_yy is not positive definite");
    }
    chol_ = llt.matrixL();
}

void Nonlinearity::apply(Eigen::Ref<Vector> u) const {
    switch (kind) {
        case Kind::Linear:
            return;
        case Kind::Tanh:
            for (auto& v : u) v = parameter * std::tanh(v / parameter);
            return;
        case Kind::Cubic:
            for (auto& v : u) v = v + parameter * v * v * v;
            return;
    }
}

std::string to_string(const Nonlinearity& g) {
    std::ostringstream os;
    switch (g.kind) {
        case Nonlinearity::Kind::Linear: return "linear";
        case Nonlinearity::Kind::Tanh: os << "tanh(" << g.parameter << ")"; break;
        case Nonlinearity::Kind::Cubic: os << "cubic(" << g.parameter << ")"; break;
    }
    return os.str();
}

namespace {

void fill_standard_normal(Eigen::Ref<Vector> out, std::mt19937_64& engine) {
    std::normal_distribution<double> normal;
    for (auto& v : out) v = normal(engine);
}

void check_model(const GaussianPrior& prior, const TrueModel& model) {
    if (model.ny() != prior.ny()) {
        throw InvalidInput("model: H has " + std::to_string(model.ny()) + " columns but prior N_y = " +
                           std::to_string(prior.ny()));
    }
    if (model.nx() == 0) throw InvalidInput("model: N_x must be at least 1");
    if (static_cast<std::size_t>(model.mu_w.size()) != model.nx()) {
        throw InvalidInput("model: mu_w has " + std::to_string(model.mu_w.size()) + " entries but N_x = " +
                           std::to_string(model.nx()));
    }
    if (!(model.sigma2 >= 0.0) || !std::isfinite(model.sigma2)) {
        throw InvalidInput("model: sigma2 must be finite and nonnegative");
    }
    if (!model.H.allFinite() || !model.mu_w.allFinite()) {
        throw InvalidInput("model: H and mu_w must be finite");
    }
    if (model.g.kind == Nonlinearity::Kind::Tanh && !(model.g.parameter > 0.0)) {
        throw InvalidInput("model: tanh scale must be positive");
    }
}

}  // namespace

Matrix sample_targets(const GaussianPrior& prior, std::size_t n, Seed seed) {
    if (n == 0) throw InvalidInput("sample_targets: n must be at least 1");
    const auto ny = static_cast<Eigen::Index>(prior.ny());
    Matrix out(static_cast<Eigen::Index>(n), ny);
    auto engine = seed.engine();
    Vector z(ny);
    for (Eigen::Index t = 0; t < out.rows(); ++t) {
        fill_standard_normal(z, engine);
        out.row(t) = (prior.mu_y() + prior.cholesky_factor() * z).transpose();
    }
    return out;
}

Dataset sample_pairs(const GaussianPrior& prior, const TrueModel& model, std::size_t n, Seed seed) {
    check_model(prior, model);
    Matrix ys = sample_targets(prior, n, seed.derive(0));

    const auto nx = static_cast<Eigen::Index>(model.nx());
    Matrix xs(static_cast<Eigen::Index>(n), nx);
    auto engine = seed.derive(1).engine();
    const double sigma = std::sqrt(model.sigma2);
    Vector u(nx);
    Vector z(nx);
    for (Eigen::Index t = 0; t < xs.rows(); ++t) {
        u.noalias() = model.H * ys.row(t).transpose();
        model.g.apply(u);
        fill_standard_normal(z, engine);
        xs.row(t) = (u + model.mu_w + sigma * z).transpose();
    }
    return Dataset(std::move(xs), std::move(ys));
}

GaussianPrior paper_prior(std::size_t ny) {
    if (ny == 0) throw InvalidInput("paper_prior: N_y must be at least 1");
    const auto n = static_cast<Eigen::Index>(ny);
    Matrix c(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            c(i, j) = std::exp(-std::abs(static_cast<double>(i - j)) / 5.0);
        }
    }
    return GaussianPrior(Vector::Zero(n), std::move(c));
}

Matrix random_H(std::size_t nx, std::size_t ny, Seed seed) {
    if (nx == 0 || ny == 0) throw InvalidInput("random_H: dimensions must be at least 1");
    Matrix h(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(ny));
    auto engine = seed.engine();
    std::normal_distribution<double> normal;
    // Row-major fill so the draw order does not depend on Eigen's storage order.
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        for (Eigen::Index j = 0; j < h.cols(); ++j) h(i, j) = normal(engine);
    }
    return h;
}

PopulationMoments linear_population_moments(const GaussianPrior& prior, const TrueModel& model) {
    check_model(prior, model);
    if (!model.g.is_linear()) {
        throw InvalidInput("linear_population_moments: model is not linear");
    }
    PopulationMoments out;
    out.mu_y = prior.mu_y();
    out.mu_x = model.H * prior.mu_y() + model.mu_w;
    out.C_yx = prior.C_yy() * model.H.transpose();
    out.C_xx = model.H * out.C_yx;
    out.C_xx = 0.5 * (out.C_xx + out.C_xx.transpose());
    out.C_xx.diagonal().array() += model.sigma2;
    return out;
}

PopulationMoments empirical_population_moments(const Dataset& data) {
    auto m = compute_moments(data);
    return {std::move(m.x_bar), std::move(m.y_bar), std::move(m.C_yx), std::move(m.C_xx)};
}

}  // namespace linest
