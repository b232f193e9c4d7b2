#include "core/gp.hpp"

#include <cmath>
#include <stdexcept>

namespace mis {

double kernel_eval(const KernelSpec& k, double signal_variance, double r) {
    double l = k.length_scale;
    switch (k.family) {
        case KernelFamily::matern_2_5: {
            double a = std::sqrt(5.0) * r / l;
            return signal_variance * (1.0 + a + a * a / 3.0) * std::exp(-a);
        }
        case KernelFamily::matern_1_5: {
            double a = std::sqrt(3.0) * r / l;
            return signal_variance * (1.0 + a) * std::exp(-a);
        }
        case KernelFamily::squared_exponential: {
            double a = r / l;
            return signal_variance * std::exp(-0.5 * a * a);
        }
    }
    throw std::logic_error("kernel_eval: unknown family");
}

GpModel::GpModel(KernelSpec kernel, double noise_variance)
    : spec_(kernel), noise_(noise_variance) {
    if (!(noise_ > 0.0)) throw std::invalid_argument("GpModel: noise variance must be > 0");
    if (!(spec_.length_scale > 0.0)) {
        throw std::invalid_argument("GpModel: length scale must be > 0");
    }
}

double GpModel::kv(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) const {
    return kernel_eval(spec_, sigma2_, (a - b).norm());
}

void GpModel::ensure_capacity(int rows, int dim) {
    if (X_.rows() >= rows && X_.cols() == dim) return;
    int cap = std::max(rows, static_cast<int>(X_.rows()) * 2);
    if (cap < 16) cap = 16;
    Eigen::MatrixXd X2 = Eigen::MatrixXd::Zero(cap, dim);
    Eigen::VectorXd y2 = Eigen::VectorXd::Zero(cap);
    Eigen::MatrixXd L2 = Eigen::MatrixXd::Zero(cap, cap);
    // fit() bumps n_ before growing, so only rows actually present can move.
    int keep = (X_.cols() == dim) ? std::min(n_, static_cast<int>(X_.rows())) : 0;
    if (keep > 0) {
        X2.topRows(keep) = X_.topRows(keep);
        y2.head(keep) = y_.head(keep);
        L2.topLeftCorner(keep, keep) = L_.topLeftCorner(keep, keep);
    }
    X_ = std::move(X2);
    y_ = std::move(y2);
    L_ = std::move(L2);
}

void GpModel::solve_alpha() {
    Eigen::VectorXd b = y_.head(n_).array() - y_mean_;
    L_.topLeftCorner(n_, n_).triangularView<Eigen::Lower>().solveInPlace(b);
    L_.topLeftCorner(n_, n_).triangularView<Eigen::Lower>().transpose().solveInPlace(b);
    alpha_ = std::move(b);
}

void GpModel::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() != y.size() || X.rows() < 1) {
        throw std::invalid_argument("GpModel::fit: shape mismatch or empty data");
    }
    int n = static_cast<int>(X.rows());
    int dim = static_cast<int>(X.cols());

    y_mean_ = y.mean();
    if (spec_.signal_variance > 0.0) {
        sigma2_ = spec_.signal_variance;
    } else {
        double v = (y.array() - y_mean_).square().sum() / n;
        sigma2_ = v > 1e-8 ? v : 1e-8;
    }

    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i) {
        K(i, i) = sigma2_;
        for (int j = 0; j < i; ++j) {
            double v = kernel_eval(spec_, sigma2_, (X.row(i) - X.row(j)).norm());
            K(i, j) = v;
            K(j, i) = v;
        }
    }

    // Escalate jitter only if the factorization fails; the noise term alone
    // normally keeps the matrix comfortably positive definite.
    double jitter = 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt;
    for (int attempt = 0; attempt <= 5; ++attempt) {
        Eigen::MatrixXd Kb = K;
        Kb.diagonal().array() += noise_ + jitter;
        llt.compute(Kb);
        if (llt.info() == Eigen::Success) {
            diag_boost_ = noise_ + jitter;
            break;
        }
        if (attempt == 5) {
            throw std::runtime_error("GpModel::fit: Cholesky failed at max jitter 1e-6");
        }
        jitter = (jitter == 0.0) ? 1e-10 : jitter * 10.0;
    }

    n_ = n;
    ensure_capacity(n, dim);
    X_.topRows(n) = X;
    y_.head(n) = y;
    L_.topLeftCorner(n, n) = llt.matrixL();
    solve_alpha();
}

void GpModel::add_point(const Eigen::RowVectorXd& x, double y) {
    if (n_ == 0) {
        Eigen::MatrixXd X(1, x.size());
        X.row(0) = x;
        Eigen::VectorXd yv(1);
        yv(0) = y;
        fit(X, yv);
        return;
    }
    if (x.size() != X_.cols()) {
        throw std::invalid_argument("GpModel::add_point: dimension mismatch");
    }

    Eigen::VectorXd k(n_);
    for (int i = 0; i < n_; ++i) k(i) = kv(X_.row(i), x);
    L_.topLeftCorner(n_, n_).triangularView<Eigen::Lower>().solveInPlace(k);
    double d2 = sigma2_ + diag_boost_ - k.squaredNorm();
    if (!(d2 > 0.0)) {
        // Numerically degenerate border (typically an exact duplicate with
        // tiny noise); fall back to a full refit with jitter escalation.
        Eigen::MatrixXd X = X_.topRows(n_);
        Eigen::VectorXd yv = y_.head(n_);
        X.conservativeResize(n_ + 1, Eigen::NoChange);
        yv.conservativeResize(n_ + 1);
        X.row(n_) = x;
        yv(n_) = y;
        fit(X, yv);
        return;
    }

    ensure_capacity(n_ + 1, static_cast<int>(X_.cols()));
    X_.row(n_) = x;
    y_(n_) = y;
    L_.row(n_).head(n_) = k.transpose();
    L_(n_, n_) = std::sqrt(d2);
    n_ += 1;
    // The centering mean moves with the new target, so alpha is re-solved
    // against the shifted right-hand side (two triangular solves, O(n^2)).
    y_mean_ = y_.head(n_).mean();
    solve_alpha();
}

PredictiveGaussian GpModel::predict(const Eigen::RowVectorXd& x) const {
    if (n_ == 0) throw std::logic_error("GpModel::predict: model not fitted");
    Eigen::VectorXd k(n_);
    for (int i = 0; i < n_; ++i) k(i) = kv(X_.row(i), x);
    double mean = y_mean_ + k.dot(alpha_);
    Eigen::VectorXd v = k;
    L_.topLeftCorner(n_, n_).triangularView<Eigen::Lower>().solveInPlace(v);
    double fvar = sigma2_ - v.squaredNorm();
    if (fvar < 0.0) fvar = 0.0;
    return PredictiveGaussian{mean, fvar + noise_};
}

void GpModel::predict_batch(const Eigen::MatrixXd& Xq, Eigen::VectorXd& mean,
                            Eigen::VectorXd* var) const {
    if (n_ == 0) throw std::logic_error("GpModel::predict_batch: model not fitted");
    int q = static_cast<int>(Xq.rows());
    Eigen::MatrixXd K(n_, q);
    for (int j = 0; j < q; ++j) {
        for (int i = 0; i < n_; ++i) {
            K(i, j) = kv(X_.row(i), Xq.row(j));
        }
    }
    mean = (K.transpose() * alpha_).array() + y_mean_;
    if (var != nullptr) {
        L_.topLeftCorner(n_, n_).triangularView<Eigen::Lower>().solveInPlace(K);
        var->resize(q);
        for (int j = 0; j < q; ++j) {
            double fvar = sigma2_ - K.col(j).squaredNorm();
            (*var)(j) = (fvar < 0.0 ? 0.0 : fvar) + noise_;
        }
    }
}

double predictive_entropy(const PredictiveGaussian& pred) {
    if (!(pred.variance > 0.0)) {
        throw std::invalid_argument("predictive_entropy: variance must be > 0");
    }
    constexpr double kTwoPiE = 2.0 * 3.14159265358979323846 * 2.718281828459045235;
    return 0.5 * std::log(kTwoPiE * pred.variance);
}

}  // namespace mis
