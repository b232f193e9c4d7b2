#pragma once

#include <Eigen/Dense>

#include "core/surprise.hpp"

namespace mis {

enum class KernelFamily { matern_2_5, matern_1_5, squared_exponential };

struct KernelSpec {
    KernelFamily family = KernelFamily::matern_2_5;
    double length_scale = 1.0;
    // signal_variance <= 0 means "use the sample variance of the targets",
    // resolved at each full fit and then held fixed until the next one.
    double signal_variance = 1.0;
};

double kernel_eval(const KernelSpec& k, double signal_variance, double r);

// Exact Gaussian process regression with a zero mean function applied to
// mean-centered targets. Small and deliberately plain: dense Cholesky, no
// hyperparameter search, capacity for a few hundred points.
class GpModel {
public:
    GpModel(KernelSpec kernel, double noise_variance);

    // Full refit. X is n x d (d = 1 or 2), y length n.
    void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

    // Incremental refit with one appended observation via a bordered
    // Cholesky row. Produces the same posterior as a full fit on the
    // extended data (up to rounding), at O(n^2) instead of O(n^3).
    void add_point(const Eigen::RowVectorXd& x, double y);

    PredictiveGaussian predict(const Eigen::RowVectorXd& x) const;

    // Batched prediction over query rows. var may be null when only means
    // are needed; the triangular solve it requires is the expensive part.
    void predict_batch(const Eigen::MatrixXd& Xq, Eigen::VectorXd& mean,
                       Eigen::VectorXd* var) const;

    bool fitted() const { return n_ > 0; }
    int size() const { return n_; }
    double noise_variance() const { return noise_; }
    double effective_signal_variance() const { return sigma2_; }
    const KernelSpec& kernel() const { return spec_; }

private:
    KernelSpec spec_;
    double noise_;
    double sigma2_ = 0.0;      // resolved signal variance
    double diag_boost_ = 0.0;  // noise + jitter actually used on the diagonal
    int n_ = 0;

    Eigen::MatrixXd X_;     // capacity rows, first n_ valid
    Eigen::VectorXd y_;
    Eigen::MatrixXd L_;     // lower Cholesky factor of K + diag_boost I
    Eigen::VectorXd alpha_; // (K + diag_boost I)^{-1} (y - y_mean)
    double y_mean_ = 0.0;

    void ensure_capacity(int rows, int dim);
    void solve_alpha();
    double kv(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) const;
};

// Differential entropy of a Gaussian predictive distribution, in nats.
double predictive_entropy(const PredictiveGaussian& pred);

}  // namespace mis
