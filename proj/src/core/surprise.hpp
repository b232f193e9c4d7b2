#pragma once

#include <vector>

namespace mis {

struct PredictiveGaussian {
    double mean;
    double variance;  // must be > 0
};

struct SurpriseThresholds {
    double shannon = 1.3;
    double postdictive = 0.5;
};

// Negative log density of y under the predictive Gaussian, in nats.
double shannon_surprise(const PredictiveGaussian& pred, double y);

// Gap between the best achievable and the observed log probability over a
// finite categorical distribution: max_i ln p_i - ln p(outcome). Returns
// +infinity for a zero-probability outcome.
double residual_surprise(const std::vector<double>& dist, int outcome);

// KL(post || prior) between two Gaussian predictive distributions, the
// surprise carried by a single model update as seen in the output space.
double postdictive_surprise(const PredictiveGaussian& prior_pred,
                            const PredictiveGaussian& post_pred);

}  // namespace mis
