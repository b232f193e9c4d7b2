#include "core/surprise.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mis {

namespace {
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

void check(const PredictiveGaussian& g, const char* who) {
    if (!(g.variance > 0.0) || !std::isfinite(g.variance) || !std::isfinite(g.mean)) {
        throw std::invalid_argument(std::string(who) + ": invalid predictive Gaussian");
    }
}
}  // namespace

double shannon_surprise(const PredictiveGaussian& pred, double y) {
    check(pred, "shannon_surprise");
    double r = y - pred.mean;
    return 0.5 * std::log(kTwoPi * pred.variance) + r * r / (2.0 * pred.variance);
}

double residual_surprise(const std::vector<double>& dist, int outcome) {
    if (dist.empty()) throw std::invalid_argument("residual_surprise: empty distribution");
    if (outcome < 0 || outcome >= static_cast<int>(dist.size())) {
        throw std::invalid_argument("residual_surprise: outcome out of range");
    }
    double sum = 0.0;
    double best = 0.0;
    for (double p : dist) {
        if (p < 0.0) throw std::invalid_argument("residual_surprise: negative probability");
        sum += p;
        if (p > best) best = p;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("residual_surprise: distribution not normalized");
    }
    double po = dist[static_cast<std::size_t>(outcome)];
    if (po == 0.0) return std::numeric_limits<double>::infinity();
    return std::log(best) - std::log(po);
}

double postdictive_surprise(const PredictiveGaussian& prior_pred,
                            const PredictiveGaussian& post_pred) {
    check(prior_pred, "postdictive_surprise");
    check(post_pred, "postdictive_surprise");
    // Closed-form Gaussian KL(post || prior).
    double s1 = prior_pred.variance;
    double s2 = post_pred.variance;
    double dm = post_pred.mean - prior_pred.mean;
    double kl = 0.5 * std::log(s1 / s2) + (s2 + dm * dm) / (2.0 * s1) - 0.5;
    return kl < 0.0 ? 0.0 : kl;  // clamp rounding dust on near-equal inputs
}

}  // namespace mis
