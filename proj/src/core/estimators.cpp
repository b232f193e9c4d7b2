#include "core/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/rng.hpp"

namespace mis {

double mle_entropy(const std::vector<std::int64_t>& counts) {
    std::int64_t total = 0;
    for (std::int64_t c : counts) {
        if (c < 0) throw std::invalid_argument("mle_entropy: negative count");
        total += c;
    }
    if (total == 0) throw std::invalid_argument("mle_entropy: all counts are zero");
    double h = 0.0;
    double n = static_cast<double>(total);
    for (std::int64_t c : counts) {
        if (c == 0) continue;  // 0 ln 0 := 0
        double p = static_cast<double>(c) / n;
        h -= p * std::log(p);
    }
    return h < 0.0 ? 0.0 : h;  // guard against -0.0 and rounding dust
}

EntropyDecomposition mle_mutual_information(const JointTable& table) {
    if (table.total() < 1) {
        throw std::invalid_argument("mle_mutual_information: empty table");
    }
    EntropyDecomposition d;
    d.h_x = mle_entropy(table.x_marginal());
    d.h_y = mle_entropy(table.y_marginal());
    d.h_xy = mle_entropy(table.joint());
    d.mi = d.h_x + d.h_y - d.h_xy;
    if (d.mi < 0.0) {
        if (d.mi < -1e-12) {
            throw std::logic_error("mle_mutual_information: mi below rounding floor");
        }
        d.mi = 0.0;
    }
    return d;
}

namespace {

// Maps raw pair values onto dense indices and computes the plug-in MI of the
// first `prefix` pairs. Categories are indexed by sorted unique value so the
// result does not depend on input order.
struct PooledPairs {
    std::vector<int> x_idx;
    std::vector<int> y_idx;
    int nx;
    int ny;

    explicit PooledPairs(const std::vector<std::pair<int, int>>& pairs) {
        std::vector<int> xs;
        std::vector<int> ys;
        xs.reserve(pairs.size());
        ys.reserve(pairs.size());
        for (const auto& p : pairs) {
            xs.push_back(p.first);
            ys.push_back(p.second);
        }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
        nx = static_cast<int>(xs.size());
        ny = static_cast<int>(ys.size());
        x_idx.reserve(pairs.size());
        y_idx.reserve(pairs.size());
        for (const auto& p : pairs) {
            x_idx.push_back(static_cast<int>(
                std::lower_bound(xs.begin(), xs.end(), p.first) - xs.begin()));
            y_idx.push_back(static_cast<int>(
                std::lower_bound(ys.begin(), ys.end(), p.second) - ys.begin()));
        }
    }

    double mi_of(const std::vector<std::size_t>& order, std::size_t prefix) const {
        JointTable t(nx, ny);
        for (std::size_t i = 0; i < prefix; ++i) {
            t.add(x_idx[order[i]], y_idx[order[i]]);
        }
        return mle_mutual_information(t).mi;
    }
};

}  // namespace

double permutation_test(const std::vector<std::pair<int, int>>& old_window,
                        const std::vector<std::pair<int, int>>& new_window,
                        const PermutationConfig& cfg) {
    if (old_window.empty() || new_window.empty()) {
        throw std::invalid_argument("permutation_test: windows must be nonempty");
    }
    if (cfg.shuffle_count < 1) {
        throw std::invalid_argument("permutation_test: shuffle_count must be >= 1");
    }

    std::vector<std::pair<int, int>> pooled = old_window;
    pooled.insert(pooled.end(), new_window.begin(), new_window.end());
    PooledPairs pp(pooled);

    std::vector<std::size_t> order(pooled.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    // The pooled MI is permutation invariant, so the change statistic only
    // needs the prefix MI of each reshuffle.
    double mi_all = pp.mi_of(order, pooled.size());
    double observed = std::fabs(mi_all - pp.mi_of(order, old_window.size()));

    Rng rng(cfg.rng_seed);
    int exceed = 0;
    for (int b = 0; b < cfg.shuffle_count; ++b) {
        rng.shuffle(order);
        double shuffled = std::fabs(mi_all - pp.mi_of(order, old_window.size()));
        if (observed > shuffled) ++exceed;
    }
    return static_cast<double>(exceed) / cfg.shuffle_count;
}

double variance_test_bound(int n, int m, double z_alpha) {
    if (n < 1 || m < 1) {
        throw std::invalid_argument("variance_test_bound: n and m must be >= 1");
    }
    double lnm = std::log(static_cast<double>(m + n));
    double lnn = std::log(static_cast<double>(n));
    return z_alpha * std::sqrt(lnm * lnm / (m + n) + lnn * lnn / n);
}

double std_bound(int n) {
    if (n < 2) throw std::invalid_argument("std_bound: n must be >= 2");
    return std::log(static_cast<double>(n)) / std::sqrt(static_cast<double>(n));
}

}  // namespace mis
