#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core/table.hpp"

namespace mis {

struct EntropyDecomposition {
    double h_x;
    double h_y;
    double h_xy;
    double mi;
};

struct PermutationConfig {
    int shuffle_count;
    std::uint64_t rng_seed;
};

// Plug-in entropy -sum p ln p over empirical frequencies, in nats, with the
// 0 ln 0 := 0 convention. Rejects an all-zero count vector.
double mle_entropy(const std::vector<std::int64_t>& counts);

// Plug-in mutual information I = H(x) + H(y) - H(x,y) from a joint table.
// Tiny negative mi from rounding (>= -1e-12) is clamped to zero.
EntropyDecomposition mle_mutual_information(const JointTable& table);

// Permutation test on the change in mutual information between an older and
// a newer window of (x, y) pairs. The pooled pairs are reshuffled B times and
// reassigned to windows of the original sizes; the statistic is the absolute
// change in the plug-in MI estimate when the newer window is appended.
// Returns p = (1/B) * #( |dI_observed| > |dI_shuffled| ), strict inequality.
double permutation_test(const std::vector<std::pair<int, int>>& old_window,
                        const std::vector<std::pair<int, int>>& new_window,
                        const PermutationConfig& cfg);

// z_alpha * sqrt(ln^2(m+n)/(m+n) + ln^2(n)/n), the two-window variance test
// threshold the change statistic is compared against.
double variance_test_bound(int n, int m, double z_alpha);

// ln(n)/sqrt(n), the analytic cap on the standard deviation of the plug-in
// MI estimate at sample size n. Requires n >= 2.
double std_bound(int n);

}  // namespace mis
