#pragma once

#include <cstdint>
#include <vector>

namespace mis {

// Fixed equal-width binning over [lo, hi). The bin edges are frozen when the
// discretizer is created; later out-of-range values clamp into the edge bins
// so that entropy estimates taken before and after new data stay comparable.
class Discretizer {
public:
    Discretizer(double lo, double hi, int bin_count);

    int bin_of(double value) const;

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int bin_count() const { return bins_; }

private:
    double lo_;
    double hi_;
    double width_;
    int bins_;
};

// Dense joint count table over categorical (x, y). Marginals are computed on
// demand and memoized; any mutation invalidates the cache.
class JointTable {
public:
    JointTable(int x_cardinality, int y_cardinality);

    void add(int x, int y, std::int64_t count = 1);

    std::int64_t at(int x, int y) const;
    std::int64_t total() const { return total_; }
    int x_cardinality() const { return nx_; }
    int y_cardinality() const { return ny_; }

    const std::vector<std::int64_t>& joint() const { return counts_; }
    const std::vector<std::int64_t>& x_marginal() const;
    const std::vector<std::int64_t>& y_marginal() const;

    // True if every cell of other is <= the matching cell here.
    bool contains(const JointTable& other) const;

    JointTable transposed() const;

private:
    int nx_;
    int ny_;
    std::vector<std::int64_t> counts_;
    std::int64_t total_ = 0;

    mutable bool marginals_valid_ = false;
    mutable std::vector<std::int64_t> row_;
    mutable std::vector<std::int64_t> col_;

    void refresh_marginals() const;
};

}  // namespace mis
