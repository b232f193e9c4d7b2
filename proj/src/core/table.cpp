#include "core/table.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mis {

Discretizer::Discretizer(double lo, double hi, int bin_count)
    : lo_(lo), hi_(hi), bins_(bin_count) {
    if (!(lo < hi)) throw std::invalid_argument("Discretizer: lo must be < hi");
    if (bin_count < 1) throw std::invalid_argument("Discretizer: bin_count must be >= 1");
    width_ = (hi - lo) / bin_count;
}

int Discretizer::bin_of(double value) const {
    if (!std::isfinite(value)) {
        throw std::invalid_argument("Discretizer: non-finite value " +
                                    std::to_string(value));
    }
    if (value < lo_) return 0;
    int b = static_cast<int>((value - lo_) / width_);
    if (b >= bins_) return bins_ - 1;  // clamp, including value >= hi
    return b;
}

JointTable::JointTable(int x_cardinality, int y_cardinality)
    : nx_(x_cardinality), ny_(y_cardinality) {
    if (nx_ < 1 || ny_ < 1) {
        throw std::invalid_argument("JointTable: cardinalities must be >= 1");
    }
    counts_.assign(static_cast<std::size_t>(nx_) * ny_, 0);
}

void JointTable::add(int x, int y, std::int64_t count) {
    if (x < 0 || x >= nx_ || y < 0 || y >= ny_) {
        throw std::out_of_range("JointTable::add: category out of range");
    }
    if (count < 0 && counts_[static_cast<std::size_t>(x) * ny_ + y] + count < 0) {
        throw std::invalid_argument("JointTable::add: count would go negative");
    }
    counts_[static_cast<std::size_t>(x) * ny_ + y] += count;
    total_ += count;
    marginals_valid_ = false;
}

std::int64_t JointTable::at(int x, int y) const {
    if (x < 0 || x >= nx_ || y < 0 || y >= ny_) {
        throw std::out_of_range("JointTable::at: category out of range");
    }
    return counts_[static_cast<std::size_t>(x) * ny_ + y];
}

void JointTable::refresh_marginals() const {
    row_.assign(nx_, 0);
    col_.assign(ny_, 0);
    for (int x = 0; x < nx_; ++x) {
        const std::int64_t* base = counts_.data() + static_cast<std::size_t>(x) * ny_;
        for (int y = 0; y < ny_; ++y) {
            row_[x] += base[y];
            col_[y] += base[y];
        }
    }
    marginals_valid_ = true;
}

const std::vector<std::int64_t>& JointTable::x_marginal() const {
    if (!marginals_valid_) refresh_marginals();
    return row_;
}

const std::vector<std::int64_t>& JointTable::y_marginal() const {
    if (!marginals_valid_) refresh_marginals();
    return col_;
}

bool JointTable::contains(const JointTable& other) const {
    if (other.nx_ != nx_ || other.ny_ != ny_) return false;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (other.counts_[i] > counts_[i]) return false;
    }
    return true;
}

JointTable JointTable::transposed() const {
    JointTable t(ny_, nx_);
    for (int x = 0; x < nx_; ++x) {
        for (int y = 0; y < ny_; ++y) {
            std::int64_t c = counts_[static_cast<std::size_t>(x) * ny_ + y];
            if (c != 0) t.add(y, x, c);
        }
    }
    return t;
}

}  // namespace mis
