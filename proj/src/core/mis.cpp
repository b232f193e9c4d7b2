#include "core/mis.hpp"

#include <cmath>
#include <stdexcept>

namespace mis {

MisReport mis_statistic(const JointTable& old_table_n, const JointTable& combined_table_nm) {
    if (old_table_n.total() < 1) {
        throw std::invalid_argument("mis_statistic: old table is empty");
    }
    if (combined_table_nm.total() <= old_table_n.total() ||
        !combined_table_nm.contains(old_table_n)) {
        throw std::invalid_argument("mis_statistic: combined table must strictly extend the old one");
    }

    EntropyDecomposition before = mle_mutual_information(old_table_n);
    EntropyDecomposition after = mle_mutual_information(combined_table_nm);

    MisReport r;
    r.n = static_cast<int>(old_table_n.total());
    r.m = static_cast<int>(combined_table_nm.total() - old_table_n.total());
    r.mis = after.mi - before.mi;
    r.delta_h_x = after.h_x - before.h_x;
    r.delta_h_y = after.h_y - before.h_y;
    r.delta_h_y_given_x = (after.h_xy - after.h_x) - (before.h_xy - before.h_x);
    return r;
}

MisBounds mis_bounds(int n, int m, const MisConfig& cfg) {
    if (n < 1) throw std::invalid_argument("mis_bounds: n must be >= 1");
    if (m < 2) throw std::invalid_argument("mis_bounds: m must be >= 2");
    if (!(cfg.rho > 0.0 && cfg.rho < 1.0)) {
        throw std::invalid_argument("mis_bounds: rho must be in (0, 1)");
    }

    Regime regime = cfg.regime;
    if (regime == Regime::auto_select) {
        if (cfg.x_cardinality < 1 || cfg.y_cardinality < 1) {
            throw std::invalid_argument(
                "mis_bounds: auto regime selection needs both cardinalities");
        }
        double threshold = cfg.auto_threshold_factor *
                           static_cast<double>(cfg.x_cardinality) * cfg.y_cardinality;
        regime = (n > threshold) ? Regime::oversampled : Regime::undersampled;
    }

    MisBounds b;
    if (regime == Regime::oversampled) {
        if (cfg.y_cardinality < 1) {
            throw std::invalid_argument("mis_bounds: oversampled center needs y_cardinality");
        }
        b.center = (cfg.y_cardinality - 1) * (1.0 / n - 1.0 / (m + n));
    } else {
        b.center = std::log(static_cast<double>(m + n)) - std::log(static_cast<double>(n));
    }
    b.halfwidth = std::sqrt(2.0 * m * std::log(2.0 / cfg.rho)) *
                  std::log(static_cast<double>(m + n)) / (m + n);
    b.lower = b.center - b.halfwidth;
    b.upper = b.center + b.halfwidth;
    return b;
}

void classify(MisReport& report, const MisBounds& bounds) {
    report.lower = bounds.lower;
    report.upper = bounds.upper;

    if (report.mis < bounds.lower) {
        report.violation = Violation::below;
    } else if (report.mis > bounds.upper) {
        report.violation = Violation::above;
    } else {
        report.violation = Violation::none;
    }

    double mag = std::fabs(report.mis);
    if (mag == 0.0) {
        if (report.violation != Violation::none) {
            // A zero statistic outside the band means the caller fed
            // inconsistent numbers; the ratios below would be undefined.
            throw std::logic_error("classify: zero MIS with a declared violation");
        }
        report.ratio_x = report.ratio_y = report.ratio_y_given_x = 0.0;
        report.dominant = Dominant::none;
        return;
    }

    // The plug-in identity I = H(y) - H(y|x) makes MIS = dH(y) - dH(y|x)
    // exactly, so the raw signed ratios would always rank dH(y) one full
    // unit above dH(y|x) and a conditional-entropy driver could never win.
    // Negating the conditional ratio restores a fair three-way ranking:
    // the two now sum to one and split credit for the change between the
    // output margin and the conditional structure.
    double sign = report.mis > 0.0 ? 1.0 : -1.0;
    report.ratio_x = sign * report.delta_h_x / mag;
    report.ratio_y = sign * report.delta_h_y / mag;
    report.ratio_y_given_x = -sign * report.delta_h_y_given_x / mag;

    if (report.violation == Violation::none) {
        report.dominant = Dominant::none;
        return;
    }

    double rx = report.ratio_x;
    double ry = report.ratio_y;
    double rc = report.ratio_y_given_x;
    double top = std::max(rx, std::max(ry, rc));
    bool x_top = rx == top;
    bool y_top = ry == top;
    bool c_top = rc == top;
    if (y_top) {
        // Any tie that includes the output component resolves to it, which
        // is the conservative no-action outcome.
        report.dominant = Dominant::output_entropy;
    } else if (x_top && c_top) {
        // Exact input/conditional tie: label by the larger entropy move;
        // the adjust-versus-fork choice is settled by the coin either way.
        report.dominant = std::fabs(report.delta_h_x) >= std::fabs(report.delta_h_y_given_x)
                              ? Dominant::input_entropy
                              : Dominant::conditional_entropy;
    } else if (x_top) {
        report.dominant = Dominant::input_entropy;
    } else {
        report.dominant = Dominant::conditional_entropy;
    }
}

ReactionDecision coin_toss(double delta_h_x, double delta_h_y_given_x,
                           Violation violation, Rng& rng) {
    ReactionDecision d;
    double ax = std::fabs(delta_h_x);
    double ac = std::fabs(delta_h_y_given_x);
    if (ax == 0.0 && ac == 0.0) {
        return d;  // degenerate, nothing to attribute
    }
    d.p_adjust = ax / (ax + ac);
    if (rng.bernoulli(d.p_adjust)) {
        d.coin_outcome = CoinOutcome::adjust;
        d.kind = violation == Violation::above ? ReactionKind::sampling_adjust_exploit
                                               : ReactionKind::sampling_adjust_explore;
    } else {
        d.coin_outcome = CoinOutcome::fork;
        d.kind = ReactionKind::fork;
    }
    return d;
}

}  // namespace mis
