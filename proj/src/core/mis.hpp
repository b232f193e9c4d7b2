#pragma once

#include "core/estimators.hpp"
#include "core/rng.hpp"
#include "core/table.hpp"

namespace mis {

// Which expectation term the bound uses. With auto_select the oversampled
// form is chosen once n is large relative to the category space.
enum class Regime { undersampled, oversampled, auto_select };

enum class Violation { none, below, above };

enum class Dominant { none, input_entropy, output_entropy, conditional_entropy };

enum class ReactionKind { none, sampling_adjust_exploit, sampling_adjust_explore, fork };

enum class CoinOutcome { not_tossed, adjust, fork };

struct MisConfig {
    double rho = 0.1;
    Regime regime = Regime::auto_select;
    int y_cardinality = 0;             // required by the oversampled center
    int x_cardinality = 0;             // only consulted by auto_select
    double auto_threshold_factor = 5.0;
};

struct MisBounds {
    double lower;
    double upper;
    double center;
    double halfwidth;
};

struct MisReport {
    int n = 0;
    int m = 0;
    double mis = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double delta_h_x = 0.0;
    double delta_h_y = 0.0;
    double delta_h_y_given_x = 0.0;
    Violation violation = Violation::none;
    Dominant dominant = Dominant::none;
    // Signed attribution ratios, already oriented so the largest one names
    // the entropy component driving the change (see classify()).
    double ratio_x = 0.0;
    double ratio_y = 0.0;
    double ratio_y_given_x = 0.0;
};

struct ReactionDecision {
    ReactionKind kind = ReactionKind::none;
    double p_adjust = 0.0;
    CoinOutcome coin_outcome = CoinOutcome::not_tossed;
};

// Change in the plug-in MI estimate between the older window (table over the
// first n pairs) and the full window (same pairs plus m newer ones), with
// the entropy deltas needed for attribution. Bounds and violation are filled
// in separately by classify().
MisReport mis_statistic(const JointTable& old_table_n, const JointTable& combined_table_nm);

// Expected-range band for the MI change after m new samples on top of n.
// center: ln(m+n) - ln(n) undersampled, (|Y|-1)(1/n - 1/(m+n)) oversampled.
// halfwidth: sqrt(2 m ln(2/rho)) * ln(m+n)/(m+n). Requires m >= 2.
MisBounds mis_bounds(int n, int m, const MisConfig& cfg);

// Fills violation, attribution ratios, and the dominant component. The
// conditional-entropy ratio enters negated so that the three ratios rank the
// actual drivers (see the identity note in classify's implementation).
void classify(MisReport& report, const MisBounds& bounds);

// Biased coin between adjusting the sampling knob and forking the process,
// weighted by how much of the change is explained by input entropy. The
// exploit/explore direction of an adjustment comes from the violation side.
ReactionDecision coin_toss(double delta_h_x, double delta_h_y_given_x,
                           Violation violation, Rng& rng);

}  // namespace mis
