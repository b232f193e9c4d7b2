#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "core/rng.hpp"
#include "core/surprise.hpp"

using namespace mis;

TEST_SUITE("surprise_measures") {

TEST_CASE("shannon surprise of an exactly predicted point with unit variance") {
    PredictiveGaussian p{3.0, 1.0};
    CHECK(shannon_surprise(p, 3.0) == doctest::Approx(0.9189385).epsilon(1e-6));
}

TEST_CASE("shannon surprise grows with the residual and shrinks with variance at fixed residual ratio") {
    PredictiveGaussian p{0.0, 1.0};
    double prev = shannon_surprise(p, 0.0);
    for (double y : {0.5, 1.0, 2.0, 4.0}) {
        double s = shannon_surprise(p, y);
        CHECK(s > prev);
        prev = s;
    }
    // Same two-sigma miss is more alarming from a confident model.
    PredictiveGaussian tight{0.0, 0.01};
    PredictiveGaussian loose{0.0, 4.0};
    CHECK(shannon_surprise(tight, 2.0 * 0.1) < shannon_surprise(loose, 2.0 * 2.0));
    CHECK(shannon_surprise(tight, 0.25) > shannon_surprise(loose, 0.25));
}

TEST_CASE("shannon surprise rejects a degenerate variance") {
    CHECK_THROWS_AS(shannon_surprise(PredictiveGaussian{0.0, 0.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(shannon_surprise(PredictiveGaussian{0.0, -1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("residual surprise hand values") {
    std::vector<double> uniform{0.25, 0.25, 0.25, 0.25};
    CHECK(residual_surprise(uniform, 2) == doctest::Approx(0.0).epsilon(1e-12));

    std::vector<double> skew{0.9, 0.1};
    CHECK(residual_surprise(skew, 1) == doctest::Approx(std::log(9.0)).epsilon(1e-9));
    CHECK(residual_surprise(skew, 0) == doctest::Approx(0.0).epsilon(1e-12));

    std::vector<double> with_zero{0.5, 0.5, 0.0};
    CHECK(residual_surprise(with_zero, 2) == std::numeric_limits<double>::infinity());
}

TEST_CASE("residual surprise ignores label order") {
    std::vector<double> a{0.7, 0.2, 0.1};
    std::vector<double> b{0.1, 0.2, 0.7};
    CHECK(residual_surprise(a, 1) == doctest::Approx(residual_surprise(b, 1)).epsilon(1e-12));
}

TEST_CASE("residual surprise input validation") {
    CHECK_THROWS_AS(residual_surprise({0.6, 0.6}, 0), std::invalid_argument);
    CHECK_THROWS_AS(residual_surprise({0.5, 0.5}, 2), std::invalid_argument);
    CHECK_THROWS_AS(residual_surprise({}, 0), std::invalid_argument);
}

TEST_CASE("postdictive surprise hand values") {
    // Posterior shifted by one standard deviation: KL = 1/2.
    CHECK(postdictive_surprise(PredictiveGaussian{0.0, 1.0}, PredictiveGaussian{1.0, 1.0}) ==
          doctest::Approx(0.5).epsilon(1e-9));
    // Pure variance inflation.
    CHECK(postdictive_surprise(PredictiveGaussian{0.0, 1.0}, PredictiveGaussian{0.0, 4.0}) ==
          doctest::Approx(std::log(0.5) + 2.0 - 0.5).epsilon(1e-9));
}

TEST_CASE("postdictive surprise is asymmetric in its arguments") {
    PredictiveGaussian narrow{0.0, 1.0};
    PredictiveGaussian wide{0.0, 4.0};
    double inflate = postdictive_surprise(narrow, wide);
    double deflate = postdictive_surprise(wide, narrow);
    CHECK(inflate != doctest::Approx(deflate).epsilon(1e-6));
}

TEST_CASE("postdictive surprise is nonnegative and zero only for an unchanged belief") {
    Rng rng(555);
    for (int i = 0; i < 10000; ++i) {
        PredictiveGaussian prior{rng.normal(0.0, 3.0), std::exp(rng.normal(0.0, 1.0))};
        PredictiveGaussian post{rng.normal(0.0, 3.0), std::exp(rng.normal(0.0, 1.0))};
        double s = postdictive_surprise(prior, post);
        CHECK(s >= 0.0);
    }
    PredictiveGaussian belief{1.7, 0.3};
    CHECK(postdictive_surprise(belief, belief) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("default trigger thresholds") {
    SurpriseThresholds t;
    CHECK(t.shannon == doctest::Approx(1.3));
    CHECK(t.postdictive == doctest::Approx(0.5));
}

}  // TEST_SUITE
