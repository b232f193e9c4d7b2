#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "core/strategies.hpp"

using namespace mis;

namespace {

// Literal nested-loop interpreter of the surprise-reactive sampling loop,
// structured like the pseudocode (outer explore loop, inner verification
// loop, post-loop acceptance) rather than as an event machine. Records the
// accepted count and exploit flag after every draw plus per-frame totals.
struct Trace {
    std::vector<int> accepted;
    std::vector<char> exploiting;
    std::vector<int> frame_totals;
};

Trace reference_sr(const std::vector<char>& s, int budget, int t) {
    Trace tr;
    int accepted = 0;
    std::size_t i = 0;
    auto rec = [&](bool ex) {
        tr.accepted.push_back(accepted);
        tr.exploiting.push_back(ex ? 1 : 0);
    };
    while (i < s.size()) {
        std::size_t stop = std::min(s.size(), i + static_cast<std::size_t>(budget));
        while (i < stop) {
            bool sur = s[i++] != 0;
            if (!sur) {
                accepted += 1;
                rec(false);
                continue;
            }
            int pending = 1;  // the anchor
            rec(true);
            int j = 0;
            while (i < stop) {
                bool v = s[i++] != 0;
                if (!v) {
                    accepted += 1;  // calm verification point is kept
                    pending = 0;
                    rec(false);
                    break;
                }
                pending += 1;
                j += 1;
                if (j >= t) {
                    accepted += pending;
                    pending = 0;
                    rec(false);
                    break;
                }
                rec(true);
            }
            if (pending > 0) accepted += pending;  // budget ran out mid-run
        }
        tr.frame_totals.push_back(accepted);
    }
    return tr;
}

Trace drive_core(const std::vector<char>& s, int budget, int t) {
    SrCore core;
    core.t = t;
    Trace tr;
    int accepted = 0;
    int pending = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t stop = std::min(s.size(), i + static_cast<std::size_t>(budget));
        while (i < stop) {
            switch (core.on_sample(s[i++] != 0)) {
                case SrAction::accept_observation: accepted += 1; break;
                case SrAction::open_pending: pending = 1; break;
                case SrAction::grow_pending: pending += 1; break;
                case SrAction::discard_pending_keep_observation:
                    pending = 0;
                    accepted += 1;
                    break;
                case SrAction::accept_pending:
                    accepted += pending + 1;
                    pending = 0;
                    break;
            }
            tr.accepted.push_back(accepted);
            tr.exploiting.push_back(core.exploiting ? 1 : 0);
        }
        if (core.frame_end_accepts()) {
            accepted += pending;
            pending = 0;
        }
        tr.frame_totals.push_back(accepted);
    }
    return tr;
}

GridSpec default_grid() { return GridSpec{50, 50, 0.02}; }

// Ten spread-out seed cells with alternating +-1 values: target mean 0,
// sample variance exactly 1, which pins the auto signal variance.
std::vector<Observation> pm1_seeds(const GridSpec& g) {
    const int coords[10][2] = {{5, 5},   {45, 5},  {5, 45},  {45, 45}, {25, 25},
                               {15, 35}, {35, 15}, {10, 20}, {40, 30}, {20, 10}};
    std::vector<Observation> out;
    for (int i = 0; i < 10; ++i) {
        Observation o;
        o.cell = g.index_of(coords[i][0], coords[i][1]);
        o.x = g.px(o.cell);
        o.y = g.py(o.cell);
        o.value = (i % 2 == 0) ? 1.0 : -1.0;
        out.push_back(o);
    }
    return out;
}

void fill_field(PollutionField& f, double v) {
    for (double& u : f.u) u = v;
}

StrategyConfig sr_cfg(double epsilon, int t, double noise = 0.25) {
    StrategyConfig cfg;
    cfg.kind = "sr_shannon";
    cfg.sr_epsilon = epsilon;
    cfg.sr_t = t;
    cfg.gp_noise = noise;
    cfg.gp_length_scale = 0.001;  // sub-cell: cells decouple, predictions sit at the data mean
    return cfg;
}

}  // namespace

TEST_SUITE("sampling_strategies") {

TEST_CASE("farthest point selection") {
    // Line of 11 cells, centers 0.5 .. 10.5; one observation at the left end.
    GridSpec line{11, 1, 1.0};
    CHECK(space_filling_next({{0.5, 0.5}}, line) == 10);
    // Nothing observed yet: lowest index wins the all-infinite tie.
    CHECK(space_filling_next({}, line) == 0);

    // 5x5 grid, observation at the lower-left cell center: opposite corner.
    GridSpec five{5, 5, 1.0};
    CHECK(space_filling_next({{0.5, 0.5}}, five) == five.index_of(4, 4));
    // Observation dead center: all four corners tie, lowest index wins.
    CHECK(space_filling_next({{2.5, 2.5}}, five) == 0);

    // Cross-check against an exhaustive scan on random configurations.
    Rng rng(404);
    for (int trial = 0; trial < 50; ++trial) {
        GridSpec g{8, 8, 0.125};
        std::vector<std::pair<double, double>> obs;
        int n = static_cast<int>(rng.uniform_int(1, 6));
        for (int i = 0; i < n; ++i) obs.emplace_back(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0));
        int best = -1;
        double best_d = -1.0;
        for (int g2 = 0; g2 < g.cells(); ++g2) {
            double nearest = 1e300;
            for (auto& [ox, oy] : obs) {
                nearest = std::min(nearest, std::hypot(g.px(g2) - ox, g.py(g2) - oy));
            }
            if (nearest > best_d) {
                best_d = nearest;
                best = g2;
            }
        }
        CHECK(space_filling_next(obs, g) == best);
    }
}

TEST_CASE("surprise-reactive control flow matches the loop interpreter") {
    Rng rng(1717);
    for (int trial = 0; trial < 1000; ++trial) {
        int budget = static_cast<int>(rng.uniform_int(1, 25));
        int t = static_cast<int>(rng.uniform_int(1, 5));
        double p = rng.uniform(0.05, 0.95);
        std::vector<char> s(static_cast<std::size_t>(3 * budget));
        for (char& c : s) c = rng.bernoulli(p) ? 1 : 0;

        Trace ref = reference_sr(s, budget, t);
        Trace got = drive_core(s, budget, t);
        REQUIRE(ref.accepted.size() == got.accepted.size());
        REQUIRE(ref.frame_totals.size() == got.frame_totals.size());
        for (std::size_t i = 0; i < ref.accepted.size(); ++i) {
            CHECK(ref.accepted[i] == got.accepted[i]);
            CHECK(ref.exploiting[i] == got.exploiting[i]);
        }
        for (std::size_t i = 0; i < ref.frame_totals.size(); ++i) {
            CHECK(ref.frame_totals[i] == got.frame_totals[i]);
        }
    }
}

TEST_CASE("sr explore accepts calm observations at the space-filling pick") {
    GridSpec g = default_grid();
    auto strat = make_strategy(sr_cfg(0.04, 3), g);
    strat->seed(pm1_seeds(g));
    PollutionField field(50, 50);
    fill_field(field, 0.0);

    Rng rng(11);
    std::set<int> cells;
    strat->begin_frame();
    for (int i = 0; i < 10; ++i) {
        // The pick must agree with the direct farthest-point rule on the
        // current accepted set.
        std::vector<std::pair<double, double>> pts;
        for (const Observation& o : strat->buffer().items()) pts.emplace_back(o.x, o.y);
        int expect = space_filling_next(pts, g);
        Observation o = strat->sample_once(field, rng);
        CHECK(o.cell == expect);
        cells.insert(o.cell);
        CHECK(strat->buffer().size() == 11 + static_cast<std::size_t>(i));
    }
    CHECK(cells.size() == 10);  // never revisits while exploring calm terrain
    strat->end_frame();
    CHECK(strat->buffer().size() == 20);
}

TEST_CASE("sr discards a pending run when verification comes back calm") {
    GridSpec g = default_grid();
    // Ball radius under half a cell: verification always re-draws the anchor.
    auto strat = make_strategy(sr_cfg(0.009, 10), g);
    auto seeds = pm1_seeds(g);
    strat->seed(seeds);

    PollutionField field(50, 50);
    fill_field(field, 0.0);
    std::vector<std::pair<double, double>> pts;
    for (const Observation& o : seeds) pts.emplace_back(o.x, o.y);
    int anchor = space_filling_next(pts, g);
    // Surprising once (residual 2 against predictive sd ~1.1) but calm on
    // the repeat, whose residual shrinks to ~0.36.
    field.at(g.ix(anchor), g.iy(anchor)) = 2.0;

    Rng rng(12);
    strat->begin_frame();
    Observation first = strat->sample_once(field, rng);
    CHECK(first.cell == anchor);
    CHECK(strat->buffer().size() == 10);  // pending held out of the data
    Observation second = strat->sample_once(field, rng);
    CHECK(second.cell == anchor);
    CHECK(strat->buffer().size() == 11);  // verification kept, anchor dropped
    Observation third = strat->sample_once(field, rng);
    CHECK(third.cell != anchor);  // back to exploring
    CHECK(strat->buffer().size() == 12);
    strat->end_frame();
    CHECK(strat->buffer().size() == 12);
}

TEST_CASE("sr accepts the full pending run after t surprising verifications") {
    GridSpec g = default_grid();
    auto strat = make_strategy(sr_cfg(0.009, 2), g);
    auto seeds = pm1_seeds(g);
    strat->seed(seeds);

    PollutionField field(50, 50);
    fill_field(field, 0.0);
    std::vector<std::pair<double, double>> pts;
    for (const Observation& o : seeds) pts.emplace_back(o.x, o.y);
    int anchor = space_filling_next(pts, g);
    // Far enough from the data mean that even repeated draws of the same
    // cell stay surprising through many model updates.
    field.at(g.ix(anchor), g.iy(anchor)) = -60.0;

    Rng rng(13);
    strat->begin_frame();
    strat->sample_once(field, rng);
    CHECK(strat->buffer().size() == 10);  // anchor pending
    strat->sample_once(field, rng);
    CHECK(strat->buffer().size() == 10);  // first verification pending
    strat->sample_once(field, rng);
    CHECK(strat->buffer().size() == 13);  // t-th verification: all three land
    strat->end_frame();
    CHECK(strat->buffer().size() == 13);
}

TEST_CASE("sr accepts a pending run cut off by the frame budget") {
    GridSpec g = default_grid();
    auto strat = make_strategy(sr_cfg(0.009, 10), g);
    auto seeds = pm1_seeds(g);
    strat->seed(seeds);

    PollutionField field(50, 50);
    fill_field(field, 0.0);
    std::vector<std::pair<double, double>> pts;
    for (const Observation& o : seeds) pts.emplace_back(o.x, o.y);
    int anchor = space_filling_next(pts, g);
    field.at(g.ix(anchor), g.iy(anchor)) = -60.0;

    Rng rng(14);
    strat->begin_frame();
    for (int i = 0; i < 3; ++i) {
        strat->sample_once(field, rng);
        CHECK(strat->buffer().size() == 10);  // run still pending
    }
    strat->end_frame();  // budget exhausted: the run is kept
    CHECK(strat->buffer().size() == 13);
}

TEST_CASE("sr knob moves one step and clamps at one") {
    GridSpec g = default_grid();
    auto strat = make_strategy(sr_cfg(0.04, 3), g);
    CHECK(strat->knob() == 3.0);
    strat->adjust(AdjustDirection::more_exploit);
    strat->adjust(AdjustDirection::more_exploit);
    CHECK(strat->knob() == 5.0);
    for (int i = 0; i < 8; ++i) strat->adjust(AdjustDirection::more_explore);
    CHECK(strat->knob() == 1.0);
}

TEST_CASE("representativeness plus entropy score at the limiting etas") {
    GridSpec g{6, 1, 1.0};
    GpModel model(KernelSpec{KernelFamily::matern_2_5, 0.8, 1.0}, 1e-2);
    Eigen::MatrixXd X(2, 2);
    X << 0.5, 0.5, 2.5, 0.5;
    Eigen::VectorXd y(2);
    y << 1.0, -1.0;
    model.fit(X, y);

    std::vector<std::pair<double, double>> unseen{{3.5, 0.5}, {4.5, 0.5}, {5.5, 0.5}};
    // eta = 1: pure predictive entropy.
    CHECK(sce_acquisition(4.5, 0.5, unseen, model, 1.0) ==
          doctest::Approx(predictive_entropy(model.predict(Eigen::RowVector2d(4.5, 0.5))))
              .epsilon(1e-12));
    // eta = 0: pure representativeness, hand-evaluated expectation.
    double rep = (std::exp(-1.0) + std::exp(0.0) + std::exp(-1.0)) / 3.0;
    CHECK(sce_acquisition(4.5, 0.5, unseen, model, 0.0) == doctest::Approx(rep).epsilon(1e-12));
    // Mid eta is the stated blend.
    double h = predictive_entropy(model.predict(Eigen::RowVector2d(4.5, 0.5)));
    CHECK(sce_acquisition(4.5, 0.5, unseen, model, 0.3) ==
          doctest::Approx(0.7 * rep + 0.3 * h).epsilon(1e-12));
}

TEST_CASE("incremental representativeness agrees with direct evaluation across frames") {
    GridSpec g{20, 20, 0.05};
    StrategyConfig cfg;
    cfg.kind = "sce";
    cfg.eta = 0.5;
    cfg.buffer_cap = 30;
    auto strat = make_strategy(cfg, g);

    PollutionField field(20, 20);
    for (int iy = 0; iy < 20; ++iy) {
        for (int ix = 0; ix < 20; ++ix) {
            field.at(ix, iy) = std::sin(0.7 * ix) + std::cos(0.4 * iy);
        }
    }
    std::vector<Observation> seeds;
    for (int i = 0; i < 10; ++i) {
        Observation o;
        o.cell = g.index_of(2 * i, (3 * i) % 20);
        o.x = g.px(o.cell);
        o.y = g.py(o.cell);
        o.value = field.at(g.ix(o.cell), g.iy(o.cell));
        seeds.push_back(o);
    }
    strat->seed(seeds);

    Rng rng(15);
    // Burn three frames so the fourth runs against an evicted, refilled
    // buffer; then replay its picks against the direct acquisition score.
    for (int f = 0; f < 3; ++f) {
        strat->begin_frame();
        for (int b = 0; b < 10; ++b) strat->sample_once(field, rng);
        strat->end_frame();
    }
    CHECK(strat->buffer().size() == 30);

    strat->begin_frame();
    std::multiset<int> live;
    for (const Observation& o : strat->buffer().items()) live.insert(o.cell);
    std::set<int> picked;
    for (int b = 0; b < 10; ++b) {
        int best = -1;
        double best_score = -1e300;
        for (int c = 0; c < g.cells(); ++c) {
            if (picked.count(c) != 0) continue;
            std::vector<std::pair<double, double>> unseen;
            for (int u = 0; u < g.cells(); ++u) {
                if (live.count(u) == 0 && picked.count(u) == 0) {
                    unseen.emplace_back(g.px(u), g.py(u));
                }
            }
            double s = sce_acquisition(g.px(c), g.py(c), unseen, strat->model(), 0.5);
            if (s > best_score) {
                best_score = s;
                best = c;
            }
        }
        Observation o = strat->sample_once(field, rng);
        CHECK(o.cell == best);
        picked.insert(o.cell);
    }
    strat->end_frame();
    CHECK(strat->buffer().size() == 30);
}

TEST_CASE("acquisition strategies take each cell at most once per frame") {
    GridSpec g{10, 10, 0.1};
    for (const char* kind : {"sce", "gsqbc"}) {
        StrategyConfig cfg;
        cfg.kind = kind;
        auto strat = make_strategy(cfg, g);
        PollutionField field(10, 10);
        fill_field(field, 1.0);
        std::vector<Observation> seeds;
        for (int i = 0; i < 4; ++i) {
            Observation o;
            o.cell = g.index_of(3 * i % 10, 7 * i % 10);
            o.x = g.px(o.cell);
            o.y = g.py(o.cell);
            o.value = 1.0;
            seeds.push_back(o);
        }
        strat->seed(seeds);
        Rng rng(16);
        strat->begin_frame();
        std::set<int> cells;
        for (int b = 0; b < 12; ++b) cells.insert(strat->sample_once(field, rng).cell);
        CHECK(cells.size() == 12);
        strat->end_frame();
        CHECK(strat->buffer().size() == 16);
    }
}

TEST_CASE("disagreement and distance-residual terms of the committee score") {
    GpModel a(KernelSpec{KernelFamily::matern_2_5, 0.5, 1.0}, 1e-2);
    GpModel b(KernelSpec{KernelFamily::matern_1_5, 0.5, 1.0}, 1e-2);
    Eigen::MatrixXd X(3, 2);
    X << 0.1, 0.1, 0.5, 0.5, 0.9, 0.2;
    Eigen::VectorXd y(3);
    y << 1.0, 2.0, 0.5;
    a.fit(X, y);
    b.fit(X, y);
    std::vector<Observation> data;
    for (int i = 0; i < 3; ++i) {
        Observation o;
        o.x = X(i, 0);
        o.y = X(i, 1);
        o.value = y(i);
        data.push_back(o);
    }
    std::vector<const GpModel*> committee{&a, &b};

    // Query at an observed input: the zero distance kills the first term.
    CHECK(gsqbc_acquisition(0.5, 0.5, data, committee, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
    // Identical committee members: no disagreement anywhere.
    std::vector<const GpModel*> twins{&a, &a};
    CHECK(gsqbc_acquisition(0.3, 0.7, data, twins, 1.0) == doctest::Approx(0.0).epsilon(1e-12));

    // Full score equals a direct enumeration of both terms.
    double qx = 0.3, qy = 0.7, eta = 0.4;
    double fa = a.predict(Eigen::RowVector2d(qx, qy)).mean;
    double fb = b.predict(Eigen::RowVector2d(qx, qy)).mean;
    double explore = 1e300;
    for (const Observation& o : data) {
        explore = std::min(explore, std::hypot(qx - o.x, qy - o.y) * std::fabs(fa - o.value));
    }
    CHECK(gsqbc_acquisition(qx, qy, data, committee, eta) ==
          doctest::Approx((1.0 - eta) * explore + eta * std::fabs(fa - fb)).epsilon(1e-12));
    CHECK_THROWS_AS(gsqbc_acquisition(0.0, 0.0, data, {&a}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(gsqbc_acquisition(0.0, 0.0, {}, committee, 0.5), std::invalid_argument);
}

TEST_CASE("committee strategy picks agree with the direct score") {
    GridSpec g{20, 20, 0.05};
    StrategyConfig cfg;
    cfg.kind = "gsqbc";
    cfg.eta = 0.5;
    cfg.buffer_cap = 40;
    auto strat = make_strategy(cfg, g);

    PollutionField field(20, 20);
    for (int iy = 0; iy < 20; ++iy) {
        for (int ix = 0; ix < 20; ++ix) {
            field.at(ix, iy) = 2.0 * std::sin(0.5 * ix) * std::cos(0.3 * iy) + 0.1 * ix;
        }
    }
    std::vector<Observation> seeds;
    for (int i = 0; i < 8; ++i) {
        Observation o;
        o.cell = g.index_of((5 * i + 1) % 20, (3 * i + 2) % 20);
        o.x = g.px(o.cell);
        o.y = g.py(o.cell);
        o.value = field.at(g.ix(o.cell), g.iy(o.cell));
        seeds.push_back(o);
    }
    strat->seed(seeds);
    Rng rng(17);
    for (int f = 0; f < 2; ++f) {
        strat->begin_frame();
        for (int b = 0; b < 10; ++b) strat->sample_once(field, rng);
        strat->end_frame();
    }

    // Mirror the committee construction on the same training window.
    double len = 0.1 * std::hypot(20 * 0.05, 20 * 0.05);
    GpModel main_m(KernelSpec{KernelFamily::matern_2_5, len, 0.0}, 1e-2);
    GpModel rough(KernelSpec{KernelFamily::matern_1_5, len, 0.0}, 1e-2);
    GpModel smooth(KernelSpec{KernelFamily::squared_exponential, 0.1, 0.0}, 1e-2);
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    strat->buffer().to_matrices(X, y);
    main_m.fit(X, y);
    rough.fit(X, y);
    smooth.fit(X, y);
    std::vector<const GpModel*> committee{&main_m, &rough, &smooth};
    std::vector<Observation> data(strat->buffer().items().begin(), strat->buffer().items().end());

    int best = -1;
    double best_score = -1e300;
    for (int c = 0; c < g.cells(); ++c) {
        double s = gsqbc_acquisition(g.px(c), g.py(c), data, committee, 0.5);
        if (s > best_score) {
            best_score = s;
            best = c;
        }
    }
    strat->begin_frame();
    CHECK(strat->sample_once(field, rng).cell == best);
}

TEST_CASE("eta knob moves in tenths and clamps at both ends") {
    GridSpec g{10, 10, 0.1};
    StrategyConfig cfg;
    cfg.kind = "sce";
    cfg.eta = 0.95;
    auto strat = make_strategy(cfg, g);
    strat->adjust(AdjustDirection::more_exploit);
    CHECK(strat->knob() == 1.0);
    strat->adjust(AdjustDirection::more_exploit);
    CHECK(strat->knob() == 1.0);

    StrategyConfig cfg2;
    cfg2.kind = "gsqbc";
    cfg2.eta = 0.5;
    auto strat2 = make_strategy(cfg2, g);
    strat2->adjust(AdjustDirection::more_explore);
    CHECK(strat2->knob() == 0.4);
    for (int i = 0; i < 10; ++i) strat2->adjust(AdjustDirection::more_explore);
    CHECK(strat2->knob() == 0.0);
}

TEST_CASE("argmax is unmoved by a constant added to every score") {
    GridSpec g{10, 10, 0.1};
    GpModel model(KernelSpec{KernelFamily::matern_2_5, 0.2, 1.0}, 1e-2);
    Eigen::MatrixXd X(3, 2);
    X << 0.15, 0.15, 0.55, 0.85, 0.75, 0.35;
    Eigen::VectorXd y(3);
    y << 1.0, -0.5, 0.25;
    model.fit(X, y);
    std::vector<std::pair<double, double>> unseen;
    for (int c = 0; c < g.cells(); ++c) unseen.emplace_back(g.px(c), g.py(c));

    int plain = -1, shifted = -1;
    double bp = -1e300, bs = -1e300;
    for (int c = 0; c < g.cells(); ++c) {
        double s = sce_acquisition(g.px(c), g.py(c), unseen, model, 0.5);
        if (s > bp) {
            bp = s;
            plain = c;
        }
        if (s + 5.0 > bs) {
            bs = s + 5.0;
            shifted = c;
        }
    }
    CHECK(plain == shifted);
}

TEST_CASE("cloned strategies evolve independently") {
    GridSpec g = default_grid();
    auto strat = make_strategy(sr_cfg(0.04, 3), g);
    strat->seed(pm1_seeds(g));
    auto copy = strat->clone();
    CHECK(copy->buffer().size() == strat->buffer().size());

    PollutionField field(50, 50);
    fill_field(field, 0.0);
    Rng rng(18);
    strat->begin_frame();
    for (int i = 0; i < 5; ++i) strat->sample_once(field, rng);
    strat->end_frame();
    CHECK(strat->buffer().size() == 15);
    CHECK(copy->buffer().size() == 10);
    copy->adjust(AdjustDirection::more_exploit);
    CHECK(copy->knob() == 4.0);
    CHECK(strat->knob() == 3.0);
}

TEST_CASE("unknown strategy kinds are rejected") {
    StrategyConfig cfg;
    cfg.kind = "thompson";
    CHECK_THROWS_AS(make_strategy(cfg, default_grid()), std::invalid_argument);
}

}  // TEST_SUITE
