#include "core/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double resolve_length(const StrategyConfig& cfg, const GridSpec& grid) {
    if (cfg.gp_length_scale > 0.0) return cfg.gp_length_scale;
    return 0.1 * std::hypot(grid.nx * grid.cell, grid.ny * grid.cell);
}

Eigen::MatrixXd cell_centers(const GridSpec& grid) {
    Eigen::MatrixXd Q(grid.cells(), 2);
    for (int g = 0; g < grid.cells(); ++g) {
        Q(g, 0) = grid.px(g);
        Q(g, 1) = grid.py(g);
    }
    return Q;
}

}  // namespace

std::vector<Observation> RetentionBuffer::evict_to_cap() {
    std::vector<Observation> evicted;
    while (items_.size() > cap_) {
        evicted.push_back(items_.front());
        items_.pop_front();
    }
    return evicted;
}

void RetentionBuffer::to_matrices(Eigen::MatrixXd& X, Eigen::VectorXd& y) const {
    int n = static_cast<int>(items_.size());
    X.resize(n, 2);
    y.resize(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = items_[static_cast<std::size_t>(i)].x;
        X(i, 1) = items_[static_cast<std::size_t>(i)].y;
        y(i) = items_[static_cast<std::size_t>(i)].value;
    }
}

int space_filling_next(const std::vector<std::pair<double, double>>& observed,
                       const GridSpec& grid) {
    if (grid.cells() < 1) throw std::invalid_argument("space_filling_next: empty grid");
    int best = 0;
    double best_d = -1.0;
    for (int g = 0; g < grid.cells(); ++g) {
        double nearest = kInf;
        for (const auto& [ox, oy] : observed) {
            double d = std::hypot(grid.px(g) - ox, grid.py(g) - oy);
            if (d < nearest) nearest = d;
        }
        if (nearest > best_d) {
            best_d = nearest;
            best = g;
        }
    }
    return best;
}

double sce_acquisition(double x, double y, const std::vector<std::pair<double, double>>& unseen,
                       const GpModel& model, double eta) {
    double rep = 0.0;
    if (!unseen.empty()) {
        for (const auto& [ux, uy] : unseen) rep += std::exp(-std::hypot(x - ux, y - uy));
        rep /= static_cast<double>(unseen.size());
    }
    Eigen::RowVector2d q(x, y);
    double h = predictive_entropy(model.predict(q));
    return (1.0 - eta) * rep + eta * h;
}

double gsqbc_acquisition(double x, double y, const std::vector<Observation>& data,
                         const std::vector<const GpModel*>& committee, double eta) {
    if (committee.size() < 2) throw std::invalid_argument("gsqbc_acquisition: committee too small");
    if (data.empty()) throw std::invalid_argument("gsqbc_acquisition: no observed data");
    Eigen::RowVector2d q(x, y);
    std::vector<double> preds;
    preds.reserve(committee.size());
    for (const GpModel* m : committee) preds.push_back(m->predict(q).mean);

    double explore = kInf;
    for (const Observation& o : data) {
        double v = std::hypot(x - o.x, y - o.y) * std::fabs(preds[0] - o.value);
        if (v < explore) explore = v;
    }
    double disagree = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        for (std::size_t j = i + 1; j < preds.size(); ++j) {
            disagree = std::max(disagree, std::fabs(preds[i] - preds[j]));
        }
    }
    return (1.0 - eta) * explore + eta * disagree;
}

SrAction SrCore::on_sample(bool surprising) {
    if (t < 1) throw std::logic_error("SrCore: t must be >= 1");
    if (!exploiting) {
        if (!surprising) return SrAction::accept_observation;
        exploiting = true;
        j = 0;
        return SrAction::open_pending;
    }
    if (!surprising) {
        exploiting = false;
        j = 0;
        return SrAction::discard_pending_keep_observation;
    }
    j += 1;
    if (j >= t) {
        exploiting = false;
        j = 0;
        return SrAction::accept_pending;
    }
    return SrAction::grow_pending;
}

bool SrCore::frame_end_accepts() {
    bool had_pending = exploiting;
    exploiting = false;
    j = 0;
    return had_pending;
}

namespace {

class StrategyBase : public Strategy {
public:
    StrategyBase(const StrategyConfig& cfg, const GridSpec& grid)
        : grid_(grid), buffer_(cfg.buffer_cap), queries_(cell_centers(grid)) {}

    const RetentionBuffer& buffer() const override { return buffer_; }

protected:
    GridSpec grid_;
    RetentionBuffer buffer_;
    Eigen::MatrixXd queries_;  // cell centers, reused for grid predictions

    Observation make_obs(int cell, const PollutionField& field) const {
        Observation o;
        o.cell = cell;
        o.x = grid_.px(cell);
        o.y = grid_.py(cell);
        o.value = observe(field, grid_.ix(cell), grid_.iy(cell));
        return o;
    }

    static void fit_from(GpModel& model, const RetentionBuffer& buf) {
        Eigen::MatrixXd X;
        Eigen::VectorXd y;
        buf.to_matrices(X, y);
        model.fit(X, y);
    }

    void grid_means(const GpModel& model, std::vector<double>& mean) const {
        Eigen::VectorXd mu;
        model.predict_batch(queries_, mu, nullptr);
        mean.assign(mu.data(), mu.data() + mu.size());
    }

    void require_seeded() const {
        if (buffer_.size() == 0) throw std::logic_error("strategy used before seed()");
    }
};

class SrStrategy final : public StrategyBase {
public:
    SrStrategy(const StrategyConfig& cfg, const GridSpec& grid, bool postdictive)
        : StrategyBase(cfg, grid),
          model_(KernelSpec{KernelFamily::matern_2_5, resolve_length(cfg, grid), 0.0},
                 cfg.gp_noise),
          thresholds_(cfg.thresholds), epsilon_(cfg.sr_epsilon), postdictive_(postdictive) {
        if (cfg.sr_t < 1) throw std::invalid_argument("sr: t must be >= 1");
        if (!(epsilon_ > 0.0)) throw std::invalid_argument("sr: epsilon must be > 0");
        core_.t = cfg.sr_t;
        mind_.assign(static_cast<std::size_t>(grid.cells()), kInf);
    }

    const char* name() const override { return postdictive_ ? "sr_postdictive" : "sr_shannon"; }
    double knob() const override { return core_.t; }
    const GpModel& model() const override { return model_; }
    std::unique_ptr<Strategy> clone() const override { return std::make_unique<SrStrategy>(*this); }

    void seed(const std::vector<Observation>& initial) override {
        if (initial.empty()) throw std::invalid_argument("seed: need at least one observation");
        for (const Observation& o : initial) buffer_.push(o);
        settle();
    }

    void begin_frame() override { require_seeded(); }

    Observation sample_once(const PollutionField& field, Rng& rng) override {
        int cell = core_.exploiting ? ball_cell(rng) : argmax_mind();
        Observation o = make_obs(cell, field);
        bool surprising = score_and_absorb(o);
        switch (core_.on_sample(surprising)) {
            case SrAction::accept_observation:
                accept(o);
                break;
            case SrAction::open_pending:
                anchor_ = cell;
                pending_.assign(1, o);
                break;
            case SrAction::grow_pending:
                pending_.push_back(o);
                break;
            case SrAction::discard_pending_keep_observation:
                // The calm verification point is kept; the surprising run it
                // ends is dropped from both data and model.
                pending_.clear();
                fit_from(model_, buffer_);
                model_.add_point(Eigen::RowVector2d(o.x, o.y), o.value);
                accept(o);
                break;
            case SrAction::accept_pending:
                pending_.push_back(o);
                for (const Observation& p : pending_) accept(p);
                pending_.clear();
                break;
        }
        return o;
    }

    void end_frame() override {
        if (core_.frame_end_accepts()) {
            // Budget ran out mid-verification; the pending run stays.
            for (const Observation& p : pending_) accept(p);
            pending_.clear();
        }
        settle();
    }

    void adjust(AdjustDirection dir) override {
        if (dir == AdjustDirection::more_exploit) core_.t += 1;
        else core_.t = std::max(1, core_.t - 1);
    }

    void predict_grid(std::vector<double>& mean) const override {
        require_seeded();
        grid_means(model_, mean);
    }

private:
    GpModel model_;
    SurpriseThresholds thresholds_;
    double epsilon_;
    bool postdictive_;
    SrCore core_;
    int anchor_ = 0;
    std::vector<Observation> pending_;
    std::vector<double> mind_;  // distance from each cell to the nearest accepted point

    // Model absorbs every drawn sample immediately; a later discard rebuilds
    // it from the buffer. Returns whether the sample crossed the threshold.
    bool score_and_absorb(const Observation& o) {
        Eigen::RowVector2d q(o.x, o.y);
        if (!model_.fitted()) {
            model_.add_point(q, o.value);
            return false;
        }
        PredictiveGaussian before = model_.predict(q);
        bool surprising;
        if (postdictive_) {
            model_.add_point(q, o.value);
            surprising = postdictive_surprise(before, model_.predict(q)) > thresholds_.postdictive;
        } else {
            surprising = shannon_surprise(before, o.value) > thresholds_.shannon;
            model_.add_point(q, o.value);
        }
        return surprising;
    }

    void accept(const Observation& o) {
        buffer_.push(o);
        for (int g = 0; g < grid_.cells(); ++g) {
            double d = std::hypot(grid_.px(g) - o.x, grid_.py(g) - o.y);
            if (d < mind_[static_cast<std::size_t>(g)]) mind_[static_cast<std::size_t>(g)] = d;
        }
    }

    int argmax_mind() const {
        int best = 0;
        double best_d = -1.0;
        for (int g = 0; g < grid_.cells(); ++g) {
            if (mind_[static_cast<std::size_t>(g)] > best_d) {
                best_d = mind_[static_cast<std::size_t>(g)];
                best = g;
            }
        }
        return best;
    }

    int ball_cell(Rng& rng) const {
        int r = static_cast<int>(std::ceil(epsilon_ / grid_.cell)) + 1;
        int ax = grid_.ix(anchor_), ay = grid_.iy(anchor_);
        std::vector<int> cells;
        for (int dy = -r; dy <= r; ++dy) {
            for (int dx = -r; dx <= r; ++dx) {
                int ix = ax + dx, iy = ay + dy;
                if (ix < 0 || ix >= grid_.nx || iy < 0 || iy >= grid_.ny) continue;
                double d = std::hypot(dx * grid_.cell, dy * grid_.cell);
                if (d <= epsilon_ * (1.0 + 1e-12)) cells.push_back(grid_.index_of(ix, iy));
            }
        }
        std::int64_t pick = rng.uniform_int(0, static_cast<std::int64_t>(cells.size()) - 1);
        return cells[static_cast<std::size_t>(pick)];
    }

    // Evictions only take effect here, so mid-frame the model can briefly
    // hold a few points beyond capacity; the refit squares everything up.
    void settle() {
        buffer_.evict_to_cap();
        fit_from(model_, buffer_);
        std::fill(mind_.begin(), mind_.end(), kInf);
        for (const Observation& o : buffer_.items()) {
            for (int g = 0; g < grid_.cells(); ++g) {
                double d = std::hypot(grid_.px(g) - o.x, grid_.py(g) - o.y);
                if (d < mind_[static_cast<std::size_t>(g)]) mind_[static_cast<std::size_t>(g)] = d;
            }
        }
    }
};

class SceStrategy final : public StrategyBase {
public:
    SceStrategy(const StrategyConfig& cfg, const GridSpec& grid)
        : StrategyBase(cfg, grid),
          model_(KernelSpec{KernelFamily::matern_2_5, resolve_length(cfg, grid), 0.0},
                 cfg.gp_noise),
          eta_(cfg.eta) {
        if (eta_ < 0.0 || eta_ > 1.0) throw std::invalid_argument("sce: eta outside [0, 1]");
        int n = grid.cells();
        seen_count_.assign(static_cast<std::size_t>(n), 0);
        picked_.assign(static_cast<std::size_t>(n), 0);
        entropy_.assign(static_cast<std::size_t>(n), 0.0);
        build_exp_table();
        // Every cell starts unseen.
        sum_exp_.assign(static_cast<std::size_t>(n), 0.0);
        for (int g = 0; g < n; ++g) {
            for (int u = 0; u < n; ++u) sum_exp_[static_cast<std::size_t>(g)] += pair_exp(g, u);
        }
        unseen_count_ = n;
    }

    const char* name() const override { return "sce"; }
    double knob() const override { return eta_; }
    const GpModel& model() const override { return model_; }
    std::unique_ptr<Strategy> clone() const override { return std::make_unique<SceStrategy>(*this); }

    void seed(const std::vector<Observation>& initial) override {
        if (initial.empty()) throw std::invalid_argument("seed: need at least one observation");
        for (const Observation& o : initial) {
            buffer_.push(o);
            mark_seen(o.cell);
        }
        settle();
    }

    void begin_frame() override {
        require_seeded();
        std::fill(picked_.begin(), picked_.end(), 0);
        Eigen::VectorXd mu, var;
        model_.predict_batch(queries_, mu, &var);
        for (int g = 0; g < grid_.cells(); ++g) {
            entropy_[static_cast<std::size_t>(g)] =
                predictive_entropy(PredictiveGaussian{mu(g), var(g)});
        }
    }

    Observation sample_once(const PollutionField& field, Rng& rng) override {
        (void)rng;  // the acquisition argmax is deterministic
        int best = -1;
        double best_score = -kInf;
        for (int g = 0; g < grid_.cells(); ++g) {
            if (picked_[static_cast<std::size_t>(g)]) continue;
            double rep = unseen_count_ > 0
                             ? sum_exp_[static_cast<std::size_t>(g)] / unseen_count_
                             : 0.0;
            double score = (1.0 - eta_) * rep + eta_ * entropy_[static_cast<std::size_t>(g)];
            if (score > best_score) {
                best_score = score;
                best = g;
            }
        }
        if (best < 0) throw std::logic_error("sce: no eligible cell left this frame");
        Observation o = make_obs(best, field);
        picked_[static_cast<std::size_t>(best)] = 1;
        mark_seen(best);
        frame_picks_.push_back(o);
        return o;
    }

    void end_frame() override {
        for (const Observation& o : frame_picks_) buffer_.push(o);
        frame_picks_.clear();
        settle();
    }

    void adjust(AdjustDirection dir) override {
        // Snap to the 0.1 lattice so repeated nudges stay exact in logs.
        double next = eta_ + (dir == AdjustDirection::more_exploit ? 0.1 : -0.1);
        eta_ = std::clamp(std::round(next * 10.0) / 10.0, 0.0, 1.0);
    }

    void predict_grid(std::vector<double>& mean) const override {
        require_seeded();
        grid_means(model_, mean);
    }

private:
    GpModel model_;
    double eta_;
    std::vector<double> exp_table_;  // e^{-distance} by (|dix|, |diy|)
    std::vector<double> sum_exp_;    // per cell: sum over unseen cells
    int unseen_count_ = 0;
    std::vector<int> seen_count_;    // live observations per cell (buffer + this frame)
    std::vector<double> entropy_;    // per-frame predictive entropy cache
    std::vector<char> picked_;       // cells already sampled this frame
    std::vector<Observation> frame_picks_;

    void build_exp_table() {
        exp_table_.assign(static_cast<std::size_t>(grid_.nx) * grid_.ny, 0.0);
        for (int dy = 0; dy < grid_.ny; ++dy) {
            for (int dx = 0; dx < grid_.nx; ++dx) {
                double d = std::hypot(dx * grid_.cell, dy * grid_.cell);
                exp_table_[static_cast<std::size_t>(dy) * grid_.nx + dx] = std::exp(-d);
            }
        }
    }

    double pair_exp(int a, int b) const {
        int dx = std::abs(grid_.ix(a) - grid_.ix(b));
        int dy = std::abs(grid_.iy(a) - grid_.iy(b));
        return exp_table_[static_cast<std::size_t>(dy) * grid_.nx + dx];
    }

    void mark_seen(int cell) {
        if (seen_count_[static_cast<std::size_t>(cell)]++ == 0) {
            for (int g = 0; g < grid_.cells(); ++g) {
                sum_exp_[static_cast<std::size_t>(g)] -= pair_exp(g, cell);
            }
            unseen_count_ -= 1;
        }
    }

    void settle() {
        for (const Observation& o : buffer_.evict_to_cap()) {
            if (--seen_count_[static_cast<std::size_t>(o.cell)] == 0) {
                for (int g = 0; g < grid_.cells(); ++g) {
                    sum_exp_[static_cast<std::size_t>(g)] += pair_exp(g, o.cell);
                }
                unseen_count_ += 1;
            }
        }
        fit_from(model_, buffer_);
    }
};

class GsqbcStrategy final : public StrategyBase {
public:
    GsqbcStrategy(const StrategyConfig& cfg, const GridSpec& grid)
        : StrategyBase(cfg, grid),
          main_(KernelSpec{KernelFamily::matern_2_5, resolve_length(cfg, grid), 0.0},
                cfg.gp_noise),
          rough_(KernelSpec{KernelFamily::matern_1_5, resolve_length(cfg, grid), 0.0},
                 cfg.gp_noise),
          smooth_(KernelSpec{KernelFamily::squared_exponential, cfg.sqexp_length_scale, 0.0},
                  cfg.gp_noise),
          eta_(cfg.eta) {
        if (eta_ < 0.0 || eta_ > 1.0) throw std::invalid_argument("gsqbc: eta outside [0, 1]");
        int n = grid.cells();
        min_term_.assign(static_cast<std::size_t>(n), kInf);
        disagreement_.assign(static_cast<std::size_t>(n), 0.0);
        mu0_.assign(static_cast<std::size_t>(n), 0.0);
        picked_.assign(static_cast<std::size_t>(n), 0);
    }

    const char* name() const override { return "gsqbc"; }
    double knob() const override { return eta_; }
    const GpModel& model() const override { return main_; }
    std::unique_ptr<Strategy> clone() const override {
        return std::make_unique<GsqbcStrategy>(*this);
    }

    void seed(const std::vector<Observation>& initial) override {
        if (initial.empty()) throw std::invalid_argument("seed: need at least one observation");
        for (const Observation& o : initial) buffer_.push(o);
        settle();
    }

    void begin_frame() override {
        require_seeded();
        std::fill(picked_.begin(), picked_.end(), 0);
        Eigen::VectorXd m0, m1, m2;
        main_.predict_batch(queries_, m0, nullptr);
        rough_.predict_batch(queries_, m1, nullptr);
        smooth_.predict_batch(queries_, m2, nullptr);
        for (int g = 0; g < grid_.cells(); ++g) {
            mu0_[static_cast<std::size_t>(g)] = m0(g);
            double d01 = std::fabs(m0(g) - m1(g));
            double d02 = std::fabs(m0(g) - m2(g));
            double d12 = std::fabs(m1(g) - m2(g));
            disagreement_[static_cast<std::size_t>(g)] = std::max({d01, d02, d12});
        }
        std::fill(min_term_.begin(), min_term_.end(), kInf);
        for (const Observation& o : buffer_.items()) lower_min_term(o);
    }

    Observation sample_once(const PollutionField& field, Rng& rng) override {
        (void)rng;
        int best = -1;
        double best_score = -kInf;
        for (int g = 0; g < grid_.cells(); ++g) {
            if (picked_[static_cast<std::size_t>(g)]) continue;
            double score = (1.0 - eta_) * min_term_[static_cast<std::size_t>(g)] +
                           eta_ * disagreement_[static_cast<std::size_t>(g)];
            if (score > best_score) {
                best_score = score;
                best = g;
            }
        }
        if (best < 0) throw std::logic_error("gsqbc: no eligible cell left this frame");
        Observation o = make_obs(best, field);
        picked_[static_cast<std::size_t>(best)] = 1;
        lower_min_term(o);
        frame_picks_.push_back(o);
        return o;
    }

    void end_frame() override {
        for (const Observation& o : frame_picks_) buffer_.push(o);
        frame_picks_.clear();
        settle();
    }

    void adjust(AdjustDirection dir) override {
        double next = eta_ + (dir == AdjustDirection::more_exploit ? 0.1 : -0.1);
        eta_ = std::clamp(std::round(next * 10.0) / 10.0, 0.0, 1.0);
    }

    void predict_grid(std::vector<double>& mean) const override {
        require_seeded();
        grid_means(main_, mean);
    }

private:
    GpModel main_, rough_, smooth_;
    double eta_;
    std::vector<double> min_term_;      // per-cell exploration floor, this frame's lead means
    std::vector<double> disagreement_;  // per-frame committee spread
    std::vector<double> mu0_;
    std::vector<char> picked_;
    std::vector<Observation> frame_picks_;

    void lower_min_term(const Observation& o) {
        for (int g = 0; g < grid_.cells(); ++g) {
            double v = std::hypot(grid_.px(g) - o.x, grid_.py(g) - o.y) *
                       std::fabs(mu0_[static_cast<std::size_t>(g)] - o.value);
            if (v < min_term_[static_cast<std::size_t>(g)]) {
                min_term_[static_cast<std::size_t>(g)] = v;
            }
        }
    }

    void settle() {
        buffer_.evict_to_cap();
        Eigen::MatrixXd X;
        Eigen::VectorXd y;
        buffer_.to_matrices(X, y);
        main_.fit(X, y);
        rough_.fit(X, y);
        smooth_.fit(X, y);
    }
};

}  // namespace

std::unique_ptr<Strategy> make_strategy(const StrategyConfig& cfg, const GridSpec& grid) {
    if (cfg.kind == "sr_shannon") return std::make_unique<SrStrategy>(cfg, grid, false);
    if (cfg.kind == "sr_postdictive") return std::make_unique<SrStrategy>(cfg, grid, true);
    if (cfg.kind == "sce") return std::make_unique<SceStrategy>(cfg, grid);
    if (cfg.kind == "gsqbc") return std::make_unique<GsqbcStrategy>(cfg, grid);
    throw std::invalid_argument("make_strategy: unknown kind '" + cfg.kind + "'");
}

}  // namespace mis
