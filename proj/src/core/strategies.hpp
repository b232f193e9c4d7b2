#pragma once

#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "core/gp.hpp"
#include "core/pollution.hpp"
#include "core/rng.hpp"
#include "core/surprise.hpp"

namespace mis {

// Finite candidate set: cell centers of a regular grid embedded in
// [0, nx*cell] x [0, ny*cell]. All sampling distances are in these domain
// units (the PDE itself works in cell units, see pollution.hpp).
struct GridSpec {
    int nx = 50;
    int ny = 50;
    double cell = 0.02;

    int cells() const { return nx * ny; }
    double px(int index) const { return (index % nx + 0.5) * cell; }
    double py(int index) const { return (index / nx + 0.5) * cell; }
    int ix(int index) const { return index % nx; }
    int iy(int index) const { return index / nx; }
    int index_of(int ix_, int iy_) const { return iy_ * nx + ix_; }
};

struct Observation {
    int cell = 0;      // grid index
    double x = 0.0;    // domain coordinates of the cell center
    double y = 0.0;
    double value = 0.0;
};

// FIFO of accepted observations; the model trains on exactly this window
// (plus not-yet-evicted newcomers between evictions). push never evicts so
// a frame can overfill transiently; the owner calls evict_to_cap at frame
// end and refits.
class RetentionBuffer {
public:
    explicit RetentionBuffer(std::size_t cap) : cap_(cap) {}

    void push(const Observation& o) { items_.push_back(o); }
    std::vector<Observation> evict_to_cap();
    const std::deque<Observation>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return cap_; }

    void to_matrices(Eigen::MatrixXd& X, Eigen::VectorXd& y) const;

private:
    std::deque<Observation> items_;
    std::size_t cap_;
};

// Farthest-point rule: argmax over the grid of the distance to the nearest
// observed point, ties to the lowest index. An empty observed set makes
// every candidate equally (infinitely) good, so index 0 wins.
int space_filling_next(const std::vector<std::pair<double, double>>& observed,
                       const GridSpec& grid);

// Representativeness plus predictive entropy:
//   (1 - eta) * mean over unseen x' of exp(-||x - x'||) + eta * H(f(x)).
double sce_acquisition(double x, double y, const std::vector<std::pair<double, double>>& unseen,
                       const GpModel& model, double eta);

// Distance-weighted residual floor plus committee disagreement:
//   (1 - eta) * min over data of ||x - x'|| * |f(x) - y'|
//     + eta * max pairwise |f_i(x) - f_j(x)|.
// f in the first term is the committee's lead model (committee[0]).
double gsqbc_acquisition(double x, double y, const std::vector<Observation>& data,
                         const std::vector<const GpModel*>& committee, double eta);

enum class AdjustDirection { more_exploit, more_explore };

// The surprise-reactive control flow stripped of data and model concerns:
// feed it whether each drawn sample surprised the model and it answers what
// to do with that observation. Keeping it standalone lets tests drive the
// transitions against a literal interpreter of the sampling loop.
enum class SrAction {
    accept_observation,                 // exploring, nothing notable
    open_pending,                       // surprise anchor established
    grow_pending,                       // verification still surprising
    discard_pending_keep_observation,   // verification calm: pending anomalous
    accept_pending                      // t-th consecutive surprise: keep all
};

struct SrCore {
    int t = 3;   // consecutive surprising verifications required
    bool exploiting = false;
    int j = 0;   // verifications taken in the current exploit episode

    SrAction on_sample(bool surprising);
    // Budget exhausted mid-verification: the pending set is accepted as-is.
    // Returns whether there was a pending set to accept; always leaves the
    // machine in explore mode.
    bool frame_end_accepts();
};

struct StrategyConfig {
    std::string kind = "sr_shannon";  // sr_shannon | sr_postdictive | sce | gsqbc
    int sr_t = 3;
    double sr_epsilon = 0.04;  // ball radius in domain units (two cells)
    SurpriseThresholds thresholds;
    double eta = 0.5;
    double gp_length_scale = 0.0;      // <= 0: 0.1 * domain diameter
    double gp_noise = 1e-2;
    double sqexp_length_scale = 0.1;   // third committee member
    std::size_t buffer_cap = 200;
};

// One sampling strategy bound to its own model(s) and retention buffer.
// The per-frame cycle is begin_frame, budget * sample_once, end_frame;
// end_frame settles pending data, evicts to capacity, and refits, so the
// model seen by callers between frames is always trained on the buffer.
class Strategy {
public:
    virtual ~Strategy() = default;

    virtual const char* name() const = 0;
    virtual void seed(const std::vector<Observation>& initial) = 0;
    virtual void begin_frame() = 0;
    virtual Observation sample_once(const PollutionField& field, Rng& rng) = 0;
    virtual void end_frame() = 0;
    virtual void adjust(AdjustDirection dir) = 0;
    virtual double knob() const = 0;  // current t or eta, for logs
    virtual std::unique_ptr<Strategy> clone() const = 0;

    // Lead-model mean over every grid cell, for error evaluation.
    virtual void predict_grid(std::vector<double>& mean) const = 0;

    virtual const RetentionBuffer& buffer() const = 0;
    virtual const GpModel& model() const = 0;
};

std::unique_ptr<Strategy> make_strategy(const StrategyConfig& cfg, const GridSpec& grid);

}  // namespace mis
