#pragma once

#include <fftw3.h>

#include <vector>

#include "core/rng.hpp"

namespace mis {

// Advection velocity, anisotropic diffusion, decay rate, and the per-frame
// background forcing for the pollution field. Units: grid cells and frames
// (one step advances dt time units; lengths are cell widths).
struct PdeParams {
    double vx = 1.0;
    double vy = 0.0;
    double d1 = 0.01;  // diffusion along x
    double d2 = 2.0;   // diffusion along y
    double zeta = 2.0;
    double dt = 0.01;
    double base_noise_mean = 2.0;
    double base_noise_std = 0.25;
};

// One emitting blob: Gaussian profile in cell coordinates, exp(-d^2/(2 r^2)).
struct SourceSpec {
    double cx = 0.0;  // cell coordinates, may be fractional
    double cy = 0.0;
    double amplitude = 50.0;
    double radius = 1.5;  // cells
};

struct PollutionField {
    int nx = 0;
    int ny = 0;
    int frame = 0;
    std::vector<double> u;  // row-major, u[iy * nx + ix]

    PollutionField() = default;
    PollutionField(int nx_, int ny_) : nx(nx_), ny(ny_), u(static_cast<std::size_t>(nx_) * ny_, 0.0) {}
    double at(int ix, int iy) const { return u[static_cast<std::size_t>(iy) * nx + ix]; }
    double& at(int ix, int iy) { return u[static_cast<std::size_t>(iy) * nx + ix]; }
};

// Total forcing from the source blobs at one cell, with periodic
// (minimum-image) distances so blobs near an edge keep their shape.
double source_forcing(const std::vector<SourceSpec>& sources, int nx, int ny, int ix, int iy);

// Exact reads of the field, no sensor noise.
double observe(const PollutionField& field, int ix, int iy);
std::vector<double> observe(const PollutionField& field,
                            const std::vector<std::pair<int, int>>& cells);

// One-step spectral integrator for
//   du/dt = -v . grad u + div(D grad u) - zeta u + S(x),
// advanced with exact per-mode multipliers (the equation is linear, so the
// step is unconditionally stable); sources and the re-drawn base noise are
// then accumulated in physical space as forcing * dt. Periodic boundaries
// come with the Fourier representation. Owns its FFTW plans, so one solver
// serves one grid size.
class SpectralSolver {
public:
    SpectralSolver(int nx, int ny);
    ~SpectralSolver();
    SpectralSolver(const SpectralSolver&) = delete;
    SpectralSolver& operator=(const SpectralSolver&) = delete;

    // Advances field.frame by one. rng feeds the base-noise draw; it is not
    // touched when both noise parameters are zero.
    void step(PollutionField& field, const PdeParams& params,
              const std::vector<SourceSpec>& sources, Rng& rng);

private:
    int nx_, ny_;
    double* real_ = nullptr;
    fftw_complex* spec_ = nullptr;
    fftw_plan fwd_ = nullptr;
    fftw_plan inv_ = nullptr;
};

// Source roster for the 450-frame benchmark: initial_count blobs at frame 0
// and one more at every add_every-th frame. All random locations are drawn
// up front so sources_at is a pure function of the frame index.
class DynamicSchedule {
public:
    DynamicSchedule(int nx, int ny, int initial_count, int add_every, int total_frames,
                    double amplitude, double radius, Rng& rng);

    std::vector<SourceSpec> sources_at(int frame) const;
    int total_sources() const { return static_cast<int>(all_.size()); }

private:
    std::vector<SourceSpec> all_;
    int initial_count_;
    int add_every_;
    int total_frames_;
};

// Dynamic phase (base params, fixed sources) followed by a stationary phase
// with a reduced decay rate and no emitters.
class TwoPhaseSchedule {
public:
    TwoPhaseSchedule(const PdeParams& base, int nx, int ny, int source_count,
                     double amplitude, double radius, int switch_frame, int total_frames,
                     double stationary_zeta, Rng& rng);

    PdeParams params_at(int frame) const;
    std::vector<SourceSpec> sources_at(int frame) const;
    int switch_frame() const { return switch_frame_; }

private:
    PdeParams base_;
    std::vector<SourceSpec> sources_;
    int switch_frame_;
    int total_frames_;
    double stationary_zeta_;
};

}  // namespace mis
