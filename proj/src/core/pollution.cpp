#include "core/pollution.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mis {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate_params(const PdeParams& p) {
    if (!(p.dt > 0.0)) throw std::invalid_argument("PdeParams: dt must be > 0");
    if (p.d1 < 0.0 || p.d2 < 0.0) throw std::invalid_argument("PdeParams: diffusion must be >= 0");
    if (p.zeta < 0.0) throw std::invalid_argument("PdeParams: decay must be >= 0");
    if (p.base_noise_std < 0.0) throw std::invalid_argument("PdeParams: noise std must be >= 0");
}

double min_image(double d, int n) {
    double half = 0.5 * n;
    while (d > half) d -= n;
    while (d < -half) d += n;
    return d;
}

}  // namespace

double source_forcing(const std::vector<SourceSpec>& sources, int nx, int ny, int ix, int iy) {
    double s = 0.0;
    for (const SourceSpec& src : sources) {
        double dx = min_image(ix - src.cx, nx);
        double dy = min_image(iy - src.cy, ny);
        double d2 = dx * dx + dy * dy;
        s += src.amplitude * std::exp(-d2 / (2.0 * src.radius * src.radius));
    }
    return s;
}

double observe(const PollutionField& field, int ix, int iy) {
    if (ix < 0 || ix >= field.nx || iy < 0 || iy >= field.ny) {
        throw std::out_of_range("observe: cell (" + std::to_string(ix) + ", " +
                                std::to_string(iy) + ") is outside the grid");
    }
    return field.at(ix, iy);
}

std::vector<double> observe(const PollutionField& field,
                            const std::vector<std::pair<int, int>>& cells) {
    std::vector<double> out;
    out.reserve(cells.size());
    for (const auto& [ix, iy] : cells) out.push_back(observe(field, ix, iy));
    return out;
}

SpectralSolver::SpectralSolver(int nx, int ny) : nx_(nx), ny_(ny) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("SpectralSolver: grid too small");
    real_ = fftw_alloc_real(static_cast<std::size_t>(nx) * ny);
    spec_ = fftw_alloc_complex(static_cast<std::size_t>(ny) * (nx / 2 + 1));
    // Row-major ny x nx real input, ny x (nx/2 + 1) complex output.
    fwd_ = fftw_plan_dft_r2c_2d(ny, nx, real_, spec_, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_2d(ny, nx, spec_, real_, FFTW_ESTIMATE);
    if (fwd_ == nullptr || inv_ == nullptr) {
        throw std::runtime_error("SpectralSolver: FFTW plan creation failed");
    }
}

SpectralSolver::~SpectralSolver() {
    if (fwd_ != nullptr) fftw_destroy_plan(fwd_);
    if (inv_ != nullptr) fftw_destroy_plan(inv_);
    fftw_free(real_);
    fftw_free(spec_);
}

void SpectralSolver::step(PollutionField& field, const PdeParams& params,
                          const std::vector<SourceSpec>& sources, Rng& rng) {
    validate_params(params);
    if (field.nx != nx_ || field.ny != ny_) {
        throw std::invalid_argument("SpectralSolver::step: field size does not match the solver");
    }

    std::size_t cells = static_cast<std::size_t>(nx_) * ny_;
    for (std::size_t i = 0; i < cells; ++i) real_[i] = field.u[i];
    fftw_execute(fwd_);

    // Exact one-step propagator per mode; the FFTW round trip is
    // unnormalized, so the 1/(nx ny) factor is folded in here.
    const int half = nx_ / 2 + 1;
    const double norm = 1.0 / static_cast<double>(cells);
    for (int jy = 0; jy < ny_; ++jy) {
        double ky = 2.0 * kPi * (jy <= ny_ / 2 ? jy : jy - ny_) / ny_;
        for (int jx = 0; jx < half; ++jx) {
            double kx = 2.0 * kPi * jx / nx_;
            double decay = std::exp(-(params.d1 * kx * kx + params.d2 * ky * ky + params.zeta) *
                                    params.dt) * norm;
            double phase = -(params.vx * kx + params.vy * ky) * params.dt;
            double mr = decay * std::cos(phase);
            double mi = decay * std::sin(phase);
            fftw_complex& c = spec_[static_cast<std::size_t>(jy) * half + jx];
            double re = c[0] * mr - c[1] * mi;
            double im = c[0] * mi + c[1] * mr;
            c[0] = re;
            c[1] = im;
        }
    }
    fftw_execute(inv_);

    bool draw_noise = params.base_noise_mean != 0.0 || params.base_noise_std != 0.0;
    double peak = 0.0;
    for (int iy = 0; iy < ny_; ++iy) {
        for (int ix = 0; ix < nx_; ++ix) {
            std::size_t i = static_cast<std::size_t>(iy) * nx_ + ix;
            double forcing = source_forcing(sources, nx_, ny_, ix, iy);
            if (draw_noise) forcing += rng.normal(params.base_noise_mean, params.base_noise_std);
            double v = real_[i] + forcing * params.dt;
            field.u[i] = v;
            double a = std::fabs(v);
            if (a > peak) peak = a;
        }
    }
    field.frame += 1;
    if (!(peak <= 1e6)) {
        throw std::runtime_error("SpectralSolver::step: field magnitude " + std::to_string(peak) +
                                 " exceeds 1e6 at frame " + std::to_string(field.frame) +
                                 ", integration is diverging");
    }
}

DynamicSchedule::DynamicSchedule(int nx, int ny, int initial_count, int add_every,
                                 int total_frames, double amplitude, double radius, Rng& rng)
    : initial_count_(initial_count), add_every_(add_every), total_frames_(total_frames) {
    if (initial_count < 0 || add_every < 1 || total_frames < 1) {
        throw std::invalid_argument("DynamicSchedule: bad schedule shape");
    }
    int additions = (total_frames - 1) / add_every;
    all_.reserve(static_cast<std::size_t>(initial_count + additions));
    for (int i = 0; i < initial_count + additions; ++i) {
        SourceSpec s;
        s.cx = rng.uniform(0.0, static_cast<double>(nx));
        s.cy = rng.uniform(0.0, static_cast<double>(ny));
        s.amplitude = amplitude;
        s.radius = radius;
        all_.push_back(s);
    }
}

std::vector<SourceSpec> DynamicSchedule::sources_at(int frame) const {
    if (frame < 0 || frame >= total_frames_) {
        throw std::out_of_range("DynamicSchedule: frame " + std::to_string(frame) +
                                " outside [0, " + std::to_string(total_frames_) + ")");
    }
    std::size_t count = static_cast<std::size_t>(initial_count_ + frame / add_every_);
    if (count > all_.size()) count = all_.size();
    return {all_.begin(), all_.begin() + static_cast<std::ptrdiff_t>(count)};
}

TwoPhaseSchedule::TwoPhaseSchedule(const PdeParams& base, int nx, int ny, int source_count,
                                   double amplitude, double radius, int switch_frame,
                                   int total_frames, double stationary_zeta, Rng& rng)
    : base_(base), switch_frame_(switch_frame), total_frames_(total_frames),
      stationary_zeta_(stationary_zeta) {
    if (switch_frame < 1 || switch_frame >= total_frames) {
        throw std::invalid_argument("TwoPhaseSchedule: switch frame outside the run");
    }
    for (int i = 0; i < source_count; ++i) {
        SourceSpec s;
        s.cx = rng.uniform(0.0, static_cast<double>(nx));
        s.cy = rng.uniform(0.0, static_cast<double>(ny));
        s.amplitude = amplitude;
        s.radius = radius;
        sources_.push_back(s);
    }
}

PdeParams TwoPhaseSchedule::params_at(int frame) const {
    if (frame < 0 || frame >= total_frames_) {
        throw std::out_of_range("TwoPhaseSchedule: frame outside the run");
    }
    PdeParams p = base_;
    if (frame >= switch_frame_) p.zeta = stationary_zeta_;
    return p;
}

std::vector<SourceSpec> TwoPhaseSchedule::sources_at(int frame) const {
    if (frame < 0 || frame >= total_frames_) {
        throw std::out_of_range("TwoPhaseSchedule: frame outside the run");
    }
    if (frame >= switch_frame_) return {};
    return sources_;
}

}  // namespace mis
