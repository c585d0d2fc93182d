#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "qfs/common.hpp"
#include "qfs/geometry.hpp"

namespace qfs {

struct Knot {
    double t = 0.0;      // s
    double value = 0.0;  // rad/s
};

/// Piecewise-linear waveform over [0, T], defined by knots at strictly
/// increasing times starting at 0.
class Schedule {
  public:
    Schedule() = default;
    explicit Schedule(std::vector<Knot> knots) : knots_(std::move(knots)) {
        if (knots_.size() < 2) throw ValidationError("schedule needs at least 2 knots");
        if (knots_.front().t != 0.0) throw ValidationError("schedule must start at t = 0");
        for (std::size_t k = 0; k < knots_.size(); ++k) {
            if (!std::isfinite(knots_[k].t) || !std::isfinite(knots_[k].value))
                throw ValidationError("non-finite schedule knot");
            if (k > 0 && knots_[k].t <= knots_[k - 1].t)
                throw ValidationError("schedule knot times must strictly increase");
        }
    }

    const std::vector<Knot>& knots() const { return knots_; }
    double end_time() const { return knots_.back().t; }

    double value_at(double t) const {
        if (t < 0.0 || t > end_time())
            throw ValidationError("schedule sampled outside [0, T]");
        auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                   [](double x, const Knot& k) { return x < k.t; });
        if (it == knots_.end()) return knots_.back().value;
        if (it == knots_.begin()) return knots_.front().value;
        const Knot& hi = *it;
        const Knot& lo = *(it - 1);
        const double w = (t - lo.t) / (hi.t - lo.t);
        return lo.value + w * (hi.value - lo.value);
    }

  private:
    std::vector<Knot> knots_;
};

/// Complete drive description: global Rabi/phase schedules, global detuning,
/// the local-detuning envelope, and per-site weights p_i multiplying it.
struct DriveProgram {
    Schedule omega;
    Schedule phase;
    Schedule delta_global;
    Schedule delta_local_envelope;
    std::vector<double> site_weights;  // p_i in (0, 1]
    int n_steps = 40;                  // interpolation samples handed to the simulator
    double total_time = 0.0;           // T, s

    std::size_t n_sites() const { return site_weights.size(); }

    void validate() const {
        if (!(total_time > 0.0)) throw ValidationError("total_time must be positive");
        if (n_steps < 2) throw ValidationError("n_steps must be at least 2");
        for (const Schedule* s : {&omega, &phase, &delta_global, &delta_local_envelope})
            if (s->end_time() != total_time)
                throw ValidationError("schedule does not span [0, T]");
        if (site_weights.empty()) throw ValidationError("program needs at least one site");
        for (double p : site_weights)
            if (!(p > 0.0) || p > 1.0)
                throw ValidationError("site weights must lie in (0, 1]");
    }
};

/// Ramp fractions of the default protocol (in units of T); read qualitatively
/// off the published drive profiles and exposed as configuration.
struct ScheduleFractions {
    double omega_rise_end = 0.15;
    double omega_fall_start = 0.85;
    double delta_g_hold_end = 0.10;
    double delta_g_zero = 0.50;
    double delta_l_start = 0.50;
    double delta_l_ramp_end = 0.90;

    void validate() const {
        auto in01 = [](double f) { return f > 0.0 && f < 1.0; };
        if (!in01(omega_rise_end) || !in01(omega_fall_start) ||
            omega_rise_end >= omega_fall_start)
            throw ValidationError("omega ramp fractions must satisfy 0 < rise < fall < 1");
        if (!in01(delta_g_hold_end) || !in01(delta_g_zero) || delta_g_hold_end >= delta_g_zero)
            throw ValidationError("delta_g fractions must satisfy 0 < hold < zero < 1");
        if (!in01(delta_l_start) || !in01(delta_l_ramp_end) || delta_l_start >= delta_l_ramp_end)
            throw ValidationError("delta_l fractions must satisfy 0 < start < ramp end < 1");
    }
};

/// The protocol drive: Omega ramps up, holds, ramps down; Delta_g starts
/// large and negative and reaches zero mid-protocol; the Delta_l envelope
/// activates in the latter half and holds its peak, scaled per site by p_i.
inline DriveProgram build_default_program(const PhysicalConstants& constants,
                                          const std::vector<double>& p, int n_steps = 40,
                                          const ScheduleFractions& fractions = {}) {
    constants.validate();
    fractions.validate();
    if (n_steps < 2) throw ValidationError("n_steps must be at least 2");
    if (p.empty()) throw ValidationError("weight vector is empty");
    double max_p = 0.0;
    for (double v : p) {
        if (!(v > 0.0) || v > 1.0) throw ValidationError("weights must lie in (0, 1]");
        max_p = std::max(max_p, v);
    }
    if (std::abs(max_p - 1.0) > 1e-9)
        throw ValidationError("maximum weight must equal 1 within 1e-9");

    const double t_total = constants.total_time;
    DriveProgram program;
    program.omega = Schedule({{0.0, 0.0},
                              {fractions.omega_rise_end * t_total, constants.omega_max},
                              {fractions.omega_fall_start * t_total, constants.omega_max},
                              {t_total, 0.0}});
    program.phase = Schedule({{0.0, 0.0}, {t_total, 0.0}});
    program.delta_global = Schedule({{0.0, constants.delta_g_initial},
                                     {fractions.delta_g_hold_end * t_total,
                                      constants.delta_g_initial},
                                     {fractions.delta_g_zero * t_total, 0.0},
                                     {t_total, 0.0}});
    program.delta_local_envelope = Schedule({{0.0, 0.0},
                                             {fractions.delta_l_start * t_total, 0.0},
                                             {fractions.delta_l_ramp_end * t_total,
                                              constants.delta_l_max},
                                             {t_total, constants.delta_l_max}});
    program.site_weights = p;
    program.n_steps = n_steps;
    program.total_time = t_total;
    program.validate();
    return program;
}

/// Pointwise drive values (omega, phase, delta_g, delta_l envelope) at t.
struct DriveSample {
    double t = 0.0;
    double omega = 0.0;
    double phase = 0.0;
    double delta_g = 0.0;
    double delta_l = 0.0;  // envelope value; per-site detuning is delta_l * p_i
};

inline DriveSample sample_at(const DriveProgram& program, double t) {
    DriveSample s;
    s.t = t;
    s.omega = program.omega.value_at(t);
    s.phase = program.phase.value_at(t);
    s.delta_g = program.delta_global.value_at(t);
    s.delta_l = program.delta_local_envelope.value_at(t);
    return s;
}

/// The n_steps interpolation grid t_k = k T/(n_steps-1), sampled exactly on
/// the piecewise-linear schedules.
inline std::vector<DriveSample> discretize_program(const DriveProgram& program) {
    program.validate();
    std::vector<DriveSample> grid;
    grid.reserve(static_cast<std::size_t>(program.n_steps));
    for (int k = 0; k < program.n_steps; ++k) {
        const double t = program.total_time * static_cast<double>(k) /
                         static_cast<double>(program.n_steps - 1);
        grid.push_back(sample_at(program, std::min(t, program.total_time)));
    }
    return grid;
}

/// One linear detuning segment with its normalized sweep rate
/// s = (dDelta/dt) / (Omega_ref^2 / 2pi), Omega_ref being the plateau (peak)
/// Rabi frequency over the segment. Zero drive under a nonzero sweep gives
/// s = +infinity.
struct SlewSegment {
    std::string channel;     // "delta_global" or "delta_local"
    double t_start = 0.0;
    double t_end = 0.0;
    double sweep_rate = 0.0; // dDelta/dt, rad/s^2
    double omega_ref = 0.0;  // rad/s
    double s = 0.0;
};

namespace detail {

inline double omega_plateau(const Schedule& omega, double t0, double t1) {
    double peak = std::max(omega.value_at(t0), omega.value_at(t1));
    for (const Knot& k : omega.knots())
        if (k.t > t0 && k.t < t1) peak = std::max(peak, k.value);
    return peak;
}

inline void append_segments(const Schedule& channel, const Schedule& omega,
                            const std::string& name, double rate_scale,
                            std::vector<SlewSegment>& out) {
    const auto& knots = channel.knots();
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        SlewSegment seg;
        seg.channel = name;
        seg.t_start = knots[k].t;
        seg.t_end = knots[k + 1].t;
        seg.sweep_rate =
            rate_scale * (knots[k + 1].value - knots[k].value) / (seg.t_end - seg.t_start);
        seg.omega_ref = omega_plateau(omega, seg.t_start, seg.t_end);
        if (seg.sweep_rate == 0.0)
            seg.s = 0.0;
        else if (seg.omega_ref == 0.0)
            seg.s = std::numeric_limits<double>::infinity();
        else
            seg.s = seg.sweep_rate / (seg.omega_ref * seg.omega_ref / (2.0 * std::numbers::pi));
        out.push_back(seg);
    }
}

}  // namespace detail

/// Normalized sweep rates of every linear segment of Delta_g and of the
/// per-site maximum of Delta_l (envelope times max weight).
inline std::vector<SlewSegment> slew_profile(const DriveProgram& program) {
    program.validate();
    double max_p = 0.0;
    for (double p : program.site_weights) max_p = std::max(max_p, p);
    std::vector<SlewSegment> segments;
    detail::append_segments(program.delta_global, program.omega, "delta_global", 1.0,
                            segments);
    detail::append_segments(program.delta_local_envelope, program.omega, "delta_local",
                            max_p, segments);
    return segments;
}

struct SlewReport {
    bool passed = true;
    double bound = 0.5;
    double max_abs_finite_s = 0.0;
    std::vector<SlewSegment> segments;
    std::vector<SlewSegment> violations;  // finite |s| > bound
};

/// Pass iff every finite segment satisfies |s| <= bound. Segments with
/// infinite s (sweep under zero drive) are reported but cannot cause diabatic
/// transitions, so they do not fail the check.
inline SlewReport validate_slew(const DriveProgram& program, double bound = 0.5) {
    if (!(bound > 0.0)) throw ValidationError("slew bound must be positive");
    SlewReport report;
    report.bound = bound;
    report.segments = slew_profile(program);
    for (const SlewSegment& seg : report.segments) {
        if (!std::isfinite(seg.s)) continue;
        report.max_abs_finite_s = std::max(report.max_abs_finite_s, std::abs(seg.s));
        if (std::abs(seg.s) > bound) report.violations.push_back(seg);
    }
    report.passed = report.violations.empty();
    return report;
}

}  // namespace qfs
