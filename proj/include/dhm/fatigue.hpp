#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dhm/errors.hpp"

namespace dhm {

// ---------------------------------------------------------------------------
// Joint fatigue and recovery.
//
// Under load, the current maximum exertable moment Gamma_cem decays as
//     dGamma_cem/dt = -k * (Gamma_cem / Gamma_max) * Gamma_load
// and during rest it recovers as
//     dGamma_cem/dt = R * (Gamma_max - Gamma_cem).
//
// UNITS: the fatigue rate k = 1/m and the recovery rate R are per-minute
// quantities; the resistance m is in minutes. Every public interface in this
// header takes SECONDS and converts at the boundary. Mixing that up scales
// all time constants by 60, so keep the _s suffixes honest.
// ---------------------------------------------------------------------------

inline constexpr double kSecondsPerMinute = 60.0;

struct FatigueParams {
    double gamma_max_Nm = 0.0;    // fresh-joint capacity
    double resistance_min = 0.0;  // m = 1/k, minutes
    double recovery_per_min = 0.0;  // R

    double fatigue_rate_per_min() const { return 1.0 / resistance_min; }
};

inline void validate(const FatigueParams& p) {
    if (!(p.gamma_max_Nm > 0.0)) throw model_error("fatigue params: Gamma_max must be positive");
    if (!(p.resistance_min > 0.0)) throw model_error("fatigue params: resistance m must be positive");
    if (p.recovery_per_min < 0.0) throw model_error("fatigue params: recovery rate must be >= 0");
}

namespace detail {
inline double checked_capacity(const FatigueParams& p, double c0, const char* where) {
    // tolerate float drift just above Gamma_max from upstream arithmetic
    if (c0 > p.gamma_max_Nm && c0 <= p.gamma_max_Nm * (1.0 + 1e-12)) {
        return p.gamma_max_Nm;
    }
    if (!(c0 > 0.0) || c0 > p.gamma_max_Nm) {
        throw model_error(std::string(where) + ": capacity " + std::to_string(c0) +
                          " outside (0, Gamma_max]");
    }
    return c0;
}
}  // namespace detail

/// Exact solution of the fatigue equation for constant load:
/// Gamma_cem(t) = C0 * exp(-k * (load/Gamma_max) * t).
inline double fatigue_closed_form(double c0_Nm, const FatigueParams& p, double load_Nm,
                                  double t_s) {
    validate(p);
    const double c0 = detail::checked_capacity(p, c0_Nm, "fatigue_closed_form");
    if (load_Nm < 0.0) throw model_error("fatigue_closed_form: load must be >= 0");
    if (t_s < 0.0) throw model_error("fatigue_closed_form: time must be >= 0");
    const double t_min = t_s / kSecondsPerMinute;
    return c0 * std::exp(-(load_Nm / p.gamma_max_Nm) * t_min / p.resistance_min);
}

/// Exact solution of the recovery equation:
/// Gamma_cem(t) = Gamma_max - (Gamma_max - C0) * exp(-R * t).
inline double recovery_closed_form(double c0_Nm, const FatigueParams& p, double t_s) {
    validate(p);
    const double c0 = detail::checked_capacity(p, c0_Nm, "recovery_closed_form");
    if (t_s < 0.0) throw model_error("recovery_closed_form: time must be >= 0");
    const double t_min = t_s / kSecondsPerMinute;
    return p.gamma_max_Nm - (p.gamma_max_Nm - c0) * std::exp(-p.recovery_per_min * t_min);
}

/// Normalized strength reduction (Gamma_max - Gamma_cem) / Gamma_max in [0, 1).
inline double fatigue_index(const FatigueParams& p, double gamma_cem_Nm) {
    validate(p);
    const double c = detail::checked_capacity(p, gamma_cem_Nm, "fatigue_index");
    return (p.gamma_max_Nm - c) / p.gamma_max_Nm;
}

// ---------------------------------------------------------------------------
// Work-rest schedules
// ---------------------------------------------------------------------------

struct ScheduleSegment {
    enum class Kind { work, rest };
    Kind kind = Kind::work;
    double duration_s = 0.0;
    // piecewise-constant demand during work; NaN marks "resolve from the
    // computed joint load" in pipeline configs
    double load_Nm = std::numeric_limits<double>::quiet_NaN();
};

struct WorkRestSchedule {
    std::vector<ScheduleSegment> segments;

    double horizon_s() const {
        double total = 0.0;
        for (const auto& s : segments) total += s.duration_s;
        return total;
    }

    bool resolved() const {
        for (const auto& s : segments) {
            if (s.kind == ScheduleSegment::Kind::work && !std::isfinite(s.load_Nm)) return false;
        }
        return true;
    }

    /// Fill unresolved work loads with a computed demand.
    WorkRestSchedule with_load(double load_Nm) const {
        WorkRestSchedule out = *this;
        for (auto& s : out.segments) {
            if (s.kind == ScheduleSegment::Kind::work && !std::isfinite(s.load_Nm)) {
                s.load_Nm = load_Nm;
            }
        }
        return out;
    }
};

inline void validate(const WorkRestSchedule& sched) {
    for (const auto& s : sched.segments) {
        if (!(s.duration_s > 0.0)) throw model_error("schedule: segment durations must be positive");
        if (s.kind == ScheduleSegment::Kind::work && std::isfinite(s.load_Nm) && s.load_Nm < 0.0) {
            throw model_error("schedule: work load must be >= 0");
        }
    }
}

inline WorkRestSchedule cyclic_schedule(int cycles, double work_s, double rest_s,
                                        double load_Nm = std::numeric_limits<double>::quiet_NaN()) {
    WorkRestSchedule s;
    for (int i = 0; i < cycles; ++i) {
        s.segments.push_back({ScheduleSegment::Kind::work, work_s, load_Nm});
        if (rest_s > 0.0) s.segments.push_back({ScheduleSegment::Kind::rest, rest_s, 0.0});
    }
    return s;
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

struct CapacityTrajectory {
    std::vector<double> t_s;
    std::vector<double> gamma_Nm;
    std::optional<double> failure_time_s;  // first instant capacity reached the load
    double gamma_max_Nm = 0.0;

    double final_capacity() const { return gamma_Nm.empty() ? gamma_max_Nm : gamma_Nm.back(); }
};

/// Analytic time, in seconds, for capacity to fall from `c_start` to `load`
/// under constant load: t* = m * (Gamma_max/load) * ln(c_start/load).
inline double time_to_failure_s(const FatigueParams& p, double c_start_Nm, double load_Nm) {
    return p.resistance_min * (p.gamma_max_Nm / load_Nm) * std::log(c_start_Nm / load_Nm) *
           kSecondsPerMinute;
}

struct SimulateOptions {
    double sample_dt_s = 1.0;
    bool continue_past_failure = false;
    double initial_capacity_Nm = std::numeric_limits<double>::quiet_NaN();  // default Gamma_max
};

/// Piecewise closed-form propagation over a schedule. Segment boundaries are
/// sampled exactly and shared, so the trajectory is continuous by
/// construction. Failure is the first instant a work segment's capacity
/// reaches its load, located analytically.
inline CapacityTrajectory simulate_schedule(const FatigueParams& p, const WorkRestSchedule& sched,
                                            const SimulateOptions& opts = {}) {
    validate(p);
    validate(sched);
    if (!sched.resolved()) {
        throw model_error("simulate_schedule: schedule has unresolved work loads");
    }
    if (!(opts.sample_dt_s > 0.0)) {
        throw model_error("simulate_schedule: sample_dt must be positive");
    }

    CapacityTrajectory out;
    out.gamma_max_Nm = p.gamma_max_Nm;
    double c = std::isfinite(opts.initial_capacity_Nm) ? opts.initial_capacity_Nm
                                                       : p.gamma_max_Nm;
    c = detail::checked_capacity(p, c, "simulate_schedule");
    double t0 = 0.0;
    out.t_s.push_back(0.0);
    out.gamma_Nm.push_back(c);

    for (const auto& seg : sched.segments) {
        const bool work = seg.kind == ScheduleSegment::Kind::work;
        auto value_at = [&](double tau_s) {
            return work ? fatigue_closed_form(c, p, seg.load_Nm, tau_s)
                        : recovery_closed_form(c, p, tau_s);
        };

        double fail_tau = -1.0;
        if (work && seg.load_Nm > 0.0 && !out.failure_time_s) {
            if (seg.load_Nm >= c) {
                fail_tau = 0.0;  // demand meets or exceeds capacity at segment start
            } else {
                const double tau = time_to_failure_s(p, c, seg.load_Nm);
                if (tau <= seg.duration_s) fail_tau = tau;
            }
        }
        if (fail_tau >= 0.0) out.failure_time_s = t0 + fail_tau;

        const double end_tau =
            (fail_tau >= 0.0 && !opts.continue_past_failure) ? fail_tau : seg.duration_s;
        for (double tau = opts.sample_dt_s; tau < end_tau; tau += opts.sample_dt_s) {
            out.t_s.push_back(t0 + tau);
            out.gamma_Nm.push_back(value_at(tau));
        }
        if (out.t_s.back() != t0 + end_tau) {
            out.t_s.push_back(t0 + end_tau);
            out.gamma_Nm.push_back(value_at(end_tau));
        }

        if (fail_tau >= 0.0 && !opts.continue_past_failure) return out;
        c = value_at(seg.duration_s);
        t0 += seg.duration_s;
    }
    return out;
}

/// Fixed-step RK4 over sampled loads, one step per sample. Each sample is a
/// piecewise-constant load over [i*dt, (i+1)*dt); the fatigue branch applies
/// where the load is positive, the recovery branch elsewhere.
inline CapacityTrajectory integrate_variable_load(const FatigueParams& p,
                                                  const std::vector<double>& load_samples_Nm,
                                                  double dt_s,
                                                  double initial_capacity_Nm =
                                                      std::numeric_limits<double>::quiet_NaN()) {
    validate(p);
    if (!(dt_s > 0.0)) throw model_error("integrate_variable_load: dt must be positive");

    CapacityTrajectory out;
    out.gamma_max_Nm = p.gamma_max_Nm;
    double c = std::isfinite(initial_capacity_Nm) ? initial_capacity_Nm : p.gamma_max_Nm;
    c = detail::checked_capacity(p, c, "integrate_variable_load");
    out.t_s.push_back(0.0);
    out.gamma_Nm.push_back(c);

    const double dt_min = dt_s / kSecondsPerMinute;
    for (std::size_t i = 0; i < load_samples_Nm.size(); ++i) {
        const double load = load_samples_Nm[i];
        if (!std::isfinite(load) || load < 0.0) {
            throw model_error("integrate_variable_load: invalid load sample at index " +
                              std::to_string(i));
        }
        auto deriv = [&](double gamma) {
            return load > 0.0 ? -(load / p.gamma_max_Nm) / p.resistance_min * gamma
                              : p.recovery_per_min * (p.gamma_max_Nm - gamma);
        };
        const double k1 = deriv(c);
        const double k2 = deriv(c + 0.5 * dt_min * k1);
        const double k3 = deriv(c + 0.5 * dt_min * k2);
        const double k4 = deriv(c + dt_min * k3);
        const double c_next = c + dt_min / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        if (!out.failure_time_s && load > 0.0 && c > load && c_next <= load) {
            out.failure_time_s = static_cast<double>(i) * dt_s + time_to_failure_s(p, c, load);
        } else if (!out.failure_time_s && load > 0.0 && c <= load) {
            out.failure_time_s = static_cast<double>(i) * dt_s;
        }
        c = c_next;
        out.t_s.push_back(static_cast<double>(i + 1) * dt_s);
        out.gamma_Nm.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Endurance
// ---------------------------------------------------------------------------

struct EnduranceResult {
    std::optional<double> endurance_s;  // empty = exceeds the schedule horizon
    double horizon_s = 0.0;
    double final_fatigue_index = 0.0;   // at min(failure, horizon)
    CapacityTrajectory trajectory;

    bool exceeded() const { return !endurance_s.has_value(); }
};

/// First instant the joint capacity falls to the concurrent work load, or
/// exceeds(horizon) when the schedule completes.
inline EnduranceResult endurance_time(const FatigueParams& p, const WorkRestSchedule& sched,
                                      double sample_dt_s = 1.0) {
    SimulateOptions opts;
    opts.sample_dt_s = sample_dt_s;
    EnduranceResult out;
    out.trajectory = simulate_schedule(p, sched, opts);
    out.horizon_s = sched.horizon_s();
    out.endurance_s = out.trajectory.failure_time_s;
    out.final_fatigue_index = fatigue_index(p, out.trajectory.final_capacity());
    return out;
}

}  // namespace dhm
