#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "glacia/reduced_model.hpp"

namespace glacia {

using Vec2 = std::array<double, 2>;
/// Planar vector field. May throw DomainError outside its domain; the
/// integrator then rejects the step and retries with a smaller one.
using PlanarField = std::function<Vec2(double t, const Vec2& y)>;

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-11;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0;  ///< 0 picks one automatically
    long long max_steps = 1'000'000'000;
    /// Collect diagnostics about step-size collapse and rejections.
    bool stiffness_guard = false;

    void validate() const;
};

struct IntegrationStats {
    long long accepted = 0;
    long long rejected = 0;
    long long domain_rejections = 0;
    long long rhs_evaluations = 0;
    double min_step = std::numeric_limits<double>::infinity();
    double max_step = 0.0;
    /// Set by the stiffness guard when steps collapse or most steps are rejected.
    std::vector<std::string> warnings;
};

/// One accepted step with its continuous extension (order 4 interpolant).
struct DenseSegment {
    double t0 = 0.0;
    double h = 0.0;
    std::array<Vec2, 5> coeff{};

    double t1() const { return t0 + h; }
    Vec2 at(double t) const;
    Vec2 start() const { return coeff[0]; }
    Vec2 end() const { return {coeff[0][0] + coeff[1][0], coeff[0][1] + coeff[1][1]}; }
};

/// Dormand-Prince 5(4) stepper with PI step-size control. Advances one
/// accepted step at a time so callers can process trajectories without
/// storing them.
class Dopri5 {
public:
    Dopri5(PlanarField rhs, double t0, const Vec2& y0, const IntegratorConfig& cfg);

    /// Advances by one accepted step, never beyond t_stop. Returns false once
    /// t_stop has been reached. Throws ConvergenceError when max_steps is
    /// exhausted and DomainError when the field keeps failing.
    bool step(double t_stop);

    double t() const { return t_; }
    const Vec2& y() const { return y_; }
    const DenseSegment& last_segment() const { return seg_; }
    const IntegrationStats& stats() const { return stats_; }

private:
    Vec2 eval(double t, const Vec2& y);
    double initial_step(double t_stop);

    PlanarField rhs_;
    IntegratorConfig cfg_;
    double t_;
    Vec2 y_;
    Vec2 k1_{};
    double h_ = 0.0;
    double facold_ = 1e-4;
    bool last_rejected_ = false;
    DenseSegment seg_;
    IntegrationStats stats_;
};

class Trajectory {
public:
    void append(const DenseSegment& s) { segments_.push_back(s); }

    double t_begin() const { return segments_.front().t0; }
    double t_end() const { return segments_.back().t1(); }
    bool empty() const { return segments_.empty(); }
    /// Dense output at any t in [t_begin, t_end]. Throws RangeError outside.
    Vec2 at(double t) const;
    const std::vector<DenseSegment>& segments() const { return segments_; }
    /// Step end points, starting with the initial state.
    std::vector<double> times() const;
    std::vector<Vec2> states() const;

    Vec2 initial_state;
    double initial_time = 0.0;
    IntegrationStats stats;

private:
    std::vector<DenseSegment> segments_;
};

/// Integrates y' = rhs(t, y) over [t0, t1] (t1 > t0) and keeps every step.
/// A zero-length span returns a trajectory with no segments.
Trajectory integrate(const PlanarField& rhs, const Vec2& y0, double t0, double t1,
                     const IntegratorConfig& cfg = {});

enum class CrossingDirection { Up, Down, Both };

struct Crossing {
    double t = 0.0;
    bool upward = true;
    bool grazing = false;  ///< near-tangential crossing
};

struct CrossingResult {
    std::vector<Crossing> crossings;
    /// Times where the event touches zero without changing sign.
    std::vector<double> touches;
};

using EventFunction = std::function<double(double t, const Vec2& y)>;

struct CrossingOptions {
    CrossingDirection direction = CrossingDirection::Both;
    double scale = 1.0;  ///< |event| <= 1e-12 scale at a refined crossing
    int samples_per_step = 8;
};

/// Sign changes of the event inside one segment, refined on the interpolant.
CrossingResult crossings_in_segment(const DenseSegment& s, const EventFunction& event,
                                    const CrossingOptions& opts = {});
CrossingResult detect_crossings(const Trajectory& traj, const EventFunction& event,
                                const CrossingOptions& opts = {});

struct LimitCycleOptions {
    int transient_returns = 5;
    int average_returns = 3;
    double period_tol = 1e-6;
    int max_returns = 50;
    int samples = 512;  ///< samples over the final period; 0 skips the extra period
    std::optional<Vec2> seed;
};

struct LimitCycleMeasurement {
    double period = 0.0;
    double amplitude_x = 0.0;
    double amplitude_y = 0.0;
    std::vector<double> crossings;
    std::vector<double> intervals;
    bool converged = false;
    double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
    std::vector<double> sample_times;
    std::vector<Vec2> samples;
    IntegrationStats stats;
};

/// Integrates the reduced system from the seed (default (x_c + 0.1 (x+ - x-), f(x_c))),
/// detects upward crossings of x = x_c, drops the transient and averages the
/// last return intervals. Throws AssumptionError unless nu > nu_c with the
/// relaxation geometry, ConvergenceError after max_returns without
/// convergence (the message lists the interval history).
LimitCycleMeasurement measure_limit_cycle(const Nullclines& nc, double nu,
                                          const IntegratorConfig& cfg = {},
                                          const LimitCycleOptions& opts = {});
LimitCycleMeasurement measure_limit_cycle(const ReducedParams& rp,
                                          const IntegratorConfig& cfg = {},
                                          const LimitCycleOptions& opts = {});

/// Reduced vector field (x, y). Keeps a reference to `nc`.
PlanarField reduced_field(const Nullclines& nc, double nu);
/// Full-model vector field (theta, lambda) in tau.
PlanarField full_field(const FullParams& p);

}  // namespace glacia
