#include "glacia/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "glacia/errors.hpp"
#include "glacia/roots.hpp"

namespace glacia {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
constexpr double a21 = 0.2;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;   // hnew >= 0.2 h
constexpr double kFacMax = 10.0;  // hnew <= 10 h
constexpr double kBeta = 0.04;
constexpr int kMaxDomainRetries = 60;

Vec2 axpy(const Vec2& y, double h, std::initializer_list<std::pair<double, const Vec2*>> terms) {
    Vec2 r = y;
    for (const auto& [w, k] : terms) {
        r[0] += h * w * (*k)[0];
        r[1] += h * w * (*k)[1];
    }
    return r;
}

std::string state_string(double t, const Vec2& y) {
    std::ostringstream os;
    os.precision(12);
    os << "t = " << t << ", state = (" << y[0] << ", " << y[1] << ")";
    return os.str();
}

}  // namespace

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ConfigError("tolerances must be positive");
    if (!(max_step > 0.0)) throw ConfigError("max_step must be positive");
    if (max_steps < 1) throw ConfigError("max_steps must be at least 1");
    if (initial_step < 0.0) throw ConfigError("initial_step must be nonnegative");
}

Vec2 DenseSegment::at(double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    Vec2 r;
    for (int i = 0; i < 2; ++i) {
        r[i] = coeff[0][i] +
               s * (coeff[1][i] + s1 * (coeff[2][i] + s * (coeff[3][i] + s1 * coeff[4][i])));
    }
    return r;
}

Dopri5::Dopri5(PlanarField rhs, double t0, const Vec2& y0, const IntegratorConfig& cfg)
    : rhs_(std::move(rhs)), cfg_(cfg), t_(t0), y_(y0) {
    cfg_.validate();
    k1_ = eval(t_, y_);
    seg_.t0 = t0;
    seg_.coeff[0] = y0;
}

Vec2 Dopri5::eval(double t, const Vec2& y) {
    ++stats_.rhs_evaluations;
    return rhs_(t, y);
}

double Dopri5::initial_step(double t_stop) {
    if (cfg_.initial_step > 0.0) return std::min(cfg_.initial_step, cfg_.max_step);
    double dnf = 0.0, dny = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double sk = cfg_.abs_tol + cfg_.rel_tol * std::abs(y_[i]);
        dnf += (k1_[i] / sk) * (k1_[i] / sk);
        dny += (y_[i] / sk) * (y_[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min({h, cfg_.max_step, t_stop - t_});
    Vec2 f1;
    for (int tries = 0;; ++tries) {
        try {
            f1 = eval(t_ + h, axpy(y_, h, {{1.0, &k1_}}));
            break;
        } catch (const DomainError&) {
            if (tries > kMaxDomainRetries) throw;
            h *= 0.1;
        }
    }
    double der2 = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double sk = cfg_.abs_tol + cfg_.rel_tol * std::abs(y_[i]);
        der2 += ((f1[i] - k1_[i]) / sk) * ((f1[i] - k1_[i]) / sk);
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h, h1, cfg_.max_step});
}

bool Dopri5::step(double t_stop) {
    if (!(t_ < t_stop)) return false;
    if (h_ == 0.0) h_ = initial_step(t_stop);

    const double expo1 = 0.2 - kBeta * 0.75;
    int domain_failures = 0;
    for (;;) {
        if (stats_.accepted + stats_.rejected >= cfg_.max_steps) {
            throw ConvergenceError("max_steps exceeded at " + state_string(t_, y_));
        }
        double h = std::min(h_, cfg_.max_step);
        if (t_ + 1.01 * h >= t_stop) h = t_stop - t_;
        if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_))) {
            if (domain_failures > 0) {
                throw DomainError("step size underflow at the domain boundary, last valid " +
                                  state_string(t_, y_));
            }
            throw ConvergenceError("step size underflow at " + state_string(t_, y_));
        }

        Vec2 k2, k3, k4, k5, k6, k7, y1;
        try {
            k2 = eval(t_ + c2 * h, axpy(y_, h, {{a21, &k1_}}));
            k3 = eval(t_ + c3 * h, axpy(y_, h, {{a31, &k1_}, {a32, &k2}}));
            k4 = eval(t_ + c4 * h, axpy(y_, h, {{a41, &k1_}, {a42, &k2}, {a43, &k3}}));
            k5 = eval(t_ + c5 * h, axpy(y_, h, {{a51, &k1_}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
            k6 = eval(t_ + h,
                      axpy(y_, h, {{a61, &k1_}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
            y1 = axpy(y_, h, {{a71, &k1_}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
            k7 = eval(t_ + h, y1);
        } catch (const DomainError& e) {
            ++stats_.domain_rejections;
            if (++domain_failures > kMaxDomainRetries) {
                throw DomainError(std::string(e.what()) + "; last valid " + state_string(t_, y_));
            }
            h_ = 0.25 * h;
            last_rejected_ = true;
            continue;
        }

        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double ei =
                h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sk =
                cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y_[i]), std::abs(y1[i]));
            err += (ei / sk) * (ei / sk);
        }
        err = std::sqrt(err / 2.0);
        if (!std::isfinite(err)) err = 1e10;

        const double fac11 = std::pow(err, expo1);
        if (err <= 1.0) {
            double fac = fac11 / std::pow(facold_, kBeta);
            fac = std::max(1.0 / kFacMax, std::min(1.0 / kFacMin, fac / kSafety));
            double hnew = h / fac;
            facold_ = std::max(err, 1e-4);

            seg_.t0 = t_;
            seg_.h = h;
            for (int i = 0; i < 2; ++i) {
                const double ydiff = y1[i] - y_[i];
                const double bspl = h * k1_[i] - ydiff;
                seg_.coeff[0][i] = y_[i];
                seg_.coeff[1][i] = ydiff;
                seg_.coeff[2][i] = bspl;
                seg_.coeff[3][i] = ydiff - h * k7[i] - bspl;
                seg_.coeff[4][i] = h * (d1 * k1_[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                        d6 * k6[i] + d7 * k7[i]);
            }

            ++stats_.accepted;
            stats_.min_step = std::min(stats_.min_step, h);
            stats_.max_step = std::max(stats_.max_step, h);
            if (cfg_.stiffness_guard && stats_.warnings.size() < 10 && stats_.accepted % 100000 == 0 &&
                stats_.rejected > stats_.accepted) {
                stats_.warnings.push_back("more rejected than accepted steps by " +
                                          state_string(t_, y_));
            }
            if (cfg_.stiffness_guard && stats_.warnings.size() < 10 &&
                h < 1e-10 * std::max(1.0, std::abs(t_))) {
                stats_.warnings.push_back("step size collapsed to " + std::to_string(h) + " at " +
                                          state_string(t_, y_));
            }

            t_ = (t_stop - (t_ + h) <= 0.0 || h == t_stop - t_) ? t_stop : t_ + h;
            y_ = y1;
            k1_ = k7;
            if (last_rejected_) hnew = std::min(hnew, h);
            last_rejected_ = false;
            h_ = hnew;
            return true;
        }
        h_ = h / std::min(1.0 / kFacMin, fac11 / kSafety);
        last_rejected_ = true;
        ++stats_.rejected;
    }
}

Vec2 Trajectory::at(double t) const {
    if (segments_.empty()) {
        if (t == initial_time) return initial_state;
        throw RangeError("empty trajectory");
    }
    if (t < t_begin() || t > t_end()) {
        std::ostringstream os;
        os << "time " << t << " outside [" << t_begin() << ", " << t_end() << "]";
        throw RangeError(os.str());
    }
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const DenseSegment& s) { return v < s.t0; });
    if (it != segments_.begin()) --it;
    return it->at(t);
}

std::vector<double> Trajectory::times() const {
    std::vector<double> ts{initial_time};
    for (const auto& s : segments_) ts.push_back(s.t1());
    return ts;
}

std::vector<Vec2> Trajectory::states() const {
    std::vector<Vec2> ys{initial_state};
    for (const auto& s : segments_) ys.push_back(s.end());
    return ys;
}

Trajectory integrate(const PlanarField& rhs, const Vec2& y0, double t0, double t1,
                     const IntegratorConfig& cfg) {
    if (!(t1 >= t0)) throw DomainError("integrate requires t1 >= t0");
    Trajectory traj;
    traj.initial_state = y0;
    traj.initial_time = t0;
    if (t1 == t0) return traj;
    Dopri5 stepper(rhs, t0, y0, cfg);
    while (stepper.step(t1)) traj.append(stepper.last_segment());
    traj.stats = stepper.stats();
    return traj;
}

CrossingResult crossings_in_segment(const DenseSegment& s, const EventFunction& event,
                                    const CrossingOptions& opts) {
    CrossingResult out;
    const int n = std::max(1, opts.samples_per_step);
    std::vector<double> ts(n + 1), es(n + 1);
    for (int j = 0; j <= n; ++j) {
        ts[j] = j == n ? s.t1() : s.t0 + s.h * j / n;
        es[j] = event(ts[j], j == 0 ? s.start() : (j == n ? s.end() : s.at(ts[j])));
    }
    auto on_interp = [&](double t) { return event(t, s.at(t)); };
    auto wanted = [&](bool up) {
        return opts.direction == CrossingDirection::Both ||
               (up ? opts.direction == CrossingDirection::Up
                   : opts.direction == CrossingDirection::Down);
    };
    auto refine = [&](double lo, double hi) {
        return find_root(on_interp, lo, hi, RootOptions{.x_tol = 0.0});
    };
    const double graze_tol = 1e-9 * opts.scale;

    for (int j = 0; j < n; ++j) {
        // A crossing belongs to the half-open interval (t_j, t_{j+1}].
        const bool up = es[j] < 0.0 && es[j + 1] >= 0.0;
        const bool down = es[j] > 0.0 && es[j + 1] <= 0.0;
        if ((up || down) && wanted(up)) out.crossings.push_back({refine(ts[j], ts[j + 1]), up, false});

        // Interior extremum of the event pointing towards zero: possible graze.
        if (j == 0 || up || down || (es[j - 1] < 0.0 && es[j] >= 0.0) ||
            (es[j - 1] > 0.0 && es[j] <= 0.0)) {
            continue;
        }
        const double sign = es[j] > 0.0 ? 1.0 : -1.0;
        if (!(sign * es[j] < sign * es[j - 1] && sign * es[j] < sign * es[j + 1])) continue;
        // Golden-section search for the extremum of sign * event on [t_{j-1}, t_{j+1}].
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = ts[j - 1], b = ts[j + 1];
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = sign * on_interp(x1), f2 = sign * on_interp(x2);
        for (int it = 0; it < 80 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = sign * on_interp(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = sign * on_interp(x2);
            }
        }
        const double tm = 0.5 * (a + b);
        const double em = on_interp(tm);
        if (sign * em < 0.0) {
            // Two nearby crossings hidden between samples.
            const double first = refine(ts[j - 1], tm);
            const double second = refine(tm, ts[j + 1]);
            // A positive event dips below zero (down, then up); a negative one pokes above.
            const bool dips = sign > 0.0;
            if (wanted(!dips)) out.crossings.push_back({first, !dips, true});
            if (wanted(dips)) out.crossings.push_back({second, dips, true});
        } else if (std::abs(em) <= graze_tol) {
            out.touches.push_back(tm);
        }
    }
    std::sort(out.crossings.begin(), out.crossings.end(),
              [](const Crossing& l, const Crossing& r) { return l.t < r.t; });
    for (std::size_t i = 1; i < out.crossings.size(); ++i) {
        if (out.crossings[i].upward != out.crossings[i - 1].upward &&
            out.crossings[i].t - out.crossings[i - 1].t < 1e-3 * s.h) {
            out.crossings[i].grazing = out.crossings[i - 1].grazing = true;
        }
    }
    return out;
}

CrossingResult detect_crossings(const Trajectory& traj, const EventFunction& event,
                                const CrossingOptions& opts) {
    CrossingResult all;
    for (const auto& s : traj.segments()) {
        auto part = crossings_in_segment(s, event, opts);
        all.crossings.insert(all.crossings.end(), part.crossings.begin(), part.crossings.end());
        all.touches.insert(all.touches.end(), part.touches.begin(), part.touches.end());
    }
    return all;
}

PlanarField reduced_field(const Nullclines& nc, double nu) {
    return [&nc, nu](double, const Vec2& s) {
        const ReducedRates r = reduced_rhs({s[0], s[1]}, nu, nc);
        return Vec2{r.dx, r.dy};
    };
}

PlanarField full_field(const FullParams& p) {
    return [p](double, const Vec2& s) {
        const FullRates r = full_rhs({s[0], s[1]}, p);
        return Vec2{r.dtheta, r.dlambda};
    };
}

namespace {

struct Extents {
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -std::numeric_limits<double>::infinity();
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();

    void add(const Vec2& v) {
        x_min = std::min(x_min, v[0]);
        x_max = std::max(x_max, v[0]);
        y_min = std::min(y_min, v[1]);
        y_max = std::max(y_max, v[1]);
    }
};

void add_segment(Extents& e, const DenseSegment& s) {
    e.add(s.at(s.t0 + 0.25 * s.h));
    e.add(s.at(s.t0 + 0.5 * s.h));
    e.add(s.at(s.t0 + 0.75 * s.h));
    e.add(s.end());
}

double mean_of_last(const std::vector<double>& v, std::size_t count, std::size_t skip_back) {
    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) sum += v[v.size() - 1 - skip_back - i];
    return sum / static_cast<double>(count);
}

}  // namespace

LimitCycleMeasurement measure_limit_cycle(const Nullclines& nc, double nu,
                                          const IntegratorConfig& cfg,
                                          const LimitCycleOptions& opts) {
    if (opts.average_returns < 1 || opts.transient_returns < 0 || opts.max_returns < 2 ||
        !(opts.period_tol > 0.0) || opts.samples < 0) {
        throw ConfigError("invalid limit-cycle options");
    }
    const AssumptionReport rep = check_assumptions(nc, nu);
    if (!rep.all()) {
        std::string msg = "no relaxation limit cycle expected:";
        for (const auto& m : rep.messages) msg += " " + m + ";";
        throw AssumptionError(msg);
    }
    const double xc = rep.critical->x_c;
    const Vec2 seed = opts.seed.value_or(
        Vec2{xc + 0.1 * (rep.folds.x_plus - rep.folds.x_minus), rep.critical->y_c});

    Dopri5 stepper(reduced_field(nc, nu), 0.0, seed, cfg);
    const double inf = std::numeric_limits<double>::infinity();

    LimitCycleMeasurement m;
    Extents current, finished;
    current.add(seed);
    double e_prev = seed[0] - xc;
    const std::size_t need = static_cast<std::size_t>(opts.average_returns) + 1;
    while (!m.converged) {
        stepper.step(inf);
        const DenseSegment& s = stepper.last_segment();
        add_segment(current, s);
        const double e_now = s.end()[0] - xc;
        if (e_prev < 0.0 && e_now >= 0.0) {
            const double tc = find_root([&](double t) { return s.at(t)[0] - xc; }, s.t0, s.t1(),
                                        RootOptions{.x_tol = 0.0});
            m.crossings.push_back(tc);
            finished = current;
            current = Extents{};
            current.add(s.end());
            if (m.crossings.size() > static_cast<std::size_t>(opts.transient_returns) + 1) {
                m.intervals.push_back(m.crossings.back() - m.crossings[m.crossings.size() - 2]);
            }
            if (m.intervals.size() >= need) {
                const double now = mean_of_last(m.intervals, opts.average_returns, 0);
                const double before = mean_of_last(m.intervals, opts.average_returns, 1);
                if (std::abs(now - before) <= opts.period_tol * now) {
                    m.converged = true;
                    m.period = now;
                }
            }
            if (!m.converged && m.crossings.size() >= static_cast<std::size_t>(opts.max_returns)) {
                std::ostringstream os;
                os.precision(12);
                os << "limit cycle did not converge after " << m.crossings.size()
                   << " returns; intervals:";
                for (double v : m.intervals) os << ' ' << v;
                throw ConvergenceError(os.str());
            }
        }
        e_prev = e_now;
    }
    m.x_min = finished.x_min;
    m.x_max = finished.x_max;
    m.y_min = finished.y_min;
    m.y_max = finished.y_max;
    m.amplitude_x = m.x_max - m.x_min;
    m.amplitude_y = m.y_max - m.y_min;

    if (opts.samples > 0) {
        const double t_start = m.crossings.back();
        const double t_end = t_start + m.period;
        const int n = opts.samples;
        auto sample_time = [&](int j) { return j == n ? t_end : t_start + m.period * j / n; };
        int j = 0;
        const DenseSegment* seg = &stepper.last_segment();
        for (;;) {
            while (j <= n && sample_time(j) <= seg->t1()) {
                m.sample_times.push_back(sample_time(j));
                m.samples.push_back(seg->at(sample_time(j)));
                ++j;
            }
            if (j > n || !stepper.step(t_end)) break;
            seg = &stepper.last_segment();
        }
        if (j <= n) {
            m.sample_times.push_back(t_end);
            m.samples.push_back(stepper.y());
        }
    }
    m.stats = stepper.stats();
    return m;
}

LimitCycleMeasurement measure_limit_cycle(const ReducedParams& rp, const IntegratorConfig& cfg,
                                          const LimitCycleOptions& opts) {
    find_folds(rp);
    const SigmoidNullclines nc(rp);
    return measure_limit_cycle(nc, rp.nu, cfg, opts);
}

}  // namespace glacia
