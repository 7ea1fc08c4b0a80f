#include "integrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "summation.hpp"

namespace dyadic {

void StepControl::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw std::invalid_argument("tolerances must be > 0");
    if (!(dt_min > 0.0) || !(dt_init > 0.0) || !(dt_max > 0.0)) {
        throw std::invalid_argument("step sizes must be > 0");
    }
    if (!(dt_min <= dt_init && dt_init <= dt_max)) {
        throw std::invalid_argument("need dt_min <= dt_init <= dt_max");
    }
    if (!(safety > 0.0 && safety < 1.0)) throw std::invalid_argument("safety must be in (0, 1)");
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::ReachedTEnd: return "ReachedTEnd";
        case Termination::NormCapExceeded: return "NormCapExceeded";
        case Termination::StepFloorHit: return "StepFloorHit";
        case Termination::MaxSteps: return "MaxSteps";
        case Termination::NumericalFailure: return "NumericalFailure";
    }
    return "Unknown";
}

namespace {

// Dormand-Prince 5(4). B is the 5th-order row (equal to the last A row, so
// stage 7 evaluates the right-hand side at the accepted endpoint), BH the
// embedded 4th-order weights.
constexpr int kStages = 7;
constexpr std::array<double, kStages> kC = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr std::array<std::array<double, 6>, kStages> kA = {{
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
}};
constexpr std::array<double, kStages> kB = {35.0 / 384,     0.0,        500.0 / 1113, 125.0 / 192,
                                            -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr std::array<double, kStages> kBH = {5179.0 / 57600,    0.0,          7571.0 / 16695,
                                             393.0 / 640,       -92097.0 / 339200,
                                             187.0 / 2100,      1.0 / 40};

// Exponents of the per-shell integrating factors exp(-delta * h * d_j):
// kC[i] scales the transported initial state of stage i, kC[i] - kC[l] the
// transport of stage derivative l into stage i, 1 - kC[i] the transport
// into the endpoint combination. All are >= 0 because kC is nondecreasing,
// so the factors stay in (0, 1] and never overflow.
struct DeltaTable {
    std::array<double, 24> values{};
    int count = 0;
    std::array<int, kStages> state_slot{};                       // for kC[i]
    std::array<std::array<int, kStages>, kStages> stage_slot{};  // for kC[i]-kC[l]
    std::array<int, kStages> end_slot{};                         // for 1-kC[i]

    int intern(double v) {
        for (int i = 0; i < count; ++i) {
            if (values[static_cast<size_t>(i)] == v) return i;
        }
        values[static_cast<size_t>(count)] = v;
        return count++;
    }
};

DeltaTable build_delta_table() {
    DeltaTable t;
    for (int i = 0; i < kStages; ++i) {
        t.state_slot[static_cast<size_t>(i)] = t.intern(kC[static_cast<size_t>(i)]);
        for (int l = 0; l < i; ++l) {
            t.stage_slot[static_cast<size_t>(i)][static_cast<size_t>(l)] =
                t.intern(kC[static_cast<size_t>(i)] - kC[static_cast<size_t>(l)]);
        }
        t.end_slot[static_cast<size_t>(i)] = t.intern(1.0 - kC[static_cast<size_t>(i)]);
    }
    return t;
}

const DeltaTable kDeltas = build_delta_table();

class Stepper {
public:
    Stepper(const Model& model, const StepControl& ctrl, const ForcingSpec& forcing)
        : model_(model), ctrl_(ctrl), forcing_(forcing), n_(model.shells()) {
        ctrl.validate();
        for (auto& k : k_) k.resize(static_cast<size_t>(n_));
        stage_.resize(static_cast<size_t>(n_));
        next_.resize(static_cast<size_t>(n_));
        stiff_ = model.params().nu != 0.0;
        if (stiff_) {
            exp_.resize(static_cast<size_t>(kDeltas.count) * static_cast<size_t>(n_));
        }
    }

    // One attempted step of size h from a (finite) state. On acceptance,
    // `out` holds the endpoint and k7 the nonstiff right-hand side there.
    // Returns the error ratio relative to tolerance per unit time.
    double attempt(std::span<const double> a, double h, std::span<double> out) {
        if (stiff_) fill_exp(h);
        model_.rhs_nonstiff(a, forcing_, k_[0]);
        for (int i = 1; i < kStages; ++i) {
            for (int j = 0; j < n_; ++j) {
                double acc = factor(kDeltas.state_slot[static_cast<size_t>(i)], j) * a[j];
                for (int l = 0; l < i; ++l) {
                    const double alc = kA[static_cast<size_t>(i)][static_cast<size_t>(l)];
                    if (alc == 0.0) continue;
                    acc += h * alc *
                           factor(kDeltas.stage_slot[static_cast<size_t>(i)][static_cast<size_t>(l)], j) *
                           k_[static_cast<size_t>(l)][j];
                }
                stage_[static_cast<size_t>(j)] = acc;
            }
            if (i == kStages - 1) {
                // kB equals the last kA row, so the last stage value is the
                // endpoint itself.
                std::copy(stage_.begin(), stage_.end(), out.begin());
            }
            if (!finite(stage_)) return std::numeric_limits<double>::infinity();
            model_.rhs_nonstiff(stage_, forcing_, k_[static_cast<size_t>(i)]);
        }

        double worst = 0.0;
        for (int j = 0; j < n_; ++j) {
            double err = 0.0;
            for (int i = 0; i < kStages; ++i) {
                const double d = kB[static_cast<size_t>(i)] - kBH[static_cast<size_t>(i)];
                if (d == 0.0) continue;
                err += d * factor(kDeltas.end_slot[static_cast<size_t>(i)], j) *
                       k_[static_cast<size_t>(i)][j];
            }
            err *= h;
            const double scale =
                ctrl_.abs_tol + ctrl_.rel_tol * std::max(std::abs(a[j]), std::abs(out[j]));
            worst = std::max(worst, std::abs(err) / scale);
        }
        if (!std::isfinite(worst)) return std::numeric_limits<double>::infinity();
        last_error_ = worst;
        return worst / h;
    }

    // Full derivative (with dissipation) at the endpoint of an accepted
    // step, reusing the last stage evaluation.
    void endpoint_derivative(std::span<const double> a_new, std::span<double> f) const {
        const auto rates = model_.dissipation_rates();
        for (int j = 0; j < n_; ++j) {
            f[j] = k_[kStages - 1][j] - (stiff_ ? rates[static_cast<size_t>(j)] * a_new[j] : 0.0);
        }
    }

    double last_error() const { return last_error_; }

    double propose_dt(double h, double ratio, bool previous_rejected) const {
        const double r = std::max(ratio, 1e-14);
        double fac = ctrl_.safety * std::pow(r, -0.25);
        fac = std::clamp(fac, 0.2, 5.0);
        if (previous_rejected) fac = std::min(fac, 1.0);
        return std::clamp(h * fac, ctrl_.dt_min, ctrl_.dt_max);
    }

private:
    static bool finite(const std::vector<double>& v) {
        for (double x : v) {
            if (!std::isfinite(x)) return false;
        }
        return true;
    }

    double factor(int slot, int j) const {
        if (!stiff_) return 1.0;
        return exp_[static_cast<size_t>(slot) * static_cast<size_t>(n_) + static_cast<size_t>(j)];
    }

    void fill_exp(double h) {
        const auto rates = model_.dissipation_rates();
        for (int s = 0; s < kDeltas.count; ++s) {
            const double delta = kDeltas.values[static_cast<size_t>(s)];
            double* row = exp_.data() + static_cast<size_t>(s) * static_cast<size_t>(n_);
            if (delta == 0.0) {
                std::fill(row, row + n_, 1.0);
            } else {
                for (int j = 0; j < n_; ++j) {
                    row[j] = std::exp(-delta * h * rates[static_cast<size_t>(j)]);
                }
            }
        }
    }

    const Model& model_;
    StepControl ctrl_;
    ForcingSpec forcing_;
    int n_;
    bool stiff_ = false;
    std::array<std::vector<double>, kStages> k_;
    std::vector<double> stage_;
    std::vector<double> next_;
    std::vector<double> exp_;
    double last_error_ = 0.0;
};

void hermite(std::span<const double> a0, std::span<const double> f0, std::span<const double> a1,
             std::span<const double> f1, double t0, double h, double tau, std::span<double> out) {
    const double th = (tau - t0) / h;
    const double th2 = th * th;
    const double th3 = th2 * th;
    const double h00 = 2 * th3 - 3 * th2 + 1;
    const double h10 = th3 - 2 * th2 + th;
    const double h01 = -2 * th3 + 3 * th2;
    const double h11 = th3 - th2;
    for (size_t j = 0; j < a0.size(); ++j) {
        out[j] = h00 * a0[j] + h10 * h * f0[j] + h01 * a1[j] + h11 * h * f1[j];
    }
}

}  // namespace

StepResult step(const Model& model, const ShellState& state, const ForcingSpec& forcing,
                const StepControl& ctrl, double dt) {
    ctrl.validate();
    if (!(dt >= ctrl.dt_min && dt <= ctrl.dt_max)) {
        throw std::invalid_argument("step: dt outside [dt_min, dt_max]");
    }
    Stepper stepper(model, ctrl, forcing);
    StepResult res;
    res.state = state;
    std::vector<double> out(state.a.size());
    const double ratio = stepper.attempt(state.a, dt, out);
    res.error_estimate = stepper.last_error();
    res.accepted = ratio <= 1.0;
    if (res.accepted) {
        res.state.t = state.t + dt;
        res.state.a = std::move(out);
    }
    res.dt_next = stepper.propose_dt(dt, ratio, !res.accepted);
    return res;
}

Trajectory integrate(const Model& model, const ShellState& state0, const ForcingSpec& forcing,
                     const StepControl& ctrl, const StopCondition& stop,
                     const DiagnosticsSpec& diag) {
    ctrl.validate();
    if (!(stop.t_end > state0.t)) throw std::invalid_argument("t_end must exceed the start time");
    if (!(stop.norm_cap > 0.0)) throw std::invalid_argument("norm_cap must be > 0");
    if (stop.max_steps <= 0) throw std::invalid_argument("max_steps must be positive");
    if (!(diag.sample_every > 0.0)) throw std::invalid_argument("sample_every must be > 0");
    const int n = model.shells();
    if (static_cast<int>(state0.a.size()) != n) {
        throw std::invalid_argument("initial state length does not match shells (J)");
    }

    Trajectory traj;
    auto emit = [&](double t, std::span<const double> a) {
        Sample s;
        s.state.t = t;
        s.state.a.assign(a.begin(), a.end());
        s.record = make_record(model, t, a, diag, stop.norm_s);
        traj.samples.push_back(std::move(s));
    };

    std::vector<double> a = state0.a;
    for (double x : a) {
        if (!std::isfinite(x)) {
            traj.termination = Termination::NumericalFailure;
            traj.final_state = state0;
            return traj;
        }
    }

    Stepper stepper(model, ctrl, forcing);
    std::vector<double> a_new(static_cast<size_t>(n));
    std::vector<double> f_prev(static_cast<size_t>(n));
    std::vector<double> f_new(static_cast<size_t>(n));
    std::vector<double> interp(static_cast<size_t>(n));

    model.rhs(a, forcing, f_prev);
    double t = state0.t;
    emit(t, a);
    std::int64_t sample_index = 1;
    auto next_sample_time = [&] { return state0.t + static_cast<double>(sample_index) * diag.sample_every; };

    double dt = std::clamp(ctrl.dt_init, ctrl.dt_min, ctrl.dt_max);
    bool rejected_last = false;
    Termination reason = Termination::MaxSteps;

    std::int64_t attempts = 0;
    while (attempts < stop.max_steps) {
        ++attempts;
        const bool landing = t + dt >= stop.t_end;
        const double h = landing ? stop.t_end - t : dt;
        const double ratio = stepper.attempt(a, h, a_new);
        if (ratio > 1.0) {
            ++traj.steps_rejected;
            if (h <= ctrl.dt_min * (1.0 + 1e-12)) {
                reason = std::isfinite(ratio) ? Termination::StepFloorHit
                                              : Termination::NumericalFailure;
                break;
            }
            dt = stepper.propose_dt(h, ratio, true);
            rejected_last = true;
            continue;
        }
        ++traj.steps_accepted;
        const double t_new = landing ? stop.t_end : t + h;
        stepper.endpoint_derivative(a_new, f_new);

        while (next_sample_time() <= t_new + 1e-12 * std::max(1.0, std::abs(t_new))) {
            const double tau = next_sample_time();
            if (tau >= t_new) {
                emit(t_new, a_new);
            } else {
                hermite(a, f_prev, a_new, f_new, t, h, tau, interp);
                emit(tau, interp);
            }
            ++sample_index;
        }

        t = t_new;
        a.swap(a_new);
        f_prev.swap(f_new);

        bool finite_state = true;
        for (double x : a) {
            if (!std::isfinite(x)) {
                finite_state = false;
                break;
            }
        }
        if (!finite_state) {
            reason = Termination::NumericalFailure;
            break;
        }
        if (sobolev_norm(a, stop.norm_s) > stop.norm_cap) {
            reason = Termination::NormCapExceeded;
            break;
        }
        if (t >= stop.t_end) {
            reason = Termination::ReachedTEnd;
            break;
        }
        if (!landing) dt = stepper.propose_dt(h, ratio, rejected_last);
        rejected_last = false;
    }

    if (traj.samples.empty() || traj.samples.back().state.t < t - 1e-15 * std::max(1.0, std::abs(t))) {
        emit(t, a);
    }
    traj.termination = reason;
    traj.final_state.t = t;
    traj.final_state.a = std::move(a);
    return traj;
}

BlowupEstimate estimate_blowup_time(std::span<const double> t, std::span<const double> l_series) {
    if (t.size() != l_series.size()) throw std::invalid_argument("series length mismatch");

    std::vector<double> ts, ls;
    for (size_t i = 0; i < t.size(); ++i) {
        if (l_series[i] > 0.0) {
            ts.push_back(t[i]);
            ls.push_back(l_series[i]);
        }
    }
    if (ts.size() < 3) throw std::invalid_argument("need at least 3 samples with L > 0");

    // Trailing quarter of the samples with L >= 10 L0; progressively fall
    // back when the series is too short for that rule.
    size_t begin = 0;
    const double l0 = ls.front();
    std::vector<size_t> qualified;
    for (size_t i = 0; i < ls.size(); ++i) {
        if (ls[i] >= 10.0 * l0) qualified.push_back(i);
    }
    std::vector<size_t> window;
    if (qualified.size() >= 12) {
        const size_t keep = std::max<size_t>(3, qualified.size() / 4);
        window.assign(qualified.end() - static_cast<std::ptrdiff_t>(keep), qualified.end());
    } else if (qualified.size() >= 3) {
        window = qualified;
    } else {
        const size_t keep = std::max<size_t>(3, ls.size() / 4);
        begin = ls.size() - keep;
        for (size_t i = begin; i < ls.size(); ++i) window.push_back(i);
    }

    for (size_t k = 1; k < window.size(); ++k) {
        if (!(ls[window[k]] > ls[window[k - 1]])) {
            throw NoBlowupTrend("L is not increasing over the fit window");
        }
    }

    // Least squares y = q + m x with y = 1/L.
    const auto m_count = static_cast<double>(window.size());
    CompensatedSum sx, sy, sxx, sxy;
    for (size_t i : window) {
        const double x = ts[i];
        const double y = 1.0 / ls[i];
        sx.add(x);
        sy.add(y);
        sxx.add(x * x);
        sxy.add(x * y);
    }
    const double det = m_count * sxx.value() - sx.value() * sx.value();
    if (det == 0.0) throw NoBlowupTrend("degenerate fit window");
    const double slope = (m_count * sxy.value() - sx.value() * sy.value()) / det;
    const double intercept = (sxx.value() * sy.value() - sx.value() * sxy.value()) / det;
    if (!(slope < 0.0)) throw NoBlowupTrend("1/L is not decreasing over the fit window");

    CompensatedSum res2, yy2;
    for (size_t i : window) {
        const double y = 1.0 / ls[i];
        const double r = y - (intercept + slope * ts[i]);
        res2.add(r * r);
        yy2.add(y * y);
    }
    BlowupEstimate est;
    est.t_est = -intercept / slope;
    est.fit_residual = yy2.value() > 0.0 ? std::sqrt(res2.value() / yy2.value()) : 0.0;
    return est;
}

}  // namespace dyadic
