#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "diagnostics.hpp"
#include "model.hpp"

namespace dyadic {

/// Adaptive step-size control. Error is controlled per unit time, so the
/// accumulated global drift scales with rel_tol * elapsed time rather than
/// with the number of steps taken.
struct StepControl {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    double dt_init = 1e-6;
    double dt_min = 1e-13;
    double dt_max = 0.1;
    double safety = 0.9;

    void validate() const;
    bool operator==(const StepControl&) const = default;
};

struct StopCondition {
    double t_end = 1.0;
    double norm_s = 1.0;        ///< Sobolev index of the monitored norm
    double norm_cap = 1e6;      ///< blow-up proxy threshold on ||a||_{norm_s}
    std::int64_t max_steps = 20000000;

    bool operator==(const StopCondition&) const = default;
};

enum class Termination {
    ReachedTEnd,
    NormCapExceeded,
    StepFloorHit,
    MaxSteps,
    NumericalFailure,
};

const char* to_string(Termination t);

struct Sample {
    ShellState state;
    SampleRecord record;
};

struct Trajectory {
    std::vector<Sample> samples;  // sample times strictly increasing
    Termination termination = Termination::ReachedTEnd;
    ShellState final_state;
    std::int64_t steps_accepted = 0;
    std::int64_t steps_rejected = 0;
};

struct StepResult {
    ShellState state;       ///< advanced state if accepted, input state otherwise
    bool accepted = false;
    double error_estimate = 0.0;  ///< max over shells of the weighted local error
    double dt_next = 0.0;
};

/// One embedded Dormand-Prince 5(4) step. The diagonal dissipation
/// -nu lambda^{2 gamma j} a_j is integrated exactly per shell by an
/// integrating factor; only the quadratic coupling (plus forcing) is
/// advanced by the explicit stages, so stiffness from lambda^{2 gamma J}
/// never limits the step size. With alpha = beta = f0 = 0 the step
/// reproduces exp(-nu lambda^{2 gamma j} dt) a_j to rounding, any dt.
StepResult step(const Model& model, const ShellState& state, const ForcingSpec& forcing,
                const StepControl& ctrl, double dt);

/// Integrates until a stop condition fires, recording a diagnostics sample
/// at every multiple of sample_every (dense output by cubic Hermite
/// interpolation on accepted steps, so sampling never perturbs step
/// selection). A final sample is always recorded at the termination time.
/// All terminations are reported in the Trajectory, never thrown.
Trajectory integrate(const Model& model, const ShellState& state0, const ForcingSpec& forcing,
                     const StepControl& ctrl, const StopCondition& stop,
                     const DiagnosticsSpec& diag);

struct BlowupEstimate {
    double t_est = 0.0;
    double fit_residual = 0.0;  ///< RMS residual of the 1/L fit over RMS of 1/L
};

struct NoBlowupTrend : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Least-squares linear fit of 1/L against t over a trailing window; the
/// estimated blow-up time is the zero crossing. The window keeps the
/// trailing quarter of samples with L above 10x its initial value (the
/// 1/(T-t) law only holds asymptotically), falling back to the trailing
/// quarter, then to the full series, when too few samples qualify.
/// Throws NoBlowupTrend when L is not increasing over the window.
BlowupEstimate estimate_blowup_time(std::span<const double> t, std::span<const double> l_series);

}  // namespace dyadic
