#pragma once

#include <span>
#include <vector>

#include "model.hpp"

namespace dyadic {

/// The weighted functionals of the rescaled variables b_j = lambda^j a_j:
/// L = sum b_j w^{-j}, A = sum b_j^2 w^{-j}, plus the energy held by the
/// last three shells (a cheap truncation-health indicator).
struct WeightedFunctionals {
    double w = 0.0;
    double l_sum = 0.0;        ///< L
    double a_sum = 0.0;        ///< A (>= 0)
    double tail_energy = 0.0;  ///< sum of a_j^2 over the last 3 shells
};

/// ||a||_s = sqrt(sum 2^{2 s j} a_j^2). The weight base is 2 regardless of
/// the model's lambda. Compensated summation throughout.
double sobolev_norm(std::span<const double> a, double s);

/// E = sum a_j^2.
double energy(std::span<const double> a);

/// E_{j0} = sum_{j <= j0} a_j^2. Requires 0 <= j0 < J.
double truncated_energy(std::span<const double> a, int j0);

/// d/dt E_{j0} for the full model, obtained by telescoping:
///   -2 alpha lambda^{j0+1} a_{j0}^2 a_{j0+1}
///   -2 beta  lambda^{j0+1} a_{j0} a_{j0+1}^2
///   -2 nu sum_{j <= j0} lambda^{2 gamma j} a_j^2
///   +2 f0 a_0.
/// Requires 0 <= j0 < J-1.
double energy_flux(const Model& model, std::span<const double> a, int j0,
                   const ForcingSpec& forcing = {});

WeightedFunctionals weighted_functionals(const Model& model, std::span<const double> a, double w);

/// min over shells of a_j (0 for the empty state).
double positivity_margin(std::span<const double> a);

/// What to record along a trajectory.
struct DiagnosticsSpec {
    std::vector<double> s_list = {1.0};  ///< one H^s column per entry
    double w = 0.0;                      ///< weighted functionals when > 1, off otherwise
    double sample_every = 0.01;

    bool has_weight() const { return w > 1.0; }
    bool operator==(const DiagnosticsSpec&) const = default;
};

/// One sampled diagnostics row. weighted_l / weighted_a are NaN when the
/// spec carries no weight.
struct SampleRecord {
    double t = 0.0;
    double energy = 0.0;
    double hs_monitor = 0.0;  ///< H^s norm at the integrator's monitored index
    double min_a = 0.0;
    double tail_energy = 0.0;
    std::vector<double> hs;  ///< H^s norms, one per s_list entry
    double weighted_l = 0.0;
    double weighted_a = 0.0;
};

SampleRecord make_record(const Model& model, double t, std::span<const double> a,
                         const DiagnosticsSpec& spec, double norm_s_monitor);

}  // namespace dyadic
