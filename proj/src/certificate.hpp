#pragma once

#include <optional>
#include <span>
#include <stdexcept>

namespace dyadic {

/// A verified blow-up certificate for the weighted functional
/// L(t) = sum b_j w^{-j}, b_j = lambda^j a_j: a weight w and constants
/// C1 > 0, C2 >= 0 such that dL/dt >= C1 L^2 - C2 along solutions, so any
/// initial data with L(0) > sqrt(C2/C1) forces finite-time blow-up of L.
///
/// The weight must satisfy three inequalities (all with lambda generic):
///   w^{-1} <= lambda^{-2} 2^{2s}
///   w^{-1} <  lambda^{-4 gamma}                  (viscous only)
///   lambda^2 w^{-1} - w^{1/2} > beta (lambda w^{-1/2} + lambda^{-1} w)
/// and then, with g = lambda^2/w - sqrt(w) - beta (lambda/sqrt(w) + w/lambda)
/// and d = 1 - lambda^{4 gamma}/w,
///   C1 = (1 - 1/w) (g - eta/d),   C2 = 1/(4 eta d)
/// for any eta in (0, g d). In the inviscid case the eta term is dropped:
/// C1 = (1 - 1/w) g and C2 = 0, so the threshold is 0 and every positive-L
/// data qualifies.
struct Certificate {
    double s = 0.0;
    std::optional<double> gamma;  ///< absent = inviscid
    double beta = 0.0;
    double lambda = 2.0;
    double w = 0.0;
    std::optional<double> eta;  ///< absent in the inviscid case
    double c1 = 0.0;
    double c2 = 0.0;
    double threshold = 0.0;  ///< sqrt(c2/c1)
};

/// Admissible weights form a single interval: the first two inequalities
/// are lower bounds on w and the third holds exactly below the unique root
/// of a strictly decreasing function (see admissible_w). The upper endpoint
/// is always open; the lower endpoint is closed only when the H^s bound
/// lambda^2 2^{-2s} is the binding one.
struct WInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = false;
    bool empty = true;

    bool contains(double w) const {
        if (empty) return false;
        return (lo_closed ? w >= lo : w > lo) && w < hi;
    }
};

struct BetaMaxResult {
    double value = 0.0;
    bool attained = false;  ///< false when the supremum sits on an open endpoint
    double w_arg = 0.0;     ///< weight realizing (or approaching) the supremum
};

struct ThetaWindow {
    double lo = 0.0;
    double hi = 0.0;
    bool empty = true;
};

struct InitialDataCheck {
    bool passes = false;
    double margin = 0.0;  ///< L(0) - threshold
    double l0 = 0.0;
};

struct EmptyAdmissibleSet : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The set of weights w > 1 satisfying all applicable inequalities,
/// endpoints resolved to 1e-12. gamma empty means inviscid (the second
/// inequality is dropped).
WInterval admissible_w(double s, std::optional<double> gamma, double beta, double lambda);

/// Supremum over admissible weights of the beta bound
///   (lambda^2/w - sqrt(w)) / (lambda/sqrt(w) + w/lambda),
/// located by golden-section search refined to 1e-10. Certificates exist
/// exactly for beta strictly below this value.
BetaMaxResult beta_max(double s, std::optional<double> gamma, double lambda = 2.0);

/// The beta bound evaluated at the weight w = 2^{2-2s} for lambda = 2:
/// (2^s - 2^{1-2s}) / (1 + 2^{1-3s}). For inviscid 1/3 < s <= 1 this is the
/// supremum itself.
double beta_max_closed_form(double s);

/// Builds a certificate. When w is absent, picks the weight minimizing the
/// threshold (maximizing C1 in the inviscid case); when eta is absent, uses
/// the stationary value eta = g d / 2, which minimizes
/// C2/C1 = const / (eta (g d - eta)) at fixed w. Throws EmptyAdmissibleSet
/// when no weight qualifies.
Certificate make_certificate(double s, std::optional<double> gamma, double beta, double lambda,
                             std::optional<double> w = std::nullopt,
                             std::optional<double> eta = std::nullopt);

/// Exponent window of the initial-data criterion written with w^{-1} = 2^theta:
/// (-4/3, min(2(s-1), -4 gamma)), empty when the upper end is <= -4/3.
ThetaWindow theta_window(double s, double gamma);

/// L(0) = sum lambda^j a_j(0) w^{-j} against the certificate threshold.
InitialDataCheck check_initial_data(std::span<const double> a0, const Certificate& cert);

}  // namespace dyadic
