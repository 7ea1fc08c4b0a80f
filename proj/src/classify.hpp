#pragma once

#include <string>
#include <vector>

namespace dyadic {

/// Coefficients of a generic nearest-neighbor quadratic system
///   F_j = sum_{mu1 <= mu2} C_{mu1,mu2} lambda^j a_{j+mu1} a_{j+mu2},
/// mu in {-1, 0, +1}, stored over unordered monomials (C symmetric).
struct GenericModelCoefficients {
    double c_mm = 0.0;  ///< C_{-1,-1}
    double c_m0 = 0.0;  ///< C_{-1, 0}
    double c_mp = 0.0;  ///< C_{-1,+1}
    double c_00 = 0.0;  ///< C_{ 0, 0}
    double c_0p = 0.0;  ///< C_{ 0,+1}
    double c_pp = 0.0;  ///< C_{+1,+1}

    /// Coefficients of the two-parameter energy-conserving family:
    /// C_{-1,-1} = alpha, C_{0,+1} = -lambda alpha,
    /// C_{-1,0} = beta, C_{+1,+1} = -lambda beta.
    static GenericModelCoefficients standard_form(double alpha, double beta, double lambda);

    double coeff(int mu1, int mu2) const;
    bool operator==(const GenericModelCoefficients&) const = default;
};

struct ClassifyOutcome {
    bool conservative = false;
    /// Valid when conservative: the unique (alpha, beta) putting the system
    /// in the standard form above.
    double alpha = 0.0;
    double beta = 0.0;
    /// Valid when not conservative: a finitely supported sequence with
    /// d/dt sum a_j^2 != 0, together with that exact derivative value.
    std::vector<double> witness;
    double witness_derivative = 0.0;
    std::string witness_derivative_exact;  // exact rational "p/q"
};

/// Decides whether the generic system formally conserves sum a_j^2 under the
/// j >= 0, a_{-1} = 0 convention. The expansion of sum_j 2 a_j F_j over
/// monomials a_i a_k a_l is carried out in exact rational arithmetic
/// (doubles are dyadic rationals), treating lambda^j as a free formal
/// weight, so both the decision and any witness are exact.
ClassifyOutcome classify_conservative_model(const GenericModelCoefficients& coeffs, double lambda);

}  // namespace dyadic
