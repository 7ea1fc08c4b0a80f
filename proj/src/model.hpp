#pragma once

#include <span>
#include <vector>

namespace dyadic {

/// Shell ratio matching the functional estimates of 3D Euler.
inline constexpr double kLambdaEuler3d = 5.656854249492380195206754896838;  // 2^{5/2}

/// The five model constants plus the truncation level.
///
/// The system evolves shell coefficients a_0..a_{shells-1} by
///   da_j/dt = alpha (lambda^j a_{j-1}^2 - lambda^{j+1} a_j a_{j+1})
///           + beta  (lambda^j a_{j-1} a_j - lambda^{j+1} a_{j+1}^2)
///           - nu lambda^{2 gamma j} a_j
/// with the boundary convention a_{-1} = 0 and the Galerkin closure
/// a_J = 0 (J = shells). The closure keeps the inviscid truncated system
/// exactly energy conserving.
struct ModelParams {
    double lambda = 2.0;  ///< shell ratio, > 1
    double alpha = 1.0;   ///< forward-transfer coupling, >= 0
    double beta = 0.0;    ///< Obukhov-type coupling, >= 0
    double nu = 0.0;      ///< dissipation strength, >= 0
    double gamma = 0.5;   ///< dissipation degree, > 0 (ignored when nu = 0)
    int shells = 24;      ///< truncation level J, >= 2

    bool operator==(const ModelParams&) const = default;
};

/// Time plus the finite coefficient sequence (a_0, ..., a_{J-1}).
struct ShellState {
    double t = 0.0;
    std::vector<double> a;
};

/// Same trajectory point in the rescaled variables b_j = lambda^j a_j.
struct RescaledState {
    double t = 0.0;
    std::vector<double> b;
};

/// Constant force applied to shell 0 only. f0 = 0 is the unforced system.
struct ForcingSpec {
    double f0 = 0.0;
};

/// Immutable model with precomputed per-shell tables (lambda^j and the
/// dissipation rates nu lambda^{2 gamma j}); all evaluations are pure and
/// O(J) with no allocation beyond the caller-provided output.
class Model {
public:
    explicit Model(const ModelParams& params);

    const ModelParams& params() const { return params_; }
    int shells() const { return params_.shells; }

    /// lambda^j for j in [0, shells].
    double lambda_pow(int j) const { return lambda_pow_[static_cast<size_t>(j)]; }
    /// nu lambda^{2 gamma j}, the exact per-shell linear decay rate.
    double dissipation_rate(int j) const { return diss_rate_[static_cast<size_t>(j)]; }
    std::span<const double> dissipation_rates() const { return diss_rate_; }

    /// Full right-hand side da_j/dt including dissipation and forcing.
    void rhs(std::span<const double> a, const ForcingSpec& forcing, std::span<double> out) const;
    std::vector<double> rhs(std::span<const double> a, const ForcingSpec& forcing = {}) const;

    /// Quadratic-plus-forcing part only (dissipation excluded). This is the
    /// piece the integrator advances explicitly; the diagonal linear part is
    /// handled by integrating factors.
    void rhs_nonstiff(std::span<const double> a, const ForcingSpec& forcing, std::span<double> out) const;

    /// Right-hand side in the rescaled variables b_j = lambda^j a_j:
    ///   db_j/dt = (lambda^2 b_{j-1}^2 - b_j b_{j+1})
    ///           + beta (lambda b_{j-1} b_j - lambda^{-1} b_{j+1}^2)
    ///           - nu lambda^{2 gamma j} b_j.
    /// Requires alpha = 1 (the normalized form). General (alpha, nu) reduce
    /// to alpha = nu = 1 by the rescaling a_j(t) = (nu/alpha) q_j(nu t).
    void rhs_rescaled(std::span<const double> b, std::span<double> out) const;
    std::vector<double> rhs_rescaled(std::span<const double> b) const;

private:
    ModelParams params_;
    std::vector<double> lambda_pow_;  // lambda^j, j = 0..shells
    std::vector<double> diss_rate_;   // nu lambda^{2 gamma j}, j = 0..shells-1
};

RescaledState to_rescaled(const Model& model, const ShellState& state);
ShellState from_rescaled(const Model& model, const RescaledState& state);

}  // namespace dyadic
