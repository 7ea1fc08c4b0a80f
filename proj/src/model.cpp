#include "model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dyadic {

namespace {

void check_finite(std::span<const double> values, const char* what) {
    for (size_t j = 0; j < values.size(); ++j) {
        if (!std::isfinite(values[j])) {
            throw std::domain_error(std::string(what) + " has non-finite coefficient at shell " +
                                    std::to_string(j));
        }
    }
}

}  // namespace

Model::Model(const ModelParams& params) : params_(params) {
    if (!(params.lambda > 1.0)) throw std::invalid_argument("lambda must be > 1");
    if (params.shells < 2) throw std::invalid_argument("shells (J) must be >= 2");
    if (params.alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
    if (params.beta < 0.0) throw std::invalid_argument("beta must be >= 0");
    if (params.nu < 0.0) throw std::invalid_argument("nu must be >= 0");
    if (params.nu > 0.0 && !(params.gamma > 0.0)) {
        throw std::invalid_argument("gamma must be > 0 when nu > 0");
    }

    const int n = params.shells;
    lambda_pow_.resize(static_cast<size_t>(n) + 1);
    diss_rate_.resize(static_cast<size_t>(n));
    for (int j = 0; j <= n; ++j) {
        lambda_pow_[static_cast<size_t>(j)] = std::pow(params.lambda, j);
    }
    for (int j = 0; j < n; ++j) {
        diss_rate_[static_cast<size_t>(j)] =
            params.nu == 0.0 ? 0.0 : params.nu * std::pow(params.lambda, 2.0 * params.gamma * j);
    }
}

void Model::rhs(std::span<const double> a, const ForcingSpec& forcing, std::span<double> out) const {
    rhs_nonstiff(a, forcing, out);
    const int n = params_.shells;
    if (params_.nu != 0.0) {
        for (int j = 0; j < n; ++j) out[j] -= diss_rate_[static_cast<size_t>(j)] * a[j];
    }
}

void Model::rhs_nonstiff(std::span<const double> a, const ForcingSpec& forcing,
                         std::span<double> out) const {
    const int n = params_.shells;
    if (static_cast<int>(a.size()) != n || static_cast<int>(out.size()) != n) {
        throw std::invalid_argument("state length does not match shells (J)");
    }
    check_finite(a, "state");
    if (forcing.f0 < 0.0) throw std::invalid_argument("f0 must be >= 0");

    const double alpha = params_.alpha;
    const double beta = params_.beta;
    for (int j = 0; j < n; ++j) {
        const double prev = j > 0 ? a[j - 1] : 0.0;     // a_{-1} = 0
        const double next = j + 1 < n ? a[j + 1] : 0.0;  // a_J = 0 closure
        const double lj = lambda_pow_[static_cast<size_t>(j)];
        const double lj1 = lambda_pow_[static_cast<size_t>(j) + 1];
        out[j] = alpha * (lj * prev * prev - lj1 * a[j] * next) +
                 beta * (lj * prev * a[j] - lj1 * next * next);
    }
    out[0] += forcing.f0;
}

std::vector<double> Model::rhs(std::span<const double> a, const ForcingSpec& forcing) const {
    std::vector<double> out(a.size());
    rhs(a, forcing, out);
    return out;
}

void Model::rhs_rescaled(std::span<const double> b, std::span<double> out) const {
    if (params_.alpha != 1.0) {
        throw std::invalid_argument("rhs_rescaled assumes the normalized form alpha = 1");
    }
    const int n = params_.shells;
    if (static_cast<int>(b.size()) != n || static_cast<int>(out.size()) != n) {
        throw std::invalid_argument("state length does not match shells (J)");
    }
    check_finite(b, "rescaled state");

    const double lambda = params_.lambda;
    const double lambda2 = lambda * lambda;
    const double beta = params_.beta;
    for (int j = 0; j < n; ++j) {
        const double prev = j > 0 ? b[j - 1] : 0.0;
        const double next = j + 1 < n ? b[j + 1] : 0.0;
        out[j] = (lambda2 * prev * prev - b[j] * next) +
                 beta * (lambda * prev * b[j] - next * next / lambda);
        if (params_.nu != 0.0) out[j] -= diss_rate_[static_cast<size_t>(j)] * b[j];
    }
}

std::vector<double> Model::rhs_rescaled(std::span<const double> b) const {
    std::vector<double> out(b.size());
    rhs_rescaled(b, out);
    return out;
}

RescaledState to_rescaled(const Model& model, const ShellState& state) {
    RescaledState out;
    out.t = state.t;
    out.b.resize(state.a.size());
    for (size_t j = 0; j < state.a.size(); ++j) {
        out.b[j] = model.lambda_pow(static_cast<int>(j)) * state.a[j];
    }
    return out;
}

ShellState from_rescaled(const Model& model, const RescaledState& state) {
    ShellState out;
    out.t = state.t;
    out.a.resize(state.b.size());
    for (size_t j = 0; j < state.b.size(); ++j) {
        out.a[j] = state.b[j] / model.lambda_pow(static_cast<int>(j));
    }
    return out;
}

}  // namespace dyadic
