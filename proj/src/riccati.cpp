#include "riccati.hpp"

#include <cmath>
#include <stdexcept>

#include "summation.hpp"

namespace dyadic {

namespace {

constexpr double kTailFraction = 1e-12;

double weighted_l(const Model& model, std::span<const double> a, double w) {
    CompensatedSum acc;
    double ratio = 1.0;  // (lambda/w)^j
    for (double aj : a) {
        acc.add(aj * ratio);
        ratio *= model.params().lambda / w;
    }
    return acc.value();
}

double exact_dl_dt(const Model& model, std::span<const double> a, double w,
                   std::vector<double>& b, std::vector<double>& db) {
    const size_t n = a.size();
    b.resize(n);
    db.resize(n);
    for (size_t j = 0; j < n; ++j) b[j] = model.lambda_pow(static_cast<int>(j)) * a[j];
    model.rhs_rescaled(b, db);
    CompensatedSum acc;
    double weight = 1.0;
    for (size_t j = 0; j < n; ++j) {
        acc.add(db[j] * weight);
        weight /= w;
    }
    return acc.value();
}

// Three-point first derivative on a possibly uneven grid; one-sided
// second-order stencils at the endpoints.
double fd_derivative(std::span<const double> t, std::span<const double> y, size_t i) {
    const size_t n = t.size();
    size_t i0, i1, i2;
    if (i == 0) {
        i0 = 0;
        i1 = 1;
        i2 = 2;
    } else if (i == n - 1) {
        i0 = n - 3;
        i1 = n - 2;
        i2 = n - 1;
    } else {
        i0 = i - 1;
        i1 = i;
        i2 = i + 1;
    }
    const double x = t[i];
    const double x0 = t[i0], x1 = t[i1], x2 = t[i2];
    const double w0 = (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
    const double w1 = (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2));
    const double w2 = (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
    return w0 * y[i0] + w1 * y[i1] + w2 * y[i2];
}

}  // namespace

std::vector<RiccatiPoint> riccati_residual(const Trajectory& traj, const Model& model,
                                           const Certificate& cert, RiccatiMode mode) {
    const size_t n = traj.samples.size();
    if (n < 5) throw std::invalid_argument("riccati_residual needs at least 5 samples");

    std::vector<double> ts(n), ls(n);
    for (size_t i = 0; i < n; ++i) {
        ts[i] = traj.samples[i].state.t;
        ls[i] = weighted_l(model, traj.samples[i].state.a, cert.w);
    }

    std::vector<RiccatiPoint> out(n);
    std::vector<double> b, db;
    for (size_t i = 0; i < n; ++i) {
        const auto& sample = traj.samples[i];
        const double dldt = mode == RiccatiMode::ExactDerivative
                                ? exact_dl_dt(model, sample.state.a, cert.w, b, db)
                                : fd_derivative(ts, ls, i);
        out[i].t = ts[i];
        out[i].residual = dldt - (cert.c1 * ls[i] * ls[i] - cert.c2);
        out[i].valid = sample.record.tail_energy <= kTailFraction * sample.record.energy;
    }
    return out;
}

}  // namespace dyadic
