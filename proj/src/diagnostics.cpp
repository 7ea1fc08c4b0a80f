#include "diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "summation.hpp"

namespace dyadic {

double sobolev_norm(std::span<const double> a, double s) {
    CompensatedSum acc;
    for (size_t j = 0; j < a.size(); ++j) {
        const double weight = std::exp2(2.0 * s * static_cast<double>(j));
        acc.add(weight * a[j] * a[j]);
    }
    return std::sqrt(acc.value());
}

double energy(std::span<const double> a) {
    CompensatedSum acc;
    for (double x : a) acc.add(x * x);
    return acc.value();
}

double truncated_energy(std::span<const double> a, int j0) {
    if (j0 < 0 || j0 >= static_cast<int>(a.size())) {
        throw std::invalid_argument("truncated_energy: j0 out of range");
    }
    CompensatedSum acc;
    for (int j = 0; j <= j0; ++j) acc.add(a[j] * a[j]);
    return acc.value();
}

double energy_flux(const Model& model, std::span<const double> a, int j0,
                   const ForcingSpec& forcing) {
    const auto& p = model.params();
    if (j0 < 0 || j0 >= p.shells - 1) {
        throw std::invalid_argument("energy_flux: j0 out of range (need 0 <= j0 < J-1)");
    }
    const double lj1 = model.lambda_pow(j0 + 1);
    double flux = -2.0 * p.alpha * lj1 * a[j0] * a[j0] * a[j0 + 1] -
                  2.0 * p.beta * lj1 * a[j0] * a[j0 + 1] * a[j0 + 1];
    if (p.nu != 0.0) {
        CompensatedSum diss;
        for (int j = 0; j <= j0; ++j) diss.add(model.dissipation_rate(j) * a[j] * a[j]);
        flux -= 2.0 * diss.value();
    }
    flux += 2.0 * forcing.f0 * a[0];
    return flux;
}

WeightedFunctionals weighted_functionals(const Model& model, std::span<const double> a, double w) {
    if (!(w > 1.0)) throw std::invalid_argument("weighted_functionals: w must be > 1");
    WeightedFunctionals out;
    out.w = w;
    CompensatedSum l_acc, a_acc;
    double weight = 1.0;  // w^{-j}
    for (size_t j = 0; j < a.size(); ++j) {
        const double b = model.lambda_pow(static_cast<int>(j)) * a[j];
        l_acc.add(b * weight);
        a_acc.add(b * b * weight);
        weight /= w;
    }
    out.l_sum = l_acc.value();
    out.a_sum = a_acc.value();
    const size_t n = a.size();
    CompensatedSum tail;
    for (size_t j = n >= 3 ? n - 3 : 0; j < n; ++j) tail.add(a[j] * a[j]);
    out.tail_energy = tail.value();

    // Cauchy-Schwarz: L^2 <= A / (1 - 1/w), with rounding slack.
    const double bound = out.a_sum / (1.0 - 1.0 / w);
    if (out.l_sum * out.l_sum > bound * (1.0 + 1e-9) + 1e-300) {
        throw std::logic_error("weighted_functionals: Cauchy-Schwarz invariant violated");
    }
    return out;
}

double positivity_margin(std::span<const double> a) {
    double m = 0.0;
    bool first = true;
    for (double x : a) {
        if (first || x < m) m = x;
        first = false;
    }
    return m;
}

SampleRecord make_record(const Model& model, double t, std::span<const double> a,
                         const DiagnosticsSpec& spec, double norm_s_monitor) {
    SampleRecord rec;
    rec.t = t;
    rec.energy = energy(a);
    rec.hs_monitor = sobolev_norm(a, norm_s_monitor);
    rec.min_a = positivity_margin(a);
    rec.hs.reserve(spec.s_list.size());
    for (double s : spec.s_list) rec.hs.push_back(sobolev_norm(a, s));
    if (spec.has_weight()) {
        const WeightedFunctionals wf = weighted_functionals(model, a, spec.w);
        rec.weighted_l = wf.l_sum;
        rec.weighted_a = wf.a_sum;
        rec.tail_energy = wf.tail_energy;
    } else {
        rec.weighted_l = std::numeric_limits<double>::quiet_NaN();
        rec.weighted_a = std::numeric_limits<double>::quiet_NaN();
        const size_t n = a.size();
        CompensatedSum tail;
        for (size_t j = n >= 3 ? n - 3 : 0; j < n; ++j) tail.add(a[j] * a[j]);
        rec.tail_energy = tail.value();
    }
    return rec;
}

}  // namespace dyadic
