#include "certificate.hpp"

#include <cmath>
#include <limits>

#include "summation.hpp"

namespace dyadic {

namespace {

void validate_params(double s, const std::optional<double>& gamma, double beta, double lambda) {
    if (!(lambda > 1.0)) throw std::invalid_argument("lambda must be > 1");
    if (!(s >= 1.0 / 3.0)) throw std::invalid_argument("s must be >= 1/3 (no certificates below)");
    if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
    if (gamma && !(*gamma > 0.0 && *gamma < 1.0 / 3.0)) {
        throw std::invalid_argument("gamma must lie in (0, 1/3)");
    }
}

// g(w) = lambda^2/w - sqrt(w) - beta (lambda/sqrt(w) + w/lambda). In the
// variable u = sqrt(w), u^2 g = lambda^2 - u^3 - beta lambda u - beta u^4 /
// lambda is strictly decreasing, so {g > 0} = (0, w_root).
double coupling_gap(double w, double beta, double lambda) {
    const double u = std::sqrt(w);
    return lambda * lambda / w - u - beta * (lambda / u + w / lambda);
}

double coupling_gap_root(double beta, double lambda) {
    auto psi = [&](double u) {
        return lambda * lambda - u * u * u - beta * (lambda * u + u * u * u * u / lambda);
    };
    double lo = 1e-9, hi = std::pow(lambda, 4.0 / 3.0);  // psi(hi) <= 0 for every beta >= 0
    if (psi(hi) > 0.0) return hi * hi;                    // cannot happen; guard
    while (hi - lo > 1e-14 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (psi(mid) > 0.0 ? lo : hi) = mid;
    }
    const double u = 0.5 * (lo + hi);
    return u * u;
}

// Golden-section maximization of a unimodal function on [lo, hi].
template <typename F>
double golden_max(F&& f, double lo, double hi, double tol) {
    constexpr double kInvPhi = 0.6180339887498948482;
    double a = lo, b = hi;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

double beta_bound_at(double w, double lambda) {
    const double u = std::sqrt(w);
    return (lambda * lambda / w - u) / (lambda / u + w / lambda);
}

struct Constants {
    double g = 0.0;
    double d = 1.0;  // 1 in the inviscid case
};

Constants constants_at(double w, double beta, double lambda, const std::optional<double>& gamma) {
    Constants c;
    c.g = coupling_gap(w, beta, lambda);
    if (gamma) c.d = 1.0 - std::pow(lambda, 4.0 * *gamma) / w;
    return c;
}

}  // namespace

WInterval admissible_w(double s, std::optional<double> gamma, double beta, double lambda) {
    validate_params(s, gamma, beta, lambda);

    const double h_s_bound = lambda * lambda * std::exp2(-2.0 * s);  // w >= this (closed)
    double lo = 1.0;
    bool lo_closed = false;
    if (h_s_bound > lo) {
        lo = h_s_bound;
        lo_closed = true;
    }
    if (gamma) {
        const double diss_bound = std::pow(lambda, 4.0 * *gamma);  // w > this (open)
        if (diss_bound >= lo) {
            lo = diss_bound;
            lo_closed = false;
        }
    }
    const double hi = coupling_gap_root(beta, lambda);  // w < this (open)

    WInterval out;
    out.lo = lo;
    out.hi = hi;
    out.lo_closed = lo_closed;
    out.empty = !(lo < hi);
    return out;
}

BetaMaxResult beta_max(double s, std::optional<double> gamma, double lambda) {
    validate_params(s, gamma, 0.0, lambda);
    const WInterval feas = admissible_w(s, gamma, 0.0, lambda);
    BetaMaxResult out;
    if (feas.empty) return out;  // value 0: no positive beta admits a weight

    auto bound = [&](double w) { return beta_bound_at(w, lambda); };
    const double pad = 1e-13 * std::max(1.0, feas.hi);
    double search_lo = feas.lo + (feas.lo_closed ? 0.0 : pad);
    double search_hi = feas.hi - pad;
    if (search_lo >= search_hi) search_lo = search_hi = 0.5 * (feas.lo + feas.hi);
    const double w_star = golden_max(bound, search_lo, search_hi, 1e-10);
    // The bound is decreasing on the positive region, so the supremum sits at
    // the left endpoint; evaluate there to remove search error.
    if (std::abs(w_star - feas.lo) < 1e-8 * std::max(1.0, feas.lo)) {
        out.value = bound(feas.lo);
        out.w_arg = feas.lo;
        out.attained = feas.lo_closed;
    } else {
        out.value = bound(w_star);
        out.w_arg = w_star;
        out.attained = true;
    }
    if (out.value < 0.0) out.value = 0.0;
    return out;
}

double beta_max_closed_form(double s) {
    return (std::exp2(s) - std::exp2(1.0 - 2.0 * s)) / (1.0 + std::exp2(1.0 - 3.0 * s));
}

Certificate make_certificate(double s, std::optional<double> gamma, double beta, double lambda,
                             std::optional<double> w, std::optional<double> eta) {
    validate_params(s, gamma, beta, lambda);
    const WInterval feas = admissible_w(s, gamma, beta, lambda);
    if (feas.empty) {
        throw EmptyAdmissibleSet("no admissible weight for these parameters");
    }
    if (w && !feas.contains(*w)) {
        throw EmptyAdmissibleSet("requested weight is outside the admissible interval");
    }

    const double pad = std::max(1e-12, 1e-12 * feas.hi);
    double lo = feas.lo + (feas.lo_closed ? 0.0 : pad);
    double hi = feas.hi - pad;
    if (lo >= hi) lo = hi = 0.5 * (feas.lo + feas.hi);

    double w_pick = 0.0;
    if (w) {
        w_pick = *w;
    } else if (!gamma) {
        // Inviscid: threshold is 0 for every admissible weight; pick the one
        // with the strongest Riccati coefficient C1 = (1 - 1/w) g(w).
        auto c1_of = [&](double ww) { return (1.0 - 1.0 / ww) * coupling_gap(ww, beta, lambda); };
        w_pick = golden_max(c1_of, lo, hi, 1e-12);
    } else {
        // Viscous: minimize the threshold 1/(g d sqrt(1 - 1/w)) at the
        // stationary eta, i.e. maximize g d sqrt(1 - 1/w).
        auto score = [&](double ww) {
            const Constants c = constants_at(ww, beta, lambda, gamma);
            if (c.g <= 0.0 || c.d <= 0.0) return -std::numeric_limits<double>::infinity();
            return c.g * c.d * std::sqrt(1.0 - 1.0 / ww);
        };
        w_pick = golden_max(score, lo, hi, 1e-12);
    }

    const Constants c = constants_at(w_pick, beta, lambda, gamma);
    if (!(c.g > 0.0) || !(c.d > 0.0)) {
        throw EmptyAdmissibleSet("selected weight yields a nonpositive constant");
    }

    Certificate cert;
    cert.s = s;
    cert.gamma = gamma;
    cert.beta = beta;
    cert.lambda = lambda;
    cert.w = w_pick;
    if (gamma) {
        const double eta_pick = eta ? *eta : 0.5 * c.g * c.d;
        if (!(eta_pick > 0.0 && eta_pick < c.g * c.d)) {
            throw std::invalid_argument("eta must lie in (0, g d) to keep C1 positive");
        }
        cert.eta = eta_pick;
        cert.c1 = (1.0 - 1.0 / w_pick) * (c.g - eta_pick / c.d);
        cert.c2 = 1.0 / (4.0 * eta_pick * c.d);
        cert.threshold = std::sqrt(cert.c2 / cert.c1);
    } else {
        cert.c1 = (1.0 - 1.0 / w_pick) * c.g;
        cert.c2 = 0.0;
        cert.threshold = 0.0;
    }
    if (!(cert.c1 > 0.0)) throw EmptyAdmissibleSet("C1 is not positive at the selected weight");
    return cert;
}

ThetaWindow theta_window(double s, double gamma) {
    if (!(s > 1.0 / 3.0)) throw std::invalid_argument("theta_window requires s > 1/3");
    if (!(gamma > 0.0 && gamma < 1.0 / 3.0)) {
        throw std::invalid_argument("theta_window requires gamma in (0, 1/3)");
    }
    ThetaWindow out;
    out.lo = -4.0 / 3.0;
    out.hi = std::min(2.0 * (s - 1.0), -4.0 * gamma);
    out.empty = !(out.hi > out.lo);
    return out;
}

InitialDataCheck check_initial_data(std::span<const double> a0, const Certificate& cert) {
    InitialDataCheck out;
    CompensatedSum acc;
    double ratio = 1.0;  // (lambda/w)^j
    for (double aj : a0) {
        acc.add(aj * ratio);
        ratio *= cert.lambda / cert.w;
    }
    out.l0 = acc.value();
    out.margin = out.l0 - cert.threshold;
    out.passes = out.l0 > cert.threshold;
    return out;
}

}  // namespace dyadic
