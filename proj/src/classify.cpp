#include "classify.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dyadic {

namespace {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::rational<BigInt>;

// Exact conversion; every finite double is m * 2^e with integer m.
Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("coefficient must be finite");
    if (x == 0.0) return Rational(0);
    int exp = 0;
    const double mant = std::frexp(x, &exp);
    const auto m = static_cast<long long>(std::ldexp(mant, 53));
    exp -= 53;
    if (exp >= 0) return Rational(BigInt(m) << exp);
    return Rational(BigInt(m), BigInt(1) << -exp);
}

struct Pair {
    int mu1, mu2;
    Rational c;
};

// Monomial a_i a_k a_l keyed by sorted indices.
using Monomial = std::array<int, 3>;

// Expands sum_{j=0}^{window-1} 2 a_j F_j(a) over monomials, dropping any
// term touching a_{-1}. Coefficients of monomials with base index
// p <= window - 3 receive every contribution and are the formal identity.
std::map<Monomial, Rational> expand_energy_derivative(const std::array<Pair, 6>& pairs,
                                                      const Rational& lambda, int window) {
    std::map<Monomial, Rational> out;
    Rational lambda_pow_j(1);
    for (int j = 0; j < window; ++j) {
        for (const auto& p : pairs) {
            if (p.c == Rational(0)) continue;
            const int i1 = j + p.mu1;
            const int i2 = j + p.mu2;
            if (i1 < 0 || i2 < 0) continue;  // a_{-1} = 0
            Monomial key{j, i1, i2};
            std::sort(key.begin(), key.end());
            out[key] += Rational(2) * p.c * lambda_pow_j;
        }
        lambda_pow_j *= lambda;
    }
    return out;
}

Rational eval_energy_derivative(const std::array<Pair, 6>& pairs, const Rational& lambda,
                                const std::vector<Rational>& a) {
    const int n = static_cast<int>(a.size());
    auto at = [&](int i) { return (i >= 0 && i < n) ? a[static_cast<size_t>(i)] : Rational(0); };
    Rational total(0);
    Rational lambda_pow_j(1);
    for (int j = 0; j <= n; ++j) {  // F_j vanishes for j > n (all factors out of support)
        Rational fj(0);
        for (const auto& p : pairs) {
            if (p.c == Rational(0)) continue;
            fj += p.c * at(j + p.mu1) * at(j + p.mu2);
        }
        total += Rational(2) * at(j) * fj * lambda_pow_j;
        lambda_pow_j *= lambda;
    }
    return total;
}

std::string to_exact_string(const Rational& r) {
    std::ostringstream os;
    os << r.numerator();
    if (r.denominator() != 1) os << "/" << r.denominator();
    return os.str();
}

}  // namespace

GenericModelCoefficients GenericModelCoefficients::standard_form(double alpha, double beta,
                                                                 double lambda) {
    GenericModelCoefficients c;
    c.c_mm = alpha;
    c.c_0p = -lambda * alpha;
    c.c_m0 = beta;
    c.c_pp = -lambda * beta;
    return c;
}

double GenericModelCoefficients::coeff(int mu1, int mu2) const {
    if (mu1 > mu2) std::swap(mu1, mu2);
    if (mu1 == -1 && mu2 == -1) return c_mm;
    if (mu1 == -1 && mu2 == 0) return c_m0;
    if (mu1 == -1 && mu2 == 1) return c_mp;
    if (mu1 == 0 && mu2 == 0) return c_00;
    if (mu1 == 0 && mu2 == 1) return c_0p;
    if (mu1 == 1 && mu2 == 1) return c_pp;
    throw std::invalid_argument("mu indices must be in {-1, 0, +1}");
}

ClassifyOutcome classify_conservative_model(const GenericModelCoefficients& coeffs, double lambda) {
    if (!(lambda > 1.0)) throw std::invalid_argument("lambda must be > 1");

    const Rational lam = rational_from_double(lambda);
    const std::array<Pair, 6> pairs{{{-1, -1, rational_from_double(coeffs.c_mm)},
                                     {-1, 0, rational_from_double(coeffs.c_m0)},
                                     {-1, 1, rational_from_double(coeffs.c_mp)},
                                     {0, 0, rational_from_double(coeffs.c_00)},
                                     {0, 1, rational_from_double(coeffs.c_0p)},
                                     {1, 1, rational_from_double(coeffs.c_pp)}}};

    constexpr int kWindow = 6;
    const auto expansion = expand_energy_derivative(pairs, lam, kWindow);
    bool conservative = true;
    for (const auto& [mono, coeff] : expansion) {
        if (mono[0] <= kWindow - 3 && coeff != Rational(0)) {
            conservative = false;
            break;
        }
    }

    ClassifyOutcome out;
    out.conservative = conservative;
    if (conservative) {
        out.alpha = coeffs.c_mm;
        out.beta = coeffs.c_m0;
        return out;
    }

    // Witness search over small exact candidates. The family (1, t, t^2, t^3)
    // is decisive: the four cancellation conditions enter the derivative with
    // distinct leading degrees in t, so ten distinct t values cannot all
    // vanish unless every condition holds.
    std::vector<std::vector<Rational>> candidates;
    candidates.push_back({Rational(1)});
    candidates.push_back({Rational(1), Rational(1)});
    candidates.push_back({Rational(1), Rational(2)});
    candidates.push_back({Rational(2), Rational(1)});
    candidates.push_back({Rational(1), Rational(1), Rational(1)});
    candidates.push_back({Rational(1), Rational(2), Rational(3)});
    for (int t = 1; t <= 10; ++t) {
        const Rational tr(t);
        candidates.push_back({Rational(1), tr, tr * tr, tr * tr * tr});
    }
    for (const auto& cand : candidates) {
        const Rational v = eval_energy_derivative(pairs, lam, cand);
        if (v != Rational(0)) {
            out.witness.reserve(cand.size());
            for (const auto& x : cand) out.witness.push_back(boost::rational_cast<double>(x));
            out.witness_derivative = boost::rational_cast<double>(v);
            out.witness_derivative_exact = to_exact_string(v);
            return out;
        }
    }
    throw std::logic_error("non-conservative system with no small witness; expansion inconsistent");
}

}  // namespace dyadic
