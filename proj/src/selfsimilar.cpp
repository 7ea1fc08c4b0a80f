#include "selfsimilar.hpp"

#include <cmath>
#include <stdexcept>

namespace dyadic {

namespace {

constexpr double kThird = 1.0 / 3.0;

ProfileClass classify(const std::vector<double>& c, double c0, const ProfileClassifyOptions& opts) {
    // Baseline scale for x_j = c_j 2^{j/3}; x_1 = 2^{1/3} always.
    const double base = std::max({c0, std::exp2(kThird), 1.0});
    const double escape = opts.escape_factor * base;

    int first_escape = -1;
    for (size_t j = 0; j < c.size(); ++j) {
        if (!std::isfinite(c[j]) || c[j] <= 0.0) {
            // Overflow before the escape threshold tripped (or a nonpositive
            // entry, which the recurrence cannot produce from c0 > 0): no
            // phase information, treat as the small-c0 side.
            return first_escape < 0 ? ProfileClass::Degenerate
                                    : (first_escape % 2 == 0 ? ProfileClass::Growing
                                                             : ProfileClass::Degenerate);
        }
        const double x = c[j] * std::exp2(static_cast<double>(j) * kThird);
        if (j >= 2 && x > escape) {
            first_escape = static_cast<int>(j);
            break;
        }
    }
    if (first_escape < 0) return ProfileClass::FiniteEnergyCandidate;

    // Confirm the escape subsequence (same parity) keeps growing; a lone
    // spike within an otherwise settled profile does not classify.
    int seen = 1;
    double prev = c[static_cast<size_t>(first_escape)] *
                  std::exp2(static_cast<double>(first_escape) * kThird);
    for (size_t j = static_cast<size_t>(first_escape) + 2; j < c.size() && seen < opts.trend_window;
         j += 2) {
        if (!std::isfinite(c[j])) break;  // overflow counts as growth
        const double x = c[j] * std::exp2(static_cast<double>(j) * kThird);
        if (x <= prev) return ProfileClass::FiniteEnergyCandidate;
        prev = x;
        ++seen;
    }
    return first_escape % 2 == 0 ? ProfileClass::Growing : ProfileClass::Degenerate;
}

}  // namespace

const char* to_string(ProfileClass c) {
    switch (c) {
        case ProfileClass::FiniteEnergyCandidate: return "FiniteEnergyCandidate";
        case ProfileClass::Growing: return "Growing";
        case ProfileClass::Degenerate: return "Degenerate";
    }
    return "Unknown";
}

SelfSimilarProfile profile_sequence(double c0, int n, const ProfileClassifyOptions& opts) {
    if (!(c0 > 0.0)) throw std::invalid_argument("c0 must be > 0");
    if (n < 2) throw std::invalid_argument("need at least 2 shells");

    SelfSimilarProfile profile;
    profile.c0 = c0;
    profile.c.reserve(static_cast<size_t>(n));
    profile.c.push_back(c0);
    double prev = 0.0;  // c_{-1}
    for (int j = 0; j + 1 < n; ++j) {
        const double cj = profile.c.back();
        if (!std::isfinite(cj) || cj <= 0.0) break;
        const double cnext = std::exp2(-static_cast<double>(j)) + prev * prev / (2.0 * cj);
        prev = cj;
        profile.c.push_back(cnext);
    }
    profile.classification = classify(profile.c, c0, opts);
    return profile;
}

ShootResult shoot_c0(int n, double tol, const ProfileClassifyOptions& opts) {
    if (n < 20) throw std::invalid_argument("shooting needs depth n >= 20");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");

    auto classify_at = [&](double c0) { return profile_sequence(c0, n, opts).classification; };

    // Initial bracket scan on a log grid.
    double lo = 0.0, hi = 0.0;
    double prev_c0 = 0.0;
    ProfileClass prev_class = ProfileClass::FiniteEnergyCandidate;
    bool have_prev = false;
    for (double c0 = 1e-8; c0 <= 1.001e8; c0 *= 10.0) {
        const ProfileClass cl = classify_at(c0);
        if (cl == ProfileClass::FiniteEnergyCandidate) {
            // Landed inside the (exponentially narrow) settled band.
            ShootResult out;
            out.c0_star = c0;
            out.bracket_width = 0.0;
            out.depth = n;
            return out;
        }
        if (have_prev && prev_class == ProfileClass::Degenerate && cl == ProfileClass::Growing) {
            lo = prev_c0;
            hi = c0;
            break;
        }
        prev_c0 = c0;
        prev_class = cl;
        have_prev = true;
    }
    if (hi == 0.0) {
        throw BracketNotFound("no Degenerate-to-Growing transition on c0 in [1e-8, 1e8]");
    }

    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // bracket at rounding resolution
        const ProfileClass cl = classify_at(mid);
        if (cl == ProfileClass::Degenerate) {
            lo = mid;
        } else if (cl == ProfileClass::Growing) {
            hi = mid;
        } else {
            // Settled within depth n: cannot steer the bracket further.
            ShootResult out;
            out.c0_star = mid;
            out.bracket_width = hi - lo;
            out.depth = n;
            return out;
        }
    }

    ShootResult out;
    out.c0_star = 0.5 * (lo + hi);
    out.bracket_width = hi - lo;
    out.depth = n;
    return out;
}

DecayRatio decay_ratio(const SelfSimilarProfile& profile) {
    const int n = static_cast<int>(profile.c.size());
    if (n < 20) throw std::invalid_argument("decay_ratio needs at least 20 shells");
    if (profile.classification != ProfileClass::FiniteEnergyCandidate) {
        throw std::invalid_argument("decay_ratio requires a FiniteEnergyCandidate profile");
    }
    const int begin = n / 3;
    const int end = 2 * n / 3;
    double log_sum = 0.0;
    int count = 0;
    for (int j = begin; j < end && j + 1 < n; ++j) {
        log_sum += std::log(profile.c[static_cast<size_t>(j) + 1] / profile.c[static_cast<size_t>(j)]);
        ++count;
    }
    DecayRatio out;
    out.expected = std::pow(profile.lambda, -kThird);
    out.ratio = count > 0 ? std::exp(log_sum / count) : 0.0;
    out.deviates = std::abs(out.ratio - out.expected) > 1e-2;
    return out;
}

ShellState eval_solution(const SelfSimilarProfile& profile, double t) {
    if (!(t > profile.t0)) throw std::invalid_argument("eval_solution requires t > t0");
    ShellState state;
    state.t = t;
    state.a.resize(profile.c.size());
    const double scale = 1.0 / (2.0 * (t - profile.t0));
    for (size_t j = 0; j < profile.c.size(); ++j) state.a[j] = profile.c[j] * scale;
    return state;
}

double eval_solution_residual(const SelfSimilarProfile& profile, double t) {
    const int n = static_cast<int>(profile.c.size());
    if (n < 3) return 0.0;  // no interior shells to check

    const ShellState state = eval_solution(profile, t);
    ModelParams params;
    params.lambda = profile.lambda;
    params.alpha = 1.0;
    params.beta = 0.0;
    params.nu = 0.0;
    params.shells = n;
    const Model model(params);
    const std::vector<double> f = model.rhs(state.a);

    const double dt_scale = -1.0 / (2.0 * (t - profile.t0) * (t - profile.t0));
    double worst = 0.0;
    for (int j = 0; j <= n - 3; ++j) {
        const double da_dt = profile.c[static_cast<size_t>(j)] * dt_scale;
        const double defect = std::abs(da_dt - f[static_cast<size_t>(j)]);
        if (da_dt != 0.0) worst = std::max(worst, defect / std::abs(da_dt));
    }
    return worst;
}

ForcedFixedPoint forced_fixed_point(double f0, double lambda, int shells) {
    if (!(f0 > 0.0)) throw std::invalid_argument("f0 must be > 0");
    if (!(lambda > 1.0)) throw std::invalid_argument("lambda must be > 1");
    if (shells < 2) throw std::invalid_argument("need at least 2 shells");

    ForcedFixedPoint out;
    out.k = std::sqrt(f0) * std::pow(lambda, -kThird);
    out.abar.resize(static_cast<size_t>(shells));
    for (int j = 0; j < shells; ++j) {
        out.abar[static_cast<size_t>(j)] = out.k * std::pow(lambda, -kThird * j);
    }
    return out;
}

}  // namespace dyadic
