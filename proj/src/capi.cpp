#include "dyadic/dyadic.h"

#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "certificate.hpp"
#include "classify.hpp"
#include "config.hpp"
#include "diagnostics.hpp"
#include "integrate.hpp"
#include "model.hpp"
#include "runner.hpp"
#include "selfsimilar.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const char* message) { g_last_error = message ? message : ""; }

char* dup_string(const std::string& s) {
    char* out = new (std::nothrow) char[s.size() + 1];
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// Maps C++ failures onto status codes; every API body runs inside this.
template <typename Fn>
dyadic_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const dyadic::EmptyAdmissibleSet& e) {
        set_error(e.what());
        return DYADIC_ERR_EMPTY_ADMISSIBLE;
    } catch (const dyadic::NoBlowupTrend& e) {
        set_error(e.what());
        return DYADIC_ERR_NUMERIC;
    } catch (const dyadic::BracketNotFound& e) {
        set_error(e.what());
        return DYADIC_ERR_NUMERIC;
    } catch (const std::domain_error& e) {
        set_error(e.what());
        return DYADIC_ERR_NUMERIC;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return DYADIC_ERR_PARAM;
    } catch (const std::bad_alloc&) {
        set_error("out of memory");
        return DYADIC_ERR_INTERNAL;
    } catch (const std::exception& e) {
        set_error(e.what());
        return DYADIC_ERR_INTERNAL;
    }
}

dyadic_status require(bool cond, const char* message) {
    if (cond) return DYADIC_OK;
    set_error(message);
    return DYADIC_ERR_PARAM;
}

std::optional<double> opt_of(const double* p) {
    return p ? std::optional<double>(*p) : std::nullopt;
}

dyadic_certificate to_c(const dyadic::Certificate& cert) {
    dyadic_certificate out{};
    out.s = cert.s;
    out.gamma_absent = cert.gamma ? 0 : 1;
    out.gamma = cert.gamma.value_or(0.0);
    out.beta = cert.beta;
    out.lambda = cert.lambda;
    out.w = cert.w;
    out.eta = cert.eta.value_or(0.0);
    out.c1 = cert.c1;
    out.c2 = cert.c2;
    out.threshold = cert.threshold;
    return out;
}

dyadic::Certificate from_c(const dyadic_certificate& cert) {
    dyadic::Certificate out;
    out.s = cert.s;
    if (!cert.gamma_absent) out.gamma = cert.gamma;
    out.beta = cert.beta;
    out.lambda = cert.lambda;
    out.w = cert.w;
    if (!cert.gamma_absent) out.eta = cert.eta;
    out.c1 = cert.c1;
    out.c2 = cert.c2;
    out.threshold = cert.threshold;
    return out;
}

std::string errors_to_json(const std::vector<dyadic::ConfigError>& errors) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : errors) {
        arr.push_back({{"line", e.line}, {"message", e.message}});
    }
    return arr.dump();
}

}  // namespace

struct dyadic_model {
    dyadic::Model impl;
};

struct dyadic_trajectory {
    dyadic::Trajectory impl;
};

struct dyadic_profile {
    dyadic::SelfSimilarProfile impl;
};

struct dyadic_config {
    dyadic::ConfigSource source;
    dyadic::ParsedConfig parsed;
};

extern "C" {

const char* dyadic_last_error(void) { return g_last_error.c_str(); }

void dyadic_string_free(char* str) { delete[] str; }

dyadic_status dyadic_model_create(double lambda, double alpha, double beta, double nu,
                                  double gamma, int shells, dyadic_model** out) {
    if (auto st = require(out != nullptr, "out must not be NULL")) return st;
    *out = nullptr;
    return guarded([&] {
        dyadic::ModelParams params;
        params.lambda = lambda;
        params.alpha = alpha;
        params.beta = beta;
        params.nu = nu;
        params.gamma = gamma;
        params.shells = shells;
        *out = new dyadic_model{dyadic::Model(params)};
        return DYADIC_OK;
    });
}

void dyadic_model_free(dyadic_model* model) { delete model; }

dyadic_status dyadic_model_rhs(const dyadic_model* model, const double* a, int n, double f0,
                               double* out) {
    if (auto st = require(model && a && out, "model, a and out must not be NULL")) return st;
    return guarded([&] {
        model->impl.rhs(std::span<const double>(a, static_cast<size_t>(n)),
                        dyadic::ForcingSpec{f0}, std::span<double>(out, static_cast<size_t>(n)));
        return DYADIC_OK;
    });
}

dyadic_status dyadic_model_rhs_rescaled(const dyadic_model* model, const double* b, int n,
                                        double* out) {
    if (auto st = require(model && b && out, "model, b and out must not be NULL")) return st;
    return guarded([&] {
        model->impl.rhs_rescaled(std::span<const double>(b, static_cast<size_t>(n)),
                                 std::span<double>(out, static_cast<size_t>(n)));
        return DYADIC_OK;
    });
}

dyadic_status dyadic_sobolev_norm(const double* a, int n, double s, double* out) {
    if (auto st = require(a && out && n >= 0, "need a, out and n >= 0")) return st;
    return guarded([&] {
        *out = dyadic::sobolev_norm(std::span<const double>(a, static_cast<size_t>(n)), s);
        return DYADIC_OK;
    });
}

dyadic_status dyadic_energy(const double* a, int n, double* out) {
    if (auto st = require(a && out && n >= 0, "need a, out and n >= 0")) return st;
    return guarded([&] {
        *out = dyadic::energy(std::span<const double>(a, static_cast<size_t>(n)));
        return DYADIC_OK;
    });
}

dyadic_status dyadic_truncated_energy(const double* a, int n, int j0, double* out) {
    if (auto st = require(a && out && n >= 0, "need a, out and n >= 0")) return st;
    return guarded([&] {
        *out = dyadic::truncated_energy(std::span<const double>(a, static_cast<size_t>(n)), j0);
        return DYADIC_OK;
    });
}

dyadic_status dyadic_energy_flux(const dyadic_model* model, const double* a, int n, int j0,
                                 double f0, double* out) {
    if (auto st = require(model && a && out, "model, a and out must not be NULL")) return st;
    return guarded([&] {
        *out = dyadic::energy_flux(model->impl, std::span<const double>(a, static_cast<size_t>(n)),
                                   j0, dyadic::ForcingSpec{f0});
        return DYADIC_OK;
    });
}

dyadic_status dyadic_weighted_functionals(const dyadic_model* model, const double* a, int n,
                                          double w, double* l_out, double* a_out,
                                          double* tail_energy_out) {
    if (auto st = require(model && a, "model and a must not be NULL")) return st;
    return guarded([&] {
        const auto wf = dyadic::weighted_functionals(
            model->impl, std::span<const double>(a, static_cast<size_t>(n)), w);
        if (l_out) *l_out = wf.l_sum;
        if (a_out) *a_out = wf.a_sum;
        if (tail_energy_out) *tail_energy_out = wf.tail_energy;
        return DYADIC_OK;
    });
}

dyadic_status dyadic_positivity_margin(const double* a, int n, double* out) {
    if (auto st = require(a && out && n >= 0, "need a, out and n >= 0")) return st;
    *out = dyadic::positivity_margin(std::span<const double>(a, static_cast<size_t>(n)));
    return DYADIC_OK;
}

dyadic_status dyadic_admissible_w(double s, const double* gamma_or_null, double beta,
                                  double lambda, double* lo, double* hi, int* lo_closed,
                                  int* empty) {
    return guarded([&] {
        const auto w = dyadic::admissible_w(s, opt_of(gamma_or_null), beta, lambda);
        if (lo) *lo = w.lo;
        if (hi) *hi = w.hi;
        if (lo_closed) *lo_closed = w.lo_closed ? 1 : 0;
        if (empty) *empty = w.empty ? 1 : 0;
        return DYADIC_OK;
    });
}

dyadic_status dyadic_beta_max(double s, const double* gamma_or_null, double lambda, double* out,
                              int* attained) {
    if (auto st = require(out != nullptr, "out must not be NULL")) return st;
    return guarded([&] {
        const auto res = dyadic::beta_max(s, opt_of(gamma_or_null), lambda);
        *out = res.value;
        if (attained) *attained = res.attained ? 1 : 0;
        return DYADIC_OK;
    });
}

dyadic_status dyadic_beta_max_closed_form(double s, double* out) {
    if (auto st = require(out != nullptr, "out must not be NULL")) return st;
    *out = dyadic::beta_max_closed_form(s);
    return DYADIC_OK;
}

dyadic_status dyadic_certify(double s, const double* gamma_or_null, double beta, double lambda,
                             const double* w_or_null, const double* eta_or_null,
                             dyadic_certificate* out) {
    if (auto st = require(out != nullptr, "out must not be NULL")) return st;
    return guarded([&] {
        const auto cert = dyadic::make_certificate(s, opt_of(gamma_or_null), beta, lambda,
                                                   opt_of(w_or_null), opt_of(eta_or_null));
        *out = to_c(cert);
        return DYADIC_OK;
    });
}

dyadic_status dyadic_theta_window(double s, double gamma, double* lo, double* hi, int* empty) {
    return guarded([&] {
        const auto win = dyadic::theta_window(s, gamma);
        if (lo) *lo = win.lo;
        if (hi) *hi = win.hi;
        if (empty) *empty = win.empty ? 1 : 0;
        return DYADIC_OK;
    });
}

dyadic_status dyadic_check_initial_data(const dyadic_certificate* cert, const double* a0, int n,
                                        int* passes, double* margin) {
    if (auto st = require(cert && a0, "cert and a0 must not be NULL")) return st;
    return guarded([&] {
        const auto res = dyadic::check_initial_data(
            std::span<const double>(a0, static_cast<size_t>(n)), from_c(*cert));
        if (passes) *passes = res.passes ? 1 : 0;
        if (margin) *margin = res.margin;
        return DYADIC_OK;
    });
}

dyadic_status dyadic_integrate(const dyadic_config* cfg, dyadic_trajectory** out) {
    if (auto st = require(cfg && out, "cfg and out must not be NULL")) return st;
    *out = nullptr;
    return guarded([&] {
        const auto* run = std::get_if<dyadic::RunConfig>(&cfg->parsed);
        if (!run) {
            set_error("config mode is not simulate");
            return DYADIC_ERR_PARAM;
        }
        const dyadic::Model model(run->model);
        dyadic::ShellState state0;
        state0.a = run->initial_data.materialize(run->model.shells);
        auto traj = dyadic::integrate(model, state0, dyadic::ForcingSpec{run->f0}, run->ctrl,
                                      run->stop, run->diagnostics);
        *out = new dyadic_trajectory{std::move(traj)};
        return DYADIC_OK;
    });
}

void dyadic_trajectory_free(dyadic_trajectory* traj) { delete traj; }

int64_t dyadic_trajectory_sample_count(const dyadic_trajectory* traj) {
    return traj ? static_cast<int64_t>(traj->impl.samples.size()) : 0;
}

dyadic_status dyadic_trajectory_sample_info(const dyadic_trajectory* traj, int64_t index,
                                            dyadic_sample_info* out) {
    if (auto st = require(traj && out, "traj and out must not be NULL")) return st;
    if (index < 0 || index >= static_cast<int64_t>(traj->impl.samples.size())) {
        return require(false, "sample index out of range");
    }
    const auto& rec = traj->impl.samples[static_cast<size_t>(index)].record;
    out->t = rec.t;
    out->energy = rec.energy;
    out->hs_monitor = rec.hs_monitor;
    out->min_a = rec.min_a;
    out->tail_energy = rec.tail_energy;
    out->weighted_l = rec.weighted_l;
    out->weighted_a = rec.weighted_a;
    return DYADIC_OK;
}

dyadic_status dyadic_trajectory_sample_state(const dyadic_trajectory* traj, int64_t index,
                                             double* t_out, double* a_out, int cap) {
    if (auto st = require(traj && a_out, "traj and a_out must not be NULL")) return st;
    if (index < 0 || index >= static_cast<int64_t>(traj->impl.samples.size())) {
        return require(false, "sample index out of range");
    }
    const auto& state = traj->impl.samples[static_cast<size_t>(index)].state;
    if (cap < static_cast<int>(state.a.size())) {
        return require(false, "buffer capacity below shell count");
    }
    if (t_out) *t_out = state.t;
    std::memcpy(a_out, state.a.data(), state.a.size() * sizeof(double));
    return DYADIC_OK;
}

dyadic_status dyadic_trajectory_termination(const dyadic_trajectory* traj,
                                            dyadic_termination* out) {
    if (auto st = require(traj && out, "traj and out must not be NULL")) return st;
    switch (traj->impl.termination) {
        case dyadic::Termination::ReachedTEnd: *out = DYADIC_TERM_REACHED_T_END; break;
        case dyadic::Termination::NormCapExceeded: *out = DYADIC_TERM_NORM_CAP_EXCEEDED; break;
        case dyadic::Termination::StepFloorHit: *out = DYADIC_TERM_STEP_FLOOR_HIT; break;
        case dyadic::Termination::MaxSteps: *out = DYADIC_TERM_MAX_STEPS; break;
        case dyadic::Termination::NumericalFailure: *out = DYADIC_TERM_NUMERICAL_FAILURE; break;
    }
    return DYADIC_OK;
}

dyadic_status dyadic_trajectory_steps(const dyadic_trajectory* traj, int64_t* accepted,
                                      int64_t* rejected) {
    if (auto st = require(traj != nullptr, "traj must not be NULL")) return st;
    if (accepted) *accepted = traj->impl.steps_accepted;
    if (rejected) *rejected = traj->impl.steps_rejected;
    return DYADIC_OK;
}

dyadic_status dyadic_estimate_blowup_time(const double* t, const double* l, int n, double* t_est,
                                          double* fit_residual) {
    if (auto st = require(t && l && n >= 0, "need t, l and n >= 0")) return st;
    return guarded([&] {
        const auto est =
            dyadic::estimate_blowup_time(std::span<const double>(t, static_cast<size_t>(n)),
                                         std::span<const double>(l, static_cast<size_t>(n)));
        if (t_est) *t_est = est.t_est;
        if (fit_residual) *fit_residual = est.fit_residual;
        return DYADIC_OK;
    });
}

dyadic_status dyadic_profile_create(double c0, int n, dyadic_profile** out) {
    if (auto st = require(out != nullptr, "out must not be NULL")) return st;
    *out = nullptr;
    return guarded([&] {
        *out = new dyadic_profile{dyadic::profile_sequence(c0, n)};
        return DYADIC_OK;
    });
}

dyadic_status dyadic_profile_shoot(int n, double tol, double* c0_star, double* bracket_width,
                                   dyadic_profile** out) {
    return guarded([&] {
        const auto shot = dyadic::shoot_c0(n, tol);
        if (c0_star) *c0_star = shot.c0_star;
        if (bracket_width) *bracket_width = shot.bracket_width;
        if (out) *out = new dyadic_profile{dyadic::profile_sequence(shot.c0_star, n)};
        return DYADIC_OK;
    });
}

void dyadic_profile_free(dyadic_profile* profile) { delete profile; }

int dyadic_profile_len(const dyadic_profile* profile) {
    return profile ? static_cast<int>(profile->impl.c.size()) : 0;
}

dyadic_status dyadic_profile_coefficients(const dyadic_profile* profile, double* out, int cap) {
    if (auto st = require(profile && out, "profile and out must not be NULL")) return st;
    if (cap < static_cast<int>(profile->impl.c.size())) {
        return require(false, "buffer capacity below profile length");
    }
    std::memcpy(out, profile->impl.c.data(), profile->impl.c.size() * sizeof(double));
    return DYADIC_OK;
}

dyadic_status dyadic_profile_classification(const dyadic_profile* profile,
                                            dyadic_profile_class* out) {
    if (auto st = require(profile && out, "profile and out must not be NULL")) return st;
    switch (profile->impl.classification) {
        case dyadic::ProfileClass::FiniteEnergyCandidate:
            *out = DYADIC_PROFILE_FINITE_ENERGY_CANDIDATE;
            break;
        case dyadic::ProfileClass::Growing: *out = DYADIC_PROFILE_GROWING; break;
        case dyadic::ProfileClass::Degenerate: *out = DYADIC_PROFILE_DEGENERATE; break;
    }
    return DYADIC_OK;
}

dyadic_status dyadic_profile_decay_ratio(const dyadic_profile* profile, double* ratio,
                                         double* expected) {
    if (auto st = require(profile != nullptr, "profile must not be NULL")) return st;
    return guarded([&] {
        const auto res = dyadic::decay_ratio(profile->impl);
        if (ratio) *ratio = res.ratio;
        if (expected) *expected = res.expected;
        return DYADIC_OK;
    });
}

dyadic_status dyadic_profile_eval(const dyadic_profile* profile, double t0, double t,
                                  double* a_out, int cap) {
    if (auto st = require(profile && a_out, "profile and a_out must not be NULL")) return st;
    return guarded([&] {
        dyadic::SelfSimilarProfile copy = profile->impl;
        copy.t0 = t0;
        const auto state = dyadic::eval_solution(copy, t);
        if (cap < static_cast<int>(state.a.size())) {
            set_error("buffer capacity below profile length");
            return DYADIC_ERR_PARAM;
        }
        std::memcpy(a_out, state.a.data(), state.a.size() * sizeof(double));
        return DYADIC_OK;
    });
}

dyadic_status dyadic_forced_fixed_point(double f0, double lambda, int shells, double* k_out,
                                        double* abar_out) {
    return guarded([&] {
        const auto fp = dyadic::forced_fixed_point(f0, lambda, shells);
        if (k_out) *k_out = fp.k;
        if (abar_out) std::memcpy(abar_out, fp.abar.data(), fp.abar.size() * sizeof(double));
        return DYADIC_OK;
    });
}

dyadic_status dyadic_classify_model(const double coeffs[6], double lambda, int* conservative,
                                    double* alpha, double* beta, double* witness_out,
                                    int witness_cap, int* witness_len, double* derivative_out) {
    if (auto st = require(coeffs && conservative, "coeffs and conservative must not be NULL")) {
        return st;
    }
    return guarded([&] {
        dyadic::GenericModelCoefficients c;
        c.c_mm = coeffs[0];
        c.c_m0 = coeffs[1];
        c.c_mp = coeffs[2];
        c.c_00 = coeffs[3];
        c.c_0p = coeffs[4];
        c.c_pp = coeffs[5];
        const auto res = dyadic::classify_conservative_model(c, lambda);
        *conservative = res.conservative ? 1 : 0;
        if (res.conservative) {
            if (alpha) *alpha = res.alpha;
            if (beta) *beta = res.beta;
        } else {
            if (witness_len) *witness_len = static_cast<int>(res.witness.size());
            if (witness_out) {
                if (witness_cap < static_cast<int>(res.witness.size())) {
                    set_error("witness buffer too small");
                    return DYADIC_ERR_PARAM;
                }
                std::memcpy(witness_out, res.witness.data(),
                            res.witness.size() * sizeof(double));
            }
            if (derivative_out) *derivative_out = res.witness_derivative;
        }
        return DYADIC_OK;
    });
}

dyadic_status dyadic_config_parse(const char* text, dyadic_config** out, char** errors_json_out) {
    if (auto st = require(text && out, "text and out must not be NULL")) return st;
    *out = nullptr;
    if (errors_json_out) *errors_json_out = nullptr;
    return guarded([&] {
        auto outcome = dyadic::parse_config(text);
        if (!outcome.config) {
            if (errors_json_out) *errors_json_out = dup_string(errors_to_json(outcome.errors));
            set_error("config validation failed");
            return DYADIC_ERR_PARSE;
        }
        *out = new dyadic_config{std::move(outcome.source), std::move(*outcome.config)};
        return DYADIC_OK;
    });
}

dyadic_status dyadic_config_set(dyadic_config* cfg, const char* key, const char* value,
                                char** errors_json_out) {
    if (auto st = require(cfg && key && value, "cfg, key and value must not be NULL")) return st;
    if (errors_json_out) *errors_json_out = nullptr;
    return guarded([&] {
        dyadic::ConfigSource trial = cfg->source;
        trial.set(key, value, 0);
        auto outcome = dyadic::build_config(trial);
        if (!outcome.config) {
            if (errors_json_out) *errors_json_out = dup_string(errors_to_json(outcome.errors));
            set_error("config validation failed after override");
            return DYADIC_ERR_PARSE;
        }
        cfg->source = std::move(trial);
        cfg->parsed = std::move(*outcome.config);
        return DYADIC_OK;
    });
}

dyadic_status dyadic_config_serialize(const dyadic_config* cfg, char** text_out) {
    if (auto st = require(cfg && text_out, "cfg and text_out must not be NULL")) return st;
    return guarded([&] {
        *text_out = dup_string(dyadic::serialize(cfg->parsed));
        return DYADIC_OK;
    });
}

void dyadic_config_free(dyadic_config* cfg) { delete cfg; }

int dyadic_run(const dyadic_config* cfg, char** summary_json_out) {
    if (summary_json_out) *summary_json_out = nullptr;
    if (!cfg) {
        set_error("cfg must not be NULL");
        return dyadic::kExitConfigError;
    }
    try {
        const dyadic::RunOutput out = dyadic::run(cfg->parsed);
        if (summary_json_out) *summary_json_out = dup_string(out.summary_json);
        return out.exit_code;
    } catch (const std::exception& e) {
        set_error(e.what());
        return dyadic::kExitNumericalFailure;
    }
}

}  // extern "C"
