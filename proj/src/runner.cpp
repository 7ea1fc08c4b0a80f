#include "runner.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "certificate.hpp"
#include "riccati.hpp"
#include "selfsimilar.hpp"

namespace dyadic {

namespace {

using Json = nlohmann::ordered_json;

// 17 significant digits: re-reading the CSV recovers each double exactly.
std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::string hs_column_name(double s) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "Hs_%g", s);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out.flush()) throw std::runtime_error("failed writing '" + path + "'");
}

Json certificate_json(const Certificate& cert) {
    Json j;
    j["s"] = cert.s;
    if (cert.gamma) {
        j["gamma"] = *cert.gamma;
    } else {
        j["gamma"] = nullptr;
    }
    j["beta"] = cert.beta;
    j["lambda"] = cert.lambda;
    j["w"] = cert.w;
    if (cert.eta) {
        j["eta"] = *cert.eta;
    } else {
        j["eta"] = nullptr;
    }
    j["C1"] = cert.c1;
    j["C2"] = cert.c2;
    j["threshold"] = cert.threshold;
    return j;
}

int exit_code_for(Termination t) {
    switch (t) {
        case Termination::ReachedTEnd: return kExitOk;
        case Termination::NormCapExceeded:
        case Termination::StepFloorHit: return kExitBlowupProxy;
        case Termination::MaxSteps: return kExitMaxSteps;
        case Termination::NumericalFailure: return kExitNumericalFailure;
    }
    return kExitNumericalFailure;
}

// Blow-up extrapolation along a trajectory: fit 1/L over samples taken
// before the tail shells carry energy (truncation taints the law after
// that). Returns nothing when no blow-up trend is present.
std::optional<BlowupEstimate> trajectory_blowup_estimate(const Trajectory& traj,
                                                         bool use_weighted) {
    std::vector<double> ts, ls;
    for (const auto& sample : traj.samples) {
        const double l = use_weighted ? sample.record.weighted_l : sample.record.hs_monitor;
        if (sample.record.tail_energy <= 1e-12 * sample.record.energy && l > 0.0) {
            ts.push_back(sample.record.t);
            ls.push_back(l);
        }
    }
    if (ts.size() < 3) return std::nullopt;
    try {
        return estimate_blowup_time(ts, ls);
    } catch (const NoBlowupTrend&) {
        return std::nullopt;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

std::string csv_for_trajectory(const Trajectory& traj, const DiagnosticsSpec& diag) {
    std::string out = "t,E";
    for (double s : diag.s_list) out += "," + hs_column_name(s);
    if (diag.has_weight()) out += ",L_w,A_w";
    out += ",min_a,tail_energy\n";
    for (const auto& sample : traj.samples) {
        const auto& rec = sample.record;
        out += sci(rec.t);
        out += "," + sci(rec.energy);
        for (double h : rec.hs) out += "," + sci(h);
        if (diag.has_weight()) {
            out += "," + sci(rec.weighted_l) + "," + sci(rec.weighted_a);
        }
        out += "," + sci(rec.min_a) + "," + sci(rec.tail_energy) + "\n";
    }
    return out;
}

}  // namespace

RunOutput run_simulate(const RunConfig& cfg) {
    RunOutput out;
    Json summary;
    summary["command"] = "simulate";
    try {
        const Model model(cfg.model);
        ShellState state0;
        state0.t = 0.0;
        state0.a = cfg.initial_data.materialize(cfg.model.shells);
        const ForcingSpec forcing{cfg.f0};

        const Trajectory traj =
            integrate(model, state0, forcing, cfg.ctrl, cfg.stop, cfg.diagnostics);

        write_file(cfg.output.csv_path, csv_for_trajectory(traj, cfg.diagnostics));

        summary["termination"] = to_string(traj.termination);
        summary["t_final"] = traj.final_state.t;
        summary["steps_accepted"] = traj.steps_accepted;
        summary["steps_rejected"] = traj.steps_rejected;
        const auto est = trajectory_blowup_estimate(traj, cfg.diagnostics.has_weight());
        if (est) {
            summary["T_est"] = est->t_est;
            summary["fit_residual"] = est->fit_residual;
        } else {
            summary["T_est"] = nullptr;
            summary["fit_residual"] = nullptr;
        }

        // A certificate is attached when the run is in certified territory:
        // normalized coupling, a configured weight, and parameters inside
        // the admissible ranges.
        if (cfg.diagnostics.has_weight() && cfg.model.alpha == 1.0 && cfg.stop.norm_s > 1.0 / 3.0) {
            std::optional<double> gamma;
            if (cfg.model.nu > 0.0 && cfg.model.gamma > 0.0 && cfg.model.gamma < 1.0 / 3.0) {
                gamma = cfg.model.gamma;
            }
            const bool certifiable = cfg.model.nu == 0.0 || gamma.has_value();
            if (certifiable) {
                try {
                    const Certificate cert =
                        make_certificate(cfg.stop.norm_s, gamma, cfg.model.beta, cfg.model.lambda,
                                         cfg.diagnostics.w);
                    Json cj = certificate_json(cert);
                    const auto check = check_initial_data(state0.a, cert);
                    cj["initial_data"] = {{"L0", check.l0},
                                          {"passes", check.passes},
                                          {"margin", check.margin}};
                    summary["certificate"] = cj;
                } catch (const EmptyAdmissibleSet&) {
                    summary["certificate"] = nullptr;
                }
            }
        }

        summary["final_state"] = {{"t", traj.final_state.t}, {"a", traj.final_state.a}};
        out.exit_code = exit_code_for(traj.termination);
    } catch (const std::exception& err) {
        summary["error"] = err.what();
        out.exit_code = kExitNumericalFailure;
    }
    summary["exit_code"] = out.exit_code;
    out.summary_json = summary.dump(2);
    return out;
}

RunOutput run_certify(const CertifyConfig& cfg) {
    RunOutput out;
    Json summary;
    summary["command"] = "certify";
    try {
        const WInterval interval = admissible_w(cfg.s, cfg.gamma, cfg.beta, cfg.lambda);
        const BetaMaxResult bmax = beta_max(cfg.s, cfg.gamma, cfg.lambda);
        summary["beta_max"] = bmax.value;
        summary["beta_max_attained"] = bmax.attained;
        if (interval.empty) {
            summary["admissible"] = false;
            out.exit_code = kExitEmptyAdmissible;
        } else {
            summary["admissible"] = true;
            summary["admissible_w"] = {{"lo", interval.lo},
                                       {"hi", interval.hi},
                                       {"lo_closed", interval.lo_closed}};
            const Certificate cert = make_certificate(cfg.s, cfg.gamma, cfg.beta, cfg.lambda);
            summary["certificate"] = certificate_json(cert);
            out.exit_code = kExitOk;
        }
    } catch (const EmptyAdmissibleSet&) {
        summary["admissible"] = false;
        out.exit_code = kExitEmptyAdmissible;
    } catch (const std::exception& err) {
        summary["error"] = err.what();
        out.exit_code = kExitConfigError;
    }
    summary["exit_code"] = out.exit_code;
    out.summary_json = summary.dump(2);
    if (!cfg.json_path.empty() && out.exit_code != kExitConfigError) {
        write_file(cfg.json_path, out.summary_json + "\n");
    }
    return out;
}

RunOutput run_sweep(const SweepConfig& cfg) {
    RunOutput out;
    Json summary;
    summary["command"] = "sweep";

    struct Point {
        double s = 0.0;
        std::optional<double> gamma;
        double beta = 0.0;
    };
    std::vector<Point> grid;
    const int gamma_count = cfg.inviscid ? 1 : cfg.gamma.count;
    for (int is = 0; is < cfg.s.count; ++is) {
        for (int ig = 0; ig < gamma_count; ++ig) {
            for (int ib = 0; ib < cfg.beta.count; ++ib) {
                Point p;
                p.s = cfg.s.at(is);
                if (!cfg.inviscid) p.gamma = cfg.gamma.at(ig);
                p.beta = cfg.beta.at(ib);
                grid.push_back(p);
            }
        }
    }

    std::vector<std::string> rows(grid.size());
    auto evaluate = [&](size_t i) {
        const Point& p = grid[i];
        std::string row = sci(p.s) + "," + (p.gamma ? sci(*p.gamma) : std::string()) + "," +
                          sci(p.beta) + ",";
        try {
            const WInterval interval = admissible_w(p.s, p.gamma, p.beta, cfg.lambda);
            const BetaMaxResult bmax = beta_max(p.s, p.gamma, cfg.lambda);
            if (interval.empty) {
                row += "0," + sci(bmax.value) + ",,";
            } else {
                const Certificate cert = make_certificate(p.s, p.gamma, p.beta, cfg.lambda);
                row += "1," + sci(bmax.value) + "," + sci(cert.threshold) + ",";
                if (cfg.mode == SweepConfig::Mode::SimulateCertify) {
                    RunConfig sim;
                    sim.model.lambda = cfg.lambda;
                    sim.model.alpha = 1.0;
                    sim.model.beta = p.beta;
                    sim.model.nu = p.gamma ? 1.0 : 0.0;
                    sim.model.gamma = p.gamma ? *p.gamma : 0.5;
                    sim.model.shells = 16;
                    sim.initial_data.kind = InitialDataSpec::Kind::SingleShell;
                    sim.initial_data.shell = 0;
                    // Canonical data family: just above the certified
                    // threshold (any positive amplitude in the inviscid case).
                    sim.initial_data.amplitude = cert.threshold > 0.0 ? 1.2 * cert.threshold : 1.0;
                    sim.stop.t_end = 20.0;
                    sim.stop.norm_s = p.s;
                    sim.stop.norm_cap = 1e6;
                    sim.diagnostics.w = cert.w;
                    sim.diagnostics.sample_every = 1e-3;
                    const Model model(sim.model);
                    ShellState st;
                    st.a = sim.initial_data.materialize(sim.model.shells);
                    const Trajectory traj = integrate(model, st, ForcingSpec{}, sim.ctrl, sim.stop,
                                                      sim.diagnostics);
                    const auto est = trajectory_blowup_estimate(traj, true);
                    if (est) row += sci(est->t_est);
                }
            }
            row += ",";
        } catch (const std::exception& err) {
            row += ",,,," + std::string(err.what());
        }
        rows[i] = row + "\n";
    };

    int workers = cfg.workers;
    if (const char* env = std::getenv(kWorkersEnvVar)) {
        const int parsed = std::atoi(env);
        if (parsed >= 1) workers = parsed;
    }
    workers = std::min<int>(workers, static_cast<int>(grid.size()) > 0 ? static_cast<int>(grid.size()) : 1);

    try {
        if (workers <= 1) {
            for (size_t i = 0; i < grid.size(); ++i) evaluate(i);
        } else {
            std::atomic<size_t> next{0};
            std::vector<std::thread> pool;
            pool.reserve(static_cast<size_t>(workers));
            for (int k = 0; k < workers; ++k) {
                pool.emplace_back([&] {
                    for (size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
                        evaluate(i);
                    }
                });
            }
            for (auto& th : pool) th.join();
        }

        std::string csv = "s,gamma,beta,admissible,beta_max,threshold,T_est,error\n";
        for (const auto& row : rows) csv += row;
        write_file(cfg.output, csv);

        summary["points"] = grid.size();
        summary["workers"] = workers;
        summary["output"] = cfg.output;
        out.exit_code = kExitOk;
    } catch (const std::exception& err) {
        summary["error"] = err.what();
        out.exit_code = kExitNumericalFailure;
    }
    summary["exit_code"] = out.exit_code;
    out.summary_json = summary.dump(2);
    return out;
}

RunOutput run_selfsimilar(const SelfSimilarConfig& cfg) {
    RunOutput out;
    Json summary;
    summary["command"] = "selfsimilar";
    try {
        const ShootResult shot = shoot_c0(cfg.n, cfg.tol);
        const SelfSimilarProfile profile = profile_sequence(shot.c0_star, cfg.n);
        summary["c0_star"] = shot.c0_star;
        summary["bracket_width"] = shot.bracket_width;
        summary["depth"] = shot.depth;
        summary["dichotomy_assumed"] = shot.dichotomy_assumed;
        summary["classification"] = to_string(profile.classification);
        if (profile.classification == ProfileClass::FiniteEnergyCandidate &&
            static_cast<int>(profile.c.size()) >= 20) {
            const DecayRatio ratio = decay_ratio(profile);
            summary["decay_ratio"] = ratio.ratio;
            summary["expected_ratio"] = ratio.expected;
            summary["ratio_deviates"] = ratio.deviates;
            summary["eval_residual_max"] = eval_solution_residual(profile, profile.t0 + 1.0);
        }
        if (!cfg.csv_path.empty()) {
            std::string csv = "j,c_j\n";
            for (size_t j = 0; j < profile.c.size(); ++j) {
                csv += std::to_string(j) + "," + sci(profile.c[j]) + "\n";
            }
            write_file(cfg.csv_path, csv);
        }
        out.exit_code = kExitOk;
    } catch (const BracketNotFound& err) {
        summary["error"] = err.what();
        out.exit_code = kExitNumericalFailure;
    } catch (const std::exception& err) {
        summary["error"] = err.what();
        out.exit_code = kExitConfigError;
    }
    summary["exit_code"] = out.exit_code;
    out.summary_json = summary.dump(2);
    if (!cfg.json_path.empty() && out.exit_code == kExitOk) {
        write_file(cfg.json_path, out.summary_json + "\n");
    }
    return out;
}

RunOutput run_classify(const ClassifyConfig& cfg) {
    RunOutput out;
    Json summary;
    summary["command"] = "classify";
    try {
        const ClassifyOutcome res = classify_conservative_model(cfg.coeffs, cfg.lambda);
        summary["conservative"] = res.conservative;
        if (res.conservative) {
            summary["alpha"] = res.alpha;
            summary["beta"] = res.beta;
        } else {
            summary["witness"] = res.witness;
            summary["energy_derivative"] = res.witness_derivative;
            summary["energy_derivative_exact"] = res.witness_derivative_exact;
        }
        out.exit_code = kExitOk;
    } catch (const std::exception& err) {
        summary["error"] = err.what();
        out.exit_code = kExitConfigError;
    }
    summary["exit_code"] = out.exit_code;
    out.summary_json = summary.dump(2);
    if (!cfg.json_path.empty() && out.exit_code == kExitOk) {
        write_file(cfg.json_path, out.summary_json + "\n");
    }
    return out;
}

RunOutput run(const ParsedConfig& cfg) {
    return std::visit(
        [](const auto& c) -> RunOutput {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, RunConfig>) {
                return run_simulate(c);
            } else if constexpr (std::is_same_v<T, SweepConfig>) {
                return run_sweep(c);
            } else if constexpr (std::is_same_v<T, CertifyConfig>) {
                return run_certify(c);
            } else if constexpr (std::is_same_v<T, SelfSimilarConfig>) {
                return run_selfsimilar(c);
            } else {
                return run_classify(c);
            }
        },
        cfg);
}

}  // namespace dyadic
