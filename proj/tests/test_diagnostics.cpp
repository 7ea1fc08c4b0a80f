#include <doctest.h>

#include <cmath>
#include <random>

#include "certificate.hpp"
#include "diagnostics.hpp"
#include "integrate.hpp"
#include "riccati.hpp"
#include "summation.hpp"

using namespace dyadic;

TEST_CASE("sobolev norm examples") {
    const std::vector<double> a{1.0, 0.5, 0.25};
    CHECK(sobolev_norm(a, 1.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
    CHECK(sobolev_norm(std::vector<double>{0.0, 0.0, 0.0}, 2.0) == 0.0);

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> coin(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(16);
        for (auto& v : x) v = coin(rng);
        CHECK(sobolev_norm(x, 0.0) == doctest::Approx(std::sqrt(energy(x))).epsilon(1e-14));
    }
}

TEST_CASE("H^s norm is nondecreasing in s, strictly with high-shell mass") {
    const std::vector<double> a{0.5, 0.0, 0.25, 0.1};
    double prev = 0.0;
    for (double s = 0.0; s <= 2.0; s += 0.1) {
        const double v = sobolev_norm(a, s);
        CHECK(v > prev);  // strict: a_2, a_3 nonzero
        prev = v;
    }
    const std::vector<double> only0{0.7, 0.0, 0.0};
    CHECK(sobolev_norm(only0, 0.3) == doctest::Approx(sobolev_norm(only0, 1.7)));
}

TEST_CASE("energy and truncated energy") {
    const std::vector<double> a{3.0, 4.0, 0.0};
    CHECK(energy(a) == doctest::Approx(25.0));
    CHECK(truncated_energy(a, 0) == doctest::Approx(9.0));
    CHECK(truncated_energy(a, 2) == energy(a));
    CHECK_THROWS_AS(truncated_energy(a, 3), std::invalid_argument);
    CHECK_THROWS_AS(truncated_energy(a, -1), std::invalid_argument);
}

TEST_CASE("energy flux examples") {
    Model kp(ModelParams{2.0, 1.0, 0.0, 0.0, 0.5, 6});
    const std::vector<double> ones(6, 1.0);
    CHECK(energy_flux(kp, ones, 0) == doctest::Approx(-4.0));

    Model full(ModelParams{2.0, 1.3, 0.8, 0.0, 0.5, 6});
    std::vector<double> gap{0.5, 0.2, 0.0, 0.0, 0.3, 0.1};
    CHECK(energy_flux(full, gap, 2) == 0.0);  // a_2 = a_3 = 0, nu = 0

    CHECK_THROWS_AS(energy_flux(kp, ones, 5), std::invalid_argument);
}

TEST_CASE("energy flux telescopes against 2 sum a_j rhs_j") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> coin(-1.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        ModelParams p;
        p.alpha = 0.5 + coin(rng) * 0.5;
        p.beta = 0.5 + coin(rng) * 0.5;
        p.nu = trial % 2 ? 1.0 : 0.0;
        p.gamma = 0.25;
        p.shells = 9;
        Model model(p);
        std::vector<double> a(9);
        for (auto& x : a) x = coin(rng);
        const double f0 = trial % 3 ? 0.4 : 0.0;
        const auto f = model.rhs(a, ForcingSpec{f0});

        CompensatedSum total;
        for (int j = 0; j < 9; ++j) total.add(2.0 * a[static_cast<size_t>(j)] * f[static_cast<size_t>(j)]);

        // Flux through J-2 plus the last shell's own budget is the total.
        const double flux = energy_flux(model, a, 7, ForcingSpec{f0});
        const double last = 2.0 * a[8] * f[8];
        CHECK(flux + last == doctest::Approx(total.value()).epsilon(1e-12));
    }
}

TEST_CASE("energy flux matches the finite-difference derivative along a run") {
    ModelParams p;
    p.alpha = 1.0;
    p.beta = 0.3;
    p.shells = 10;
    Model model(p);
    ShellState state0;
    state0.a.assign(10, 0.0);
    state0.a[0] = 1.0;
    state0.a[1] = 0.6;
    StepControl ctrl;
    ctrl.rel_tol = 1e-11;
    ctrl.abs_tol = 1e-13;
    StopCondition stop;
    stop.t_end = 0.5;
    stop.norm_cap = 1e9;
    DiagnosticsSpec diag;
    const double dt = 1e-3;
    diag.sample_every = dt;
    const Trajectory traj = integrate(model, state0, ForcingSpec{}, ctrl, stop, diag);
    REQUIRE(traj.termination == Termination::ReachedTEnd);
    REQUIRE(traj.samples.size() > 100);

    const int j0 = 4;
    double worst = 0.0;
    for (size_t i = 1; i + 1 < traj.samples.size(); i += 25) {
        const double em = truncated_energy(traj.samples[i - 1].state.a, j0);
        const double ep = truncated_energy(traj.samples[i + 1].state.a, j0);
        const double fd = (ep - em) / (2.0 * dt);
        const double flux = energy_flux(model, traj.samples[i].state.a, j0);
        worst = std::max(worst, std::abs(fd - flux));
    }
    CHECK(worst < 50.0 * dt * dt);  // centered difference is O(dt^2)
}

TEST_CASE("weighted functionals") {
    Model model(ModelParams{2.0, 1.0, 0.0, 0.0, 0.5, 12});

    std::vector<double> spike(12, 0.0);
    spike[0] = 1.0;
    auto wf = weighted_functionals(model, spike, 3.0);
    CHECK(wf.l_sum == doctest::Approx(1.0));
    CHECK(wf.a_sum == doctest::Approx(1.0));

    // a_j = lambda^{-j} makes b_j = 1: geometric sums.
    std::vector<double> geo(12);
    for (int j = 0; j < 12; ++j) geo[static_cast<size_t>(j)] = std::pow(2.0, -j);
    wf = weighted_functionals(model, geo, 2.0);
    const double want = 2.0 * (1.0 - std::pow(2.0, -12.0));
    CHECK(wf.l_sum == doctest::Approx(want).epsilon(1e-14));
    CHECK(wf.a_sum == doctest::Approx(want).epsilon(1e-14));
    CHECK(wf.tail_energy == doctest::Approx(geo[9] * geo[9] + geo[10] * geo[10] + geo[11] * geo[11]));

    CHECK_THROWS_AS(weighted_functionals(model, geo, 1.0), std::invalid_argument);
}

TEST_CASE("Cauchy-Schwarz bound L^2 <= A/(1 - 1/w) on random states") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> coin(-1.0, 1.0);
    std::uniform_real_distribution<double> wdist(1.01, 4.0);
    Model model(ModelParams{2.0, 1.0, 0.0, 0.0, 0.5, 10});
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> a(10);
        for (auto& x : a) x = coin(rng) * std::pow(2.0, -(trial % 7));
        const double w = wdist(rng);
        const auto wf = weighted_functionals(model, a, w);  // asserts internally
        CHECK(wf.l_sum * wf.l_sum <= wf.a_sum / (1.0 - 1.0 / w) * (1.0 + 1e-9) + 1e-300);
    }
}

TEST_CASE("positivity margin") {
    CHECK(positivity_margin(std::vector<double>{1.0, 0.0, 2.0}) == 0.0);
    CHECK(positivity_margin(std::vector<double>{1.0, -1e-9, 2.0}) == -1e-9);
    CHECK(positivity_margin(std::vector<double>{0.0, 0.0}) == 0.0);
}

TEST_CASE("positivity is preserved for beta = 0 along trajectories") {
    ModelParams p;
    p.alpha = 1.0;
    p.beta = 0.0;
    p.nu = 0.5;
    p.gamma = 0.25;
    p.shells = 12;
    Model model(p);
    ShellState state0;
    state0.a.assign(12, 0.0);
    state0.a[0] = 1.0;
    state0.a[2] = 0.5;
    StepControl ctrl;
    ctrl.abs_tol = 1e-12;
    ctrl.rel_tol = 1e-10;
    StopCondition stop;
    stop.t_end = 2.0;
    stop.norm_cap = 1e9;
    DiagnosticsSpec diag;
    diag.sample_every = 0.02;
    const Trajectory traj = integrate(model, state0, ForcingSpec{0.2}, ctrl, stop, diag);
    REQUIRE(traj.termination == Termination::ReachedTEnd);
    for (const auto& sample : traj.samples) {
        CHECK(sample.record.min_a >= -10.0 * ctrl.abs_tol);
    }
}

TEST_CASE("positivity can fail once beta > 0 (mass in shell 1 only)") {
    ModelParams p;
    p.alpha = 1.0;
    p.beta = 1.0;
    p.shells = 10;
    Model model(p);
    ShellState state0;
    state0.a.assign(10, 0.0);
    state0.a[1] = 1.0;  // rhs_0 = -beta lambda a_1^2 < 0 immediately
    StepControl ctrl;
    StopCondition stop;
    stop.t_end = 0.2;
    stop.norm_cap = 1e9;
    DiagnosticsSpec diag;
    diag.sample_every = 1e-3;
    const Trajectory traj = integrate(model, state0, ForcingSpec{}, ctrl, stop, diag);
    double worst = 0.0;
    for (const auto& sample : traj.samples) worst = std::min(worst, sample.record.min_a);
    CHECK(worst < 0.0);
}

TEST_CASE("riccati residual of the zero solution is +C2 at all samples") {
    ModelParams p;
    p.alpha = 1.0;
    p.beta = 0.0;
    p.nu = 1.0;
    p.gamma = 0.25;
    p.shells = 8;
    Model model(p);
    const Certificate cert = make_certificate(1.0, 0.25, 0.0, 2.0);
    ShellState zero;
    zero.a.assign(8, 0.0);
    StopCondition stop;
    stop.t_end = 0.1;
    DiagnosticsSpec diag;
    diag.sample_every = 0.01;
    diag.w = cert.w;
    const Trajectory traj = integrate(model, zero, ForcingSpec{}, StepControl{}, stop, diag);
    REQUIRE(traj.samples.size() >= 5);

    for (auto mode : {RiccatiMode::ExactDerivative, RiccatiMode::FiniteDifference}) {
        const auto series = riccati_residual(traj, model, cert, mode);
        CHECK(series.size() == traj.samples.size());
        for (const auto& pt : series) {
            CHECK(pt.residual == doctest::Approx(cert.c2).epsilon(1e-12));
            CHECK(pt.valid);
        }
    }
}

TEST_CASE("riccati residual needs at least 5 samples") {
    Model model(ModelParams{2.0, 1.0, 0.0, 0.0, 0.5, 4});
    const Certificate cert = make_certificate(1.0, std::nullopt, 0.0, 2.0);
    Trajectory tiny;
    tiny.samples.resize(3);
    CHECK_THROWS_AS(riccati_residual(tiny, model, cert), std::invalid_argument);
}

TEST_CASE("riccati inequality holds in exact mode on a blow-up run") {
    ModelParams p;
    p.alpha = 1.0;
    p.beta = 0.0;
    p.shells = 18;
    Model model(p);
    const Certificate cert = make_certificate(1.0, std::nullopt, 0.0, 2.0);

    ShellState state0;
    state0.a.assign(18, 0.0);
    state0.a[0] = 1.0;
    state0.a[1] = 1.0;
    REQUIRE(check_initial_data(state0.a, cert).passes);  // threshold is 0

    StopCondition stop;
    stop.t_end = 2.0;
    stop.norm_s = 1.0;
    stop.norm_cap = 1e5;
    DiagnosticsSpec diag;
    diag.sample_every = 2e-3;
    diag.w = cert.w;
    const Trajectory traj = integrate(model, state0, ForcingSpec{}, StepControl{}, stop, diag);
    REQUIRE(traj.termination == Termination::NormCapExceeded);

    const auto series = riccati_residual(traj, model, cert, RiccatiMode::ExactDerivative);
    int valid_count = 0;
    for (size_t i = 0; i < series.size(); ++i) {
        if (!series[i].valid) continue;
        ++valid_count;
        const double l = traj.samples[i].record.weighted_l;
        CHECK(series[i].residual >= -1e-10 * (1.0 + cert.c1 * l * l));
    }
    CHECK(valid_count > 10);
}
