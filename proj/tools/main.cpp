// Command-line front end. Everything runs through the C API in
// dyadic/dyadic.h: subcommands compose a config (from a file and/or flags),
// apply --set overrides, and hand it to dyadic_run.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dyadic/dyadic.h"

namespace {

constexpr int kExitConfigError = 3;

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

void print_config_errors(const char* errors_json) {
    std::cerr << "config error";
    if (errors_json) std::cerr << "s:\n" << errors_json;
    std::cerr << "\n";
}

// Parses `text`, applies key=value overrides, runs, prints the summary.
int run_config_text(const std::string& text, const std::vector<std::string>& overrides) {
    dyadic_config* cfg = nullptr;
    char* errors = nullptr;
    if (dyadic_config_parse(text.c_str(), &cfg, &errors) != DYADIC_OK) {
        print_config_errors(errors);
        dyadic_string_free(errors);
        return kExitConfigError;
    }
    for (const auto& kv : overrides) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "--set expects key=value, got '" << kv << "'\n";
            dyadic_config_free(cfg);
            return kExitConfigError;
        }
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        char* set_errors = nullptr;
        if (dyadic_config_set(cfg, key.c_str(), value.c_str(), &set_errors) != DYADIC_OK) {
            print_config_errors(set_errors);
            dyadic_string_free(set_errors);
            dyadic_config_free(cfg);
            return kExitConfigError;
        }
    }
    char* summary = nullptr;
    const int code = dyadic_run(cfg, &summary);
    if (summary) std::cout << summary << "\n";
    dyadic_string_free(summary);
    dyadic_config_free(cfg);
    return code;
}

bool has_mode_key(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        size_t i = 0;
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (line.compare(i, 4, "mode") != 0) continue;
        i += 4;
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i < line.size() && line[i] == '=') return true;
    }
    return false;
}

// The subcommand pins the mode: configs that omit it get it prepended, and
// configs written for another mode are rejected by the override below
// rather than silently dispatched elsewhere.
int run_config_file(const std::string& path, const std::string& expected_mode,
                    const std::vector<std::string>& overrides) {
    std::string text;
    if (!read_file(path, text)) {
        std::cerr << "cannot read config file '" << path << "'\n";
        return kExitConfigError;
    }
    if (!has_mode_key(text)) text = "mode = " + expected_mode + "\n" + text;
    std::vector<std::string> all = overrides;
    all.insert(all.begin(), "mode=" + expected_mode);
    return run_config_text(text, all);
}

std::string opt_line(const std::string& key, const std::string& value) {
    return value.empty() ? std::string() : key + " = " + value + "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dyadic shell-model laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;

    auto* simulate = app.add_subcommand("simulate", "integrate a trajectory and write CSV/JSON");
    simulate->add_option("--config", config_path, "config file")->required();
    simulate->add_option("--set", overrides, "override a config key (key=value), repeatable");

    auto* sweep = app.add_subcommand("sweep", "evaluate a (s, gamma, beta) grid in parallel");
    sweep->add_option("--config", config_path, "config file")->required();
    sweep->add_option("--set", overrides, "override a config key (key=value), repeatable");

    double cert_s = 1.0;
    double cert_gamma = 0.0;
    bool cert_has_gamma = false;
    double cert_beta = 0.0;
    std::string cert_lambda = "2";
    std::string json_path;
    auto* certify = app.add_subcommand("certify", "compute a blow-up certificate");
    certify->add_option("--s", cert_s, "Sobolev index s > 1/3")->required();
    auto* gopt = certify->add_option("--gamma", cert_gamma, "dissipation degree (omit = inviscid)");
    certify->add_option("--beta", cert_beta, "coupling beta >= 0");
    certify->add_option("--lambda", cert_lambda, "shell ratio (> 1, or 'euler3d')");
    certify->add_option("--json", json_path, "also write the certificate JSON here");
    certify->add_option("--config", config_path, "config file (mode = certify)");
    certify->add_option("--set", overrides, "override a config key (key=value), repeatable");
    certify->callback([&] { cert_has_gamma = gopt->count() > 0; });

    int ss_n = 60;
    double ss_tol = 1e-10;
    std::string ss_csv;
    auto* selfsim = app.add_subcommand("selfsimilar", "shoot for the finite-energy profile");
    selfsim->add_option("--n", ss_n, "profile depth (shells)");
    selfsim->add_option("--tol", ss_tol, "bisection bracket tolerance");
    selfsim->add_option("--csv", ss_csv, "write the (j, c_j) table here");
    selfsim->add_option("--json", json_path, "write the summary JSON here");

    std::string coeff_path;
    std::string cls_lambda;
    auto* classify = app.add_subcommand("classify", "test a 6-coefficient system for conservation");
    classify->add_option("--coeffs", coeff_path, "coefficient file (Cm1m1..Cp1p1 keys)")
        ->required();
    classify->add_option("--lambda", cls_lambda, "shell ratio override");
    classify->add_option("--json", json_path, "write the result JSON here");

    CLI11_PARSE(app, argc, argv);

    if (simulate->parsed()) return run_config_file(config_path, "simulate", overrides);
    if (sweep->parsed()) return run_config_file(config_path, "sweep", overrides);

    if (certify->parsed()) {
        if (!config_path.empty()) return run_config_file(config_path, "certify", overrides);
        std::ostringstream cfg;
        cfg << "mode = certify\n";
        cfg << "s = " << cert_s << "\n";
        if (cert_has_gamma) cfg << "gamma = " << cert_gamma << "\n";
        cfg << "beta = " << cert_beta << "\n";
        cfg << "lambda = " << cert_lambda << "\n";
        cfg << opt_line("json", json_path);
        return run_config_text(cfg.str(), overrides);
    }

    if (selfsim->parsed()) {
        std::ostringstream cfg;
        cfg << "mode = selfsimilar\n";
        cfg << "n = " << ss_n << "\n";
        cfg << "tol = " << ss_tol << "\n";
        cfg << opt_line("csv", ss_csv);
        cfg << opt_line("json", json_path);
        return run_config_text(cfg.str(), {});
    }

    if (classify->parsed()) {
        std::string text;
        if (!read_file(coeff_path, text)) {
            std::cerr << "cannot read coefficient file '" << coeff_path << "'\n";
            return kExitConfigError;
        }
        if (!has_mode_key(text)) text = "mode = classify\n" + text;
        std::vector<std::string> all;
        all.push_back("mode=classify");
        if (!cls_lambda.empty()) all.push_back("lambda=" + cls_lambda);
        if (!json_path.empty()) all.push_back("json=" + json_path);
        return run_config_text(text, all);
    }

    return kExitConfigError;
}
