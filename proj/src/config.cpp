#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace dyadic {

namespace {

std::string trim(std::string_view sv) {
    size_t b = 0, e = sv.size();
    while (b < e && std::isspace(static_cast<unsigned char>(sv[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(sv[e - 1]))) --e;
    return std::string(sv.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : value) {
        if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) parts.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) parts.push_back(std::move(cur));
    return parts;
}

// Accumulates typed reads against the raw map; unknown-key detection is
// done by the caller against the set of keys each mode consumed.
class Reader {
public:
    Reader(const ConfigSource& src, std::vector<ConfigError>& errors)
        : src_(src), errors_(errors) {}

    bool has(const std::string& key) const { return src_.entries.count(key) != 0; }

    void mark(const std::string& key) { consumed_.insert(key); }

    double real(const std::string& key, double fallback) {
        const auto* e = find(key);
        if (!e) return fallback;
        if (key == "lambda" && trim(e->first) == "euler3d") return kLambdaEuler3d;
        return parse_real(e->first, e->second, fallback);
    }

    std::optional<double> real_opt(const std::string& key) {
        const auto* e = find(key);
        if (!e) return std::nullopt;
        return parse_real(e->first, e->second, 0.0);
    }

    long long integer(const std::string& key, long long fallback) {
        const auto* e = find(key);
        if (!e) return fallback;
        const std::string v = trim(e->first);
        char* end = nullptr;
        const long long out = std::strtoll(v.c_str(), &end, 10);
        if (end == v.c_str() || *end != '\0') {
            fail(e->second, "key '" + key + "': expected an integer, got '" + v + "'");
            return fallback;
        }
        return out;
    }

    bool boolean(const std::string& key, bool fallback) {
        const auto* e = find(key);
        if (!e) return fallback;
        const std::string v = trim(e->first);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        fail(e->second, "key '" + key + "': expected a boolean, got '" + v + "'");
        return fallback;
    }

    std::string text(const std::string& key, const std::string& fallback) {
        const auto* e = find(key);
        return e ? trim(e->first) : fallback;
    }

    std::vector<double> real_list(const std::string& key, std::vector<double> fallback) {
        const auto* e = find(key);
        if (!e) return fallback;
        std::vector<double> out;
        for (const auto& part : split_list(e->first)) {
            out.push_back(parse_real(part, e->second, 0.0));
        }
        if (out.empty()) fail(e->second, "key '" + key + "': expected a list of reals");
        return out;
    }

    int line_of(const std::string& key) const {
        auto it = src_.entries.find(key);
        return it == src_.entries.end() ? 0 : it->second.second;
    }

    void fail(int line, const std::string& message) { errors_.push_back({line, message}); }

    void fail_key(const std::string& key, const std::string& message) {
        errors_.push_back({line_of(key), message});
    }

    void finish_unknown_check() {
        for (const auto& [key, value] : src_.entries) {
            if (!consumed_.count(key)) {
                errors_.push_back({value.second, "unknown key '" + key + "'"});
            }
        }
    }

private:
    const std::pair<std::string, int>* find(const std::string& key) {
        consumed_.insert(key);
        auto it = src_.entries.find(key);
        return it == src_.entries.end() ? nullptr : &it->second;
    }

    double parse_real(const std::string& raw, int line, double fallback) {
        const std::string v = trim(raw);
        char* end = nullptr;
        const double out = std::strtod(v.c_str(), &end);
        if (end == v.c_str() || *end != '\0') {
            fail(line, "expected a real number, got '" + v + "'");
            return fallback;
        }
        return out;
    }

    const ConfigSource& src_;
    std::vector<ConfigError>& errors_;
    std::set<std::string> consumed_;
};

RunConfig build_run(Reader& r) {
    RunConfig cfg;
    cfg.model.lambda = r.real("lambda", 2.0);
    cfg.model.alpha = r.real("alpha", 1.0);
    cfg.model.beta = r.real("beta", 0.0);
    cfg.model.nu = r.real("nu", 0.0);
    cfg.model.gamma = r.real("gamma", 0.5);
    cfg.model.shells = static_cast<int>(r.integer("J", 24));
    cfg.f0 = r.real("f0", 0.0);

    const std::string init = r.text("init", "single_shell");
    if (init == "explicit") {
        cfg.initial_data.kind = InitialDataSpec::Kind::Explicit;
    } else if (init == "single_shell") {
        cfg.initial_data.kind = InitialDataSpec::Kind::SingleShell;
    } else if (init == "geometric") {
        cfg.initial_data.kind = InitialDataSpec::Kind::Geometric;
    } else {
        r.fail_key("init", "init must be one of explicit, single_shell, geometric");
    }
    cfg.initial_data.values = r.real_list("init_values", {1.0});
    cfg.initial_data.shell = static_cast<int>(r.integer("init_shell", 0));
    cfg.initial_data.amplitude = r.real("init_amplitude", 1.0);
    cfg.initial_data.ratio = r.real("init_ratio", 0.5);
    cfg.initial_data.k_max = static_cast<int>(r.integer("init_kmax", 8));

    cfg.ctrl.abs_tol = r.real("abs_tol", 1e-10);
    cfg.ctrl.rel_tol = r.real("rel_tol", 1e-8);
    cfg.ctrl.dt_init = r.real("dt_init", 1e-6);
    cfg.ctrl.dt_min = r.real("dt_min", 1e-13);
    cfg.ctrl.dt_max = r.real("dt_max", 0.1);
    cfg.ctrl.safety = r.real("safety", 0.9);

    cfg.stop.t_end = r.real("t_end", 1.0);
    cfg.stop.norm_s = r.real("norm_s", 1.0);
    cfg.stop.norm_cap = r.real("norm_cap", 1e6);
    cfg.stop.max_steps = r.integer("max_steps", 20000000);

    cfg.diagnostics.s_list = r.real_list("s_list", {1.0});
    cfg.diagnostics.w = r.real("w", 0.0);
    cfg.diagnostics.sample_every = r.real("sample_every", 0.01);

    cfg.output.csv_path = r.text("csv", "trajectory.csv");
    cfg.output.json_path = r.text("json", "summary.json");

    // Invariants, reported against the offending key's line.
    if (!(cfg.model.lambda > 1.0)) r.fail_key("lambda", "lambda must be > 1");
    if (cfg.model.alpha < 0.0) r.fail_key("alpha", "alpha must be >= 0");
    if (cfg.model.beta < 0.0) r.fail_key("beta", "beta must be >= 0");
    if (cfg.model.nu < 0.0) r.fail_key("nu", "nu must be >= 0");
    if (cfg.model.nu > 0.0 && !(cfg.model.gamma > 0.0)) {
        r.fail_key("gamma", "gamma must be > 0 when nu > 0");
    }
    if (cfg.model.shells < 2) r.fail_key("J", "J must be >= 2");
    if (cfg.f0 < 0.0) r.fail_key("f0", "f0 must be >= 0");
    if (cfg.initial_data.kind == InitialDataSpec::Kind::SingleShell &&
        (cfg.initial_data.shell < 0 || cfg.initial_data.shell >= cfg.model.shells)) {
        r.fail_key("init_shell", "init_shell must lie in [0, J)");
    }
    if (cfg.initial_data.kind == InitialDataSpec::Kind::Explicit &&
        static_cast<int>(cfg.initial_data.values.size()) > cfg.model.shells) {
        r.fail_key("init_values", "init_values is longer than J");
    }
    if (!(cfg.ctrl.abs_tol > 0.0)) r.fail_key("abs_tol", "abs_tol must be > 0");
    if (!(cfg.ctrl.rel_tol > 0.0)) r.fail_key("rel_tol", "rel_tol must be > 0");
    if (!(cfg.ctrl.dt_min > 0.0)) r.fail_key("dt_min", "dt_min must be > 0");
    if (!(cfg.ctrl.dt_min <= cfg.ctrl.dt_init && cfg.ctrl.dt_init <= cfg.ctrl.dt_max)) {
        r.fail_key("dt_init", "need dt_min <= dt_init <= dt_max");
    }
    if (!(cfg.ctrl.safety > 0.0 && cfg.ctrl.safety < 1.0)) {
        r.fail_key("safety", "safety must be in (0, 1)");
    }
    if (!(cfg.stop.t_end > 0.0)) r.fail_key("t_end", "t_end must be > 0");
    if (!(cfg.stop.norm_cap > 0.0)) r.fail_key("norm_cap", "norm_cap must be > 0");
    if (cfg.stop.max_steps <= 0) r.fail_key("max_steps", "max_steps must be positive");
    if (cfg.diagnostics.w != 0.0 && !(cfg.diagnostics.w > 1.0)) {
        r.fail_key("w", "w must be > 1 (or omitted)");
    }
    if (!(cfg.diagnostics.sample_every > 0.0)) {
        r.fail_key("sample_every", "sample_every must be > 0");
    }
    if (cfg.output.csv_path.empty()) r.fail_key("csv", "csv path must be nonempty");
    if (cfg.output.json_path.empty()) r.fail_key("json", "json path must be nonempty");
    return cfg;
}

SweepConfig build_sweep(Reader& r) {
    SweepConfig cfg;
    cfg.lambda = r.real("lambda", 2.0);
    cfg.s = {r.real("s_lo", 0.5), r.real("s_hi", 1.0), static_cast<int>(r.integer("s_count", 3))};
    cfg.gamma = {r.real("gamma_lo", 0.1), r.real("gamma_hi", 0.3),
                 static_cast<int>(r.integer("gamma_count", 3))};
    cfg.beta = {r.real("beta_lo", 0.0), r.real("beta_hi", 1.0),
                static_cast<int>(r.integer("beta_count", 3))};
    cfg.inviscid = r.boolean("inviscid", false);
    const std::string mode = r.text("sweep_mode", "certify");
    if (mode == "certify") {
        cfg.mode = SweepConfig::Mode::Certify;
    } else if (mode == "simulate+certify") {
        cfg.mode = SweepConfig::Mode::SimulateCertify;
    } else {
        r.fail_key("sweep_mode", "sweep_mode must be certify or simulate+certify");
    }
    cfg.workers = static_cast<int>(r.integer("workers", 1));
    cfg.output = r.text("output", "sweep.csv");

    if (!(cfg.lambda > 1.0)) r.fail_key("lambda", "lambda must be > 1");
    if (cfg.s.count < 1) r.fail_key("s_count", "s_count must be >= 1");
    if (cfg.gamma.count < 1) r.fail_key("gamma_count", "gamma_count must be >= 1");
    if (cfg.beta.count < 1) r.fail_key("beta_count", "beta_count must be >= 1");
    if (cfg.workers < 1) r.fail_key("workers", "workers must be >= 1");
    if (cfg.output.empty()) r.fail_key("output", "output path must be nonempty");
    return cfg;
}

CertifyConfig build_certify(Reader& r) {
    CertifyConfig cfg;
    cfg.s = r.real("s", 1.0);
    cfg.gamma = r.real_opt("gamma");
    cfg.beta = r.real("beta", 0.0);
    cfg.lambda = r.real("lambda", 2.0);
    cfg.json_path = r.text("json", "");

    if (!(cfg.s > 1.0 / 3.0)) r.fail_key("s", "certificates require s > 1/3");
    if (cfg.gamma && !(*cfg.gamma > 0.0 && *cfg.gamma < 1.0 / 3.0)) {
        r.fail_key("gamma", "certificates require gamma < 1/3 (and > 0); omit gamma for inviscid");
    }
    if (cfg.beta < 0.0) r.fail_key("beta", "beta must be >= 0");
    if (!(cfg.lambda > 1.0)) r.fail_key("lambda", "lambda must be > 1");
    return cfg;
}

SelfSimilarConfig build_selfsimilar(Reader& r) {
    SelfSimilarConfig cfg;
    cfg.n = static_cast<int>(r.integer("n", 60));
    cfg.tol = r.real("tol", 1e-10);
    cfg.csv_path = r.text("csv", "");
    cfg.json_path = r.text("json", "");
    if (cfg.n < 20) r.fail_key("n", "n must be >= 20");
    if (!(cfg.tol > 0.0)) r.fail_key("tol", "tol must be > 0");
    return cfg;
}

ClassifyConfig build_classify(Reader& r) {
    ClassifyConfig cfg;
    cfg.coeffs.c_mm = r.real("Cm1m1", 0.0);
    cfg.coeffs.c_m0 = r.real("Cm10", 0.0);
    cfg.coeffs.c_mp = r.real("Cm1p1", 0.0);
    cfg.coeffs.c_00 = r.real("C00", 0.0);
    cfg.coeffs.c_0p = r.real("C0p1", 0.0);
    cfg.coeffs.c_pp = r.real("Cp1p1", 0.0);
    cfg.lambda = r.real("lambda", 2.0);
    if (!(cfg.lambda > 1.0)) r.fail_key("lambda", "lambda must be > 1");
    cfg.json_path = r.text("json", "");
    return cfg;
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::vector<double> InitialDataSpec::materialize(int shells) const {
    std::vector<double> a(static_cast<size_t>(shells), 0.0);
    switch (kind) {
        case Kind::Explicit:
            for (size_t j = 0; j < values.size() && j < a.size(); ++j) a[j] = values[j];
            break;
        case Kind::SingleShell:
            if (shell >= 0 && shell < shells) a[static_cast<size_t>(shell)] = amplitude;
            break;
        case Kind::Geometric: {
            double v = amplitude;
            for (int j = 0; j <= k_max && j < shells; ++j) {
                a[static_cast<size_t>(j)] = v;
                v *= ratio;
            }
            break;
        }
    }
    return a;
}

double SweepAxis::at(int i) const {
    if (count <= 1) return lo;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
}

ParseOutcome parse_config(std::string_view text) {
    ConfigSource src;
    std::vector<ConfigError> errors;

    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        ++line_no;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        const size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        if (stripped.front() == '[' && stripped.back() == ']') continue;  // decorative section

        const size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            errors.push_back({line_no, "expected 'key = value', got '" + stripped + "'"});
            continue;
        }
        const std::string key = trim(std::string_view(stripped).substr(0, eq));
        const std::string value = trim(std::string_view(stripped).substr(eq + 1));
        if (key.empty()) {
            errors.push_back({line_no, "empty key"});
            continue;
        }
        if (src.entries.count(key)) {
            errors.push_back({line_no, "duplicate key '" + key + "'"});
            continue;
        }
        src.set(key, value, line_no);
    }

    ParseOutcome out = build_config(src);
    out.errors.insert(out.errors.begin(), errors.begin(), errors.end());
    if (!out.errors.empty()) out.config.reset();
    std::stable_sort(out.errors.begin(), out.errors.end(),
                     [](const ConfigError& a, const ConfigError& b) { return a.line < b.line; });
    return out;
}

ParseOutcome build_config(const ConfigSource& source) {
    ParseOutcome out;
    out.source = source;
    Reader reader(source, out.errors);

    const std::string mode = reader.text("mode", "simulate");
    ParsedConfig cfg;
    if (mode == "simulate") {
        cfg = build_run(reader);
    } else if (mode == "sweep") {
        cfg = build_sweep(reader);
    } else if (mode == "certify") {
        cfg = build_certify(reader);
    } else if (mode == "selfsimilar") {
        cfg = build_selfsimilar(reader);
    } else if (mode == "classify") {
        cfg = build_classify(reader);
    } else {
        reader.fail_key("mode",
                        "mode must be one of simulate, sweep, certify, selfsimilar, classify");
        return out;
    }
    reader.finish_unknown_check();
    if (out.errors.empty()) out.config = std::move(cfg);
    return out;
}

std::string serialize(const RunConfig& cfg) {
    std::ostringstream os;
    os << "mode = simulate\n";
    os << "\n[model]\n";
    os << "lambda = " << format_real(cfg.model.lambda) << "\n";
    os << "alpha = " << format_real(cfg.model.alpha) << "\n";
    os << "beta = " << format_real(cfg.model.beta) << "\n";
    os << "nu = " << format_real(cfg.model.nu) << "\n";
    os << "gamma = " << format_real(cfg.model.gamma) << "\n";
    os << "J = " << cfg.model.shells << "\n";
    os << "f0 = " << format_real(cfg.f0) << "\n";
    os << "\n[initial_data]\n";
    switch (cfg.initial_data.kind) {
        case InitialDataSpec::Kind::Explicit: os << "init = explicit\n"; break;
        case InitialDataSpec::Kind::SingleShell: os << "init = single_shell\n"; break;
        case InitialDataSpec::Kind::Geometric: os << "init = geometric\n"; break;
    }
    os << "init_values =";
    for (double v : cfg.initial_data.values) os << " " << format_real(v);
    os << "\n";
    os << "init_shell = " << cfg.initial_data.shell << "\n";
    os << "init_amplitude = " << format_real(cfg.initial_data.amplitude) << "\n";
    os << "init_ratio = " << format_real(cfg.initial_data.ratio) << "\n";
    os << "init_kmax = " << cfg.initial_data.k_max << "\n";
    os << "\n[ctrl]\n";
    os << "abs_tol = " << format_real(cfg.ctrl.abs_tol) << "\n";
    os << "rel_tol = " << format_real(cfg.ctrl.rel_tol) << "\n";
    os << "dt_init = " << format_real(cfg.ctrl.dt_init) << "\n";
    os << "dt_min = " << format_real(cfg.ctrl.dt_min) << "\n";
    os << "dt_max = " << format_real(cfg.ctrl.dt_max) << "\n";
    os << "safety = " << format_real(cfg.ctrl.safety) << "\n";
    os << "\n[stop]\n";
    os << "t_end = " << format_real(cfg.stop.t_end) << "\n";
    os << "norm_s = " << format_real(cfg.stop.norm_s) << "\n";
    os << "norm_cap = " << format_real(cfg.stop.norm_cap) << "\n";
    os << "max_steps = " << cfg.stop.max_steps << "\n";
    os << "\n[diagnostics]\n";
    os << "s_list =";
    for (double v : cfg.diagnostics.s_list) os << " " << format_real(v);
    os << "\n";
    if (cfg.diagnostics.w != 0.0) os << "w = " << format_real(cfg.diagnostics.w) << "\n";
    os << "sample_every = " << format_real(cfg.diagnostics.sample_every) << "\n";
    os << "\n[output]\n";
    os << "csv = " << cfg.output.csv_path << "\n";
    os << "json = " << cfg.output.json_path << "\n";
    return os.str();
}

std::string serialize(const SweepConfig& cfg) {
    std::ostringstream os;
    os << "mode = sweep\n";
    os << "lambda = " << format_real(cfg.lambda) << "\n";
    os << "s_lo = " << format_real(cfg.s.lo) << "\n";
    os << "s_hi = " << format_real(cfg.s.hi) << "\n";
    os << "s_count = " << cfg.s.count << "\n";
    os << "gamma_lo = " << format_real(cfg.gamma.lo) << "\n";
    os << "gamma_hi = " << format_real(cfg.gamma.hi) << "\n";
    os << "gamma_count = " << cfg.gamma.count << "\n";
    os << "beta_lo = " << format_real(cfg.beta.lo) << "\n";
    os << "beta_hi = " << format_real(cfg.beta.hi) << "\n";
    os << "beta_count = " << cfg.beta.count << "\n";
    os << "inviscid = " << (cfg.inviscid ? "true" : "false") << "\n";
    os << "sweep_mode = "
       << (cfg.mode == SweepConfig::Mode::Certify ? "certify" : "simulate+certify") << "\n";
    os << "workers = " << cfg.workers << "\n";
    os << "output = " << cfg.output << "\n";
    return os.str();
}

std::string serialize(const CertifyConfig& cfg) {
    std::ostringstream os;
    os << "mode = certify\n";
    os << "s = " << format_real(cfg.s) << "\n";
    if (cfg.gamma) os << "gamma = " << format_real(*cfg.gamma) << "\n";
    os << "beta = " << format_real(cfg.beta) << "\n";
    os << "lambda = " << format_real(cfg.lambda) << "\n";
    if (!cfg.json_path.empty()) os << "json = " << cfg.json_path << "\n";
    return os.str();
}

std::string serialize(const SelfSimilarConfig& cfg) {
    std::ostringstream os;
    os << "mode = selfsimilar\n";
    os << "n = " << cfg.n << "\n";
    os << "tol = " << format_real(cfg.tol) << "\n";
    if (!cfg.csv_path.empty()) os << "csv = " << cfg.csv_path << "\n";
    if (!cfg.json_path.empty()) os << "json = " << cfg.json_path << "\n";
    return os.str();
}

std::string serialize(const ClassifyConfig& cfg) {
    std::ostringstream os;
    os << "mode = classify\n";
    os << "Cm1m1 = " << format_real(cfg.coeffs.c_mm) << "\n";
    os << "Cm10 = " << format_real(cfg.coeffs.c_m0) << "\n";
    os << "Cm1p1 = " << format_real(cfg.coeffs.c_mp) << "\n";
    os << "C00 = " << format_real(cfg.coeffs.c_00) << "\n";
    os << "C0p1 = " << format_real(cfg.coeffs.c_0p) << "\n";
    os << "Cp1p1 = " << format_real(cfg.coeffs.c_pp) << "\n";
    os << "lambda = " << format_real(cfg.lambda) << "\n";
    if (!cfg.json_path.empty()) os << "json = " << cfg.json_path << "\n";
    return os.str();
}

std::string serialize(const ParsedConfig& cfg) {
    return std::visit([](const auto& c) { return serialize(c); }, cfg);
}

}  // namespace dyadic
