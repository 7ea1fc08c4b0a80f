#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "classify.hpp"
#include "integrate.hpp"
#include "model.hpp"

namespace dyadic {

/// One validation problem; line 0 marks values injected by overrides.
struct ConfigError {
    int line = 0;
    std::string message;
};

struct InitialDataSpec {
    enum class Kind { Explicit, SingleShell, Geometric };
    Kind kind = Kind::SingleShell;
    std::vector<double> values;  ///< Explicit
    int shell = 0;               ///< SingleShell
    double amplitude = 1.0;      ///< SingleShell and Geometric
    double ratio = 0.5;          ///< Geometric: a_j = amplitude * ratio^j
    int k_max = 8;               ///< Geometric: j <= k_max

    std::vector<double> materialize(int shells) const;
    bool operator==(const InitialDataSpec&) const = default;
};

struct OutputSpec {
    std::string csv_path = "trajectory.csv";
    std::string json_path = "summary.json";
    bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
    ModelParams model;
    double f0 = 0.0;
    InitialDataSpec initial_data;
    StepControl ctrl;
    StopCondition stop;
    DiagnosticsSpec diagnostics;
    OutputSpec output;
    bool operator==(const RunConfig&) const = default;
};

struct SweepAxis {
    double lo = 0.0;
    double hi = 0.0;
    int count = 1;

    double at(int i) const;
    bool operator==(const SweepAxis&) const = default;
};

struct SweepConfig {
    SweepAxis s{0.5, 1.0, 3};
    SweepAxis gamma{0.1, 0.3, 3};
    SweepAxis beta{0.0, 1.0, 3};
    bool inviscid = false;  ///< drop the gamma axis entirely
    double lambda = 2.0;
    enum class Mode { Certify, SimulateCertify };
    Mode mode = Mode::Certify;
    int workers = 1;
    std::string output = "sweep.csv";
    bool operator==(const SweepConfig&) const = default;
};

struct CertifyConfig {
    double s = 1.0;
    std::optional<double> gamma;  ///< absent = inviscid
    double beta = 0.0;
    double lambda = 2.0;
    std::string json_path;  ///< empty = stdout only
    bool operator==(const CertifyConfig&) const = default;
};

struct SelfSimilarConfig {
    int n = 60;
    double tol = 1e-10;
    std::string csv_path;
    std::string json_path;
    bool operator==(const SelfSimilarConfig&) const = default;
};

struct ClassifyConfig {
    GenericModelCoefficients coeffs;
    double lambda = 2.0;
    std::string json_path;
    bool operator==(const ClassifyConfig&) const = default;
};

using ParsedConfig =
    std::variant<RunConfig, SweepConfig, CertifyConfig, SelfSimilarConfig, ClassifyConfig>;

/// Raw key/value pairs with source lines, before typing. Keys form one flat
/// namespace; [section] headers are allowed for readability and ignored.
struct ConfigSource {
    std::map<std::string, std::pair<std::string, int>> entries;

    void set(const std::string& key, const std::string& value, int line = 0) {
        entries[key] = {value, line};
    }
};

struct ParseOutcome {
    std::optional<ParsedConfig> config;  ///< set only when errors is empty
    std::vector<ConfigError> errors;     ///< every problem found, not just the first
    ConfigSource source;
};

/// Parses the flat `key = value` format (UTF-8, `#` comments). Returns the
/// typed config with documented defaults filled, or the full list of
/// validation errors, each carrying its source line.
ParseOutcome parse_config(std::string_view text);

/// Re-validates after overrides (`--set key=value` semantics).
ParseOutcome build_config(const ConfigSource& source);

std::string serialize(const RunConfig& cfg);
std::string serialize(const SweepConfig& cfg);
std::string serialize(const CertifyConfig& cfg);
std::string serialize(const SelfSimilarConfig& cfg);
std::string serialize(const ClassifyConfig& cfg);
std::string serialize(const ParsedConfig& cfg);

}  // namespace dyadic
