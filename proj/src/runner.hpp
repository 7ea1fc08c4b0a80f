#pragma once

#include <string>

#include "config.hpp"

namespace dyadic {

/// Process exit codes shared by the library entry points and the CLI.
enum ExitCode : int {
    kExitOk = 0,
    kExitBlowupProxy = 2,      ///< NormCapExceeded or StepFloorHit
    kExitConfigError = 3,
    kExitNumericalFailure = 4,  ///< also BracketNotFound in selfsimilar
    kExitEmptyAdmissible = 5,
    kExitMaxSteps = 6,
};

struct RunOutput {
    int exit_code = kExitOk;
    std::string summary_json;  ///< what the CLI prints to stdout
};

/// Environment variable overriding the sweep worker count.
inline constexpr const char* kWorkersEnvVar = "DYADIC_WORKERS";

RunOutput run_simulate(const RunConfig& cfg);
RunOutput run_certify(const CertifyConfig& cfg);
RunOutput run_sweep(const SweepConfig& cfg);
RunOutput run_selfsimilar(const SelfSimilarConfig& cfg);
RunOutput run_classify(const ClassifyConfig& cfg);

/// Dispatch on the parsed mode.
RunOutput run(const ParsedConfig& cfg);

}  // namespace dyadic
