#pragma once

#include <string>

namespace otrisk {

/// One experiment run: a JSON report plus (possibly empty) CSV companion data.
struct ExperimentOutput {
    std::string report_json;
    std::string csv;
};

/**
 * Experiment runners.  Each takes a JSON configuration string (an empty string
 * or "{}" selects all defaults), validates it strictly — unknown keys are
 * rejected — and returns a deterministic report:
 *
 *   { "schema": "otrisk/v1", "command": ..., "config": { resolved values },
 *     "results": { ... } }
 *
 * Reports contain no timestamps or environment data; rerunning with the same
 * configuration reproduces them byte for byte.
 */
ExperimentOutput run_verify_duality(const std::string& config_json);
ExperimentOutput run_ruin1d(const std::string& config_json);
ExperimentOutput run_ruin2d(const std::string& config_json);
ExperimentOutput run_reinsurance(const std::string& config_json);
ExperimentOutput run_calibrate(const std::string& config_json);

/// Dispatch by command name ("verify-duality", "ruin1d", "ruin2d",
/// "reinsurance", "calibrate"); unknown commands raise InvalidInput.
ExperimentOutput run_experiment(const std::string& command, const std::string& config_json);

} // namespace otrisk
