#pragma once

// Experiment configuration: strict JSON parsing, model factory, per-task
// parameter validation.  "Strict" means every object is checked against a
// whitelist of keys, so a typo like "lamda1" is reported instead of being
// silently ignored.  All validation failures throw ConfigError, which the
// CLI maps to exit code 2.

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cmv/sequence.hpp"
#include "cmv/types.hpp"

namespace cmv::cfg {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parsed and validated experiment description.  `raw` keeps the normalized
// configuration object for the manifest echo; `params` is the task parameter
// object after defaulting, so the runner can read it without re-validating.
struct ExperimentConfig {
  std::string task;
  std::string modelName;
  CoefficientSequence sequence;  // assigned by parse_config
  json raw;
  json params;
  std::string outputPath;
  std::string format;  // "csv" or "ndjson"
  std::optional<u64> seed;
};

// Throws ConfigError when `obj` is not a JSON object, contains a key outside
// `allowed`, or is missing one of `required`.  `context` names the object in
// the error message ("model", "params", ...).
void expect_keys(const json& obj, const std::string& context,
                 const std::vector<std::string>& required,
                 const std::vector<std::string>& optional);

// Builds a coefficient sequence from a model object.  Recognized names are
// "uamo", "mosaic", "subshift", "custom", "random", "constant"; every model
// accepts an optional "convention": "standard" | "complexified".
CoefficientSequence build_model(const json& model);

// Parses the full configuration document.  Validates structure and the model
// but not task parameters; call validate_task afterwards (the CLI merges the
// --seed override in between).
ExperimentConfig parse_config(const std::string& text);

// Per-task parameter validation.  Fills defaults into cfg.params, checks
// ranges, unimodularity of spectral parameters where required, and that
// randomized tasks carry a seed.
void validate_task(ExperimentConfig& cfg);

// Names of all recognized tasks, for diagnostics.
const std::vector<std::string>& task_names();

// Human-readable model catalogue for `cmvtk list-models`.
std::string list_models_text();

}  // namespace cmv::cfg
