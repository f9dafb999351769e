#include "cmv/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cmv/models.hpp"

namespace cmv::cfg {
namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

const json& require(const json& obj, const std::string& context,
                    const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end())
    fail("missing required field \"" + key + "\" in " + context);
  return *it;
}

std::string req_string(const json& obj, const std::string& context,
                       const std::string& key) {
  const json& v = require(obj, context, key);
  if (!v.is_string())
    fail("field \"" + key + "\" in " + context + " must be a string");
  return v.get<std::string>();
}

double req_number(const json& obj, const std::string& context,
                  const std::string& key) {
  const json& v = require(obj, context, key);
  if (!v.is_number())
    fail("field \"" + key + "\" in " + context + " must be a number");
  return v.get<double>();
}

i64 req_integer(const json& obj, const std::string& context,
                const std::string& key) {
  const json& v = require(obj, context, key);
  if (!v.is_number_integer())
    fail("field \"" + key + "\" in " + context + " must be an integer");
  return v.get<i64>();
}

i64 opt_integer(const json& obj, const std::string& context,
                const std::string& key, i64 dflt) {
  if (!obj.contains(key)) return dflt;
  return req_integer(obj, context, key);
}

double opt_number(const json& obj, const std::string& context,
                  const std::string& key, double dflt) {
  if (!obj.contains(key)) return dflt;
  return req_number(obj, context, key);
}

bool opt_bool(const json& obj, const std::string& context,
              const std::string& key, bool dflt) {
  if (!obj.contains(key)) return dflt;
  const json& v = obj.at(key);
  if (!v.is_boolean())
    fail("field \"" + key + "\" in " + context + " must be a boolean");
  return v.get<bool>();
}

// Complex values are written as [re, im] pairs.
Cx as_complex(const json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail(what + " must be a [re, im] pair of numbers");
  return Cx(v[0].get<double>(), v[1].get<double>());
}

Cx req_complex(const json& obj, const std::string& context,
               const std::string& key) {
  return as_complex(require(obj, context, key),
                    "field \"" + key + "\" in " + context);
}

RhoConvention parse_convention(const json& model) {
  if (!model.contains("convention")) return RhoConvention::standard;
  std::string c = req_string(model, "model", "convention");
  if (c == "standard") return RhoConvention::standard;
  if (c == "complexified") return RhoConvention::complexified;
  fail("model field \"convention\" must be \"standard\" or \"complexified\", "
       "got \"" + c + "\"");
}

void check_unit_interval(double v, const std::string& name, bool allowZero,
                         bool allowOne) {
  bool lowOk = allowZero ? v >= 0.0 : v > 0.0;
  bool highOk = allowOne ? v <= 1.0 : v < 1.0;
  if (!lowOk || !highOk)
    fail("model field \"" + name + "\" out of range: got " +
         std::to_string(v));
}

std::vector<double> number_array(const json& v, const std::string& what) {
  if (!v.is_array()) fail(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(what + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<i64> integer_array(const json& v, const std::string& what) {
  if (!v.is_array()) fail(what + " must be an array of integers");
  std::vector<i64> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) fail(what + " must be an array of integers");
    out.push_back(e.get<i64>());
  }
  return out;
}

// Exactly one of params.z / params.z_grid selects the spectral parameters.
// Returns true when the explicit form "z" was used.
bool check_z_choice(const json& params, const std::string& task) {
  bool hasZ = params.contains("z");
  bool hasGrid = params.contains("z_grid");
  if (hasZ == hasGrid)
    fail("task \"" + task +
         "\" needs exactly one of params.z (a [re, im] pair) or "
         "params.z_grid (a point count on the unit circle)");
  if (hasGrid) {
    i64 g = req_integer(params, "params", "z_grid");
    if (g < 1) fail("params.z_grid must be >= 1");
  }
  return hasZ;
}

}  // namespace

void expect_keys(const json& obj, const std::string& context,
                 const std::vector<std::string>& required,
                 const std::vector<std::string>& optional) {
  if (!obj.is_object()) fail(context + " must be a JSON object");
  std::set<std::string> allowed(required.begin(), required.end());
  allowed.insert(optional.begin(), optional.end());
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      fail("unknown field \"" + item.key() + "\" in " + context);
  }
  for (const auto& key : required) {
    if (!obj.contains(key))
      fail("missing required field \"" + key + "\" in " + context);
  }
}

CoefficientSequence build_model(const json& model) {
  if (!model.is_object()) fail("\"model\" must be a JSON object");
  std::string name = req_string(model, "model", "name");

  if (name == "uamo" || name == "mosaic") {
    std::vector<std::string> opt = {"convention"};
    if (name == "mosaic") opt.push_back("s");
    expect_keys(model, "model", {"name", "lambda1", "lambda2", "phi", "theta"},
                opt);
    double l1 = req_number(model, "model", "lambda1");
    double l2 = req_number(model, "model", "lambda2");
    check_unit_interval(l1, "lambda1", false, true);
    check_unit_interval(l2, "lambda2", true, false);
    double phi = req_number(model, "model", "phi");
    double theta = req_number(model, "model", "theta");
    RhoConvention conv = parse_convention(model);
    if (name == "uamo")
      return models::uamo_sequence({l1, l2, phi, theta}, conv);
    i64 s = opt_integer(model, "model", "s", 1);
    if (s < 1) fail("model field \"s\" must be >= 1");
    return models::mosaic_sequence({l1, l2, phi, theta, s}, conv);
  }

  if (name == "subshift") {
    expect_keys(model, "model", {"name", "mode", "coding"},
                {"symbols", "convention"});
    std::string mode = req_string(model, "model", "mode");
    const json& codingJson = require(model, "model", "coding");
    if (!codingJson.is_object())
      fail("model field \"coding\" must map letters to [re, im] pairs");
    models::SubshiftWord word;
    for (const auto& item : codingJson.items()) {
      if (item.key().size() != 1)
        fail("coding keys must be single letters, got \"" + item.key() + "\"");
      Cx a = as_complex(item.value(), "coding value for \"" + item.key() + "\"");
      if (std::abs(a) >= 1.0)
        fail("coding value for \"" + item.key() + "\" must have modulus < 1");
      word.coding[item.key()[0]] = a;
    }
    if (mode == "periodic") {
      word.symbols = req_string(model, "model", "symbols");
      if (word.symbols.empty()) fail("model field \"symbols\" must be non-empty");
      for (char c : word.symbols)
        if (!word.coding.count(c))
          fail(std::string("symbol \"") + c + "\" has no coding entry");
      return models::subshift_sequence(word, models::RepeatMode::periodic,
                                       parse_convention(model));
    }
    if (mode == "substitution") {
      if (model.contains("symbols"))
        fail("model field \"symbols\" is not used in substitution mode");
      if (!word.coding.count('a') || !word.coding.count('b'))
        fail("substitution mode needs coding entries for \"a\" and \"b\"");
      return models::subshift_sequence(
          word, models::RepeatMode::substitution_fixed_point,
          parse_convention(model));
    }
    fail("model field \"mode\" must be \"periodic\" or \"substitution\", got \"" +
         mode + "\"");
  }

  if (name == "custom") {
    expect_keys(model, "model", {"name", "alphas"}, {"convention"});
    const json& arr = require(model, "model", "alphas");
    if (!arr.is_array() || arr.empty())
      fail("model field \"alphas\" must be a non-empty array of [re, im] pairs");
    std::vector<Cx> alphas;
    for (std::size_t k = 0; k < arr.size(); ++k) {
      Cx a = as_complex(arr[k], "alphas[" + std::to_string(k) + "]");
      if (std::abs(a) >= 1.0)
        fail("alphas[" + std::to_string(k) + "] must have modulus < 1");
      alphas.push_back(a);
    }
    return models::custom_sequence(std::move(alphas), parse_convention(model));
  }

  if (name == "random") {
    expect_keys(model, "model", {"name", "r0", "seed"}, {"convention"});
    double r0 = req_number(model, "model", "r0");
    check_unit_interval(r0, "r0", false, false);
    i64 seed = req_integer(model, "model", "seed");
    if (seed < 0) fail("model field \"seed\" must be a non-negative integer");
    return models::random_sequence(r0, static_cast<u64>(seed),
                                   parse_convention(model));
  }

  if (name == "constant") {
    expect_keys(model, "model", {"name", "alpha"}, {"convention"});
    Cx a = req_complex(model, "model", "alpha");
    if (std::abs(a) >= 1.0) fail("model field \"alpha\" must have modulus < 1");
    return models::constant_sequence(a, parse_convention(model));
  }

  fail("unknown model name \"" + name +
       "\"; run `cmvtk list-models` for the catalogue");
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("configuration is not valid JSON: ") + e.what());
  }
  expect_keys(doc, "configuration", {"task", "output"},
              {"model", "params", "seed"});

  ExperimentConfig cfg;
  cfg.task = req_string(doc, "configuration", "task");
  const auto& names = task_names();
  if (std::find(names.begin(), names.end(), cfg.task) == names.end()) {
    std::string all;
    for (const auto& n : names) all += (all.empty() ? "" : ", ") + n;
    fail("unknown task \"" + cfg.task + "\"; expected one of: " + all);
  }

  // The delta task works on arithmetic data alone; every other task needs a
  // coefficient sequence.
  if (doc.contains("model")) {
    const json& model = doc.at("model");
    cfg.sequence = build_model(model);
    cfg.modelName = req_string(model, "model", "name");
  } else if (cfg.task != "delta") {
    fail("missing required field \"model\" in configuration (only the "
         "\"delta\" task runs without one)");
  }

  const json& output = require(doc, "configuration", "output");
  expect_keys(output, "output", {"path"}, {"format"});
  cfg.outputPath = req_string(output, "output", "path");
  if (cfg.outputPath.empty()) fail("output field \"path\" must be non-empty");
  cfg.format = output.contains("format")
                   ? req_string(output, "output", "format")
                   : std::string("csv");
  if (cfg.format != "csv" && cfg.format != "ndjson")
    fail("output field \"format\" must be \"csv\" or \"ndjson\", got \"" +
         cfg.format + "\"");

  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<i64>() >= 0))
      fail("field \"seed\" must be a non-negative integer");
    cfg.seed = s.get<u64>();
  }

  cfg.params = doc.contains("params") ? doc.at("params") : json::object();
  if (!cfg.params.is_object()) fail("\"params\" must be a JSON object");
  cfg.raw = doc;
  return cfg;
}

void validate_task(ExperimentConfig& cfg) {
  json& p = cfg.params;
  const std::string& task = cfg.task;

  auto requireSeed = [&]() {
    if (!cfg.seed)
      fail("task \"" + task +
           "\" draws random data and requires a seed (top-level \"seed\" or "
           "--seed)");
  };

  if (task == "lyapunov" || task == "criterion") {
    std::vector<std::string> req = {"steps"};
    std::vector<std::string> opt = {"z", "z_grid", "restarts", "start_index",
                                    "trace"};
    if (task == "criterion") {
      opt = {"z", "z_grid", "restarts", "start_index", "b_unc"};
      req.push_back("B");
    }
    expect_keys(p, "params", req, opt);
    i64 steps = req_integer(p, "params", "steps");
    if (steps < 1) fail("params.steps must be >= 1");
    i64 restarts = opt_integer(p, "params", "restarts", 4);
    if (restarts < 1) fail("params.restarts must be >= 1");
    p["restarts"] = restarts;
    p["start_index"] = opt_integer(p, "params", "start_index", 0);
    bool explicitZ = check_z_choice(p, task);
    if (task == "criterion") {
      double bound = req_number(p, "params", "B");
      if (!(bound > 0.0)) fail("params.B must be > 0");
      double bUnc = opt_number(p, "params", "b_unc", 0.0);
      if (bUnc < 0.0) fail("params.b_unc must be >= 0");
      p["b_unc"] = bUnc;
      if (explicitZ) {
        Cx z = req_complex(p, "params", "z");
        if (std::abs(std::abs(z) - 1.0) > 1e-12)
          fail("params.z must lie on the unit circle (| |z| - 1 | <= 1e-12) "
               "for the criterion task");
      }
    } else {
      p["trace"] = opt_bool(p, "params", "trace", false);
      if (explicitZ) {
        Cx z = req_complex(p, "params", "z");
        if (std::abs(z) == 0.0) fail("params.z must be non-zero");
      }
    }
    return;
  }

  if (task == "reflectivity") {
    expect_keys(p, "params",
                {"b_grid", "two_zeta_lo", "two_zeta_hi", "data_window"}, {});
    auto bs = number_array(require(p, "params", "b_grid"), "params.b_grid");
    if (bs.empty()) fail("params.b_grid must be non-empty");
    for (double b : bs)
      if (!(b > 0.0)) fail("params.b_grid entries must be > 0");
    i64 lo = req_integer(p, "params", "two_zeta_lo");
    i64 hi = req_integer(p, "params", "two_zeta_hi");
    if (hi < lo) fail("params.two_zeta_hi must be >= params.two_zeta_lo");
    i64 window = req_integer(p, "params", "data_window");
    if (window < 1) fail("params.data_window must be >= 1");
    return;
  }

  if (task == "delta") {
    expect_keys(p, "params", {"beta_torus", "omega_torus", "nmax"},
                {"mods", "beta_cyclic", "omega_cyclic", "nmin"});
    auto beta = number_array(require(p, "params", "beta_torus"),
                             "params.beta_torus");
    auto omega = number_array(require(p, "params", "omega_torus"),
                              "params.omega_torus");
    if (beta.size() != omega.size())
      fail("params.beta_torus and params.omega_torus must have equal length");
    std::vector<i64> mods;
    if (p.contains("mods"))
      mods = integer_array(p.at("mods"), "params.mods");
    for (i64 q : mods)
      if (q < 2) fail("params.mods entries must be >= 2");
    bool needCyclic = !mods.empty();
    if (needCyclic != p.contains("beta_cyclic") ||
        needCyclic != p.contains("omega_cyclic"))
      fail("params.mods, params.beta_cyclic and params.omega_cyclic must be "
           "given together");
    if (needCyclic) {
      auto bc = integer_array(p.at("beta_cyclic"), "params.beta_cyclic");
      auto oc = integer_array(p.at("omega_cyclic"), "params.omega_cyclic");
      if (bc.size() != mods.size() || oc.size() != mods.size())
        fail("params.beta_cyclic and params.omega_cyclic must match "
             "params.mods in length");
    }
    if (beta.empty() && mods.empty())
      fail("the delta task needs at least one torus or cyclic component");
    i64 nmax = req_integer(p, "params", "nmax");
    if (nmax < 1) fail("params.nmax must be >= 1");
    i64 nmin = opt_integer(p, "params", "nmin", 1);
    if (nmin < 1 || nmin > nmax)
      fail("params.nmin must satisfy 1 <= nmin <= nmax");
    p["nmin"] = nmin;
    return;
  }

  if (task == "ipr" || task == "spectrum") {
    expect_keys(p, "params", {"a", "b"}, {});
    i64 a = req_integer(p, "params", "a");
    i64 b = req_integer(p, "params", "b");
    if (((a % 2) + 2) % 2 != 0)
      fail("params.a must be even (truncations start on an even site)");
    if (((b % 2) + 2) % 2 != 1)
      fail("params.b must be odd (truncations end on an odd site)");
    if (b <= a) fail("params.b must be > params.a");
    return;
  }

  if (task == "wronskian-drift") {
    expect_keys(p, "params", {"m", "z"}, {"normalize"});
    i64 m = req_integer(p, "params", "m");
    if (m < 2) fail("params.m must be >= 2");
    Cx z = req_complex(p, "params", "z");
    if (std::abs(z) == 0.0) fail("params.z must be non-zero");
    p["normalize"] = opt_bool(p, "params", "normalize", true);
    requireSeed();
    return;
  }

  if (task == "identity-check") {
    expect_keys(p, "params", {}, {"trials"});
    i64 trials = opt_integer(p, "params", "trials", 100);
    if (trials < 1) fail("params.trials must be >= 1");
    p["trials"] = trials;
    requireSeed();
    return;
  }

  fail("unknown task \"" + task + "\"");
}

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = {
      "lyapunov",        "reflectivity", "delta",          "criterion",
      "ipr",             "wronskian-drift", "identity-check", "spectrum"};
  return names;
}

std::string list_models_text() {
  return
      "uamo       lambda1 lambda2 phi theta\n"
      "           quasi-periodic split-step coefficients:\n"
      "           alpha_{2n-1} = lambda2 * cos(2*pi*(n*phi + theta)),\n"
      "           alpha_{2n}   = sqrt(1 - lambda1^2)\n"
      "mosaic     lambda1 lambda2 phi theta s\n"
      "           uamo with the odd-site modulation kept only every s-th\n"
      "           block (s = 1 reproduces uamo)\n"
      "subshift   mode=periodic symbols coding | mode=substitution coding\n"
      "           letters mapped to alpha values; substitution mode walks\n"
      "           the two-sided Thue-Morse fixed point over {a, b}\n"
      "custom     alphas = [[re, im], ...]\n"
      "           two-sided periodic extension of an explicit list\n"
      "random     r0 seed\n"
      "           index-hashed i.i.d.-style draws from the disk |alpha| <= r0\n"
      "constant   alpha = [re, im]\n"
      "           the same coefficient at every site\n"
      "\n"
      "Every model accepts \"convention\": \"standard\" (rho >= 0) or\n"
      "\"complexified\" (rho purely imaginary).\n";
}

}  // namespace cmv::cfg
