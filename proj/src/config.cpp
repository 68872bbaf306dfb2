#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rsel/errors.hpp"
#include "rsel/harness.hpp"

namespace rsel {
namespace {

using json = nlohmann::json;

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& prefix,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(join(prefix, key), "unknown key");
  }
}

const json& require(const json& obj, const std::string& prefix, const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(join(prefix, key), "missing required key");
  return *it;
}

const json& require_object(const json& obj, const std::string& prefix, const std::string& key) {
  const auto& v = require(obj, prefix, key);
  if (!v.is_object()) throw ConfigError(join(prefix, key), "expected an object");
  return v;
}

std::int64_t as_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t as_uint(const json& v, const std::string& field) {
  if (!v.is_number_unsigned()) throw ConfigError(field, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

double as_double(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  return v.get<double>();
}

bool as_bool(const json& v, const std::string& field) {
  if (!v.is_boolean()) throw ConfigError(field, "expected true or false");
  return v.get<bool>();
}

std::vector<double> as_double_list(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k)
    out.push_back(as_double(v[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

template <typename T, typename Get>
void optional_field(const json& obj, const std::string& prefix, const std::string& key, T& target,
                    Get get) {
  const auto it = obj.find(key);
  if (it != obj.end()) target = get(*it, join(prefix, key));
}

ProblemSpec parse_problem(const json& p) {
  const std::string prefix = "problem";
  const auto& type_v = require(p, prefix, "type");
  if (!type_v.is_string()) throw ConfigError("problem.type", "expected a string");
  const auto type = type_v.get<std::string>();
  if (type == "normal_designs") {
    reject_unknown(p, prefix, {"type", "means", "sds"});
    return NormalDesigns{as_double_list(require(p, prefix, "means"), "problem.means"),
                         as_double_list(require(p, prefix, "sds"), "problem.sds")};
  }
  if (type == "increasing_means") {
    reject_unknown(p, prefix, {"type", "designs", "sd_low", "sd_high", "sigma_seed"});
    IncreasingMeans spec;
    std::int64_t designs = static_cast<std::int64_t>(spec.designs);
    optional_field(p, prefix, "designs", designs, as_int);
    if (designs < 2) throw ConfigError("problem.designs", "must be >= 2");
    spec.designs = static_cast<std::size_t>(designs);
    optional_field(p, prefix, "sd_low", spec.sd_low, as_double);
    optional_field(p, prefix, "sd_high", spec.sd_high, as_double);
    optional_field(p, prefix, "sigma_seed", spec.sigma_seed, as_uint);
    return spec;
  }
  if (type == "rosenbrock_grid") {
    reject_unknown(p, prefix, {"type", "noise_sd"});
    RosenbrockGrid spec;
    optional_field(p, prefix, "noise_sd", spec.noise_sd, as_double);
    return spec;
  }
  if (type == "goldstein_price_grid") {
    reject_unknown(p, prefix, {"type", "noise_sd"});
    GoldsteinPriceGrid spec;
    optional_field(p, prefix, "noise_sd", spec.noise_sd, as_double);
    return spec;
  }
  throw ConfigError("problem.type", "unknown problem type '" + type + "'");
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("<document>", "expected a JSON object");
  reject_unknown(doc, "",
                 {"description", "problem", "policies", "run", "replications", "base_seed",
                  "tracked_designs"});

  ExperimentConfig cfg;
  cfg.problem = parse_problem(require_object(doc, "", "problem"));

  const auto& pol = require(doc, "", "policies");
  if (!pol.is_array()) throw ConfigError("policies", "expected an array of policy names");
  for (std::size_t k = 0; k < pol.size(); ++k) {
    const std::string field = "policies[" + std::to_string(k) + "]";
    if (!pol[k].is_string()) throw ConfigError(field, "expected a policy name");
    const auto kind = parse_policy(pol[k].get<std::string>());
    if (!kind) throw ConfigError(field, "unknown policy '" + pol[k].get<std::string>() + "'");
    cfg.policies.push_back(*kind);
  }

  const auto& run = require_object(doc, "", "run");
  reject_unknown(run, "run",
                 {"n0", "delta", "budget", "checkpoints", "checkpoint_every",
                  "ocba_true_parameters", "psi_nu_floor"});
  optional_field(run, "run", "n0", cfg.run.n0, as_int);
  optional_field(run, "run", "delta", cfg.run.delta, as_int);
  cfg.run.budget = as_int(require(run, "run", "budget"), "run.budget");
  optional_field(run, "run", "ocba_true_parameters", cfg.run.ocba_true_parameters, as_bool);
  optional_field(run, "run", "psi_nu_floor", cfg.run.psi_nu_floor, as_double);

  cfg.replications = as_int(require(doc, "", "replications"), "replications");
  optional_field(doc, "", "base_seed", cfg.base_seed, as_uint);

  if (const auto it = doc.find("tracked_designs"); it != doc.end()) {
    if (!it->is_array()) throw ConfigError("tracked_designs", "expected an array of designs");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const auto d = as_int((*it)[k], "tracked_designs[" + std::to_string(k) + "]");
      if (d < 1) throw ConfigError("tracked_designs", "designs are numbered from 1");
      cfg.tracked_designs.push_back(static_cast<std::size_t>(d - 1));
    }
  }

  // Budget and n0 must be sane before default checkpoints can be generated.
  std::size_t designs = 0;
  try {
    designs = build_problem(cfg.problem).size();
  } catch (const DomainError& e) {
    throw ConfigError("problem", e.what());
  }
  if (cfg.run.n0 < 2) throw ConfigError("run.n0", "must be >= 2");
  if (cfg.run.delta < 1) throw ConfigError("run.delta", "must be >= 1");
  const auto initial = cfg.run.n0 * static_cast<std::int64_t>(designs);
  if (cfg.run.budget < initial)
    throw ConfigError("run.budget", "must be >= n0 * M = " + std::to_string(initial));

  const auto explicit_it = run.find("checkpoints");
  const auto every_it = run.find("checkpoint_every");
  if (explicit_it != run.end() && every_it != run.end())
    throw ConfigError("run.checkpoints", "give either checkpoints or checkpoint_every, not both");
  if (explicit_it != run.end()) {
    if (!explicit_it->is_array()) throw ConfigError("run.checkpoints", "expected an array");
    for (std::size_t k = 0; k < explicit_it->size(); ++k)
      cfg.run.checkpoints.push_back(
          as_int((*explicit_it)[k], "run.checkpoints[" + std::to_string(k) + "]"));
    cfg.checkpoints_explicit = true;
  } else if (every_it != run.end()) {
    const auto every = as_int(*every_it, "run.checkpoint_every");
    if (every < 1) throw ConfigError("run.checkpoint_every", "must be >= 1");
    cfg.run.checkpoints = spaced_checkpoints(cfg.run.n0, every, cfg.run.budget, designs);
    cfg.checkpoints_explicit = true;
  } else {
    cfg.run.checkpoints =
        iteration_checkpoints(cfg.run.n0, cfg.run.delta, cfg.run.budget, designs);
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace rsel
