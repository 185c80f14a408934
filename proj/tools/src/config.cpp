#include "pixelaudit/app/config.hpp"

#include <fstream>
#include <sstream>

#include "pixelaudit/error.hpp"

namespace pixelaudit::app {

namespace {

template <typename T>
T get(const nlohmann::json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + key + ": wrong type");
  }
}

IssueKind kind_field(const std::string& name, const std::string& where) {
  try {
    return parse_issue_kind(name);
  } catch (const std::exception&) {
    throw ConfigError(where + ": unknown issue kind '" + name + "'");
  }
}

ThresholdMethod method_field(const std::string& name, const std::string& where) {
  try {
    return parse_method(name);
  } catch (const std::exception&) {
    throw ConfigError(where + ": unknown threshold method '" + name + "'");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::string policy_name(RepresentativePolicy p) {
  return p == RepresentativePolicy::kFirstById ? "FIRST_BY_ID" : "HIGHEST_MEAN_QUALITY";
}

}  // namespace

void apply_config_json(AuditConfig& config, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected an object");
  AuditOptions& o = config.options;
  if (j.contains("issues")) {
    const auto& list = j.at("issues");
    if (!list.is_array()) throw ConfigError("issues: expected a list");
    o.issues.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!list[i].is_string()) throw ConfigError("issues[" + std::to_string(i) + "]: not a string");
      o.issues.insert(kind_field(list[i].get<std::string>(), "issues[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("default_method")) {
    o.default_method = method_field(get<std::string>(j, "default_method", ""), "default_method");
  }
  if (j.contains("methods")) {
    const auto& m = j.at("methods");
    if (!m.is_object()) throw ConfigError("methods: expected an object of kind -> method");
    for (const auto& [k, v] : m.items()) {
      if (!v.is_string()) throw ConfigError("methods." + k + ": not a string");
      o.methods[kind_field(k, "methods." + k)] = method_field(v.get<std::string>(), "methods." + k);
    }
  }
  if (j.contains("light_percentile")) {
    try {
      o.light = LightScoreMode::with_rank(get<int>(j, "light_percentile", ""));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("light_percentile: ") + e.what());
    }
  }
  if (j.contains("dedup_cutoff")) {
    o.dedup_cutoff = get<int>(j, "dedup_cutoff", "");
    if (o.dedup_cutoff < 0 || o.dedup_cutoff > 64) throw ConfigError("dedup_cutoff: must be in [0, 64]");
  }
  if (j.contains("exact_by_file_bytes")) {
    o.exact_by_file_bytes = get<bool>(j, "exact_by_file_bytes", "");
  }
  if (j.contains("semantic")) {
    const auto& s = j.at("semantic");
    if (!s.is_object()) throw ConfigError("semantic: expected an object");
    if (s.contains("enabled")) o.semantic_enabled = get<bool>(s, "enabled", "semantic.");
    if (s.contains("provider")) o.semantic_provider = get<std::string>(s, "provider", "semantic.");
    if (s.contains("cutoff")) {
      o.semantic_cutoff = get<double>(s, "cutoff", "semantic.");
      if (!(o.semantic_cutoff >= -1.0 && o.semantic_cutoff <= 1.0)) {
        throw ConfigError("semantic.cutoff: must be in [-1, 1]");
      }
    }
  }
  if (j.contains("luma_formula")) {
    try {
      o.luma_formula = parse_luma_formula(get<std::string>(j, "luma_formula", ""));
    } catch (const Error& e) {
      throw ConfigError(std::string("luma_formula: ") + e.what());
    }
  }
  if (j.contains("workers")) {
    o.workers = get<int>(j, "workers", "");
    if (o.workers < 1) throw ConfigError("workers: must be at least 1");
  }
  if (j.contains("fixed_thresholds")) {
    const auto& m = j.at("fixed_thresholds");
    if (!m.is_object()) throw ConfigError("fixed_thresholds: expected an object");
    for (const auto& [k, v] : m.items()) {
      if (!v.is_number()) throw ConfigError("fixed_thresholds." + k + ": not a number");
      o.fixed_thresholds[kind_field(k, "fixed_thresholds." + k)] = v.get<double>();
    }
  }
  if (j.contains("ght")) {
    const auto& g = j.at("ght");
    if (!g.is_object()) throw ConfigError("ght: expected an object");
    if (g.contains("nu")) o.ght.nu = get<double>(g, "nu", "ght.");
    if (g.contains("tau")) o.ght.tau = get<double>(g, "tau", "ght.");
    if (g.contains("kappa")) o.ght.kappa = get<double>(g, "kappa", "ght.");
    if (g.contains("omega")) o.ght.omega = get<double>(g, "omega", "ght.");
    try {
      o.ght.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("ght: ") + e.what());
    }
  }
  if (j.contains("mve_window")) {
    o.mve_window = get<int>(j, "mve_window", "");
    if (o.mve_window < 1) throw ConfigError("mve_window: must be at least 1");
  }
  if (j.contains("iqr_factor")) {
    o.iqr_factor = get<double>(j, "iqr_factor", "");
    if (!(o.iqr_factor >= 0.0)) throw ConfigError("iqr_factor: must be non-negative");
  }
  if (j.contains("representative_policy")) {
    const auto p = get<std::string>(j, "representative_policy", "");
    if (p == "FIRST_BY_ID") {
      config.representative_policy = RepresentativePolicy::kFirstById;
    } else if (p == "HIGHEST_MEAN_QUALITY") {
      config.representative_policy = RepresentativePolicy::kHighestMeanQuality;
    } else {
      throw ConfigError("representative_policy: unknown policy '" + p + "'");
    }
  }
  if (j.contains("out")) config.out = get<std::string>(j, "out", "");
}

AuditConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  AuditConfig config;
  apply_config_json(config, j);
  return config;
}

nlohmann::json to_json(const AuditConfig& config) {
  const AuditOptions& o = config.options;
  nlohmann::json j;
  j["issues"] = nlohmann::json::array();
  for (IssueKind k : kAllIssueKinds) {
    if (o.issues.count(k)) j["issues"].push_back(to_string(k));
  }
  j["default_method"] = to_string(o.default_method);
  j["methods"] = nlohmann::json::object();
  for (const auto& [k, m] : o.methods) j["methods"][to_string(k)] = to_string(m);
  j["light_percentile"] = o.light.percentile_rank;
  j["dedup_cutoff"] = o.dedup_cutoff;
  j["exact_by_file_bytes"] = o.exact_by_file_bytes;
  j["semantic"] = {{"enabled", o.semantic_enabled},
                   {"provider", o.semantic_provider},
                   {"cutoff", o.semantic_cutoff}};
  j["luma_formula"] = to_string(o.luma_formula);
  j["workers"] = o.workers;
  j["fixed_thresholds"] = nlohmann::json::object();
  for (const auto& [k, v] : o.fixed_thresholds) j["fixed_thresholds"][to_string(k)] = v;
  j["ght"] = {{"nu", o.ght.nu}, {"tau", o.ght.tau}, {"kappa", o.ght.kappa}, {"omega", o.ght.omega}};
  j["mve_window"] = o.mve_window;
  j["iqr_factor"] = o.iqr_factor;
  j["representative_policy"] = policy_name(config.representative_policy);
  j["out"] = config.out;
  return j;
}

void apply_method_flag(AuditConfig& config, const std::string& text) {
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      config.options.default_method = method_field(item, "--method");
      config.options.methods.clear();
    } else {
      const IssueKind k = kind_field(trim(item.substr(0, eq)), "--method");
      config.options.methods[k] = method_field(trim(item.substr(eq + 1)), "--method");
    }
  }
}

std::set<IssueKind> parse_issue_list(const std::string& text) {
  std::set<IssueKind> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.insert(kind_field(item, "--issues"));
  }
  return out;
}

}  // namespace pixelaudit::app
