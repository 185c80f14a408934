#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "pixelaudit/audit.hpp"
#include "pixelaudit/dedup.hpp"

namespace pixelaudit::app {

struct AuditConfig {
  AuditOptions options;
  RepresentativePolicy representative_policy = RepresentativePolicy::kFirstById;
  std::string out = "audit_out";
};

// Overlays the fields present in `j` onto `config`. Throws ConfigError naming
// the field.
void apply_config_json(AuditConfig& config, const nlohmann::json& j);
AuditConfig load_config_file(const std::string& path);
nlohmann::json to_json(const AuditConfig& config);

// "OTSU" applies to every kind; "DARK=OTSU,LIGHT=GMM" sets individual kinds.
void apply_method_flag(AuditConfig& config, const std::string& text);
// Comma-separated kind names.
std::set<IssueKind> parse_issue_list(const std::string& text);

}  // namespace pixelaudit::app
