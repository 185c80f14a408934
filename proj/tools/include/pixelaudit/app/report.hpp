#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pixelaudit/app/config.hpp"
#include "pixelaudit/audit.hpp"

namespace pixelaudit::app {

// Selected kinds in canonical order.
std::vector<IssueKind> report_kinds(const AuditOptions& options);

// Columns: id, then score:<KIND>,flag:<KIND> per kind. Scores use the
// shortest round-trip decimal form; flags are 0/1.
std::string render_report_csv(const AuditResult& result, const std::vector<IssueKind>& kinds);
nlohmann::json render_summary(const AuditResult& result, const AuditConfig& config);
nlohmann::json render_clusters(const AuditResult& result, const AuditConfig& config);

void write_audit_outputs(const AuditResult& result, const AuditConfig& config,
                         const std::filesystem::path& out_dir);

struct ReportTable {
  std::vector<std::string> ids;
  std::vector<IssueKind> kinds;
  std::map<IssueKind, std::map<std::string, double>> scores;
  std::map<IssueKind, std::set<std::string>> flags;
};

ReportTable read_report_csv(const std::filesystem::path& path);

}  // namespace pixelaudit::app
