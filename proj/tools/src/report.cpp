#include "pixelaudit/app/report.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pixelaudit/app/csv.hpp"
#include "pixelaudit/app/dataset_io.hpp"

namespace fs = std::filesystem;

namespace pixelaudit::app {

namespace {

nlohmann::json clusters_json(const DuplicateClusterSet& set, const std::vector<std::string>& keep) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < set.clusters.size(); ++i) {
    const auto& c = set.clusters[i];
    out.push_back({{"members", c.members},
                   {"provenance", to_string(c.provenance)},
                   {"keep", keep.at(i)}});
  }
  return out;
}

}  // namespace

std::vector<IssueKind> report_kinds(const AuditOptions& options) {
  std::vector<IssueKind> kinds;
  for (IssueKind k : kAllIssueKinds) {
    if (options.issues.count(k)) kinds.push_back(k);
  }
  return kinds;
}

std::string render_report_csv(const AuditResult& result, const std::vector<IssueKind>& kinds) {
  std::ostringstream out;
  CsvRow header{"id"};
  for (IssueKind k : kinds) {
    header.push_back("score:" + to_string(k));
    header.push_back("flag:" + to_string(k));
  }
  write_csv_row(out, header);
  for (const auto& id : result.ids) {
    CsvRow row{id};
    for (IssueKind k : kinds) {
      const auto score = result.table.score(id, k);
      row.push_back(score ? format_double(*score) : "");
      row.push_back(result.table.flagged(id, k) ? "1" : "0");
    }
    write_csv_row(out, row);
  }
  return out.str();
}

nlohmann::json render_summary(const AuditResult& result, const AuditConfig& config) {
  nlohmann::json j;
  j["images"] = result.ids.size();
  j["invalid"] = nlohmann::json::array();
  for (const auto& [id, reason] : result.invalid) j["invalid"].push_back({{"id", id}, {"reason", reason}});
  nlohmann::json kinds = nlohmann::json::object();
  for (IssueKind k : report_kinds(config.options)) {
    nlohmann::json entry;
    entry["flagged"] = result.table.flag_count(k);
    auto it = result.outcomes.find(k);
    if (it != result.outcomes.end() && it->second.decision) {
      const ThresholdDecision& d = *it->second.decision;
      entry["method"] = to_string(d.method);
      entry["threshold"] = d.threshold;
      entry["split"] = d.split;
      entry["diagnostics"] = d.diagnostics.values;
      entry["notes"] = d.diagnostics.notes;
    } else {
      entry["method"] = to_string(config.options.method_for(k));
      entry["threshold"] = nullptr;
      entry["error"] = it == result.outcomes.end() ? "not run" : it->second.error;
    }
    kinds[to_string(k)] = entry;
  }
  j["kinds"] = kinds;
  if (result.size_stats) {
    const SizeStats& s = *result.size_stats;
    j["size_stats"] = {{"q1", s.q1},
                       {"q3", s.q3},
                       {"iqr_factor", s.iqr_factor},
                       {"min_threshold", s.min_threshold},
                       {"max_threshold", s.max_threshold},
                       {"midpoint", s.midpoint}};
  }
  if (!result.embedding_failures.empty()) j["embedding_failures"] = result.embedding_failures;
  j["config"] = to_json(config);
  return j;
}

nlohmann::json render_clusters(const AuditResult& result, const AuditConfig& config) {
  const auto policy = config.representative_policy;
  return {{"exact", clusters_json(result.exact_clusters,
                                  select_representatives(result.exact_clusters, policy, &result.table))},
          {"near", clusters_json(result.near_clusters,
                                 select_representatives(result.near_clusters, policy, &result.table))}};
}

void write_audit_outputs(const AuditResult& result, const AuditConfig& config, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  write_file(out_dir / "report.csv", render_report_csv(result, report_kinds(config.options)));
  write_file(out_dir / "summary.json", render_summary(result, config).dump(2) + "\n");
  write_file(out_dir / "clusters.json", render_clusters(result, config).dump(2) + "\n");
}

ReportTable read_report_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const auto rows = read_csv(in);
  if (rows.empty() || rows[0].empty() || rows[0][0] != "id") {
    throw std::runtime_error(path.string() + ": missing 'id' header");
  }
  ReportTable table;
  // column index -> (kind, is_flag)
  std::vector<std::pair<IssueKind, bool>> columns;
  for (std::size_t c = 1; c < rows[0].size(); ++c) {
    const std::string& h = rows[0][c];
    const auto colon = h.find(':');
    if (colon == std::string::npos) throw std::runtime_error(path.string() + ": bad column '" + h + "'");
    const std::string prefix = h.substr(0, colon);
    if (prefix != "score" && prefix != "flag") {
      throw std::runtime_error(path.string() + ": bad column '" + h + "'");
    }
    const IssueKind kind = parse_issue_kind(h.substr(colon + 1));
    columns.emplace_back(kind, prefix == "flag");
    if (prefix == "flag") table.kinds.push_back(kind);
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string& id = row[0];
    table.ids.push_back(id);
    for (std::size_t c = 1; c < row.size() && c - 1 < columns.size(); ++c) {
      const auto [kind, is_flag] = columns[c - 1];
      if (is_flag) {
        if (row[c] == "1") table.flags[kind].insert(id);
      } else if (!row[c].empty()) {
        table.scores[kind][id] = parse_double(row[c]);
      }
    }
  }
  return table;
}

}  // namespace pixelaudit::app
