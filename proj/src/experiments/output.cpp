#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "tnsim/experiments.hpp"

namespace tnsim {
namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace

OutputPaths write_result(const ExperimentSpec& spec, const ResultTable& table) {
  std::filesystem::create_directories(spec.outdir);
  const std::string stem = to_string(table.kind) + "-" + spec.tag;
  OutputPaths paths{spec.outdir / (stem + ".csv"), spec.outdir / (stem + ".summary.csv"),
                    spec.outdir / (stem + ".meta.json")};

  std::string csv;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    csv += (c ? "," : "") + table.columns[c];
  }
  csv += '\n';
  for (const auto& r : table.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) csv += (c ? "," : "") + fmt(r[c]);
    csv += '\n';
  }
  write_text(paths.csv, csv);

  // Summary CSV: group keys, then the statistics in name order.
  std::string sum;
  const auto& groups = table.summary.at("groups");
  if (!groups.empty()) {
    std::vector<std::string> keys, stats;
    for (const auto& [k, v] : groups[0]["key"].items()) keys.push_back(k);
    for (const auto& [k, v] : groups[0]["stats"].items()) stats.push_back(k);
    // Key columns follow the table's column order, not JSON key order.
    std::vector<std::string> ordered;
    for (const auto& c : table.columns) {
      for (const auto& k : keys) {
        if (k == c) ordered.push_back(k);
      }
    }
    std::vector<std::string> header = ordered;
    header.insert(header.end(), stats.begin(), stats.end());
    for (std::size_t c = 0; c < header.size(); ++c) sum += (c ? "," : "") + header[c];
    sum += '\n';
    for (const auto& g : groups) {
      std::string line;
      for (const auto& k : ordered) line += (line.empty() ? "" : ",") + fmt(g["key"][k].get<double>());
      for (const auto& k : stats) line += (line.empty() ? "" : ",") + fmt(g["stats"][k].get<double>());
      sum += line + '\n';
    }
  }
  write_text(paths.summary_csv, sum);

  nlohmann::json meta = run_metadata(spec.sim, to_string(table.kind));
  meta.erase("csv_columns");
  meta["spec"] = spec.to_json();
  meta["columns"] = table.columns;
  meta["rows"] = table.rows.size();
  meta["summary"] = table.summary;
  write_json(meta, paths.meta);
  return paths;
}

}  // namespace tnsim
