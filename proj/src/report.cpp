#include "sugra/report.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>

namespace sugra {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string point_text(const Point& p, const Chart& chart) {
  std::string out = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%s=%.4g", i ? ", " : "", chart.name(i).c_str(), p[i]);
    out += buf;
  }
  return out + ")";
}

}  // namespace

std::string format_text(const Report& r, const Chart& chart) {
  std::string out = "background " + r.id + "\n";
  if (!r.description.empty()) out += "  " + r.description + "\n";
  out += "seed " + std::to_string(r.seed) + ", points " + std::to_string(r.points) + ", tolerance " +
         sci(r.tolerance) + "\n\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %-8s %-11s %-11s %-4s %s\n", "equation", "block", "max", "mean", "", "worst");
  out += line;
  for (const auto& row : r.residuals.rows) {
    std::snprintf(line, sizeof line, "%-12s %-8s %-11s %-11s %-4s ", row.equation.c_str(), row.block.c_str(),
                  sci(row.max).c_str(), sci(row.mean).c_str(), row.pass ? "ok" : "FAIL");
    out += line;
    if (!row.pass) out += row.worst_component + " at " + point_text(row.worst_point, chart);
    out += "\n";
  }
  out += "\nverdict: ";
  out += r.residuals.pass() ? "pass" : "fail";
  out += " (" + std::to_string(r.millis) + " ms)\n";
  return out;
}

std::string format_json(const Report& r) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr); };
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["id"] = r.id;
  j["seed"] = r.seed;
  j["points"] = r.points;
  j["tolerance"] = r.tolerance;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.residuals.rows) {
    nlohmann::ordered_json jr;
    jr["equation"] = row.equation;
    jr["block"] = row.block;
    jr["max"] = num(row.max);
    jr["mean"] = num(row.mean);
    auto pt = nlohmann::ordered_json::array();
    for (double v : row.worst_point) pt.push_back(num(v));
    jr["worst_point"] = pt;
    jr["worst_component"] = row.worst_component;
    rows.push_back(jr);
  }
  j["rows"] = rows;
  j["verdict"] = r.residuals.pass() ? "pass" : "fail";
  j["millis"] = r.millis;
  return j.dump(2) + "\n";
}

}  // namespace sugra
