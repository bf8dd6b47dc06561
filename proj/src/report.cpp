#include "cobra/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "cobra/image.hpp"

namespace cobra {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

const ReportRow& ScoreReport::at(const std::string& method, Metric metric) const {
  for (const auto& row : rows) {
    if (row.method == method && row.metric == metric) return row;
  }
  throw Error("report has no row for " + method + "/" + to_string(metric));
}

std::vector<std::string> ScoreReport::methods() const {
  std::vector<std::string> out;
  for (const auto& row : rows) {
    if (out.empty() || out.back() != row.method) out.push_back(row.method);
  }
  return out;
}

std::string ScoreReport::best(Metric metric) const {
  const ReportRow* best = nullptr;
  for (const auto& row : rows) {
    if (row.metric != metric) continue;
    if (!best) {
      best = &row;
      continue;
    }
    const bool better = lower_is_better(metric) ? row.summary.mean < best->summary.mean
                                                : row.summary.mean > best->summary.mean;
    if (better) best = &row;
  }
  if (!best) throw Error("empty report");
  return best->method;
}

ScoreReport build_report(const std::string& noise, const std::vector<MethodScores>& methods) {
  ScoreReport report;
  for (const auto& m : methods) {
    for (Metric metric : kAllMetrics) {
      std::vector<double> values;
      values.reserve(m.samples.size());
      for (const auto& s : m.samples) values.push_back(s.get(metric));
      report.rows.push_back({noise, m.method, metric, summarize(values)});
    }
  }
  return report;
}

std::string to_csv(const ScoreReport& report) {
  std::ostringstream out;
  out << "noise,method,metric,mean,std,reps\n";
  for (const auto& row : report.rows) {
    out << row.noise << ',' << row.method << ',' << to_string(row.metric) << ',' << format_number(row.summary.mean)
        << ',' << format_number(row.summary.std) << ',' << row.summary.count << '\n';
  }
  return out.str();
}

std::string to_markdown(const ScoreReport& report) {
  std::ostringstream out;
  const std::vector<std::string> methods = report.methods();
  if (!report.rows.empty()) out << "Noise: " << report.rows.front().noise << "\n\n";
  out << "| method |";
  for (Metric m : kAllMetrics) out << ' ' << to_string(m) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < std::size(kAllMetrics); ++i) out << "---|";
  out << '\n';
  for (const auto& method : methods) {
    out << "| " << method << " |";
    for (Metric m : kAllMetrics) {
      const ReportRow& row = report.at(method, m);
      const std::string cell = format_number(row.summary.mean) + " ± " + format_number(row.summary.std);
      if (report.best(m) == method) {
        out << " **" << cell << "** |";
      } else {
        out << ' ' << cell << " |";
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace cobra
