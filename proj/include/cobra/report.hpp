#pragma once

#include <string>
#include <vector>

#include "cobra/metrics.hpp"

namespace cobra {

/// Per-repetition scores of one method.
struct MethodScores {
  std::string method;
  std::vector<ScoreRow> samples;
};

struct ReportRow {
  std::string noise;
  std::string method;
  Metric metric = Metric::kMae;
  Summary summary;
};

/// Metric table over methods, ordered by method then metric.
struct ScoreReport {
  std::vector<ReportRow> rows;

  const ReportRow& at(const std::string& method, Metric metric) const;
  std::vector<std::string> methods() const;
  /// Method with the best mean for `metric`; ties keep the earlier method.
  std::string best(Metric metric) const;
};

ScoreReport build_report(const std::string& noise, const std::vector<MethodScores>& methods);

/// Header `noise,method,metric,mean,std,reps`; infinite values print as `inf`.
std::string to_csv(const ScoreReport& report);

/// One row per method, one column per metric, best value per metric in bold.
std::string to_markdown(const ScoreReport& report);

/// Locale-independent number formatting used by every report (10 significant digits).
std::string format_number(double value);

}  // namespace cobra
