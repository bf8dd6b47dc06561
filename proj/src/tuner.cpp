#include "cobra/tuner.hpp"

#include <cmath>
#include <sstream>

#include "cobra/report.hpp"

namespace cobra {

TuningGrid default_grid(int machines) {
  if (machines < 1) throw Error("grid needs at least one machine");
  TuningGrid grid;
  grid.epsilons = {0.05, 0.1, 0.15, 0.2, 0.3, 0.4};
  for (int k = 1; k <= machines; ++k) grid.alphas.emplace_back(k, machines);
  return grid;
}

void validate(const TuningGrid& grid) {
  if (grid.epsilons.empty() || grid.alphas.empty()) throw Error("tuning grid must be nonempty");
  for (std::size_t i = 0; i < grid.epsilons.size(); ++i) {
    if (!(grid.epsilons[i] > 0.0)) throw Error("grid epsilons must be positive");
    if (i > 0 && !(grid.epsilons[i] > grid.epsilons[i - 1])) throw Error("grid epsilons must be ascending");
  }
}

namespace {

struct PreparedPair {
  const TunePair* pair;
  MachineOutputs outputs;
};

double mean_objective(const std::vector<PreparedPair>& prepared, const CobraParams& params, Metric objective,
                      const PairObserver& observe) {
  double total = 0.0;
  for (const auto& p : prepared) {
    if (observe) observe(p.pair->id);
    const Image denoised = aggregate_image(p.pair->noisy, p.outputs, params);
    total += score_all(denoised, p.pair->clean).get(objective);
  }
  return total / static_cast<double>(prepared.size());
}

// True when candidate (value, eps, alpha) should replace the incumbent.
bool better(Metric objective, const GridScore& candidate, const GridScore& incumbent) {
  const double a = candidate.objective;
  const double b = incumbent.objective;
  if (a != b) return lower_is_better(objective) ? a < b : a > b;
  if (candidate.epsilon != incumbent.epsilon) return candidate.epsilon < incumbent.epsilon;
  return incumbent.alpha < candidate.alpha;
}

}  // namespace

TuningResult grid_search(const std::vector<TunePair>& tune_pairs, const FilterBank& bank, const TuningGrid& grid,
                         CandidateWindow window, const PairObserver& observe) {
  validate(grid);
  if (tune_pairs.empty()) throw Error("grid search needs at least one tune pair");
  if (bank.empty()) throw Error("filter bank is empty");

  std::vector<PreparedPair> prepared;
  prepared.reserve(tune_pairs.size());
  for (const auto& pair : tune_pairs) {
    if (!pair.noisy.same_shape(pair.clean)) throw Error("tune pair '" + pair.id + "' has mismatched images");
    prepared.push_back({&pair, MachineOutputs(apply_bank(bank, pair.noisy))});
  }

  TuningResult result;
  result.table.reserve(grid.epsilons.size() * grid.alphas.size());
  for (double eps : grid.epsilons) {
    for (const Proportion& alpha : grid.alphas) {
      CobraParams params;
      params.epsilon = eps;
      params.alpha = alpha;
      params.window = window;
      result.table.push_back({eps, alpha, mean_objective(prepared, params, grid.objective, observe)});
    }
  }
  const GridScore* best = &result.table.front();
  for (const auto& row : result.table) {
    if (better(grid.objective, row, *best)) best = &row;
  }
  result.params.epsilon = best->epsilon;
  result.params.alpha = best->alpha;
  result.params.window = window;
  result.objective = best->objective;
  return result;
}

double tuning_objective(const CobraParams& params, const std::vector<TunePair>& tune_pairs, const FilterBank& bank,
                        Metric objective) {
  if (tune_pairs.empty()) throw Error("no tune pairs");
  double total = 0.0;
  for (const auto& pair : tune_pairs) {
    total += score_all(aggregate_with_bank(pair.noisy, bank, params), pair.clean).get(objective);
  }
  return total / static_cast<double>(tune_pairs.size());
}

std::vector<EvalRow> evaluate_params(const CobraParams& params, const std::vector<EvalPair>& eval_pairs,
                                     const FilterBank& bank) {
  if (eval_pairs.empty()) throw Error("evaluation set is empty");
  std::vector<EvalRow> rows;
  rows.reserve(eval_pairs.size());
  for (const auto& pair : eval_pairs) {
    rows.push_back({pair.id, params, score_all(aggregate_with_bank(pair.noisy, bank, params), pair.clean)});
  }
  return rows;
}

double theoretical_epsilon(std::size_t n_pixels, int machines, double scale) {
  if (n_pixels < 1) throw Error("n_pixels must be >= 1");
  if (machines < 1) throw Error("machines must be >= 1");
  if (!(scale > 0.0)) throw Error("scale constant must be positive");
  return scale * std::pow(static_cast<double>(n_pixels), -1.0 / (machines + 2));
}

void to_json(nlohmann::json& j, const TuningGrid& grid) {
  nlohmann::json alphas = nlohmann::json::array();
  for (const auto& a : grid.alphas) alphas.push_back(a.to_string());
  j = {{"epsilons", grid.epsilons}, {"alphas", alphas}, {"objective", to_string(grid.objective)}};
}

TuningGrid grid_from_json(const nlohmann::json& j, int machines) {
  TuningGrid grid = default_grid(machines);
  if (j.contains("epsilons")) grid.epsilons = j.at("epsilons").get<std::vector<double>>();
  if (j.contains("alphas")) {
    grid.alphas.clear();
    for (const auto& a : j.at("alphas")) {
      grid.alphas.push_back(a.is_string() ? Proportion::parse(a.get<std::string>())
                                          : Proportion::from_double(a.get<double>()));
    }
  }
  if (j.contains("objective")) grid.objective = parse_metric(j.at("objective").get<std::string>());
  validate(grid);
  return grid;
}

std::string tuning_table_csv(const TuningResult& result, Metric objective) {
  std::ostringstream out;
  out << "epsilon,alpha,objective,value\n";
  for (const auto& row : result.table) {
    out << format_number(row.epsilon) << ',' << row.alpha.to_string() << ',' << to_string(objective) << ','
        << format_number(row.objective) << '\n';
  }
  return out.str();
}

}  // namespace cobra
