#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cobra/aggregate.hpp"
#include "cobra/filter_bank.hpp"
#include "cobra/metrics.hpp"

namespace cobra {

struct ImagePair {
  std::string id;
  Image noisy;
  Image clean;
};

/// Pairs reserved for choosing (epsilon, alpha).
struct TunePair : ImagePair {};
/// Held-out pairs for scoring the chosen parameters. A distinct type so that
/// the search cannot be handed evaluation data by accident.
struct EvalPair : ImagePair {};

struct DataSplit {
  std::vector<TunePair> tune_pairs;
  std::vector<EvalPair> eval_pairs;
};

struct TuningGrid {
  std::vector<double> epsilons;
  std::vector<Proportion> alphas;
  Metric objective = Metric::kRmse;
};

/// epsilon in {0.05, 0.1, 0.15, 0.2, 0.3, 0.4}, alpha in {k/M : k = 1..M}, RMSE.
TuningGrid default_grid(int machines);
void validate(const TuningGrid& grid);

struct GridScore {
  double epsilon = 0.0;
  Proportion alpha{1, 1};
  double objective = 0.0;
};

struct TuningResult {
  CobraParams params;
  double objective = 0.0;
  std::vector<GridScore> table;  // grid order: epsilon outer, alpha inner
};

/// Invoked with the id of every pair the search scores.
using PairObserver = std::function<void(const std::string&)>;

/// Exhaustive search over the grid. Each grid point is scored by the mean
/// objective over all tune pairs; ties go to the smaller epsilon, then the
/// larger alpha.
TuningResult grid_search(const std::vector<TunePair>& tune_pairs, const FilterBank& bank, const TuningGrid& grid,
                         CandidateWindow window, const PairObserver& observe = {});

/// Mean objective of one parameter set over the tune pairs, recomputed from scratch.
double tuning_objective(const CobraParams& params, const std::vector<TunePair>& tune_pairs, const FilterBank& bank,
                        Metric objective);

struct EvalRow {
  std::string pair_id;
  CobraParams params;
  ScoreRow scores;
};

/// Scores `params` on held-out pairs only.
std::vector<EvalRow> evaluate_params(const CobraParams& params, const std::vector<EvalPair>& eval_pairs,
                                     const FilterBank& bank);

/// scale * n_pixels^(-1 / (machines + 2)).
double theoretical_epsilon(std::size_t n_pixels, int machines, double scale = 1.0);

void to_json(nlohmann::json& j, const TuningGrid& grid);
/// `machines` fills in the default alpha list when the JSON omits it.
TuningGrid grid_from_json(const nlohmann::json& j, int machines);

/// CSV with header `epsilon,alpha,objective,value`.
std::string tuning_table_csv(const TuningResult& result, Metric objective);

}  // namespace cobra
