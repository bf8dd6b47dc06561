#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cobra/image.hpp"

namespace cobra {

/// Version of the built-in default parameter table. Bump when any default changes.
inline constexpr int kFilterDefaultsVersion = 1;

/// One preliminary denoising machine: a named, deterministic image -> image map.
struct DenoiseFilter {
  std::string name;
  std::string kind;
  nlohmann::json params;
  std::function<Image(const Image&)> apply;
};

/// Declarative form of a filter as it appears in the JSON config.
struct FilterConfig {
  std::string name;
  std::string kind;  // defaults to name
  nlohmann::json params = nlohmann::json::object();
  std::string path;  // external filters only
};

/// Per-input information some filters need (external machines look up
/// `<path>/<input_stem>.png`).
struct FilterContext {
  std::string input_stem;
};

/// Ordered machine pool; the position of a filter fixes its machine index.
class FilterBank {
 public:
  FilterBank() = default;
  explicit FilterBank(std::vector<DenoiseFilter> filters);

  void add(DenoiseFilter filter);
  std::size_t size() const { return filters_.size(); }
  bool empty() const { return filters_.empty(); }
  const DenoiseFilter& operator[](std::size_t i) const { return filters_[i]; }
  const std::vector<DenoiseFilter>& filters() const { return filters_; }
  std::vector<std::string> names() const;

 private:
  std::vector<DenoiseFilter> filters_;
};

/// Names of the filter kinds make_filter understands.
const std::vector<std::string>& filter_kinds();

/// Default params for a kind, from the versioned table.
nlohmann::json default_filter_params(const std::string& kind);

/// The full implemented bank with default parameters.
std::vector<FilterConfig> default_bank_config();

DenoiseFilter make_filter(const FilterConfig& config, const FilterContext& context = {});
FilterBank make_bank(const std::vector<FilterConfig>& configs, const FilterContext& context = {});

DenoiseFilter identity_filter(std::string name = "identity");

/// Runs every machine on `img`; element k is bank[k].apply(img). Machines may
/// run concurrently, the result order is always the bank order.
std::vector<Image> apply_bank(const FilterBank& bank, const Image& img);

void to_json(nlohmann::json& j, const FilterConfig& config);
void from_json(const nlohmann::json& j, FilterConfig& config);

}  // namespace cobra
