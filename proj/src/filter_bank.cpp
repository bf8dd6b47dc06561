#include "cobra/filter_bank.hpp"

#include <algorithm>
#include <exception>
#include <filesystem>
#include <set>

#include "cobra/filters.hpp"
#include "cobra/image_io.hpp"

namespace cobra {

namespace {

using nlohmann::json;

// Built-in defaults, version kFilterDefaultsVersion. Values are on the
// normalized [0, 1] intensity scale.
const json& defaults_table() {
  static const json table = {
      {"identity", json::object()},
      {"gaussian", {{"sigma", 1.0}}},
      {"median", {{"size", 3}}},
      {"bilateral", {{"sigma_spatial", 2.0}, {"sigma_range", 0.1}}},
      {"tv_chambolle", {{"weight", 0.1}, {"max_iter", 200}, {"tol", 2e-4}}},
      {"nl_means", {{"patch_radius", 1}, {"search_radius", 5}, {"h", 0.4}}},
      {"richardson_lucy", {{"iterations", 10}, {"psf_size", 5}, {"psf_sigma", 1.0}}},
      {"lee", {{"window", 5}, {"noise_variance", 0.01}}},
      {"inpaint", {{"mask", "white"}, {"max_iter", 2000}}},
      {"box", {{"radius", 1}}},
      {"external", json::object()},
  };
  return table;
}

json merged_params(const std::string& kind, const json& overrides) {
  json params = default_filter_params(kind);
  for (auto it = overrides.begin(); it != overrides.end(); ++it) {
    if (!params.contains(it.key())) {
      throw Error("filter kind '" + kind + "' has no parameter '" + it.key() + "'");
    }
    params[it.key()] = it.value();
  }
  return params;
}

}  // namespace

FilterBank::FilterBank(std::vector<DenoiseFilter> filters) {
  for (auto& f : filters) add(std::move(f));
}

void FilterBank::add(DenoiseFilter filter) {
  if (filter.name.empty()) throw Error("filter name must not be empty");
  if (!filter.apply) throw Error("filter '" + filter.name + "' has no apply function");
  for (const auto& existing : filters_) {
    if (existing.name == filter.name) throw Error("duplicate filter name '" + filter.name + "'");
  }
  filters_.push_back(std::move(filter));
}

std::vector<std::string> FilterBank::names() const {
  std::vector<std::string> out;
  out.reserve(filters_.size());
  for (const auto& f : filters_) out.push_back(f.name);
  return out;
}

const std::vector<std::string>& filter_kinds() {
  static const std::vector<std::string> kinds = [] {
    std::vector<std::string> k;
    for (auto it = defaults_table().begin(); it != defaults_table().end(); ++it) k.push_back(it.key());
    return k;
  }();
  return kinds;
}

json default_filter_params(const std::string& kind) {
  const json& table = defaults_table();
  if (!table.contains(kind)) throw Error("unknown filter kind '" + kind + "'");
  return table.at(kind);
}

std::vector<FilterConfig> default_bank_config() {
  std::vector<FilterConfig> bank;
  for (const char* kind : {"gaussian", "median", "bilateral", "tv_chambolle", "nl_means", "richardson_lucy", "lee",
                           "inpaint"}) {
    bank.push_back({kind, kind, default_filter_params(kind), ""});
  }
  return bank;
}

DenoiseFilter identity_filter(std::string name) {
  return {std::move(name), "identity", json::object(), [](const Image& img) { return img; }};
}

DenoiseFilter make_filter(const FilterConfig& config, const FilterContext& context) {
  const std::string kind = config.kind.empty() ? config.name : config.kind;
  const json p = merged_params(kind, config.params.is_null() ? json::object() : config.params);
  DenoiseFilter f{config.name, kind, p, {}};

  if (kind == "identity") {
    f.apply = [](const Image& img) { return img; };
  } else if (kind == "gaussian") {
    const double sigma = p.at("sigma").get<double>();
    if (!(sigma > 0.0)) throw Error("gaussian sigma must be positive");
    f.apply = [sigma](const Image& img) { return gaussian_filter(img, sigma); };
  } else if (kind == "median") {
    const int size = p.at("size").get<int>();
    if (size < 1) throw Error("median size must be >= 1");
    f.apply = [size](const Image& img) { return median_filter(img, size); };
  } else if (kind == "bilateral") {
    const double ss = p.at("sigma_spatial").get<double>();
    const double sr = p.at("sigma_range").get<double>();
    if (!(ss > 0.0) || !(sr > 0.0)) throw Error("bilateral sigmas must be positive");
    f.apply = [ss, sr](const Image& img) { return bilateral_filter(img, ss, sr); };
  } else if (kind == "tv_chambolle") {
    TvOptions opts{p.at("weight").get<double>(), p.at("max_iter").get<int>(), p.at("tol").get<double>()};
    if (!(opts.weight > 0.0)) throw Error("tv weight must be positive");
    f.apply = [opts](const Image& img) { return tv_chambolle(img, opts); };
  } else if (kind == "nl_means") {
    const int pr = p.at("patch_radius").get<int>();
    const int sr = p.at("search_radius").get<int>();
    const double h = p.at("h").get<double>();
    if (!(h > 0.0)) throw Error("nl-means h must be positive");
    f.apply = [pr, sr, h](const Image& img) { return nl_means(img, pr, sr, h); };
  } else if (kind == "richardson_lucy") {
    const Kernel psf = Kernel::gaussian(p.at("psf_size").get<int>(), p.at("psf_sigma").get<double>());
    RichardsonLucyOptions opts;
    opts.iterations = p.at("iterations").get<int>();
    if (opts.iterations < 1) throw Error("richardson-lucy needs at least one iteration");
    f.apply = [psf, opts](const Image& img) { return richardson_lucy(img, psf, opts); };
  } else if (kind == "lee") {
    const int window = p.at("window").get<int>();
    const double var = p.at("noise_variance").get<double>();
    if (window < 3 || window % 2 == 0) throw Error("lee window must be odd and >= 3");
    f.apply = [window, var](const Image& img) { return lee_filter(img, window, var); };
  } else if (kind == "inpaint") {
    const std::string mode = p.at("mask").get<std::string>();
    if (mode != "white" && mode != "extremes") throw Error("inpaint mask must be 'white' or 'extremes'");
    InpaintOptions opts;
    opts.max_iter = p.at("max_iter").get<int>();
    const bool extremes = mode == "extremes";
    f.apply = [opts, extremes](const Image& img) {
      const Mask mask = extremes ? detect_extreme_mask(img) : detect_white_mask(img);
      // A fully saturated image has nothing to interpolate from.
      if (mask.count() == img.size()) return img;
      return inpaint(img, mask, opts);
    };
  } else if (kind == "box") {
    const int radius = p.at("radius").get<int>();
    f.apply = [radius](const Image& img) { return box_filter(img, radius); };
  } else if (kind == "external") {
    if (config.path.empty()) throw Error("external filter '" + config.name + "' needs a path");
    if (context.input_stem.empty()) {
      throw Error("external filter '" + config.name + "' needs the input image name");
    }
    const std::string file = (std::filesystem::path(config.path) / (context.input_stem + ".png")).string();
    f.params["path"] = config.path;
    f.apply = [file, name = config.name](const Image& img) {
      Image rendered = load_image(file);
      if (!rendered.same_shape(img)) {
        throw Error("external filter '" + name + "': " + file + " does not match the input size");
      }
      return rendered;
    };
  } else {
    throw Error("unknown filter kind '" + kind + "'");
  }
  return f;
}

FilterBank make_bank(const std::vector<FilterConfig>& configs, const FilterContext& context) {
  FilterBank bank;
  for (const auto& c : configs) bank.add(make_filter(c, context));
  return bank;
}

std::vector<Image> apply_bank(const FilterBank& bank, const Image& img) {
  if (bank.empty()) throw Error("filter bank is empty");
  const int m = static_cast<int>(bank.size());
  std::vector<Image> outputs(bank.size());
  std::vector<std::exception_ptr> errors(bank.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < m; ++k) {
    try {
      Image out = bank[k].apply(img);
      if (!out.same_shape(img)) throw Error("filter '" + bank[k].name + "' changed the image shape");
      outputs[k] = std::move(out);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return outputs;
}

void to_json(nlohmann::json& j, const FilterConfig& config) {
  j = {{"name", config.name}, {"params", config.params}};
  if (!config.kind.empty() && config.kind != config.name) j["kind"] = config.kind;
  if (!config.path.empty()) j["path"] = config.path;
}

void from_json(const nlohmann::json& j, FilterConfig& config) {
  config.name = j.at("name").get<std::string>();
  config.kind = j.value("kind", config.name);
  config.params = j.value("params", json::object());
  config.path = j.value("path", std::string{});
}

}  // namespace cobra
