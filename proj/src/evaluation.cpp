#include "illumkit/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "illumkit/error.hpp"
#include "illumkit/fileutil.hpp"
#include "illumkit/image_io.hpp"
#include "illumkit/rng.hpp"

namespace illumkit {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// strtod-based so that "inf", "1e-3" and friends are accepted.
std::optional<double> to_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

// ---- manifest ------------------------------------------------------------

DatasetManifest parse_manifest(std::string_view text, const fs::path& root) {
  DatasetManifest m;
  m.root = root;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::unordered_set<std::string> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    const std::string t = trim(line);
    if (t.empty()) continue;
    auto where = [&] { return "manifest line " + std::to_string(line_no); };
    if (t.front() == '#') {
      if (header_seen) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = lower(trim(t.substr(1, eq - 1)));
      const std::string value = trim(t.substr(eq + 1));
      if (key == "name") {
        m.name = value;
      } else if (key == "bit_depth") {
        const auto v = to_double(value);
        if (!v) throw ManifestError(where() + ": bad bit_depth");
        m.bit_depth = static_cast<int>(*v);
      } else if (key == "linear") {
        const std::string v = lower(value);
        if (v == "1" || v == "true" || v == "yes")
          m.linear = true;
        else if (v == "0" || v == "false" || v == "no")
          m.linear = false;
        else
          throw ManifestError(where() + ": bad linear flag");
      }
      continue;
    }
    const auto cols = split(t, ',');
    if (!header_seen) {
      std::vector<std::string> names;
      for (const auto& c : cols) names.push_back(lower(trim(c)));
      if (names != std::vector<std::string>{"image_id", "filename", "r", "g",
                                            "b"})
        throw ManifestError(where() +
                            ": expected header image_id,filename,r,g,b");
      header_seen = true;
      continue;
    }
    if (cols.size() != 5)
      throw ManifestError(where() + ": expected 5 columns, got " +
                          std::to_string(cols.size()));
    ManifestEntry e{trim(cols[0]), trim(cols[1]), Illuminant::neutral()};
    if (e.image_id.empty()) throw ManifestError(where() + ": empty image_id");
    if (!ids.insert(e.image_id).second)
      throw ManifestError(where() + ": duplicate image_id '" + e.image_id +
                          "'");
    Rgb rgb;
    for (int c = 0; c < 3; ++c) {
      const auto v = to_double(trim(cols[std::size_t(2 + c)]));
      if (!v) throw ManifestError(where() + ": bad illuminant value");
      rgb[c] = *v;
    }
    try {
      e.ground_truth = normalize_illuminant(rgb);
    } catch (const InvalidIlluminantError& err) {
      throw ManifestError(where() + ": " + err.what());
    }
    m.entries.push_back(std::move(e));
  }
  if (!header_seen) throw ManifestError("manifest has no header");
  return m;
}

DatasetManifest load_manifest(const fs::path& path) {
  return parse_manifest(read_file(path), path.parent_path());
}

std::string format_manifest(const DatasetManifest& m) {
  std::ostringstream out;
  out.precision(17);
  if (!m.name.empty()) out << "# name=" << m.name << "\n";
  if (m.bit_depth > 0) out << "# bit_depth=" << m.bit_depth << "\n";
  out << "# linear=" << (m.linear ? 1 : 0) << "\n";
  out << "image_id,filename,r,g,b\n";
  for (const auto& e : m.entries)
    out << e.image_id << ',' << e.filename << ',' << e.ground_truth[0] << ','
        << e.ground_truth[1] << ',' << e.ground_truth[2] << "\n";
  return out.str();
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
  write_file_atomic(path, format_manifest(manifest));
}

LinearImage load_entry_image(const DatasetManifest& manifest,
                             const ManifestEntry& entry) {
  const fs::path p = manifest.root / entry.filename;
  return read_image(p, manifest.linear ? Transfer::kLinear
                                       : Transfer::kGamma22);
}

DatasetManifest write_synthetic_dataset(
    const std::vector<SyntheticScene>& scenes, const fs::path& dir,
    const std::string& name) {
  DatasetManifest m;
  m.root = dir;
  m.name = name;
  m.bit_depth = 32;
  m.linear = true;
  for (const auto& s : scenes) {
    const std::string file = "images/" + s.image_id + ".tiff";
    write_tiff_float(dir / file, s.image);
    m.entries.push_back({s.image_id, file, s.illuminant});
  }
  save_manifest(m, dir / "manifest.csv");
  return m;
}

// ---- estimators ------------------------------------------------------------

std::vector<double> decades(int from, int step, int to) {
  if (step == 0) throw ConfigError("zero step in decade range");
  std::vector<double> out;
  for (int e = from; step > 0 ? e <= to : e >= to; e += step)
    out.push_back(std::pow(10.0, e));
  return out;
}

std::vector<Hyperparams> HyperparamGrid::points(ModelKind kind) const {
  const std::vector<double> gammas =
      kernel == KernelKind::kRbf ? gamma : std::vector<double>{1.0};
  const std::vector<double> epsilons =
      uses_epsilon(kind) ? epsilon : std::vector<double>{0.0};
  std::vector<Hyperparams> out;
  for (double c : C)
    for (double g : gammas)
      for (double e : epsilons) out.push_back({c, e, {kernel, g}});
  return out;
}

HyperparamGrid default_grid(ModelKind kind) {
  if (uses_epsilon(kind))
    return {KernelKind::kRbf, decades(-3, 1, 5), decades(-4, 1, 4),
            decades(-4, 2, 3)};
  return {KernelKind::kLinear, decades(-2, 1, 2), {1.0}, {0.0}};
}

EstimatorConfig parse_estimator(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string name = lower(trim(spec.substr(0, colon)));
  std::map<std::string, std::string> kv;
  if (colon != std::string_view::npos) {
    for (const auto& item : split(spec.substr(colon + 1), ',')) {
      if (trim(item).empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw UsageError("estimator parameter '" + item + "' is not key=value");
      kv[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
    }
  }
  auto take = [&](const std::string& key) -> std::optional<double> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    const auto v = to_double(it->second);
    if (!v)
      throw UsageError("bad value for '" + key + "': '" + it->second + "'");
    kv.erase(it);
    return v;
  };

  EstimatorConfig cfg;
  std::string label;
  if (auto it = kv.find("label"); it != kv.end()) {
    label = it->second;
    kv.erase(it);
  }

  struct StatDefault {
    const char* name;
    const char* label;
    MinkowskiParams params;
  };
  constexpr double inf = MinkowskiParams::kInfinity;
  constexpr double p6 = MinkowskiParams::kDefaultP;
  static const StatDefault kStats[] = {
      {"gw", "GW", {0, 1.0, 0.0}},      {"wp", "WP", {0, inf, 0.0}},
      {"sog", "SoG", {0, p6, 0.0}},     {"ggw", "gGW", {0, p6, 1.0}},
      {"ge1", "1stGE", {1, p6, 1.0}},   {"ge2", "2ndGE", {2, p6, 1.0}},
      {"stat", "Stat", {0, 1.0, 0.0}},
  };

  if (name == "dn") {
    cfg.family = EstimatorFamily::kDoingNothing;
    cfg.label = "DN";
  } else if (auto it = std::find_if(std::begin(kStats), std::end(kStats),
                                    [&](const auto& s) { return name == s.name; });
             it != std::end(kStats)) {
    cfg.family = EstimatorFamily::kStatistic;
    cfg.label = it->label;
    cfg.statistic = it->params;
    // Only the free parameters of each named instantiation may be set.
    const bool free_p = name == "sog" || name == "ggw" || name == "ge1" ||
                        name == "ge2" || name == "stat";
    const bool free_sigma =
        name == "ggw" || name == "ge1" || name == "ge2" || name == "stat";
    if (free_p)
      if (auto p = take("p")) cfg.statistic.minkowski_p = *p;
    if (free_sigma)
      if (auto s = take("sigma")) cfg.statistic.gaussian_sigma = *s;
    if (name == "stat")
      if (auto n = take("n")) cfg.statistic.derivative_order = int(*n);
    try {
      cfg.statistic.validate();
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
  } else if (name == "rr" || name == "svr" || name == "mrr" ||
             name == "msvr") {
    cfg.family = EstimatorFamily::kLearning;
    cfg.model_kind = parse_model_kind(name);
    cfg.label = std::string(to_string(cfg.model_kind));
    std::transform(cfg.label.begin(), cfg.label.end(), cfg.label.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    cfg.grid = default_grid(cfg.model_kind);
    if (auto it = kv.find("kernel"); it != kv.end()) {
      const std::string k = lower(it->second);
      if (k == "linear")
        cfg.grid.kernel = KernelKind::kLinear;
      else if (k == "rbf")
        cfg.grid.kernel = KernelKind::kRbf;
      else
        throw UsageError("unknown kernel '" + it->second + "'");
      if (cfg.grid.kernel == KernelKind::kRbf && cfg.grid.gamma.size() == 1 &&
          !uses_epsilon(cfg.model_kind))
        cfg.grid.gamma = decades(-4, 1, 4);
      kv.erase(it);
    }
    const auto C = take("C");
    const auto gamma = take("gamma");
    const auto eps = take("epsilon");
    if (C || gamma || eps) {
      Hyperparams hp;
      hp.C = C.value_or(1.0);
      hp.kernel = {cfg.grid.kernel, gamma.value_or(1.0)};
      hp.epsilon = uses_epsilon(cfg.model_kind) ? eps.value_or(0.1) : 0.0;
      if (!(hp.C > 0.0)) throw UsageError("C must be positive");
      if (hp.epsilon < 0.0) throw UsageError("epsilon must be >= 0");
      try {
        hp.kernel.validate();
      } catch (const InputError& e) {
        throw UsageError(e.what());
      }
      cfg.fixed = hp;
    }
  } else {
    throw UsageError("unknown estimator '" + std::string(spec) + "'");
  }
  if (!kv.empty())
    throw UsageError("unknown parameter '" + kv.begin()->first +
                     "' for estimator '" + name + "'");
  if (!label.empty()) cfg.label = label;
  return cfg;
}

Illuminant estimate_without_learning(const EstimatorConfig& config,
                                     const LinearImage& image) {
  switch (config.family) {
    case EstimatorFamily::kDoingNothing:
      return Illuminant::neutral();
    case EstimatorFamily::kStatistic:
      return estimate_statistic(image, config.statistic);
    case EstimatorFamily::kLearning:
      break;
  }
  throw ConfigError("estimator '" + config.label + "' requires a model");
}

FeatureSource parse_feature_source(std::string_view spec) {
  FeatureSource src;
  if (spec.starts_with("file:")) {
    src.kind = FeatureSource::Kind::kFile;
    src.path = std::string(spec.substr(5));
    if (src.path.empty()) throw UsageError("empty feature file path");
    return src;
  }
  if (spec == "builtin:hist" || spec == "hist") return src;
  for (std::string_view prefix : {"builtin:hist:", "hist:"}) {
    if (spec.starts_with(prefix)) {
      const auto v = to_double(std::string(spec.substr(prefix.size())));
      if (!v || *v < 2 || *v != std::floor(*v))
        throw UsageError("histogram bins must be an integer >= 2");
      src.bins = int(*v);
      return src;
    }
  }
  throw UsageError("feature source must be builtin:hist[:BINS] or file:PATH");
}

// ---- splits ----------------------------------------------------------------

void SplitPlan::validate() const {
  if (n_repeats == 0) throw ConfigError("n_repeats must be >= 1");
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) throw ConfigError("split fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("split fractions must sum to 1");
}

Split make_split(std::size_t n, const SplitPlan& plan, std::size_t repeat) {
  plan.validate();
  if (n < 3) throw ProtocolError("at least 3 samples are required to split");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = Rng(plan.seed).split(repeat);
  rng.shuffle(order);

  auto count = [n](double f) {
    return std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(f * double(n))), 1, n);
  };
  std::size_t n_train = count(plan.fractions[0]);
  std::size_t n_val = count(plan.fractions[1]);
  while (n_train + n_val > n - 1) {
    if (n_train >= n_val)
      --n_train;
    else
      --n_val;
  }
  Split s;
  s.train.assign(order.begin(), order.begin() + std::ptrdiff_t(n_train));
  s.validation.assign(order.begin() + std::ptrdiff_t(n_train),
                      order.begin() + std::ptrdiff_t(n_train + n_val));
  s.test.assign(order.begin() + std::ptrdiff_t(n_train + n_val), order.end());
  return s;
}

// ---- grid search -----------------------------------------------------------

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Angular error of a raw prediction; predictions with no positive component
// are scored against the neutral illuminant.
double score_raw(const Rgb& raw, const Illuminant& truth, bool* invalid) {
  try {
    return angular_error(illuminant_from_raw(raw), truth);
  } catch (const InvalidIlluminantError&) {
    if (invalid) *invalid = true;
    return angular_error(Illuminant::neutral(), truth);
  }
}

// Grid search where validation predictions are averaged within groups (one
// group per validation image; several samples per group with augmentation).
GridSearchResult grid_search_grouped(
    std::span<const LabeledSample> train,
    std::span<const LabeledSample> validation,
    const std::vector<std::size_t>& groups, std::size_t n_groups,
    const std::vector<Illuminant>& group_truth, ModelKind kind,
    const HyperparamGrid& grid, const SolverOptions& options) {
  const auto points = grid.points(kind);
  if (points.empty()) throw ConfigError("empty hyperparameter grid");
  if (train.size() < 2 || validation.empty())
    throw ProtocolError("grid search needs >= 2 training and >= 1 validation "
                        "samples");

  const Eigen::MatrixXd Xt = detail::stack_features(train);
  const Eigen::MatrixXd Yt = detail::stack_targets(train);
  const Eigen::MatrixXd Xv = detail::stack_features(validation);
  if (Xv.cols() != Xt.cols())
    throw InputError("validation feature dimension mismatch");

  const bool rbf = grid.kernel == KernelKind::kRbf;
  const Eigen::MatrixXd base_tt =
      rbf ? detail::squared_distances(Xt, Xt) : detail::dot_products(Xt, Xt);
  const Eigen::MatrixXd base_vt =
      rbf ? detail::squared_distances(Xv, Xt) : detail::dot_products(Xv, Xt);

  GridSearchResult result;
  double current_gamma = std::nan("");
  Eigen::MatrixXd K, Kv;
  bool have_best = false;
  for (const Hyperparams& hp : points) {
    if (!(hp.kernel.gamma == current_gamma)) {
      hp.kernel.validate();
      current_gamma = hp.kernel.gamma;
      if (rbf) {
        K = detail::rbf_from_distances(base_tt, hp.kernel.gamma);
        Kv = detail::rbf_from_distances(base_vt, hp.kernel.gamma);
      } else {
        K = base_tt;
        Kv = base_vt;
      }
    }
    const auto sol = detail::fit_dual(kind, K, Yt, hp, options);
    const Eigen::MatrixXd F = (Kv * sol.weights).rowwise() + sol.bias;

    std::vector<Rgb> sums(n_groups, Rgb{0.0, 0.0, 0.0});
    std::vector<std::size_t> counts(n_groups, 0);
    for (Eigen::Index i = 0; i < F.rows(); ++i) {
      const std::size_t g = groups[std::size_t(i)];
      for (int c = 0; c < 3; ++c) sums[g][c] += F(i, c);
      ++counts[g];
    }
    std::vector<double> errors(n_groups);
    for (std::size_t g = 0; g < n_groups; ++g) {
      Rgb mean = sums[g];
      for (double& v : mean) v /= double(counts[g]);
      errors[g] = score_raw(mean, group_truth[g], nullptr);
    }
    const double med = median_of(std::move(errors));
    result.evaluated.push_back({hp, med});

    const auto key = [](const Hyperparams& h, double m) {
      return std::make_tuple(m, h.C, h.kernel.gamma, -h.epsilon);
    };
    if (!have_best || key(hp, med) < key(result.best, result.best_median)) {
      result.best = hp;
      result.best_median = med;
      have_best = true;
    }
  }
  return result;
}

}  // namespace

GridSearchResult grid_search(std::span<const LabeledSample> train,
                             std::span<const LabeledSample> validation,
                             ModelKind kind, const HyperparamGrid& grid,
                             const SolverOptions& options) {
  std::vector<std::size_t> groups(validation.size());
  std::iota(groups.begin(), groups.end(), std::size_t{0});
  std::vector<Illuminant> truth;
  for (const auto& s : validation) truth.push_back(s.target);
  return grid_search_grouped(train, validation, groups, validation.size(),
                             truth, kind, grid, options);
}

// ---- augmentation ----------------------------------------------------------

std::vector<LinearImage> augment_random_patches(const LinearImage& image,
                                                std::size_t n,
                                                std::size_t size,
                                                std::uint64_t seed,
                                                std::size_t resize_max_side) {
  if (size == 0) throw AugmentationError("patch size must be positive");
  const double scale =
      double(resize_max_side) / double(std::max(image.width(), image.height()));
  const auto w = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(double(image.width()) * scale)));
  const auto h = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(double(image.height()) * scale)));
  const LinearImage resized = resize_bilinear(image, w, h);
  if (size > std::min(w, h))
    throw AugmentationError("image smaller than the patch size after resize");

  Rng rng(seed);
  std::vector<LinearImage> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t x0 = rng.below(w - size + 1);
    const std::size_t y0 = rng.below(h - size + 1);
    std::vector<double> data(size * size * 3);
    for (std::size_t y = 0; y < size; ++y)
      for (std::size_t x = 0; x < size; ++x)
        for (std::size_t c = 0; c < 3; ++c)
          data[(y * size + x) * 3 + c] = resized.at(x0 + x, y0 + y, c);
    out.emplace_back(size, size, std::move(data));
  }
  return out;
}

std::vector<LinearImage> augment_sliding_window(const LinearImage& image,
                                                std::size_t size,
                                                std::size_t stride) {
  if (size == 0 || stride == 0)
    throw AugmentationError("patch size and stride must be positive");
  if (size > std::min(image.width(), image.height()))
    throw AugmentationError("image smaller than the patch size");
  std::vector<LinearImage> out;
  for (std::size_t y0 = 0; y0 + size <= image.height(); y0 += stride)
    for (std::size_t x0 = 0; x0 + size <= image.width(); x0 += stride) {
      std::vector<double> data(size * size * 3);
      for (std::size_t y = 0; y < size; ++y)
        for (std::size_t x = 0; x < size; ++x)
          for (std::size_t c = 0; c < 3; ++c)
            data[(y * size + x) * 3 + c] = image.at(x0 + x, y0 + y, c);
      out.emplace_back(size, size, std::move(data));
    }
  return out;
}

AugmentationConfig parse_augmentation(std::string_view spec) {
  AugmentationConfig cfg;
  const auto colon = spec.find(':');
  const std::string kind = lower(spec.substr(0, colon));
  std::optional<double> arg;
  if (colon != std::string_view::npos) {
    arg = to_double(std::string(spec.substr(colon + 1)));
    if (!arg || *arg < 1 || *arg != std::floor(*arg))
      throw UsageError("augmentation argument must be a positive integer");
  }
  if (kind == "none") {
    cfg.kind = AugmentationConfig::Kind::kNone;
  } else if (kind == "random") {
    cfg.kind = AugmentationConfig::Kind::kRandom;
    if (arg) cfg.count = std::size_t(*arg);
  } else if (kind == "sliding") {
    cfg.kind = AugmentationConfig::Kind::kSliding;
    if (arg) cfg.stride = std::size_t(*arg);
  } else {
    throw UsageError("augmentation must be none, random[:N] or sliding[:S]");
  }
  return cfg;
}

std::vector<LabeledPatch> augment(const std::string& image_id,
                                  const LinearImage& image,
                                  const Illuminant& ground_truth,
                                  const AugmentationConfig& config,
                                  std::uint64_t seed) {
  std::vector<LinearImage> patches;
  switch (config.kind) {
    case AugmentationConfig::Kind::kNone:
      patches.push_back(image);
      break;
    case AugmentationConfig::Kind::kRandom:
      patches = augment_random_patches(image, config.count, config.size, seed,
                                       config.resize_max_side);
      break;
    case AugmentationConfig::Kind::kSliding:
      patches = augment_sliding_window(image, config.size, config.stride);
      break;
  }
  std::vector<LabeledPatch> out;
  out.reserve(patches.size());
  for (auto& p : patches) out.push_back({image_id, std::move(p), ground_truth});
  return out;
}

// ---- protocol --------------------------------------------------------------

EvaluationData load_evaluation_data(const DatasetManifest& manifest,
                                    const FeatureSource& source,
                                    bool need_images, bool need_features) {
  EvaluationData data;
  data.name = manifest.name;
  data.histogram_bins = source.bins;
  const bool builtin = source.kind == FeatureSource::Kind::kHistogram;
  const bool load_images = need_images || (need_features && builtin);
  for (const auto& e : manifest.entries) {
    data.ids.push_back(e.image_id);
    data.ground_truth.push_back(e.ground_truth);
    if (load_images) data.images.push_back(load_entry_image(manifest, e));
  }
  if (!need_features) return data;

  if (builtin) {
    for (const auto& img : data.images)
      data.features.push_back(extract_histogram_features(img, source.bins));
    if (!need_images) data.images.clear();
    return data;
  }

  auto records = load_feature_file(source.path);
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < records.size(); ++i)
    by_id.emplace(records[i].image_id, i);
  std::vector<std::string> missing;
  for (const auto& id : data.ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      missing.push_back(id);
      continue;
    }
    data.features.push_back(std::move(records[it->second].features));
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i)
      list += (i ? ", " : "") + missing[i];
    if (missing.size() > 10) list += ", ...";
    throw ManifestError(std::to_string(missing.size()) +
                        " manifest image(s) have no feature record: " + list);
  }
  return data;
}

ErrorStats summarize(std::span<const double> errors) {
  if (errors.empty()) throw ProtocolError("no errors to summarize");
  ErrorStats s;
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = median_of(sorted);
  double sum = 0.0;
  for (double e : errors) sum += e;
  s.mean = sum / double(errors.size());
  return s;
}

namespace {

ErrorStats mean_of(const std::vector<RepeatResult>& repeats) {
  ErrorStats s;
  for (const auto& r : repeats) {
    s.min += r.stats.min;
    s.median += r.stats.median;
    s.mean += r.stats.mean;
    s.max += r.stats.max;
  }
  const double n = double(repeats.size());
  s.min /= n;
  s.median /= n;
  s.mean /= n;
  s.max /= n;
  return s;
}

ErrorStats pooled_of(const std::vector<RepeatResult>& repeats) {
  std::vector<double> all;
  for (const auto& r : repeats)
    all.insert(all.end(), r.errors.begin(), r.errors.end());
  return summarize(all);
}

std::uint64_t augmentation_seed(std::uint64_t plan_seed, std::size_t repeat,
                                std::size_t image) {
  return Rng(plan_seed).split(0x4155470000000000ULL + repeat).split(image).seed();
}

}  // namespace

EvaluationReport run_protocol(const EvaluationData& data,
                              const EstimatorConfig& estimator,
                              const ProtocolOptions& options) {
  options.plan.validate();
  const std::size_t n = data.ids.size();
  if (n < 3) throw ProtocolError("the protocol needs at least 3 samples");
  if (data.ground_truth.size() != n)
    throw ProtocolError("ground truth does not match the id list");

  const bool learning = estimator.family == EstimatorFamily::kLearning;
  const bool augmenting =
      learning && options.augmentation.kind != AugmentationConfig::Kind::kNone;
  if ((!learning || augmenting) && data.images.size() != n)
    throw ProtocolError("estimator '" + estimator.label + "' needs images");
  if (learning && !augmenting && data.features.size() != n)
    throw ProtocolError("estimator '" + estimator.label + "' needs features");

  EvaluationReport report;
  report.estimator = estimator.label;
  report.dataset = data.name;
  report.plan = options.plan;
  report.aggregation = options.aggregation;

  for (std::size_t r = 0; r < options.plan.n_repeats; ++r) {
    const Split split = make_split(n, options.plan, r);
    RepeatResult rr;
    rr.index = r;
    for (std::size_t i : split.test) rr.test_ids.push_back(data.ids[i]);

    if (!learning) {
      for (std::size_t i : split.test)
        rr.errors.push_back(angular_error(
            estimate_without_learning(estimator, data.images[i]),
            data.ground_truth[i]));
    } else {
      // Samples (one per image, or one per patch) plus the owning image.
      auto build = [&](const std::vector<std::size_t>& idx,
                       std::vector<LabeledSample>& samples,
                       std::vector<std::size_t>& owner) {
        for (std::size_t k = 0; k < idx.size(); ++k) {
          const std::size_t i = idx[k];
          if (!augmenting) {
            samples.push_back({data.features[i], data.ground_truth[i],
                               data.ids[i]});
            owner.push_back(k);
            continue;
          }
          for (auto& p : augment(data.ids[i], data.images[i],
                                 data.ground_truth[i], options.augmentation,
                                 augmentation_seed(options.plan.seed, r, i))) {
            samples.push_back(
                {extract_histogram_features(p.image, data.histogram_bins),
                 p.ground_truth, p.parent_id});
            owner.push_back(k);
          }
        }
      };
      std::vector<LabeledSample> train, val, test;
      std::vector<std::size_t> train_owner, val_owner, test_owner;
      build(split.train, train, train_owner);
      build(split.validation, val, val_owner);
      build(split.test, test, test_owner);

      Hyperparams hp;
      if (estimator.fixed) {
        hp = *estimator.fixed;
      } else {
        std::vector<Illuminant> val_truth;
        for (std::size_t i : split.validation)
          val_truth.push_back(data.ground_truth[i]);
        hp = grid_search_grouped(train, val, val_owner, split.validation.size(),
                                 val_truth, estimator.model_kind,
                                 estimator.grid, options.solver)
                 .best;
      }
      rr.chosen = hp;
      const RegressionModel model =
          illumkit::train(estimator.model_kind, train, hp, options.solver);

      std::vector<Rgb> sums(split.test.size(), Rgb{0.0, 0.0, 0.0});
      std::vector<std::size_t> counts(split.test.size(), 0);
      for (std::size_t s = 0; s < test.size(); ++s) {
        const Rgb raw = model.predict_raw(test[s].features);
        for (int c = 0; c < 3; ++c) sums[test_owner[s]][c] += raw[c];
        ++counts[test_owner[s]];
      }
      for (std::size_t k = 0; k < split.test.size(); ++k) {
        Rgb mean = sums[k];
        for (double& v : mean) v /= double(counts[k]);
        bool invalid = false;
        rr.errors.push_back(
            score_raw(mean, data.ground_truth[split.test[k]], &invalid));
        rr.invalid_predictions += invalid ? 1 : 0;
      }
    }
    rr.stats = summarize(rr.errors);
    report.repeats.push_back(std::move(rr));
  }
  report.mean_of_repeats = mean_of(report.repeats);
  report.pooled = pooled_of(report.repeats);
  return report;
}

EvaluationReport run_protocol(const DatasetManifest& manifest,
                              const EstimatorConfig& estimator,
                              const SplitPlan& plan,
                              const FeatureSource& source) {
  const bool learning = estimator.family == EstimatorFamily::kLearning;
  const EvaluationData data =
      load_evaluation_data(manifest, source, !learning, learning);
  ProtocolOptions options;
  options.plan = plan;
  return run_protocol(data, estimator, options);
}

bool aggregates_consistent(const EvaluationReport& report, double tolerance) {
  auto close = [tolerance](const ErrorStats& a, const ErrorStats& b) {
    return std::abs(a.min - b.min) <= tolerance &&
           std::abs(a.median - b.median) <= tolerance &&
           std::abs(a.mean - b.mean) <= tolerance &&
           std::abs(a.max - b.max) <= tolerance;
  };
  if (report.repeats.empty()) return false;
  std::vector<RepeatResult> recomputed = report.repeats;
  for (auto& r : recomputed) {
    if (r.errors.size() != r.test_ids.size()) return false;
    const ErrorStats s = summarize(r.errors);
    if (!close(s, r.stats)) return false;
    r.stats = s;
  }
  return close(mean_of(recomputed), report.mean_of_repeats) &&
         close(pooled_of(recomputed), report.pooled);
}

// ---- reporting -------------------------------------------------------------

namespace {

nlohmann::json stats_json(const ErrorStats& s) {
  return {{"min", s.min}, {"median", s.median}, {"mean", s.mean},
          {"max", s.max}};
}

}  // namespace

nlohmann::json report_to_json(const EvaluationReport& report) {
  nlohmann::json repeats = nlohmann::json::array();
  for (const auto& r : report.repeats) {
    nlohmann::json j = {
        {"index", r.index},
        {"test_ids", r.test_ids},
        {"errors", r.errors},
        {"stats", stats_json(r.stats)},
        {"invalid_predictions", r.invalid_predictions},
    };
    if (r.chosen) {
      j["hyperparams"] = {
          {"C", r.chosen->C},
          {"epsilon", r.chosen->epsilon},
          {"kernel",
           r.chosen->kernel.kind == KernelKind::kRbf ? "rbf" : "linear"},
          {"gamma", r.chosen->kernel.gamma},
      };
    } else {
      j["hyperparams"] = nullptr;
    }
    repeats.push_back(std::move(j));
  }
  return {
      {"estimator", report.estimator},
      {"dataset", report.dataset},
      {"plan",
       {{"seed", report.plan.seed},
        {"repeats", report.plan.n_repeats},
        {"fractions", report.plan.fractions}}},
      {"aggregation", report.aggregation == Aggregation::kPooled
                          ? "pooled"
                          : "mean_of_repeats"},
      {"aggregate", stats_json(report.headline())},
      {"mean_of_repeats", stats_json(report.mean_of_repeats)},
      {"pooled", stats_json(report.pooled)},
      {"repeats", std::move(repeats)},
  };
}

nlohmann::json reports_to_json(const std::vector<EvaluationReport>& reports) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : reports) list.push_back(report_to_json(r));
  return {{"format", "illumkit-report"}, {"version", 1},
          {"reports", std::move(list)}};
}

std::string format_table(const std::vector<EvaluationReport>& reports) {
  std::size_t width = 6;
  for (const auto& r : reports) width = std::max(width, r.estimator.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %8s %8s %8s\n", int(width), "Method",
                "Median", "Mean", "Max");
  out += buf;
  for (const auto& r : reports) {
    const ErrorStats& s = r.headline();
    std::snprintf(buf, sizeof buf, "%-*s %8.2f %8.2f %8.2f\n", int(width),
                  r.estimator.c_str(), s.median, s.mean, s.max);
    out += buf;
  }
  return out;
}

}  // namespace illumkit
