#include "illumkit/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "illumkit/correction.hpp"
#include "illumkit/error.hpp"
#include "illumkit/evaluation.hpp"
#include "illumkit/features.hpp"
#include "illumkit/fileutil.hpp"
#include "illumkit/image_io.hpp"
#include "illumkit/regression.hpp"
#include "illumkit/rng.hpp"
#include "illumkit/synthetic.hpp"

namespace illumkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string rgb_line(const Rgb& v) {
  return fixed4(v[0]) + " " + fixed4(v[1]) + " " + fixed4(v[2]);
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size())
    throw UsageError("bad number '" + s + "' for " + what);
  return v;
}

Rgb parse_rgb(const std::string& s) {
  const auto parts = split_on(s, ',');
  if (parts.size() != 3) throw UsageError("expected r,g,b but got '" + s + "'");
  Rgb out;
  for (std::size_t c = 0; c < 3; ++c) out[c] = number(parts[c], "illuminant");
  return out;
}

// "FROM:STEP:TO" (powers of ten) or "v1,v2,...".
std::vector<double> parse_values(const std::string& s, const std::string& what) {
  if (s.find(':') != std::string::npos) {
    const auto parts = split_on(s, ':');
    if (parts.size() != 3)
      throw UsageError(what + ": expected FROM:STEP:TO, got '" + s + "'");
    int e[3];
    for (int i = 0; i < 3; ++i) {
      const double v = number(parts[std::size_t(i)], what);
      if (v != std::floor(v)) throw UsageError(what + ": exponents must be integers");
      e[i] = int(v);
    }
    if (e[1] == 0) throw UsageError(what + ": zero step");
    auto out = decades(e[0], e[1], e[2]);
    if (out.empty()) throw UsageError(what + ": empty range");
    return out;
  }
  std::vector<double> out;
  for (const auto& p : split_on(s, ',')) out.push_back(number(p, what));
  if (out.empty()) throw UsageError(what + ": no values");
  return out;
}

struct GridOverrides {
  std::string C, gamma, epsilon, kernel;

  void apply(EstimatorConfig& cfg) const {
    if (cfg.family != EstimatorFamily::kLearning) return;
    if (!kernel.empty()) {
      if (kernel == "linear")
        cfg.grid.kernel = KernelKind::kLinear;
      else if (kernel == "rbf")
        cfg.grid.kernel = KernelKind::kRbf;
      else
        throw UsageError("--grid-kernel must be linear or rbf");
    }
    if (!C.empty()) cfg.grid.C = parse_values(C, "--grid-c");
    if (!gamma.empty()) cfg.grid.gamma = parse_values(gamma, "--grid-gamma");
    if (!epsilon.empty())
      cfg.grid.epsilon = parse_values(epsilon, "--grid-epsilon");
  }

  void add_to(CLI::App* app) {
    app->add_option("--grid-c", C, "C grid: FROM:STEP:TO decades or a list");
    app->add_option("--grid-gamma", gamma, "rbf gamma grid");
    app->add_option("--grid-epsilon", epsilon, "epsilon grid (svr, msvr)");
    app->add_option("--grid-kernel", kernel, "grid kernel: linear or rbf");
  }
};

std::string describe(const Hyperparams& hp, ModelKind kind) {
  std::ostringstream s;
  s.precision(6);
  s << "C=" << hp.C;
  if (hp.kernel.kind == KernelKind::kRbf)
    s << " kernel=rbf gamma=" << hp.kernel.gamma;
  else
    s << " kernel=linear";
  if (uses_epsilon(kind)) s << " epsilon=" << hp.epsilon;
  return s.str();
}

// Produces one illuminant per image, from a statistics estimator or a
// trained model.
class ImageEstimator {
 public:
  ImageEstimator(const std::string& estimator, const std::string& model_path,
                 const std::string& feature_spec) {
    if (!model_path.empty()) {
      model_.emplace(load_model(model_path));
      label_ = std::string(to_string(model_->kind())) + " (" + model_path + ")";
      configure_features(feature_spec);
      return;
    }
    if (estimator.empty())
      throw UsageError("one of --estimator, --model is required");
    config_ = parse_estimator(estimator);
    if (config_.family == EstimatorFamily::kLearning)
      throw UsageError("estimator '" + config_.label +
                       "' is learned; train it first and pass --model");
    label_ = config_.label;
  }

  const std::string& label() const { return label_; }

  Illuminant estimate(const std::string& id, const LinearImage& image) const {
    if (!model_) return estimate_without_learning(config_, image);
    if (source_.kind == FeatureSource::Kind::kHistogram)
      return model_->predict(extract_histogram_features(image, source_.bins));
    const auto it = file_features_.find(id);
    if (it == file_features_.end())
      throw InputError("no features for image id '" + id + "'");
    return model_->predict(it->second);
  }

 private:
  void configure_features(const std::string& spec) {
    const std::size_t d = model_->dimension();
    if (spec.empty()) {
      if (model_->feature_tag() != "hist")
        throw UsageError("model expects '" + model_->feature_tag() +
                         "' features; pass --features file:PATH");
      const auto bins = std::size_t(std::llround(std::sqrt(double(d))));
      if (bins * bins != d)
        throw InputError("model dimension is not a square histogram");
      source_.bins = int(bins);
      return;
    }
    source_ = parse_feature_source(spec);
    if (source_.kind == FeatureSource::Kind::kHistogram) {
      if (model_->feature_tag() != "hist")
        throw UsageError("model expects '" + model_->feature_tag() +
                         "' features, not the built-in histogram");
      if (std::size_t(source_.bins) * std::size_t(source_.bins) != d)
        throw UsageError("histogram size does not match the model dimension");
      return;
    }
    for (auto& r : load_feature_file(source_.path)) {
      if (r.features.source_tag != model_->feature_tag())
        throw InputError("feature tag '" + r.features.source_tag +
                         "' does not match the model's '" +
                         model_->feature_tag() + "'");
      if (r.features.dim() != d)
        throw InputError("feature dimension does not match the model");
      file_features_.emplace(r.image_id, std::move(r.features));
    }
  }

  std::string label_;
  EstimatorConfig config_;
  std::optional<RegressionModel> model_;
  FeatureSource source_;
  std::unordered_map<std::string, FeatureVector> file_features_;
};

// ---- synth ------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  std::size_t count = 100;
  std::uint64_t seed = 0;
  bool narrow_band = false;
  std::string name = "synthetic";
  std::size_t grid = 8;
  std::size_t patch_size = 8;
  std::size_t colors = 6;
  double min_temperature = 2500.0;
  double max_temperature = 9500.0;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  DatasetConfig cfg = default_dataset_config(a.narrow_band);
  cfg.grid = a.grid;
  cfg.patch_size = a.patch_size;
  cfg.colors_per_scene = a.colors;
  cfg.min_temperature = a.min_temperature;
  cfg.max_temperature = a.max_temperature;
  if (!(cfg.min_temperature <= cfg.max_temperature))
    throw ConfigError("--min-temperature exceeds --max-temperature");
  const auto scenes = render_dataset(cfg, a.count, a.seed);
  write_synthetic_dataset(scenes, a.out, a.name);
  out << "wrote " << scenes.size() << " scenes to "
      << (fs::path(a.out) / "manifest.csv").string() << "\n";
  return kExitOk;
}

// ---- extract ----------------------------------------------------------------

struct ExtractArgs {
  std::string manifest;
  std::string features = "builtin:hist";
  std::string out;
};

int cmd_extract(const ExtractArgs& a, std::ostream& out, std::ostream& err) {
  const FeatureSource source = parse_feature_source(a.features);
  if (source.kind != FeatureSource::Kind::kHistogram)
    throw UsageError("extract computes built-in features; use builtin:hist");
  const DatasetManifest manifest = load_manifest(a.manifest);
  if (manifest.entries.empty()) throw InputError("manifest has no entries");

  std::vector<FeatureRecord> records;
  std::size_t failures = 0;
  for (const auto& e : manifest.entries) {
    try {
      records.push_back({e.image_id, extract_histogram_features(
                                         load_entry_image(manifest, e),
                                         source.bins)});
    } catch (const Error& ex) {
      err << "error: " << e.image_id << ": " << ex.what() << "\n";
      ++failures;
    }
  }
  if (failures > 0) {
    err << "error: " << failures << " of " << manifest.entries.size()
        << " images failed; nothing written\n";
    return kExitFailure;
  }
  save_feature_file(records, "hist", a.out);
  out << "wrote " << records.size() << " x "
      << records.front().features.dim() << " features to " << a.out << "\n";
  return kExitOk;
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
  std::string manifest;
  std::string features = "builtin:hist";
  std::string estimator;
  std::string out;
  std::uint64_t seed = 0;
  double validation_fraction = 1.0 / 3.0;
  GridOverrides grid;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  EstimatorConfig cfg = parse_estimator(a.estimator);
  if (cfg.family != EstimatorFamily::kLearning)
    throw UsageError("train needs a learning estimator (rr, svr, mrr, msvr)");
  a.grid.apply(cfg);
  if (!(a.validation_fraction > 0.0 && a.validation_fraction < 1.0))
    throw ConfigError("--validation-fraction must lie in (0, 1)");

  const FeatureSource source = parse_feature_source(a.features);
  const DatasetManifest manifest = load_manifest(a.manifest);
  const EvaluationData data =
      load_evaluation_data(manifest, source, false, true);
  const std::size_t n = data.ids.size();
  if (n == 0) throw InputError("manifest has no entries");

  std::vector<LabeledSample> all;
  for (std::size_t i = 0; i < n; ++i)
    all.push_back({data.features[i], data.ground_truth[i], data.ids[i]});

  Hyperparams hp;
  if (cfg.fixed) {
    hp = *cfg.fixed;
  } else {
    if (n < 2) throw InputError("grid search needs at least 2 samples");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng(a.seed).shuffle(order);
    const auto n_val = std::clamp<std::size_t>(
        std::size_t(std::llround(double(n) * a.validation_fraction)), 1,
        n - 1);
    std::vector<LabeledSample> train, val;
    for (std::size_t k = 0; k < n; ++k)
      (k < n_val ? val : train).push_back(all[order[k]]);
    const auto result = grid_search(train, val, cfg.model_kind, cfg.grid);
    hp = result.best;
    out << "grid search: " << result.evaluated.size()
        << " points, best validation median " << fixed4(result.best_median)
        << " deg\n";
  }
  const std::string tag = source.kind == FeatureSource::Kind::kHistogram
                              ? std::string("hist")
                              : data.features.front().source_tag;
  const auto K = detail::gram(detail::stack_features(all),
                              detail::stack_features(all), hp.kernel);
  const RegressionModel model = detail::train_from_gram(
      cfg.model_kind, K, detail::stack_targets(all), hp, {},
      detail::stack_features(all), tag);
  save_model(model, a.out);
  out << "trained " << to_string(cfg.model_kind) << " on " << n
      << " samples (" << describe(hp, cfg.model_kind) << "), "
      << model.support_vector_count() << " support vectors, wrote " << a.out
      << "\n";
  return kExitOk;
}

// ---- estimate ---------------------------------------------------------------

struct EstimateArgs {
  std::string image;
  std::string manifest;
  std::string estimator;
  std::string model;
  std::string features;
  std::string out;
  bool json_output = false;
  bool gamma = false;
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
  const ImageEstimator est(a.estimator, a.model, a.features);
  struct Item {
    std::string id;
    std::optional<Illuminant> value;
  };
  std::vector<Item> items;
  std::size_t failures = 0;
  auto run = [&](const std::string& id, auto&& load) {
    try {
      items.push_back({id, est.estimate(id, load())});
    } catch (const Error& ex) {
      err << "error: " << id << ": " << ex.what() << "\n";
      items.push_back({id, std::nullopt});
      ++failures;
    }
  };
  if (!a.image.empty()) {
    const std::string id = fs::path(a.image).stem().string();
    run(id, [&] {
      return read_image(a.image, a.gamma ? Transfer::kGamma22
                                         : Transfer::kLinear);
    });
  } else {
    const DatasetManifest m = load_manifest(a.manifest);
    if (m.entries.empty()) throw InputError("manifest has no entries");
    for (const auto& e : m.entries)
      run(e.image_id, [&] { return load_entry_image(m, e); });
  }

  json doc = {{"format", "illumkit-estimates"},
              {"version", 1},
              {"estimator", est.label()},
              {"estimates", json::array()}};
  for (const auto& it : items) {
    if (!it.value) continue;
    const Illuminant& v = *it.value;
    doc["estimates"].push_back(
        {{"image_id", it.id}, {"illuminant", {v[0], v[1], v[2]}}});
  }
  if (!a.out.empty()) write_file_atomic(a.out, doc.dump(2) + "\n");
  if (a.json_output) {
    out << doc.dump(2) << "\n";
  } else {
    for (const auto& it : items) {
      if (!it.value) continue;
      if (!a.image.empty())
        out << rgb_line(it.value->rgb()) << "\n";
      else
        out << it.id << " " << rgb_line(it.value->rgb()) << "\n";
    }
  }
  return failures > 0 ? kExitFailure : kExitOk;
}

// ---- correct ----------------------------------------------------------------

struct CorrectArgs {
  std::string image;
  std::string out;
  std::string illuminant;
  std::string estimator;
  std::string model;
  std::string features;
  bool gamma = false;
};

int cmd_correct(const CorrectArgs& a, std::ostream& out) {
  const LinearImage image =
      read_image(a.image, a.gamma ? Transfer::kGamma22 : Transfer::kLinear);
  Illuminant ill = Illuminant::neutral();
  std::string source;
  if (!a.illuminant.empty()) {
    ill = normalize_illuminant(parse_rgb(a.illuminant));
    source = "explicit";
  } else {
    const ImageEstimator est(a.estimator, a.model, a.features);
    ill = est.estimate(fs::path(a.image).stem().string(), image);
    source = est.label();
  }
  const LinearImage corrected = correct_image(image, ill);
  double peak = 0.0;
  for (double v : corrected.data()) peak = std::max(peak, v);
  const double scale = peak > 0.0 ? 65535.0 / peak : 1.0;

  const fs::path out_path(a.out);
  fs::path sidecar = out_path;
  sidecar += ".json";
  write_png16(out_path, corrected, scale);
  const json meta = {{"format", "illumkit-corrected"},
                     {"version", 1},
                     {"input", a.image},
                     {"estimator", source},
                     {"illuminant", {ill[0], ill[1], ill[2]}},
                     {"scale", scale}};
  write_file_atomic(sidecar, meta.dump(2) + "\n");
  out << "illuminant " << rgb_line(ill.rgb()) << "\nwrote "
      << out_path.string() << " (scale " << scale << ")\n";
  return kExitOk;
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::string manifest;
  std::vector<std::string> estimators;
  std::string features = "builtin:hist";
  std::size_t repeats = 30;
  std::uint64_t seed = 0;
  std::string fractions;
  std::string aggregation = "mean";
  std::string augment = "none";
  std::string out;
  GridOverrides grid;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  ProtocolOptions options;
  options.plan.seed = a.seed;
  options.plan.n_repeats = a.repeats;
  if (!a.fractions.empty()) {
    const auto f = parse_values(a.fractions, "--fractions");
    if (f.size() != 3) throw UsageError("--fractions needs three values");
    options.plan.fractions = {f[0], f[1], f[2]};
  }
  options.plan.validate();
  if (a.aggregation == "mean")
    options.aggregation = Aggregation::kMeanOfRepeats;
  else if (a.aggregation == "pooled")
    options.aggregation = Aggregation::kPooled;
  else
    throw UsageError("--aggregation must be mean or pooled");
  options.augmentation = parse_augmentation(a.augment);
  const bool augmenting =
      options.augmentation.kind != AugmentationConfig::Kind::kNone;

  std::vector<EstimatorConfig> configs;
  bool need_images = false, need_features = false;
  for (const auto& spec : a.estimators) {
    EstimatorConfig cfg = parse_estimator(spec);
    a.grid.apply(cfg);
    const bool learning = cfg.family == EstimatorFamily::kLearning;
    need_images |= !learning || augmenting;
    need_features |= learning && !augmenting;
    configs.push_back(std::move(cfg));
  }
  const FeatureSource source = parse_feature_source(a.features);
  if (augmenting && source.kind != FeatureSource::Kind::kHistogram)
    throw UsageError("augmentation needs the built-in histogram features");
  const DatasetManifest manifest = load_manifest(a.manifest);
  if (manifest.entries.empty()) throw InputError("manifest has no entries");
  const EvaluationData data =
      load_evaluation_data(manifest, source, need_images, need_features);

  std::vector<EvaluationReport> reports;
  for (const auto& cfg : configs)
    reports.push_back(run_protocol(data, cfg, options));

  const std::string table = format_table(reports);
  if (!a.out.empty()) {
    const fs::path dir(a.out);
    write_file_atomic(dir / "report.json",
                      reports_to_json(reports).dump(2) + "\n");
    write_file_atomic(dir / "table.txt", table);
  }
  out << table;
  return kExitOk;
}

int dispatch(CLI::App& app, std::ostream& out, std::ostream& err,
             const SynthArgs& synth, const ExtractArgs& extract,
             const TrainArgs& train, const EstimateArgs& estimate,
             const CorrectArgs& correct, const EvaluateArgs& evaluate) {
  if (app.got_subcommand("synth")) return cmd_synth(synth, out);
  if (app.got_subcommand("extract")) return cmd_extract(extract, out, err);
  if (app.got_subcommand("train")) return cmd_train(train, out);
  if (app.got_subcommand("estimate")) return cmd_estimate(estimate, out, err);
  if (app.got_subcommand("correct")) return cmd_correct(correct, out);
  if (app.got_subcommand("evaluate")) return cmd_evaluate(evaluate, out);
  throw UsageError("no subcommand given");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Illuminant estimation and color correction toolkit",
               "illumkit"};
  app.set_config("--config", "", "TOML/INI file with flag values");
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Render a synthetic Mondrian dataset");
  s->add_option("--out", synth.out, "output directory")->required();
  s->add_option("--count", synth.count, "number of scenes")
      ->check(CLI::PositiveNumber);
  s->add_option("--seed", synth.seed, "random seed");
  s->add_flag("--narrow-band", synth.narrow_band, "narrow-band sensors");
  s->add_option("--name", synth.name, "dataset name");
  s->add_option("--grid", synth.grid, "patches per side")
      ->check(CLI::PositiveNumber);
  s->add_option("--patch-size", synth.patch_size, "pixels per patch side")
      ->check(CLI::PositiveNumber);
  s->add_option("--colors", synth.colors, "distinct reflectances per scene")
      ->check(CLI::PositiveNumber);
  s->add_option("--min-temperature", synth.min_temperature, "kelvin")
      ->check(CLI::PositiveNumber);
  s->add_option("--max-temperature", synth.max_temperature, "kelvin")
      ->check(CLI::PositiveNumber);

  ExtractArgs extract;
  auto* x = app.add_subcommand("extract", "Compute a FeatureFile");
  x->add_option("--manifest", extract.manifest, "dataset manifest")
      ->required();
  x->add_option("--features", extract.features, "builtin:hist[:BINS]");
  x->add_option("--out", extract.out, "output FeatureFile")->required();

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a regression model");
  t->add_option("--manifest", train.manifest, "dataset manifest")->required();
  t->add_option("--features", train.features,
                "builtin:hist[:BINS] or file:PATH");
  t->add_option("--estimator", train.estimator,
                "rr|svr|mrr|msvr[:C=..,gamma=..,epsilon=..,kernel=..]")
      ->required();
  t->add_option("--out", train.out, "output model file")->required();
  t->add_option("--seed", train.seed, "seed of the validation split");
  t->add_option("--validation-fraction", train.validation_fraction,
                "share held out for grid search");
  train.grid.add_to(t);

  EstimateArgs estimate;
  auto* e = app.add_subcommand("estimate", "Estimate illuminants");
  auto* e_img = e->add_option("--image", estimate.image, "input image");
  auto* e_man =
      e->add_option("--manifest", estimate.manifest, "dataset manifest");
  e_img->excludes(e_man);
  e->add_option("--estimator", estimate.estimator, "statistics estimator");
  e->add_option("--model", estimate.model, "trained model file")
      ->excludes("--estimator");
  e->add_option("--features", estimate.features,
                "feature source for --model");
  e->add_option("--out", estimate.out, "write estimates as JSON");
  e->add_flag("--json", estimate.json_output, "print JSON");
  e->add_flag("--gamma", estimate.gamma, "--image is gamma 2.2 encoded");

  CorrectArgs correct;
  auto* c = app.add_subcommand("correct", "White-balance an image");
  c->add_option("--image", correct.image, "input image")->required();
  c->add_option("--out", correct.out, "output 16-bit PNG")->required();
  auto* c_ill =
      c->add_option("--illuminant", correct.illuminant, "explicit r,g,b");
  auto* c_est =
      c->add_option("--estimator", correct.estimator, "statistics estimator");
  auto* c_mod = c->add_option("--model", correct.model, "trained model file");
  c_ill->excludes(c_est)->excludes(c_mod);
  c_est->excludes(c_mod);
  c->add_option("--features", correct.features, "feature source for --model");
  c->add_flag("--gamma", correct.gamma, "input is gamma 2.2 encoded");

  EvaluateArgs evaluate;
  auto* v = app.add_subcommand("evaluate", "Run the evaluation protocol");
  v->add_option("--manifest", evaluate.manifest, "dataset manifest")
      ->required();
  v->add_option("--estimator", evaluate.estimators,
                "estimator spec (repeatable)")
      ->required();
  v->add_option("--features", evaluate.features,
                "builtin:hist[:BINS] or file:PATH");
  v->add_option("--repeats", evaluate.repeats, "number of repeats")
      ->check(CLI::PositiveNumber);
  v->add_option("--seed", evaluate.seed, "split seed");
  v->add_option("--fractions", evaluate.fractions,
                "train,validation,test shares");
  v->add_option("--aggregation", evaluate.aggregation, "mean or pooled");
  v->add_option("--augment", evaluate.augment,
                "none, random[:N] or sliding[:STRIDE]");
  v->add_option("--out", evaluate.out, "directory for report.json, table.txt");
  evaluate.grid.add_to(v);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (!estimate.image.empty() == !estimate.manifest.empty() &&
      app.got_subcommand("estimate")) {
    err << "error: estimate needs exactly one of --image, --manifest\n";
    return kExitUsage;
  }

  try {
    return dispatch(app, out, err, synth, extract, train, estimate, correct,
                    evaluate);
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitFailure;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace illumkit
