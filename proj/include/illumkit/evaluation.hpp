#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "illumkit/core.hpp"
#include "illumkit/features.hpp"
#include "illumkit/regression.hpp"
#include "illumkit/statistics.hpp"
#include "illumkit/synthetic.hpp"

namespace illumkit {

// ---- dataset manifest ------------------------------------------------------

struct ManifestEntry {
  std::string image_id;
  std::string filename;  // relative to the manifest's directory
  Illuminant ground_truth;
};

// UTF-8 CSV with header `image_id,filename,r,g,b`. Optional metadata lines
// before the header have the form `# key=value` (keys: name, bit_depth,
// linear). Ground-truth vectors are normalized on load.
struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;
  std::string name;
  int bit_depth = 0;  // 0 = unspecified
  bool linear = true;
};

DatasetManifest parse_manifest(std::string_view text,
                               const std::filesystem::path& root);
DatasetManifest load_manifest(const std::filesystem::path& path);
std::string format_manifest(const DatasetManifest& manifest);
void save_manifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path);

// Reads the entry's image, applying inverse gamma when the manifest is not
// flagged linear.
LinearImage load_entry_image(const DatasetManifest& manifest,
                             const ManifestEntry& entry);

// Writes every scene as a float TIFF under dir/images and a manifest at
// dir/manifest.csv. Returns the manifest.
DatasetManifest write_synthetic_dataset(
    const std::vector<SyntheticScene>& scenes, const std::filesystem::path& dir,
    const std::string& name);

// ---- estimators ------------------------------------------------------------

// 10^(from:step:to), Matlab colon semantics.
std::vector<double> decades(int from, int step, int to);

struct HyperparamGrid {
  KernelKind kernel = KernelKind::kRbf;
  std::vector<double> C;
  std::vector<double> gamma;    // ignored for the linear kernel
  std::vector<double> epsilon;  // ignored for RR / MRR

  // Grid points in enumeration order (C outer, then gamma, then epsilon).
  std::vector<Hyperparams> points(ModelKind kind) const;
};

// MSVR / SVR: rbf, C in 10^(-3:1:5), gamma in 10^(-4:1:4),
// epsilon in 10^(-4:2:3). MRR / RR: linear kernel, C in 10^(-2:1:2).
HyperparamGrid default_grid(ModelKind kind);

enum class EstimatorFamily { kDoingNothing, kStatistic, kLearning };

struct EstimatorConfig {
  std::string label;
  EstimatorFamily family = EstimatorFamily::kDoingNothing;
  MinkowskiParams statistic;
  ModelKind model_kind = ModelKind::kMSVR;
  std::optional<Hyperparams> fixed;  // learning without grid search
  HyperparamGrid grid;
};

// Parses "name[:key=value,...]". Names: dn, gw, wp, sog, ggw, ge1, ge2,
// stat (generic n/p/sigma), rr, svr, mrr, msvr. Statistic keys: p, sigma, n.
// Learning keys: kernel selects the grid kernel; any of C, gamma, epsilon
// fixes the hyperparameters, the missing ones defaulting to C = 1,
// gamma = 1, epsilon = 0.1. Optional key `label` renames the estimator.
// Throws UsageError.
EstimatorConfig parse_estimator(std::string_view spec);

// Applies a statistics-based or doing-nothing estimator to one image.
Illuminant estimate_without_learning(const EstimatorConfig& config,
                                     const LinearImage& image);

// ---- feature sources -------------------------------------------------------

struct FeatureSource {
  enum class Kind { kHistogram, kFile } kind = Kind::kHistogram;
  int bins = kDefaultHistogramBins;
  std::filesystem::path path;
};

// "builtin:hist[:BINS]" or "file:PATH". Throws UsageError.
FeatureSource parse_feature_source(std::string_view spec);

// ---- splits ----------------------------------------------------------------

struct SplitPlan {
  std::uint64_t seed = 0;
  std::size_t n_repeats = 30;
  std::array<double, 3> fractions = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  void validate() const;  // throws ConfigError
};

struct Split {
  std::vector<std::size_t> train, validation, test;
};

// Partition of [0, n) for the given repeat; deterministic in (seed, repeat).
Split make_split(std::size_t n, const SplitPlan& plan, std::size_t repeat);

// ---- grid search -----------------------------------------------------------

struct GridPoint {
  Hyperparams hyperparams;
  double validation_median = 0.0;
};

struct GridSearchResult {
  Hyperparams best;
  double best_median = 0.0;
  std::vector<GridPoint> evaluated;  // every point, enumeration order
};

// Returns the point with the smallest median validation angular error; ties
// go to smaller C, then smaller gamma, then larger epsilon. Throws
// ConfigError on an empty grid.
GridSearchResult grid_search(std::span<const LabeledSample> train,
                             std::span<const LabeledSample> validation,
                             ModelKind kind, const HyperparamGrid& grid,
                             const SolverOptions& options = {});

// ---- augmentation ----------------------------------------------------------

inline constexpr std::size_t kAugmentResizeMaxSide = 1000;

// Resizes so that max(w, h) == resize_max_side, then crops n random
// size x size patches. Deterministic in seed.
std::vector<LinearImage> augment_random_patches(
    const LinearImage& image, std::size_t n, std::size_t size = kCnnInputSize,
    std::uint64_t seed = 0,
    std::size_t resize_max_side = kAugmentResizeMaxSide);

// All size x size windows at multiples of stride that fit inside the image.
std::vector<LinearImage> augment_sliding_window(
    const LinearImage& image, std::size_t size = kCnnInputSize,
    std::size_t stride = kCnnInputSize);

struct LabeledPatch {
  std::string parent_id;
  LinearImage image;
  Illuminant ground_truth;
};

struct AugmentationConfig {
  enum class Kind { kNone, kRandom, kSliding } kind = Kind::kNone;
  std::size_t count = 10;  // random patches per image
  std::size_t size = kCnnInputSize;
  std::size_t stride = kCnnInputSize;
  std::size_t resize_max_side = kAugmentResizeMaxSide;
};

// "none", "random[:N]" or "sliding[:STRIDE]". Throws UsageError.
AugmentationConfig parse_augmentation(std::string_view spec);

// Patches of one labeled image; each inherits the parent's ground truth.
std::vector<LabeledPatch> augment(const std::string& image_id,
                                  const LinearImage& image,
                                  const Illuminant& ground_truth,
                                  const AugmentationConfig& config,
                                  std::uint64_t seed);

// ---- protocol --------------------------------------------------------------

// Everything the protocol needs about a dataset, index-aligned. `images` is
// required for non-learning estimators and for augmentation; `features` for
// learning estimators without augmentation.
struct EvaluationData {
  std::string name;
  std::vector<std::string> ids;
  std::vector<Illuminant> ground_truth;
  std::vector<LinearImage> images;
  std::vector<FeatureVector> features;
  int histogram_bins = kDefaultHistogramBins;
};

// Loads the images (when need_images) and features for every manifest entry.
// Throws ManifestError when the feature file does not cover the manifest.
EvaluationData load_evaluation_data(const DatasetManifest& manifest,
                                    const FeatureSource& source,
                                    bool need_images, bool need_features);

enum class Aggregation { kMeanOfRepeats, kPooled };

struct ErrorStats {
  double min = 0.0, median = 0.0, mean = 0.0, max = 0.0;
  bool operator==(const ErrorStats&) const = default;
};

ErrorStats summarize(std::span<const double> errors);

struct RepeatResult {
  std::size_t index = 0;
  std::vector<std::string> test_ids;
  std::vector<double> errors;  // degrees, aligned with test_ids
  ErrorStats stats;
  std::optional<Hyperparams> chosen;
  // Test images whose raw prediction had no positive component; scored
  // against the neutral illuminant.
  std::size_t invalid_predictions = 0;
};

struct EvaluationReport {
  std::string estimator;
  std::string dataset;
  SplitPlan plan;
  Aggregation aggregation = Aggregation::kMeanOfRepeats;
  std::vector<RepeatResult> repeats;
  ErrorStats mean_of_repeats;  // each statistic averaged across repeats
  ErrorStats pooled;           // statistics of all errors pooled
  const ErrorStats& headline() const {
    return aggregation == Aggregation::kPooled ? pooled : mean_of_repeats;
  }
};

struct ProtocolOptions {
  SplitPlan plan;
  Aggregation aggregation = Aggregation::kMeanOfRepeats;
  AugmentationConfig augmentation;
  SolverOptions solver;
};

// Per repeat: split, tune on validation (grid search unless hyperparameters
// are fixed), train on the training split, score the test split. Throws
// ProtocolError with fewer than 3 samples.
EvaluationReport run_protocol(const EvaluationData& data,
                              const EstimatorConfig& estimator,
                              const ProtocolOptions& options);

EvaluationReport run_protocol(const DatasetManifest& manifest,
                              const EstimatorConfig& estimator,
                              const SplitPlan& plan,
                              const FeatureSource& source = {});

// Recomputes the per-repeat and cross-repeat aggregates from the stored
// errors; true when every value matches within tolerance.
bool aggregates_consistent(const EvaluationReport& report,
                           double tolerance = 1e-9);

nlohmann::json report_to_json(const EvaluationReport& report);
nlohmann::json reports_to_json(const std::vector<EvaluationReport>& reports);

// Method | Median | Mean | Max table, one row per report.
std::string format_table(const std::vector<EvaluationReport>& reports);

}  // namespace illumkit
