#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "illumkit/core.hpp"

namespace illumkit {

enum class KernelKind { kLinear, kRbf };

struct KernelSpec {
  KernelKind kind = KernelKind::kLinear;
  double gamma = 1.0;  // rbf only

  static KernelSpec linear() { return {KernelKind::kLinear, 1.0}; }
  static KernelSpec rbf(double gamma) { return {KernelKind::kRbf, gamma}; }

  void validate() const;
  bool operator==(const KernelSpec&) const = default;
};

// RR / SVR: three independent single-output machines, one per channel.
// MRR / MSVR: one joint machine over the RGB target.
enum class ModelKind { kRR, kSVR, kMRR, kMSVR };

std::string_view to_string(ModelKind kind);
// Accepts "rr", "svr", "mrr", "msvr" (case-insensitive). Throws UsageError.
ModelKind parse_model_kind(std::string_view name);

inline bool uses_epsilon(ModelKind k) {
  return k == ModelKind::kSVR || k == ModelKind::kMSVR;
}

struct Hyperparams {
  double C = 1.0;
  double epsilon = 0.0;  // SVR / MSVR only
  KernelSpec kernel;

  bool operator==(const Hyperparams&) const = default;
};

// IRWLS stopping rule and line search budget.
struct SolverOptions {
  double relative_tolerance = 1e-8;
  int max_iterations = 500;
  int max_halvings = 30;
};

struct FitInfo {
  bool converged = true;
  int iterations = 0;
  // Objective after initialization and after every accepted iteration.
  std::vector<double> objective;
};

// Trained kernel machine in dual form:
//   F(x) = sum_i k(x_i, x) * dual_weights.row(i) + bias.
class RegressionModel {
 public:
  RegressionModel(ModelKind kind, Hyperparams hyperparams,
                  std::string feature_tag, Eigen::MatrixXd training_inputs,
                  Eigen::MatrixXd dual_weights, Eigen::RowVector3d bias,
                  FitInfo fit);

  ModelKind kind() const { return kind_; }
  const Hyperparams& hyperparams() const { return hyperparams_; }
  const KernelSpec& kernel() const { return hyperparams_.kernel; }
  const std::string& feature_tag() const { return feature_tag_; }
  const Eigen::MatrixXd& training_inputs() const { return inputs_; }
  const Eigen::MatrixXd& dual_weights() const { return weights_; }
  const Eigen::RowVector3d& bias() const { return bias_; }
  const FitInfo& fit_info() const { return fit_; }
  std::size_t dimension() const { return std::size_t(inputs_.cols()); }

  // Number of training inputs with a non-zero dual weight row.
  std::size_t support_vector_count() const;

  // F(x) before clamping and normalization.
  Rgb predict_raw(const FeatureVector& features) const;
  Rgb predict_raw(std::span<const double> features) const;

  // Clamp F(x) to non-negative, then normalize.
  Illuminant predict(const FeatureVector& features) const;

 private:
  ModelKind kind_;
  Hyperparams hyperparams_;
  std::string feature_tag_;
  Eigen::MatrixXd inputs_;
  Eigen::MatrixXd weights_;
  Eigen::RowVector3d bias_;
  FitInfo fit_;
};

// Clamp to non-negative and normalize. Throws InvalidIlluminantError when
// nothing positive remains.
Illuminant illuminant_from_raw(const Rgb& raw);

RegressionModel train_mrr(std::span<const LabeledSample> samples, double C,
                          const KernelSpec& kernel);
RegressionModel train_rr(std::span<const LabeledSample> samples, double C,
                         const KernelSpec& kernel);
RegressionModel train_msvr(std::span<const LabeledSample> samples, double C,
                           double epsilon, const KernelSpec& kernel,
                           const SolverOptions& options = {});
RegressionModel train_svr(std::span<const LabeledSample> samples, double C,
                          double epsilon, const KernelSpec& kernel,
                          const SolverOptions& options = {});

RegressionModel train(ModelKind kind, std::span<const LabeledSample> samples,
                      const Hyperparams& hyperparams,
                      const SolverOptions& options = {});

// "ILKMDL1" container; see docs/formats.md.
std::vector<char> serialize_model(const RegressionModel& model);
RegressionModel parse_model(std::string_view bytes);
void save_model(const RegressionModel& model,
                const std::filesystem::path& path);
RegressionModel load_model(const std::filesystem::path& path);

namespace detail {

// Row-major stacking of feature vectors (N x d) and targets (N x 3).
Eigen::MatrixXd stack_features(std::span<const LabeledSample> samples);
Eigen::MatrixXd stack_targets(std::span<const LabeledSample> samples);

// Pairwise dot products / squared distances between rows of a and b.
Eigen::MatrixXd dot_products(const Eigen::MatrixXd& a,
                             const Eigen::MatrixXd& b);
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a,
                                  const Eigen::MatrixXd& b);

// exp(-gamma * d2), with underflowed entries set to exactly zero.
Eigen::MatrixXd rbf_from_distances(const Eigen::MatrixXd& sq_dist,
                                   double gamma);

Eigen::MatrixXd gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                     const KernelSpec& kernel);

struct DualSolution {
  Eigen::MatrixXd weights;  // N x m
  Eigen::RowVectorXd bias;  // m
  FitInfo fit;
};

// 1/2 tr(A' K A) + C sum_i ||y_i - K_i A - b||^2
double ridge_objective(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Y,
                       const Eigen::MatrixXd& A, const Eigen::RowVectorXd& b,
                       double C);

// 1/2 tr(A' K A) + C sum_i max(0, ||y_i - K_i A - b|| - eps)^2
double tube_objective(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Y,
                      const Eigen::MatrixXd& A, const Eigen::RowVectorXd& b,
                      double C, double epsilon);

// Exact minimizer of ridge_objective with an unregularized bias.
DualSolution solve_ridge(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Y,
                         double C);

// Minimizer of tube_objective by iteratively reweighted least squares with a
// backtracking line search. With m = 1 this is the scalar-tube SVR.
DualSolution solve_tube(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Y,
                        double C, double epsilon,
                        const SolverOptions& options);

// Dispatches to solve_ridge / solve_tube, per channel for RR and SVR.
DualSolution fit_dual(ModelKind kind, const Eigen::MatrixXd& K,
                      const Eigen::MatrixXd& Y, const Hyperparams& hyperparams,
                      const SolverOptions& options);

// Trains from a precomputed Gram matrix; `inputs` are stored in the model.
RegressionModel train_from_gram(ModelKind kind, const Eigen::MatrixXd& K,
                                const Eigen::MatrixXd& Y,
                                const Hyperparams& hyperparams,
                                const SolverOptions& options,
                                Eigen::MatrixXd inputs,
                                std::string feature_tag);

}  // namespace detail

}  // namespace illumkit
