#include "illumkit/regression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "binary_io.hpp"
#include "illumkit/error.hpp"
#include "illumkit/fileutil.hpp"

namespace illumkit {

void KernelSpec::validate() const {
  if (kind == KernelKind::kRbf && !(gamma > 0.0 && std::isfinite(gamma)))
    throw InputError("rbf gamma must be finite and positive");
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kRR: return "rr";
    case ModelKind::kSVR: return "svr";
    case ModelKind::kMRR: return "mrr";
    case ModelKind::kMSVR: return "msvr";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "rr") return ModelKind::kRR;
  if (lower == "svr") return ModelKind::kSVR;
  if (lower == "mrr") return ModelKind::kMRR;
  if (lower == "msvr") return ModelKind::kMSVR;
  throw UsageError("unknown model kind '" + std::string(name) + "'");
}

RegressionModel::RegressionModel(ModelKind kind, Hyperparams hyperparams,
                                 std::string feature_tag,
                                 Eigen::MatrixXd training_inputs,
                                 Eigen::MatrixXd dual_weights,
                                 Eigen::RowVector3d bias, FitInfo fit)
    : kind_(kind),
      hyperparams_(hyperparams),
      feature_tag_(std::move(feature_tag)),
      inputs_(std::move(training_inputs)),
      weights_(std::move(dual_weights)),
      bias_(bias),
      fit_(std::move(fit)) {
  hyperparams_.kernel.validate();
  if (weights_.rows() != inputs_.rows() || weights_.cols() != 3)
    throw InputError("dual weights must be N x 3 for N stored inputs");
  if (inputs_.rows() == 0 || inputs_.cols() == 0)
    throw InputError("model has no stored inputs");
  if (!inputs_.allFinite() || !weights_.allFinite() || !bias_.allFinite())
    throw InputError("model contains non-finite values");
}

std::size_t RegressionModel::support_vector_count() const {
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < weights_.rows(); ++i)
    if (weights_.row(i).cwiseAbs().maxCoeff() > 0.0) ++n;
  return n;
}

Rgb RegressionModel::predict_raw(std::span<const double> features) const {
  if (features.size() != dimension())
    throw InputError("feature dimension " + std::to_string(features.size()) +
                     " does not match model dimension " +
                     std::to_string(dimension()));
  const Eigen::Map<const Eigen::RowVectorXd> x(features.data(),
                                               Eigen::Index(features.size()));
  const Eigen::MatrixXd k = detail::gram(inputs_, x, hyperparams_.kernel);
  const Eigen::RowVector3d f = k.transpose() * weights_ + bias_;
  return {f[0], f[1], f[2]};
}

Rgb RegressionModel::predict_raw(const FeatureVector& features) const {
  return predict_raw(std::span<const double>(features.values));
}

Illuminant RegressionModel::predict(const FeatureVector& features) const {
  return illuminant_from_raw(predict_raw(features));
}

Illuminant illuminant_from_raw(const Rgb& raw) {
  Rgb clamped = raw;
  for (double& v : clamped) {
    if (!std::isfinite(v))
      throw InvalidIlluminantError("non-finite raw prediction");
    v = std::max(v, 0.0);
  }
  return normalize_illuminant(clamped);
}

namespace detail {

Eigen::MatrixXd stack_features(std::span<const LabeledSample> samples) {
  const std::size_t d = common_dimension(samples);
  Eigen::MatrixXd X(Eigen::Index(samples.size()), Eigen::Index(d));
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t k = 0; k < d; ++k)
      X(Eigen::Index(i), Eigen::Index(k)) = samples[i].features.values[k];
  return X;
}

Eigen::MatrixXd stack_targets(std::span<const LabeledSample> samples) {
  Eigen::MatrixXd Y(Eigen::Index(samples.size()), 3);
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (int c = 0; c < 3; ++c) Y(Eigen::Index(i), c) = samples[i].target[c];
  return Y;
}

Eigen::MatrixXd dot_products(const Eigen::MatrixXd& a,
                             const Eigen::MatrixXd& b) {
  return a * b.transpose();
}

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a,
                                  const Eigen::MatrixXd& b) {
  Eigen::MatrixXd D(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      D(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  return D;
}

Eigen::MatrixXd rbf_from_distances(const Eigen::MatrixXd& sq_dist,
                                   double gamma) {
  Eigen::MatrixXd K = (-gamma * sq_dist.array()).exp().matrix();
  // Subnormal entries change nothing numerically but slow every product.
  K = (K.array() < std::numeric_limits<double>::min()).select(0.0, K);
  return K;
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                     const KernelSpec& kernel) {
  kernel.validate();
  if (a.cols() != b.cols()) throw InputError("kernel dimension mismatch");
  if (kernel.kind == KernelKind::kLinear) return dot_products(a, b);
  return rbf_from_distances(squared_distances(a, b), kernel.gamma);
}

namespace {

double regularizer(const Eigen::MatrixXd& K, const Eigen::MatrixXd& A) {
  return 0.5 * (A.transpose() * K * A).trace();
}

Eigen::MatrixXd residuals(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Y,
                          const Eigen::MatrixXd& A,
                          const Eigen::RowVectorXd& b) {
  return (Y - K * A).rowwise() - b;
}

// Weighted ridge system restricted to the samples with positive weight:
//   (K_SS + diag(1/a_S)) A_S + 1 b = Y_S,   1' A_S = 0.
// Solved through the Schur complement of the positive definite block.
void weighted_ridge(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Y,
                    const std::vector<Eigen::Index>& support,
                    const Eigen::VectorXd& inv_weights, Eigen::MatrixXd& A,
                    Eigen::RowVectorXd& b) {
  const auto s = Eigen::Index(support.size());
  Eigen::MatrixXd M(s, s);
  Eigen::MatrixXd Ys(s, Y.cols());
  for (Eigen::Index i = 0; i < s; ++i) {
    Ys.row(i) = Y.row(support[i]);
    for (Eigen::Index j = 0; j < s; ++j) M(i, j) = K(support[i], support[j]);
    M(i, i) += inv_weights(support[i]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  Eigen::MatrixXd U;
  Eigen::VectorXd v;
  if (llt.info() == Eigen::Success) {
    U = llt.solve(Ys);
    v = llt.solve(Eigen::VectorXd::Ones(s));
  } else {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    U = lu.solve(Ys);
    v = lu.solve(Eigen::VectorXd::Ones(s));
  }
  const double denom = v.sum();
  if (!std::isfinite(denom) || denom == 0.0)
    throw InputError("singular regression system");
  b = U.colwise().sum() / denom;
  const Eigen::MatrixXd As = U - v * b;
  A.setZero(K.rows(), Y.cols());
  for (Eigen::Index i = 0; i < s; ++i) A.row(support[i]) = As.row(i);
}

}  // namespace

double ridge_objective(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Y,
                       const Eigen::MatrixXd& A, const Eigen::RowVectorXd& b,
                       double C) {
  return regularizer(K, A) + C * residuals(K, Y, A, b).squaredNorm();
}

namespace {

// tube_objective given KA = K * A.
double tube_objective_cached(const Eigen::MatrixXd& KA,
                             const Eigen::MatrixXd& Y,
                             const Eigen::MatrixXd& A,
                             const Eigen::RowVectorXd& b, double C,
                             double epsilon) {
  const Eigen::MatrixXd R = (Y - KA).rowwise() - b;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < R.rows(); ++i) {
    const double u = R.row(i).norm();
    if (u >= epsilon) loss += (u - epsilon) * (u - epsilon);
  }
  return 0.5 * A.cwiseProduct(KA).sum() + C * loss;
}

}  // namespace

double tube_objective(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Y,
                      const Eigen::MatrixXd& A, const Eigen::RowVectorXd& b,
                      double C, double epsilon) {
  return tube_objective_cached(K * A, Y, A, b, C, epsilon);
}

DualSolution solve_ridge(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Y,
                         double C) {
  if (!(C > 0.0) || !std::isfinite(C)) throw InputError("C must be positive");
  const Eigen::Index n = K.rows();
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) all[std::size_t(i)] = i;
  const Eigen::VectorXd inv = Eigen::VectorXd::Constant(n, 1.0 / (2.0 * C));
  DualSolution sol;
  weighted_ridge(K, Y, all, inv, sol.weights, sol.bias);
  sol.fit.converged = true;
  sol.fit.iterations = 1;
  sol.fit.objective = {ridge_objective(K, Y, sol.weights, sol.bias, C)};
  return sol;
}

DualSolution solve_tube(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Y,
                        double C, double epsilon,
                        const SolverOptions& options) {
  if (!(C > 0.0) || !std::isfinite(C)) throw InputError("C must be positive");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw InputError("epsilon must be finite and >= 0");
  const Eigen::Index n = K.rows();
  const Eigen::Index m = Y.cols();

  DualSolution sol;
  sol.weights = Eigen::MatrixXd::Zero(n, m);
  sol.bias = Y.colwise().mean();
  double objective = tube_objective(K, Y, sol.weights, sol.bias, C, epsilon);
  sol.fit.objective.push_back(objective);
  sol.fit.converged = false;

  Eigen::VectorXd inv_weights(n);
  Eigen::MatrixXd target_A;
  Eigen::RowVectorXd target_b;
  Eigen::MatrixXd KA = Eigen::MatrixXd::Zero(n, m);
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    sol.fit.iterations = iter;
    const Eigen::MatrixXd R = (Y - KA).rowwise() - sol.bias;
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = R.row(i).norm();
      double a;
      if (epsilon == 0.0) {
        a = 2.0 * C;
      } else {
        a = u > epsilon ? 2.0 * C * (u - epsilon) / u : 0.0;
      }
      if (a > 0.0) {
        support.push_back(i);
        inv_weights(i) = 1.0 / a;
      }
    }

    if (support.empty()) {
      // Every residual is inside the tube: only the regularizer remains.
      target_A = Eigen::MatrixXd::Zero(n, m);
      target_b = sol.bias;
    } else {
      weighted_ridge(K, Y, support, inv_weights, target_A, target_b);
    }

    const Eigen::MatrixXd dA = target_A - sol.weights;
    const Eigen::RowVectorXd db = target_b - sol.bias;
    const Eigen::MatrixXd KdA = K * dA;
    double step = 1.0;
    bool accepted = false;
    Eigen::MatrixXd cand_A, cand_KA;
    Eigen::RowVectorXd cand_b;
    double cand_obj = 0.0;
    for (int h = 0; h <= options.max_halvings; ++h, step *= 0.5) {
      cand_A = sol.weights + step * dA;
      cand_KA = KA + step * KdA;
      cand_b = sol.bias + step * db;
      cand_obj = tube_objective_cached(cand_KA, Y, cand_A, cand_b, C, epsilon);
      if (cand_obj <= objective) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No descent left along the IRWLS direction: stationary up to rounding.
      sol.fit.converged = true;
      break;
    }
    const double change =
        (objective - cand_obj) /
        std::max(std::abs(objective), std::numeric_limits<double>::min());
    sol.weights = std::move(cand_A);
    KA = std::move(cand_KA);
    sol.bias = std::move(cand_b);
    objective = cand_obj;
    sol.fit.objective.push_back(objective);
    if (change < options.relative_tolerance) {
      sol.fit.converged = true;
      break;
    }
  }
  return sol;
}

namespace {

// Runs `solve` on each target column separately and reassembles the result.
// The reported objective is the per-iteration sum across channels.
template <typename Solve>
DualSolution per_channel(const Eigen::MatrixXd& Y, Solve solve) {
  DualSolution out;
  std::vector<DualSolution> parts;
  for (Eigen::Index c = 0; c < Y.cols(); ++c)
    parts.push_back(solve(Eigen::MatrixXd(Y.col(c))));
  out.weights.resize(parts[0].weights.rows(), Y.cols());
  out.bias.resize(Y.cols());
  std::size_t longest = 0;
  for (Eigen::Index c = 0; c < Y.cols(); ++c) {
    const auto& p = parts[std::size_t(c)];
    out.weights.col(c) = p.weights.col(0);
    out.bias(c) = p.bias(0);
    out.fit.converged = out.fit.converged && p.fit.converged;
    out.fit.iterations = std::max(out.fit.iterations, p.fit.iterations);
    longest = std::max(longest, p.fit.objective.size());
  }
  out.fit.objective.assign(longest, 0.0);
  for (const auto& p : parts)
    for (std::size_t k = 0; k < longest; ++k)
      out.fit.objective[k] +=
          p.fit.objective[std::min(k, p.fit.objective.size() - 1)];
  return out;
}

}  // namespace

DualSolution fit_dual(ModelKind kind, const Eigen::MatrixXd& K,
                      const Eigen::MatrixXd& Y, const Hyperparams& hp,
                      const SolverOptions& options) {
  switch (kind) {
    case ModelKind::kMRR:
      return solve_ridge(K, Y, hp.C);
    case ModelKind::kRR:
      return per_channel(Y, [&](const Eigen::MatrixXd& y) {
        return solve_ridge(K, y, hp.C);
      });
    case ModelKind::kMSVR:
      return solve_tube(K, Y, hp.C, hp.epsilon, options);
    case ModelKind::kSVR:
      return per_channel(Y, [&](const Eigen::MatrixXd& y) {
        return solve_tube(K, y, hp.C, hp.epsilon, options);
      });
  }
  throw InputError("unknown model kind");
}

RegressionModel train_from_gram(ModelKind kind, const Eigen::MatrixXd& K,
                                const Eigen::MatrixXd& Y,
                                const Hyperparams& hp,
                                const SolverOptions& options,
                                Eigen::MatrixXd inputs,
                                std::string feature_tag) {
  if (K.rows() < 2) throw InputError("at least 2 training samples required");
  if (K.rows() != K.cols() || K.rows() != Y.rows() || Y.cols() != 3)
    throw InputError("inconsistent training matrices");
  DualSolution sol = fit_dual(kind, K, Y, hp, options);
  Hyperparams stored = hp;
  if (!uses_epsilon(kind)) stored.epsilon = 0.0;
  return RegressionModel(kind, stored, std::move(feature_tag),
                         std::move(inputs), std::move(sol.weights),
                         Eigen::RowVector3d(sol.bias), std::move(sol.fit));
}

}  // namespace detail

RegressionModel train(ModelKind kind, std::span<const LabeledSample> samples,
                      const Hyperparams& hp, const SolverOptions& options) {
  if (samples.size() < 2)
    throw InputError("at least 2 training samples required");
  hp.kernel.validate();
  Eigen::MatrixXd X = detail::stack_features(samples);
  const Eigen::MatrixXd Y = detail::stack_targets(samples);
  const Eigen::MatrixXd K = detail::gram(X, X, hp.kernel);
  return detail::train_from_gram(kind, K, Y, hp, options, std::move(X),
                                 samples.front().features.source_tag);
}

RegressionModel train_mrr(std::span<const LabeledSample> samples, double C,
                          const KernelSpec& kernel) {
  return train(ModelKind::kMRR, samples, {C, 0.0, kernel});
}

RegressionModel train_rr(std::span<const LabeledSample> samples, double C,
                         const KernelSpec& kernel) {
  return train(ModelKind::kRR, samples, {C, 0.0, kernel});
}

RegressionModel train_msvr(std::span<const LabeledSample> samples, double C,
                           double epsilon, const KernelSpec& kernel,
                           const SolverOptions& options) {
  return train(ModelKind::kMSVR, samples, {C, epsilon, kernel}, options);
}

RegressionModel train_svr(std::span<const LabeledSample> samples, double C,
                          double epsilon, const KernelSpec& kernel,
                          const SolverOptions& options) {
  return train(ModelKind::kSVR, samples, {C, epsilon, kernel}, options);
}

// ---- serialization -------------------------------------------------------

namespace {

constexpr std::string_view kModelMagic = "ILKMDL1";
constexpr std::uint32_t kModelVersion = 1;

}  // namespace

std::vector<char> serialize_model(const RegressionModel& model) {
  binio::Writer out;
  out.bytes(kModelMagic);
  out.u32(kModelVersion);
  out.u8(static_cast<std::uint8_t>(model.kind()));
  out.u8(static_cast<std::uint8_t>(model.kernel().kind));
  out.f64(model.kernel().gamma);
  out.f64(model.hyperparams().C);
  out.f64(model.hyperparams().epsilon);
  out.short_string(model.feature_tag(), "feature tag");
  const auto& X = model.training_inputs();
  out.u32(static_cast<std::uint32_t>(X.rows()));
  out.u32(static_cast<std::uint32_t>(X.cols()));
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index k = 0; k < X.cols(); ++k) out.f64(X(i, k));
  const auto& A = model.dual_weights();
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index c = 0; c < 3; ++c) out.f64(A(i, c));
  for (int c = 0; c < 3; ++c) out.f64(model.bias()(c));
  out.u8(model.fit_info().converged ? 1 : 0);
  out.u32(static_cast<std::uint32_t>(model.fit_info().iterations));
  return out.buffer();
}

RegressionModel parse_model(std::string_view bytes) {
  binio::Reader in(bytes);
  if (in.bytes(kModelMagic.size(), "magic") != kModelMagic)
    throw FormatError("bad model magic", 0);
  const auto version_at = in.offset();
  if (in.u32("version") != kModelVersion)
    throw FormatError("unsupported model version", version_at);
  const auto kind_at = in.offset();
  const std::uint8_t kind = in.u8("model kind");
  if (kind > static_cast<std::uint8_t>(ModelKind::kMSVR))
    throw FormatError("unknown model kind", kind_at);
  const auto kernel_at = in.offset();
  const std::uint8_t kernel = in.u8("kernel kind");
  if (kernel > static_cast<std::uint8_t>(KernelKind::kRbf))
    throw FormatError("unknown kernel kind", kernel_at);
  Hyperparams hp;
  hp.kernel.kind = static_cast<KernelKind>(kernel);
  hp.kernel.gamma = in.f64("gamma");
  hp.C = in.f64("C");
  hp.epsilon = in.f64("epsilon");
  std::string tag = in.short_string("feature tag");
  const auto shape_at = in.offset();
  const std::uint32_t n = in.u32("input count");
  const std::uint32_t d = in.u32("dimension");
  if (n == 0 || d == 0) throw FormatError("empty model", shape_at);
  if ((bytes.size() - in.offset()) / 8 < std::uint64_t(n) * (d + 3))
    throw FormatError("truncated model payload", in.offset());
  Eigen::MatrixXd X(n, d);
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index k = 0; k < X.cols(); ++k) X(i, k) = in.f64("input");
  Eigen::MatrixXd A(n, 3);
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index c = 0; c < 3; ++c) A(i, c) = in.f64("dual weight");
  Eigen::RowVector3d b;
  for (int c = 0; c < 3; ++c) b(c) = in.f64("bias");
  FitInfo fit;
  fit.converged = in.u8("converged flag") != 0;
  fit.iterations = static_cast<int>(in.u32("iterations"));
  if (!in.at_end()) throw FormatError("trailing bytes in model", in.offset());
  try {
    return RegressionModel(static_cast<ModelKind>(kind), hp, std::move(tag),
                           std::move(X), std::move(A), b, std::move(fit));
  } catch (const InputError& e) {
    throw FormatError(std::string("invalid model: ") + e.what());
  }
}

void save_model(const RegressionModel& model,
                const std::filesystem::path& path) {
  write_file_atomic(path, serialize_model(model));
}

RegressionModel load_model(const std::filesystem::path& path) {
  return parse_model(read_file(path));
}

}  // namespace illumkit
