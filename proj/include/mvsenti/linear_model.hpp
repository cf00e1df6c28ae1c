#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mvsenti/vectors.hpp"

namespace mvsenti {

enum class LossKind { Hinge, Logistic };

/// Hyperparameters of the averaged-SGD solver. regularization_c is the
/// inverse regularization strength; the per-sample penalty weight is
/// 1/(regularization_c * n).
struct TrainConfig {
  double regularization_c = 1.0;
  std::size_t max_epochs = 200;
  double tolerance = 1e-6;
  double eta0 = 0.1;
  std::uint64_t seed = 0;
};

/// Numerically stable logistic function.
double sigmoid(double x);

/// Per-sample loss at decision value z with label y in {-1, +1}.
double point_loss(LossKind loss, double y, double z);

struct BinaryLinearModel {
  DenseVector weights;
  double bias = 0.0;
  LossKind loss = LossKind::Hinge;

  double decision_value(const SparseVector& x) const;
  double decision_value(const DenseVector& x) const;
};

/// sigmoid(w.x + b): probability of the +1 class under a logistic model.
double predict_proba_logistic(const BinaryLinearModel& model,
                              const SparseVector& x);
double predict_proba_logistic(const BinaryLinearModel& model,
                              const DenseVector& x);

/// Trains w, b by minimizing (1/(2C))|w|^2 + sum_i loss(y_i, w.x_i + b)
/// with averaged SGD: eta_t = eta0 / (1 + eta0*lambda*t), lambda = 1/(C*n),
/// bias unregularized, Polyak averaging from the first step, deterministic
/// per-epoch shuffling from cfg.seed. Training labels are +1/-1.
BinaryLinearModel fit_binary(const std::vector<SparseVector>& xs,
                             const std::vector<int>& y, LossKind loss,
                             const TrainConfig& cfg);
BinaryLinearModel fit_binary(const std::vector<DenseVector>& xs,
                             const std::vector<int>& y, LossKind loss,
                             const TrainConfig& cfg);

/// Full objective in sum form, (1/(2C))|w|^2 + sum_i loss_i. This is the
/// quantity whose epoch-over-epoch decrease drives the stopping rule.
double binary_objective(const std::vector<SparseVector>& xs,
                        const std::vector<int>& y, const DenseVector& w,
                        double bias, double C, LossKind loss);
double binary_objective(const std::vector<DenseVector>& xs,
                        const std::vector<int>& y, const DenseVector& w,
                        double bias, double C, LossKind loss);

/// Analytic gradient of binary_objective with respect to (w, bias).
std::pair<DenseVector, double> binary_objective_gradient(
    const std::vector<SparseVector>& xs, const std::vector<int>& y,
    const DenseVector& w, double bias, double C, LossKind loss);
std::pair<DenseVector, double> binary_objective_gradient(
    const std::vector<DenseVector>& xs, const std::vector<int>& y,
    const DenseVector& w, double bias, double C, LossKind loss);

/// Maps a decision value to a probability as 1 / (1 + exp(a*s + b)).
struct PlattCalibration {
  double a = 0.0;
  double b = 0.0;

  double probability(double score) const { return sigmoid(-(a * score + b)); }
};

/// Smoothed cross-entropy targets: (N+ + 1)/(N+ + 2) for positives,
/// 1/(N- + 2) for negatives.
std::vector<double> platt_targets(const std::vector<int>& y);

/// Negative log likelihood of the calibration against the targets.
double platt_objective(const std::vector<double>& scores,
                       const std::vector<double>& targets, double a, double b);

/// Gradient of platt_objective with respect to (a, b).
std::pair<double, double> platt_gradient(const std::vector<double>& scores,
                                         const std::vector<double>& targets,
                                         double a, double b);

/// Fits the calibration by full-batch gradient descent with Armijo
/// backtracking. Deterministic; init a = 0, b = ln((N- + 1)/(N+ + 1)).
PlattCalibration fit_platt(const std::vector<double>& scores,
                           const std::vector<int>& y);

enum class MulticlassStrategy { OneVsRest, OneVsOne };

/// One trained binary subproblem. negative_class is -1 for a
/// one-vs-rest unit. Hinge units carry a Platt calibration fitted on
/// their own training decision values; logistic units map scores through
/// the plain sigmoid.
struct BinaryUnit {
  BinaryLinearModel model;
  std::optional<PlattCalibration> platt;
  int positive_class = 0;
  int negative_class = -1;
};

struct MulticlassModel {
  MulticlassStrategy strategy = MulticlassStrategy::OneVsRest;
  LossKind loss = LossKind::Hinge;
  std::size_t n_classes = 0;
  std::size_t feature_dim = 0;
  std::vector<BinaryUnit> units;

  /// Probability distribution over the n_classes classes. One-vs-rest
  /// normalizes the per-class scores by their sum (uniform when the sum
  /// is zero); one-vs-one couples pairwise probabilities as
  /// score_i = (2/(k(k-1))) * sum_{j != i} p_ij with p_ji = 1 - p_ij.
  DenseVector predict_proba(const SparseVector& x) const;
  DenseVector predict_proba(const DenseVector& x) const;
};

/// Labels are class indices in [0, n_classes); every class must appear.
MulticlassModel fit_multiclass(const std::vector<SparseVector>& xs,
                               const std::vector<int>& labels,
                               std::size_t n_classes,
                               MulticlassStrategy strategy, LossKind loss,
                               const TrainConfig& cfg);
MulticlassModel fit_multiclass(const std::vector<DenseVector>& xs,
                               const std::vector<int>& labels,
                               std::size_t n_classes,
                               MulticlassStrategy strategy, LossKind loss,
                               const TrainConfig& cfg);

}  // namespace mvsenti
