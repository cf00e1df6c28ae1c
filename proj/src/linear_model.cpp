#include "mvsenti/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mvsenti/errors.hpp"
#include "mvsenti/rng.hpp"

namespace mvsenti {

double sigmoid(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double point_loss(LossKind loss, double y, double z) {
  const double m = -y * z;
  if (loss == LossKind::Hinge) return std::max(0.0, 1.0 + m);
  // log(1 + exp(m)) without overflow
  return m > 0.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
}

double BinaryLinearModel::decision_value(const SparseVector& x) const {
  return dot(weights, x) + bias;
}

double BinaryLinearModel::decision_value(const DenseVector& x) const {
  return dot(weights, x) + bias;
}

double predict_proba_logistic(const BinaryLinearModel& model,
                              const SparseVector& x) {
  return sigmoid(model.decision_value(x));
}

double predict_proba_logistic(const BinaryLinearModel& model,
                              const DenseVector& x) {
  return sigmoid(model.decision_value(x));
}

namespace {

template <class X>
void check_training_input(const std::vector<X>& xs, const std::vector<int>& y) {
  if (xs.empty()) raise(Errc::EmptyInput, "no training samples");
  if (xs.size() != y.size()) {
    raise(Errc::LengthMismatch, std::to_string(xs.size()) + " samples vs " +
                                    std::to_string(y.size()) + " labels");
  }
  const std::size_t dim = feature_dim(xs[0]);
  if (dim == 0) raise(Errc::DimensionZero, "training features have dim 0");
  for (const auto& x : xs) {
    if (feature_dim(x) != dim) {
      raise(Errc::DimensionMismatch,
            "inconsistent feature dims " + std::to_string(dim) + " vs " +
                std::to_string(feature_dim(x)));
    }
  }
  bool pos = false, neg = false;
  for (int yi : y) {
    if (yi == 1) pos = true;
    else if (yi == -1) neg = true;
    else raise(Errc::UnknownLabel, "binary label must be +1 or -1, got " + std::to_string(yi));
  }
  if (!pos || !neg) {
    raise(Errc::SingleClassInput, "training labels are all " +
                                      std::string(pos ? "+1" : "-1"));
  }
}

template <class X>
double objective_impl(const std::vector<X>& xs, const std::vector<int>& y,
                      const DenseVector& w, double bias, double C,
                      LossKind loss) {
  double total = squared_norm(w) / (2.0 * C);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    total += point_loss(loss, y[i], dot(w, xs[i]) + bias);
  }
  return total;
}

template <class X>
std::pair<DenseVector, double> gradient_impl(const std::vector<X>& xs,
                                             const std::vector<int>& y,
                                             const DenseVector& w, double bias,
                                             double C, LossKind loss) {
  DenseVector grad(w.size());
  for (std::size_t d = 0; d < w.size(); ++d) grad[d] = w[d] / C;
  double grad_b = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double yi = y[i];
    const double z = dot(w, xs[i]) + bias;
    double coef = 0.0;
    if (loss == LossKind::Hinge) {
      if (yi * z < 1.0) coef = -yi;  // subgradient; zero at the kink
    } else {
      coef = -yi * sigmoid(-yi * z);
    }
    if (coef != 0.0) {
      add_scaled(grad, xs[i], coef);
      grad_b += coef;
    }
  }
  return {std::move(grad), grad_b};
}

/// Averaged SGD with the scalar-scaling trick: the live iterate is
/// w = scale * v, and the running sum of past iterates is kept lazily as
/// sum_w = zvec + rsum * v, so each step costs O(nnz).
template <class X>
BinaryLinearModel fit_impl(const std::vector<X>& xs, const std::vector<int>& y,
                           LossKind loss, const TrainConfig& cfg) {
  check_training_input(xs, y);
  const std::size_t n = xs.size();
  const std::size_t dim = feature_dim(xs[0]);
  const double lambda = 1.0 / (cfg.regularization_c * static_cast<double>(n));

  DenseVector v(dim, 0.0);
  double scale = 1.0;
  double bias = 0.0;

  DenseVector zvec(dim, 0.0);
  double rsum = 0.0;
  double bias_sum = 0.0;
  std::uint64_t steps = 0;

  DenseVector wbar(dim, 0.0);
  double bbar = 0.0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(cfg.seed);

  double t = 0.0;
  double prev_obj = std::numeric_limits<double>::infinity();
  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      const X& x = xs[idx];
      const double yi = y[idx];
      const double z = scale * dot(v, x) + bias;
      const double eta = cfg.eta0 / (1.0 + cfg.eta0 * lambda * t);
      double factor = 1.0 - eta * lambda;
      if (factor < 1e-9) factor = 1e-9;  // only reachable with C*n <= eta0
      scale *= factor;
      double g = 0.0;
      if (loss == LossKind::Hinge) {
        if (yi * z < 1.0) g = eta * yi;
      } else {
        g = eta * yi * sigmoid(-yi * z);
      }
      if (g != 0.0) {
        add_scaled(zvec, x, -rsum * g / scale);
        add_scaled(v, x, g / scale);
        bias += g;
      }
      rsum += scale;
      bias_sum += bias;
      ++steps;
      t += 1.0;
      if (scale < 1e-6) {
        for (double& c : v) c *= scale;
        rsum /= scale;
        scale = 1.0;
      }
    }
    const double inv_steps = 1.0 / static_cast<double>(steps);
    for (std::size_t d = 0; d < dim; ++d) {
      wbar[d] = (zvec[d] + rsum * v[d]) * inv_steps;
    }
    bbar = bias_sum * inv_steps;
    const double obj = objective_impl(xs, y, wbar, bbar, cfg.regularization_c, loss);
    if (prev_obj - obj < cfg.tolerance) break;
    prev_obj = obj;
  }

  BinaryLinearModel model;
  model.weights = std::move(wbar);
  model.bias = bbar;
  model.loss = loss;
  return model;
}

}  // namespace

BinaryLinearModel fit_binary(const std::vector<SparseVector>& xs,
                             const std::vector<int>& y, LossKind loss,
                             const TrainConfig& cfg) {
  return fit_impl(xs, y, loss, cfg);
}

BinaryLinearModel fit_binary(const std::vector<DenseVector>& xs,
                             const std::vector<int>& y, LossKind loss,
                             const TrainConfig& cfg) {
  return fit_impl(xs, y, loss, cfg);
}

double binary_objective(const std::vector<SparseVector>& xs,
                        const std::vector<int>& y, const DenseVector& w,
                        double bias, double C, LossKind loss) {
  return objective_impl(xs, y, w, bias, C, loss);
}

double binary_objective(const std::vector<DenseVector>& xs,
                        const std::vector<int>& y, const DenseVector& w,
                        double bias, double C, LossKind loss) {
  return objective_impl(xs, y, w, bias, C, loss);
}

std::pair<DenseVector, double> binary_objective_gradient(
    const std::vector<SparseVector>& xs, const std::vector<int>& y,
    const DenseVector& w, double bias, double C, LossKind loss) {
  return gradient_impl(xs, y, w, bias, C, loss);
}

std::pair<DenseVector, double> binary_objective_gradient(
    const std::vector<DenseVector>& xs, const std::vector<int>& y,
    const DenseVector& w, double bias, double C, LossKind loss) {
  return gradient_impl(xs, y, w, bias, C, loss);
}

std::vector<double> platt_targets(const std::vector<int>& y) {
  double n_pos = 0.0, n_neg = 0.0;
  for (int yi : y) (yi == 1 ? n_pos : n_neg) += 1.0;
  const double t_pos = (n_pos + 1.0) / (n_pos + 2.0);
  const double t_neg = 1.0 / (n_neg + 2.0);
  std::vector<double> targets(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    targets[i] = y[i] == 1 ? t_pos : t_neg;
  }
  return targets;
}

double platt_objective(const std::vector<double>& scores,
                       const std::vector<double>& targets, double a, double b) {
  // Cross entropy written via point_loss for stability: with p = sigmoid(-z),
  // -[t log p + (1-t) log(1-p)] = t*softplus(z) + (1-t)*softplus(-z).
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double z = a * scores[i] + b;
    const double t = targets[i];
    total += t * point_loss(LossKind::Logistic, 1.0, -z) +
             (1.0 - t) * point_loss(LossKind::Logistic, -1.0, -z);
  }
  return total;
}

std::pair<double, double> platt_gradient(const std::vector<double>& scores,
                                         const std::vector<double>& targets,
                                         double a, double b) {
  double ga = 0.0, gb = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double z = a * scores[i] + b;
    const double p = sigmoid(-z);
    const double dz = targets[i] - p;
    ga += dz * scores[i];
    gb += dz;
  }
  return {ga, gb};
}

PlattCalibration fit_platt(const std::vector<double>& scores,
                           const std::vector<int>& y) {
  if (scores.empty()) raise(Errc::EmptyInput, "no scores to calibrate");
  if (scores.size() != y.size()) {
    raise(Errc::LengthMismatch, std::to_string(scores.size()) + " scores vs " +
                                    std::to_string(y.size()) + " labels");
  }
  double n_pos = 0.0, n_neg = 0.0;
  for (int yi : y) {
    if (yi == 1) n_pos += 1.0;
    else if (yi == -1) n_neg += 1.0;
    else raise(Errc::UnknownLabel, "binary label must be +1 or -1, got " + std::to_string(yi));
  }
  if (n_pos == 0.0 || n_neg == 0.0) {
    raise(Errc::SingleClassInput, "calibration needs both classes");
  }

  const std::vector<double> targets = platt_targets(y);
  double a = 0.0;
  double b = std::log((n_neg + 1.0) / (n_pos + 1.0));

  constexpr double kTolerance = 1e-8;
  constexpr std::size_t kMaxIters = 100000;
  constexpr double kArmijo = 1e-4;
  double step = 1.0;
  double value = platt_objective(scores, targets, a, b);
  for (std::size_t iter = 0; iter < kMaxIters; ++iter) {
    auto [ga, gb] = platt_gradient(scores, targets, a, b);
    if (std::max(std::abs(ga), std::abs(gb)) < kTolerance) break;
    const double gsq = ga * ga + gb * gb;
    bool moved = false;
    while (step > 1e-18) {
      const double na = a - step * ga;
      const double nb = b - step * gb;
      const double nv = platt_objective(scores, targets, na, nb);
      if (nv <= value - kArmijo * step * gsq) {
        a = na;
        b = nb;
        value = nv;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    step = std::min(step * 2.0, 1.0);
  }
  return PlattCalibration{a, b};
}

namespace {

double unit_probability(const BinaryUnit& unit, double decision) {
  if (unit.platt) return unit.platt->probability(decision);
  return sigmoid(decision);
}

template <class X>
DenseVector predict_proba_impl(const MulticlassModel& model, const X& x) {
  if (feature_dim(x) != model.feature_dim) {
    raise(Errc::DimensionMismatch,
          "input dim " + std::to_string(feature_dim(x)) + " vs model dim " +
              std::to_string(model.feature_dim));
  }
  const std::size_t k = model.n_classes;
  DenseVector score(k, 0.0);
  if (model.strategy == MulticlassStrategy::OneVsRest) {
    for (const auto& unit : model.units) {
      score[unit.positive_class] =
          unit_probability(unit, unit.model.decision_value(x));
    }
  } else {
    for (const auto& unit : model.units) {
      const double p = unit_probability(unit, unit.model.decision_value(x));
      score[unit.positive_class] += p;
      score[unit.negative_class] += 1.0 - p;
    }
    const double pair_scale = 2.0 / (static_cast<double>(k) * (k - 1.0));
    for (double& s : score) s *= pair_scale;
  }
  double total = 0.0;
  for (double s : score) total += s;
  if (total <= 0.0) {
    std::fill(score.begin(), score.end(), 1.0 / static_cast<double>(k));
  } else {
    for (double& s : score) s /= total;
  }
  return score;
}

template <class X>
MulticlassModel fit_multiclass_impl(const std::vector<X>& xs,
                                    const std::vector<int>& labels,
                                    std::size_t n_classes,
                                    MulticlassStrategy strategy, LossKind loss,
                                    const TrainConfig& cfg) {
  if (n_classes < 2) raise(Errc::SingleClassInput, "need at least 2 classes");
  if (xs.empty()) raise(Errc::EmptyInput, "no training samples");
  if (xs.size() != labels.size()) {
    raise(Errc::LengthMismatch, std::to_string(xs.size()) + " samples vs " +
                                    std::to_string(labels.size()) + " labels");
  }
  std::vector<std::size_t> per_class(n_classes, 0);
  for (int c : labels) {
    if (c < 0 || static_cast<std::size_t>(c) >= n_classes) {
      raise(Errc::UnknownLabel, "class index " + std::to_string(c) +
                                    " outside [0, " + std::to_string(n_classes) + ")");
    }
    per_class[c] += 1;
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (per_class[c] == 0) {
      raise(Errc::MissingClass,
            "class " + std::to_string(c) + " has no training examples");
    }
  }

  MulticlassModel model;
  model.strategy = strategy;
  model.loss = loss;
  model.n_classes = n_classes;
  model.feature_dim = feature_dim(xs[0]);

  auto train_unit = [&](const std::vector<X>& sub_x, const std::vector<int>& sub_y,
                        int pos, int neg) {
    BinaryUnit unit;
    unit.model = fit_binary(sub_x, sub_y, loss, cfg);
    unit.positive_class = pos;
    unit.negative_class = neg;
    if (loss == LossKind::Hinge) {
      std::vector<double> decisions(sub_x.size());
      for (std::size_t i = 0; i < sub_x.size(); ++i) {
        decisions[i] = unit.model.decision_value(sub_x[i]);
      }
      unit.platt = fit_platt(decisions, sub_y);
    }
    model.units.push_back(std::move(unit));
  };

  if (strategy == MulticlassStrategy::OneVsRest) {
    std::vector<int> y(labels.size());
    for (std::size_t c = 0; c < n_classes; ++c) {
      for (std::size_t i = 0; i < labels.size(); ++i) {
        y[i] = labels[i] == static_cast<int>(c) ? 1 : -1;
      }
      train_unit(xs, y, static_cast<int>(c), -1);
    }
  } else {
    for (std::size_t i = 0; i < n_classes; ++i) {
      for (std::size_t j = i + 1; j < n_classes; ++j) {
        std::vector<X> sub_x;
        std::vector<int> sub_y;
        for (std::size_t s = 0; s < labels.size(); ++s) {
          if (labels[s] == static_cast<int>(i)) {
            sub_x.push_back(xs[s]);
            sub_y.push_back(1);
          } else if (labels[s] == static_cast<int>(j)) {
            sub_x.push_back(xs[s]);
            sub_y.push_back(-1);
          }
        }
        train_unit(sub_x, sub_y, static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  return model;
}

}  // namespace

DenseVector MulticlassModel::predict_proba(const SparseVector& x) const {
  return predict_proba_impl(*this, x);
}

DenseVector MulticlassModel::predict_proba(const DenseVector& x) const {
  return predict_proba_impl(*this, x);
}

MulticlassModel fit_multiclass(const std::vector<SparseVector>& xs,
                               const std::vector<int>& labels,
                               std::size_t n_classes,
                               MulticlassStrategy strategy, LossKind loss,
                               const TrainConfig& cfg) {
  return fit_multiclass_impl(xs, labels, n_classes, strategy, loss, cfg);
}

MulticlassModel fit_multiclass(const std::vector<DenseVector>& xs,
                               const std::vector<int>& labels,
                               std::size_t n_classes,
                               MulticlassStrategy strategy, LossKind loss,
                               const TrainConfig& cfg) {
  return fit_multiclass_impl(xs, labels, n_classes, strategy, loss, cfg);
}

}  // namespace mvsenti
