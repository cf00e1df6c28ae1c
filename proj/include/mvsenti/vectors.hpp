#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "mvsenti/errors.hpp"

namespace mvsenti {

/// Sparse feature vector: entries strictly ascending by index, no stored zeros.
struct SparseVector {
  struct Entry {
    std::uint32_t index;
    double value;
  };
  std::vector<Entry> entries;
  std::size_t dim = 0;
};

using DenseVector = std::vector<double>;

inline std::size_t feature_dim(const SparseVector& x) { return x.dim; }
inline std::size_t feature_dim(const DenseVector& x) { return x.size(); }

inline double dot(const DenseVector& w, const SparseVector& x) {
  if (x.dim != w.size())
    raise(Errc::DimensionMismatch, "sparse vector dim " + std::to_string(x.dim) +
                                       " vs weights " + std::to_string(w.size()));
  double acc = 0.0;
  for (const auto& e : x.entries) acc += w[e.index] * e.value;
  return acc;
}

inline double dot(const DenseVector& w, const DenseVector& x) {
  if (x.size() != w.size())
    raise(Errc::DimensionMismatch, "dense vector dim " + std::to_string(x.size()) +
                                       " vs weights " + std::to_string(w.size()));
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * x[i];
  return acc;
}

/// w += s * x
inline void add_scaled(DenseVector& w, const SparseVector& x, double s) {
  for (const auto& e : x.entries) w[e.index] += s * e.value;
}

inline void add_scaled(DenseVector& w, const DenseVector& x, double s) {
  for (std::size_t i = 0; i < x.size(); ++i) w[i] += s * x[i];
}

inline double squared_norm(const DenseVector& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

inline double l2_norm(const SparseVector& v) {
  double acc = 0.0;
  for (const auto& e : v.entries) acc += e.value * e.value;
  return std::sqrt(acc);
}

}  // namespace mvsenti
