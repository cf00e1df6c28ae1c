#pragma once

// Shared helpers for the test binaries: a scratch-directory guard,
// independent oracles (tf-idf, metrics, composition), synthetic data
// generators, a finite-difference gradient checker and a word2vec byte
// builder. Everything here recomputes results with straightforward code so
// the library is checked against a second implementation, not itself.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mvsenti/errors.hpp"
#include "mvsenti/rng.hpp"
#include "mvsenti/tfidf.hpp"
#include "mvsenti/vectors.hpp"

namespace testutil {

/// True when fn throws an Error carrying exactly the wanted code.
inline bool raises(mvsenti::Errc want, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const mvsenti::Error& e) {
    return e.code() == want;
  } catch (...) {
    return false;
  }
  return false;
}

// ---------------------------------------------------------------- scratch

class ScratchDir {
 public:
  ScratchDir() {
    namespace fs = std::filesystem;
    auto base = fs::temp_directory_path();
    auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    for (int i = 0; i < 1000; ++i) {
      fs::path p = base / ("mvsenti_test_" + std::to_string(stamp) + "_" +
                           std::to_string(next_id()));
      std::error_code ec;
      if (fs::create_directory(p, ec)) {
        path_ = p;
        return;
      }
    }
    throw std::runtime_error("cannot create scratch directory");
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const {
    return path_ / name;
  }

 private:
  static int next_id() {
    static int counter = 0;
    return counter++;
  }
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, std::string_view bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write_file failed: " + p.string());
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("read_file failed: " + p.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// ----------------------------------------------------------- tf-idf oracle

struct TfIdfOracleResult {
  std::vector<std::string> vocab;  // sorted, min_df applied
  std::vector<double> idf;
  std::vector<std::vector<double>> rows;  // dense, one per input document
};

/// Straight-line recomputation of the tf-idf pipeline from its definition.
inline TfIdfOracleResult tfidf_oracle(
    const std::vector<std::vector<std::string>>& corpus,
    const mvsenti::TfIdfOptions& opt) {
  TfIdfOracleResult out;
  std::map<std::string, std::uint64_t> df;
  for (const auto& doc : corpus) {
    std::set<std::string> distinct(doc.begin(), doc.end());
    for (const auto& t : distinct) df[t] += 1;
  }
  for (const auto& [term, count] : df)
    if (count >= opt.min_df) out.vocab.push_back(term);

  double n = static_cast<double>(corpus.size());
  for (const auto& term : out.vocab) {
    double d = static_cast<double>(df[term]);
    if (opt.mode == mvsenti::IdfMode::Smoothed)
      out.idf.push_back(std::log((1.0 + n) / (1.0 + d)) + 1.0);
    else
      out.idf.push_back(n / d);
  }

  for (const auto& doc : corpus) {
    std::vector<double> row(out.vocab.size(), 0.0);
    std::map<std::string, double> counts;
    for (const auto& t : doc) counts[t] += 1.0;
    for (std::size_t i = 0; i < out.vocab.size(); ++i) {
      auto it = counts.find(out.vocab[i]);
      if (it != counts.end()) row[i] = it->second * out.idf[i];
    }
    if (opt.l2_normalize) {
      double ss = 0.0;
      for (double v : row) ss += v * v;
      if (ss > 0.0) {
        double norm = std::sqrt(ss);
        for (double& v : row) v /= norm;
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

/// Random token corpus over a compact vocabulary pool; includes empty and
/// repetitive documents on purpose.
inline std::vector<std::vector<std::string>> random_corpus(
    mvsenti::SplitMix64& rng, std::size_t max_docs = 30,
    std::size_t pool = 40, std::size_t max_len = 14) {
  std::size_t n = 1 + rng.below(max_docs);
  std::vector<std::vector<std::string>> corpus(n);
  for (auto& doc : corpus) {
    std::size_t len = rng.below(max_len + 1);
    for (std::size_t i = 0; i < len; ++i)
      doc.push_back("tok" + std::to_string(rng.below(pool)));
  }
  return corpus;
}

// --------------------------------------------------------------- numerics

inline std::vector<double> to_dense(const mvsenti::SparseVector& x) {
  std::vector<double> out(x.dim, 0.0);
  for (const auto& e : x.entries) out[e.index] += e.value;
  return out;
}

inline mvsenti::SparseVector sparsify(const std::vector<double>& v) {
  mvsenti::SparseVector out;
  out.dim = v.size();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0.0)
      out.entries.push_back({static_cast<std::uint32_t>(i), v[i]});
  return out;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max({1.0, std::abs(got), std::abs(want)});
}

/// Central-difference check of an analytic gradient (gw, gb) of f at (w, b).
/// Returns the worst relative error over all coordinates.
template <class F>
double fd_max_rel_err(F&& f, const mvsenti::DenseVector& w, double b,
                      const mvsenti::DenseVector& gw, double gb,
                      double h = 1e-6) {
  double worst = 0.0;
  mvsenti::DenseVector wp = w;
  for (std::size_t i = 0; i < w.size(); ++i) {
    wp[i] = w[i] + h;
    double up = f(wp, b);
    wp[i] = w[i] - h;
    double dn = f(wp, b);
    wp[i] = w[i];
    worst = std::max(worst, rel_err((up - dn) / (2.0 * h), gw[i]));
  }
  double up = f(wp, b + h);
  double dn = f(wp, b - h);
  worst = std::max(worst, rel_err((up - dn) / (2.0 * h), gb));
  return worst;
}

// ------------------------------------------------------------------ blobs

struct Blobs {
  std::vector<mvsenti::DenseVector> x;
  std::vector<int> y;  // class index, one blob per center
};

inline Blobs make_blobs(const std::vector<mvsenti::DenseVector>& centers,
                        std::size_t per_class, double spread,
                        std::uint64_t seed) {
  Blobs out;
  mvsenti::SplitMix64 rng(seed);
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      mvsenti::DenseVector p(centers[c].size());
      for (std::size_t d = 0; d < p.size(); ++d)
        p[d] = centers[c][d] + spread * rng.normal();
      out.x.push_back(std::move(p));
      out.y.push_back(static_cast<int>(c));
    }
  }
  return out;
}

inline std::vector<mvsenti::SparseVector> sparsify_all(
    const std::vector<mvsenti::DenseVector>& xs) {
  std::vector<mvsenti::SparseVector> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(sparsify(x));
  return out;
}

/// Hinge objective recomputed from scratch: (1/(2C))|w|^2 + sum max(0, 1 - y z).
inline double hinge_objective_oracle(const std::vector<mvsenti::DenseVector>& xs,
                                     const std::vector<int>& y,
                                     const mvsenti::DenseVector& w, double b,
                                     double c_value) {
  double reg = 0.0;
  for (double v : w) reg += v * v;
  double obj = reg / (2.0 * c_value);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double z = b;
    for (std::size_t d = 0; d < w.size(); ++d) z += w[d] * xs[i][d];
    obj += std::max(0.0, 1.0 - y[i] * z);
  }
  return obj;
}

/// Coordinate-refined grid minimization of the hinge objective over
/// (w..., b). Dimension-agnostic but intended for 2-D problems.
inline double grid_min_hinge_objective(const std::vector<mvsenti::DenseVector>& xs,
                                       const std::vector<int>& y, double c_value,
                                       double radius = 6.0, int rounds = 5,
                                       int steps_per_axis = 13) {
  std::size_t dim = xs[0].size();
  std::vector<double> center(dim + 1, 0.0);  // w..., b
  double best = hinge_objective_oracle(xs, y, mvsenti::DenseVector(dim, 0.0),
                                       0.0, c_value);
  double r = radius;
  for (int round = 0; round < rounds; ++round) {
    std::vector<double> best_point = center;
    // full cartesian grid over dim+1 axes
    std::vector<int> idx(dim + 1, 0);
    for (;;) {
      std::vector<double> p(dim + 1);
      for (std::size_t a = 0; a < p.size(); ++a)
        p[a] = center[a] - r +
               2.0 * r * idx[a] / static_cast<double>(steps_per_axis - 1);
      mvsenti::DenseVector w(p.begin(), p.end() - 1);
      double obj = hinge_objective_oracle(xs, y, w, p.back(), c_value);
      if (obj < best) {
        best = obj;
        best_point = p;
      }
      std::size_t a = 0;
      while (a < idx.size() && ++idx[a] == steps_per_axis) idx[a++] = 0;
      if (a == idx.size()) break;
    }
    center = best_point;
    r *= 0.35;
  }
  return best;
}

// ---------------------------------------------------------------- metrics

struct BruteMetrics {
  double accuracy = 0.0;
  double precision[3] = {0, 0, 0};
  double recall[3] = {0, 0, 0};
  double f1[3] = {0, 0, 0};
  double avg_recall = 0.0;
  double f1_pn = 0.0;
  double macro_f1 = 0.0;
};

inline BruteMetrics brute_metrics(const std::uint64_t m[3][3]) {
  BruteMetrics out;
  double total = 0.0, diag = 0.0;
  for (int g = 0; g < 3; ++g)
    for (int p = 0; p < 3; ++p) {
      total += static_cast<double>(m[g][p]);
      if (g == p) diag += static_cast<double>(m[g][p]);
    }
  out.accuracy = diag / total;
  for (int c = 0; c < 3; ++c) {
    double gold_row = 0.0, pred_col = 0.0;
    for (int j = 0; j < 3; ++j) {
      gold_row += static_cast<double>(m[c][j]);
      pred_col += static_cast<double>(m[j][c]);
    }
    double tp = static_cast<double>(m[c][c]);
    out.recall[c] = gold_row > 0.0 ? tp / gold_row : 0.0;
    out.precision[c] = pred_col > 0.0 ? tp / pred_col : 0.0;
    double denom = out.precision[c] + out.recall[c];
    out.f1[c] = denom > 0.0 ? 2.0 * out.precision[c] * out.recall[c] / denom : 0.0;
  }
  out.avg_recall = (out.recall[0] + out.recall[1] + out.recall[2]) / 3.0;
  out.f1_pn = (out.f1[0] + out.f1[1]) / 2.0;
  out.macro_f1 = (out.f1[0] + out.f1[1] + out.f1[2]) / 3.0;
  return out;
}

// ------------------------------------------------------------ word2vec io

struct W2vWriteOptions {
  bool newline_after_vector = true;
  long long declared_vocab = -1;  // -1 means the actual row count
  long long declared_dim = -1;
  std::string header_override;  // replaces the whole header line when set
  std::string trailing_garbage;
};

/// Builds word2vec binary bytes independently of the loader.
inline std::string w2v_bytes(
    const std::vector<std::pair<std::string, std::vector<float>>>& rows,
    const W2vWriteOptions& opt = {}) {
  std::string out;
  if (!opt.header_override.empty()) {
    out += opt.header_override;
  } else {
    long long vocab = opt.declared_vocab >= 0
                          ? opt.declared_vocab
                          : static_cast<long long>(rows.size());
    long long dim = opt.declared_dim >= 0
                        ? opt.declared_dim
                        : static_cast<long long>(rows.empty() ? 0
                                                              : rows[0].second.size());
    out += std::to_string(vocab) + " " + std::to_string(dim) + "\n";
  }
  for (const auto& [word, vec] : rows) {
    out += word;
    out += ' ';
    for (float f : vec) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
      out += static_cast<char>(bits & 0xFF);
      out += static_cast<char>((bits >> 8) & 0xFF);
      out += static_cast<char>((bits >> 16) & 0xFF);
      out += static_cast<char>((bits >> 24) & 0xFF);
    }
    if (opt.newline_after_vector) out += '\n';
  }
  out += opt.trailing_garbage;
  return out;
}

/// Random printable word without whitespace, for round-trip tables.
inline std::string random_word(mvsenti::SplitMix64& rng) {
  static const char charset[] =
      "abcdefghijklmnopqrstuvwxyz0123456789_#@:+-./'";
  std::size_t len = 1 + rng.below(12);
  std::string w;
  for (std::size_t i = 0; i < len; ++i)
    w += charset[rng.below(sizeof(charset) - 1)];
  return w;
}

inline std::vector<std::pair<std::string, std::vector<float>>> random_table(
    mvsenti::SplitMix64& rng, std::size_t max_words = 24,
    std::size_t max_dim = 12) {
  std::size_t n = 1 + rng.below(max_words);
  std::size_t dim = 1 + rng.below(max_dim);
  std::set<std::string> seen;
  std::vector<std::pair<std::string, std::vector<float>>> rows;
  while (rows.size() < n) {
    std::string w = random_word(rng);
    if (!seen.insert(w).second) continue;
    std::vector<float> v(dim);
    for (auto& f : v) f = static_cast<float>(rng.uniform(-4.0, 4.0));
    rows.emplace_back(std::move(w), std::move(v));
  }
  return rows;
}

}  // namespace testutil
