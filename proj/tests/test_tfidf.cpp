#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "mvsenti/tfidf.hpp"
#include "testutil.hpp"

using namespace mvsenti;
using testutil::raises;

namespace {

const std::vector<TokenList> kTinyCorpus = {{"a", "a", "b"}, {"b", "c"}};

double entry(const SparseVector& v, std::uint32_t idx) {
  for (const auto& e : v.entries)
    if (e.index == idx) return e.value;
  return 0.0;
}

}  // namespace

TEST_CASE("raw ratio idf: hand-computed tiny corpus") {
  TfIdfOptions opt;
  opt.mode = IdfMode::RawRatio;
  opt.l2_normalize = false;
  TfIdfModel m = TfIdfModel::fit(kTinyCorpus, opt);

  REQUIRE(m.vocabulary_size() == 3);
  CHECK(m.terms()[0] == "a");
  CHECK(m.terms()[1] == "b");
  CHECK(m.terms()[2] == "c");
  CHECK(m.doc_freq()[0] == 1);
  CHECK(m.doc_freq()[1] == 2);
  CHECK(m.doc_freq()[2] == 1);
  CHECK(m.idf()[0] == doctest::Approx(2.0).epsilon(1e-12));  // 2/1
  CHECK(m.idf()[1] == doctest::Approx(1.0).epsilon(1e-12));  // 2/2
  CHECK(m.idf()[2] == doctest::Approx(2.0).epsilon(1e-12));

  SparseVector v = m.transform({"a", "a", "b"});
  CHECK(v.dim == 3);
  REQUIRE(v.entries.size() == 2);
  CHECK(v.entries[0].index == 0);
  CHECK(v.entries[0].value == doctest::Approx(4.0).epsilon(1e-12));  // tf 2 * idf 2
  CHECK(v.entries[1].index == 1);
  CHECK(v.entries[1].value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("l2 normalization divides by the euclidean norm") {
  TfIdfOptions opt;
  opt.mode = IdfMode::RawRatio;
  opt.l2_normalize = true;
  TfIdfModel m = TfIdfModel::fit(kTinyCorpus, opt);

  SparseVector v = m.transform({"a", "a", "b"});
  double norm = std::sqrt(17.0);  // sqrt(4^2 + 1^2)
  CHECK(entry(v, 0) == doctest::Approx(4.0 / norm).epsilon(1e-12));
  CHECK(entry(v, 1) == doctest::Approx(1.0 / norm).epsilon(1e-12));

  double ss = 0.0;
  for (const auto& e : v.entries) ss += e.value * e.value;
  CHECK(ss == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("smoothed idf formula") {
  // single doc, df = N = 1: ln(2/2) + 1 = 1
  TfIdfModel one = TfIdfModel::fit({{"x"}}, {});
  CHECK(one.idf()[0] == doctest::Approx(1.0).epsilon(1e-12));

  // N = 2: df 2 -> 1.0, df 1 -> ln(3/2) + 1
  TfIdfOptions opt;
  opt.l2_normalize = false;
  TfIdfModel m = TfIdfModel::fit({{"a"}, {"a", "b"}}, opt);
  CHECK(m.idf()[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.idf()[1] == doctest::Approx(std::log(1.5) + 1.0).epsilon(1e-12));
}

TEST_CASE("min_df prunes the vocabulary") {
  TfIdfOptions opt;
  opt.min_df = 2;
  opt.l2_normalize = false;
  TfIdfModel m = TfIdfModel::fit(kTinyCorpus, opt);
  REQUIRE(m.vocabulary_size() == 1);
  CHECK(m.terms()[0] == "b");
  CHECK(m.index_of("a") == -1);
  CHECK(m.index_of("b") == 0);

  SparseVector v = m.transform({"a", "c"});  // both pruned or out of vocab
  CHECK(v.dim == 1);
  CHECK(v.entries.empty());
}

TEST_CASE("vocabulary order is lexicographic regardless of input order") {
  TfIdfModel m = TfIdfModel::fit({{"zebra", "mango"}, {"apple"}}, {});
  REQUIRE(m.vocabulary_size() == 3);
  CHECK(m.terms()[0] == "apple");
  CHECK(m.terms()[1] == "mango");
  CHECK(m.terms()[2] == "zebra");
  CHECK(m.index_of("apple") == 0);
  CHECK(m.index_of("zebra") == 2);
}

TEST_CASE("transform skips out-of-vocabulary tokens and keeps zero docs zero") {
  TfIdfModel m = TfIdfModel::fit(kTinyCorpus, {});
  CHECK(m.transform({"unseen", "words"}).entries.empty());
  CHECK(m.transform({}).entries.empty());
  CHECK(m.transform({}).dim == m.vocabulary_size());
}

TEST_CASE("term_weights returns raw pre-normalization products") {
  TfIdfOptions opt;
  opt.mode = IdfMode::RawRatio;
  opt.l2_normalize = true;  // must not affect term_weights
  TfIdfModel m = TfIdfModel::fit(kTinyCorpus, opt);

  auto w = m.term_weights({"a", "a", "b", "zzz"});
  REQUIRE(w.size() == 2);
  CHECK(w.at("a") == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(w.at("b") == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empty corpus refuses to fit; empty documents are fine") {
  CHECK(raises(Errc::EmptyCorpus, [] { TfIdfModel::fit({}, {}); }));

  TfIdfModel m = TfIdfModel::fit({{}, {}}, {});
  CHECK(m.vocabulary_size() == 0);
  CHECK(m.doc_count() == 2);
  CHECK(m.transform({"anything"}).dim == 0);
}

TEST_CASE("from_parts round trip and validation") {
  TfIdfOptions opt;
  opt.mode = IdfMode::RawRatio;
  opt.l2_normalize = false;
  TfIdfModel m = TfIdfModel::fit(kTinyCorpus, opt);

  TfIdfModel r = TfIdfModel::from_parts(m.terms(), m.doc_freq(), m.doc_count(),
                                        m.options());
  REQUIRE(r.vocabulary_size() == m.vocabulary_size());
  for (std::size_t i = 0; i < m.vocabulary_size(); ++i)
    CHECK(r.idf()[i] == m.idf()[i]);  // idf recomputation must agree exactly

  SparseVector a = m.transform({"a", "b", "b"});
  SparseVector b = r.transform({"a", "b", "b"});
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].index == b.entries[i].index);
    CHECK(a.entries[i].value == b.entries[i].value);
  }

  CHECK(raises(Errc::BundleCorrupt, [&] {
    TfIdfModel::from_parts({"b", "a"}, {1, 1}, 2, opt);  // unsorted
  }));
  CHECK(raises(Errc::BundleCorrupt, [&] {
    TfIdfModel::from_parts({"a", "b"}, {1}, 2, opt);  // length mismatch
  }));
}

TEST_CASE("random corpora match an independent oracle") {
  SplitMix64 rng(123);
  int checked = 0;
  for (int iter = 0; iter < 60; ++iter) {
    auto corpus = testutil::random_corpus(rng);
    TfIdfOptions opt;
    opt.mode = (iter % 2 == 0) ? IdfMode::Smoothed : IdfMode::RawRatio;
    opt.l2_normalize = (iter % 3 != 0);
    opt.min_df = 1 + iter % 3;

    auto oracle = testutil::tfidf_oracle(corpus, opt);
    TfIdfModel m = TfIdfModel::fit(corpus, opt);

    REQUIRE(m.vocabulary_size() == oracle.vocab.size());
    for (std::size_t i = 0; i < oracle.vocab.size(); ++i) {
      CHECK(m.terms()[i] == oracle.vocab[i]);
      CHECK(std::abs(m.idf()[i] - oracle.idf[i]) <= 1e-9);
    }
    for (std::size_t d = 0; d < corpus.size(); ++d) {
      auto dense = testutil::to_dense(m.transform(corpus[d]));
      REQUIRE(dense.size() == oracle.rows[d].size());
      for (std::size_t i = 0; i < dense.size(); ++i)
        CHECK(std::abs(dense[i] - oracle.rows[d][i]) <= 1e-9);
      ++checked;
    }
  }
  CHECK(checked > 100);
}
