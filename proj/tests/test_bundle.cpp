#include <doctest.h>

#include <memory>
#include <string>
#include <vector>

#include "mvsenti/bundle.hpp"
#include "mvsenti/corpus.hpp"
#include "mvsenti/ensemble.hpp"
#include "testutil.hpp"

using namespace mvsenti;
using testutil::raises;
using testutil::read_file;
using testutil::ScratchDir;
using testutil::write_file;

namespace {

Dataset tiny_dataset() {
  Dataset ds;
  auto add = [&](const std::string& id, SentimentLabel label,
                 const std::string& text) { ds.push_back({{id, text}, label}); };
  add("p1", SentimentLabel::Positive, "good nice thing");
  add("p2", SentimentLabel::Positive, "good good update");
  add("n1", SentimentLabel::Negative, "bad awful thing");
  add("n2", SentimentLabel::Negative, "bad bad update");
  add("u1", SentimentLabel::Neutral, "update notes thing");
  add("u2", SentimentLabel::Neutral, "notes update update");
  return ds;
}

std::shared_ptr<const EmbeddingTable> tiny_embeddings() {
  return std::make_shared<const EmbeddingTable>(EmbeddingTable::from_vectors({
      {"good", {1.0f, 0.0f}},
      {"nice", {0.9f, 0.1f}},
      {"bad", {-1.0f, 0.0f}},
      {"awful", {-0.9f, 0.1f}},
      {"update", {0.0f, 1.0f}},
      {"notes", {0.1f, 0.9f}},
      {"thing", {0.0f, 0.1f}},
  }));
}

RunConfig tiny_run_config() {
  RunConfig cfg;
  cfg.train_files = {"tiny.tsv"};
  cfg.seed = 5;
  return cfg;
}

EnsembleModel tiny_model(std::shared_ptr<const EmbeddingTable> table) {
  EnsembleConfig ec = to_ensemble_config(tiny_run_config());
  StopwordList sw = StopwordList::from_words({"the"});
  return fit_ensemble(tiny_dataset(), ec, sw, std::move(table));
}

}  // namespace

TEST_CASE("bundle round trip: predictions survive save and load bitwise") {
  ScratchDir dir;
  auto table = tiny_embeddings();
  EnsembleModel model = tiny_model(table);
  auto path = dir.file("model.mvsb");

  save_bundle(path, model, tiny_run_config(), "test-digest");
  LoadedBundle loaded = load_bundle(path, table);

  CHECK(loaded.format_version == kBundleFormatVersion);
  CHECK(loaded.embedding_digest == "test-digest");
  CHECK(loaded.config.seed == 5);
  REQUIRE(loaded.config.train_files.size() == 1);
  CHECK(loaded.config.train_files[0] == "tiny.tsv");

  std::vector<Document> probes = {{"z1", "good update"},
                                  {"z2", "totally unseen"},
                                  {"z3", "bad notes"},
                                  {"z4", ""}};
  for (const auto& doc : probes) {
    DenseVector a = model.predict_proba(doc);
    DenseVector b = loaded.model.predict_proba(doc);
    REQUIRE(a.size() == b.size());
    for (std::size_t c = 0; c < a.size(); ++c) CHECK(a[c] == b[c]);
  }

  CHECK(loaded.model.stopwords.size() == 1);
  REQUIRE(loaded.model.tfidf.has_value());
  CHECK(loaded.model.tfidf->vocabulary_size() ==
        model.tfidf->vocabulary_size());
}

TEST_CASE("bundle: loading and resaving reproduces the bytes") {
  ScratchDir dir;
  auto table = tiny_embeddings();
  EnsembleModel model = tiny_model(table);
  auto p1 = dir.file("one.mvsb");
  auto p2 = dir.file("two.mvsb");

  save_bundle(p1, model, tiny_run_config(), "d");
  LoadedBundle loaded = load_bundle(p1, table);
  save_bundle(p2, loaded.model, loaded.config, loaded.embedding_digest);

  CHECK(read_file(p1) == read_file(p2));
}

TEST_CASE("bundle inspect: metadata without the embedding table") {
  ScratchDir dir;
  auto table = tiny_embeddings();
  EnsembleModel model = tiny_model(table);
  auto path = dir.file("model.mvsb");
  save_bundle(path, model, tiny_run_config(), "sha-here");

  BundleInfo info = inspect_bundle(path);
  CHECK(info.format_version == kBundleFormatVersion);
  REQUIRE(info.views.size() == 3);
  CHECK(info.views[0] == "tfidf:svm_ovo");
  CHECK(info.views[1] == "mean:svm_ovo");
  CHECK(info.views[2] == "wmean:logreg_ovr");
  REQUIRE(info.view_weights.size() == 3);
  CHECK(info.view_weights[0] == 1.0);
  CHECK(info.vocabulary_size == model.tfidf->vocabulary_size());
  CHECK(info.embedding_digest == "sha-here");
  CHECK(info.needs_embeddings);
  CHECK(info.stopword_count == 1);
  REQUIRE(info.class_order.size() == 3);
  CHECK(info.class_order[0] == "positive");
  CHECK(info.class_order[1] == "negative");
  CHECK(info.class_order[2] == "neutral");
}

TEST_CASE("bundle: tfidf-only model loads without any table") {
  ScratchDir dir;
  RunConfig rc = tiny_run_config();
  rc.views = {"tfidf:svm_ovo"};
  EnsembleModel model = fit_ensemble(tiny_dataset(), to_ensemble_config(rc),
                                     StopwordList{}, nullptr);
  auto path = dir.file("bow.mvsb");
  save_bundle(path, model, rc, "");

  BundleInfo info = inspect_bundle(path);
  CHECK(!info.needs_embeddings);
  CHECK(info.embedding_digest.empty());

  LoadedBundle loaded = load_bundle(path, nullptr);
  CHECK(loaded.model.predict_label({"q", "good nice"}) ==
        model.predict_label({"q", "good nice"}));
}

TEST_CASE("bundle: corruption and version errors") {
  ScratchDir dir;
  auto table = tiny_embeddings();
  EnsembleModel model = tiny_model(table);
  auto path = dir.file("model.mvsb");
  save_bundle(path, model, tiny_run_config(), "d");
  std::string good = read_file(path);

  auto corrupt_at = [&](const std::string& name, std::string bytes) {
    auto p = dir.file(name);
    write_file(p, bytes);
    return p;
  };

  CHECK(raises(Errc::IoFailure,
               [&] { inspect_bundle(dir.file("missing.mvsb")); }));

  auto bad_magic = good;
  bad_magic[0] = 'X';
  CHECK(raises(Errc::BundleCorrupt, [&] {
    inspect_bundle(corrupt_at("magic.mvsb", bad_magic));
  }));

  auto future = good;
  future[4] = 99;  // version little-endian low byte
  CHECK(raises(Errc::UnsupportedVersion, [&] {
    inspect_bundle(corrupt_at("future.mvsb", future));
  }));

  auto zero_version = good;
  zero_version[4] = 0;
  CHECK(raises(Errc::BundleCorrupt, [&] {
    inspect_bundle(corrupt_at("zero.mvsb", zero_version));
  }));

  CHECK(raises(Errc::BundleCorrupt, [&] {
    inspect_bundle(corrupt_at("short.mvsb", good.substr(0, 10)));
  }));
  CHECK(raises(Errc::BundleCorrupt, [&] {
    inspect_bundle(corrupt_at("half.mvsb", good.substr(0, good.size() / 2)));
  }));
  CHECK(raises(Errc::BundleCorrupt, [&] {
    inspect_bundle(corrupt_at("trail.mvsb", good + "x"));
  }));

  auto bad_json = good;
  bad_json[16] = '{';  // stomp the first metadata byte pair
  bad_json[17] = '{';
  CHECK(raises(Errc::BundleCorrupt, [&] {
    inspect_bundle(corrupt_at("json.mvsb", bad_json));
  }));
}

TEST_CASE("bundle: embedding table requirements at load time") {
  ScratchDir dir;
  auto table = tiny_embeddings();
  EnsembleModel model = tiny_model(table);
  auto path = dir.file("model.mvsb");
  save_bundle(path, model, tiny_run_config(), "d");

  CHECK(raises(Errc::ConfigError, [&] { load_bundle(path, nullptr); }));

  auto wrong_dim = std::make_shared<const EmbeddingTable>(
      EmbeddingTable::from_vectors({{"good", {1.0f, 2.0f, 3.0f}}}));
  CHECK(raises(Errc::DimensionMismatch,
               [&] { load_bundle(path, wrong_dim); }));
}
