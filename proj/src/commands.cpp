#include "mvsenti/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "mvsenti/bundle.hpp"
#include "mvsenti/corpus.hpp"
#include "mvsenti/digest.hpp"
#include "mvsenti/embedding.hpp"
#include "mvsenti/ensemble.hpp"
#include "mvsenti/evaluation.hpp"
#include "mvsenti/preprocess.hpp"

namespace mvsenti {
namespace {

std::string fixed4(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

std::string general(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", value);
  return buf;
}

/// Prediction input is id<TAB>text; a labeled id<TAB>label<TAB>text file is
/// accepted too, with the labels ignored. The first data line decides which
/// shape the whole file must have.
std::vector<Document> load_prediction_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoFailure, "cannot open " + path.string());
  std::string line;
  std::size_t tabs = 1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    tabs = static_cast<std::size_t>(std::count(line.begin(), line.end(), '\t'));
    break;
  }
  in.close();
  if (tabs >= 2) {
    Dataset labeled = load_labeled_dataset(path);
    std::vector<Document> docs;
    docs.reserve(labeled.size());
    for (LabeledDocument& entry : labeled) docs.push_back(std::move(entry.doc));
    return docs;
  }
  return load_unlabeled_dataset(path);
}

void write_predictions(const std::filesystem::path& path,
                       const std::vector<Document>& docs,
                       const std::vector<Prediction>& preds) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(Errc::IoFailure, "cannot write " + path.string());
  out << "id\tlabel\tp_pos\tp_neg\tp_neu\n";
  char buf[64];
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const DenseVector& d = preds[i].distribution;
    std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\t%.6f", d[0], d[1], d[2]);
    out << docs[i].id << '\t' << to_string(preds[i].label) << '\t' << buf
        << '\n';
  }
  out.flush();
  if (!out) raise(Errc::IoFailure, "short write to " + path.string());
}

/// Resolves the embedding table a stored bundle depends on, verifying the
/// file against the digest pinned at training time.
std::shared_ptr<const EmbeddingTable> embeddings_for(const RunConfig& cfg,
                                                     const BundleInfo& info) {
  if (!info.needs_embeddings) return nullptr;
  if (cfg.embeddings_file.empty())
    raise(Errc::ConfigError,
          "bundle uses embedding views; set embeddings_file");
  std::string digest = sha256_file_hex(cfg.embeddings_file);
  if (!info.embedding_digest.empty() && digest != info.embedding_digest)
    raise(Errc::DigestMismatch, "embedding file digest " + digest +
                                    " does not match bundle digest " +
                                    info.embedding_digest);
  return std::make_shared<const EmbeddingTable>(load_embeddings(cfg));
}

LoadedBundle load_bundle_for(const RunConfig& cfg) {
  BundleInfo info = inspect_bundle(cfg.bundle_file);
  return load_bundle(cfg.bundle_file, embeddings_for(cfg, info));
}

}  // namespace

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::ConfigError:
    case Errc::MalformedLine:
    case Errc::UnknownLabel:
    case Errc::IoFailure:
      return 2;
    default:
      return 3;
  }
}

void cmd_train(const RunConfig& cfg, std::ostream& out) {
  EnsembleConfig ensemble_config = to_ensemble_config(cfg);
  if (cfg.train_files.empty()) raise(Errc::ConfigError, "train_files is empty");

  StopwordList stopwords;
  if (!cfg.stopwords_file.empty())
    stopwords = StopwordList::load(cfg.stopwords_file);

  bool needs_table = false;
  for (const ViewSpec& view : ensemble_config.views)
    if (view.weight > 0.0 && view_needs_embeddings(view)) needs_table = true;

  std::string digest;
  std::shared_ptr<const EmbeddingTable> table;
  if (needs_table) {
    if (cfg.embeddings_file.empty())
      raise(Errc::ConfigError, "active views use embeddings; set embeddings_file");
    digest = sha256_file_hex(cfg.embeddings_file);
    table = std::make_shared<const EmbeddingTable>(load_embeddings(cfg));
  }

  std::vector<Dataset> parts;
  parts.reserve(cfg.train_files.size());
  for (const std::string& file : cfg.train_files)
    parts.push_back(load_labeled_dataset(file));
  Dataset dataset = concat(parts);

  DatasetSummary sum = summarize(dataset);
  out << "training documents: " << sum.total << " (";
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (c) out << ", ";
    out << to_string(kAllLabels[c]) << " " << sum.per_class[c];
  }
  out << ")\n";

  FitStats stats;
  EnsembleModel model =
      fit_ensemble(dataset, ensemble_config, std::move(stopwords), table, &stats);

  for (const FitStats::PerView& pv : stats.views)
    out << "view " << vectorizer_name(pv.spec.vectorizer) << ":"
        << view_classifier_name(pv.spec.classifier) << " weight "
        << general(pv.spec.weight) << " train_accuracy "
        << fixed4(pv.train_accuracy) << "\n";
  if (!digest.empty()) out << "embedding digest: " << digest << "\n";

  save_bundle(cfg.bundle_file, model, cfg, digest);
  out << "bundle written: " << cfg.bundle_file << "\n";
}

void cmd_predict(const RunConfig& cfg, std::ostream& out) {
  if (cfg.input_file.empty()) raise(Errc::ConfigError, "input_file is not set");
  LoadedBundle bundle = load_bundle_for(cfg);
  std::vector<Document> docs = load_prediction_input(cfg.input_file);
  std::vector<Prediction> preds = bundle.model.predict_batch(docs);
  write_predictions(cfg.predictions_file, docs, preds);
  out << "predictions written: " << cfg.predictions_file << " (" << docs.size()
      << " documents)\n";
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.test_file.empty()) raise(Errc::ConfigError, "test_file is not set");
  LoadedBundle bundle = load_bundle_for(cfg);
  Dataset dataset = load_labeled_dataset(cfg.test_file);
  EvalReport rep = evaluate(bundle.model, dataset);
  out << format_report_text(rep);

  std::ofstream json_out(cfg.report_file, std::ios::binary | std::ios::trunc);
  if (!json_out) raise(Errc::IoFailure, "cannot write " + cfg.report_file);
  json_out << report_to_json(rep);
  json_out.flush();
  if (!json_out) raise(Errc::IoFailure, "short write to " + cfg.report_file);
  out << "report written: " << cfg.report_file << "\n";
}

void cmd_inspect(const RunConfig& cfg, std::ostream& out) {
  BundleInfo info = inspect_bundle(cfg.bundle_file);
  out << "format_version: " << info.format_version << "\n";
  out << "views:";
  for (std::size_t i = 0; i < info.views.size(); ++i) {
    out << (i ? ", " : " ") << info.views[i] << " (weight "
        << general(info.view_weights[i]) << ")";
  }
  out << "\n";
  out << "vocabulary_size: " << info.vocabulary_size << "\n";
  out << "embedding_digest: "
      << (info.embedding_digest.empty() ? "none" : info.embedding_digest)
      << "\n";
  out << "class_order:";
  for (std::size_t i = 0; i < info.class_order.size(); ++i)
    out << (i ? ", " : " ") << info.class_order[i];
  out << "\n";
  out << "stopwords: " << info.stopword_count << "\n";
}

namespace {

struct Binding {
  CLI::Option* opt;
  std::function<void(RunConfig&, const RunConfig&)> apply;
};

template <typename T>
void add_binding(std::vector<Binding>& bindings, CLI::Option* opt,
                 T RunConfig::*field) {
  bindings.push_back(Binding{
      opt, [field](RunConfig& dst, const RunConfig& src) { dst.*field = src.*field; }});
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"multi-view soft-voting sentiment classifier"};
  app.require_subcommand(1);

  CLI::App* train = app.add_subcommand("train", "train an ensemble and write a model bundle");
  CLI::App* predict = app.add_subcommand("predict", "label a TSV of messages with a trained bundle");
  CLI::App* evaluate = app.add_subcommand("evaluate", "score a trained bundle against labeled data");
  CLI::App* inspect = app.add_subcommand("inspect", "print a bundle's metadata");

  RunConfig flags;  // parse targets; a field is only read when its flag was given
  std::string config_path;
  std::vector<Binding> bindings;
  auto bind = [&bindings](CLI::Option* opt, auto field) {
    add_binding(bindings, opt, field);
  };

  auto add_all = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "configuration file of key = value lines")
        ->envname("MVSENTI_CONFIG");
    bind(cmd->add_option("--train_files", flags.train_files,
                         "labeled TSV training files (repeatable)"),
         &RunConfig::train_files);
    bind(cmd->add_option("--test_file", flags.test_file,
                         "labeled TSV file to evaluate"),
         &RunConfig::test_file);
    bind(cmd->add_option("--input_file", flags.input_file,
                         "TSV file to predict; id<TAB>text, or labeled TSV"),
         &RunConfig::input_file);
    bind(cmd->add_option("--predictions_file", flags.predictions_file,
                         "where predict writes its TSV"),
         &RunConfig::predictions_file);
    bind(cmd->add_option("--report_file", flags.report_file,
                         "where evaluate writes its JSON report"),
         &RunConfig::report_file);
    bind(cmd->add_option("--embeddings_file", flags.embeddings_file,
                         "word embedding table"),
         &RunConfig::embeddings_file);
    bind(cmd->add_option("--embedding_format", flags.embedding_format,
                         "auto, binary or text"),
         &RunConfig::embedding_format);
    bind(cmd->add_option("--stopwords_file", flags.stopwords_file,
                         "one stopword per line"),
         &RunConfig::stopwords_file);
    bind(cmd->add_option("--bundle_file", flags.bundle_file,
                         "model bundle path"),
         &RunConfig::bundle_file);
    bind(cmd->add_option("--tfidf_mode", flags.tfidf_mode,
                         "smoothed or raw"),
         &RunConfig::tfidf_mode);
    bind(cmd->add_option("--tfidf_min_df", flags.tfidf_min_df,
                         "minimum document frequency for the vocabulary"),
         &RunConfig::tfidf_min_df);
    bind(cmd->add_option("--oov_seed", flags.oov_seed,
                         "seed for out-of-vocabulary vectors"),
         &RunConfig::oov_seed);
    bind(cmd->add_flag("--drop_urls,!--no-drop_urls", flags.drop_urls,
                       "drop URL tokens during preprocessing"),
         &RunConfig::drop_urls);
    bind(cmd->add_option("--views", flags.views,
                         "view specs, vectorizer:classifier (repeatable)"),
         &RunConfig::views);
    bind(cmd->add_option("--view_weights", flags.view_weights,
                         "per-view vote weights (repeatable)"),
         &RunConfig::view_weights);
    bind(cmd->add_option("--regularization_c", flags.regularization_c,
                         "soft-margin constant C"),
         &RunConfig::regularization_c);
    bind(cmd->add_option("--max_epochs", flags.max_epochs,
                         "epoch cap for the solver"),
         &RunConfig::max_epochs);
    bind(cmd->add_option("--tolerance", flags.tolerance,
                         "objective-decrease stopping threshold"),
         &RunConfig::tolerance);
    bind(cmd->add_option("--eta0", flags.eta0, "initial learning rate"),
         &RunConfig::eta0);
    bind(cmd->add_option("--seed", flags.seed, "training shuffle seed"),
         &RunConfig::seed);
  };
  add_all(train);
  add_all(predict);
  add_all(evaluate);
  add_all(inspect);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    for (const Binding& b : bindings)
      if (b.opt->count() > 0) b.apply(cfg, flags);

    if (train->parsed()) cmd_train(cfg, std::cout);
    else if (predict->parsed()) cmd_predict(cfg, std::cout);
    else if (evaluate->parsed()) cmd_evaluate(cfg, std::cout);
    else if (inspect->parsed()) cmd_inspect(cfg, std::cout);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mvsenti
