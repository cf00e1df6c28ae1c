#include "mvsenti/bundle.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "mvsenti/errors.hpp"

namespace mvsenti {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'M', 'V', 'S', 'B'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double d) {
  put_u64(out, std::bit_cast<std::uint64_t>(d));
}

class Reader {
 public:
  Reader(std::string data, std::string path)
      : data_(std::move(data)), path_(std::move(path)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }

  std::string_view bytes(std::uint64_t len) {
    need(len);
    std::string_view out(data_.data() + pos_, len);
    pos_ += len;
    return out;
  }

  std::uint64_t remaining() const { return data_.size() - pos_; }

  [[noreturn]] void corrupt(const std::string& what) const {
    raise(Errc::BundleCorrupt, path_ + ": " + what);
  }

 private:
  std::string data_;
  std::string path_;
  std::size_t pos_ = 0;

  void need(std::uint64_t len) {
    if (remaining() < len) corrupt("unexpected end of file");
  }
};

json config_to_json(const RunConfig& cfg) {
  json j;
  j["train_files"] = cfg.train_files;
  j["test_file"] = cfg.test_file;
  j["input_file"] = cfg.input_file;
  j["predictions_file"] = cfg.predictions_file;
  j["report_file"] = cfg.report_file;
  j["embeddings_file"] = cfg.embeddings_file;
  j["embedding_format"] = cfg.embedding_format;
  j["stopwords_file"] = cfg.stopwords_file;
  j["bundle_file"] = cfg.bundle_file;
  j["tfidf_mode"] = cfg.tfidf_mode;
  j["tfidf_min_df"] = cfg.tfidf_min_df;
  j["oov_seed"] = cfg.oov_seed;
  j["drop_urls"] = cfg.drop_urls;
  j["views"] = cfg.views;
  j["view_weights"] = cfg.view_weights;
  j["regularization_c"] = cfg.regularization_c;
  j["max_epochs"] = cfg.max_epochs;
  j["tolerance"] = cfg.tolerance;
  j["eta0"] = cfg.eta0;
  j["seed"] = cfg.seed;
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  cfg.train_files = j.at("train_files").get<std::vector<std::string>>();
  cfg.test_file = j.at("test_file").get<std::string>();
  cfg.input_file = j.at("input_file").get<std::string>();
  cfg.predictions_file = j.at("predictions_file").get<std::string>();
  cfg.report_file = j.at("report_file").get<std::string>();
  cfg.embeddings_file = j.at("embeddings_file").get<std::string>();
  cfg.embedding_format = j.at("embedding_format").get<std::string>();
  cfg.stopwords_file = j.at("stopwords_file").get<std::string>();
  cfg.bundle_file = j.at("bundle_file").get<std::string>();
  cfg.tfidf_mode = j.at("tfidf_mode").get<std::string>();
  cfg.tfidf_min_df = j.at("tfidf_min_df").get<std::int64_t>();
  cfg.oov_seed = j.at("oov_seed").get<std::int64_t>();
  cfg.drop_urls = j.at("drop_urls").get<bool>();
  cfg.views = j.at("views").get<std::vector<std::string>>();
  cfg.view_weights = j.at("view_weights").get<std::vector<double>>();
  cfg.regularization_c = j.at("regularization_c").get<double>();
  cfg.max_epochs = j.at("max_epochs").get<std::int64_t>();
  cfg.tolerance = j.at("tolerance").get<double>();
  cfg.eta0 = j.at("eta0").get<double>();
  cfg.seed = j.at("seed").get<std::int64_t>();
  return cfg;
}

json metadata_json(const EnsembleModel& model, const RunConfig& config,
                   const std::string& embedding_digest, std::uint64_t& payload_elems) {
  json meta;
  meta["class_order"] = json::array();
  for (auto label : kAllLabels) meta["class_order"].push_back(std::string(to_string(label)));
  meta["config"] = config_to_json(config);
  meta["embedding_digest"] = embedding_digest;
  meta["filter"] = {{"drop_urls", model.filter.drop_urls}};
  meta["oov"] = {{"seed", model.oov.seed},
                 {"range_half_width", model.oov.range_half_width}};
  meta["stopwords"] = model.stopwords.sorted_words();

  json tfidf;
  if (model.tfidf) {
    tfidf["present"] = true;
    tfidf["mode"] = model.tfidf->options().mode == IdfMode::Smoothed ? "smoothed" : "raw";
    tfidf["l2_normalize"] = model.tfidf->options().l2_normalize;
    tfidf["min_df"] = model.tfidf->options().min_df;
    tfidf["doc_count"] = model.tfidf->doc_count();
    tfidf["terms"] = model.tfidf->terms();
    tfidf["doc_freq"] = model.tfidf->doc_freq();
  } else {
    tfidf["present"] = false;
  }
  meta["tfidf"] = tfidf;

  payload_elems = 0;
  json views = json::array();
  for (const auto& view : model.views) {
    json v;
    v["vectorizer"] = vectorizer_name(view.spec.vectorizer);
    v["classifier"] = view_classifier_name(view.spec.classifier);
    v["weight"] = view.spec.weight;
    json m;
    m["strategy"] = view.classifier.strategy == MulticlassStrategy::OneVsRest ? "ovr" : "ovo";
    m["loss"] = view.classifier.loss == LossKind::Hinge ? "hinge" : "logistic";
    m["n_classes"] = view.classifier.n_classes;
    m["feature_dim"] = view.classifier.feature_dim;
    json units = json::array();
    for (const auto& unit : view.classifier.units) {
      json u;
      u["positive_class"] = unit.positive_class;
      u["negative_class"] = unit.negative_class;
      u["bias"] = unit.model.bias;
      u["weights_offset"] = payload_elems;
      u["weights_len"] = unit.model.weights.size();
      payload_elems += unit.model.weights.size();
      if (unit.platt) {
        u["platt"] = {{"a", unit.platt->a}, {"b", unit.platt->b}};
      } else {
        u["platt"] = nullptr;
      }
      units.push_back(std::move(u));
    }
    m["units"] = std::move(units);
    v["model"] = std::move(m);
    views.push_back(std::move(v));
  }
  meta["views"] = std::move(views);
  return meta;
}

}  // namespace

void save_bundle(const std::filesystem::path& path, const EnsembleModel& model,
                 const RunConfig& config, const std::string& embedding_digest) {
  std::uint64_t payload_elems = 0;
  const json meta = metadata_json(model, config, embedding_digest, payload_elems);
  const std::string meta_text = meta.dump();

  std::string out;
  out.reserve(4 + 4 + 8 + meta_text.size() + 8 + payload_elems * 8);
  out.append(kMagic, 4);
  put_u32(out, kBundleFormatVersion);
  put_u64(out, meta_text.size());
  out.append(meta_text);
  put_u64(out, payload_elems * 8);
  for (const auto& view : model.views) {
    for (const auto& unit : view.classifier.units) {
      for (double w : unit.model.weights) put_f64(out, w);
    }
  }

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) raise(Errc::IoFailure, "cannot write " + tmp.string());
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    file.flush();
    if (!file) raise(Errc::IoFailure, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    raise(Errc::IoFailure, "cannot move bundle into place: " + path.string());
  }
}

namespace {

struct ParsedBundle {
  std::uint32_t format_version = 0;
  json meta;
  std::string payload;
};

ParsedBundle read_bundle_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoFailure, "cannot open bundle: " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) raise(Errc::IoFailure, "read failed: " + path.string());

  Reader reader(std::move(data), path.string());
  const auto magic = reader.bytes(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) {
    reader.corrupt("bad magic (not a model bundle)");
  }
  ParsedBundle parsed;
  parsed.format_version = reader.u32();
  if (parsed.format_version > kBundleFormatVersion) {
    raise(Errc::UnsupportedVersion,
          path.string() + ": format version " + std::to_string(parsed.format_version) +
              " is newer than supported " + std::to_string(kBundleFormatVersion));
  }
  if (parsed.format_version == 0) reader.corrupt("format version 0");

  const std::uint64_t meta_len = reader.u64();
  if (meta_len > reader.remaining()) reader.corrupt("metadata length overruns file");
  const auto meta_text = reader.bytes(meta_len);
  parsed.meta = json::parse(meta_text, nullptr, false);
  if (parsed.meta.is_discarded()) reader.corrupt("metadata is not valid JSON");

  const std::uint64_t payload_len = reader.u64();
  if (payload_len > reader.remaining()) reader.corrupt("payload length overruns file");
  if (payload_len % 8 != 0) reader.corrupt("payload length not a multiple of 8");
  parsed.payload = std::string(reader.bytes(payload_len));
  if (reader.remaining() != 0) reader.corrupt("trailing bytes after payload");
  return parsed;
}

double payload_f64(const std::string& payload, std::uint64_t elem) {
  std::uint64_t v = 0;
  const auto* p = reinterpret_cast<const unsigned char*>(payload.data()) + elem * 8;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

[[noreturn]] void meta_error(const std::filesystem::path& path, const std::string& what) {
  raise(Errc::BundleCorrupt, path.string() + ": " + what);
}

void check_class_order(const std::filesystem::path& path, const json& meta) {
  const auto order = meta.at("class_order").get<std::vector<std::string>>();
  std::vector<std::string> want;
  for (auto label : kAllLabels) want.emplace_back(to_string(label));
  if (order != want) meta_error(path, "unexpected class order");
}

}  // namespace

LoadedBundle load_bundle(const std::filesystem::path& path,
                         std::shared_ptr<const EmbeddingTable> embeddings) {
  ParsedBundle parsed = read_bundle_file(path);
  LoadedBundle out;
  out.format_version = parsed.format_version;
  try {
    const json& meta = parsed.meta;
    check_class_order(path, meta);
    out.config = config_from_json(meta.at("config"));
    out.embedding_digest = meta.at("embedding_digest").get<std::string>();

    EnsembleModel& model = out.model;
    model.filter.drop_urls = meta.at("filter").at("drop_urls").get<bool>();
    model.oov.seed = meta.at("oov").at("seed").get<std::uint64_t>();
    model.oov.range_half_width = meta.at("oov").at("range_half_width").get<double>();
    model.stopwords = StopwordList::from_words(
        meta.at("stopwords").get<std::vector<std::string>>());

    const json& tfj = meta.at("tfidf");
    if (tfj.at("present").get<bool>()) {
      TfIdfOptions options;
      const auto mode = tfj.at("mode").get<std::string>();
      if (mode == "smoothed") options.mode = IdfMode::Smoothed;
      else if (mode == "raw") options.mode = IdfMode::RawRatio;
      else meta_error(path, "unknown tf-idf mode \"" + mode + "\"");
      options.l2_normalize = tfj.at("l2_normalize").get<bool>();
      options.min_df = tfj.at("min_df").get<std::uint64_t>();
      model.tfidf = TfIdfModel::from_parts(
          tfj.at("terms").get<std::vector<std::string>>(),
          tfj.at("doc_freq").get<std::vector<std::uint64_t>>(),
          tfj.at("doc_count").get<std::uint64_t>(), options);
    }

    const std::uint64_t payload_elems = parsed.payload.size() / 8;
    for (const json& vj : meta.at("views")) {
      ViewModel view;
      const auto vec = vj.at("vectorizer").get<std::string>();
      if (vec == "tfidf") view.spec.vectorizer = VectorizerKind::TfIdfBow;
      else if (vec == "mean") view.spec.vectorizer = VectorizerKind::MeanEmbedding;
      else if (vec == "wmean") view.spec.vectorizer = VectorizerKind::WeightedMeanEmbedding;
      else meta_error(path, "unknown vectorizer \"" + vec + "\"");
      const auto clf = vj.at("classifier").get<std::string>();
      if (clf == "svm_ovo") view.spec.classifier = ViewClassifier::SvmOvO;
      else if (clf == "logreg_ovr") view.spec.classifier = ViewClassifier::LogisticOvR;
      else meta_error(path, "unknown classifier \"" + clf + "\"");
      view.spec.weight = vj.at("weight").get<double>();

      const json& mj = vj.at("model");
      const auto strategy = mj.at("strategy").get<std::string>();
      if (strategy == "ovr") view.classifier.strategy = MulticlassStrategy::OneVsRest;
      else if (strategy == "ovo") view.classifier.strategy = MulticlassStrategy::OneVsOne;
      else meta_error(path, "unknown strategy \"" + strategy + "\"");
      const auto loss = mj.at("loss").get<std::string>();
      if (loss == "hinge") view.classifier.loss = LossKind::Hinge;
      else if (loss == "logistic") view.classifier.loss = LossKind::Logistic;
      else meta_error(path, "unknown loss \"" + loss + "\"");
      view.classifier.n_classes = mj.at("n_classes").get<std::uint64_t>();
      view.classifier.feature_dim = mj.at("feature_dim").get<std::uint64_t>();
      if (view.classifier.n_classes != kNumClasses) {
        meta_error(path, "unexpected class count");
      }

      for (const json& uj : mj.at("units")) {
        BinaryUnit unit;
        unit.positive_class = uj.at("positive_class").get<int>();
        unit.negative_class = uj.at("negative_class").get<int>();
        if (unit.positive_class < 0 ||
            static_cast<std::size_t>(unit.positive_class) >= view.classifier.n_classes ||
            unit.negative_class < -1 ||
            unit.negative_class >= static_cast<int>(view.classifier.n_classes)) {
          meta_error(path, "unit class index out of range");
        }
        unit.model.loss = view.classifier.loss;
        unit.model.bias = uj.at("bias").get<double>();
        const std::uint64_t offset = uj.at("weights_offset").get<std::uint64_t>();
        const std::uint64_t len = uj.at("weights_len").get<std::uint64_t>();
        if (len != view.classifier.feature_dim) {
          meta_error(path, "unit weight length disagrees with feature dim");
        }
        if (offset > payload_elems || payload_elems - offset < len) {
          meta_error(path, "unit weights overrun payload");
        }
        unit.model.weights.resize(len);
        for (std::uint64_t i = 0; i < len; ++i) {
          unit.model.weights[i] = payload_f64(parsed.payload, offset + i);
        }
        if (!uj.at("platt").is_null()) {
          PlattCalibration platt;
          platt.a = uj.at("platt").at("a").get<double>();
          platt.b = uj.at("platt").at("b").get<double>();
          unit.platt = platt;
        }
        view.classifier.units.push_back(std::move(unit));
      }
      out.model.views.push_back(std::move(view));
    }
  } catch (const json::exception& e) {
    meta_error(path, std::string("metadata schema: ") + e.what());
  }

  if (out.model.needs_tfidf() && !out.model.tfidf) {
    meta_error(path, "views need tf-idf state but none is stored");
  }
  if (out.model.needs_embeddings()) {
    if (!embeddings) {
      raise(Errc::ConfigError,
            "bundle has embedding views; an embedding table is required");
    }
    for (const auto& view : out.model.views) {
      if (view_needs_embeddings(view.spec) &&
          view.classifier.feature_dim != embeddings->dim()) {
        raise(Errc::DimensionMismatch,
              "bundle expects " + std::to_string(view.classifier.feature_dim) +
                  "-dim embeddings, table has " + std::to_string(embeddings->dim()));
      }
    }
    out.model.embeddings = std::move(embeddings);
  }
  return out;
}

BundleInfo inspect_bundle(const std::filesystem::path& path) {
  ParsedBundle parsed = read_bundle_file(path);
  BundleInfo info;
  info.format_version = parsed.format_version;
  try {
    const json& meta = parsed.meta;
    check_class_order(path, meta);
    info.class_order = meta.at("class_order").get<std::vector<std::string>>();
    info.embedding_digest = meta.at("embedding_digest").get<std::string>();
    info.stopword_count = meta.at("stopwords").size();
    const json& tfj = meta.at("tfidf");
    if (tfj.at("present").get<bool>()) {
      info.vocabulary_size = tfj.at("terms").size();
    }
    for (const json& vj : meta.at("views")) {
      const auto vec = vj.at("vectorizer").get<std::string>();
      const auto clf = vj.at("classifier").get<std::string>();
      info.views.push_back(vec + ":" + clf);
      info.view_weights.push_back(vj.at("weight").get<double>());
      info.needs_embeddings |= (vec == "mean" || vec == "wmean");
    }
  } catch (const json::exception& e) {
    meta_error(path, std::string("metadata schema: ") + e.what());
  }
  return info;
}

}  // namespace mvsenti
