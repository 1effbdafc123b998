#include "bugtriage/pipeline.hpp"

#include <fstream>

#include "bugtriage/error.hpp"

namespace bugtriage {

using nlohmann::json;

namespace {

constexpr const char* kFormatTag = "bugtriage-model";

std::string_view kind_name(EmbedderKind kind) {
  return kind == EmbedderKind::Sidecar ? "sidecar" : "fallback";
}

FeatureField field_from_name(const std::string& name) {
  for (FeatureField f : kAllFields) {
    if (field_name(f) == name) return f;
  }
  throw InputError("model: unknown field '" + name + "'");
}

}  // namespace

FeatureMatrix FeaturePipeline::transform(const Dataset& ds, const Embeddings& embeddings) const {
  return apply_minmax(minmax, build_features(ds, mode, tfidf, embeddings));
}

FeaturePipeline fit_feature_pipeline(const Dataset& train, const Embeddings& train_embeddings,
                                     FeatureMode mode, FeatureMatrix* train_matrix) {
  FeaturePipeline p;
  p.mode = mode;
  p.tfidf = fit_tfidf(train, frequency_fields(mode));
  FeatureMatrix raw = build_features(train, mode, p.tfidf, train_embeddings);
  p.minmax = fit_minmax(raw);
  if (train_matrix) *train_matrix = apply_minmax(p.minmax, raw);
  return p;
}

LabeledMatrix labeled(FeatureMatrix x, const Dataset& ds) {
  LabeledMatrix m{std::move(x), {}};
  m.y.reserve(ds.size());
  for (const auto& r : ds.reports) m.y.push_back(r.label);
  return m;
}

Model train_model(const Dataset& train, FeatureMode mode, const ClassifierConfig& config,
                  Embedder& embedder, const EmbedderSpec& spec, const StopwordList& stopwords) {
  Model model;
  model.embedder = spec;
  model.embedder.dim = embedder.dim();
  model.embedder_identity = embedder.identity();
  model.stopwords = stopwords;
  FeatureMatrix x;
  model.features = fit_feature_pipeline(train, embed_dataset(train, embedder, stopwords), mode, &x);
  model.columns = x.column_names;
  auto clf = make_classifier(config);
  clf->fit(labeled(std::move(x), train));
  model.classifier = std::move(clf);
  return model;
}

Predictions predict(const Model& model, const Dataset& ds, Embedder& embedder) {
  if (embedder.identity() != model.embedder_identity) {
    throw InputError("model was trained with embedder '" + model.embedder_identity + "', got '" +
                     embedder.identity() + "'");
  }
  const FeatureMatrix x = model.features.transform(ds, embed_dataset(ds, embedder, model.stopwords));
  Predictions out;
  out.labels = model.classifier->predict(x);
  out.bug_probability = model.classifier->bug_probability(x);
  return out;
}

json to_json(const Model& model) {
  json tables = json::object();
  for (const auto& [field, table] : model.features.tfidf.tables()) {
    json t = json::object();
    for (const auto& [value, count] : table) t[value] = count;
    tables[std::string(field_name(field))] = t;
  }
  return json{
      {"format", kFormatTag},
      {"version", Model::kVersion},
      {"mode", to_string(model.features.mode)},
      {"embedder",
       {{"kind", kind_name(model.embedder.kind)},
        {"dim", model.embedder.dim},
        {"identity", model.embedder_identity}}},
      {"stopwords", {{"source", model.stopwords.source()}, {"words", model.stopwords.words()}}},
      {"tfidf", {{"documents", model.features.tfidf.documents()}, {"tables", tables}}},
      {"minmax", {{"min", model.features.minmax.min}, {"max", model.features.minmax.max}}},
      {"columns", model.columns},
      {"classifier", model.classifier->to_json()}};
}

Model model_from_json(const json& j) {
  if (!j.is_object() || j.value("format", "") != kFormatTag) {
    throw InputError("not a bugtriage model file");
  }
  if (j.value("version", 0) != Model::kVersion) {
    throw InputError("unsupported model version " + j.at("version").dump());
  }
  try {
    Model model;
    const auto mode = parse_feature_mode(j.at("mode").get<std::string>());
    if (!mode) throw InputError("model: unknown feature mode");
    model.features.mode = *mode;

    const auto& e = j.at("embedder");
    const auto kind = e.at("kind").get<std::string>();
    if (kind != "fallback" && kind != "sidecar") throw InputError("model: unknown embedder " + kind);
    model.embedder.kind = kind == "sidecar" ? EmbedderKind::Sidecar : EmbedderKind::Fallback;
    model.embedder.dim = e.at("dim").get<std::size_t>();
    model.embedder_identity = e.at("identity").get<std::string>();

    const auto& sw = j.at("stopwords");
    model.stopwords = StopwordList(sw.at("words").get<std::vector<std::string>>(),
                                   sw.at("source").get<std::string>());

    std::map<FeatureField, TfidfModel::Table> tables;
    for (const auto& [name, t] : j.at("tfidf").at("tables").items()) {
      auto& table = tables[field_from_name(name)];
      for (const auto& [value, count] : t.items()) table[value] = count.get<std::size_t>();
    }
    model.features.tfidf = TfidfModel(j.at("tfidf").at("documents").get<std::size_t>(), std::move(tables));

    model.features.minmax.min = j.at("minmax").at("min").get<std::vector<double>>();
    model.features.minmax.max = j.at("minmax").at("max").get<std::vector<double>>();
    model.columns = j.at("columns").get<std::vector<std::string>>();
    model.classifier = classifier_from_json(j.at("classifier"));

    const std::size_t width = model.columns.size();
    if (model.features.minmax.min.size() != width || model.features.minmax.max.size() != width ||
        model.classifier->width() != width) {
      throw InputError("model: inconsistent feature width");
    }
    return model;
  } catch (const json::exception& ex) {
    throw InputError(std::string("malformed model file: ") + ex.what());
  }
}

void save_model(const std::string& path, const Model& model) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << to_json(model).dump(1) << '\n';
  if (!out) throw Error("cannot write " + path);
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw InputError(path + ": " + ex.what());
  }
  return model_from_json(j);
}

}  // namespace bugtriage
