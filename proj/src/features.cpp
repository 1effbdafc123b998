#include <algorithm>
#include <cmath>

#include "bugtriage/error.hpp"
#include "bugtriage/features.hpp"

namespace bugtriage {

std::string_view field_name(FeatureField field) {
  switch (field) {
    case FeatureField::Product: return "product";
    case FeatureField::Component: return "component";
    case FeatureField::Reporter: return "reporter";
    case FeatureField::Severity: return "severity";
    case FeatureField::Intention: return "intention";
  }
  return "?";
}

std::string_view field_column(FeatureField field) {
  switch (field) {
    case FeatureField::Product: return "Tp";
    case FeatureField::Component: return "Tc";
    case FeatureField::Reporter: return "Tr";
    case FeatureField::Severity: return "Ts";
    case FeatureField::Intention: return "Ta";
  }
  return "?";
}

std::string field_value(const BugReport& report, FeatureField field) {
  switch (field) {
    case FeatureField::Product: return report.product;
    case FeatureField::Component: return report.component;
    case FeatureField::Reporter: return report.reporter;
    case FeatureField::Severity: return report.severity;
    case FeatureField::Intention: return std::string(to_string(report.intention));
  }
  return {};
}

std::string_view to_string(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::Text: return "Text";
    case FeatureMode::TextFreq: return "Text+Freq";
    case FeatureMode::TextFreqIntention: return "Text+Freq+Intention";
  }
  return "?";
}

std::optional<FeatureMode> parse_feature_mode(std::string_view text) {
  std::string key;
  for (char c : text) {
    if (c == '-' || c == '_') c = '+';
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    key.push_back(c);
  }
  if (key == "text") return FeatureMode::Text;
  if (key == "text+freq") return FeatureMode::TextFreq;
  if (key == "text+freq+intention") return FeatureMode::TextFreqIntention;
  return std::nullopt;
}

std::vector<FeatureField> frequency_fields(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::Text:
      return {};
    case FeatureMode::TextFreq:
      return {FeatureField::Product, FeatureField::Component, FeatureField::Reporter,
              FeatureField::Severity};
    case FeatureMode::TextFreqIntention:
      return {kAllFields.begin(), kAllFields.end()};
  }
  return {};
}

double tfidf(double nw, double n, double d, double dw) { return nw / n * std::log(d / (dw + 1.0)); }

TfidfModel::TfidfModel(std::size_t documents, std::map<FeatureField, Table> tables)
    : documents_(documents), tables_(std::move(tables)) {
  for (const auto& [field, table] : tables_) {
    for (const auto& [value, count] : table) {
      if (count > documents_) throw InputError("tfidf: document frequency exceeds corpus size");
    }
  }
}

std::size_t TfidfModel::document_frequency(FeatureField field, const std::string& value) const {
  auto t = tables_.find(field);
  if (t == tables_.end()) return 0;
  auto it = t->second.find(value);
  return it == t->second.end() ? 0 : it->second;
}

double TfidfModel::score(FeatureField field, const std::string& value) const {
  return tfidf(1.0, 1.0, static_cast<double>(documents_),
               static_cast<double>(document_frequency(field, value)));
}

TfidfModel fit_tfidf(const Dataset& train, std::span<const FeatureField> fields) {
  if (train.empty()) throw InputError("fit_tfidf: empty training set");
  std::map<FeatureField, TfidfModel::Table> tables;
  for (FeatureField f : fields) {
    auto& table = tables[f];
    for (const auto& r : train.reports) ++table[field_value(r, f)];
  }
  return TfidfModel(train.size(), std::move(tables));
}

double tfidf_score(const TfidfModel& model, FeatureField field, const std::string& value) {
  return model.score(field, value);
}

Embeddings embed_dataset(const Dataset& ds, Embedder& embedder, const StopwordList& stopwords) {
  std::vector<TokenSequence> texts;
  texts.reserve(ds.size());
  for (const auto& r : ds.reports) texts.push_back(preprocess(r.summary, stopwords));
  return embedder.embed_batch(texts);
}

FeatureMatrix build_features(const Dataset& ds, FeatureMode mode, const TfidfModel& tfidf,
                             const Embeddings& embeddings) {
  if (embeddings.size() != ds.size()) {
    throw Error("build_features: embedding count does not match dataset size");
  }
  const auto fields = frequency_fields(mode);
  const std::size_t dim = embeddings.empty() ? 0 : embeddings.front().size();
  FeatureMatrix m(ds.size(), fields.size() + dim);
  m.frequency_columns = fields.size();
  for (FeatureField f : fields) m.column_names.emplace_back(field_column(f));
  for (std::size_t i = 0; i < dim; ++i) m.column_names.push_back("V" + std::to_string(i + 1));

  for (std::size_t r = 0; r < ds.size(); ++r) {
    const BugReport& report = ds[r];
    m.row_ids.push_back(report.id);
    auto row = m.row(r);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      row[c] = tfidf.score(fields[c], field_value(report, fields[c]));
    }
    if (embeddings[r].size() != dim) throw Error("build_features: ragged embeddings");
    std::copy(embeddings[r].begin(), embeddings[r].end(), row.begin() + fields.size());
  }
  return m;
}

FeatureMatrix build_features(const Dataset& ds, FeatureMode mode, const TfidfModel& tfidf,
                             Embedder& embedder, const StopwordList& stopwords) {
  auto embeddings = embed_dataset(ds, embedder, stopwords);
  if (ds.empty()) {
    FeatureMatrix m(0, frequency_fields(mode).size() + embedder.dim());
    m.frequency_columns = frequency_fields(mode).size();
    for (FeatureField f : frequency_fields(mode)) m.column_names.emplace_back(field_column(f));
    for (std::size_t i = 0; i < embedder.dim(); ++i) m.column_names.push_back("V" + std::to_string(i + 1));
    return m;
  }
  return build_features(ds, mode, tfidf, embeddings);
}

MinMaxParams fit_minmax(const FeatureMatrix& train) {
  MinMaxParams p;
  p.min.assign(train.cols(), 0.0);
  p.max.assign(train.cols(), 0.0);
  for (std::size_t c = 0; c < train.cols(); ++c) {
    if (train.rows() == 0) break;
    double lo = train(0, c), hi = train(0, c);
    for (std::size_t r = 1; r < train.rows(); ++r) {
      lo = std::min(lo, train(r, c));
      hi = std::max(hi, train(r, c));
    }
    p.min[c] = lo;
    p.max[c] = hi;
  }
  return p;
}

FeatureMatrix apply_minmax(const MinMaxParams& params, const FeatureMatrix& m) {
  if (params.min.size() != m.cols()) throw Error("apply_minmax: width mismatch");
  FeatureMatrix out = m;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const double range = params.max[c] - params.min[c];
    for (std::size_t r = 0; r < m.rows(); ++r) {
      double v = range > 0.0 ? (m(r, c) - params.min[c]) / range : 0.0;
      out(r, c) = std::clamp(v, 0.0, 1.0);
    }
  }
  return out;
}

}  // namespace bugtriage
