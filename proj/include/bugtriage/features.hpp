#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bugtriage/corpus.hpp"
#include "bugtriage/embedding.hpp"
#include "bugtriage/feature_matrix.hpp"
#include "bugtriage/preprocess.hpp"

namespace bugtriage {

/// Non-summary fields scored by TF-IDF, in matrix column order.
enum class FeatureField { Product, Component, Reporter, Severity, Intention };

inline constexpr std::array<FeatureField, 5> kAllFields = {
    FeatureField::Product, FeatureField::Component, FeatureField::Reporter,
    FeatureField::Severity, FeatureField::Intention};

std::string_view field_name(FeatureField field);
/// Column tag: Tp, Tc, Tr, Ts, Ta.
std::string_view field_column(FeatureField field);
std::string field_value(const BugReport& report, FeatureField field);

enum class FeatureMode { Text, TextFreq, TextFreqIntention };

inline constexpr std::array<FeatureMode, 3> kAllModes = {
    FeatureMode::Text, FeatureMode::TextFreq, FeatureMode::TextFreqIntention};

/// "Text", "Text+Freq", "Text+Freq+Intention".
std::string_view to_string(FeatureMode mode);
/// Case-insensitive; '+', '-' and '_' are interchangeable separators.
std::optional<FeatureMode> parse_feature_mode(std::string_view text);
std::vector<FeatureField> frequency_fields(FeatureMode mode);

/// (nw / n) * ln(d / (dw + 1)).
double tfidf(double nw, double n, double d, double dw);

/// Document frequencies of categorical field values.
///
/// Each categorical field holds exactly one value per report, so the term
/// frequency is 1/1 and a score reduces to ln(D / (Dw + 1)). Values absent
/// from training have Dw = 0. Scores go negative when Dw + 1 > D.
class TfidfModel {
 public:
  using Table = std::map<std::string, std::size_t>;

  TfidfModel() = default;
  TfidfModel(std::size_t documents, std::map<FeatureField, Table> tables);

  std::size_t documents() const noexcept { return documents_; }
  std::size_t document_frequency(FeatureField field, const std::string& value) const;
  double score(FeatureField field, const std::string& value) const;
  const std::map<FeatureField, Table>& tables() const noexcept { return tables_; }

  friend bool operator==(const TfidfModel&, const TfidfModel&) = default;

 private:
  std::size_t documents_ = 0;
  std::map<FeatureField, Table> tables_;
};

/// Throws InputError on an empty training set.
TfidfModel fit_tfidf(const Dataset& train, std::span<const FeatureField> fields = kAllFields);
double tfidf_score(const TfidfModel& model, FeatureField field, const std::string& value);

using Embeddings = std::vector<std::vector<double>>;

/// Embeds each report's preprocessed summary, in dataset order.
Embeddings embed_dataset(const Dataset& ds, Embedder& embedder, const StopwordList& stopwords);

/// M = [frequency block | embedding block]. The frequency block holds the
/// fields of `mode` in the order Tp, Tc, Tr, Ts, Ta; the embedding block is
/// V1..Vn. Labels are never read.
FeatureMatrix build_features(const Dataset& ds, FeatureMode mode, const TfidfModel& tfidf,
                             const Embeddings& embeddings);
FeatureMatrix build_features(const Dataset& ds, FeatureMode mode, const TfidfModel& tfidf,
                             Embedder& embedder, const StopwordList& stopwords);

struct MinMaxParams {
  std::vector<double> min;
  std::vector<double> max;
  friend bool operator==(const MinMaxParams&, const MinMaxParams&) = default;
};

MinMaxParams fit_minmax(const FeatureMatrix& train);
/// X' = (X - Xmin) / (Xmax - Xmin), clamped to [0, 1]; zero-range columns map to 0.
FeatureMatrix apply_minmax(const MinMaxParams& params, const FeatureMatrix& m);

}  // namespace bugtriage
