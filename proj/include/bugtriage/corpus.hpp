#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bugtriage {

enum class Intention { Explanation, Suggestion };
enum class Label { NonBug = 0, Bug = 1 };

std::string_view to_string(Intention intention);
std::string_view to_string(Label label);
/// Case-insensitive; accepts "bug", "non-bug" (also "nonbug", "non_bug").
std::optional<Label> parse_label(std::string_view text);
std::optional<Intention> parse_intention(std::string_view text);
/// Canonical Bugzilla severity for `text` (case-insensitive, three-letter
/// abbreviations such as "enh" accepted), or nullopt for blank/unknown values.
std::optional<std::string> canonical_severity(std::string_view text);

/// One labeled report.
struct BugReport {
  std::string id;
  std::string product;
  std::string component;
  std::string reporter;
  std::string severity;
  std::string summary;
  Intention intention = Intention::Explanation;
  Label label = Label::NonBug;

  friend bool operator==(const BugReport&, const BugReport&) = default;
};

/// A report fetched from a tracker, before manual annotation.
struct UnlabeledReport {
  std::string id;
  std::string product;
  std::string component;
  std::string reporter;
  std::string severity;
  std::string summary;

  friend bool operator==(const UnlabeledReport&, const UnlabeledReport&) = default;
};

struct Dataset {
  std::vector<BugReport> reports;
  std::string source;

  std::size_t size() const noexcept { return reports.size(); }
  bool empty() const noexcept { return reports.empty(); }
  const BugReport& operator[](std::size_t i) const { return reports[i]; }

  /// Subset in the given index order; source is kept.
  Dataset select(const std::vector<std::size_t>& indices) const;
};

inline constexpr std::array<std::string_view, 8> kLabeledColumns = {
    "id", "product", "component", "reporter", "severity", "summary", "intention", "label"};
inline constexpr std::array<std::string_view, 6> kAnnotationColumns = {
    "id", "product", "component", "reporter", "severity", "summary"};

/// Loads the labeled CSV schema. Columns are matched by header name, in any
/// order; missing or extra columns raise SchemaError naming the column, bad
/// enum values or severities raise RowError, duplicate ids ValidationError.
Dataset load_csv(const std::string& path);
Dataset read_csv(std::istream& in, std::string source = "<stream>");
void write_csv(std::ostream& out, const Dataset& ds);
void save_csv(const std::string& path, const Dataset& ds);

std::vector<UnlabeledReport> read_annotation_csv(std::istream& in);
void write_annotation_csv(std::ostream& out, const std::vector<UnlabeledReport>& reports);

/// Rows to classify: the annotation columns are required, intention is
/// required only when `need_intention`, label is ignored if present. Each
/// returned report carries the parsed fields; its label is NonBug and is
/// never read by feature construction.
struct PredictionInput {
  Dataset reports;
  std::vector<std::string> header;     // columns as they appeared in the file
  std::vector<std::vector<std::string>> rows;  // raw rows, echoed on output
};
PredictionInput read_prediction_csv(std::istream& in, bool need_intention);

struct ValidationReport {
  std::vector<std::string> findings;
  bool valid() const noexcept { return findings.empty(); }
};

/// Flags empty summaries, duplicate ids and single-class datasets.
ValidationReport validate(const Dataset& ds);

struct DatasetStats {
  std::size_t total = 0;
  std::size_t bug_count = 0;
  std::size_t nonbug_count = 0;
  /// [label][intention], label index Bug=1 / NonBug=0, intention index
  /// Explanation=0 / Suggestion=1.
  std::array<std::array<std::size_t, 2>, 2> intention_by_label{};

  std::size_t count(Label label, Intention intention) const {
    return intention_by_label[static_cast<std::size_t>(label)][static_cast<std::size_t>(intention)];
  }
  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

DatasetStats stats(const Dataset& ds);

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;  // fold index per report

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Stratified by label. Each class is shuffled with `seed`, then the classes
/// are dealt round-robin onto folds with one running counter, so fold sizes
/// and per-fold class counts both differ by at most one.
FoldPlan stratified_kfold(const Dataset& ds, std::size_t k, std::uint64_t seed);

/// Stratified split; |test| = round(total * test_fraction). Both halves keep
/// the input order.
std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double test_fraction,
                                             std::uint64_t seed);

}  // namespace bugtriage
