#include "bugtriage/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "bugtriage/csv.hpp"
#include "bugtriage/error.hpp"
#include "bugtriage/random.hpp"

namespace bugtriage {

namespace {

std::string lower_trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  std::string out(text.substr(first, last - first + 1));
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool is_blank(std::string_view text) {
  return text.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

// Maps header names to column positions; enforces required/allowed sets.
class Header {
 public:
  Header(const csv::Row& header, std::span<const std::string_view> required,
         std::span<const std::string_view> optional) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      const std::string name = lower_trim(header[i]);
      const bool known =
          std::find(required.begin(), required.end(), name) != required.end() ||
          std::find(optional.begin(), optional.end(), name) != optional.end();
      if (!known) throw SchemaError(name, "unexpected column: " + name);
      if (!positions_.emplace(name, i).second) {
        throw SchemaError(name, "duplicate column: " + name);
      }
    }
    for (std::string_view name : required) {
      if (!positions_.count(std::string(name))) {
        throw SchemaError(std::string(name), "missing column: " + std::string(name));
      }
    }
    width_ = header.size();
  }

  bool has(std::string_view name) const { return positions_.count(std::string(name)) != 0; }
  const std::string& get(const csv::Row& row, std::string_view name) const {
    return row[positions_.at(std::string(name))];
  }
  std::size_t width() const { return width_; }

 private:
  std::map<std::string, std::size_t> positions_;
  std::size_t width_ = 0;
};

template <typename Report>
void read_common(const Header& h, const csv::Row& row, std::size_t row_no, Report& r) {
  r.id = h.get(row, "id");
  r.product = h.get(row, "product");
  r.component = h.get(row, "component");
  r.reporter = h.get(row, "reporter");
  r.summary = h.get(row, "summary");
  const std::string& sev = h.get(row, "severity");
  auto canonical = canonical_severity(sev);
  if (!canonical) {
    throw RowError(row_no, is_blank(sev) ? "blank severity" : "unknown severity '" + sev + "'");
  }
  r.severity = *canonical;
}

void check_width(const Header& h, const csv::Row& row, std::size_t row_no) {
  if (row.size() != h.width()) {
    throw RowError(row_no, "expected " + std::to_string(h.width()) + " fields, found " +
                               std::to_string(row.size()));
  }
}

Intention parse_intention_or_throw(const std::string& text, std::size_t row_no) {
  auto v = parse_intention(text);
  if (!v) throw RowError(row_no, "invalid intention '" + text + "'");
  return *v;
}

Label parse_label_or_throw(const std::string& text, std::size_t row_no) {
  auto v = parse_label(text);
  if (!v) throw RowError(row_no, "invalid label '" + text + "'");
  return *v;
}

}  // namespace

std::string_view to_string(Intention intention) {
  return intention == Intention::Explanation ? "explanation" : "suggestion";
}

std::string_view to_string(Label label) { return label == Label::Bug ? "bug" : "non-bug"; }

std::optional<Label> parse_label(std::string_view text) {
  const std::string v = lower_trim(text);
  if (v == "bug") return Label::Bug;
  if (v == "non-bug" || v == "nonbug" || v == "non_bug") return Label::NonBug;
  return std::nullopt;
}

std::optional<Intention> parse_intention(std::string_view text) {
  const std::string v = lower_trim(text);
  if (v == "explanation") return Intention::Explanation;
  if (v == "suggestion") return Intention::Suggestion;
  return std::nullopt;
}

std::optional<std::string> canonical_severity(std::string_view text) {
  static const std::unordered_map<std::string, std::string> kSeverities = {
      {"blocker", "blocker"},   {"blo", "blocker"},    {"critical", "critical"},
      {"cri", "critical"},      {"major", "major"},    {"maj", "major"},
      {"normal", "normal"},     {"nor", "normal"},     {"minor", "minor"},
      {"min", "minor"},         {"trivial", "trivial"}, {"tri", "trivial"},
      {"enhancement", "enhancement"}, {"enh", "enhancement"},
      {"s1", "s1"}, {"s2", "s2"}, {"s3", "s3"}, {"s4", "s4"},
  };
  auto it = kSeverities.find(lower_trim(text));
  if (it == kSeverities.end()) return std::nullopt;
  return it->second;
}

Dataset Dataset::select(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.source = source;
  out.reports.reserve(indices.size());
  for (std::size_t i : indices) out.reports.push_back(reports.at(i));
  return out;
}

Dataset read_csv(std::istream& in, std::string source) {
  const auto rows = csv::read(in);
  if (rows.empty()) throw SchemaError("id", "missing header row");
  const Header header(rows.front(), kLabeledColumns, {});

  Dataset ds;
  ds.source = std::move(source);
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const csv::Row& row = rows[r];
    check_width(header, row, r);
    BugReport report;
    read_common(header, row, r, report);
    report.intention = parse_intention_or_throw(header.get(row, "intention"), r);
    report.label = parse_label_or_throw(header.get(row, "label"), r);
    if (!seen.insert(report.id).second) throw ValidationError("duplicate id: " + report.id);
    ds.reports.push_back(std::move(report));
  }
  return ds;
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return read_csv(in, path);
}

void write_csv(std::ostream& out, const Dataset& ds) {
  csv::write_row(out, csv::Row(kLabeledColumns.begin(), kLabeledColumns.end()));
  for (const auto& r : ds.reports) {
    csv::write_row(out, csv::Row{r.id, r.product, r.component, r.reporter, r.severity, r.summary,
                                 std::string(to_string(r.intention)),
                                 std::string(to_string(r.label))});
  }
}

void save_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write_csv(out, ds);
}

std::vector<UnlabeledReport> read_annotation_csv(std::istream& in) {
  const auto rows = csv::read(in);
  if (rows.empty()) throw SchemaError("id", "missing header row");
  const Header header(rows.front(), kAnnotationColumns, {});
  std::vector<UnlabeledReport> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    check_width(header, rows[r], r);
    UnlabeledReport report;
    read_common(header, rows[r], r, report);
    out.push_back(std::move(report));
  }
  return out;
}

void write_annotation_csv(std::ostream& out, const std::vector<UnlabeledReport>& reports) {
  csv::write_row(out, csv::Row(kAnnotationColumns.begin(), kAnnotationColumns.end()));
  for (const auto& r : reports) {
    csv::write_row(out, csv::Row{r.id, r.product, r.component, r.reporter, r.severity, r.summary});
  }
}

PredictionInput read_prediction_csv(std::istream& in, bool need_intention) {
  auto rows = csv::read(in);
  if (rows.empty()) throw SchemaError("id", "missing header row");
  static constexpr std::array<std::string_view, 7> kWithIntention = {
      "id", "product", "component", "reporter", "severity", "summary", "intention"};
  static constexpr std::array<std::string_view, 2> kOptionalBoth = {"intention", "label"};
  static constexpr std::array<std::string_view, 1> kOptionalLabel = {"label"};
  const Header header = need_intention ? Header(rows.front(), kWithIntention, kOptionalLabel)
                                       : Header(rows.front(), kAnnotationColumns, kOptionalBoth);
  PredictionInput input;
  input.header = rows.front();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    check_width(header, rows[r], r);
    BugReport report;
    read_common(header, rows[r], r, report);
    if (header.has("intention")) {
      report.intention = parse_intention_or_throw(header.get(rows[r], "intention"), r);
    }
    input.reports.reports.push_back(std::move(report));
    input.rows.push_back(std::move(rows[r]));
  }
  return input;
}

ValidationReport validate(const Dataset& ds) {
  ValidationReport report;
  std::unordered_set<std::string> seen;
  std::set<std::string> duplicates;
  bool has_bug = false;
  bool has_nonbug = false;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const BugReport& r = ds[i];
    if (is_blank(r.summary)) report.findings.push_back("empty summary: " + r.id);
    if (!seen.insert(r.id).second && duplicates.insert(r.id).second) {
      report.findings.push_back("duplicate id: " + r.id);
    }
    (r.label == Label::Bug ? has_bug : has_nonbug) = true;
  }
  if (!(has_bug && has_nonbug)) report.findings.push_back("single-class dataset");
  return report;
}

DatasetStats stats(const Dataset& ds) {
  DatasetStats s;
  s.total = ds.size();
  for (const auto& r : ds.reports) {
    (r.label == Label::Bug ? s.bug_count : s.nonbug_count)++;
    s.intention_by_label[static_cast<std::size_t>(r.label)][static_cast<std::size_t>(r.intention)]++;
  }
  return s;
}

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

namespace {

// Indices per label, Bug first, each shuffled with its own seeded stream.
std::array<std::vector<std::size_t>, 2> shuffled_by_label(const Dataset& ds, std::uint64_t seed) {
  std::array<std::vector<std::size_t>, 2> groups;  // [0] = Bug, [1] = NonBug
  for (std::size_t i = 0; i < ds.size(); ++i) {
    groups[ds[i].label == Label::Bug ? 0 : 1].push_back(i);
  }
  for (std::size_t g = 0; g < 2; ++g) {
    Rng rng(derive_seed(seed, g));
    rng.shuffle(std::span<std::size_t>(groups[g]));
  }
  return groups;
}

}  // namespace

FoldPlan stratified_kfold(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InputError("stratified_kfold: k must be at least 2");
  const auto groups = shuffled_by_label(ds, seed);
  for (std::size_t g = 0; g < 2; ++g) {
    if (groups[g].size() < k) {
      throw InfeasibleError("infeasible stratification: class '" +
                            std::string(to_string(g == 0 ? Label::Bug : Label::NonBug)) +
                            "' has " + std::to_string(groups[g].size()) + " reports, fewer than k=" +
                            std::to_string(k));
    }
  }
  FoldPlan plan;
  plan.k = k;
  plan.assignments.assign(ds.size(), 0);
  std::size_t counter = 0;
  for (const auto& group : groups) {
    for (std::size_t idx : group) plan.assignments[idx] = counter++ % k;
  }
  return plan;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double test_fraction,
                                             std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InputError("train_test_split: test fraction must lie in (0, 1)");
  }
  const auto groups = shuffled_by_label(ds, seed);
  const auto n_test = static_cast<std::size_t>(std::llround(ds.size() * test_fraction));

  // Largest-remainder allocation of the test quota across classes.
  std::array<std::size_t, 2> quota{};
  std::array<double, 2> remainder{};
  std::size_t assigned = 0;
  for (std::size_t g = 0; g < 2; ++g) {
    const double exact = groups[g].size() * test_fraction;
    quota[g] = static_cast<std::size_t>(std::floor(exact));
    remainder[g] = exact - quota[g];
    assigned += quota[g];
  }
  while (assigned < n_test) {
    std::size_t g = remainder[0] >= remainder[1] ? 0 : 1;
    if (quota[g] == groups[g].size()) g = 1 - g;
    ++quota[g];
    remainder[g] = -1.0;
    ++assigned;
  }

  std::vector<bool> is_test(ds.size(), false);
  for (std::size_t g = 0; g < 2; ++g) {
    for (std::size_t i = 0; i < quota[g]; ++i) is_test[groups[g][i]] = true;
  }
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < ds.size(); ++i) (is_test[i] ? test_idx : train_idx).push_back(i);
  return {ds.select(train_idx), ds.select(test_idx)};
}

}  // namespace bugtriage
