#include "bugtriage/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "bugtriage/error.hpp"
#include "bugtriage/random.hpp"

namespace bugtriage {

using nlohmann::json;

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprtvz";
constexpr std::string_view kVowels = "aiou";
constexpr std::string_view kFinals = "dkmpt";

std::size_t label_index(Label l) { return static_cast<std::size_t>(l); }

/// Cumulative Zipf weights over `n` ranks.
class ZipfTable {
 public:
  ZipfTable(std::size_t n, double exponent) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      sum += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
      cumulative_.push_back(sum);
    }
  }
  std::size_t draw(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

class CategoricalSampler {
 public:
  CategoricalSampler(const CategoricalSpec& spec, std::string prefix)
      : spec_(spec),
        prefix_(std::move(prefix)),
        bug_(spec.bug_values, spec.zipf),
        nonbug_(spec.nonbug_values, spec.zipf) {}

  std::string draw(Rng& rng, Label label) const {
    const bool own = rng.uniform() < spec_.affinity;
    const bool bug_pool = (label == Label::Bug) == own;
    const std::size_t index = bug_pool ? bug_.draw(rng) : spec_.bug_values + nonbug_.draw(rng);
    return fmt::format("{}-{:03}", prefix_, index + 1);
  }

 private:
  CategoricalSpec spec_;
  std::string prefix_;
  ZipfTable bug_;
  ZipfTable nonbug_;
};

class WeightedSampler {
 public:
  explicit WeightedSampler(const std::map<std::string, double>& weights) {
    double sum = 0.0;
    for (const auto& [value, w] : weights) {
      sum += w;
      values_.push_back(value);
      cumulative_.push_back(sum);
    }
  }
  const std::string& draw(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return values_[std::min<std::size_t>(it - cumulative_.begin(), values_.size() - 1)];
  }

 private:
  std::vector<std::string> values_;
  std::vector<double> cumulative_;
};

template <typename T>
void read_if(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InputError(where + ": unknown key '" + key + "'");
    }
  }
}

CategoricalSpec categorical_from_json(const json& j, const std::string& where) {
  check_keys(j, {"bug_values", "nonbug_values", "affinity", "zipf"}, where);
  CategoricalSpec c;
  read_if(j, "bug_values", c.bug_values);
  read_if(j, "nonbug_values", c.nonbug_values);
  read_if(j, "affinity", c.affinity);
  read_if(j, "zipf", c.zipf);
  return c;
}

std::array<double, 2> intention_row(const json& j, const std::string& where) {
  check_keys(j, {"explanation", "suggestion"}, where);
  return {j.at("explanation").get<double>(), j.at("suggestion").get<double>()};
}

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

void check_categorical(const CategoricalSpec& c, const std::string& name) {
  if (c.bug_values == 0 || c.nonbug_values == 0) throw InputError("synth: " + name + " pool is empty");
  if (!probability(c.affinity)) throw InputError("synth: " + name + " affinity outside [0, 1]");
  if (!(c.zipf >= 0.0)) throw InputError("synth: " + name + " zipf must be >= 0");
}

}  // namespace

std::string pseudo_word(std::size_t index) {
  std::string word;
  std::size_t rest = index / kFinals.size();
  const std::size_t syllables = kConsonants.size() * kVowels.size();
  for (int s = 0; s < 3; ++s) {
    const std::size_t syl = rest % syllables;
    rest /= syllables;
    word += kConsonants[syl / kVowels.size()];
    word += kVowels[syl % kVowels.size()];
  }
  if (rest != 0) throw InputError("pseudo_word: index too large");
  word += kFinals[index % kFinals.size()];
  return word;
}

void validate(const SynthSpec& spec) {
  if (spec.total == 0) throw InputError("synth: total must be positive");
  if (!probability(spec.bug_fraction)) throw InputError("synth: bug_fraction outside [0, 1]");
  for (const auto& row : spec.intention_given_label) {
    if (!probability(row[0]) || !probability(row[1])) {
      throw InputError("synth: intention probability outside [0, 1]");
    }
    if (std::abs(row[0] + row[1] - 1.0) > 1e-9) {
      throw InputError("synth: intention_given_label row does not sum to 1");
    }
  }
  const auto& s = spec.summary;
  if (s.shared_vocabulary == 0 || s.label_vocabulary == 0) throw InputError("synth: empty vocabulary");
  if (!probability(s.label_token_probability)) {
    throw InputError("synth: label_token_probability outside [0, 1]");
  }
  if (s.min_length == 0 || s.min_length > s.max_length) {
    throw InputError("synth: need 1 <= min_length <= max_length");
  }
  if (!(s.zipf >= 0.0)) throw InputError("synth: summary zipf must be >= 0");
  check_categorical(spec.product, "product");
  check_categorical(spec.component, "component");
  check_categorical(spec.reporter, "reporter");
  for (const auto& dist : spec.severity) {
    double sum = 0.0;
    for (const auto& [value, w] : dist) {
      if (!canonical_severity(value) || *canonical_severity(value) != value) {
        throw InputError("synth: unknown severity '" + value + "'");
      }
      if (!(w >= 0.0)) throw InputError("synth: negative severity weight");
      sum += w;
    }
    if (!(sum > 0.0)) throw InputError("synth: severity distribution is empty");
  }
}

SynthSpec synth_spec_from_json(const json& j) {
  try {
    check_keys(j,
               {"name", "seed", "total", "bug_fraction", "intention_given_label", "joint_counts",
                "sampling", "summary", "fields", "severity"},
               "synth spec");
    SynthSpec spec;
    read_if(j, "name", spec.name);
    read_if(j, "seed", spec.seed);

    if (j.contains("joint_counts")) {
      if (j.contains("total") || j.contains("bug_fraction") || j.contains("intention_given_label")) {
        throw InputError("synth spec: joint_counts excludes total/bug_fraction/intention_given_label");
      }
      const auto& jc = j.at("joint_counts");
      check_keys(jc, {"bug", "non-bug"}, "joint_counts");
      std::array<std::array<double, 2>, 2> counts{};
      for (Label l : {Label::NonBug, Label::Bug}) {
        const auto& row = jc.at(std::string(to_string(l)));
        check_keys(row, {"explanation", "suggestion"}, "joint_counts");
        counts[label_index(l)] = {static_cast<double>(row.at("explanation").get<std::size_t>()),
                                  static_cast<double>(row.at("suggestion").get<std::size_t>())};
      }
      const double bug = counts[1][0] + counts[1][1];
      const double nonbug = counts[0][0] + counts[0][1];
      spec.total = static_cast<std::size_t>(bug + nonbug);
      spec.bug_fraction = spec.total ? bug / static_cast<double>(spec.total) : 0.0;
      for (std::size_t l = 0; l < 2; ++l) {
        const double n = counts[l][0] + counts[l][1];
        spec.intention_given_label[l] =
            n > 0 ? std::array<double, 2>{counts[l][0] / n, 1.0 - counts[l][0] / n}
                  : std::array<double, 2>{0.5, 0.5};
      }
    } else {
      spec.total = j.at("total").get<std::size_t>();
      spec.bug_fraction = j.at("bug_fraction").get<double>();
      const auto& cond = j.at("intention_given_label");
      check_keys(cond, {"bug", "non-bug"}, "intention_given_label");
      spec.intention_given_label[1] = intention_row(cond.at("bug"), "intention_given_label.bug");
      spec.intention_given_label[0] = intention_row(cond.at("non-bug"), "intention_given_label.non-bug");
    }

    const auto sampling = j.value("sampling", std::string("exact"));
    if (sampling == "exact") {
      spec.sampling = Sampling::Exact;
    } else if (sampling == "random") {
      spec.sampling = Sampling::Random;
    } else {
      throw InputError("synth spec: sampling must be exact or random");
    }

    if (j.contains("summary")) {
      const auto& s = j.at("summary");
      check_keys(s,
                 {"shared_vocabulary", "label_vocabulary", "label_token_probability", "min_length",
                  "max_length", "zipf"},
                 "summary");
      read_if(s, "shared_vocabulary", spec.summary.shared_vocabulary);
      read_if(s, "label_vocabulary", spec.summary.label_vocabulary);
      read_if(s, "label_token_probability", spec.summary.label_token_probability);
      read_if(s, "min_length", spec.summary.min_length);
      read_if(s, "max_length", spec.summary.max_length);
      read_if(s, "zipf", spec.summary.zipf);
    }

    const auto& fields = j.at("fields");
    check_keys(fields, {"product", "component", "reporter"}, "fields");
    spec.product = categorical_from_json(fields.at("product"), "fields.product");
    spec.component = categorical_from_json(fields.at("component"), "fields.component");
    spec.reporter = categorical_from_json(fields.at("reporter"), "fields.reporter");

    const auto& sev = j.at("severity");
    check_keys(sev, {"bug", "non-bug"}, "severity");
    for (Label l : {Label::NonBug, Label::Bug}) {
      for (const auto& [value, w] : sev.at(std::string(to_string(l))).items()) {
        spec.severity[label_index(l)][value] = w.get<double>();
      }
    }
    validate(spec);
    return spec;
  } catch (const json::exception& ex) {
    throw InputError(std::string("synth spec: ") + ex.what());
  }
}

SynthSpec load_synth_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw InputError(path + ": " + ex.what());
  }
  return synth_spec_from_json(j);
}

Dataset generate_synthetic(const SynthSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  const auto& cond = spec.intention_given_label;

  std::vector<std::pair<Label, Intention>> cells;
  cells.reserve(spec.total);
  if (spec.sampling == Sampling::Exact) {
    const auto n_bug = static_cast<std::size_t>(std::llround(static_cast<double>(spec.total) * spec.bug_fraction));
    for (Label l : {Label::Bug, Label::NonBug}) {
      const std::size_t n = l == Label::Bug ? n_bug : spec.total - n_bug;
      const auto n_expl = static_cast<std::size_t>(
          std::llround(static_cast<double>(n) * cond[label_index(l)][0]));
      for (std::size_t i = 0; i < n; ++i) {
        cells.emplace_back(l, i < n_expl ? Intention::Explanation : Intention::Suggestion);
      }
    }
    rng.shuffle(std::span(cells));
  } else {
    for (std::size_t i = 0; i < spec.total; ++i) {
      const Label l = rng.uniform() < spec.bug_fraction ? Label::Bug : Label::NonBug;
      const Intention in =
          rng.uniform() < cond[label_index(l)][0] ? Intention::Explanation : Intention::Suggestion;
      cells.emplace_back(l, in);
    }
  }

  const CategoricalSampler product(spec.product, "product");
  const CategoricalSampler component(spec.component, "component");
  const CategoricalSampler reporter(spec.reporter, "reporter");
  const std::array<WeightedSampler, 2> severity{WeightedSampler(spec.severity[0]),
                                                WeightedSampler(spec.severity[1])};
  const auto& s = spec.summary;
  const ZipfTable shared(s.shared_vocabulary, s.zipf);
  const ZipfTable own(s.label_vocabulary, s.zipf);

  Dataset ds;
  ds.source = "synth:" + spec.name;
  ds.reports.reserve(spec.total);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto [label, intention] = cells[i];
    BugReport r;
    r.id = fmt::format("{}-{:04}", spec.name, i + 1);
    r.label = label;
    r.intention = intention;
    r.product = product.draw(rng, label);
    r.component = component.draw(rng, label);
    r.reporter = reporter.draw(rng, label);
    r.severity = severity[label_index(label)].draw(rng);

    const std::size_t length = s.min_length + rng.below(s.max_length - s.min_length + 1);
    const std::size_t label_offset =
        s.shared_vocabulary + (label == Label::Bug ? 0 : s.label_vocabulary);
    for (std::size_t t = 0; t < length; ++t) {
      const std::size_t index = rng.uniform() < s.label_token_probability
                                    ? label_offset + own.draw(rng)
                                    : shared.draw(rng);
      if (t) r.summary += ' ';
      r.summary += pseudo_word(index);
    }
    ds.reports.push_back(std::move(r));
  }
  return ds;
}

}  // namespace bugtriage
