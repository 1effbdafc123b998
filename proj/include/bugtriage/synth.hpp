#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "bugtriage/corpus.hpp"

namespace bugtriage {

/// Categorical field model. Bug reports draw from a pool of `bug_values`,
/// non-bugs from a pool of `nonbug_values`; with probability 1 - affinity a
/// report draws from the other label's pool instead. Within a pool, value r
/// (0-based) has weight 1 / (r + 1)^zipf.
struct CategoricalSpec {
  std::size_t bug_values = 1;
  std::size_t nonbug_values = 1;
  double affinity = 0.5;
  double zipf = 1.0;
};

/// Summary text model over generated pseudo-words. Each summary has a
/// uniform length in [min_length, max_length]; every token comes from the
/// report label's own vocabulary with probability label_token_probability,
/// otherwise from the shared vocabulary. Zipf weights within each vocabulary.
struct SummarySpec {
  std::size_t shared_vocabulary = 200;
  std::size_t label_vocabulary = 50;  // per label
  double label_token_probability = 0.2;
  std::size_t min_length = 4;
  std::size_t max_length = 10;
  double zipf = 1.0;
};

enum class Sampling { Exact, Random };

/// Calibrated generator settings. Probabilities are indexed [label][intention]
/// with Label::NonBug = 0, Label::Bug = 1 and Explanation = 0, Suggestion = 1.
struct SynthSpec {
  std::string name = "synthetic";
  std::size_t total = 0;
  double bug_fraction = 0.5;
  std::array<std::array<double, 2>, 2> intention_given_label{{{0.5, 0.5}, {0.5, 0.5}}};
  Sampling sampling = Sampling::Exact;
  SummarySpec summary;
  CategoricalSpec product;
  CategoricalSpec component;
  CategoricalSpec reporter;
  /// Severity distribution per label, canonical severity -> weight.
  std::array<std::map<std::string, double>, 2> severity;
  std::uint64_t seed = 42;
};

/// Parses a spec file body. Label composition is given either as
/// "joint_counts" ({"bug": {"explanation": n, "suggestion": n}, "non-bug": ...},
/// which also fixes total) or as "total", "bug_fraction" and
/// "intention_given_label". Throws InputError on violated invariants.
SynthSpec synth_spec_from_json(const nlohmann::json& j);
SynthSpec load_synth_spec(const std::string& path);
/// Throws InputError when probabilities leave [0, 1], conditional rows do
/// not sum to 1, total is 0 or a pool is empty.
void validate(const SynthSpec& spec);

/// Exact sampling reproduces round(total * bug_fraction) bugs and, per label,
/// round(n_label * P(explanation | label)) explanations, in shuffled order.
/// Random sampling draws label and intention independently per report.
/// Same spec and seed give the same dataset.
Dataset generate_synthetic(const SynthSpec& spec);

/// Pseudo-word for vocabulary index i: consonant-vowel syllables with a
/// closing consonant, chosen so Porter stemming leaves it unchanged.
std::string pseudo_word(std::size_t index);

}  // namespace bugtriage
