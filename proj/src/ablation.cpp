#include "bugtriage/ablation.hpp"

#include "bugtriage/error.hpp"
#include "bugtriage/parallel.hpp"

namespace bugtriage {

Metrics AblationTable::cell(std::size_t dataset, std::size_t mode, std::size_t classifier) const {
  std::vector<Metrics> per_seed;
  for (const auto& run : runs) {
    if (run.dataset == dataset && run.mode == mode && run.classifier == classifier) {
      per_seed.push_back(run.cv.mean);
    }
  }
  return mean(per_seed);
}

AblationTable run_ablation(const std::vector<AblationInput>& inputs, const AblationOptions& options,
                           Embedder& embedder, const StopwordList& stopwords) {
  if (inputs.empty()) throw InputError("ablate: no datasets");
  if (options.modes.empty()) throw InputError("ablate: no feature modes");
  if (options.classifiers.empty()) throw InputError("ablate: no classifiers");
  if (options.seeds.empty()) throw InputError("ablate: no seeds");

  AblationTable table;
  for (const auto& in : inputs) table.datasets.push_back(in.name);
  table.modes = options.modes;
  for (const auto& c : options.classifiers) table.classifiers.push_back(c.kind);
  table.seeds = options.seeds;

  const std::size_t n_modes = options.modes.size();
  const std::size_t n_clf = options.classifiers.size();
  const std::size_t per_corpus = n_modes * n_clf;

  for (std::size_t d = 0; d < inputs.size(); ++d) {
    for (std::size_t s = 0; s < options.seeds.size(); ++s) {
      const std::uint64_t seed = options.seeds[s];
      const Dataset ds = inputs[d].load(seed);
      const Embeddings embeddings = embed_dataset(ds, embedder, stopwords);

      std::vector<AblationRun> runs(per_corpus);
      parallel_for(per_corpus, options.jobs, [&](std::size_t cell) {
        const std::size_t m = cell / n_clf;
        const std::size_t c = cell % n_clf;
        CvOptions cv;
        cv.mode = options.modes[m];
        cv.k = options.k;
        cv.seed = seed;
        ClassifierConfig config = options.classifiers[c];
        config.rf.jobs = 1;
        runs[cell] = {d, m, c, s, cross_validate(ds, embeddings, cv, config)};
      });
      for (auto& r : runs) table.runs.push_back(std::move(r));
    }
  }
  return table;
}

}  // namespace bugtriage
