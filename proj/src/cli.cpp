#include "bugtriage/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "bugtriage/ablation.hpp"
#include "bugtriage/corpus.hpp"
#include "bugtriage/cross_validation.hpp"
#include "bugtriage/csv.hpp"
#include "bugtriage/embedding.hpp"
#include "bugtriage/error.hpp"
#include "bugtriage/parallel.hpp"
#include "bugtriage/pipeline.hpp"
#include "bugtriage/preprocess.hpp"
#include "bugtriage/report.hpp"
#include "bugtriage/synth.hpp"
#include "bugtriage/tracker.hpp"

namespace bugtriage::cli {

namespace {

struct Options {
  // global
  std::uint64_t seed = 42;
  std::size_t jobs = default_jobs();
  std::string stopwords;
  std::string embedder = "fallback";
  std::size_t embedding_dim = HashingEmbedder::kDefaultDim;
  std::string sidecar_addr = "127.0.0.1:7601";
  std::string out;
  bool print_config = false;

  // shared by dataset commands
  std::string dataset;
  std::string mode = "Text+Freq+Intention";
  std::string model = "rf";
  ClassifierConfig hyper;
  bool rf_no_bootstrap = false;
  std::size_t folds = 10;

  std::optional<double> holdout;

  std::string text;

  std::string url;
  std::string product;
  std::string token;
  int limit = 0;
  int timeout = 30;
  std::vector<std::string> statuses{"RESOLVED", "VERIFIED"};
  std::vector<std::string> resolutions{"FIXED"};

  std::vector<std::string> datasets;
  std::vector<std::string> synth_specs;
  std::vector<std::string> classifiers{"knn", "nb", "lr", "svm", "rf"};
  std::vector<std::string> modes{"Text", "Text+Freq", "Text+Freq+Intention"};
  std::size_t seeds = 10;

  std::string model_file;
  std::string input;

  std::string spec;
  std::string sampling;

  std::string train_out;
  std::string test_out;
  double test_fraction = 0.2;
};

/// Output target: the --out file when given, otherwise the command's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty()) return;
    file_.open(path, std::ios::binary);
    if (!file_) throw Error("cannot write " + path);
    stream_ = &file_;
  }
  std::ostream& stream() { return *stream_; }
  void finish(const std::string& path) {
    stream_->flush();
    if (!*stream_) throw Error("cannot write " + (path.empty() ? std::string("output") : path));
  }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

/// Prints `text` to `out` and, when --out is set, also to that file.
void emit_table(const std::string& text, const std::string& path, std::ostream& out) {
  out << text;
  if (path.empty()) return;
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path);
  file << text;
  if (!file) throw Error("cannot write " + path);
}

FeatureMode mode_or_throw(const std::string& text) {
  const auto mode = parse_feature_mode(text);
  if (!mode) throw InputError("unknown feature mode '" + text + "'");
  return *mode;
}

ClassifierConfig classifier_config(const Options& o, const std::string& name) {
  const auto kind = parse_classifier_kind(name);
  if (!kind) throw InputError("unknown classifier '" + name + "'");
  ClassifierConfig c = o.hyper;
  c.kind = *kind;
  c.seed = o.seed;
  c.rf.bootstrap = !o.rf_no_bootstrap;
  c.rf.jobs = o.jobs;
  return c;
}

StopwordList stopword_list(const Options& o) {
  return o.stopwords.empty() ? StopwordList::bundled() : StopwordList::load(o.stopwords);
}

EmbedderSpec embedder_spec(const Options& o) {
  EmbedderSpec spec;
  spec.kind = o.embedder == "sidecar" ? EmbedderKind::Sidecar : EmbedderKind::Fallback;
  spec.dim = o.embedding_dim;
  spec.sidecar_address = o.sidecar_addr;
  return spec;
}

void warn_findings(const Dataset& ds, std::ostream& err) {
  for (const auto& f : validate(ds).findings) err << "warning: " << f << '\n';
}

void add_hyperparameters(CLI::App* sub, Options& o) {
  auto& h = o.hyper;
  sub->add_option("--model", o.model, "Classifier: knn, nb, lr, svm or rf")
      ->check(CLI::IsMember({"knn", "nb", "lr", "svm", "rf"}))
      ->capture_default_str();
  sub->add_option("--k", h.knn.k, "K-NN neighbours")->capture_default_str();
  sub->add_option("--nb-var-floor", h.nb.variance_floor, "NB variance floor")->capture_default_str();
  sub->add_option("--svm-c", h.svm.c, "SVM hinge-loss weight C")->capture_default_str();
  sub->add_option("--svm-epochs", h.svm.max_epochs, "SVM maximum epochs")->capture_default_str();
  sub->add_option("--svm-tol", h.svm.tolerance, "SVM projected-gradient tolerance")
      ->capture_default_str();
  sub->add_option("--lr-step", h.lr.step, "LR gradient step")->capture_default_str();
  sub->add_option("--lr-iterations", h.lr.max_iterations, "LR maximum iterations")
      ->capture_default_str();
  sub->add_option("--lr-tol", h.lr.gradient_tolerance, "LR gradient-norm tolerance")
      ->capture_default_str();
  sub->add_option("--lr-l2", h.lr.l2, "LR L2 weight")->capture_default_str();
  sub->add_option("--lr-threshold", h.lr.threshold, "LR decision threshold on P(bug)")
      ->capture_default_str();
  sub->add_option("--rf-trees", h.rf.trees, "RF tree count")->capture_default_str();
  sub->add_option("--rf-max-features", h.rf.max_features, "RF features per split, 0 = ceil(sqrt(M))")
      ->capture_default_str();
  sub->add_option("--rf-max-depth", h.rf.max_depth, "RF maximum depth")->capture_default_str();
  sub->add_option("--rf-min-split", h.rf.min_samples_split, "RF minimum node size to split")
      ->capture_default_str();
  sub->add_flag("--rf-no-bootstrap", o.rf_no_bootstrap, "Grow every tree on the full training set");
}

void add_mode(CLI::App* sub, Options& o) {
  sub->add_option("--mode", o.mode, "Text, Text+Freq or Text+Freq+Intention")->capture_default_str();
}

// ---- commands

int cmd_stats(const Options& o, std::ostream& out, std::ostream& err) {
  const Dataset ds = load_csv(o.dataset);
  warn_findings(ds, err);
  const DatasetStats s = stats(ds);
  std::ostringstream text;
  fmt::print(text, "{}\n\n", o.dataset);
  fmt::print(text, "{:<10}{:>8}\n", "total", s.total);
  fmt::print(text, "{:<10}{:>8}\n", "bug", s.bug_count);
  fmt::print(text, "{:<10}{:>8}\n\n", "non-bug", s.nonbug_count);
  fmt::print(text, "{:<10}{:>13}{:>12}\n", "label", "explanation", "suggestion");
  for (Label l : {Label::Bug, Label::NonBug}) {
    fmt::print(text, "{:<10}{:>13}{:>12}\n", to_string(l), s.count(l, Intention::Explanation),
               s.count(l, Intention::Suggestion));
  }
  emit_table(text.str(), o.out, out);
  return 0;
}

int cmd_fetch(const Options& o, std::ostream& out, std::ostream&) {
  tracker::Query q;
  q.base_url = o.url;
  q.statuses = o.statuses;
  q.resolutions = o.resolutions;
  q.product = o.product;
  q.token = o.token;
  q.limit = o.limit;
  q.timeout_seconds = o.timeout;
  const auto reports = tracker::fetch(q);
  Sink sink(o.out, out);
  write_annotation_csv(sink.stream(), reports);
  sink.finish(o.out);
  return 0;
}

int cmd_preprocess(const Options& o, std::ostream& out, std::ostream&) {
  const StopwordList sw = stopword_list(o);
  if (o.dataset.empty() == o.text.empty()) {
    throw InputError("preprocess: give exactly one of a dataset path or --text");
  }
  Sink sink(o.out, out);
  if (!o.text.empty()) {
    sink.stream() << preprocess(o.text, sw).joined() << '\n';
  } else {
    const Dataset ds = load_csv(o.dataset);
    csv::write_row(sink.stream(), csv::Row{"id", "tokens"});
    for (const auto& r : ds.reports) {
      csv::write_row(sink.stream(), csv::Row{r.id, preprocess(r.summary, sw).joined()});
    }
  }
  sink.finish(o.out);
  return 0;
}

int cmd_featurize(const Options& o, std::ostream& out, std::ostream& err) {
  const FeatureMode mode = mode_or_throw(o.mode);
  const Dataset ds = load_csv(o.dataset);
  warn_findings(ds, err);
  if (ds.empty()) throw InputError("featurize: empty dataset");
  auto embedder = make_embedder(embedder_spec(o));
  FeatureMatrix x;
  fit_feature_pipeline(ds, embed_dataset(ds, *embedder, stopword_list(o)), mode, &x);

  Sink sink(o.out, out);
  csv::Row header{"id", "label"};
  header.insert(header.end(), x.column_names.begin(), x.column_names.end());
  csv::write_row(sink.stream(), header);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    csv::Row row{ds[r].id, std::string(to_string(ds[r].label))};
    for (double v : x.row(r)) row.push_back(fmt::format("{}", v));
    csv::write_row(sink.stream(), row);
  }
  sink.finish(o.out);
  return 0;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.out.empty()) throw InputError("train: --out <model file> is required");
  const FeatureMode mode = mode_or_throw(o.mode);
  const Dataset ds = load_csv(o.dataset);
  warn_findings(ds, err);
  const EmbedderSpec spec = embedder_spec(o);
  auto embedder = make_embedder(spec);
  const Model model =
      train_model(ds, mode, classifier_config(o, o.model), *embedder, spec, stopword_list(o));
  save_model(o.out, model);
  fmt::print(out, "trained {} on {} reports ({}, {} features) -> {}\n",
             display_name(model.classifier->kind()), ds.size(), to_string(mode),
             model.columns.size(), o.out);
  return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  const FeatureMode mode = mode_or_throw(o.mode);
  const Dataset ds = load_csv(o.dataset);
  warn_findings(ds, err);
  auto embedder = make_embedder(embedder_spec(o));
  const StopwordList sw = stopword_list(o);
  ClassifierConfig config = classifier_config(o, o.model);

  std::ostringstream text;
  if (o.holdout) {
    const auto [train, test] = train_test_split(ds, *o.holdout, o.seed);
    auto clf = make_classifier(config);
    const FoldResult r = evaluate_split(train, embed_dataset(train, *embedder, sw), test,
                                        embed_dataset(test, *embedder, sw), mode, *clf);
    CvResult shown{std::string(display_name(config.kind)), mode, o.seed, {r}, r.metrics};
    fmt::print(text, "holdout: {} train / {} test\n", train.size(), test.size());
    write_cv_table(text, shown);
  } else {
    CvOptions cv;
    cv.mode = mode;
    cv.k = o.folds;
    cv.seed = o.seed;
    cv.jobs = o.jobs;
    config.rf.jobs = 1;
    write_cv_table(text, cross_validate(ds, embed_dataset(ds, *embedder, sw), cv, config));
  }
  emit_table(text.str(), o.out, out);
  return 0;
}

int cmd_ablate(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<AblationInput> inputs;
  for (const auto& path : o.datasets) {
    auto ds = std::make_shared<const Dataset>(load_csv(path));
    warn_findings(*ds, err);
    std::string name = std::filesystem::path(path).stem().string();
    inputs.push_back({name, [ds](std::uint64_t) { return *ds; }});
  }
  for (const auto& path : o.synth_specs) {
    const SynthSpec spec = load_synth_spec(path);
    inputs.push_back({spec.name, [spec](std::uint64_t seed) {
                        SynthSpec s = spec;
                        s.seed = seed;
                        return generate_synthetic(s);
                      }});
  }
  if (inputs.empty()) throw InputError("ablate: give dataset paths and/or --synth specs");
  if (o.seeds == 0) throw InputError("ablate: --seeds must be positive");

  AblationOptions opts;
  opts.modes.clear();
  for (const auto& m : o.modes) opts.modes.push_back(mode_or_throw(m));
  for (const auto& c : o.classifiers) opts.classifiers.push_back(classifier_config(o, c));
  opts.seeds.clear();
  for (std::size_t i = 0; i < o.seeds; ++i) opts.seeds.push_back(o.seed + i);
  opts.k = o.folds;
  opts.jobs = o.jobs;

  auto embedder = make_embedder(embedder_spec(o));
  const AblationTable table = run_ablation(inputs, opts, *embedder, stopword_list(o));
  write_ablation_table(out, table);
  if (!o.out.empty()) render_report(o.out, table);
  return 0;
}

int cmd_predict(const Options& o, std::ostream& out, std::ostream&) {
  const Model model = load_model(o.model_file);
  std::ifstream in(o.input, std::ios::binary);
  if (!in) throw InputError("cannot open " + o.input);
  const bool need_intention = model.features.mode == FeatureMode::TextFreqIntention;
  const PredictionInput input = read_prediction_csv(in, need_intention);

  EmbedderSpec spec = model.embedder;
  spec.sidecar_address = o.sidecar_addr;
  auto embedder = make_embedder(spec);
  Predictions p;
  if (!input.reports.empty()) p = predict(model, input.reports, *embedder);

  const ClassifierKind kind = model.classifier->kind();
  csv::Row header = input.header;
  header.push_back("predicted_label");
  if (kind == ClassifierKind::LogisticRegression) header.push_back("pi");
  if (kind == ClassifierKind::NaiveBayes) {
    header.push_back("posterior_bug");
    header.push_back("posterior_nonbug");
  }
  Sink sink(o.out, out);
  csv::write_row(sink.stream(), header);
  for (std::size_t r = 0; r < input.rows.size(); ++r) {
    csv::Row row = input.rows[r];
    row.emplace_back(to_string(p.labels[r]));
    if (p.bug_probability && kind == ClassifierKind::LogisticRegression) {
      row.push_back(fmt::format("{:.6f}", (*p.bug_probability)[r]));
    }
    if (p.bug_probability && kind == ClassifierKind::NaiveBayes) {
      row.push_back(fmt::format("{:.6f}", (*p.bug_probability)[r]));
      row.push_back(fmt::format("{:.6f}", 1.0 - (*p.bug_probability)[r]));
    }
    csv::write_row(sink.stream(), row);
  }
  sink.finish(o.out);
  return 0;
}

int cmd_split(const Options& o, std::ostream& out, std::ostream& err) {
  const Dataset ds = load_csv(o.dataset);
  warn_findings(ds, err);
  const auto [train, test] = train_test_split(ds, o.test_fraction, o.seed);
  save_csv(o.train_out, train);
  save_csv(o.test_out, test);
  fmt::print(out, "{} train -> {}\n{} test -> {}\n", train.size(), o.train_out, test.size(), o.test_out);
  return 0;
}

int cmd_synth(const Options& o, bool seed_given, std::ostream& out, std::ostream&) {
  SynthSpec spec = load_synth_spec(o.spec);
  if (seed_given) spec.seed = o.seed;
  if (o.sampling == "exact") spec.sampling = Sampling::Exact;
  if (o.sampling == "random") spec.sampling = Sampling::Random;
  const Dataset ds = generate_synthetic(spec);
  Sink sink(o.out, out);
  write_csv(sink.stream(), ds);
  sink.finish(o.out);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Bug report classification toolkit", "bugtriage"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from a TOML or INI file; flags override it");

  auto* seed_opt = app.add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--stopwords", o.stopwords, "Stopword list file (default: bundled english-v1)")
      ->check(CLI::ExistingFile);
  app.add_option("--embedder", o.embedder, "Summary embedder: fallback or sidecar")
      ->check(CLI::IsMember({"fallback", "sidecar"}))
      ->capture_default_str();
  app.add_option("--embedding-dim", o.embedding_dim, "Fallback embedder dimension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--sidecar-addr", o.sidecar_addr, "Embedding sidecar host:port")->capture_default_str();
  app.add_option("--out", o.out, "Output file (ablate: output directory)");
  app.add_flag("--print-config", o.print_config, "Print the resolved configuration and exit");

  auto* stats_cmd = app.add_subcommand("stats", "Label and intention counts of a labeled CSV");
  stats_cmd->add_option("dataset", o.dataset, "Labeled CSV")->required()->check(CLI::ExistingFile);

  auto* fetch_cmd = app.add_subcommand("fetch", "Download resolved reports for annotation");
  fetch_cmd->add_option("--url", o.url, "Bugzilla base URL")->envname("BUGTRIAGE_TRACKER_URL")->required();
  fetch_cmd->add_option("--product", o.product, "Product filter");
  fetch_cmd->add_option("--token", o.token, "API key")->envname("BUGTRIAGE_TRACKER_TOKEN");
  fetch_cmd->add_option("--limit", o.limit, "Maximum reports, 0 = server default");
  fetch_cmd->add_option("--timeout", o.timeout, "Request timeout in seconds")->capture_default_str();
  fetch_cmd->add_option("--status", o.statuses, "Status filter")->capture_default_str();
  fetch_cmd->add_option("--resolution", o.resolutions, "Resolution filter")->capture_default_str();

  auto* prep_cmd = app.add_subcommand("preprocess", "Show preprocessed summary tokens");
  prep_cmd->add_option("dataset", o.dataset, "Labeled CSV")->check(CLI::ExistingFile);
  prep_cmd->add_option("--text", o.text, "Preprocess this text instead of a dataset");

  auto* feat_cmd = app.add_subcommand("featurize", "Write the normalized feature matrix (fitted on the whole file)");
  feat_cmd->add_option("dataset", o.dataset, "Labeled CSV")->required()->check(CLI::ExistingFile);
  add_mode(feat_cmd, o);

  auto* train_cmd = app.add_subcommand("train", "Fit a model and save it");
  train_cmd->add_option("dataset", o.dataset, "Labeled CSV")->required()->check(CLI::ExistingFile);
  add_mode(train_cmd, o);
  add_hyperparameters(train_cmd, o);

  auto* eval_cmd = app.add_subcommand("evaluate", "Cross-validate one classifier and feature mode");
  eval_cmd->add_option("dataset", o.dataset, "Labeled CSV")->required()->check(CLI::ExistingFile);
  add_mode(eval_cmd, o);
  add_hyperparameters(eval_cmd, o);
  eval_cmd->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str();
  eval_cmd->add_option("--holdout", o.holdout, "Evaluate one stratified split with this test fraction instead")
      ->check(CLI::Range(0.0, 1.0));

  auto* ablate_cmd = app.add_subcommand("ablate", "Feature-mode x classifier grid over several seeds");
  ablate_cmd->add_option("datasets", o.datasets, "Labeled CSVs")->check(CLI::ExistingFile);
  ablate_cmd->add_option("--synth", o.synth_specs, "Synthetic corpus specs, regenerated per seed")
      ->check(CLI::ExistingFile);
  ablate_cmd->add_option("--classifiers", o.classifiers, "Subset of knn,nb,lr,svm,rf")
      ->delimiter(',')
      ->capture_default_str();
  ablate_cmd->add_option("--modes", o.modes, "Subset of the feature modes")
      ->delimiter(',')
      ->capture_default_str();
  ablate_cmd->add_option("--seeds", o.seeds, "Number of seeds: seed, seed+1, ...")->capture_default_str();
  ablate_cmd->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str();
  add_hyperparameters(ablate_cmd, o);

  auto* predict_cmd = app.add_subcommand("predict", "Label reports with a saved model");
  predict_cmd->add_option("model", o.model_file, "Model file from train")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("input", o.input, "CSV to label")->required()->check(CLI::ExistingFile);

  auto* split_cmd = app.add_subcommand("split", "Stratified train/test split (8:2 by default)");
  split_cmd->add_option("dataset", o.dataset, "Labeled CSV")->required()->check(CLI::ExistingFile);
  split_cmd->add_option("--train", o.train_out, "Training CSV to write")->required();
  split_cmd->add_option("--test", o.test_out, "Test CSV to write")->required();
  split_cmd->add_option("--test-fraction", o.test_fraction, "Share of reports held out")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  auto* synth_cmd = app.add_subcommand("synth", "Generate a labeled corpus from a spec");
  synth_cmd->add_option("spec", o.spec, "Synth spec (JSON)")->required()->check(CLI::ExistingFile);
  synth_cmd->add_option("--sampling", o.sampling, "Override the spec: exact or random")
      ->check(CLI::IsMember({"exact", "random"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  if (o.print_config) {
    out << app.config_to_str(true, true);
    return 0;
  }

  try {
    if (stats_cmd->parsed()) return cmd_stats(o, out, err);
    if (fetch_cmd->parsed()) return cmd_fetch(o, out, err);
    if (prep_cmd->parsed()) return cmd_preprocess(o, out, err);
    if (feat_cmd->parsed()) return cmd_featurize(o, out, err);
    if (train_cmd->parsed()) return cmd_train(o, out, err);
    if (eval_cmd->parsed()) return cmd_evaluate(o, out, err);
    if (ablate_cmd->parsed()) return cmd_ablate(o, out, err);
    if (predict_cmd->parsed()) return cmd_predict(o, out, err);
    if (split_cmd->parsed()) return cmd_split(o, out, err);
    if (synth_cmd->parsed()) return cmd_synth(o, seed_opt->count() > 0, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace bugtriage::cli
