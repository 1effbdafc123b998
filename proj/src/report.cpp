#include "bugtriage/report.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "bugtriage/csv.hpp"
#include "bugtriage/error.hpp"

namespace bugtriage {

namespace {

std::string fixed(double v) { return fmt::format("{:.6f}", v); }

std::string undefined_flags(const Metrics& m) {
  std::string out;
  auto add = [&out](bool flag, const char* name) {
    if (!flag) return;
    if (!out.empty()) out += ';';
    out += name;
  };
  add(m.precision_undefined, "precision");
  add(m.recall_undefined, "recall");
  add(m.f_measure_undefined, "f_measure");
  return out;
}

struct MetricColumn {
  const char* title;
  double Metrics::*field;
};

constexpr MetricColumn kMetricColumns[] = {{"Accuracy", &Metrics::accuracy},
                                           {"Precision", &Metrics::precision},
                                           {"Recall", &Metrics::recall},
                                           {"F-measure", &Metrics::f_measure}};

}  // namespace

void write_results_csv(std::ostream& out, const AblationTable& table) {
  csv::write_row(out, csv::Row{"dataset", "mode", "classifier", "seed", "fold", "tp", "tn", "fp",
                               "fn", "accuracy", "precision", "recall", "f_measure", "undefined"});
  for (const auto& run : table.runs) {
    for (std::size_t f = 0; f < run.cv.folds.size(); ++f) {
      const auto& fold = run.cv.folds[f];
      const auto& m = fold.metrics;
      csv::write_row(out, csv::Row{table.datasets[run.dataset],
                                   std::string(to_string(table.modes[run.mode])),
                                   std::string(to_string(table.classifiers[run.classifier])),
                                   std::to_string(table.seeds[run.seed]), std::to_string(f),
                                   std::to_string(fold.confusion.tp), std::to_string(fold.confusion.tn),
                                   std::to_string(fold.confusion.fp), std::to_string(fold.confusion.fn),
                                   fixed(m.accuracy), fixed(m.precision), fixed(m.recall),
                                   fixed(m.f_measure), undefined_flags(m)});
    }
  }
}

void write_ablation_table(std::ostream& out, const AblationTable& table) {
  fmt::print(out, "Mean over {} seed(s) of cross-validated scores, in percent\n",
             table.seeds.size());
  for (std::size_t d = 0; d < table.datasets.size(); ++d) {
    fmt::print(out, "\n== {} ==\n", table.datasets[d]);
    for (const auto& metric : kMetricColumns) {
      fmt::print(out, "\n{:<22}", metric.title);
      for (ClassifierKind c : table.classifiers) fmt::print(out, "{:>8}", display_name(c));
      out << '\n';
      for (std::size_t m = 0; m < table.modes.size(); ++m) {
        fmt::print(out, "{:<22}", to_string(table.modes[m]));
        for (std::size_t c = 0; c < table.classifiers.size(); ++c) {
          fmt::print(out, "{:>8.1f}", 100.0 * (table.cell(d, m, c).*metric.field));
        }
        out << '\n';
      }
    }
  }
}

void write_cv_table(std::ostream& out, const CvResult& result) {
  fmt::print(out, "{} / {} / seed {} / {} folds\n", result.classifier, to_string(result.mode),
             result.seed, result.folds.size());
  fmt::print(out, "{:<6}{:>6}{:>6}{:>6}{:>6}{:>11}{:>11}{:>11}{:>11}\n", "fold", "TP", "TN", "FP",
             "FN", "accuracy", "precision", "recall", "f_measure");
  for (std::size_t f = 0; f < result.folds.size(); ++f) {
    const auto& cm = result.folds[f].confusion;
    const auto& m = result.folds[f].metrics;
    fmt::print(out, "{:<6}{:>6}{:>6}{:>6}{:>6}{:>11.4f}{:>11.4f}{:>11.4f}{:>11.4f}\n", f, cm.tp,
               cm.tn, cm.fp, cm.fn, m.accuracy, m.precision, m.recall, m.f_measure);
  }
  const auto& m = result.mean;
  fmt::print(out, "{:<30}{:>11.4f}{:>11.4f}{:>11.4f}{:>11.4f}\n", "mean", m.accuracy, m.precision,
             m.recall, m.f_measure);
  if (const auto flags = undefined_flags(m); !flags.empty()) {
    fmt::print(out, "undefined in some fold (scored 0): {}\n", flags);
  }
}

void render_report(const std::string& dir, const AblationTable& table) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir + ": " + ec.message());
  auto write = [&](const char* name, auto&& fn) {
    const auto path = (fs::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    fn(out);
    if (!out) throw Error("cannot write " + path);
  };
  write("results.csv", [&](std::ostream& o) { write_results_csv(o, table); });
  write("table.txt", [&](std::ostream& o) { write_ablation_table(o, table); });
}

}  // namespace bugtriage
