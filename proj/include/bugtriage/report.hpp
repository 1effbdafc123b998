#pragma once

#include <iosfwd>
#include <string>

#include "bugtriage/ablation.hpp"
#include "bugtriage/cross_validation.hpp"

namespace bugtriage {

/// Results file: CSV with header
///   dataset,mode,classifier,seed,fold,tp,tn,fp,fn,accuracy,precision,recall,f_measure,undefined
/// one record per (dataset, seed, mode, classifier, fold) in run order. Reals
/// have six decimals; `undefined` lists flagged metrics separated by ';'.
void write_results_csv(std::ostream& out, const AblationTable& table);

/// Per dataset, one block per metric: rows are feature modes, columns are
/// classifiers, cells are the mean over seeds in percent.
void write_ablation_table(std::ostream& out, const AblationTable& table);

/// Per-fold confusion counts and metrics followed by the mean row.
void write_cv_table(std::ostream& out, const CvResult& result);

/// Writes <dir>/results.csv and <dir>/table.txt, creating `dir` if needed.
/// Throws Error when the directory or files cannot be written.
void render_report(const std::string& dir, const AblationTable& table);

}  // namespace bugtriage
