#pragma once

#include <ostream>
#include <vector>

#include "uood/experiment.hpp"
#include "uood/invariant_engine.hpp"
#include "uood/maha_scorer.hpp"

namespace uood {

// CSV writers. Reals use fixed 6-decimal formatting.

/// sample_index,total,s_1,...,s_L
void write_scores_csv(std::ostream& out, const ScoreReport& report);

/// name,auroc,n_in,n_out,mean_in,mean_out
void write_eval_csv(std::ostream& out, const std::vector<EvalResult>& results);

/// fraction,auc,k_1,...,k_L; with `gnuplot` set, a commented header and
/// two whitespace-separated columns instead.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, bool gnuplot = false);

/// k,auc_near,auc_far
void write_class_sweep_csv(std::ostream& out, const std::vector<ClassSweepRow>& rows);

/// name,group,auroc,relative
void write_relative_csv(std::ostream& out, const std::vector<RelativeRow>& rows);

}  // namespace uood
