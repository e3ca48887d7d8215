#include "uood/report.hpp"

#include <cstdio>
#include <string>

namespace uood {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

void write_scores_csv(std::ostream& out, const ScoreReport& report) {
  out << "sample_index,total";
  for (Eigen::Index l = 0; l < report.per_layer.cols(); ++l) out << ",s_" << (l + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < report.total.size(); ++i) {
    out << i << ',' << fixed6(report.total[i]);
    for (Eigen::Index l = 0; l < report.per_layer.cols(); ++l) out << ',' << fixed6(report.per_layer(i, l));
    out << '\n';
  }
}

void write_eval_csv(std::ostream& out, const std::vector<EvalResult>& results) {
  out << "name,auroc,n_in,n_out,mean_in,mean_out\n";
  for (const auto& r : results) {
    out << r.name << ',' << fixed6(r.auroc) << ',' << r.n_in << ',' << r.n_out << ',' << fixed6(r.mean_score_in)
        << ',' << fixed6(r.mean_score_out) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, bool gnuplot) {
  if (gnuplot) {
    out << "# fraction auc\n";
    for (const auto& r : rows) out << fixed6(r.fraction) << ' ' << fixed6(r.auroc) << '\n';
    return;
  }
  out << "fraction,auc";
  const std::size_t layers = rows.empty() ? 0 : rows.front().components_per_layer.size();
  for (std::size_t l = 0; l < layers; ++l) out << ",k_" << (l + 1);
  out << '\n';
  for (const auto& r : rows) {
    out << fixed6(r.fraction) << ',' << fixed6(r.auroc);
    for (std::size_t k : r.components_per_layer) out << ',' << k;
    out << '\n';
  }
}

void write_class_sweep_csv(std::ostream& out, const std::vector<ClassSweepRow>& rows) {
  out << "k,auc_near,auc_far\n";
  for (const auto& r : rows) out << r.k << ',' << fixed6(r.auc_near) << ',' << fixed6(r.auc_far) << '\n';
}

void write_relative_csv(std::ostream& out, const std::vector<RelativeRow>& rows) {
  out << "name,group,auroc,relative\n";
  for (const auto& r : rows) {
    out << r.name << ',' << r.group << ',' << fixed6(r.auroc) << ',' << fixed6(r.relative) << '\n';
  }
}

}  // namespace uood
