#pragma once

#include <map>
#include <string>
#include <vector>

#include "introsumm/common.hpp"
#include "introsumm/corpus.hpp"
#include "introsumm/rouge.hpp"

namespace introsumm {

struct Prediction {
  std::string id;
  std::vector<int> selected;
  std::string text;
};

struct SystemReport {
  std::map<std::string, RougeReport> per_doc;
  RougeReport mean;  // arithmetic means of the per-document fields
};

struct TTestResult {
  double t_stat = 0.0;
  int dof = 0;
  double p_value = 1.0;
  bool significant = false;
  double level = 0.05;
};

/// Per-document rouge_report of each prediction against the abstract, plus
/// corpus means. Prediction ids must cover the split exactly; any missing or
/// extra id is fatal.
SystemReport evaluate(const std::vector<Prediction>& predictions, const CorpusSplit& corpus,
                      Exec exec = Exec::parallel);

/// Classic two-sided paired t-test on per-document metric values.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b,
                          double level = 0.05);

namespace stats {
/// Regularized incomplete beta I_x(a,b) via the continued-fraction expansion.
double incomplete_beta(double a, double b, double x);
/// Two-sided Student-t tail probability for statistic t at `dof` degrees.
double t_two_sided_p(double t, int dof);
}  // namespace stats

}  // namespace introsumm
