#pragma once

#include <cstddef>
#include <span>

namespace gna {

// Small statistics toolkit used by tests and by the merger sweep analysis.

// Standard normal survival function P(Z > z).
double normal_sf(double z);

// Regularized upper incomplete gamma Q(a, x) = Gamma(a,x)/Gamma(a), a > 0, x >= 0.
double gamma_q(double a, double x);

// Chi-squared survival function P(X > x) with df degrees of freedom.
double chi_squared_sf(double x, double df);

// Pearson chi-squared goodness-of-fit p-value for observed counts against
// expected counts (same length, expected all > 0).
double chi_squared_gof_pvalue(std::span<const double> observed,
                              std::span<const double> expected);

// One-sided Wilcoxon/Mann-Whitney rank-sum test using the normal
// approximation with tie correction.  Returns the p-value for the
// alternative hypothesis "samples in a tend to be SMALLER than samples in b".
double rank_sum_p_less(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> xs);
double median(std::span<const double> xs);  // copies and sorts

}  // namespace gna
