#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "pacdisp/errors.hpp"

namespace pacdisp {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Observed frequencies with row/column labels.
struct ContingencyTable {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    CountMatrix counts;

    std::int64_t total() const { return counts.sum(); }
    // Cell share of the grand total, in percent.
    double percent(Eigen::Index r, Eigen::Index c) const;
};

struct ChiSquareResult {
    double statistic = 0.0;
    int df = 1;
    double p_value = 1.0;
};

enum class PartitionKind { nominal, ordinal };

// Upper tail of the chi-square distribution: 1 - P(df/2, x/2).
double chi_square_sf(double x, int df);

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

namespace detail {
ChiSquareResult pearson_chi_square(const Eigen::MatrixXd& observed);
}

// Pearson test of independence, no continuity correction. Rows and columns
// whose marginal is zero are dropped before the test; throws DataError
// "DegenerateTable" if fewer than two non-empty rows or columns remain.
template <typename Derived>
ChiSquareResult chi_square_independence(const Eigen::MatrixBase<Derived>& counts)
{
    return detail::pearson_chi_square(counts.template cast<double>());
}

inline ChiSquareResult chi_square_independence(const ContingencyTable& t)
{
    return chi_square_independence(t.counts);
}

// Number of admissible ways to reduce c categories to r groups: contiguous
// partitions C(c-1, r-1) for ordinal predictors, set partitions S(c, r) for
// nominal ones. Throws std::overflow_error when the count exceeds 64 bits.
std::uint64_t bonferroni_multiplier(int c, int r, PartitionKind kind);

// Natural log of the same count; never overflows.
double log_bonferroni_multiplier(int c, int r, PartitionKind kind);

} // namespace pacdisp
