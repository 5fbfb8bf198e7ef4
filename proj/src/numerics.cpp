#include "pacdisp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pacdisp {

double ContingencyTable::percent(Eigen::Index r, Eigen::Index c) const
{
    const auto n = total();
    return n == 0 ? 0.0 : 100.0 * static_cast<double>(counts(r, c)) / static_cast<double>(n);
}

namespace {

constexpr double kGammaEps = 1e-15;
constexpr int kGammaMaxIter = 100000;

// Series expansion of P(a, x); converges quickly for x < a + 1.
double gamma_p_series(double a, double x)
{
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < kGammaMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kGammaEps)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x); used for x >= a + 1.
double gamma_q_fraction(double a, double x)
{
    constexpr double tiny = std::numeric_limits<double>::min() / kGammaEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kGammaMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kGammaEps)
            break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double regularized_gamma_p(double a, double x)
{
    if (x <= 0.0)
        return 0.0;
    if (x < a + 1.0)
        return gamma_p_series(a, x);
    return 1.0 - gamma_q_fraction(a, x);
}

double regularized_gamma_q(double a, double x)
{
    if (x <= 0.0)
        return 1.0;
    if (x < a + 1.0)
        return 1.0 - gamma_p_series(a, x);
    return gamma_q_fraction(a, x);
}

double chi_square_sf(double x, int df)
{
    if (df < 1)
        throw std::invalid_argument("chi_square_sf: df must be >= 1");
    if (!(x > 0.0))
        return 1.0;
    const double q = regularized_gamma_q(0.5 * df, 0.5 * x);
    return std::clamp(q, 0.0, 1.0);
}

namespace detail {

ChiSquareResult pearson_chi_square(const Eigen::MatrixXd& observed)
{
    if ((observed.array() < 0.0).any())
        throw DataError("DegenerateTable", "contingency table has negative counts");

    std::vector<Eigen::Index> rows;
    std::vector<Eigen::Index> cols;
    const Eigen::VectorXd row_sums = observed.rowwise().sum();
    const Eigen::RowVectorXd col_sums = observed.colwise().sum();
    for (Eigen::Index i = 0; i < observed.rows(); ++i)
        if (row_sums(i) > 0.0)
            rows.push_back(i);
    for (Eigen::Index j = 0; j < observed.cols(); ++j)
        if (col_sums(j) > 0.0)
            cols.push_back(j);
    if (rows.size() < 2 || cols.size() < 2)
        throw DataError("DegenerateTable",
                        "chi-square test needs at least 2 non-empty rows and columns");

    const Eigen::MatrixXd kept = observed(rows, cols);
    const Eigen::VectorXd r = kept.rowwise().sum();
    const Eigen::RowVectorXd c = kept.colwise().sum();
    const double n = kept.sum();
    const Eigen::MatrixXd expected = r * c / n;

    ChiSquareResult out;
    out.statistic = ((kept - expected).array().square() / expected.array()).sum();
    out.df = static_cast<int>((rows.size() - 1) * (cols.size() - 1));
    out.p_value = chi_square_sf(out.statistic, out.df);
    return out;
}

} // namespace detail

namespace {

void check_partition_args(int c, int r)
{
    if (c < 1 || r < 1 || r > c)
        throw std::invalid_argument("bonferroni_multiplier: need 1 <= r <= c");
}

} // namespace

std::uint64_t bonferroni_multiplier(int c, int r, PartitionKind kind)
{
    check_partition_args(c, r);
    __extension__ typedef unsigned __int128 wide;
    constexpr wide limit = std::numeric_limits<std::uint64_t>::max();

    if (kind == PartitionKind::ordinal) {
        // C(n, k) built incrementally; each partial product is itself binomial.
        const int n = c - 1;
        const int k = std::min(r - 1, n - (r - 1));
        wide value = 1;
        for (int i = 1; i <= k; ++i) {
            value = value * static_cast<wide>(n - k + i) / static_cast<wide>(i);
            if (value > limit)
                throw std::overflow_error("bonferroni_multiplier: count exceeds 64 bits");
        }
        return static_cast<std::uint64_t>(value);
    }

    // Stirling numbers of the second kind: S(n, k) = k S(n-1, k) + S(n-1, k-1).
    std::vector<wide> row(static_cast<std::size_t>(r) + 1, 0);
    row[0] = 1;
    for (int n = 1; n <= c; ++n) {
        for (int k = std::min(n, r); k >= 1; --k) {
            row[k] = static_cast<wide>(k) * row[k] + row[k - 1];
            if (row[k] > limit && k == r)
                throw std::overflow_error("bonferroni_multiplier: count exceeds 64 bits");
            if (row[k] > limit)
                row[k] = limit + 1; // saturate intermediate columns we no longer need exactly
        }
        row[0] = 0;
    }
    return static_cast<std::uint64_t>(row[r]);
}

double log_bonferroni_multiplier(int c, int r, PartitionKind kind)
{
    check_partition_args(c, r);
    if (kind == PartitionKind::ordinal) {
        const double n = c - 1;
        const double k = r - 1;
        return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
    }
    std::vector<long double> row(static_cast<std::size_t>(r) + 1, 0.0L);
    row[0] = 1.0L;
    for (int n = 1; n <= c; ++n) {
        for (int k = std::min(n, r); k >= 1; --k)
            row[k] = static_cast<long double>(k) * row[k] + row[k - 1];
        row[0] = 0.0L;
    }
    return static_cast<double>(std::log(row[r]));
}

} // namespace pacdisp
