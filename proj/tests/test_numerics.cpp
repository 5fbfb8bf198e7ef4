#include <doctest.h>

#include "pacdisp/numerics.hpp"
#include "support/oracles.hpp"

using namespace pacdisp;

namespace {

CountMatrix table(std::initializer_list<std::initializer_list<std::int64_t>> rows)
{
    CountMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (auto v : r)
            m(i, j++) = v;
        ++i;
    }
    return m;
}

} // namespace

TEST_CASE("chi-square independence on small tables")
{
    auto r = chi_square_independence(table({{10, 10}, {10, 10}}));
    CHECK(r.statistic == doctest::Approx(0.0));
    CHECK(r.p_value == doctest::Approx(1.0));

    r = chi_square_independence(table({{20, 10}, {10, 20}}));
    CHECK(r.statistic == doctest::Approx(6.666666666667).epsilon(1e-12));
    CHECK(r.df == 1);
    CHECK(r.p_value == doctest::Approx(oracle::chi_square_sf(20.0 / 3.0, 1)).epsilon(1e-8));
    CHECK(r.p_value == doctest::Approx(0.00983).epsilon(1e-3));

    r = chi_square_independence(table({{26, 24}, {24, 26}}));
    CHECK(r.statistic == doctest::Approx(0.16).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.689).epsilon(1e-3));
}

TEST_CASE("chi-square statistic matches the cell-by-cell formula")
{
    const auto m = table({{5, 9, 2}, {7, 1, 11}, {3, 4, 6}});
    std::vector<std::vector<double>> obs(3, std::vector<double>(3));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            obs[i][j] = static_cast<double>(m(i, j));
    const auto r = chi_square_independence(m);
    CHECK(r.statistic == doctest::Approx(oracle::pearson_statistic(obs)).epsilon(1e-12));
    CHECK(r.df == 4);
}

TEST_CASE("chi-square drops empty margins and rejects degenerate tables")
{
    const auto a = chi_square_independence(table({{20, 10, 0}, {10, 20, 0}}));
    CHECK(a.df == 1);
    CHECK(a.statistic == doctest::Approx(20.0 / 3.0));
    CHECK_THROWS_AS(chi_square_independence(table({{5, 5}, {0, 0}})), DataError);
    CHECK_THROWS_AS(chi_square_independence(table({{5, 0}, {7, 0}})), DataError);
}

TEST_CASE("chi-square is invariant under permutations and scales with counts")
{
    const auto m = table({{8, 3, 5}, {2, 9, 4}});
    const auto base = chi_square_independence(m);

    CountMatrix swapped_rows = m;
    swapped_rows.row(0).swap(swapped_rows.row(1));
    CHECK(chi_square_independence(swapped_rows).statistic == doctest::Approx(base.statistic).epsilon(1e-12));

    CountMatrix swapped_cols = m;
    swapped_cols.col(0).swap(swapped_cols.col(2));
    CHECK(chi_square_independence(swapped_cols).statistic == doctest::Approx(base.statistic).epsilon(1e-12));

    for (std::int64_t k : {2, 3, 7}) {
        const CountMatrix scaled = m * k;
        CHECK(chi_square_independence(scaled).statistic ==
              doctest::Approx(static_cast<double>(k) * base.statistic).epsilon(1e-12));
    }
}

TEST_CASE("chi_square_sf reference points")
{
    CHECK(chi_square_sf(0.0, 1) == 1.0);
    CHECK(chi_square_sf(0.0, 7) == 1.0);
    CHECK(chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chi_square_sf(6.6667, 1) == doctest::Approx(0.00983).epsilon(1e-3));
    // Closed forms: df=2 is exp(-x/2).
    for (double x : {0.5, 1.0, 4.0, 20.0})
        CHECK(chi_square_sf(x, 2) == doctest::Approx(std::exp(-x / 2.0)).epsilon(1e-12));
}

TEST_CASE("chi_square_sf agrees with numeric integration and is monotone")
{
    for (int df = 1; df <= 10; ++df) {
        double prev = 1.0;
        for (double x = 0.0; x <= 40.0; x += 0.5) {
            const double v = chi_square_sf(x, df);
            CHECK(std::abs(v - oracle::chi_square_sf(x, df)) < 1e-6);
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
    }
}

TEST_CASE("regularized gamma functions are complementary")
{
    for (double a : {0.5, 1.0, 2.5, 10.0})
        for (double x : {0.1, 1.0, 3.0, 12.0, 30.0})
            CHECK(regularized_gamma_p(a, x) + regularized_gamma_q(a, x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(regularized_gamma_p(1.0, 2.0) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("bonferroni multipliers")
{
    CHECK(bonferroni_multiplier(4, 4, PartitionKind::ordinal) == 1);
    CHECK(bonferroni_multiplier(4, 4, PartitionKind::nominal) == 1);
    CHECK(bonferroni_multiplier(4, 2, PartitionKind::ordinal) == 3);
    CHECK(bonferroni_multiplier(3, 2, PartitionKind::nominal) == 3);
    for (int c = 1; c <= 6; ++c)
        for (int r = 1; r <= c; ++r) {
            CHECK(bonferroni_multiplier(c, r, PartitionKind::ordinal) == oracle::count_contiguous_partitions(c, r));
            CHECK(bonferroni_multiplier(c, r, PartitionKind::nominal) == oracle::count_set_partitions(c, r));
            CHECK(log_bonferroni_multiplier(c, r, PartitionKind::nominal) ==
                  doctest::Approx(std::log(static_cast<double>(oracle::count_set_partitions(c, r)))));
        }
    CHECK_THROWS_AS(bonferroni_multiplier(3, 4, PartitionKind::nominal), std::invalid_argument);
    CHECK_THROWS_AS(bonferroni_multiplier(200, 100, PartitionKind::nominal), std::overflow_error);
    CHECK(std::isfinite(log_bonferroni_multiplier(200, 100, PartitionKind::nominal)));
}
