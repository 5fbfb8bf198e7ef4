#include <doctest.h>

#include "pacdisp/evaluation.hpp"
#include "pacdisp/flowsim.hpp"

using namespace pacdisp;

TEST_CASE("length of stay under both policies")
{
    CHECK(total_los({7, 2, Policy::traditional}) == 9.0);
    CHECK(total_los({7, 2, Policy::predictive}) == 7.0);
    CHECK(total_los({5, 0, Policy::traditional}) == 5.0);
    CHECK(total_los({5, 0, Policy::predictive}) == 5.0);
    CHECK_THROWS_AS(total_los({-1, 2, Policy::traditional}), DataError);

    for (double x = 1; x <= 14; x += 0.5)
        for (double a = 0; a <= 6; a += 0.5) {
            const double trad = total_los({x, a, Policy::traditional});
            const double pred = total_los({x, a, Policy::predictive});
            CHECK(pred <= trad);
            CHECK((pred == trad) == (a == 0.0));
            CHECK(los_reduction(x, a).days_saved == std::min(x, a));
        }
}

TEST_CASE("los_reduction")
{
    const auto r = los_reduction(7, 2);
    CHECK(r.days_saved == 2.0);
    CHECK(r.percent == doctest::Approx(22.2222).epsilon(1e-5));
    CHECK(round2(r.percent) == 22.22);
    CHECK(los_reduction(5, 0).percent == 0.0);
    CHECK(los_reduction(1, 3).days_saved == 1.0);
    CHECK(los_reduction(1, 3).percent == doctest::Approx(25.0));
}

TEST_CASE("cost model")
{
    const CostModel c;
    CHECK(c.per_day("state_government") == 1974.0);
    CHECK(c.per_day("non_profit") == 2346.0);
    CHECK(c.per_day("for_profit") == 1798.0);
    CHECK_THROWS_AS(c.per_day("federal"), DataError);
    CHECK(cost_savings(1, "non_profit") == 2346.0);
    CHECK(cost_savings(2, "non_profit") == 4692.0);
    CHECK(cost_savings(0, "for_profit") == 0.0);
    for (double d : {0.5, 1.0, 3.0})
        CHECK(cost_savings(2 * d, "state_government") == doctest::Approx(2 * cost_savings(d, "state_government")));

    const auto custom = CostModel::from_json({{"non_profit", 2000}, {"va", 1500}});
    CHECK(custom.per_day("non_profit") == 2000.0);
    CHECK(custom.per_day("va") == 1500.0);
    CHECK(custom.per_day("for_profit") == 1798.0);
}

TEST_CASE("expense trend arithmetic")
{
    const std::vector<std::pair<int, double>> one{{1999, 1102}};
    const auto single = expense_trend(one);
    REQUIRE(single.size() == 1);
    CHECK_FALSE(single[0].pct_change);
    CHECK_FALSE(single[0].moving_avg);

    const std::vector<std::pair<int, double>> four{{2000, 100}, {2001, 125}, {2002, 100}, {2003, 200}};
    const auto t = expense_trend(four);
    CHECK(*t[1].pct_change == doctest::Approx(20.0)); // 25 / 125
    CHECK(*t[2].pct_change == doctest::Approx(-25.0));
    CHECK(*t[3].pct_change == doctest::Approx(50.0));
    CHECK_FALSE(t[2].moving_avg);
    CHECK(*t[3].moving_avg == doctest::Approx((20.0 - 25.0 + 50.0) / 3.0));

    const std::vector<std::pair<int, double>> gap{{2000, 100}, {2002, 110}};
    CHECK_THROWS_AS(expense_trend(gap), DataError);
    const std::vector<std::pair<int, double>> bad{{2000, 100}, {2001, -5}};
    CHECK_THROWS_AS(expense_trend(bad), DataError);
}

TEST_CASE("published expense column: pct_change and selected rows")
{
    const auto rows = expense_trend(load_expenses(std::string(PACDISP_DATA_DIR) + "/expenses.csv"));
    REQUIRE(rows.size() == 18);
    CHECK(round2(*rows[4].pct_change) == 5.91); // 2003
    CHECK(round2(*rows[3].moving_avg) == 5.11); // 2002
    CHECK(round2(*rows[17].moving_avg) == 2.65); // 2016
}

TEST_CASE("cohort policy impact")
{
    std::vector<CohortRow> rows(100, CohortRow{true, true, 7, 2, "non_profit"});
    auto r = simulate_policy_cohort(rows);
    CHECK(r.days_saved_per_pac_patient == 2.0);
    CHECK(r.dollars_saved_per_pac_patient == 4692.0);

    for (auto& row : rows)
        row.flagged = false;
    r = simulate_policy_cohort(rows);
    CHECK(r.days_saved_total == 0.0);
    CHECK(r.dollars_saved_total == 0.0);

    for (std::size_t i = 0; i < rows.size(); i += 2)
        rows[i].flagged = true;
    r = simulate_policy_cohort(rows);
    CHECK(r.patients_helped == 50);
    CHECK(r.days_saved_total == 100.0);

    ModelReport m;
    m.confusion = {40, 10, 5, 15};
    r = simulate_policy_cohort(m, 7, 2, "for_profit");
    CHECK(r.n_rows == 70);
    CHECK(r.n_pac == 20);
    CHECK(r.n_flagged == 25);
    CHECK(r.patients_helped == 15);
    CHECK(r.false_positive_authorizations == 10);
    CHECK(r.dollars_saved_total == 15 * 2 * 1798.0);

    CHECK_THROWS_AS(simulate_policy_cohort(std::vector<CohortRow>{}), DataError);
}
