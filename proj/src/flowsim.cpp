#include "pacdisp/flowsim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pacdisp/evaluation.hpp"

namespace pacdisp {

void FlowScenario::validate() const
{
    if (!(pac_service_days >= 1.0) || !std::isfinite(pac_service_days))
        throw DataError("InvalidScenario", "PAC service days must be >= 1");
    if (!(authorization_days >= 0.0) || !std::isfinite(authorization_days))
        throw DataError("InvalidScenario", "authorization days must be >= 0");
}

double total_los(const FlowScenario& s)
{
    s.validate();
    if (s.policy == Policy::traditional)
        return s.pac_service_days + s.authorization_days;
    return std::max(s.pac_service_days, s.authorization_days);
}

LosReduction los_reduction(double pac_service_days, double authorization_days)
{
    const FlowScenario base{pac_service_days, authorization_days, Policy::traditional};
    const double before = total_los(base);
    const double after = total_los({pac_service_days, authorization_days, Policy::predictive});
    LosReduction r;
    r.days_saved = before - after;
    r.percent = 100.0 * r.days_saved / before;
    return r;
}

CostModel::CostModel()
    : per_day_{{"state_government", 1974.0}, {"non_profit", 2346.0}, {"for_profit", 1798.0}}
{
}

CostModel::CostModel(std::map<std::string, double> per_day) : per_day_(std::move(per_day))
{
    for (const auto& [k, v] : per_day_)
        if (!(v > 0.0))
            throw DataError("InvalidCostModel", "per-day expense for '" + k + "' must be > 0");
}

double CostModel::per_day(const std::string& ownership) const
{
    const auto it = per_day_.find(ownership);
    if (it == per_day_.end())
        throw DataError("UnknownOwnership", "unknown ownership type '" + ownership + "'");
    return it->second;
}

CostModel CostModel::from_json(const nlohmann::json& j)
{
    std::map<std::string, double> table = CostModel().table();
    for (const auto& [k, v] : j.items())
        table[k] = v.get<double>();
    return CostModel(std::move(table));
}

double cost_savings(double days_saved, const std::string& ownership, const CostModel& costs)
{
    if (!(days_saved >= 0.0))
        throw DataError("InvalidScenario", "days saved must be >= 0");
    return days_saved * costs.per_day(ownership);
}

double round2(double v)
{
    return std::round(v * 100.0) / 100.0;
}

std::vector<ExpenseTrendRow> expense_trend(std::span<const std::pair<int, double>> expenses)
{
    if (expenses.empty())
        throw DataError("InsufficientData", "expense trend needs at least one year");
    std::vector<ExpenseTrendRow> rows;
    for (std::size_t i = 0; i < expenses.size(); ++i) {
        const auto [year, expense] = expenses[i];
        if (!(expense > 0.0))
            throw DataError("InvalidExpense", "expense for " + std::to_string(year) + " must be > 0");
        if (i > 0 && year != expenses[i - 1].first + 1)
            throw DataError("NonConsecutiveYears", "year " + std::to_string(year) + " does not follow " +
                                                       std::to_string(expenses[i - 1].first));
        ExpenseTrendRow row{year, expense, std::nullopt, std::nullopt};
        if (i > 0)
            row.pct_change = 100.0 * (expense - expenses[i - 1].second) / expense;
        if (i >= 3)
            row.moving_avg = (*rows[i - 2].pct_change + *rows[i - 1].pct_change + *row.pct_change) / 3.0;
        rows.push_back(row);
    }
    return rows;
}

std::vector<std::pair<int, double>> load_expenses(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("FileNotFound", "cannot open expense file " + path);
    std::vector<std::pair<int, double>> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#')
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream is(line);
        int year;
        double expense;
        if (!(is >> year >> expense)) {
            if (out.empty() && lineno == 1)
                continue; // header
            throw DataError("MalformedExpenses", path + ":" + std::to_string(lineno) + ": expected 'year,expense'");
        }
        out.emplace_back(year, expense);
    }
    return out;
}

CohortImpactReport simulate_policy_cohort(std::span<const CohortRow> rows, const CostModel& costs)
{
    if (rows.empty())
        throw DataError("EmptyCohort", "cohort simulation needs at least one row");
    CohortImpactReport r;
    r.n_rows = rows.size();
    for (const auto& row : rows) {
        r.n_pac += row.needs_pac;
        r.n_flagged += row.flagged;
        if (row.flagged && !row.needs_pac)
            ++r.false_positive_authorizations;
        if (row.flagged && row.needs_pac) {
            ++r.patients_helped;
            const auto red = los_reduction(row.pac_service_days, row.authorization_days);
            r.days_saved_total += red.days_saved;
            r.dollars_saved_total += cost_savings(red.days_saved, row.ownership, costs);
        }
    }
    if (r.n_pac > 0) {
        r.days_saved_per_pac_patient = r.days_saved_total / static_cast<double>(r.n_pac);
        r.dollars_saved_per_pac_patient = r.dollars_saved_total / static_cast<double>(r.n_pac);
    }
    return r;
}

CohortImpactReport simulate_policy_cohort(const ModelReport& report, double pac_service_days,
                                          double authorization_days, const std::string& ownership,
                                          const CostModel& costs)
{
    const auto& cm = report.confusion;
    std::vector<CohortRow> rows;
    rows.reserve(static_cast<std::size_t>(cm.total()));
    auto add = [&](std::int64_t count, bool pac, bool flagged) {
        for (std::int64_t i = 0; i < count; ++i)
            rows.push_back({pac, flagged, pac_service_days, authorization_days, ownership});
    };
    add(cm.true_positive, true, true);
    add(cm.false_negative, true, false);
    add(cm.false_positive, false, true);
    add(cm.true_negative, false, false);
    return simulate_policy_cohort(rows, costs);
}

nlohmann::json to_json(const CohortImpactReport& r)
{
    return {{"n_rows", r.n_rows},
            {"n_pac", r.n_pac},
            {"n_flagged", r.n_flagged},
            {"patients_helped", r.patients_helped},
            {"false_positive_authorizations", r.false_positive_authorizations},
            {"days_saved_total", r.days_saved_total},
            {"dollars_saved_total", r.dollars_saved_total},
            {"days_saved_per_pac_patient", r.days_saved_per_pac_patient},
            {"dollars_saved_per_pac_patient", r.dollars_saved_per_pac_patient}};
}

} // namespace pacdisp
