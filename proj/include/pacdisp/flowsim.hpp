#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pacdisp/errors.hpp"

namespace pacdisp {

struct ModelReport;

enum class Policy { traditional, predictive };

struct FlowScenario {
    double pac_service_days = 7.0;   // X
    double authorization_days = 2.0; // A
    Policy policy = Policy::traditional;

    void validate() const;
};

// Traditional: authorization waits for the end of care (X + A).
// Predictive: authorization starts on day 1 and runs alongside care (max(X, A)).
double total_los(const FlowScenario& s);

struct LosReduction {
    double days_saved = 0.0;
    double percent = 0.0;
};

LosReduction los_reduction(double pac_service_days, double authorization_days);

// Adjusted hospital expense per inpatient day, USD, by ownership type.
class CostModel {
public:
    CostModel();
    explicit CostModel(std::map<std::string, double> per_day);

    double per_day(const std::string& ownership) const; // throws UnknownOwnership
    const std::map<std::string, double>& table() const { return per_day_; }

    static CostModel from_json(const nlohmann::json& j);

private:
    std::map<std::string, double> per_day_;
};

double cost_savings(double days_saved, const std::string& ownership, const CostModel& costs = CostModel());

struct ExpenseTrendRow {
    int year = 0;
    double expense = 0.0;
    std::optional<double> pct_change; // from the 2nd year
    std::optional<double> moving_avg; // 3-year mean of pct_change, from the 4th year
};

// Year-over-year change uses the current year as denominator:
// 100 * (E_t - E_{t-1}) / E_t. Values are unrounded; use round2 for display.
std::vector<ExpenseTrendRow> expense_trend(std::span<const std::pair<int, double>> expenses);

double round2(double v);

std::vector<std::pair<int, double>> load_expenses(const std::string& path);

// Cohort-level effect of flagging patients for early authorization.
struct CohortRow {
    bool needs_pac = false; // actual positive
    bool flagged = false;   // predicted positive
    double pac_service_days = 7.0;
    double authorization_days = 2.0;
    std::string ownership = "non_profit";
};

struct CohortImpactReport {
    std::size_t n_rows = 0;
    std::size_t n_pac = 0;
    std::size_t n_flagged = 0;
    std::size_t patients_helped = 0;
    std::size_t false_positive_authorizations = 0;
    double days_saved_total = 0.0;
    double dollars_saved_total = 0.0;
    double days_saved_per_pac_patient = 0.0;
    double dollars_saved_per_pac_patient = 0.0;
};

CohortImpactReport simulate_policy_cohort(std::span<const CohortRow> rows, const CostModel& costs = CostModel());
// Applies one scenario to every row implied by the report's confusion matrix.
CohortImpactReport simulate_policy_cohort(const ModelReport& report, double pac_service_days,
                                          double authorization_days, const std::string& ownership,
                                          const CostModel& costs = CostModel());

nlohmann::json to_json(const CohortImpactReport& r);

} // namespace pacdisp
