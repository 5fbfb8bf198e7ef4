#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pacdisp/dataset.hpp"
#include "pacdisp/evaluation.hpp"
#include "pacdisp/flowsim.hpp"

namespace pacdisp {

// Column-aligned plain-text table.
class TextTable {
public:
    explicit TextTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void add_row(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
    void print(std::ostream& os) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string fixed(double v, int decimals);

void print_stats(std::ostream& os, std::span<const std::pair<std::string, StatsSummary>> stats);
void print_crosstab(std::ostream& os, const ContingencyTable& t, const std::string& row_name,
                    const std::string& col_name);
void print_comparison(std::ostream& os, const ComparisonReport& r);
void print_trend(std::ostream& os, std::span<const ExpenseTrendRow> rows);

nlohmann::json to_json(const StatsSummary& s);
nlohmann::json to_json(const ContingencyTable& t);
nlohmann::json to_json(std::span<const ExpenseTrendRow> rows);

// ROC vertices as CSV with a model column, for external plotting.
void write_roc_csv(std::ostream& os, const ComparisonReport& r);

// Published reference figures for the five models (accuracy %, AUC).
struct ReferenceFigure {
    const char* model;
    double accuracy_pct;
    double auc;
};
inline constexpr ReferenceFigure kReferenceFigures[] = {
    {"LDA", 83.33, 0.79}, {"CHAID", 84.16, 0.81}, {"RT", 72.50, 0.68}, {"LSVM", 76.66, 0.70}, {"CART", 80.00, 0.51}};

} // namespace pacdisp
