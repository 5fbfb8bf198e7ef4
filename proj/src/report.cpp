#include "pacdisp/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>

namespace pacdisp {

void TextTable::print(std::ostream& os) const
{
    std::vector<std::size_t> width(header_.size(), 0);
    auto widen = [&width](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size() && i < width.size(); ++i)
            width[i] = std::max(width[i], row[i].size());
    };
    widen(header_);
    for (const auto& r : rows_)
        widen(r);

    auto line = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < width.size(); ++i) {
            const std::string cell = i < row.size() ? row[i] : "";
            // First column left-aligned, the rest right-aligned.
            if (i == 0)
                os << std::left << std::setw(static_cast<int>(width[i])) << cell;
            else
                os << "  " << std::right << std::setw(static_cast<int>(width[i])) << cell;
        }
        os << '\n';
    };
    line(header_);
    std::size_t total = 0;
    for (auto w : width)
        total += w + 2;
    os << std::string(total > 2 ? total - 2 : 0, '-') << '\n';
    for (const auto& r : rows_)
        line(r);
    os << std::left;
}

std::string fixed(double v, int decimals)
{
    if (std::isnan(v))
        return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

void print_stats(std::ostream& os, std::span<const std::pair<std::string, StatsSummary>> stats)
{
    std::vector<std::string> header{"Statistic"};
    for (const auto& [name, _] : stats)
        header.push_back(name);
    TextTable t(header);
    auto row = [&](const std::string& label, auto get, int decimals) {
        std::vector<std::string> r{label};
        for (const auto& [_, s] : stats)
            r.push_back(fixed(get(s), decimals));
        t.add_row(std::move(r));
    };
    row("N", [](const StatsSummary& s) { return static_cast<double>(s.n); }, 0);
    row("Min", [](const StatsSummary& s) { return s.min; }, 2);
    row("Max", [](const StatsSummary& s) { return s.max; }, 2);
    row("Range", [](const StatsSummary& s) { return s.range; }, 2);
    row("Mean", [](const StatsSummary& s) { return s.mean; }, 2);
    row("Mean Std. Error", [](const StatsSummary& s) { return s.mean_std_error; }, 2);
    row("Std. Deviation", [](const StatsSummary& s) { return s.std_dev; }, 2);
    row("Variance", [](const StatsSummary& s) { return s.variance; }, 2);
    row("Skewness", [](const StatsSummary& s) { return s.skewness; }, 2);
    row("Skewness Std. Error", [](const StatsSummary& s) { return s.skewness_std_error; }, 2);
    row("Kurtosis", [](const StatsSummary& s) { return s.kurtosis; }, 2);
    row("Kurtosis Std. Error", [](const StatsSummary& s) { return s.kurtosis_std_error; }, 2);
    t.print(os);
}

void print_crosstab(std::ostream& os, const ContingencyTable& t, const std::string& row_name,
                    const std::string& col_name)
{
    std::vector<std::string> header{row_name + " \\ " + col_name};
    header.insert(header.end(), t.col_labels.begin(), t.col_labels.end());
    header.emplace_back("Total");
    TextTable tt(header);
    for (Eigen::Index i = 0; i < t.counts.rows(); ++i) {
        std::vector<std::string> r{t.row_labels[static_cast<std::size_t>(i)]};
        for (Eigen::Index j = 0; j < t.counts.cols(); ++j)
            r.push_back(std::to_string(t.counts(i, j)) + " (" + fixed(t.percent(i, j), 2) + "%)");
        r.push_back(std::to_string(t.counts.row(i).sum()));
        tt.add_row(std::move(r));
    }
    std::vector<std::string> totals{"Total"};
    for (Eigen::Index j = 0; j < t.counts.cols(); ++j)
        totals.push_back(std::to_string(t.counts.col(j).sum()));
    totals.push_back(std::to_string(t.total()));
    tt.add_row(std::move(totals));
    tt.print(os);
}

void print_comparison(std::ostream& os, const ComparisonReport& r)
{
    TextTable t({"Model", "Accuracy (%)", "AUC", "Lift", "TP", "FP", "FN", "TN", "N test"});
    for (const auto& m : r.reports)
        t.add_row({m.model, fixed(100.0 * m.overall_accuracy, 2), fixed(m.auc, 3), fixed(m.lift_at_depth, 3),
                   std::to_string(m.confusion.true_positive), std::to_string(m.confusion.false_positive),
                   std::to_string(m.confusion.false_negative), std::to_string(m.confusion.true_negative),
                   std::to_string(m.n_test)});
    t.print(os);
    if (!r.reports.empty())
        os << "Positive class: " << r.reports.front().positive << "; lift at depth "
           << fixed(100.0 * r.reports.front().depth, 0) << "%\n";
    os << "Selected model: " << r.winner << "\n";
    os << "Selection trace:\n";
    for (const auto& s : r.selection_trace)
        os << "  " << s << "\n";

    os << "\nPublished reference figures (single split, unpublished seed and settings):\n";
    TextTable ref({"Model", "Accuracy (%)", "AUC"});
    for (const auto& f : kReferenceFigures)
        ref.add_row({f.model, fixed(f.accuracy_pct, 2), fixed(f.auc, 2)});
    ref.print(os);
}

void print_trend(std::ostream& os, std::span<const ExpenseTrendRow> rows)
{
    TextTable t({"Year", "Expense ($/day)", "Change (%)", "Moving Average (%)"});
    for (const auto& r : rows)
        t.add_row({std::to_string(r.year), fixed(r.expense, 0), r.pct_change ? fixed(*r.pct_change, 2) : "",
                   r.moving_avg ? fixed(*r.moving_avg, 2) : ""});
    t.print(os);
}

nlohmann::json to_json(const StatsSummary& s)
{
    return {{"n", s.n},
            {"min", s.min},
            {"max", s.max},
            {"range", s.range},
            {"mean", s.mean},
            {"mean_std_error", s.mean_std_error},
            {"std_dev", s.std_dev},
            {"variance", s.variance},
            {"skewness", s.skewness},
            {"skewness_std_error", s.skewness_std_error},
            {"kurtosis", s.kurtosis},
            {"kurtosis_std_error", s.kurtosis_std_error}};
}

nlohmann::json to_json(const ContingencyTable& t)
{
    nlohmann::json counts = nlohmann::json::array();
    for (Eigen::Index i = 0; i < t.counts.rows(); ++i) {
        std::vector<std::int64_t> row(static_cast<std::size_t>(t.counts.cols()));
        for (Eigen::Index j = 0; j < t.counts.cols(); ++j)
            row[static_cast<std::size_t>(j)] = t.counts(i, j);
        counts.push_back(row);
    }
    return {{"row_labels", t.row_labels}, {"col_labels", t.col_labels}, {"counts", std::move(counts)}, {"total", t.total()}};
}

nlohmann::json to_json(std::span<const ExpenseTrendRow> rows)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows)
        out.push_back({{"year", r.year},
                       {"expense", r.expense},
                       {"pct_change", r.pct_change ? nlohmann::json(round2(*r.pct_change)) : nlohmann::json(nullptr)},
                       {"moving_avg", r.moving_avg ? nlohmann::json(round2(*r.moving_avg)) : nlohmann::json(nullptr)}});
    return out;
}

void write_roc_csv(std::ostream& os, const ComparisonReport& r)
{
    os << "model,fpr,tpr\n";
    for (const auto& m : r.reports)
        for (const auto& p : m.roc_points)
            os << m.model << ',' << fixed(p.fpr, 6) << ',' << fixed(p.tpr, 6) << '\n';
}

} // namespace pacdisp
