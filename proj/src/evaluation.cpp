#include "pacdisp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pacdisp {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels)
{
    if (scores.size() != labels.size())
        throw std::invalid_argument("scores and labels differ in length");
    const bool has_pos = std::any_of(labels.begin(), labels.end(), [](int y) { return y > 0; });
    const bool has_neg = std::any_of(labels.begin(), labels.end(), [](int y) { return y <= 0; });
    if (!has_pos || !has_neg)
        throw DataError("OneClassOnly", "ranking measures need both positive and negative labels");
}

std::vector<std::size_t> rank_descending(std::span<const double> scores)
{
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

} // namespace

RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels)
{
    check_inputs(scores, labels);
    const auto order = rank_descending(scores);
    const double pos = static_cast<double>(std::count_if(labels.begin(), labels.end(), [](int y) { return y > 0; }));
    const double neg = static_cast<double>(labels.size()) - pos;

    RocCurve roc;
    roc.points.push_back({0.0, 0.0});
    double tp = 0.0, fp = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            (labels[order[i]] > 0 ? tp : fp) += 1.0;
            ++i;
        }
        const RocPoint next{fp / neg, tp / pos};
        const RocPoint& prev = roc.points.back();
        roc.auc += (next.fpr - prev.fpr) * (next.tpr + prev.tpr) * 0.5;
        roc.points.push_back(next);
    }
    return roc;
}

double lift_at_depth(std::span<const double> scores, std::span<const int> labels, double depth)
{
    check_inputs(scores, labels);
    if (!(depth > 0.0 && depth <= 1.0))
        throw std::invalid_argument("lift depth must lie in (0, 1]");
    const auto n = scores.size();
    // The tolerance keeps 0.3 * 10 from rounding up to 4.
    auto k = static_cast<std::size_t>(std::ceil(depth * static_cast<double>(n) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, n);
    const auto order = rank_descending(scores);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k; ++i)
        hits += labels[order[i]] > 0;
    const auto positives = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](int y) { return y > 0; }));
    const double precision = static_cast<double>(hits) / static_cast<double>(k);
    const double base = static_cast<double>(positives) / static_cast<double>(n);
    return precision / base;
}

double ConfusionMatrix::accuracy() const
{
    const auto n = total();
    return n == 0 ? 0.0 : static_cast<double>(true_negative + true_positive) / static_cast<double>(n);
}

ModelReport evaluate_model(const TrainedModel& model, const Dataset& test, const std::string& positive,
                           const std::string& name, double depth)
{
    if (test.size() == 0)
        throw DataError("EmptyTestSet", "evaluation needs at least one test row");
    if (test.schema.fingerprint() != model.schema_fingerprint)
        throw ModelError("SchemaFingerprintMismatch", "test data schema differs from the model's schema");

    ModelReport r;
    r.model = name;
    r.positive = positive;
    r.depth = depth;
    r.n_test = test.size();

    std::vector<double> scores;
    std::vector<int> labels;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const auto actual = test.response_of(i);
        if (!actual)
            throw DataError("MissingResponse", "test row " + std::to_string(i + 1) + " has no response");
        const bool is_pos = *actual == positive;
        const bool said_pos = predict(model, test.rows[i]) == positive;
        auto& cm = r.confusion;
        (is_pos ? (said_pos ? cm.true_positive : cm.false_negative) : (said_pos ? cm.false_positive : cm.true_negative))++;
        scores.push_back(score(model, test.rows[i]));
        labels.push_back(is_pos ? 1 : -1);
    }
    r.overall_accuracy = r.confusion.accuracy();
    const auto roc = roc_auc(scores, labels);
    r.roc_points = roc.points;
    r.auc = roc.auc;
    r.lift_at_depth = lift_at_depth(scores, labels, depth);
    return r;
}

ComparisonReport compare_models(std::vector<ModelReport> reports)
{
    if (reports.empty())
        throw std::invalid_argument("compare_models needs at least one report");
    ComparisonReport out;

    auto fmt = [](double v) {
        std::ostringstream os;
        os.precision(6);
        os << v;
        return os.str();
    };
    for (const auto& r : reports)
        out.selection_trace.push_back(r.model + ": accuracy=" + fmt(r.overall_accuracy) + " auc=" + fmt(r.auc) +
                                      " lift@" + fmt(r.depth) + "=" + fmt(r.lift_at_depth));

    std::vector<const ModelReport*> pool;
    for (const auto& r : reports)
        pool.push_back(&r);

    auto narrow = [&](const char* criterion, auto key) {
        double best = key(*pool.front());
        for (const auto* r : pool)
            best = std::max(best, key(*r));
        std::vector<const ModelReport*> next;
        for (const auto* r : pool)
            if (key(*r) == best)
                next.push_back(r);
        std::string names;
        for (const auto* r : next)
            names += (names.empty() ? "" : ", ") + r->model;
        out.selection_trace.push_back(std::string("max ") + criterion + " = " + fmt(best) + " -> {" + names + "}");
        pool = std::move(next);
    };

    narrow("accuracy", [](const ModelReport& r) { return r.overall_accuracy; });
    if (pool.size() > 1)
        narrow("auc", [](const ModelReport& r) { return r.auc; });
    if (pool.size() > 1)
        narrow("lift", [](const ModelReport& r) { return r.lift_at_depth; });
    if (pool.size() > 1) {
        std::sort(pool.begin(), pool.end(), [](const auto* a, const auto* b) { return a->model < b->model; });
        out.selection_trace.push_back("name order -> " + pool.front()->model);
    }
    out.winner = pool.front()->model;
    out.reports = std::move(reports);
    return out;
}

nlohmann::json to_json(const ModelReport& r)
{
    nlohmann::json roc = nlohmann::json::array();
    for (const auto& p : r.roc_points)
        roc.push_back({p.fpr, p.tpr});
    return {{"model", r.model},
            {"positive", r.positive},
            {"confusion",
             {{"true_negative", r.confusion.true_negative},
              {"false_positive", r.confusion.false_positive},
              {"false_negative", r.confusion.false_negative},
              {"true_positive", r.confusion.true_positive}}},
            {"overall_accuracy", r.overall_accuracy},
            {"auc", r.auc},
            {"lift_at_depth", r.lift_at_depth},
            {"depth", r.depth},
            {"n_test", r.n_test},
            {"roc_points", std::move(roc)}};
}

nlohmann::json to_json(const ComparisonReport& r)
{
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& m : r.reports)
        reports.push_back(to_json(m));
    return {{"reports", std::move(reports)}, {"winner", r.winner}, {"selection_trace", r.selection_trace}};
}

} // namespace pacdisp
