#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pacdisp/dataset.hpp"
#include "pacdisp/model.hpp"

namespace pacdisp {

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points; // (0,0) ... (1,1), one vertex per distinct score
    double auc = 0.0;
};

// Labels are +1 / -1. Tied scores form a single diagonal segment, so the
// trapezoid area equals the Mann-Whitney statistic with ties counted 1/2.
RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels);

// Cumulative lift in the top ceil(depth * n) cases by score (stable order
// among ties): precision there divided by the overall positive rate.
double lift_at_depth(std::span<const double> scores, std::span<const int> labels, double depth = 0.30);

// Rows: actual class, columns: predicted class.
struct ConfusionMatrix {
    std::int64_t true_negative = 0;
    std::int64_t false_positive = 0;
    std::int64_t false_negative = 0;
    std::int64_t true_positive = 0;

    std::int64_t total() const { return true_negative + false_positive + false_negative + true_positive; }
    double accuracy() const;
};

struct ModelReport {
    std::string model;
    std::string positive;
    ConfusionMatrix confusion;
    double overall_accuracy = 0.0;
    std::vector<RocPoint> roc_points;
    double auc = 0.0;
    double lift_at_depth = 0.0;
    double depth = 0.30;
    std::size_t n_test = 0;
};

ModelReport evaluate_model(const TrainedModel& model, const Dataset& test, const std::string& positive,
                           const std::string& name, double depth = 0.30);

struct ComparisonReport {
    std::vector<ModelReport> reports;
    std::string winner;
    std::vector<std::string> selection_trace;
};

// Winner maximises accuracy; ties go to higher AUC, then higher lift, then
// the lexicographically first name.
ComparisonReport compare_models(std::vector<ModelReport> reports);

nlohmann::json to_json(const ModelReport& r);
nlohmann::json to_json(const ComparisonReport& r);

} // namespace pacdisp
