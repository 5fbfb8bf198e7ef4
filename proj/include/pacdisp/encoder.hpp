#pragma once

#include <Eigen/Core>

#include <memory>
#include <string>
#include <vector>

#include "pacdisp/dataset.hpp"

namespace pacdisp {

struct FeatureMatrix;

// Maps mixed-type records to numeric vectors. Continuous columns are
// z-standardized with training moments (a zero spread is replaced by 1) and
// get a missing-indicator column when the training data had missing values;
// categorical columns are one-hot over training levels plus a missing
// indicator, which also absorbs unseen labels.
class Encoder {
public:
    struct Column {
        std::size_t source = 0;
        std::string name;
        ColumnKind kind = ColumnKind::nominal;
        double mean = 0.0;
        double scale = 1.0;
        bool missing_indicator = false;
        std::vector<std::string> levels;
    };

    Encoder() = default;

    // Throws DataError "NonBinaryResponse" unless the response has exactly
    // two labels, one of which is `positive`.
    static Encoder fit(const Dataset& train, const std::string& positive);

    FeatureMatrix transform(const Dataset& d) const;
    Eigen::VectorXd encode(const PatientRecord& record) const;
    // +1 for the positive label, -1 otherwise.
    double encode_label(const std::string& label) const { return label == positive_ ? 1.0 : -1.0; }

    Eigen::Index width() const { return static_cast<Eigen::Index>(names_.size()); }
    const std::vector<std::string>& feature_names() const { return names_; }
    const std::string& positive_label() const { return positive_; }
    const std::string& negative_label() const { return negative_; }
    const std::string& schema_fingerprint() const { return fingerprint_; }
    std::size_t record_width() const { return record_width_; }
    const std::vector<Column>& columns() const { return columns_; }

    nlohmann::json to_json() const;
    static Encoder from_json(const nlohmann::json& j);

private:
    void build_names();

    std::vector<Column> columns_;
    std::vector<std::string> names_;
    std::string positive_;
    std::string negative_;
    std::string fingerprint_;
    std::size_t record_width_ = 0;
};

// Numeric design matrix with labels in {+1, -1}. `encoder` is set when the
// matrix came from an Encoder and is carried into fitted models for scoring.
struct FeatureMatrix {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<std::string> feature_names;
    std::shared_ptr<const Encoder> encoder;
};

// Fits an encoder on `d` and applies it.
FeatureMatrix encode(const Dataset& d, const std::string& target_positive);

} // namespace pacdisp
