#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pacdisp/dataset.hpp"
#include "pacdisp/encoder.hpp"

namespace pacdisp {

// ---------------------------------------------------------------- LDA

// Two-class linear discriminant analysis. The pooled within-class covariance
// uses maximum-likelihood normalisation (divide by n) and is shrunk towards
// shrinkage * trace / p * I before factorisation.
struct LdaModel {
    Eigen::MatrixXd means; // row 0: negative class, row 1: positive class
    Eigen::MatrixXd covariance;
    Eigen::Vector2d log_priors = Eigen::Vector2d::Zero();
    double shrinkage = 1e-3;
    Eigen::VectorXd coef;
    double intercept = 0.0;
    std::shared_ptr<const Encoder> encoder;
};

LdaModel fit_lda(const FeatureMatrix& train, double shrinkage = 1e-3);

// score_pos - score_neg for an encoded vector.
template <typename Derived>
double lda_score(const LdaModel& m, const Eigen::MatrixBase<Derived>& x)
{
    return m.coef.dot(x) + m.intercept;
}

// ---------------------------------------------------------------- trees

struct TreeParams {
    std::string criterion = "gini";
    int max_depth = 5;
    int min_leaf = 5;
    std::size_t feature_subset_size = 0; // 0: every predictor (plain CART)
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static TreeParams from_json(const nlohmann::json& j);
};

// Binary split node. Continuous tests send x <= threshold (and missing) left;
// categorical tests send value == category left, where the category may be
// the missing label.
struct TreeNode {
    std::int64_t negatives = 0;
    std::int64_t positives = 0;
    int column = -1; // -1 for leaves
    bool categorical = false;
    double threshold = 0.0;
    std::string category;
    int left = -1;
    int right = -1;

    bool is_leaf() const { return column < 0; }
};

struct TreeModel {
    std::vector<TreeNode> nodes; // nodes[0] is the root
    std::string positive;
    std::string negative;
    TreeParams params;
    std::string schema_fingerprint;
    std::size_t record_width = 0;

    int depth() const;
};

TreeModel fit_cart(const Dataset& train, const std::string& positive, TreeParams params = {});
// CART growth where each node only examines a seeded random subset of
// predictors (default floor(sqrt(p))).
TreeModel fit_random_tree(const Dataset& train, const std::string& positive, TreeParams params = {});

// Positive-class relative frequency of the leaf reached by the record.
double tree_score(const TreeModel& m, const PatientRecord& record);

// ---------------------------------------------------------------- SVM

struct SvmParams {
    double lambda = 1e-2;
    int epochs = 200;
    std::uint64_t seed = 0;
};

struct SvmModel {
    Eigen::VectorXd weights;
    double bias = 0.0;
    SvmParams params;
    std::shared_ptr<const Encoder> encoder;
};

// Minimises lambda/2 |w|^2 + mean hinge loss by seeded stochastic subgradient
// steps of size 1 / (lambda t), one shuffled pass per epoch. The bias is not
// regularised.
SvmModel fit_linear_svm(const FeatureMatrix& train, SvmParams params = {});

template <typename Derived>
double svm_margin(const SvmModel& m, const Eigen::MatrixBase<Derived>& x)
{
    return m.weights.dot(x) + m.bias;
}

double svm_objective(const Eigen::VectorXd& w, double b, const FeatureMatrix& data, double lambda);

} // namespace pacdisp
