#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pacdisp/dataset.hpp"
#include "pacdisp/numerics.hpp"

namespace pacdisp {

struct ChaidParams {
    double alpha_merge = 0.05;
    double alpha_split = 0.05;
    int max_depth = 3;
    int min_parent = 20;
    int min_child = 7;
    int continuous_bins = 10;
    std::uint64_t seed = 0; // recorded only; fitting is deterministic

    void validate() const;
    nlohmann::json to_json() const;
    static ChaidParams from_json(const nlohmann::json& j);
};

// Groups of category indices produced by the merge step. Groups are listed in
// order of their smallest member.
using Grouping = std::vector<std::vector<std::size_t>>;

// Kass merge over a categories x classes table. Repeatedly merges the allowed
// pair of groups (adjacent only for ordinal predictors; the floating category
// may join any group) with the largest pairwise p-value while it exceeds
// alpha_merge, then keeps merging undersized groups (total < min_child) into
// their most similar allowed neighbour. Ties go to the lexicographically
// smallest pair of group labels.
Grouping merge_categories(const CountMatrix& table, std::span<const std::string> labels,
                          PartitionKind kind, std::optional<std::size_t> floating,
                          double alpha_merge, std::int64_t min_child);

struct Split {
    std::string predictor;
    std::size_t column = 0;
    ColumnKind kind = ColumnKind::nominal;

    // Categories present at the node, in canonical order; the floating
    // missing category (if present) is last.
    std::vector<std::string> categories;
    Grouping groups;
    std::vector<std::size_t> child_of_category;
    std::optional<std::size_t> missing_child;
    std::size_t default_child = 0; // largest child; fallback for missing values

    // Continuous predictors: bin k holds values in [cut[k-1], cut[k]).
    std::vector<double> cuts;
    double range_lo = 0.0;
    double range_hi = 0.0;

    double statistic = 0.0;
    int df = 0;
    double raw_p = 1.0;
    double adjusted_p = 1.0;

    std::vector<std::string> group_labels(std::size_t child) const;
    // Child index for a value; nullopt means "route as missing".
    std::optional<std::size_t> route(const Cell& value) const;
};

struct ChaidNode {
    std::vector<std::int64_t> counts;
    int depth = 0;
    std::optional<Split> split;
    std::vector<ChaidNode> children;

    bool is_leaf() const { return children.empty(); }
    std::int64_t total() const;
};

struct ChaidTree {
    ChaidNode root;
    std::vector<std::string> class_labels;
    ChaidParams params;
    std::string schema_fingerprint;
    std::size_t record_width = 0;

    std::size_t node_count() const;
    int depth() const;
};

// Best Bonferroni-adjusted split for the node made of `rows`, or nullopt when
// no predictor reaches alpha_split with every child >= min_child.
std::optional<Split> best_split(const Dataset& d, std::span<const std::size_t> rows,
                                const std::vector<std::string>& class_labels, const ChaidParams& params);

ChaidTree fit_chaid(const Dataset& train, const ChaidParams& params);

std::vector<double> predict_proba(const ChaidTree& tree, const PatientRecord& record);
std::string predict(const ChaidTree& tree, const PatientRecord& record);

struct ExplanationStep {
    std::string predictor;
    std::vector<std::string> group;
    std::vector<std::int64_t> node_counts;
};

struct Explanation {
    std::vector<ExplanationStep> path;
    std::vector<std::int64_t> leaf_counts;
};

Explanation explain(const ChaidTree& tree, const PatientRecord& record);

nlohmann::json to_json(const ChaidTree& tree);
ChaidTree chaid_from_json(const nlohmann::json& j);

} // namespace pacdisp
