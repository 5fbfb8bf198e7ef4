#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "pacdisp/baselines.hpp"
#include "pacdisp/detail/rng.hpp"

namespace pacdisp {

nlohmann::json TreeParams::to_json() const
{
    return {{"criterion", criterion},
            {"max_depth", max_depth},
            {"min_leaf", min_leaf},
            {"feature_subset_size", feature_subset_size},
            {"seed", seed}};
}

TreeParams TreeParams::from_json(const nlohmann::json& j)
{
    TreeParams p;
    p.criterion = j.value("criterion", p.criterion);
    p.max_depth = j.value("max_depth", p.max_depth);
    p.min_leaf = j.value("min_leaf", p.min_leaf);
    p.feature_subset_size = j.value("feature_subset_size", p.feature_subset_size);
    p.seed = j.value("seed", p.seed);
    return p;
}

int TreeModel::depth() const
{
    // Nodes are stored parent-before-child, so one forward pass suffices.
    std::vector<int> d(nodes.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        deepest = std::max(deepest, d[i]);
        if (!nodes[i].is_leaf()) {
            d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
        }
    }
    return deepest;
}

namespace {

double gini(double pos, double total)
{
    if (total <= 0.0)
        return 0.0;
    const double p = pos / total;
    return 2.0 * p * (1.0 - p);
}

double entropy(double pos, double total)
{
    if (total <= 0.0)
        return 0.0;
    double h = 0.0;
    for (double p : {pos / total, 1.0 - pos / total})
        if (p > 0.0)
            h -= p * std::log2(p);
    return h;
}

struct Candidate {
    double gain = -1.0;
    int column = -1;
    bool categorical = false;
    double threshold = 0.0;
    std::string category;
};

class Grower {
public:
    Grower(const Dataset& d, const std::string& positive, const TreeParams& params, bool randomized)
        : d_(d), params_(params), randomized_(randomized), eng_(params.seed)
    {
        features_ = d.schema.predictor_indices();
        labels_.resize(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            const auto r = d.response_of(i);
            if (!r)
                throw DataError("MissingResponse", "training row " + std::to_string(i + 1) + " has no response");
            labels_[i] = *r == positive ? 1 : 0;
        }
        impurity_ = params.criterion == "entropy" ? entropy : gini;
    }

    void grow(TreeModel& model)
    {
        std::vector<std::size_t> rows(d_.size());
        std::iota(rows.begin(), rows.end(), 0);
        model.nodes.clear();
        build(model, rows, 0);
    }

private:
    int build(TreeModel& model, const std::vector<std::size_t>& rows, int depth)
    {
        const int id = static_cast<int>(model.nodes.size());
        model.nodes.emplace_back();
        std::int64_t pos = 0;
        for (auto r : rows)
            pos += labels_[r];
        model.nodes[id].positives = pos;
        model.nodes[id].negatives = static_cast<std::int64_t>(rows.size()) - pos;

        if (depth >= params_.max_depth || pos == 0 || pos == static_cast<std::int64_t>(rows.size()) ||
            rows.size() < 2 * static_cast<std::size_t>(params_.min_leaf))
            return id;

        const auto best = search(rows, pos);
        if (best.column < 0)
            return id;

        std::vector<std::size_t> left, right;
        for (auto r : rows)
            (goes_left(best, d_.rows[r][static_cast<std::size_t>(best.column)]) ? left : right).push_back(r);

        auto& node = model.nodes[id];
        node.column = best.column;
        node.categorical = best.categorical;
        node.threshold = best.threshold;
        node.category = best.category;
        const int l = build(model, left, depth + 1);
        const int r = build(model, right, depth + 1);
        model.nodes[id].left = l;
        model.nodes[id].right = r;
        return id;
    }

    static bool goes_left(const Candidate& c, const Cell& v)
    {
        if (c.categorical) {
            if (is_missing(v))
                return c.category == kMissingLabel;
            const auto* s = std::get_if<std::string>(&v);
            return s && *s == c.category;
        }
        const auto* x = std::get_if<double>(&v);
        return !x || *x <= c.threshold;
    }

    std::vector<std::size_t> candidate_features()
    {
        std::vector<std::size_t> order(features_.size());
        std::iota(order.begin(), order.end(), 0);
        if (!randomized_)
            return order;
        std::size_t m = params_.feature_subset_size;
        if (m == 0)
            m = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(features_.size())))));
        m = std::min(m, features_.size());
        // Partial Fisher-Yates draw, then evaluate in index order so ties
        // resolve exactly as in CART.
        for (std::size_t i = 0; i < m; ++i) {
            const auto j = i + static_cast<std::size_t>(detail::uniform_index(eng_, order.size() - i));
            std::swap(order[i], order[j]);
        }
        order.resize(m);
        std::sort(order.begin(), order.end());
        return order;
    }

    Candidate search(const std::vector<std::size_t>& rows, std::int64_t pos_total)
    {
        const double n = static_cast<double>(rows.size());
        const double parent = impurity_(static_cast<double>(pos_total), n);
        const auto min_leaf = static_cast<double>(params_.min_leaf);
        Candidate best;

        auto consider = [&](Candidate c, double left_pos, double left_n) {
            const double right_n = n - left_n;
            if (left_n < min_leaf || right_n < min_leaf)
                return;
            const double right_pos = static_cast<double>(pos_total) - left_pos;
            c.gain = parent - (left_n / n) * impurity_(left_pos, left_n) - (right_n / n) * impurity_(right_pos, right_n);
            if (c.gain > best.gain + 1e-12)
                best = std::move(c);
        };

        for (auto f : candidate_features()) {
            const auto col = features_[f];
            const auto& cs = d_.schema[col];
            if (cs.kind == ColumnKind::continuous) {
                std::vector<std::pair<double, int>> vals;
                double miss_pos = 0.0, miss_n = 0.0;
                for (auto r : rows) {
                    if (const auto* x = std::get_if<double>(&d_.rows[r][col]))
                        vals.emplace_back(*x, labels_[r]);
                    else {
                        miss_n += 1.0;
                        miss_pos += labels_[r];
                    }
                }
                std::sort(vals.begin(), vals.end());
                double lp = miss_pos, ln = miss_n;
                for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                    lp += vals[i].second;
                    ln += 1.0;
                    if (vals[i].first == vals[i + 1].first)
                        continue;
                    Candidate c;
                    c.column = static_cast<int>(col);
                    c.threshold = 0.5 * (vals[i].first + vals[i + 1].first);
                    consider(std::move(c), lp, ln);
                }
            } else {
                std::vector<std::string> cats = category_levels(d_, col);
                cats.emplace_back(kMissingLabel);
                for (const auto& cat : cats) {
                    Candidate c;
                    c.column = static_cast<int>(col);
                    c.categorical = true;
                    c.category = cat;
                    double lp = 0.0, ln = 0.0;
                    for (auto r : rows)
                        if (goes_left(c, d_.rows[r][col])) {
                            ln += 1.0;
                            lp += labels_[r];
                        }
                    if (ln == 0.0 || ln == n)
                        continue;
                    consider(std::move(c), lp, ln);
                }
            }
        }
        return best;
    }

    const Dataset& d_;
    TreeParams params_;
    bool randomized_;
    detail::Engine eng_;
    std::vector<std::size_t> features_;
    std::vector<int> labels_;
    double (*impurity_)(double, double) = gini;
};

TreeModel fit_tree(const Dataset& train, const std::string& positive, TreeParams params, bool randomized)
{
    if (params.criterion != "gini" && params.criterion != "entropy")
        throw ModelError("InvalidParams", "tree criterion must be gini or entropy");
    if (params.min_leaf < 1 || params.max_depth < 0)
        throw ModelError("InvalidParams", "tree needs min_leaf >= 1 and max_depth >= 0");
    if (train.size() < 2 * static_cast<std::size_t>(params.min_leaf))
        throw ModelError("TooFewRows", "tree needs at least 2 * min_leaf training rows");
    const auto labels = train.response_labels();
    if (labels.size() > 2 || (labels.size() == 2 && !std::binary_search(labels.begin(), labels.end(), positive)))
        throw DataError("NonBinaryResponse", "trees need a binary response including '" + positive + "'");

    TreeModel m;
    m.positive = positive;
    m.negative = labels.size() == 2 ? (labels[0] == positive ? labels[1] : labels[0]) : "";
    m.params = params;
    m.schema_fingerprint = train.schema.fingerprint();
    m.record_width = train.schema.size();
    Grower(train, positive, params, randomized).grow(m);
    return m;
}

} // namespace

TreeModel fit_cart(const Dataset& train, const std::string& positive, TreeParams params)
{
    return fit_tree(train, positive, params, false);
}

TreeModel fit_random_tree(const Dataset& train, const std::string& positive, TreeParams params)
{
    return fit_tree(train, positive, params, true);
}

double tree_score(const TreeModel& m, const PatientRecord& record)
{
    if (record.size() != m.record_width)
        throw ModelError("SchemaMismatch", "record has " + std::to_string(record.size()) +
                                               " fields, tree expects " + std::to_string(m.record_width));
    std::size_t i = 0;
    while (!m.nodes[i].is_leaf()) {
        const auto& node = m.nodes[i];
        const Cell& v = record[static_cast<std::size_t>(node.column)];
        bool left;
        if (node.categorical) {
            const auto* s = std::get_if<std::string>(&v);
            left = s ? *s == node.category : node.category == kMissingLabel;
        } else {
            const auto* x = std::get_if<double>(&v);
            left = !x || *x <= node.threshold;
        }
        i = static_cast<std::size_t>(left ? node.left : node.right);
    }
    const auto& leaf = m.nodes[i];
    return static_cast<double>(leaf.positives) / static_cast<double>(leaf.positives + leaf.negatives);
}

} // namespace pacdisp
