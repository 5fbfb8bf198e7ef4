#include "pacdisp/model.hpp"

#include <algorithm>
#include <set>

namespace pacdisp {

std::string to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::chaid: return "chaid";
    case Algorithm::lda: return "lda";
    case Algorithm::cart: return "cart";
    case Algorithm::rtree: return "rtree";
    case Algorithm::lsvm: return "lsvm";
    }
    return "chaid";
}

Algorithm algorithm_from_string(const std::string& s)
{
    for (auto a : kAllAlgorithms)
        if (to_string(a) == s)
            return a;
    throw ModelError("UnknownAlgorithm", "unknown algorithm '" + s + "' (expected chaid|lda|cart|rtree|lsvm)");
}

std::string display_name(Algorithm a)
{
    switch (a) {
    case Algorithm::chaid: return "CHAID";
    case Algorithm::lda: return "LDA";
    case Algorithm::cart: return "CART";
    case Algorithm::rtree: return "RT";
    case Algorithm::lsvm: return "LSVM";
    }
    return "CHAID";
}

std::vector<std::string> parameter_names(Algorithm a)
{
    switch (a) {
    case Algorithm::chaid:
        return {"alpha_merge", "alpha_split", "max_depth", "min_parent", "min_child", "continuous_bins"};
    case Algorithm::lda: return {"shrinkage"};
    case Algorithm::cart: return {"criterion", "max_depth", "min_leaf"};
    case Algorithm::rtree: return {"criterion", "max_depth", "min_leaf", "feature_subset_size"};
    case Algorithm::lsvm: return {"lambda", "epochs"};
    }
    return {};
}

namespace {

void reject_unknown(const nlohmann::json& overrides, Algorithm a)
{
    const auto allowed = parameter_names(a);
    for (const auto& [key, _] : overrides.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ModelError("InvalidParams", "unknown " + to_string(a) + " parameter '" + key + "'");
}

template <typename T>
void take(const nlohmann::json& j, const char* key, T& out)
{
    if (!j.contains(key))
        return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ModelError("InvalidParams", std::string("parameter '") + key + "' has the wrong type");
    }
}

std::string other_label(const Dataset& d, const std::string& positive)
{
    const auto labels = d.response_labels();
    if (labels.size() != 2 || !std::binary_search(labels.begin(), labels.end(), positive))
        throw DataError("NonBinaryResponse",
                        "binary models need exactly two response labels including '" + positive + "'");
    return labels[0] == positive ? labels[1] : labels[0];
}

} // namespace

TrainedModel fit_model(Algorithm algorithm, const Dataset& train, const FitOptions& options)
{
    TrainedModel m;
    m.algorithm = algorithm;
    m.positive = options.positive;
    m.schema_fingerprint = train.schema.fingerprint();
    m.record_width = train.schema.size();
    const auto& o = options.overrides;

    switch (algorithm) {
    case Algorithm::chaid: {
        reject_unknown(o, algorithm);
        ChaidParams p;
        take(o, "alpha_merge", p.alpha_merge);
        take(o, "alpha_split", p.alpha_split);
        take(o, "max_depth", p.max_depth);
        take(o, "min_parent", p.min_parent);
        take(o, "min_child", p.min_child);
        take(o, "continuous_bins", p.continuous_bins);
        p.seed = options.seed;
        auto tree = fit_chaid(train, p);
        const auto& labels = tree.class_labels;
        if (std::find(labels.begin(), labels.end(), options.positive) == labels.end())
            throw DataError("UnknownResponseValue", "positive class '" + options.positive + "' not in training data");
        m.negative = labels.size() == 2 ? (labels[0] == options.positive ? labels[1] : labels[0]) : "";
        m.params = p.to_json();
        m.model = std::move(tree);
        break;
    }
    case Algorithm::lda: {
        reject_unknown(o, algorithm);
        double shrinkage = 1e-3;
        take(o, "shrinkage", shrinkage);
        m.negative = other_label(train, options.positive);
        m.model = fit_lda(encode(train, options.positive), shrinkage);
        m.params = {{"shrinkage", shrinkage}};
        break;
    }
    case Algorithm::cart:
    case Algorithm::rtree: {
        reject_unknown(o, algorithm);
        TreeParams p;
        take(o, "criterion", p.criterion);
        take(o, "max_depth", p.max_depth);
        take(o, "min_leaf", p.min_leaf);
        take(o, "feature_subset_size", p.feature_subset_size);
        p.seed = options.seed;
        m.negative = other_label(train, options.positive);
        auto tree = algorithm == Algorithm::cart ? fit_cart(train, options.positive, p)
                                                 : fit_random_tree(train, options.positive, p);
        m.params = tree.params.to_json();
        m.model = std::move(tree);
        break;
    }
    case Algorithm::lsvm: {
        reject_unknown(o, algorithm);
        SvmParams p;
        take(o, "lambda", p.lambda);
        take(o, "epochs", p.epochs);
        p.seed = options.seed;
        m.negative = other_label(train, options.positive);
        m.model = fit_linear_svm(encode(train, options.positive), p);
        m.params = {{"lambda", p.lambda}, {"epochs", p.epochs}, {"seed", p.seed}};
        break;
    }
    }
    return m;
}

namespace {

void check_width(const TrainedModel& m, const PatientRecord& record)
{
    if (record.size() != m.record_width)
        throw ModelError("SchemaMismatch", "record has " + std::to_string(record.size()) +
                                               " fields, model expects " + std::to_string(m.record_width));
}

const Encoder& encoder_of(const std::shared_ptr<const Encoder>& e)
{
    if (!e)
        throw ModelError("SchemaMismatch", "model has no encoder and cannot score raw records");
    return *e;
}

std::size_t positive_index(const ChaidTree& t, const std::string& positive)
{
    return static_cast<std::size_t>(std::find(t.class_labels.begin(), t.class_labels.end(), positive) -
                                    t.class_labels.begin());
}

} // namespace

double score(const TrainedModel& m, const PatientRecord& record)
{
    check_width(m, record);
    return std::visit(
        [&](const auto& model) -> double {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, ChaidTree>) {
                const auto p = predict_proba(model, record);
                const auto k = positive_index(model, m.positive);
                return k < p.size() ? p[k] : 0.0;
            } else if constexpr (std::is_same_v<T, LdaModel>) {
                return lda_score(model, encoder_of(model.encoder).encode(record));
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                return tree_score(model, record);
            } else {
                return svm_margin(model, encoder_of(model.encoder).encode(record));
            }
        },
        m.model);
}

double decision_threshold(const TrainedModel& m)
{
    return std::holds_alternative<LdaModel>(m.model) || std::holds_alternative<SvmModel>(m.model) ? 0.0 : 0.5;
}

std::string predict(const TrainedModel& m, const PatientRecord& record)
{
    if (const auto* tree = std::get_if<ChaidTree>(&m.model)) {
        check_width(m, record);
        return predict(*tree, record);
    }
    return score(m, record) > decision_threshold(m) ? m.positive : m.negative;
}

std::optional<std::vector<std::pair<std::string, double>>> class_probabilities(const TrainedModel& m,
                                                                              const PatientRecord& record)
{
    check_width(m, record);
    if (const auto* tree = std::get_if<ChaidTree>(&m.model)) {
        const auto p = predict_proba(*tree, record);
        std::vector<std::pair<std::string, double>> out;
        for (std::size_t k = 0; k < p.size(); ++k)
            out.emplace_back(tree->class_labels[k], p[k]);
        return out;
    }
    if (const auto* tree = std::get_if<TreeModel>(&m.model)) {
        const double pos = tree_score(*tree, record);
        std::vector<std::pair<std::string, double>> out{{m.negative, 1.0 - pos}, {m.positive, pos}};
        std::sort(out.begin(), out.end());
        return out;
    }
    return std::nullopt;
}

} // namespace pacdisp
