#include "pacdisp/chaid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace pacdisp {

void ChaidParams::validate() const
{
    auto bad = [](const std::string& what) { throw ModelError("InvalidParams", "chaid: " + what); };
    if (!(alpha_merge > 0.0 && alpha_merge < 1.0))
        bad("alpha_merge must lie in (0, 1)");
    if (!(alpha_split > 0.0 && alpha_split < 1.0))
        bad("alpha_split must lie in (0, 1)");
    if (max_depth < 0)
        bad("max_depth must be >= 0");
    if (min_child < 1 || min_child > min_parent)
        bad("need 1 <= min_child <= min_parent");
    if (continuous_bins < 2)
        bad("continuous_bins must be >= 2");
}

nlohmann::json ChaidParams::to_json() const
{
    return {{"alpha_merge", alpha_merge}, {"alpha_split", alpha_split},
            {"max_depth", max_depth},     {"min_parent", min_parent},
            {"min_child", min_child},     {"continuous_bins", continuous_bins},
            {"seed", seed}};
}

ChaidParams ChaidParams::from_json(const nlohmann::json& j)
{
    ChaidParams p;
    p.alpha_merge = j.value("alpha_merge", p.alpha_merge);
    p.alpha_split = j.value("alpha_split", p.alpha_split);
    p.max_depth = j.value("max_depth", p.max_depth);
    p.min_parent = j.value("min_parent", p.min_parent);
    p.min_child = j.value("min_child", p.min_child);
    p.continuous_bins = j.value("continuous_bins", p.continuous_bins);
    p.seed = j.value("seed", p.seed);
    return p;
}

// ---------------------------------------------------------------- merging

namespace {

struct Group {
    std::vector<std::size_t> members; // sorted category indices
    std::string label;
    bool floating = false;
};

double pair_p_value(const CountMatrix& table, const Group& a, const Group& b)
{
    Eigen::MatrixXd sub = Eigen::MatrixXd::Zero(2, table.cols());
    for (auto m : a.members)
        sub.row(0) += table.row(static_cast<Eigen::Index>(m)).cast<double>();
    for (auto m : b.members)
        sub.row(1) += table.row(static_cast<Eigen::Index>(m)).cast<double>();
    try {
        return chi_square_independence(sub).p_value;
    } catch (const DataError&) {
        // Only one class between the two groups: identical distributions.
        return 1.0;
    }
}

std::int64_t group_total(const CountMatrix& table, const Group& g)
{
    std::int64_t n = 0;
    for (auto m : g.members)
        n += table.row(static_cast<Eigen::Index>(m)).sum();
    return n;
}

std::string join_labels(std::span<const std::string> labels, const std::vector<std::size_t>& members)
{
    std::string out;
    for (auto m : members) {
        if (!out.empty())
            out += "+";
        out += labels[m];
    }
    return out;
}

struct Candidate {
    std::size_t a = 0;
    std::size_t b = 0;
    double p = -1.0;
    std::pair<std::string, std::string> key;
};

// Larger p wins; equal p falls back to the smaller label pair.
bool better(const Candidate& x, const Candidate& y)
{
    if (x.p != y.p)
        return x.p > y.p;
    return x.key < y.key;
}

} // namespace

Grouping merge_categories(const CountMatrix& table, std::span<const std::string> labels,
                          PartitionKind kind, std::optional<std::size_t> floating,
                          double alpha_merge, std::int64_t min_child)
{
    const auto c = static_cast<std::size_t>(table.rows());
    if (labels.size() != c)
        throw std::invalid_argument("merge_categories: label count differs from table rows");

    // Ordered sequence of groups; a still-floating group sits outside the
    // ordinal adjacency chain.
    std::vector<Group> groups;
    for (std::size_t i = 0; i < c; ++i)
        groups.push_back({{i}, labels[i], floating && *floating == i});

    auto allowed = [&](std::size_t i, std::size_t j) {
        if (kind == PartitionKind::nominal || groups[i].floating || groups[j].floating)
            return true;
        // Adjacent in the chain of non-floating groups.
        std::size_t lo = std::min(i, j), hi = std::max(i, j);
        for (std::size_t k = lo + 1; k < hi; ++k)
            if (!groups[k].floating)
                return false;
        return true;
    };

    auto candidate = [&](std::size_t i, std::size_t j) {
        Candidate cand;
        cand.a = i;
        cand.b = j;
        cand.p = pair_p_value(table, groups[i], groups[j]);
        cand.key = std::minmax(groups[i].label, groups[j].label);
        return cand;
    };

    auto merge = [&](std::size_t i, std::size_t j) {
        if (i > j)
            std::swap(i, j);
        auto& into = groups[i];
        const bool keep_position = !groups[i].floating || groups[j].floating;
        into.members.insert(into.members.end(), groups[j].members.begin(), groups[j].members.end());
        std::sort(into.members.begin(), into.members.end());
        into.label = join_labels(labels, into.members);
        into.floating = into.floating && groups[j].floating;
        if (keep_position) {
            groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(j));
        } else {
            // A floating group joining an ordinal group takes that group's
            // place in the chain.
            Group merged = std::move(into);
            groups[j] = std::move(merged);
            groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(i));
        }
    };

    while (groups.size() > 1) {
        std::optional<Candidate> best;
        for (std::size_t i = 0; i < groups.size(); ++i)
            for (std::size_t j = i + 1; j < groups.size(); ++j)
                if (allowed(i, j)) {
                    auto cand = candidate(i, j);
                    if (!best || better(cand, *best))
                        best = cand;
                }
        if (!best)
            break;
        if (best->p > alpha_merge) {
            merge(best->a, best->b);
            continue;
        }

        // Significant differences everywhere; now enforce the size floor.
        std::optional<std::size_t> smallest;
        for (std::size_t i = 0; i < groups.size(); ++i) {
            const auto n = group_total(table, groups[i]);
            if (n >= min_child)
                continue;
            if (!smallest) {
                smallest = i;
                continue;
            }
            const auto m = group_total(table, groups[*smallest]);
            if (n < m || (n == m && groups[i].label < groups[*smallest].label))
                smallest = i;
        }
        if (!smallest)
            break;
        std::optional<Candidate> partner;
        for (std::size_t j = 0; j < groups.size(); ++j) {
            if (j == *smallest || !allowed(*smallest, j))
                continue;
            auto cand = candidate(*smallest, j);
            if (!partner || better(cand, *partner))
                partner = cand;
        }
        if (!partner)
            break;
        merge(partner->a, partner->b);
    }

    Grouping out;
    for (const auto& g : groups)
        out.push_back(g.members);
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
    return out;
}

// ---------------------------------------------------------------- splits

std::vector<std::string> Split::group_labels(std::size_t child) const
{
    std::vector<std::string> out;
    for (auto m : groups.at(child))
        out.push_back(categories[m]);
    return out;
}

std::optional<std::size_t> Split::route(const Cell& value) const
{
    if (is_missing(value))
        return missing_child;
    if (kind == ColumnKind::continuous) {
        const auto* x = std::get_if<double>(&value);
        if (!x)
            return missing_child;
        // Values beyond the training range land in the end bins.
        const auto bin = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), *x) - cuts.begin());
        return child_of_category.at(bin);
    }
    const auto* s = std::get_if<std::string>(&value);
    if (!s)
        return missing_child;
    const auto present = missing_child ? categories.size() - 1 : categories.size();
    for (std::size_t i = 0; i < present; ++i)
        if (categories[i] == *s)
            return child_of_category[i];
    return missing_child;
}

std::int64_t ChaidNode::total() const
{
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

namespace {

std::size_t count_nodes(const ChaidNode& n)
{
    std::size_t k = 1;
    for (const auto& c : n.children)
        k += count_nodes(c);
    return k;
}

int max_depth_of(const ChaidNode& n)
{
    int d = n.depth;
    for (const auto& c : n.children)
        d = std::max(d, max_depth_of(c));
    return d;
}

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::size_t class_index(const std::vector<std::string>& class_labels, const std::string& label)
{
    return static_cast<std::size_t>(std::lower_bound(class_labels.begin(), class_labels.end(), label) -
                                    class_labels.begin());
}

// Equal-frequency cut points taken from the data itself, so any strictly
// increasing transform of the column yields the same bins.
std::vector<double> quantile_cuts(std::vector<double> values, int bins)
{
    std::sort(values.begin(), values.end());
    std::vector<double> cuts;
    const auto n = values.size();
    for (int k = 1; k < bins; ++k) {
        const auto idx = static_cast<std::size_t>(k) * n / static_cast<std::size_t>(bins);
        if (idx >= n)
            break;
        const double q = values[idx];
        if (q > values.front() && (cuts.empty() || q > cuts.back()))
            cuts.push_back(q);
    }
    return cuts;
}

struct PredictorTable {
    Split split;
    CountMatrix table;
    std::optional<std::size_t> floating;
    std::vector<std::size_t> category_of_row;
};

// Builds the categories x classes table of one predictor over the node rows.
PredictorTable tabulate(const Dataset& d, std::span<const std::size_t> rows, std::size_t column,
                        const std::vector<std::string>& class_labels, const ChaidParams& params)
{
    const auto& cs = d.schema[column];
    PredictorTable pt;
    pt.split.predictor = cs.name;
    pt.split.column = column;
    pt.split.kind = cs.kind;

    bool any_missing = false;
    std::vector<std::optional<std::size_t>> cat(rows.size());

    if (cs.kind == ColumnKind::continuous) {
        std::vector<double> values;
        for (auto r : rows)
            if (const auto* x = std::get_if<double>(&d.rows[r][column]))
                values.push_back(*x);
        if (!values.empty()) {
            auto& s = pt.split;
            s.cuts = quantile_cuts(values, params.continuous_bins);
            const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
            s.range_lo = *lo;
            s.range_hi = *hi;
            for (std::size_t b = 0; b <= s.cuts.size(); ++b) {
                const double from = b == 0 ? s.range_lo : s.cuts[b - 1];
                const bool last = b == s.cuts.size();
                const double to = last ? s.range_hi : s.cuts[b];
                s.categories.push_back("[" + format_number(from) + ", " + format_number(to) + (last ? "]" : ")"));
            }
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (const auto* x = std::get_if<double>(&d.rows[rows[i]][column]))
                cat[i] = static_cast<std::size_t>(
                    std::upper_bound(pt.split.cuts.begin(), pt.split.cuts.end(), *x) - pt.split.cuts.begin());
            else
                any_missing = true;
        }
    } else {
        // Only categories present at this node take part.
        std::set<std::string> present;
        for (auto r : rows) {
            if (const auto* s = std::get_if<std::string>(&d.rows[r][column]))
                present.insert(*s);
            else
                any_missing = true;
        }
        if (cs.kind == ColumnKind::ordinal) {
            for (const auto& l : cs.ordered_levels)
                if (present.count(l))
                    pt.split.categories.push_back(l);
        } else {
            pt.split.categories.assign(present.begin(), present.end());
        }
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (const auto* s = std::get_if<std::string>(&d.rows[rows[i]][column])) {
                const auto& cats = pt.split.categories;
                cat[i] = static_cast<std::size_t>(std::find(cats.begin(), cats.end(), *s) - cats.begin());
            }
    }
    if (any_missing) {
        pt.floating = pt.split.categories.size();
        pt.split.categories.emplace_back(kMissingLabel);
    }

    pt.table = CountMatrix::Zero(static_cast<Eigen::Index>(pt.split.categories.size()),
                                 static_cast<Eigen::Index>(class_labels.size()));
    pt.category_of_row.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto k = cat[i] ? *cat[i] : *pt.floating;
        pt.category_of_row[i] = k;
        const auto label = *d.response_of(rows[i]);
        ++pt.table(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(class_index(class_labels, label)));
    }
    return pt;
}

} // namespace

std::optional<Split> best_split(const Dataset& d, std::span<const std::size_t> rows,
                                const std::vector<std::string>& class_labels, const ChaidParams& params)
{
    std::optional<Split> best;
    for (auto column : d.schema.predictor_indices()) {
        auto pt = tabulate(d, rows, column, class_labels, params);
        const auto c = pt.split.categories.size();
        if (c < 2)
            continue;

        const auto kind =
            pt.split.kind == ColumnKind::nominal ? PartitionKind::nominal : PartitionKind::ordinal;
        auto groups = merge_categories(pt.table, pt.split.categories, kind, pt.floating,
                                       params.alpha_merge, params.min_child);
        const auto r = groups.size();
        if (r < 2)
            continue;

        CountMatrix merged = CountMatrix::Zero(static_cast<Eigen::Index>(r), pt.table.cols());
        bool undersized = false;
        for (std::size_t g = 0; g < r; ++g) {
            for (auto m : groups[g])
                merged.row(static_cast<Eigen::Index>(g)) += pt.table.row(static_cast<Eigen::Index>(m));
            if (merged.row(static_cast<Eigen::Index>(g)).sum() < params.min_child)
                undersized = true;
        }
        if (undersized)
            continue;

        ChiSquareResult chi;
        try {
            chi = chi_square_independence(merged);
        } catch (const DataError&) {
            continue; // pure node
        }

        auto& s = pt.split;
        s.statistic = chi.statistic;
        s.df = chi.df;
        s.raw_p = chi.p_value;
        const double log_mult = log_bonferroni_multiplier(static_cast<int>(c), static_cast<int>(r), kind);
        s.adjusted_p = chi.p_value > 0.0 ? std::min(1.0, std::exp(std::log(chi.p_value) + log_mult)) : 0.0;
        if (s.adjusted_p > params.alpha_split)
            continue;

        s.child_of_category.assign(c, 0);
        for (std::size_t g = 0; g < r; ++g)
            for (auto m : groups[g])
                s.child_of_category[m] = g;
        if (pt.floating)
            s.missing_child = s.child_of_category[*pt.floating];
        std::int64_t largest = -1;
        for (std::size_t g = 0; g < r; ++g) {
            const auto n = merged.row(static_cast<Eigen::Index>(g)).sum();
            if (n > largest) {
                largest = n;
                s.default_child = g;
            }
        }
        s.groups = std::move(groups);

        const bool wins = !best || s.adjusted_p < best->adjusted_p ||
                          (s.adjusted_p == best->adjusted_p &&
                           (s.raw_p < best->raw_p || (s.raw_p == best->raw_p && s.predictor < best->predictor)));
        if (wins)
            best = std::move(s);
    }
    return best;
}

namespace {

ChaidNode grow(const Dataset& d, const std::vector<std::size_t>& rows, int depth,
               const std::vector<std::string>& class_labels, const ChaidParams& params)
{
    ChaidNode node;
    node.depth = depth;
    node.counts.assign(class_labels.size(), 0);
    for (auto r : rows)
        ++node.counts[class_index(class_labels, *d.response_of(r))];

    if (depth >= params.max_depth || static_cast<std::int64_t>(rows.size()) < params.min_parent)
        return node;
    auto split = best_split(d, rows, class_labels, params);
    if (!split)
        return node;

    std::vector<std::vector<std::size_t>> parts(split->groups.size());
    for (auto r : rows) {
        const auto child = split->route(d.rows[r][split->column]);
        parts[child ? *child : split->default_child].push_back(r);
    }
    node.split = std::move(split);
    for (const auto& part : parts)
        node.children.push_back(grow(d, part, depth + 1, class_labels, params));
    return node;
}

const ChaidNode* descend(const ChaidNode& node, const PatientRecord& record, std::vector<const ChaidNode*>* trail)
{
    const ChaidNode* cur = &node;
    while (!cur->is_leaf()) {
        if (trail)
            trail->push_back(cur);
        const auto& s = *cur->split;
        const auto child = s.route(record[s.column]);
        cur = &cur->children[child ? *child : s.default_child];
    }
    return cur;
}

void check_record(const ChaidTree& tree, const PatientRecord& record)
{
    if (record.size() != tree.record_width)
        throw ModelError("SchemaMismatch", "record has " + std::to_string(record.size()) +
                                               " fields, tree expects " + std::to_string(tree.record_width));
}

std::vector<double> proportions(const std::vector<std::int64_t>& counts)
{
    const double n = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}));
    std::vector<double> p(counts.size(), 0.0);
    for (std::size_t i = 0; i < counts.size(); ++i)
        p[i] = n > 0 ? static_cast<double>(counts[i]) / n : 1.0 / static_cast<double>(counts.size());
    return p;
}

} // namespace

std::size_t ChaidTree::node_count() const { return count_nodes(root); }
int ChaidTree::depth() const { return max_depth_of(root); }

ChaidTree fit_chaid(const Dataset& train, const ChaidParams& params)
{
    params.validate();
    if (static_cast<std::int64_t>(train.size()) < params.min_parent)
        throw ModelError("TooFewRows", "chaid needs at least min_parent=" + std::to_string(params.min_parent) +
                                           " training rows, got " + std::to_string(train.size()));
    for (std::size_t i = 0; i < train.size(); ++i)
        if (!train.response_of(i))
            throw DataError("MissingResponse", "training row " + std::to_string(i + 1) + " has no response");

    ChaidTree tree;
    tree.class_labels = train.response_labels();
    tree.params = params;
    tree.schema_fingerprint = train.schema.fingerprint();
    tree.record_width = train.schema.size();
    std::vector<std::size_t> rows(train.size());
    std::iota(rows.begin(), rows.end(), 0);
    tree.root = grow(train, rows, 0, tree.class_labels, params);
    return tree;
}

std::vector<double> predict_proba(const ChaidTree& tree, const PatientRecord& record)
{
    check_record(tree, record);
    return proportions(descend(tree.root, record, nullptr)->counts);
}

std::string predict(const ChaidTree& tree, const PatientRecord& record)
{
    check_record(tree, record);
    std::vector<const ChaidNode*> trail;
    const ChaidNode* leaf = descend(tree.root, record, &trail);
    const auto p = proportions(leaf->counts);
    const double top = *std::max_element(p.begin(), p.end());
    const ChaidNode* parent = trail.empty() ? nullptr : trail.back();

    std::optional<std::size_t> pick;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] != top)
            continue;
        if (!pick || (parent && parent->counts[k] > parent->counts[*pick]))
            pick = k;
    }
    return tree.class_labels[*pick];
}

Explanation explain(const ChaidTree& tree, const PatientRecord& record)
{
    check_record(tree, record);
    std::vector<const ChaidNode*> trail;
    const ChaidNode* leaf = descend(tree.root, record, &trail);
    Explanation e;
    for (const auto* n : trail) {
        const auto& s = *n->split;
        const auto child = s.route(record[s.column]);
        e.path.push_back({s.predictor, s.group_labels(child ? *child : s.default_child), n->counts});
    }
    e.leaf_counts = leaf->counts;
    return e;
}

// ---------------------------------------------------------------- JSON

namespace {

nlohmann::json node_to_json(const ChaidNode& n)
{
    nlohmann::json j = {{"counts", n.counts}, {"depth", n.depth}};
    if (n.split) {
        const auto& s = *n.split;
        nlohmann::json js = {{"predictor", s.predictor},
                             {"column", s.column},
                             {"kind", to_string(s.kind)},
                             {"categories", s.categories},
                             {"groups", s.groups},
                             {"child_of_category", s.child_of_category},
                             {"default_child", s.default_child},
                             {"cuts", s.cuts},
                             {"range_lo", s.range_lo},
                             {"range_hi", s.range_hi},
                             {"statistic", s.statistic},
                             {"df", s.df},
                             {"raw_p", s.raw_p},
                             {"adjusted_p", s.adjusted_p}};
        js["missing_child"] = s.missing_child ? nlohmann::json(*s.missing_child) : nlohmann::json(nullptr);
        j["split"] = std::move(js);
        nlohmann::json kids = nlohmann::json::array();
        for (const auto& c : n.children)
            kids.push_back(node_to_json(c));
        j["children"] = std::move(kids);
    }
    return j;
}

ChaidNode node_from_json(const nlohmann::json& j)
{
    ChaidNode n;
    n.counts = j.at("counts").get<std::vector<std::int64_t>>();
    n.depth = j.at("depth").get<int>();
    if (j.contains("split")) {
        const auto& js = j.at("split");
        Split s;
        s.predictor = js.at("predictor").get<std::string>();
        s.column = js.at("column").get<std::size_t>();
        s.kind = column_kind_from_string(js.at("kind").get<std::string>());
        s.categories = js.at("categories").get<std::vector<std::string>>();
        s.groups = js.at("groups").get<Grouping>();
        s.child_of_category = js.at("child_of_category").get<std::vector<std::size_t>>();
        s.default_child = js.at("default_child").get<std::size_t>();
        s.cuts = js.at("cuts").get<std::vector<double>>();
        s.range_lo = js.at("range_lo").get<double>();
        s.range_hi = js.at("range_hi").get<double>();
        s.statistic = js.at("statistic").get<double>();
        s.df = js.at("df").get<int>();
        s.raw_p = js.at("raw_p").get<double>();
        s.adjusted_p = js.at("adjusted_p").get<double>();
        if (!js.at("missing_child").is_null())
            s.missing_child = js.at("missing_child").get<std::size_t>();
        n.split = std::move(s);
        for (const auto& c : j.at("children"))
            n.children.push_back(node_from_json(c));
        if (n.children.size() != n.split->groups.size())
            throw ModelError("CorruptArtifact", "chaid node child count differs from its group count");
    }
    return n;
}

} // namespace

nlohmann::json to_json(const ChaidTree& tree)
{
    return {{"class_labels", tree.class_labels},
            {"params", tree.params.to_json()},
            {"schema_fingerprint", tree.schema_fingerprint},
            {"record_width", tree.record_width},
            {"root", node_to_json(tree.root)}};
}

ChaidTree chaid_from_json(const nlohmann::json& j)
{
    ChaidTree t;
    t.class_labels = j.at("class_labels").get<std::vector<std::string>>();
    t.params = ChaidParams::from_json(j.at("params"));
    t.schema_fingerprint = j.at("schema_fingerprint").get<std::string>();
    t.record_width = j.at("record_width").get<std::size_t>();
    t.root = node_from_json(j.at("root"));
    return t;
}

} // namespace pacdisp
