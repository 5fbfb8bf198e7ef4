#include <doctest.h>

#include <numeric>

#include "pacdisp/chaid.hpp"
#include "support/synthetic.hpp"

using namespace pacdisp;

namespace {

CountMatrix counts(std::initializer_list<std::pair<std::int64_t, std::int64_t>> rows)
{
    CountMatrix m(static_cast<Eigen::Index>(rows.size()), 2);
    Eigen::Index i = 0;
    for (auto [a, b] : rows) {
        m(i, 0) = a;
        m(i, 1) = b;
        ++i;
    }
    return m;
}

std::vector<std::size_t> all_rows(const Dataset& d)
{
    std::vector<std::size_t> r(d.size());
    std::iota(r.begin(), r.end(), 0);
    return r;
}

void check_same_structure(const ChaidNode& a, const ChaidNode& b)
{
    CHECK(a.counts == b.counts);
    REQUIRE(a.children.size() == b.children.size());
    REQUIRE(a.split.has_value() == b.split.has_value());
    if (a.split) {
        CHECK(a.split->predictor == b.split->predictor);
        CHECK(a.split->groups == b.split->groups);
        CHECK(a.split->child_of_category == b.split->child_of_category);
    }
    for (std::size_t i = 0; i < a.children.size(); ++i)
        check_same_structure(a.children[i], b.children[i]);
}

void check_child_sums(const ChaidNode& n)
{
    if (n.is_leaf())
        return;
    std::int64_t sum = 0;
    for (const auto& c : n.children) {
        sum += c.total();
        check_child_sums(c);
    }
    CHECK(sum == n.total());
}

double accuracy(const ChaidTree& t, const Dataset& d)
{
    std::size_t ok = 0;
    for (std::size_t i = 0; i < d.size(); ++i)
        ok += predict(t, d.rows[i]) == *d.response_of(i);
    return static_cast<double>(ok) / static_cast<double>(d.size());
}

} // namespace

TEST_CASE("merge: identical categories collapse")
{
    const std::vector<std::string> labels{"a", "b"};
    const auto g = merge_categories(counts({{10, 20}, {10, 20}}), labels, PartitionKind::nominal, std::nullopt, 0.05, 1);
    CHECK(g == Grouping{{0, 1}});
}

TEST_CASE("merge: A and B alike, C opposite")
{
    const std::vector<std::string> labels{"A", "B", "C"};
    const auto g =
        merge_categories(counts({{40, 10}, {40, 10}, {0, 50}}), labels, PartitionKind::nominal, std::nullopt, 0.05, 1);
    CHECK(g == Grouping{{0, 1}, {2}});
}

TEST_CASE("merge: single category")
{
    const std::vector<std::string> labels{"only"};
    CHECK(merge_categories(counts({{3, 4}}), labels, PartitionKind::nominal, std::nullopt, 0.05, 1) == Grouping{{0}});
}

TEST_CASE("merge: ordinal predictors only merge neighbours")
{
    const std::vector<std::string> labels{"lo", "mid", "hi"};
    const auto t = counts({{40, 10}, {0, 50}, {40, 10}});
    CHECK(merge_categories(t, labels, PartitionKind::ordinal, std::nullopt, 0.05, 1) == Grouping{{0}, {1}, {2}});
    CHECK(merge_categories(t, labels, PartitionKind::nominal, std::nullopt, 0.05, 1) == Grouping{{0, 2}, {1}});
}

TEST_CASE("merge: the floating category may join any group")
{
    const std::vector<std::string> labels{"lo", "mid", "hi", kMissingLabel};
    const auto t = counts({{40, 10}, {0, 50}, {10, 40}, {41, 9}});
    const auto g = merge_categories(t, labels, PartitionKind::ordinal, 3, 0.05, 1);
    CHECK(g == Grouping{{0, 3}, {1}, {2}});
}

TEST_CASE("merge: undersized groups are absorbed")
{
    const std::vector<std::string> labels{"a", "b", "c"};
    // c is clearly different but has only 3 rows.
    const auto t = counts({{40, 10}, {5, 45}, {0, 3}});
    const auto g = merge_categories(t, labels, PartitionKind::nominal, std::nullopt, 0.05, 10);
    CHECK(g == Grouping{{0}, {1, 2}});
}

TEST_CASE("merge never yields more groups than categories and covers every category")
{
    detail::Engine eng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int c = 2 + static_cast<int>(detail::uniform_index(eng, 6));
        CountMatrix t(c, 2);
        std::vector<std::string> labels;
        for (int i = 0; i < c; ++i) {
            t(i, 0) = 1 + static_cast<std::int64_t>(detail::uniform_index(eng, 30));
            t(i, 1) = 1 + static_cast<std::int64_t>(detail::uniform_index(eng, 30));
            labels.push_back("c" + std::to_string(i));
        }
        for (auto kind : {PartitionKind::nominal, PartitionKind::ordinal}) {
            const auto g = merge_categories(t, labels, kind, std::nullopt, 0.05, 5);
            CHECK(g.size() <= static_cast<std::size_t>(c));
            std::vector<std::size_t> seen;
            for (const auto& grp : g) {
                seen.insert(seen.end(), grp.begin(), grp.end());
                if (kind == PartitionKind::ordinal)
                    CHECK(grp.back() - grp.front() + 1 == grp.size());
            }
            std::sort(seen.begin(), seen.end());
            std::vector<std::size_t> expect(static_cast<std::size_t>(c));
            std::iota(expect.begin(), expect.end(), 0);
            CHECK(seen == expect);
        }
    }
}

TEST_CASE("best_split on an aligned binary predictor")
{
    std::vector<PatientRecord> rows;
    for (int i = 0; i < 100; ++i)
        rows.push_back({std::string(i % 2 ? "yes" : "no"), synth::label(i % 2)});
    const auto d = synth::make({synth::col("f", ColumnKind::nominal), synth::col("y", ColumnKind::response)}, rows);
    ChaidParams p;
    const auto s = best_split(d, all_rows(d), d.response_labels(), p);
    REQUIRE(s);
    CHECK(s->predictor == "f");
    CHECK(s->groups.size() == 2);
    CHECK(s->statistic == doctest::Approx(100.0));
    CHECK(s->adjusted_p < 1e-15);
}

TEST_CASE("best_split finds nothing in an independent table")
{
    std::vector<PatientRecord> rows;
    auto add = [&](const char* f, bool pos, int n) {
        for (int i = 0; i < n; ++i)
            rows.push_back({std::string(f), synth::label(pos)});
    };
    add("u", true, 26);
    add("u", false, 24);
    add("v", true, 24);
    add("v", false, 26);
    const auto d = synth::make({synth::col("f", ColumnKind::nominal), synth::col("y", ColumnKind::response)}, rows);
    CHECK_FALSE(best_split(d, all_rows(d), d.response_labels(), ChaidParams{}));

    ChaidParams p;
    const auto t = fit_chaid(d, p);
    CHECK(t.root.is_leaf());
    // Equal priors: the tie goes to class-label order.
    CHECK(predict(t, {std::string("u"), Missing{}}) == "neg");
}

TEST_CASE("fit on a perfectly separable predictor")
{
    std::vector<PatientRecord> rows;
    for (int i = 0; i < 60; ++i)
        rows.push_back({std::string(i < 20 ? "a" : "b"), synth::label(i < 20)});
    const auto d = synth::make({synth::col("f", ColumnKind::nominal), synth::col("y", ColumnKind::response)}, rows);
    const auto t = fit_chaid(d, ChaidParams{});
    CHECK(t.depth() == 1);
    for (const auto& c : t.root.children)
        CHECK(std::count(c.counts.begin(), c.counts.end(), 0) == 1);
    CHECK(accuracy(t, d) == 1.0);
    check_child_sums(t.root);

    // A root-only tree predicts the training prior.
    ChaidParams shallow;
    shallow.max_depth = 0;
    const auto root_only = fit_chaid(d, shallow);
    const auto p = predict_proba(root_only, {std::string("a"), Missing{}});
    CHECK(p[0] == doctest::Approx(40.0 / 60.0));
    CHECK(p[1] == doctest::Approx(20.0 / 60.0));
}

TEST_CASE("separable continuous predictor generalizes")
{
    const auto d = synth::separable(500, 21);
    const auto [train, test] = split(d, 0.7, 21);
    const auto t = fit_chaid(train, ChaidParams{});
    CHECK(accuracy(t, test) >= 0.95);
    check_child_sums(t.root);
    for (std::size_t i = 0; i < test.size(); ++i) {
        const auto p = predict_proba(t, test.rows[i]);
        CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        for (double v : p)
            CHECK(v >= 0.0);
    }
}

TEST_CASE("monotone transforms leave the tree unchanged")
{
    const auto d = synth::separable(300, 5);
    Dataset e = d;
    for (auto& r : e.rows) {
        r[0] = std::exp(std::get<double>(r[0]) / 3.0);
        r[1] = std::pow(std::get<double>(r[1]), 3.0);
    }
    const auto a = fit_chaid(d, ChaidParams{});
    const auto b = fit_chaid(e, ChaidParams{});
    check_same_structure(a.root, b.root);
    for (std::size_t i = 0; i < d.size(); ++i)
        CHECK(predict(a, d.rows[i]) == predict(b, e.rows[i]));
}

TEST_CASE("refit is deterministic")
{
    const auto d = synth::mixed(300, 9);
    CHECK(to_json(fit_chaid(d, ChaidParams{})) == to_json(fit_chaid(d, ChaidParams{})));
}

TEST_CASE("permuted labels rarely split")
{
    int splits = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed)
        splits += fit_chaid(synth::permuted_labels(200, seed), ChaidParams{}).root.is_leaf() ? 0 : 1;
    CHECK(splits <= 6);
}

namespace {

// Root splits on g into {a} and {b, <missing>}; the second child splits on h.
ChaidTree hand_tree()
{
    ChaidTree t;
    t.class_labels = {"neg", "pos"};
    t.record_width = 3;
    t.root.counts = {10, 10};

    Split s;
    s.predictor = "g";
    s.column = 0;
    s.categories = {"a", "b", kMissingLabel};
    s.groups = {{0}, {1, 2}};
    s.child_of_category = {0, 1, 1};
    s.missing_child = 1;
    s.default_child = 1;
    t.root.split = s;

    ChaidNode left;
    left.counts = {3, 7};
    left.depth = 1;
    ChaidNode right;
    right.counts = {7, 3};
    right.depth = 1;
    Split h;
    h.predictor = "h";
    h.column = 1;
    h.categories = {"x", "y"};
    h.groups = {{0}, {1}};
    h.child_of_category = {0, 1};
    h.default_child = 0;
    right.split = h;
    ChaidNode rx, ry;
    rx.counts = {2, 2}; // tied leaf under a 7/3 parent
    ry.counts = {2, 3};
    rx.depth = ry.depth = 2;
    right.children = {rx, ry};
    t.root.children = {left, right};
    return t;
}

} // namespace

TEST_CASE("predict, tie rule and explanation on a constructed tree")
{
    const auto t = hand_tree();
    const PatientRecord a{std::string("a"), std::string("x"), Missing{}};
    const auto p = predict_proba(t, a);
    CHECK(p[0] == doctest::Approx(0.3));
    CHECK(p[1] == doctest::Approx(0.7));
    CHECK(predict(t, a) == "pos");

    // Missing g follows the floating group into the right child.
    const PatientRecord tie{Missing{}, std::string("x"), Missing{}};
    CHECK(predict_proba(t, tie)[0] == doctest::Approx(0.5));
    CHECK(predict(t, tie) == "neg"); // parent majority (7 vs 3)

    const auto e = explain(t, {std::string("b"), std::string("y"), Missing{}});
    REQUIRE(e.path.size() == 2);
    CHECK(e.path[0].predictor == "g");
    CHECK(e.path[0].group == std::vector<std::string>{"b", kMissingLabel});
    CHECK(e.path[1].group == std::vector<std::string>{"y"});
    CHECK(e.leaf_counts == std::vector<std::int64_t>{2, 3});

    // Unseen labels take the missing route.
    CHECK(predict_proba(t, {std::string("zzz"), std::string("y"), Missing{}})[1] == doctest::Approx(0.6));
    CHECK_THROWS_AS(predict(t, {std::string("a")}), ModelError);
}

TEST_CASE("tree JSON round trip")
{
    const auto d = synth::mixed(300, 4);
    const auto t = fit_chaid(d, ChaidParams{});
    const auto back = chaid_from_json(to_json(t));
    CHECK(to_json(back) == to_json(t));
    for (const auto& r : d.rows)
        CHECK(predict_proba(back, r) == predict_proba(t, r));
}

TEST_CASE("parameter validation")
{
    ChaidParams p;
    p.alpha_merge = 0.0;
    CHECK_THROWS_AS(p.validate(), ModelError);
    p = ChaidParams{};
    p.min_child = 0;
    CHECK_THROWS_AS(p.validate(), ModelError);
    CHECK(ChaidParams::from_json(ChaidParams{}.to_json()).to_json() == ChaidParams{}.to_json());
}
