#include <doctest.h>

#include <map>
#include <sstream>

#include "pacdisp/demo_data.hpp"
#include "pacdisp/encoder.hpp"
#include "support/synthetic.hpp"

using namespace pacdisp;

namespace {

Schema age_schema()
{
    return Schema({synth::col("age", ColumnKind::continuous), synth::col("sex", ColumnKind::nominal),
                   synth::col("disp", ColumnKind::response)});
}

Dataset parse(const std::string& text, const Schema& s)
{
    std::istringstream in(text);
    return parse_dataset(in, s, "inline.csv");
}

} // namespace

TEST_CASE("schema validation")
{
    CHECK_THROWS_AS(Schema({synth::col("a", ColumnKind::continuous)}), DataError);
    CHECK_THROWS_AS(Schema({synth::col("a", ColumnKind::response), synth::col("b", ColumnKind::response)}), DataError);
    CHECK_THROWS_AS(Schema({synth::col("o", ColumnKind::ordinal, {"x"}), synth::col("y", ColumnKind::response)}),
                    DataError);
    CHECK_THROWS_AS(
        Schema({synth::col("o", ColumnKind::ordinal, {"x", "x"}), synth::col("y", ColumnKind::response)}), DataError);

    const auto s = age_schema();
    CHECK(s.response_index() == 2);
    CHECK(s.predictor_indices() == std::vector<std::size_t>{0, 1});
    CHECK(Schema::from_json(s.to_json()).fingerprint() == s.fingerprint());
    CHECK_THROWS_WITH_AS(s.index_of("nope"), doctest::Contains("nope"), DataError);
}

TEST_CASE("parse a small CSV")
{
    const auto d = parse("age,sex,disp\n70,M,SNF\n\"65\",F,Rehab\n80,,SNF\n", age_schema());
    REQUIRE(d.size() == 3);
    CHECK(d.provenance.source == "inline.csv");
    CHECK(std::get<double>(d.rows[1][0]) == 65.0);
    CHECK(is_missing(d.rows[2][1]));
    CHECK(d.response_labels() == std::vector<std::string>{"Rehab", "SNF"});
}

TEST_CASE("CSV details: BOM, CRLF, quoting, column order")
{
    const auto d = parse("\xEF\xBB\xBF" "disp,age,sex\r\n\"Rehab, acute\",70,\"M\"\"x\"\r\n", age_schema());
    REQUIRE(d.size() == 1);
    CHECK(std::get<std::string>(d.rows[0][2]) == "Rehab, acute");
    CHECK(std::get<std::string>(d.rows[0][1]) == "M\"x");
    CHECK(std::get<double>(d.rows[0][0]) == 70.0);
}

TEST_CASE("missing tokens and unparseable numbers become missing")
{
    const auto d = parse("age,sex,disp\nNA,M,SNF\nabc,F,SNF\ninf,F,SNF\n", age_schema());
    for (const auto& r : d.rows)
        CHECK(is_missing(r[0]));
}

TEST_CASE("CSV structural errors")
{
    CHECK_THROWS_WITH_AS(parse("age,disp\n1,SNF\n", age_schema()), doctest::Contains("sex"), DataError);
    CHECK_THROWS_AS(parse("age,sex,disp\n1,M\n", age_schema()), DataError);
    CHECK_THROWS_AS(load_dataset("/nonexistent/file.csv", age_schema()), DataError);

    const Schema ord({synth::col("o", ColumnKind::ordinal, {"lo", "hi"}), synth::col("y", ColumnKind::response)});
    CHECK_THROWS_AS(parse("o,y\nmid,a\n", ord), DataError);
}

TEST_CASE("write_csv round-trips")
{
    const auto d = synth::mixed(50, 3);
    std::ostringstream out;
    write_csv(d, out);
    std::istringstream in(out.str());
    const auto back = parse_dataset(in, d.schema, "x");
    REQUIRE(back.size() == d.size());
    CHECK(back.rows == d.rows);
}

TEST_CASE("filter_cohort")
{
    const auto d = parse("age,sex,disp\n1,M,A\n2,F,B\n3,M,C\n4,F,\n5,M,A\n", age_schema());
    CohortSpec keep_ab;
    keep_ab.keep_response_values = {"A", "B"};
    const auto ab = filter_cohort(d, keep_ab);
    CHECK(ab.size() == 3);
    CHECK(filter_cohort(ab, keep_ab).rows == ab.rows);

    CohortSpec all;
    all.keep_response_values = {"A", "B", "C"};
    all.drop_missing_response = false;
    CHECK(filter_cohort(d, all).size() == 5);

    CohortSpec unknown;
    unknown.keep_response_values = {"Z"};
    CHECK_THROWS_AS(filter_cohort(d, unknown), DataError);
}

TEST_CASE("descriptive statistics")
{
    const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
    const auto s = descriptive_stats(v);
    CHECK(s.n == 8);
    CHECK(s.mean == doctest::Approx(5.0));
    CHECK(s.std_dev == doctest::Approx(2.138089935).epsilon(1e-9));
    CHECK(s.range == 7.0);
    CHECK(s.mean_std_error == doctest::Approx(2.138089935 / std::sqrt(8.0)).epsilon(1e-9));

    // Adjusted Fisher-Pearson skewness and excess kurtosis, computed by hand.
    double m2 = 0, m3 = 0, m4 = 0;
    for (double x : v) {
        m2 += (x - 5) * (x - 5) / 8;
        m3 += std::pow(x - 5, 3) / 8;
        m4 += std::pow(x - 5, 4) / 8;
    }
    const double n = 8;
    const double g1 = m3 / std::pow(m2, 1.5);
    const double G1 = g1 * std::sqrt(n * (n - 1)) / (n - 2);
    const double g2 = m4 / (m2 * m2) - 3;
    const double G2 = (n - 1) / ((n - 2) * (n - 3)) * ((n + 1) * g2 + 6);
    CHECK(s.skewness == doctest::Approx(G1).epsilon(1e-12));
    CHECK(s.kurtosis == doctest::Approx(G2).epsilon(1e-12));
    const double ses = std::sqrt(6 * n * (n - 1) / ((n - 2) * (n + 1) * (n + 3)));
    CHECK(s.skewness_std_error == doctest::Approx(ses).epsilon(1e-12));
    CHECK(s.kurtosis_std_error ==
          doctest::Approx(2 * ses * std::sqrt((n * n - 1) / ((n - 3) * (n + 5)))).epsilon(1e-12));

    const std::vector<double> sym{1, 2, 3};
    CHECK(descriptive_stats(sym).skewness == doctest::Approx(0.0));
    CHECK(std::isnan(descriptive_stats(sym).kurtosis));
    CHECK_THROWS_AS(descriptive_stats(std::vector<double>{}), DataError);
}

TEST_CASE("descriptive statistics: shift invariance")
{
    const auto d = synth::mixed(200, 11);
    std::vector<double> v;
    for (const auto& r : d.rows)
        if (auto* x = std::get_if<double>(&r[1]))
            v.push_back(*x);
    const auto a = descriptive_stats(v);
    CHECK(a.variance >= 0.0);
    for (double c : {-50.0, 3.25, 1000.0}) {
        std::vector<double> w = v;
        for (auto& x : w)
            x += c;
        const auto b = descriptive_stats(w);
        CHECK(b.mean == doctest::Approx(a.mean + c).epsilon(1e-12));
        CHECK(std::abs(b.std_dev - a.std_dev) < 1e-9);
        CHECK(std::abs(b.skewness - a.skewness) < 1e-9);
        CHECK(std::abs(b.kurtosis - a.kurtosis) < 1e-9);
    }
}

TEST_CASE("descriptive statistics on a dataset column")
{
    const auto d = parse("age,sex,disp\n1,M,A\n,F,B\n3,M,A\n", age_schema());
    CHECK(descriptive_stats(d, "age").n == 2);
    CHECK_THROWS_AS(descriptive_stats(d, "sex"), DataError);
    CHECK_THROWS_AS(descriptive_stats(d, "missing_column"), DataError);
}

TEST_CASE("crosstab")
{
    const auto d = parse("age,sex,disp\n1,M,A\n2,F,A\n3,M,B\n4,F,B\n5,,B\n", age_schema());
    const auto t = crosstab(d, "disp", "sex");
    CHECK(t.row_labels == std::vector<std::string>{"A", "B"});
    CHECK(t.col_labels == std::vector<std::string>{"F", "M", kMissingLabel});
    CHECK(t.counts(0, 0) == 1);
    CHECK(t.counts(1, 2) == 1);
    CHECK(t.total() == static_cast<std::int64_t>(d.size()));

    const auto self = crosstab(d, "sex", "sex");
    for (Eigen::Index i = 0; i < self.counts.rows(); ++i)
        for (Eigen::Index j = 0; j < self.counts.cols(); ++j)
            if (i != j)
                CHECK(self.counts(i, j) == 0);

    const auto four = crosstab(parse("age,sex,disp\n1,M,A\n2,F,A\n3,M,B\n4,F,B\n", age_schema()), "disp", "sex");
    CHECK((four.counts.array() == 1).all());
    CHECK_THROWS_AS(crosstab(d, "age", "sex"), DataError);
}

TEST_CASE("stratified split follows the floor rule")
{
    std::vector<PatientRecord> rows;
    for (int i = 0; i < 38; ++i)
        rows.push_back({double(i), std::string("M"), std::string("Rehab Facility")});
    for (int i = 0; i < 190; ++i)
        rows.push_back({double(i), std::string("F"), std::string("Skilled Nursing Facility")});
    Dataset d{age_schema(), rows, {}};

    for (std::uint64_t seed : {1ull, 2ull, 1600ull, 99999ull}) {
        const auto [train, test] = split(d, 0.7, seed);
        CHECK(train.size() == 159);
        CHECK(test.size() == 69);
        std::map<std::string, int> per;
        for (std::size_t i = 0; i < train.size(); ++i)
            ++per[*train.response_of(i)];
        CHECK(per["Rehab Facility"] == 26);
        CHECK(per["Skilled Nursing Facility"] == 133);
    }
    const auto a = split(d, 0.7, 5);
    const auto b = split(d, 0.7, 5);
    CHECK(a.first.rows == b.first.rows);
    CHECK(a.second.rows == b.second.rows);

    std::vector<PatientRecord> ten(10, PatientRecord{1.0, std::string("M"), std::string("x")});
    const auto [tr, te] = split(Dataset{age_schema(), ten, {}}, 0.5, 1);
    CHECK(tr.size() == 5);
    CHECK(te.size() == 5);

    CHECK_THROWS_AS(split(d, 0.0, 1), DataError);
    CHECK_THROWS_AS(split(d, 1.0, 1), DataError);
}

TEST_CASE("encoder layout")
{
    const Schema s({synth::col("g", ColumnKind::nominal), synth::col("c", ColumnKind::continuous),
                    synth::col("y", ColumnKind::response)});
    Dataset d{s,
              {{std::string("a"), 5.0, std::string("p")},
               {std::string("b"), 5.0, std::string("n")},
               {std::string("c"), 5.0, std::string("p")}},
              {}};
    const auto fm = encode(d, "p");
    CHECK(fm.x.cols() == 5); // 3 levels + missing indicator, plus one standardized column
    CHECK(fm.feature_names[3] == std::string("g=") + kMissingLabel);
    CHECK((fm.x.col(4).array() == 0.0).all());
    CHECK(fm.y(0) == 1.0);
    CHECK(fm.y(1) == -1.0);

    // Re-applying the encoder to its own training data reproduces the matrix.
    CHECK(fm.encoder->transform(d).x == fm.x);
    // Unseen labels fall into the missing indicator.
    const auto v = fm.encoder->encode({std::string("zzz"), 5.0, Missing{}});
    CHECK(v(3) == 1.0);
    CHECK(v.head(3).sum() == 0.0);

    CHECK_THROWS_AS(encode(d, "other"), DataError);
    const auto restored = Encoder::from_json(fm.encoder->to_json());
    CHECK(restored.transform(d).x == fm.x);
}

TEST_CASE("demo cohort reproduces the published disposition by gender counts")
{
    const auto d = make_demo_dataset(1600);
    CHECK(d.size() == 1515);
    CHECK(d.response_labels().size() == 16);
    const auto t = crosstab(d, "DischargeDisposition", "Gender");
    const auto row = [&](const std::string& label) {
        const auto it = std::find(t.row_labels.begin(), t.row_labels.end(), label);
        return static_cast<Eigen::Index>(it - t.row_labels.begin());
    };
    const auto col = [&](const std::string& label) {
        const auto it = std::find(t.col_labels.begin(), t.col_labels.end(), label);
        return static_cast<Eigen::Index>(it - t.col_labels.begin());
    };
    CHECK(t.counts(row("Rehab Facility"), col("Male")) == 24);
    CHECK(t.counts(row("Rehab Facility"), col("Female")) == 14);
    CHECK(t.counts(row("Skilled Nursing Facility"), col("Male")) == 76);
    CHECK(t.counts(row("Skilled Nursing Facility"), col("Female")) == 114);
    CHECK(t.counts(row("Hospice"), col(kMissingLabel)) == 1);

    CohortSpec swing;
    swing.keep_response_values = {"Swing Bed"};
    CHECK(filter_cohort(d, swing).size() == 2);
    CHECK(make_demo_dataset(1600).rows == d.rows);
}
