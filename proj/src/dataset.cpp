#include "pacdisp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "pacdisp/detail/rng.hpp"

namespace pacdisp {

std::string to_string(ColumnKind kind)
{
    switch (kind) {
    case ColumnKind::nominal: return "nominal";
    case ColumnKind::ordinal: return "ordinal";
    case ColumnKind::continuous: return "continuous";
    case ColumnKind::response: return "response";
    }
    return "nominal";
}

ColumnKind column_kind_from_string(const std::string& s)
{
    if (s == "nominal") return ColumnKind::nominal;
    if (s == "ordinal") return ColumnKind::ordinal;
    if (s == "continuous") return ColumnKind::continuous;
    if (s == "response") return ColumnKind::response;
    throw DataError("InvalidSchema", "unknown column kind '" + s + "'");
}

// ---------------------------------------------------------------- Schema

Schema::Schema(std::vector<ColumnSchema> columns) : columns_(std::move(columns))
{
    std::size_t responses = 0;
    std::set<std::string> names;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        const auto& c = columns_[i];
        if (c.name.empty())
            throw DataError("InvalidSchema", "column with empty name");
        if (!names.insert(c.name).second)
            throw DataError("InvalidSchema", "duplicate column '" + c.name + "'");
        if (c.kind == ColumnKind::response) {
            ++responses;
            response_ = i;
        }
        if (c.kind == ColumnKind::ordinal) {
            std::set<std::string> levels(c.ordered_levels.begin(), c.ordered_levels.end());
            if (c.ordered_levels.size() < 2 || levels.size() != c.ordered_levels.size())
                throw DataError("InvalidSchema",
                                "ordinal column '" + c.name + "' needs >= 2 unique levels");
        }
    }
    if (responses != 1)
        throw DataError("InvalidSchema", "schema must declare exactly one response column, found " +
                                             std::to_string(responses));
}

std::optional<std::size_t> Schema::find(const std::string& name) const
{
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i].name == name)
            return i;
    return std::nullopt;
}

std::size_t Schema::index_of(const std::string& name) const
{
    if (auto i = find(name))
        return *i;
    throw DataError("UnknownColumn", "unknown column '" + name + "'");
}

std::vector<std::size_t> Schema::predictor_indices() const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i].kind != ColumnKind::response && columns_[i].predictor)
            out.push_back(i);
    return out;
}

std::string Schema::fingerprint() const
{
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&h](const std::string& s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ULL;
        }
        h ^= 0x1f;
        h *= 1099511628211ULL;
    };
    for (const auto& c : columns_) {
        feed(c.name);
        feed(to_string(c.kind));
        feed(c.predictor ? "p" : "x");
        for (const auto& l : c.ordered_levels)
            feed(l);
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

nlohmann::json Schema::to_json() const
{
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : columns_) {
        nlohmann::json j;
        j["name"] = c.name;
        j["kind"] = to_string(c.kind);
        if (c.kind == ColumnKind::ordinal)
            j["ordered_levels"] = c.ordered_levels;
        j["missing_tokens"] = c.missing_tokens;
        if (!c.predictor)
            j["predictor"] = false;
        cols.push_back(std::move(j));
    }
    return {{"format_version", 1}, {"columns", std::move(cols)}};
}

Schema Schema::from_json(const nlohmann::json& j)
{
    try {
        if (j.contains("format_version") && j.at("format_version").get<int>() != 1)
            throw DataError("InvalidSchema", "unsupported schema format_version");
        std::vector<ColumnSchema> cols;
        for (const auto& jc : j.at("columns")) {
            ColumnSchema c;
            c.name = jc.at("name").get<std::string>();
            c.kind = column_kind_from_string(jc.at("kind").get<std::string>());
            if (jc.contains("ordered_levels"))
                c.ordered_levels = jc.at("ordered_levels").get<std::vector<std::string>>();
            if (jc.contains("missing_tokens"))
                c.missing_tokens = jc.at("missing_tokens").get<std::vector<std::string>>();
            if (jc.contains("predictor"))
                c.predictor = jc.at("predictor").get<bool>();
            cols.push_back(std::move(c));
        }
        return Schema(std::move(cols));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("InvalidSchema", std::string("malformed schema document: ") + e.what());
    }
}

Schema load_schema(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("FileNotFound", "cannot open schema file " + path.string());
    try {
        return Schema::from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("InvalidSchema", "schema file " + path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------- Dataset

std::optional<std::string> Dataset::response_of(std::size_t row) const
{
    const auto& c = rows[row][schema.response_index()];
    if (const auto* s = std::get_if<std::string>(&c))
        return *s;
    return std::nullopt;
}

std::vector<std::string> Dataset::response_labels() const
{
    std::set<std::string> labels;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (auto r = response_of(i))
            labels.insert(*r);
    return {labels.begin(), labels.end()};
}

Dataset Dataset::subset(const std::vector<std::size_t>& row_indices, std::string note) const
{
    Dataset out;
    out.schema = schema;
    out.provenance = provenance;
    out.provenance.history.push_back(std::move(note));
    out.rows.reserve(row_indices.size());
    for (auto i : row_indices)
        out.rows.push_back(rows.at(i));
    return out;
}

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// Reads one RFC 4180 record; returns false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields)
{
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    char ch;
    while (in.get(ch)) {
        any = true;
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get(ch);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                field += ch;
            }
            continue;
        }
        if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            fields.push_back(std::move(field));
            return true;
        } else if (ch != '\r') {
            field += ch;
        }
    }
    if (!any)
        return false;
    fields.push_back(std::move(field));
    return true;
}

bool blank_record(const std::vector<std::string>& f)
{
    return f.size() == 1 && trim(f[0]).empty();
}

} // namespace

Cell parse_cell(const ColumnSchema& column, const std::string& raw)
{
    const std::string v = trim(raw);
    if (v.empty())
        return Missing{};
    if (std::find(column.missing_tokens.begin(), column.missing_tokens.end(), v) !=
        column.missing_tokens.end())
        return Missing{};

    switch (column.kind) {
    case ColumnKind::continuous: {
        double x = 0.0;
        const auto* first = v.data();
        const auto* last = v.data() + v.size();
        if (*first == '+')
            ++first;
        const auto [ptr, ec] = std::from_chars(first, last, x);
        if (ec != std::errc{} || ptr != last || !std::isfinite(x))
            return Missing{};
        return x;
    }
    case ColumnKind::ordinal:
        if (std::find(column.ordered_levels.begin(), column.ordered_levels.end(), v) ==
            column.ordered_levels.end())
            throw DataError("UnknownLevel",
                            "value '" + v + "' is not a level of ordinal column '" + column.name + "'");
        return v;
    case ColumnKind::nominal:
    case ColumnKind::response:
        return v;
    }
    return Missing{};
}

Dataset parse_dataset(std::istream& in, const Schema& schema, std::string source)
{
    std::vector<std::string> header;
    if (!read_csv_record(in, header))
        throw DataError("HeaderMismatch", "empty input: no header row");
    if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0)
        header[0].erase(0, 3);
    for (auto& h : header)
        h = trim(h);

    // Map schema column -> position in the file; the header must equal the
    // schema names as a set.
    std::vector<std::string> unmatched;
    std::vector<std::size_t> position(schema.size(), 0);
    std::map<std::string, std::size_t> header_pos;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (!header_pos.emplace(header[i], i).second)
            unmatched.push_back(header[i] + " (duplicate)");
        else if (!schema.find(header[i]))
            unmatched.push_back(header[i]);
    }
    for (std::size_t c = 0; c < schema.size(); ++c) {
        auto it = header_pos.find(schema[c].name);
        if (it == header_pos.end())
            unmatched.push_back(schema[c].name);
        else
            position[c] = it->second;
    }
    if (!unmatched.empty()) {
        std::string names;
        for (const auto& u : unmatched)
            names += (names.empty() ? "" : ", ") + u;
        throw DataError("HeaderMismatch", "header does not match schema; unmatched: " + names);
    }

    Dataset d;
    d.schema = schema;
    d.provenance.source = std::move(source);
    std::vector<std::string> fields;
    std::size_t line = 1;
    while (read_csv_record(in, fields)) {
        ++line;
        if (blank_record(fields))
            continue;
        if (fields.size() != header.size())
            throw DataError("RowArityError", "row " + std::to_string(d.rows.size() + 1) + " (line " +
                                                 std::to_string(line) + ") has " +
                                                 std::to_string(fields.size()) + " fields, expected " +
                                                 std::to_string(header.size()));
        PatientRecord rec;
        rec.reserve(schema.size());
        for (std::size_t c = 0; c < schema.size(); ++c)
            rec.push_back(parse_cell(schema[c], fields[position[c]]));
        d.rows.push_back(std::move(rec));
    }
    d.provenance.history.push_back("loaded " + std::to_string(d.rows.size()) + " rows");
    return d;
}

Dataset load_dataset(const std::filesystem::path& path, const Schema& schema)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("FileNotFound", "cannot open data file " + path.string());
    return parse_dataset(in, schema, path.string());
}

namespace {

void write_field(std::ostream& out, const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        out << s;
        return;
    }
    out << '"';
    for (char ch : s) {
        if (ch == '"')
            out << '"';
        out << ch;
    }
    out << '"';
}

} // namespace

void write_csv(const Dataset& d, std::ostream& out)
{
    const auto& cols = d.schema.columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c)
            out << ',';
        write_field(out, cols[c].name);
    }
    out << '\n';
    for (const auto& row : d.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                out << ',';
            if (const auto* x = std::get_if<double>(&row[c])) {
                char buf[32];
                const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *x);
                out.write(buf, ptr - buf);
            } else if (const auto* s = std::get_if<std::string>(&row[c])) {
                write_field(out, *s);
            }
        }
        out << '\n';
    }
}

Dataset filter_cohort(const Dataset& d, const CohortSpec& spec)
{
    if (spec.keep_response_values.empty())
        throw DataError("InvalidCohort", "cohort spec must keep at least one response value");

    const auto& resp = d.schema.response();
    const auto observed = d.response_labels();
    for (const auto& v : spec.keep_response_values) {
        const bool declared = std::find(resp.ordered_levels.begin(), resp.ordered_levels.end(), v) !=
                              resp.ordered_levels.end();
        if (!declared && !std::binary_search(observed.begin(), observed.end(), v))
            throw DataError("UnknownResponseValue", "response value '" + v + "' not found in data");
    }

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        const auto r = d.response_of(i);
        if (!r) {
            if (!spec.drop_missing_response)
                keep.push_back(i);
            continue;
        }
        if (spec.drop_values.count(*r))
            continue;
        if (spec.keep_response_values.count(*r))
            keep.push_back(i);
    }
    if (keep.empty())
        throw DataError("EmptyCohort", "no rows survive the cohort filter");

    std::string note = "cohort: keep {";
    bool first = true;
    for (const auto& v : spec.keep_response_values) {
        note += (first ? "" : ", ") + v;
        first = false;
    }
    note += "} -> " + std::to_string(keep.size()) + " rows";
    return d.subset(keep, std::move(note));
}

// ---------------------------------------------------------------- statistics

StatsSummary descriptive_stats(std::span<const double> values)
{
    const std::size_t count = values.size();
    if (count == 0)
        throw DataError("InsufficientData", "descriptive statistics need at least one value");
    const double n = static_cast<double>(count);
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    StatsSummary s;
    s.n = count;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    s.range = s.max - s.min;

    double sum = 0.0;
    for (double v : values)
        sum += v;
    s.mean = sum / n;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - s.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    s.variance = count > 1 ? m2 / (n - 1.0) : nan;
    s.std_dev = std::sqrt(s.variance);
    s.mean_std_error = s.std_dev / std::sqrt(n);

    // Biased central moments feed the adjusted G1 / G2 estimators.
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.skewness = s.skewness_std_error = s.kurtosis = s.kurtosis_std_error = nan;
    if (count >= 3) {
        s.skewness = m2 > 0.0 ? std::sqrt(n * (n - 1.0)) / (n - 2.0) * m3 / std::pow(m2, 1.5) : 0.0;
        s.skewness_std_error = std::sqrt(6.0 * n * (n - 1.0) / ((n - 2.0) * (n + 1.0) * (n + 3.0)));
    }
    if (count >= 4) {
        const double g2 = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
        s.kurtosis = ((n + 1.0) * g2 + 6.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0));
        if (m2 == 0.0)
            s.kurtosis = 0.0;
        s.kurtosis_std_error =
            2.0 * s.skewness_std_error * std::sqrt((n * n - 1.0) / ((n - 3.0) * (n + 5.0)));
    }
    return s;
}

StatsSummary descriptive_stats(const Dataset& d, const std::string& column)
{
    const auto c = d.schema.index_of(column);
    if (d.schema[c].kind != ColumnKind::continuous)
        throw DataError("WrongKind", "column '" + column + "' is not continuous");
    std::vector<double> values;
    values.reserve(d.rows.size());
    for (const auto& r : d.rows)
        if (const auto* x = std::get_if<double>(&r[c]))
            values.push_back(*x);
    if (values.empty())
        throw DataError("InsufficientData", "column '" + column + "' has no non-missing values");
    return descriptive_stats(std::span<const double>(values));
}

std::vector<std::string> category_levels(const Dataset& d, std::size_t column)
{
    const auto& cs = d.schema[column];
    if (cs.kind == ColumnKind::ordinal)
        return cs.ordered_levels;
    std::set<std::string> seen;
    for (const auto& r : d.rows)
        if (const auto* s = std::get_if<std::string>(&r[column]))
            seen.insert(*s);
    return {seen.begin(), seen.end()};
}

ContingencyTable crosstab(const Dataset& d, const std::string& row_col, const std::string& col_col)
{
    const auto rc = d.schema.index_of(row_col);
    const auto cc = d.schema.index_of(col_col);
    for (auto c : {rc, cc})
        if (!d.schema[c].categorical())
            throw DataError("WrongKind", "crosstab needs categorical columns; '" + d.schema[c].name +
                                             "' is continuous");

    auto labels_for = [&d](std::size_t c) {
        auto levels = category_levels(d, c);
        const bool any_missing = std::any_of(d.rows.begin(), d.rows.end(),
                                             [c](const PatientRecord& r) { return is_missing(r[c]); });
        if (any_missing)
            levels.emplace_back(kMissingLabel);
        return levels;
    };

    ContingencyTable t;
    t.row_labels = labels_for(rc);
    t.col_labels = labels_for(cc);
    t.counts = CountMatrix::Zero(static_cast<Eigen::Index>(t.row_labels.size()),
                                 static_cast<Eigen::Index>(t.col_labels.size()));
    auto index_in = [](const std::vector<std::string>& labels, const Cell& cell) {
        const std::string key = is_missing(cell) ? std::string(kMissingLabel) : std::get<std::string>(cell);
        return static_cast<Eigen::Index>(std::find(labels.begin(), labels.end(), key) - labels.begin());
    };
    for (const auto& r : d.rows)
        ++t.counts(index_in(t.row_labels, r[rc]), index_in(t.col_labels, r[cc]));
    return t;
}

std::pair<Dataset, Dataset> split(const Dataset& d, double train_fraction, std::uint64_t seed)
{
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw DataError("InvalidFraction", "train_fraction must lie in (0, 1)");

    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        const auto r = d.response_of(i);
        if (!r)
            throw DataError("MissingResponse", "row " + std::to_string(i + 1) + " has no response value");
        by_class[*r].push_back(i);
    }

    detail::Engine eng(seed);
    std::vector<std::size_t> train, test;
    for (auto& [label, idx] : by_class) {
        const auto n = idx.size();
        if (n < 2)
            throw DataError("ClassTooSmall", "class '" + label + "' has fewer than 2 rows");
        // The epsilon keeps products such as 0.7 * 190 from landing on 132.999...
        auto k = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 1e-9));
        k = std::clamp<std::size_t>(k, 1, n - 1);
        detail::shuffle(idx, eng);
        train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
        test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());

    std::ostringstream note;
    note << "split train_fraction=" << train_fraction << " seed=" << seed;
    return {d.subset(train, note.str() + " (train)"), d.subset(test, note.str() + " (test)")};
}

} // namespace pacdisp
