#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pacdisp/errors.hpp"
#include "pacdisp/numerics.hpp"

namespace pacdisp {

enum class ColumnKind { nominal, ordinal, continuous, response };

std::string to_string(ColumnKind kind);
ColumnKind column_kind_from_string(const std::string& s);

struct ColumnSchema {
    std::string name;
    ColumnKind kind = ColumnKind::nominal;
    std::vector<std::string> ordered_levels; // ordinal only
    std::vector<std::string> missing_tokens;
    // Excluded columns are loaded and validated but never offered to a model.
    bool predictor = true;

    bool categorical() const { return kind != ColumnKind::continuous; }
};

struct Missing {
    bool operator==(const Missing&) const = default;
};

// One value slot: explicit missing, a finite number (continuous columns) or
// a label (nominal, ordinal and response columns).
using Cell = std::variant<Missing, double, std::string>;
using PatientRecord = std::vector<Cell>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<Missing>(c); }

inline constexpr const char* kMissingLabel = "<missing>";

// Ordered column list with exactly one response column.
class Schema {
public:
    Schema() = default;
    explicit Schema(std::vector<ColumnSchema> columns);

    const std::vector<ColumnSchema>& columns() const { return columns_; }
    std::size_t size() const { return columns_.size(); }
    const ColumnSchema& operator[](std::size_t i) const { return columns_[i]; }

    std::size_t response_index() const { return response_; }
    const ColumnSchema& response() const { return columns_[response_]; }
    std::optional<std::size_t> find(const std::string& name) const;
    std::size_t index_of(const std::string& name) const; // throws UnknownColumn
    std::vector<std::size_t> predictor_indices() const;

    // Stable 64-bit FNV-1a digest of names, kinds and levels (hex string).
    std::string fingerprint() const;

    nlohmann::json to_json() const;
    static Schema from_json(const nlohmann::json& j);

private:
    std::vector<ColumnSchema> columns_;
    std::size_t response_ = 0;
};

Schema load_schema(const std::filesystem::path& path);

struct Provenance {
    std::string source;
    std::vector<std::string> history;
};

struct Dataset {
    Schema schema;
    std::vector<PatientRecord> rows;
    Provenance provenance;

    std::size_t size() const { return rows.size(); }
    // Response label of a row, or nullopt when missing.
    std::optional<std::string> response_of(std::size_t row) const;
    // Sorted distinct response labels (missing excluded).
    std::vector<std::string> response_labels() const;
    Dataset subset(const std::vector<std::size_t>& row_indices, std::string note) const;
};

// Parses a cell per the column kind: declared missing tokens and empty
// strings become Missing; unparseable or non-finite continuous values become
// Missing; ordinal labels outside ordered_levels throw DataError "UnknownLevel".
Cell parse_cell(const ColumnSchema& column, const std::string& raw);

Dataset load_dataset(const std::filesystem::path& path, const Schema& schema);
Dataset parse_dataset(std::istream& in, const Schema& schema, std::string source);

// Writes a header row and one row per record; missing cells are empty.
void write_csv(const Dataset& d, std::ostream& out);

struct CohortSpec {
    std::set<std::string> keep_response_values;
    bool drop_missing_response = true;
    std::set<std::string> drop_values;
};

Dataset filter_cohort(const Dataset& d, const CohortSpec& spec);

struct StatsSummary {
    std::size_t n = 0;
    double min = 0, max = 0, range = 0;
    double mean = 0, mean_std_error = 0;
    double std_dev = 0, variance = 0;
    // NaN when n is too small for the moment (skewness n < 3, kurtosis n < 4).
    double skewness = 0, skewness_std_error = 0;
    double kurtosis = 0, kurtosis_std_error = 0;
};

StatsSummary descriptive_stats(const Dataset& d, const std::string& column);
// Same estimators over raw values (no missing).
StatsSummary descriptive_stats(std::span<const double> values);

ContingencyTable crosstab(const Dataset& d, const std::string& row_col, const std::string& col_col);

// Stratified, seeded split. Per class, floor(train_fraction * n_c) rows
// (clamped to [1, n_c - 1]) go to the training set.
std::pair<Dataset, Dataset> split(const Dataset& d, double train_fraction, std::uint64_t seed);

// Category labels of a categorical column in canonical order: declared
// levels for ordinal columns, sorted observed labels otherwise.
std::vector<std::string> category_levels(const Dataset& d, std::size_t column);

} // namespace pacdisp
