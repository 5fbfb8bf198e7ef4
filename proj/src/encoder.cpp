#include "pacdisp/encoder.hpp"

#include <algorithm>
#include <cmath>

namespace pacdisp {

Encoder Encoder::fit(const Dataset& train, const std::string& positive)
{
    const auto labels = train.response_labels();
    if (labels.size() != 2 || !std::binary_search(labels.begin(), labels.end(), positive))
        throw DataError("NonBinaryResponse",
                        "encoding needs exactly two response labels including '" + positive + "'");

    Encoder e;
    e.positive_ = positive;
    e.negative_ = labels[0] == positive ? labels[1] : labels[0];
    e.fingerprint_ = train.schema.fingerprint();
    e.record_width_ = train.schema.size();

    for (auto c : train.schema.predictor_indices()) {
        const auto& cs = train.schema[c];
        Column col;
        col.source = c;
        col.name = cs.name;
        col.kind = cs.kind;
        if (cs.kind == ColumnKind::continuous) {
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto& r : train.rows) {
                if (const auto* x = std::get_if<double>(&r[c])) {
                    sum += *x;
                    ++n;
                } else {
                    col.missing_indicator = true;
                }
            }
            col.mean = n ? sum / static_cast<double>(n) : 0.0;
            double ss = 0.0;
            for (const auto& r : train.rows)
                if (const auto* x = std::get_if<double>(&r[c]))
                    ss += (*x - col.mean) * (*x - col.mean);
            const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
            col.scale = sd > 0.0 ? sd : 1.0;
        } else {
            col.levels = category_levels(train, c);
            col.missing_indicator = true;
        }
        e.columns_.push_back(std::move(col));
    }
    e.build_names();
    return e;
}

void Encoder::build_names()
{
    names_.clear();
    for (const auto& col : columns_) {
        if (col.kind == ColumnKind::continuous) {
            names_.push_back(col.name);
        } else {
            for (const auto& l : col.levels)
                names_.push_back(col.name + "=" + l);
        }
        if (col.missing_indicator)
            names_.push_back(col.name + "=" + kMissingLabel);
    }
}

Eigen::VectorXd Encoder::encode(const PatientRecord& record) const
{
    if (record.size() != record_width_)
        throw ModelError("SchemaMismatch", "record has " + std::to_string(record.size()) +
                                               " fields, encoder expects " + std::to_string(record_width_));
    Eigen::VectorXd v = Eigen::VectorXd::Zero(width());
    Eigen::Index k = 0;
    for (const auto& col : columns_) {
        const Cell& cell = record[col.source];
        if (col.kind == ColumnKind::continuous) {
            const auto* x = std::get_if<double>(&cell);
            if (x)
                v(k) = (*x - col.mean) / col.scale;
            ++k;
            if (col.missing_indicator) {
                if (!x)
                    v(k) = 1.0;
                ++k;
            }
            continue;
        }
        const auto* s = std::get_if<std::string>(&cell);
        const auto it = s ? std::find(col.levels.begin(), col.levels.end(), *s) : col.levels.end();
        if (it != col.levels.end())
            v(k + (it - col.levels.begin())) = 1.0;
        else
            v(k + static_cast<Eigen::Index>(col.levels.size())) = 1.0;
        k += static_cast<Eigen::Index>(col.levels.size()) + 1;
    }
    return v;
}

FeatureMatrix Encoder::transform(const Dataset& d) const
{
    if (d.schema.fingerprint() != fingerprint_)
        throw ModelError("SchemaMismatch", "dataset schema differs from the encoder's schema");
    FeatureMatrix fm;
    fm.feature_names = names_;
    fm.x.resize(static_cast<Eigen::Index>(d.rows.size()), width());
    fm.y.resize(static_cast<Eigen::Index>(d.rows.size()));
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        fm.x.row(row) = encode(d.rows[i]).transpose();
        const auto label = d.response_of(i);
        fm.y(row) = label ? encode_label(*label) : -1.0;
    }
    fm.encoder = std::make_shared<const Encoder>(*this);
    return fm;
}

nlohmann::json Encoder::to_json() const
{
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : columns_) {
        cols.push_back({{"source", c.source},
                        {"name", c.name},
                        {"kind", to_string(c.kind)},
                        {"mean", c.mean},
                        {"scale", c.scale},
                        {"missing_indicator", c.missing_indicator},
                        {"levels", c.levels}});
    }
    return {{"columns", std::move(cols)},
            {"positive", positive_},
            {"negative", negative_},
            {"schema_fingerprint", fingerprint_},
            {"record_width", record_width_}};
}

Encoder Encoder::from_json(const nlohmann::json& j)
{
    Encoder e;
    for (const auto& jc : j.at("columns")) {
        Column c;
        c.source = jc.at("source").get<std::size_t>();
        c.name = jc.at("name").get<std::string>();
        c.kind = column_kind_from_string(jc.at("kind").get<std::string>());
        c.mean = jc.at("mean").get<double>();
        c.scale = jc.at("scale").get<double>();
        c.missing_indicator = jc.at("missing_indicator").get<bool>();
        c.levels = jc.at("levels").get<std::vector<std::string>>();
        e.columns_.push_back(std::move(c));
    }
    e.positive_ = j.at("positive").get<std::string>();
    e.negative_ = j.at("negative").get<std::string>();
    e.fingerprint_ = j.at("schema_fingerprint").get<std::string>();
    e.record_width_ = j.at("record_width").get<std::size_t>();
    e.build_names();
    return e;
}

FeatureMatrix encode(const Dataset& d, const std::string& target_positive)
{
    return Encoder::fit(d, target_positive).transform(d);
}

} // namespace pacdisp
