#include "pacdisp/service.hpp"

#include <httplib.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <iostream>

namespace pacdisp {

using json = nlohmann::json;

namespace {

std::string trim_copy(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

Cell continuous_value(const ColumnSchema& col, const json& v)
{
    if (v.is_number()) {
        const double x = v.get<double>();
        if (!std::isfinite(x))
            throw RequestError(422, "InvalidValue", "feature '" + col.name + "' must be finite");
        return x;
    }
    if (v.is_string()) {
        const auto s = trim_copy(v.get<std::string>());
        if (s.empty() || std::find(col.missing_tokens.begin(), col.missing_tokens.end(), s) != col.missing_tokens.end())
            return Missing{};
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(x))
            return x;
    }
    throw RequestError(422, "InvalidValue", "feature '" + col.name + "' needs a numeric value");
}

Cell categorical_value(const ColumnSchema& col, const json& v)
{
    std::string raw;
    if (v.is_string())
        raw = v.get<std::string>();
    else if (v.is_number())
        raw = v.dump();
    else
        throw RequestError(422, "InvalidValue", "feature '" + col.name + "' needs a string value");
    try {
        return parse_cell(col, raw);
    } catch (const DataError& e) {
        throw RequestError(422, "InvalidValue", e.what());
    }
}

json counts_json(const std::vector<std::string>& labels, const std::vector<std::int64_t>& counts)
{
    json j = json::object();
    for (std::size_t k = 0; k < labels.size(); ++k)
        j[labels[k]] = counts[k];
    return j;
}

std::string number_text(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

json explanation_json(const ModelArtifact& a, const PatientRecord& record)
{
    const auto& m = a.model;
    if (const auto* tree = std::get_if<ChaidTree>(&m.model)) {
        const auto e = explain(*tree, record);
        json path = json::array();
        for (const auto& step : e.path)
            path.push_back({{"predictor", step.predictor},
                            {"group", step.group},
                            {"node_counts", counts_json(tree->class_labels, step.node_counts)}});
        return {{"path", std::move(path)}, {"leaf_counts", counts_json(tree->class_labels, e.leaf_counts)}};
    }
    if (const auto* tree = std::get_if<TreeModel>(&m.model)) {
        json path = json::array();
        std::size_t i = 0;
        while (!tree->nodes[i].is_leaf()) {
            const auto& n = tree->nodes[i];
            const auto& name = a.schema[static_cast<std::size_t>(n.column)].name;
            const Cell& v = record[static_cast<std::size_t>(n.column)];
            bool left;
            std::string test;
            if (n.categorical) {
                const auto* s = std::get_if<std::string>(&v);
                left = s ? *s == n.category : n.category == kMissingLabel;
                test = name + " == " + n.category;
            } else {
                const auto* x = std::get_if<double>(&v);
                left = !x || *x <= n.threshold;
                test = name + " <= " + number_text(n.threshold);
            }
            path.push_back({{"predictor", name},
                            {"test", test},
                            {"outcome", left},
                            {"node_counts", {{tree->negative, n.negatives}, {tree->positive, n.positives}}}});
            i = static_cast<std::size_t>(left ? n.left : n.right);
        }
        const auto& leaf = tree->nodes[i];
        return {{"path", std::move(path)},
                {"leaf_counts", {{tree->negative, leaf.negatives}, {tree->positive, leaf.positives}}}};
    }
    return nullptr;
}

json parse_body(const std::string& body)
{
    try {
        auto j = json::parse(body);
        if (!j.is_object())
            throw RequestError(400, "MalformedBody", "request body must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw RequestError(400, "MalformedBody", std::string("request body is not valid JSON: ") + e.what());
    }
}

} // namespace

PatientRecord record_from_features(const Schema& schema, const json& features)
{
    if (!features.is_object())
        throw RequestError(400, "MalformedBody", "'features' must be a JSON object");
    PatientRecord rec(schema.size(), Missing{});
    for (const auto& [name, value] : features.items()) {
        const auto idx = schema.find(name);
        if (!idx || (*idx == schema.response_index()))
            throw RequestError(422, "UnknownFeature", "unknown feature '" + name + "'");
        const auto& col = schema[*idx];
        if (value.is_null())
            continue;
        rec[*idx] = col.kind == ColumnKind::continuous ? continuous_value(col, value) : categorical_value(col, value);
    }
    return rec;
}

json prediction_json(const ModelArtifact& artifact, const json& features)
{
    const auto record = record_from_features(artifact.schema, features);
    const auto& m = artifact.model;
    const auto disposition = predict(m, record);

    json probs = nullptr;
    if (auto p = class_probabilities(m, record)) {
        probs = json::object();
        for (const auto& [label, value] : *p)
            probs[label] = value;
    }
    return {{"model", to_string(m.algorithm)},
            {"disposition", disposition},
            {"positive", m.positive},
            {"probabilities", std::move(probs)},
            {"score", score(m, record)},
            {"decision_threshold", decision_threshold(m)},
            {"explanation", explanation_json(artifact, record)},
            {"recommendation",
             kPacDispositions.count(disposition) ? "initiate_prior_authorization" : "none"}};
}

json model_metadata_json(const ModelArtifact& artifact)
{
    const auto& m = artifact.model;
    json labels = json::array();
    if (const auto* tree = std::get_if<ChaidTree>(&m.model))
        labels = tree->class_labels;
    else
        labels = m.negative < m.positive ? json{m.negative, m.positive} : json{m.positive, m.negative};
    return {{"kind", to_string(m.algorithm)},
            {"name", display_name(m.algorithm)},
            {"format_version", artifact.format_version},
            {"positive", m.positive},
            {"negative", m.negative},
            {"class_labels", std::move(labels)},
            {"schema", artifact.schema.to_json()},
            {"schema_fingerprint", m.schema_fingerprint},
            {"params", m.params},
            {"metadata", artifact.metadata}};
}

json simulate_json(const json& request, const CostModel& costs)
{
    double x = 0.0, a = 0.0;
    std::string ownership;
    try {
        x = request.at("pac_service_days").get<double>();
        a = request.at("authorization_days").get<double>();
        ownership = request.at("ownership").get<std::string>();
    } catch (const json::exception& e) {
        throw RequestError(400, "MalformedBody",
                           "simulate needs numeric pac_service_days, authorization_days and string ownership");
    }
    try {
        const auto red = los_reduction(x, a);
        return {{"pac_service_days", x},
                {"authorization_days", a},
                {"ownership", ownership},
                {"los_traditional", total_los({x, a, Policy::traditional})},
                {"los_predictive", total_los({x, a, Policy::predictive})},
                {"days_saved", red.days_saved},
                {"percent", round2(red.percent)},
                {"per_day_expense", costs.per_day(ownership)},
                {"dollars", cost_savings(red.days_saved, ownership, costs)}};
    } catch (const DataError& e) {
        throw RequestError(422, e.code(), e.what());
    }
}

HttpResult error_result(int status, const std::string& error, const std::string& detail)
{
    return {status, json{{"error", error}, {"detail", detail}}.dump(), "application/json"};
}

ServiceHandlers::ServiceHandlers(ModelArtifact artifact, CostModel costs)
    : artifact_(std::move(artifact)), costs_(std::move(costs))
{
}

HttpResult ServiceHandlers::handle(const std::string& method, const std::string& path, const std::string& body) const
{
    try {
        if (method == "GET" && path == "/healthz")
            return {200, "ok", "text/plain"};
        if (method == "GET" && path == "/api/v1/model")
            return {200, model_metadata_json(artifact_).dump(), "application/json"};
        if (method == "POST" && path == "/api/v1/predict") {
            const auto req = parse_body(body);
            const auto features = req.contains("features") ? req.at("features") : json::object();
            return {200, prediction_json(artifact_, features).dump(), "application/json"};
        }
        if (method == "POST" && path == "/api/v1/simulate")
            return {200, simulate_json(parse_body(body), costs_).dump(), "application/json"};
        return error_result(404, "NotFound", "no route for " + method + " " + path);
    } catch (const RequestError& e) {
        return error_result(e.status(), e.code(), e.what());
    } catch (const ModelError& e) {
        return error_result(422, e.code(), e.what());
    } catch (const DataError& e) {
        return error_result(422, e.code(), e.what());
    }
}

struct Service::Impl {
    ServiceHandlers handlers;
    httplib::Server server;

    Impl(ModelArtifact a, CostModel c) : handlers(std::move(a), std::move(c))
    {
        auto forward = [this](const httplib::Request& req, httplib::Response& res) {
            const auto r = handlers.handle(req.method, req.path, req.body);
            res.status = r.status;
            res.set_content(r.body, r.content_type);
        };
        server.Get("/healthz", forward);
        server.Get("/api/v1/model", forward);
        server.Post("/api/v1/predict", forward);
        server.Post("/api/v1/simulate", forward);
        server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
            if (!res.body.empty())
                return;
            const auto r = error_result(res.status, res.status == 404 ? "NotFound" : "HttpError",
                                        "no route for " + req.method + " " + req.path);
            res.set_content(r.body, r.content_type);
        });
    }
};

Service::Service(ModelArtifact artifact, CostModel costs)
    : impl_(std::make_unique<Impl>(std::move(artifact), std::move(costs)))
{
}

Service::~Service()
{
    stop();
}

int Service::bind(const std::string& host, int port)
{
    if (port == 0)
        return impl_->server.bind_to_any_port(host);
    if (!impl_->server.bind_to_port(host, port))
        return -1;
    return port;
}

void Service::run()
{
    impl_->server.listen_after_bind();
}

void Service::stop()
{
    if (impl_)
        impl_->server.stop();
}

void serve(const std::string& model_path, const std::string& host, int port)
{
    Service service(load_model(model_path));
    const int bound = service.bind(host, port);
    if (bound < 0)
        throw ModelError("BindFailed", "cannot listen on " + host + ":" + std::to_string(port));
    std::cerr << "serving " << model_path << " on http://" << host << ":" << bound << std::endl;
    service.run();
}

} // namespace pacdisp
