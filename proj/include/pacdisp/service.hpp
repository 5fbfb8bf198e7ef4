#pragma once

#include <memory>
#include <set>
#include <string>

#include "pacdisp/artifact.hpp"
#include "pacdisp/flowsim.hpp"

namespace pacdisp {

// Dispositions for which early prior authorization is recommended.
inline const std::set<std::string> kPacDispositions = {"Rehab Facility", "Skilled Nursing Facility"};

// Client-side request problem; `status` is the HTTP status to report.
class RequestError : public Error {
public:
    RequestError(int status, std::string code, const std::string& what)
        : Error(std::move(code), what), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

// Builds a schema-aligned record from {column: value}. Absent columns and
// nulls are missing. Throws RequestError 422 for unknown names, the response
// column, or values that cannot be parsed for the column kind.
PatientRecord record_from_features(const Schema& schema, const nlohmann::json& features);

// PredictionResponse document shared by the HTTP service and the CLI.
nlohmann::json prediction_json(const ModelArtifact& artifact, const nlohmann::json& features);
nlohmann::json model_metadata_json(const ModelArtifact& artifact);
nlohmann::json simulate_json(const nlohmann::json& request, const CostModel& costs = CostModel());

struct HttpResult {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

// Stateless request router over an immutable artifact.
class ServiceHandlers {
public:
    explicit ServiceHandlers(ModelArtifact artifact, CostModel costs = CostModel());

    HttpResult handle(const std::string& method, const std::string& path, const std::string& body) const;
    const ModelArtifact& artifact() const { return artifact_; }

private:
    ModelArtifact artifact_;
    CostModel costs_;
};

HttpResult error_result(int status, const std::string& error, const std::string& detail);

// HTTP/1.1 server wrapping ServiceHandlers.
class Service {
public:
    explicit Service(ModelArtifact artifact, CostModel costs = CostModel());
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Binds to host:port (port 0 picks a free port); returns the bound port.
    int bind(const std::string& host, int port);
    // Blocks until stop() is called.
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Loads the artifact and serves until the process is stopped.
void serve(const std::string& model_path, const std::string& host, int port);

} // namespace pacdisp
