#include "pacdisp/artifact.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace pacdisp {

namespace {

using json = nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const json& j)
{
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json matrix_to_json(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        rows.push_back(vector_to_json(m.row(i).transpose()));
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index cols)
{
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto row = vector_from_json(j[i]);
        if (row.size() != cols)
            throw ModelError("CorruptArtifact", "matrix row has the wrong length");
        m.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return m;
}

json encoder_to_json(const std::shared_ptr<const Encoder>& e)
{
    return e ? e->to_json() : json(nullptr);
}

std::shared_ptr<const Encoder> encoder_from_json(const json& j)
{
    if (j.is_null())
        return nullptr;
    return std::make_shared<const Encoder>(Encoder::from_json(j));
}

json model_to_json(const TrainedModel& m)
{
    return std::visit(
        [](const auto& model) -> json {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, ChaidTree>) {
                return to_json(model);
            } else if constexpr (std::is_same_v<T, LdaModel>) {
                return {{"means", matrix_to_json(model.means)},
                        {"covariance", matrix_to_json(model.covariance)},
                        {"log_priors", vector_to_json(model.log_priors)},
                        {"shrinkage", model.shrinkage},
                        {"coef", vector_to_json(model.coef)},
                        {"intercept", model.intercept},
                        {"encoder", encoder_to_json(model.encoder)}};
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                json nodes = json::array();
                for (const auto& n : model.nodes)
                    nodes.push_back({{"negatives", n.negatives},
                                     {"positives", n.positives},
                                     {"column", n.column},
                                     {"categorical", n.categorical},
                                     {"threshold", n.threshold},
                                     {"category", n.category},
                                     {"left", n.left},
                                     {"right", n.right}});
                return {{"nodes", std::move(nodes)},
                        {"positive", model.positive},
                        {"negative", model.negative},
                        {"params", model.params.to_json()},
                        {"schema_fingerprint", model.schema_fingerprint},
                        {"record_width", model.record_width}};
            } else {
                return {{"weights", vector_to_json(model.weights)},
                        {"bias", model.bias},
                        {"params", {{"lambda", model.params.lambda}, {"epochs", model.params.epochs}, {"seed", model.params.seed}}},
                        {"encoder", encoder_to_json(model.encoder)}};
            }
        },
        m.model);
}

void model_from_json(TrainedModel& m, const json& j)
{
    switch (m.algorithm) {
    case Algorithm::chaid:
        m.model = chaid_from_json(j);
        break;
    case Algorithm::lda: {
        LdaModel lda;
        lda.coef = vector_from_json(j.at("coef"));
        const auto p = lda.coef.size();
        lda.means = matrix_from_json(j.at("means"), p);
        lda.covariance = matrix_from_json(j.at("covariance"), p);
        lda.log_priors = vector_from_json(j.at("log_priors"));
        lda.shrinkage = j.at("shrinkage").get<double>();
        lda.intercept = j.at("intercept").get<double>();
        lda.encoder = encoder_from_json(j.at("encoder"));
        m.model = std::move(lda);
        break;
    }
    case Algorithm::cart:
    case Algorithm::rtree: {
        TreeModel t;
        for (const auto& jn : j.at("nodes")) {
            TreeNode n;
            n.negatives = jn.at("negatives").get<std::int64_t>();
            n.positives = jn.at("positives").get<std::int64_t>();
            n.column = jn.at("column").get<int>();
            n.categorical = jn.at("categorical").get<bool>();
            n.threshold = jn.at("threshold").get<double>();
            n.category = jn.at("category").get<std::string>();
            n.left = jn.at("left").get<int>();
            n.right = jn.at("right").get<int>();
            t.nodes.push_back(std::move(n));
        }
        const auto count = static_cast<int>(t.nodes.size());
        for (const auto& n : t.nodes)
            if (!n.is_leaf() && (n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count))
                throw ModelError("CorruptArtifact", "tree node points outside the node list");
        if (t.nodes.empty())
            throw ModelError("CorruptArtifact", "tree has no nodes");
        t.positive = j.at("positive").get<std::string>();
        t.negative = j.at("negative").get<std::string>();
        t.params = TreeParams::from_json(j.at("params"));
        t.schema_fingerprint = j.at("schema_fingerprint").get<std::string>();
        t.record_width = j.at("record_width").get<std::size_t>();
        m.model = std::move(t);
        break;
    }
    case Algorithm::lsvm: {
        SvmModel s;
        s.weights = vector_from_json(j.at("weights"));
        s.bias = j.at("bias").get<double>();
        const auto& p = j.at("params");
        s.params.lambda = p.at("lambda").get<double>();
        s.params.epochs = p.at("epochs").get<int>();
        s.params.seed = p.at("seed").get<std::uint64_t>();
        s.encoder = encoder_from_json(j.at("encoder"));
        m.model = std::move(s);
        break;
    }
    }
}

json body_of(const ModelArtifact& a)
{
    const auto& m = a.model;
    return {{"format_version", a.format_version},
            {"kind", to_string(m.algorithm)},
            {"positive", m.positive},
            {"negative", m.negative},
            {"schema", a.schema.to_json()},
            {"schema_fingerprint", m.schema_fingerprint},
            {"record_width", m.record_width},
            {"params", m.params},
            {"model", model_to_json(m)},
            {"metadata", a.metadata}};
}

} // namespace

std::string checksum_hex(const std::string& bytes)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::string serialize_artifact(const ModelArtifact& artifact)
{
    json doc = body_of(artifact);
    doc["checksum"] = checksum_hex(doc.dump());
    return doc.dump(2) + "\n";
}

ModelArtifact parse_artifact(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelError("CorruptArtifact", std::string("artifact is not valid JSON: ") + e.what());
    }
    try {
        if (!doc.is_object())
            throw ModelError("CorruptArtifact", "artifact is not a JSON object");
        const int version = doc.at("format_version").get<int>();
        if (version > kArtifactFormatVersion || version < 1)
            throw ModelError("UnsupportedVersion", "artifact format_version " + std::to_string(version) +
                                                       " is not supported (max " +
                                                       std::to_string(kArtifactFormatVersion) + ")");
        const auto stored = doc.at("checksum").get<std::string>();
        json body = doc;
        body.erase("checksum");
        if (checksum_hex(body.dump()) != stored)
            throw ModelError("CorruptArtifact", "artifact checksum mismatch");

        ModelArtifact a;
        a.format_version = version;
        a.schema = Schema::from_json(doc.at("schema"));
        a.metadata = doc.at("metadata");
        auto& m = a.model;
        m.algorithm = algorithm_from_string(doc.at("kind").get<std::string>());
        m.positive = doc.at("positive").get<std::string>();
        m.negative = doc.at("negative").get<std::string>();
        m.schema_fingerprint = doc.at("schema_fingerprint").get<std::string>();
        m.record_width = doc.at("record_width").get<std::size_t>();
        m.params = doc.at("params");
        if (m.schema_fingerprint != a.schema.fingerprint())
            throw ModelError("CorruptArtifact", "artifact schema does not match its fingerprint");
        model_from_json(m, doc.at("model"));
        return a;
    } catch (const json::exception& e) {
        throw ModelError("CorruptArtifact", std::string("artifact is missing or mistypes a field: ") + e.what());
    } catch (const DataError& e) {
        throw ModelError("CorruptArtifact", std::string("artifact schema is invalid: ") + e.what());
    }
}

void save_model(const ModelArtifact& artifact, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ModelError("WriteFailed", "cannot write model file " + path.string());
    out << serialize_artifact(artifact);
    if (!out)
        throw ModelError("WriteFailed", "error while writing " + path.string());
}

ModelArtifact load_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ModelError("FileNotFound", "cannot open model file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_artifact(buf.str());
}

} // namespace pacdisp
