#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pacdisp/artifact.hpp"
#include "support/synthetic.hpp"

using namespace pacdisp;
namespace fs = std::filesystem;

namespace {

ModelArtifact artifact_for(Algorithm a, const Dataset& d)
{
    ModelArtifact art;
    art.model = fit_model(a, d, {"pos", 11, {}});
    art.schema = d.schema;
    art.metadata = {{"seed", 11}, {"data_source", "synthetic"}};
    return art;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "pacdisp-artifact-test";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("save/load reproduces predictions and bytes for every model kind")
{
    const auto d = synth::mixed(220, 4);
    const auto probe = synth::mixed(100, 40);
    for (auto a : kAllAlgorithms) {
        CAPTURE(to_string(a));
        const auto art = artifact_for(a, d);
        const auto path = scratch("model-" + to_string(a) + ".json");
        save_model(art, path);
        const auto loaded = load_model(path);
        CHECK(loaded.model.algorithm == a);
        CHECK(loaded.schema.fingerprint() == d.schema.fingerprint());
        CHECK(loaded.metadata == art.metadata);
        for (std::size_t i = 0; i < probe.size(); ++i) {
            CHECK(predict(loaded.model, probe.rows[i]) == predict(art.model, probe.rows[i]));
            CHECK(score(loaded.model, probe.rows[i]) == score(art.model, probe.rows[i]));
        }
        const auto again = scratch("again-" + to_string(a) + ".json");
        save_model(loaded, again);
        CHECK(slurp(path) == slurp(again));
    }
}

TEST_CASE("damaged artifacts are rejected")
{
    const auto text = serialize_artifact(artifact_for(Algorithm::chaid, synth::mixed(150, 9)));

    CHECK_THROWS_WITH_AS(parse_artifact(text.substr(0, text.size() / 2)), doctest::Contains("not valid JSON"),
                         ModelError);

    auto doc = nlohmann::json::parse(text);
    doc["format_version"] = 99;
    try {
        parse_artifact(doc.dump());
        FAIL("expected UnsupportedVersion");
    } catch (const ModelError& e) {
        CHECK(e.code() == "UnsupportedVersion");
    }

    doc = nlohmann::json::parse(text);
    doc["metadata"]["seed"] = 12;
    try {
        parse_artifact(doc.dump(2));
        FAIL("expected CorruptArtifact");
    } catch (const ModelError& e) {
        CHECK(e.code() == "CorruptArtifact");
    }

    try {
        parse_artifact("[1,2,3]");
        FAIL("expected CorruptArtifact");
    } catch (const ModelError& e) {
        CHECK(e.code() == "CorruptArtifact");
    }

    CHECK_THROWS_AS(load_model(scratch("does-not-exist.json")), Error);
}

TEST_CASE("checksum is stable FNV-1a")
{
    CHECK(checksum_hex("") == "fnv1a64:cbf29ce484222325");
    CHECK(checksum_hex("a") == "fnv1a64:af63dc4c8601ec8c");
}
