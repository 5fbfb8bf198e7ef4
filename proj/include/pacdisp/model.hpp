#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pacdisp/baselines.hpp"
#include "pacdisp/chaid.hpp"

namespace pacdisp {

enum class Algorithm { chaid, lda, cart, rtree, lsvm };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::chaid, Algorithm::lda, Algorithm::cart,
                                                Algorithm::rtree, Algorithm::lsvm};

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);
// Display name used in reports ("CHAID", "LDA", "CART", "RT", "LSVM").
std::string display_name(Algorithm a);

// Names accepted as hyperparameter overrides for an algorithm.
std::vector<std::string> parameter_names(Algorithm a);

// Hyperparameter overrides keyed by name (e.g. {"max_depth": 4}); unknown
// keys for the chosen algorithm raise ModelError "InvalidParams".
struct FitOptions {
    std::string positive;
    std::uint64_t seed = 0;
    nlohmann::json overrides = nlohmann::json::object();
};

// Any of the five fitted classifiers.
struct TrainedModel {
    Algorithm algorithm = Algorithm::chaid;
    std::variant<ChaidTree, LdaModel, TreeModel, SvmModel> model;
    std::string positive;
    std::string negative;
    std::string schema_fingerprint;
    std::size_t record_width = 0;
    nlohmann::json params = nlohmann::json::object();
};

TrainedModel fit_model(Algorithm algorithm, const Dataset& train, const FitOptions& options);

// Ranking score for the positive class: CHAID and trees give the leaf
// positive-class share, LDA the discriminant difference, SVM the raw margin.
double score(const TrainedModel& m, const PatientRecord& record);

// Threshold at which predict() switches to the positive class (strictly above).
double decision_threshold(const TrainedModel& m);

// CHAID uses its own argmax/tie rule; the other models threshold score()
// with ties going to the negative class.
std::string predict(const TrainedModel& m, const PatientRecord& record);

// Class labels with a probability each when the model produces them
// (CHAID, trees); nullopt for margin models.
std::optional<std::vector<std::pair<std::string, double>>> class_probabilities(const TrainedModel& m,
                                                                              const PatientRecord& record);

} // namespace pacdisp
