#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace pacdisp {

// Default seed for every split and randomized fit; fresh clones reproduce
// the committed reports with it.
inline constexpr std::uint64_t kDefaultSeed = 1600;

inline constexpr const char* kDefaultPositive = "Rehab Facility";
inline constexpr const char* kDefaultNegative = "Skilled Nursing Facility";
inline constexpr double kDefaultTrainFraction = 0.7;

// Runs one subcommand. Returns 0 on success, 2 on usage errors (help goes to
// `err`), 1 on data or model errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

// "2 days (22.22%), $4,692"
std::string format_simulation(double days_saved, double percent, double dollars);
// Thousands separators; cents only when the amount is fractional.
std::string format_dollars(double amount);

} // namespace pacdisp
