// Writes the synthetic cohort CSV and its schema.
//   make_demo_data <out.csv> <schema.json> [seed]

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "pacdisp/cli.hpp"
#include "pacdisp/demo_data.hpp"

int main(int argc, char** argv)
{
    if (argc < 3 || argc > 4) {
        std::cerr << "usage: make_demo_data <out.csv> <schema.json> [seed]\n";
        return 2;
    }
    const std::uint64_t seed = argc == 4 ? std::strtoull(argv[3], nullptr, 10) : pacdisp::kDefaultSeed;
    const auto d = pacdisp::make_demo_dataset(seed);

    std::ofstream csv(argv[1], std::ios::binary);
    std::ofstream schema(argv[2], std::ios::binary);
    if (!csv || !schema) {
        std::cerr << "cannot open output files\n";
        return 1;
    }
    pacdisp::write_csv(d, csv);
    schema << d.schema.to_json().dump(2) << "\n";
    std::cout << "wrote " << d.size() << " rows to " << argv[1] << "\n";
    return 0;
}
