#pragma once

#include <cstdint>

#include "pacdisp/dataset.hpp"

namespace pacdisp {

// Schema of the synthetic admission cohort: Gender, Age, BradenScore,
// HesterDavisScore, a few nursing-assessment flags, and DischargeDisposition.
Schema demo_schema();

// Synthetic stand-in for the hospital export. Disposition and gender counts
// follow the published cohort table (1515 patients, 16 dispositions) and the
// per-disposition means of Age, Braden and Hester-Davis follow the published
// averages. The flags carry a moderate AR-vs-SNF signal. Deterministic in seed.
Dataset make_demo_dataset(std::uint64_t seed);

} // namespace pacdisp
