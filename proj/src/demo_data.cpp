#include "pacdisp/demo_data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "pacdisp/detail/rng.hpp"

namespace pacdisp {

namespace {

struct Profile {
    const char* disposition;
    int male, female, missing_gender;
    // Published per-disposition averages; NaN where none were reported.
    double braden, hester_davis, age;
};

constexpr double kNa = std::numeric_limits<double>::quiet_NaN();

constexpr std::array<Profile, 16> kProfiles{{
    {"Another Health Care Institution Not Defined", 2, 0, 0, 20, 7, 64},
    {"Federal Hospital", 4, 0, 0, 13, 12, 68},
    {"Psychiatric Hospital", 5, 0, 0, 15, 9, 49},
    {"Rehab Facility", 24, 14, 0, 17, 11, 66},
    {"Short-term General Hospital for Inpatient Care", 4, 2, 0, 17, 9, 59},
    {"Skilled Nursing Facility", 76, 114, 0, 16, 12, 76},
    {"Swing Bed", 1, 1, 0, 15, 15, 92},
    {"Intermediate Care Facility", 12, 17, 0, 15, 14, 73},
    {"Home Health Care Service", 75, 45, 0, 18, 9, 65},
    {"Long-term Care", 0, 3, 0, 15, 12, 79},
    {"Expired", 13, 8, 0, kNa, kNa, kNa},
    {"Home or Self Care", 499, 552, 0, 20, 7, 57},
    {"Hospice", 7, 5, 1, 18, 14, 72},
    {"Hospice Medical Facility", 11, 6, 0, 16, 13, 79},
    {"Left Against Medical Advice", 10, 3, 0, 19, 7, 51},
    {"Court/Law Enforcement", 1, 0, 0, 15, 26, 40},
}};

enum class Group { rehab, nursing, other };

Group group_of(const std::string& disposition)
{
    if (disposition == "Rehab Facility")
        return Group::rehab;
    if (disposition == "Skilled Nursing Facility")
        return Group::nursing;
    return Group::other;
}

bool bernoulli(detail::Engine& eng, double p)
{
    return detail::uniform_real(eng) < p;
}

template <std::size_t N>
std::size_t categorical(detail::Engine& eng, const std::array<double, N>& weights)
{
    double u = detail::uniform_real(eng);
    for (std::size_t k = 0; k + 1 < N; ++k) {
        if (u < weights[k])
            return k;
        u -= weights[k];
    }
    return N - 1;
}

double clipped_normal(detail::Engine& eng, double mean, double sd, double lo, double hi)
{
    return std::clamp(std::round(mean + sd * detail::standard_normal(eng)), lo, hi);
}

} // namespace

Schema demo_schema()
{
    const std::vector<std::string> na{"", "N/A", "NA"};
    std::vector<ColumnSchema> cols{
        {"PatientId", ColumnKind::nominal, {}, na, false},
        {"Gender", ColumnKind::nominal, {}, na, true},
        {"Age", ColumnKind::continuous, {}, na, true},
        {"BradenScore", ColumnKind::continuous, {}, na, true},
        {"HesterDavisScore", ColumnKind::continuous, {}, na, true},
        {"Stroke", ColumnKind::nominal, {}, na, true},
        {"HipFracture", ColumnKind::nominal, {}, na, true},
        {"TherapyTolerance", ColumnKind::nominal, {}, na, true},
        {"Insurance", ColumnKind::nominal, {}, {"", "N/A", "NA", "Unknown"}, true},
        {"Mobility", ColumnKind::ordinal, {"Independent", "Assisted", "Dependent"}, na, true},
        {"DischargeDisposition", ColumnKind::response, {}, na, true},
    };
    return Schema(std::move(cols));
}

Dataset make_demo_dataset(std::uint64_t seed)
{
    detail::Engine eng(seed);
    Dataset d;
    d.schema = demo_schema();
    d.provenance.source = "synthetic:seed=" + std::to_string(seed);

    static constexpr std::array<const char*, 4> insurers{"Medicare", "Medicaid", "Commercial", "SelfPay"};
    static constexpr std::array<const char*, 3> mobility{"Independent", "Assisted", "Dependent"};
    auto yn = [](bool b) { return Cell(std::string(b ? "Y" : "N")); };

    for (const auto& p : kProfiles) {
        const auto g = group_of(p.disposition);
        const int n = p.male + p.female + p.missing_gender;
        for (int i = 0; i < n; ++i) {
            PatientRecord r(d.schema.size(), Missing{});
            if (i < p.male)
                r[1] = std::string("Male");
            else if (i < p.male + p.female)
                r[1] = std::string("Female");

            if (!std::isnan(p.age)) {
                r[2] = clipped_normal(eng, p.age, 14.0, 16, 97);
                if (!bernoulli(eng, 0.02))
                    r[3] = clipped_normal(eng, p.braden, 3.5, 6, 23);
                if (!bernoulli(eng, 0.02))
                    r[4] = clipped_normal(eng, p.hester_davis, 3.5, 3, 26);
            } else {
                r[2] = clipped_normal(eng, 75.0, 14.0, 16, 97);
            }

            const double stroke = g == Group::rehab ? 0.40 : g == Group::nursing ? 0.12 : 0.08;
            const double hip = g == Group::rehab ? 0.15 : g == Group::nursing ? 0.22 : 0.03;
            const double tolerate = g == Group::rehab ? 0.75 : g == Group::nursing ? 0.25 : 0.50;
            r[5] = yn(bernoulli(eng, stroke));
            r[6] = yn(bernoulli(eng, hip));
            r[7] = yn(bernoulli(eng, tolerate));

            const std::array<double, 4> ins = g == Group::rehab     ? std::array<double, 4>{0.40, 0.10, 0.45, 0.05}
                                              : g == Group::nursing ? std::array<double, 4>{0.70, 0.20, 0.08, 0.02}
                                                                    : std::array<double, 4>{0.45, 0.20, 0.30, 0.05};
            const auto ins_k = categorical(eng, ins);
            if (!bernoulli(eng, 0.03))
                r[8] = std::string(insurers[ins_k]);

            const std::array<double, 3> mob = g == Group::rehab     ? std::array<double, 3>{0.25, 0.60, 0.15}
                                              : g == Group::nursing ? std::array<double, 3>{0.10, 0.45, 0.45}
                                                                    : std::array<double, 3>{0.60, 0.30, 0.10};
            r[9] = std::string(mobility[categorical(eng, mob)]);
            r[10] = std::string(p.disposition);
            d.rows.push_back(std::move(r));
        }
    }

    detail::shuffle(d.rows, eng);
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        char id[16];
        std::snprintf(id, sizeof id, "P%04zu", i + 1);
        d.rows[i][0] = std::string(id);
    }
    d.provenance.history.push_back("generated " + std::to_string(d.rows.size()) + " rows");
    return d;
}

} // namespace pacdisp
