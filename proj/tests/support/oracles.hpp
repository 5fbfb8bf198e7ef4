#pragma once

// Independent reference implementations used to check the library. None of
// these share code with src/.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

inline double simpson(double a, double b, double fa, double fm, double fb)
{
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                               double fb, double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13)
{
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return adaptive_simpson(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 50);
}

// Chi-square upper tail by quadrature of the density. With t = u^2 the
// integrand 2u f(u^2) is smooth at 0 for every df >= 1.
inline double chi_square_sf(double x, int df)
{
    if (x <= 0.0)
        return 1.0;
    const double k = df;
    const double log_norm = -(k / 2.0) * std::log(2.0) - std::lgamma(k / 2.0);
    auto g = [&](double u) {
        if (u == 0.0)
            return df == 1 ? 2.0 * std::exp(log_norm) : 0.0;
        return 2.0 * std::exp(log_norm + (k - 1.0) * std::log(u) - u * u / 2.0);
    };
    // Split the range so the adaptive rule sees the density peak.
    const double root = std::sqrt(x);
    const double peak = std::sqrt(std::max(k - 1.0, 0.0));
    double cdf = 0.0;
    if (peak > 0.0 && peak < root)
        cdf = integrate(g, 0.0, peak) + integrate(g, peak, root);
    else
        cdf = integrate(g, 0.0, root);
    return 1.0 - cdf;
}

// Counts set partitions of {0..c-1} into exactly r non-empty blocks by
// enumerating restricted growth strings.
inline std::uint64_t count_set_partitions(int c, int r)
{
    std::uint64_t count = 0;
    std::vector<int> a(static_cast<std::size_t>(c), 0);
    std::function<void(int, int)> rec = [&](int i, int blocks) {
        if (i == c) {
            if (blocks == r)
                ++count;
            return;
        }
        for (int b = 0; b <= blocks && b < r; ++b) {
            a[static_cast<std::size_t>(i)] = b;
            rec(i + 1, std::max(blocks, b + 1));
        }
    };
    if (c == 0)
        return r == 0 ? 1 : 0;
    a[0] = 0;
    rec(1, 1);
    return count;
}

// Counts partitions of an ordered list of c items into r contiguous runs by
// enumerating every subset of the c-1 cut positions.
inline std::uint64_t count_contiguous_partitions(int c, int r)
{
    std::uint64_t count = 0;
    for (std::uint32_t mask = 0; mask < (1u << (c - 1)); ++mask) {
        int cuts = 0;
        for (int b = 0; b < c - 1; ++b)
            cuts += (mask >> b) & 1u;
        if (cuts == r - 1)
            ++count;
    }
    return count;
}

// Mann-Whitney form of the AUC over every positive/negative pair, ties 1/2.
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels)
{
    double wins = 0.0;
    std::int64_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1)
            continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] == 1)
                continue;
            ++pairs;
            if (scores[i] > scores[j])
                wins += 1.0;
            else if (scores[i] == scores[j])
                wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

// Pearson statistic from the textbook definition, cell by cell.
inline double pearson_statistic(const std::vector<std::vector<double>>& obs)
{
    const std::size_t R = obs.size(), C = obs[0].size();
    std::vector<double> rs(R, 0.0), cs(C, 0.0);
    double n = 0.0;
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < C; ++j) {
            rs[i] += obs[i][j];
            cs[j] += obs[i][j];
            n += obs[i][j];
        }
    double stat = 0.0;
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < C; ++j) {
            const double e = rs[i] * cs[j] / n;
            stat += (obs[i][j] - e) * (obs[i][j] - e) / e;
        }
    return stat;
}

} // namespace oracle
