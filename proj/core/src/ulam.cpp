#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "recurlab/errors.hpp"
#include "recurlab/maps.hpp"

namespace recurlab
{
namespace
{
struct SparseRow
{
    std::vector<long> cols;
    std::vector<double> weights;
};

//! Preimage of y under a monotone branch, by bisection when no closed form.
double invert_branch(MapModel const& map, MapBranch const& br, double y)
{
    double x = map.branch_inverse(br, y);
    if (!std::isnan(x))
    {
        return std::clamp(x, br.lo, br.hi);
    }
    double a = br.lo;
    double b = br.hi;
    bool increasing = map.branch_forward(br, b) >= map.branch_forward(br, a);
    for (int it = 0; it < 200 && b - a > 0; ++it)
    {
        double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b)
            break;
        bool below = map.branch_forward(br, mid) < y;
        if (below == increasing)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

SparseRow build_row(MapModel const& map, long i, long bins, double lo, double width, long max_branches)
{
    double a = lo + static_cast<double>(i) * width;
    double b = lo + static_cast<double>(i + 1) * width;
    std::map<long, double> acc;
    double covered = 0;

    auto bin_of = [&](double y) {
        auto j = static_cast<long>(std::floor((y - lo) / width));
        return std::clamp(j, 0L, bins - 1);
    };

    for (auto const& br : map.branches_in(a, b, max_branches))
    {
        covered += br.hi - br.lo;
        double ya = map.branch_forward(br, br.lo);
        double yb = map.branch_forward(br, br.hi);
        double ylo = std::clamp(std::min(ya, yb), map.lo(), map.hi());
        double yhi = std::clamp(std::max(ya, yb), map.lo(), map.hi());
        if (!(yhi > ylo))
        {
            acc[bin_of(ylo)] += br.hi - br.lo;
            continue;
        }
        for (long j = bin_of(ylo); j <= bin_of(yhi); ++j)
        {
            double c = std::max(ylo, lo + static_cast<double>(j) * width);
            double d = std::min(yhi, lo + static_cast<double>(j + 1) * width);
            if (d <= c)
                continue;
            double w = std::abs(invert_branch(map, br, d) - invert_branch(map, br, c));
            if (w > 0)
                acc[j] += w;
        }
    }
    // Branches beyond the cap (Gauss near 0) are full and spread mass almost
    // evenly over the image.
    double rest = (b - a) - covered;
    if (rest > 1e-15 * width)
    {
        for (long j = 0; j < bins; ++j)
            acc[j] += rest / static_cast<double>(bins);
    }

    SparseRow row;
    double total = 0;
    for (auto const& [j, w] : acc)
        total += w;
    for (auto const& [j, w] : acc)
    {
        row.cols.push_back(j);
        row.weights.push_back(w / total);
    }
    return row;
}

}  // namespace

DensityModel ulam_density(MapModel const& map, long bins, UlamOptions const& options)
{
    if (bins < 16)
    {
        throw ContractError("ulam_density needs at least 16 bins");
    }
    double lo = map.lo();
    double width = (map.hi() - lo) / static_cast<double>(bins);

    std::vector<SparseRow> rows;
    rows.reserve(static_cast<std::size_t>(bins));
    for (long i = 0; i < bins; ++i)
    {
        rows.push_back(build_row(map, i, bins, lo, width, options.max_branches_per_bin));
    }

    auto n = static_cast<std::size_t>(bins);
    std::vector<double> p(n, 1.0 / static_cast<double>(bins));
    std::vector<double> next(n);
    double residual = 0;
    for (long it = 1; it <= options.max_iterations; ++it)
    {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
        {
            auto const& row = rows[i];
            for (std::size_t k = 0; k < row.cols.size(); ++k)
                next[static_cast<std::size_t>(row.cols[k])] += p[i] * row.weights[k];
        }
        double total = 0;
        for (double v : next)
            total += v;
        residual = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            next[i] /= total;
            residual += std::abs(next[i] - p[i]);
        }
        p.swap(next);
        if (residual < options.tolerance)
        {
            return DensityModel::discrete(DensityKind::Ulam,
                                          lo,
                                          map.hi(),
                                          std::move(p),
                                          "ulam(" + map.name() + ", " + std::to_string(bins)
                                              + " bins)");
        }
    }
    throw ConvergenceError("ulam_density: power iteration did not converge for "
                               + map.name(),
                           residual,
                           options.max_iterations);
}

}  // namespace recurlab
