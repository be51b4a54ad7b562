#pragma once

#include <cstdint>
#include <functional>
#include <span>

namespace recurlab
{
//! Two-sided 99% normal quantile.
inline constexpr double z99 = 2.5758293035489004;

struct Interval
{
    double lo = 0;
    double hi = 1;

    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    double width() const noexcept { return hi - lo; }
};

//! Wilson score interval for a binomial proportion.
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z = z99);

//! sup |F_n - F| for a sample (sorted in place).
double ks_statistic(std::span<double> sample, std::function<double(double)> const& cdf);

//! Asymptotic Kolmogorov p-value with the small-sample correction of Stephens.
double ks_pvalue(double statistic, std::int64_t n);

struct LineFit
{
    double slope = 0;
    double intercept = 0;
    double rss = 0;  //!< residual sum of squares
};

//! Ordinary least squares y = intercept + slope x.
LineFit fit_line(std::span<double const> x, std::span<double const> y);

}  // namespace recurlab
