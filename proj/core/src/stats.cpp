#include "recurlab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "recurlab/errors.hpp"

namespace recurlab
{
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z)
{
    if (trials <= 0 || successes < 0 || successes > trials)
    {
        throw DomainError("binomial counts out of range");
    }
    double n = static_cast<double>(trials);
    double p = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1 + z2 / n;
    double center = (p + z2 / (2 * n)) / denom;
    double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double ks_statistic(std::span<double> sample, std::function<double(double)> const& cdf)
{
    if (sample.empty())
    {
        throw DomainError("empty sample");
    }
    std::sort(sample.begin(), sample.end());
    double n = static_cast<double>(sample.size());
    double d = 0;
    for (std::size_t i = 0; i < sample.size(); ++i)
    {
        double f = cdf(sample[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

double ks_pvalue(double statistic, std::int64_t n)
{
    double sn = std::sqrt(static_cast<double>(n));
    double lambda = (sn + 0.12 + 0.11 / sn) * statistic;
    if (lambda < 0.2)
    {
        return 1.0;
    }
    double sum = 0;
    for (int k = 1; k <= 100; ++k)
    {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-16)
        {
            break;
        }
    }
    return std::clamp(2 * sum, 0.0, 1.0);
}

LineFit fit_line(std::span<double const> x, std::span<double const> y)
{
    if (x.size() != y.size() || x.size() < 2)
    {
        throw DomainError("line fit needs at least two paired points");
    }
    double n = static_cast<double>(x.size());
    double mx = 0;
    double my = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0;
    double sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0)
    {
        throw DomainError("line fit needs distinct abscissae");
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        double r = y[i] - fit.intercept - fit.slope * x[i];
        fit.rss += r * r;
    }
    return fit;
}

}  // namespace recurlab
