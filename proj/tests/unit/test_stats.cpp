#include <doctest.h>

#include <cmath>
#include <vector>

#include "recurlab/stats.hpp"

using namespace recurlab;

TEST_CASE("Wilson interval matches reference values")
{
    Interval a = wilson_interval(30, 100);
    CHECK(a.lo == doctest::Approx(0.1974606562099051).epsilon(1e-12));
    CHECK(a.hi == doctest::Approx(0.42742761887642405).epsilon(1e-12));
    Interval b = wilson_interval(0, 100);
    CHECK(b.lo == 0.0);
    CHECK(b.hi == doctest::Approx(0.062220687715822995).epsilon(1e-12));
    Interval c = wilson_interval(100, 100);
    CHECK(c.hi == 1.0);
    CHECK(c.contains(1.0));
}

TEST_CASE("Kolmogorov p-values with the Stephens correction")
{
    CHECK(ks_pvalue(0.05, 100) == doctest::Approx(0.9596004458626864).epsilon(1e-9));
    CHECK(ks_pvalue(0.05, 1000) == doctest::Approx(0.012958845703741699).epsilon(1e-9));
    CHECK(ks_pvalue(0.0, 1000) == 1.0);
}

TEST_CASE("KS statistic of a perfect grid is 1/(2n)")
{
    std::vector<double> xs;
    for (int i = 0; i < 100; ++i)
    {
        xs.push_back((i + 0.5) / 100);
    }
    CHECK(ks_statistic(xs, [](double x) { return x; }) == doctest::Approx(0.005).epsilon(1e-12));
}

TEST_CASE("least squares line")
{
    std::vector<double> x{0, 1, 2, 3};
    std::vector<double> y{1, 3, 5, 7};
    LineFit f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.rss == doctest::Approx(0.0).epsilon(1e-20));
}
