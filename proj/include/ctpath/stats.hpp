#ifndef CTPATH_STATS_HPP
#define CTPATH_STATS_HPP

#include "ctpath/common.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace ctpath {

/// Two-sided p-value of a t statistic with `df` degrees of freedom.
inline double t_test_p_value(double t, double df)
{
    if (!(df > 0.0)) return 1.0;
    if (std::isinf(t)) return 0.0;
    if (std::isnan(t)) return 1.0;
    boost::math::students_t dist(df);
    return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
}

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

/// Simple least squares y = a + b x with the two-sided slope t-test.
template <typename DerivedX, typename DerivedY>
OlsFit ols(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y)
{
    const Index n = x.size();
    if (n != y.size()) throw Error("ols: x and y differ in length");
    if (n < 3) throw Error("ols: at least 3 points are required");

    const double mx = x.mean();
    const double my = y.mean();
    const auto dx = (x.array() - mx).template cast<double>();
    const auto dy = (y.array() - my).template cast<double>();
    const double sxx = (dx * dx).sum();
    if (sxx == 0.0) throw Error("ols: x has zero variance");

    OlsFit fit;
    fit.n = static_cast<std::size_t>(n);
    fit.slope = (dx * dy).sum() / sxx;
    fit.intercept = my - fit.slope * mx;
    const double ssr = ((dy - fit.slope * dx).square()).sum();
    const double df = static_cast<double>(n - 2);
    const double sigma2 = ssr / df;
    fit.stderr_slope = std::sqrt(std::max(sigma2, 0.0) / sxx);
    if (fit.stderr_slope > 0.0) {
        fit.p_value = t_test_p_value(fit.slope / fit.stderr_slope, df);
    } else {
        // Exact fit: any non-zero slope is certain.
        fit.p_value = fit.slope == 0.0 ? 1.0 : 0.0;
    }
    return fit;
}

/// Fractional (tie-averaged) ranks starting at 1.
template <typename Derived>
Vector<double> average_ranks(const Eigen::MatrixBase<Derived>& v)
{
    const Index n = v.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index(0));
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return v(a) < v(b); });
    Vector<double> ranks(n);
    Index i = 0;
    while (i < n) {
        Index j = i;
        while (j + 1 < n && v(order[j + 1]) == v(order[i])) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (Index k = i; k <= j; ++k) ranks(order[k]) = avg;
        i = j + 1;
    }
    return ranks;
}

/// Pearson correlation; NaN when either side is constant.
template <typename DerivedA, typename DerivedB>
double pearson(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b)
{
    const auto da = (a.array() - a.mean()).template cast<double>();
    const auto db = (b.array() - b.mean()).template cast<double>();
    const double den = std::sqrt((da * da).sum() * (db * db).sum());
    if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return std::clamp((da * db).sum() / den, -1.0, 1.0);
}

}  // namespace ctpath

#endif  // CTPATH_STATS_HPP
