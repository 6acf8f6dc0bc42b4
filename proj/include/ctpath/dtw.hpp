#ifndef CTPATH_DTW_HPP
#define CTPATH_DTW_HPP

#include "ctpath/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ctpath {

using WarpingPath = std::vector<std::pair<Index, Index>>;

template <typename Scalar>
struct DtwAlignment {
    /// Sum of squared differences along the optimal path.
    Scalar cost = Scalar(0);
    WarpingPath path;
};

namespace detail {

inline void check_window(Index n, Index m, const std::optional<Index>& window)
{
    if (n == 0 || m == 0) throw Error("dtw: series must be non-empty");
    if (window && *window < std::abs(n - m))
        throw Error("dtw: window " + std::to_string(*window) + " is narrower than the length difference " +
                    std::to_string(std::abs(n - m)));
}

// Accumulated cost table, (n+1) x (m+1), +inf outside the band.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> dtw_table(const Eigen::MatrixBase<DerivedA>& x,
                                            const Eigen::MatrixBase<DerivedB>& y,
                                            const std::optional<Index>& window)
{
    using Scalar = typename DerivedA::Scalar;
    const Index n = x.size();
    const Index m = y.size();
    check_window(n, m, window);
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    Matrix<Scalar> acc = Matrix<Scalar>::Constant(n + 1, m + 1, inf);
    acc(0, 0) = Scalar(0);
    for (Index i = 1; i <= n; ++i) {
        Index lo = 1;
        Index hi = m;
        if (window) {
            lo = std::max<Index>(1, i - *window);
            hi = std::min<Index>(m, i + *window);
        }
        for (Index j = lo; j <= hi; ++j) {
            const Scalar d = x(i - 1) - y(j - 1);
            acc(i, j) = d * d + std::min({acc(i - 1, j - 1), acc(i - 1, j), acc(i, j - 1)});
        }
    }
    return acc;
}

}  // namespace detail

/// Squared DTW cost: minimal sum of squared pointwise differences over
/// monotone warping paths, optionally confined to |i - j| <= window.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar dtw_cost(const Eigen::MatrixBase<DerivedA>& x, const Eigen::MatrixBase<DerivedB>& y,
                                   std::optional<Index> window = std::nullopt)
{
    using Scalar = typename DerivedA::Scalar;
    const Index n = x.size();
    const Index m = y.size();
    detail::check_window(n, m, window);
    // Two-row rolling version of dtw_table.
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    Vector<Scalar> prev = Vector<Scalar>::Constant(m + 1, inf);
    Vector<Scalar> curr(m + 1);
    prev(0) = Scalar(0);
    for (Index i = 1; i <= n; ++i) {
        curr.setConstant(inf);
        Index lo = 1;
        Index hi = m;
        if (window) {
            lo = std::max<Index>(1, i - *window);
            hi = std::min<Index>(m, i + *window);
        }
        for (Index j = lo; j <= hi; ++j) {
            const Scalar d = x(i - 1) - y(j - 1);
            curr(j) = d * d + std::min({prev(j - 1), prev(j), curr(j - 1)});
        }
        std::swap(prev, curr);
    }
    return prev(m);
}

/// DTW distance: square root of dtw_cost.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar dtw_distance(const Eigen::MatrixBase<DerivedA>& x, const Eigen::MatrixBase<DerivedB>& y,
                                       std::optional<Index> window = std::nullopt)
{
    using std::sqrt;
    return sqrt(dtw_cost(x, y, window));
}

/// Optimal warping path, from (0, 0) to (n-1, m-1).
template <typename DerivedA, typename DerivedB>
DtwAlignment<typename DerivedA::Scalar> dtw_align(const Eigen::MatrixBase<DerivedA>& x,
                                                  const Eigen::MatrixBase<DerivedB>& y,
                                                  std::optional<Index> window = std::nullopt)
{
    using Scalar = typename DerivedA::Scalar;
    const auto acc = detail::dtw_table(x, y, window);
    DtwAlignment<Scalar> out;
    Index i = x.size();
    Index j = y.size();
    out.cost = acc(i, j);
    while (i > 0 && j > 0) {
        out.path.emplace_back(i - 1, j - 1);
        if (i == 1 && j == 1) break;
        const Scalar diag = acc(i - 1, j - 1);
        const Scalar up = acc(i - 1, j);
        const Scalar left = acc(i, j - 1);
        if (diag <= up && diag <= left) {
            --i;
            --j;
        } else if (up <= left) {
            --i;
        } else {
            --j;
        }
    }
    std::reverse(out.path.begin(), out.path.end());
    return out;
}

/// DTW barycenter averaging over `series[members]`, starting from `init`.
/// Each accepted iteration does not increase the summed squared DTW cost
/// to the barycenter; the per-iteration costs are appended to `trace`.
template <typename Scalar>
Vector<Scalar> dba_barycenter(std::span<const Vector<Scalar>> series, std::span<const Index> members,
                              Vector<Scalar> init, int iters, std::vector<double>* trace = nullptr,
                              std::optional<Index> window = std::nullopt)
{
    if (members.empty()) throw Error("dba_barycenter: no members");
    auto total_cost = [&](const Vector<Scalar>& center) {
        Scalar s(0);
        for (Index idx : members) s += dtw_cost(series[static_cast<std::size_t>(idx)], center, window);
        return s;
    };

    Vector<Scalar> center = std::move(init);
    Scalar cost = total_cost(center);
    if (trace) trace->push_back(static_cast<double>(cost));
    const Index len = center.size();
    for (int it = 0; it < iters; ++it) {
        Vector<Scalar> sums = Vector<Scalar>::Zero(len);
        Vector<Scalar> counts = Vector<Scalar>::Zero(len);
        for (Index idx : members) {
            const auto& s = series[static_cast<std::size_t>(idx)];
            for (auto [a, b] : dtw_align(s, center, window).path) {
                sums(b) += s(a);
                counts(b) += Scalar(1);
            }
        }
        Vector<Scalar> next = sums.cwiseQuotient(counts);
        const Scalar next_cost = total_cost(next);
        if (!(next_cost < cost)) break;
        center = std::move(next);
        cost = next_cost;
        if (trace) trace->push_back(static_cast<double>(cost));
    }
    return center;
}

template <typename Scalar>
Vector<Scalar> dba_barycenter(std::span<const Vector<Scalar>> series, Vector<Scalar> init, int iters,
                              std::vector<double>* trace = nullptr)
{
    std::vector<Index> all(series.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Index>(i);
    return dba_barycenter<Scalar>(series, all, std::move(init), iters, trace);
}

}  // namespace ctpath

#endif  // CTPATH_DTW_HPP
