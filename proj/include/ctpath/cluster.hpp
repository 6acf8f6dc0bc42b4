#ifndef CTPATH_CLUSTER_HPP
#define CTPATH_CLUSTER_HPP

#include "ctpath/dtw.hpp"

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace ctpath {

struct KMeansOptions {
    int k = 8;
    std::uint64_t seed = 0;
    int max_iter = 100;
    int dba_iter = 10;
    std::optional<Index> window;
};

template <typename Scalar>
struct ClusterModel {
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<Vector<Scalar>> barycenters;
    std::vector<int> assignments;
    /// Sum of squared DTW distances to the assigned barycenter.
    double inertia = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Objective after every assignment and every update step.
    std::vector<double> objective_trace;

    std::vector<Index> members(int cluster) const
    {
        std::vector<Index> out;
        for (std::size_t i = 0; i < assignments.size(); ++i)
            if (assignments[i] == cluster) out.push_back(static_cast<Index>(i));
        return out;
    }
};

/// Pairwise DTW distances (not squared).
template <typename Scalar>
Matrix<double> dtw_distance_matrix(std::span<const Vector<Scalar>> series, std::optional<Index> window = std::nullopt)
{
    const auto n = static_cast<Index>(series.size());
    Matrix<double> d = Matrix<double>::Zero(n, n);
    parallel_for(series.size(), [&](std::size_t i) {
        for (std::size_t j = i + 1; j < series.size(); ++j)
            d(static_cast<Index>(i), static_cast<Index>(j)) =
                static_cast<double>(dtw_distance(series[i], series[j], window));
    });
    d.template triangularView<Eigen::StrictlyLower>() = d.transpose();
    return d;
}

namespace detail {

// k-means++ seeding under squared DTW.
template <typename Scalar>
std::vector<Vector<Scalar>> kmeanspp_init(std::span<const Vector<Scalar>> series, int k, std::mt19937_64& rng,
                                          const std::optional<Index>& window)
{
    const std::size_t n = series.size();
    std::vector<Vector<Scalar>> centers;
    std::vector<bool> chosen(n, false);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::size_t first = pick(rng);
    centers.push_back(series[first]);
    chosen[first] = true;

    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    while (static_cast<int>(centers.size()) < k) {
        const auto& last = centers.back();
        parallel_for(n, [&](std::size_t i) {
            nearest[i] = std::min(nearest[i], static_cast<double>(dtw_cost(series[i], last, window)));
        });
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!chosen[i]) total += nearest[i];
        std::size_t next = n;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng);
            for (std::size_t i = 0; i < n; ++i) {
                if (chosen[i] || nearest[i] == 0.0) continue;
                next = i;
                target -= nearest[i];
                if (target <= 0.0) break;
            }
        }
        if (next == n) {
            // Remaining points coincide with chosen centers.
            for (std::size_t i = 0; i < n; ++i)
                if (!chosen[i]) {
                    next = i;
                    break;
                }
        }
        centers.push_back(series[next]);
        chosen[next] = true;
    }
    return centers;
}

}  // namespace detail

/// K-means under DTW with DBA centroid updates and k-means++ seeding.
/// Stops at an assignment fixpoint or after `max_iter` iterations. An empty
/// cluster is re-seeded with the point farthest from its current barycenter.
template <typename Scalar>
ClusterModel<Scalar> dtw_kmeans(std::span<const Vector<Scalar>> series, const KMeansOptions& opt)
{
    const std::size_t n = series.size();
    if (opt.k < 1 || static_cast<std::size_t>(opt.k) > n)
        throw Error("dtw_kmeans: k must lie in [1, number of series]");

    std::mt19937_64 rng(opt.seed);
    ClusterModel<Scalar> model;
    model.k = opt.k;
    model.seed = opt.seed;
    model.barycenters = detail::kmeanspp_init(series, opt.k, rng, opt.window);
    model.assignments.assign(n, -1);

    std::vector<double> cost(n, 0.0);
    auto assign = [&]() {
        bool changed = false;
        std::vector<int> next(n, 0);
        parallel_for(n, [&](std::size_t i) {
            double best = std::numeric_limits<double>::infinity();
            int arg = 0;
            for (int c = 0; c < opt.k; ++c) {
                const double d = static_cast<double>(dtw_cost(series[i], model.barycenters[c], opt.window));
                if (d < best) {
                    best = d;
                    arg = c;
                }
            }
            next[i] = arg;
            cost[i] = best;
        });
        for (std::size_t i = 0; i < n; ++i) {
            if (next[i] != model.assignments[i]) changed = true;
            model.assignments[i] = next[i];
        }
        return changed;
    };
    auto objective = [&]() {
        double s = 0.0;
        for (double c : cost) s += c;
        return s;
    };

    for (int it = 1; it <= opt.max_iter; ++it) {
        const bool changed = assign();
        model.objective_trace.push_back(objective());
        model.iterations = it;
        if (!changed && it > 1) {
            model.converged = true;
            break;
        }

        std::vector<std::size_t> sizes(static_cast<std::size_t>(opt.k), 0);
        for (int a : model.assignments) ++sizes[static_cast<std::size_t>(a)];
        for (int c = 0; c < opt.k; ++c) {
            if (sizes[static_cast<std::size_t>(c)] != 0) continue;
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[static_cast<std::size_t>(model.assignments[i])] < 2) continue;
                if (far == n || cost[i] > cost[far]) far = i;
            }
            if (far == n) throw Error("dtw_kmeans: cannot re-seed an empty cluster");
            --sizes[static_cast<std::size_t>(model.assignments[far])];
            model.assignments[far] = c;
            model.barycenters[static_cast<std::size_t>(c)] = series[far];
            cost[far] = 0.0;
            sizes[static_cast<std::size_t>(c)] = 1;
        }

        std::vector<Vector<Scalar>> updated(static_cast<std::size_t>(opt.k));
        parallel_for(static_cast<std::size_t>(opt.k), [&](std::size_t c) {
            auto members = model.members(static_cast<int>(c));
            updated[c] = dba_barycenter<Scalar>(series, members, model.barycenters[c], opt.dba_iter, nullptr, opt.window);
        });
        model.barycenters = std::move(updated);
        parallel_for(n, [&](std::size_t i) {
            cost[i] = static_cast<double>(
                dtw_cost(series[i], model.barycenters[static_cast<std::size_t>(model.assignments[i])], opt.window));
        });
        model.objective_trace.push_back(objective());
    }
    model.inertia = objective();
    return model;
}

/// Mean silhouette coefficient for precomputed distances. Points in
/// singleton clusters score 0. Requires 2 <= #clusters <= n - 1.
inline double silhouette_score(const Matrix<double>& dist, std::span<const int> labels,
                               std::vector<double>* per_sample = nullptr)
{
    const std::size_t n = labels.size();
    if (static_cast<std::size_t>(dist.rows()) != n || static_cast<std::size_t>(dist.cols()) != n)
        throw Error("silhouette: distance matrix does not match labels");
    int k = 0;
    for (int l : labels) k = std::max(k, l + 1);
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
    const auto used = std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; });
    if (used < 2 || static_cast<std::size_t>(used) > n - 1)
        throw Error("silhouette: number of clusters must lie in [2, n - 1]");

    std::vector<double> s(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto li = static_cast<std::size_t>(labels[i]);
        if (sizes[li] < 2) continue;
        std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) sum[static_cast<std::size_t>(labels[j])] += dist(static_cast<Index>(i), static_cast<Index>(j));
        const double a = sum[li] / static_cast<double>(sizes[li] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < sizes.size(); ++c)
            if (c != li && sizes[c] > 0) b = std::min(b, sum[c] / static_cast<double>(sizes[c]));
        const double den = std::max(a, b);
        s[i] = den > 0.0 ? (b - a) / den : 0.0;
    }
    if (per_sample) *per_sample = s;
    double mean = 0.0;
    for (double v : s) mean += v;
    return mean / static_cast<double>(n);
}

struct KSelection {
    std::vector<int> ks;
    std::vector<double> silhouettes;
    int chosen_k = 0;
};

/// Elbow of a silhouette curve: the k maximizing 2 s(k) - s(k-1) - s(k+1)
/// (sharpest concave bend), a missing neighbour at either end replaced by
/// s(k) itself. Ties go to the smaller k.
inline int silhouette_elbow(std::span<const int> ks, std::span<const double> s)
{
    if (ks.empty() || ks.size() != s.size()) throw Error("silhouette_elbow: empty or mismatched curve");
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double left = i > 0 ? s[i - 1] : s[i];
        const double right = i + 1 < s.size() ? s[i + 1] : s[i];
        const double bend = 2.0 * s[i] - left - right;
        if (bend > best_score) {
            best_score = bend;
            best = i;
        }
    }
    return ks[best];
}

struct SelectKOptions {
    int k_min = 2;
    int k_max = 15;
    KMeansOptions kmeans;
    /// Silhouettes are evaluated on at most this many series (seeded sample).
    std::size_t sample = 2000;
};

/// Fits DTW k-means for every k in [k_min, k_max], scores each with the
/// DTW silhouette and picks the elbow.
template <typename Scalar>
KSelection select_k(std::span<const Vector<Scalar>> series, const SelectKOptions& opt,
                    std::vector<ClusterModel<Scalar>>* models = nullptr)
{
    const std::size_t n = series.size();
    if (opt.k_min < 2 || opt.k_max < opt.k_min || static_cast<std::size_t>(opt.k_max) > n - 1 || n < 3)
        throw Error("select_k: k range must lie within [2, n - 1]");
    bool identical = true;
    for (std::size_t i = 1; i < n && identical; ++i) identical = series[i] == series[0];
    if (identical) throw Error("select_k: all series are identical; silhouette is undefined");

    std::vector<std::size_t> sample(n);
    for (std::size_t i = 0; i < n; ++i) sample[i] = i;
    if (n > opt.sample) {
        std::mt19937_64 rng(opt.kmeans.seed ^ 0x9e3779b97f4a7c15ULL);
        std::shuffle(sample.begin(), sample.end(), rng);
        sample.resize(opt.sample);
        std::sort(sample.begin(), sample.end());
    }
    std::vector<Vector<Scalar>> sub;
    sub.reserve(sample.size());
    for (auto i : sample) sub.push_back(series[i]);
    const Matrix<double> dist = dtw_distance_matrix<Scalar>(sub, opt.kmeans.window);

    KSelection out;
    for (int k = opt.k_min; k <= opt.k_max; ++k) {
        KMeansOptions ko = opt.kmeans;
        ko.k = k;
        auto model = dtw_kmeans<Scalar>(series, ko);
        std::vector<int> labels;
        labels.reserve(sample.size());
        for (auto i : sample) labels.push_back(model.assignments[i]);
        // Degenerate fits where the sample covers a single cluster score 0.
        double sil = 0.0;
        try {
            sil = silhouette_score(dist, labels);
        } catch (const Error&) {
            sil = 0.0;
        }
        out.ks.push_back(k);
        out.silhouettes.push_back(sil);
        if (models) models->push_back(std::move(model));
    }
    out.chosen_k = silhouette_elbow(out.ks, out.silhouettes);
    return out;
}

}  // namespace ctpath

#endif  // CTPATH_CLUSTER_HPP
