#ifndef GEE_KMEANS_HPP
#define GEE_KMEANS_HPP

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "gee/rng.hpp"
#include "gee/types.hpp"

namespace gee {

struct KMeansConfig {
    int k = 2;
    int max_iters = 100;
    /// Stop once no centroid moves farther than this (Euclidean).
    double tol = 1e-6;
    std::uint64_t seed = 0;
    /// When false, all-zero rows are assigned but never seed or move centroids.
    bool fit_zero_rows = true;
};

struct KMeansResult {
    LabelVector labels;
    RowMatrix<double> centroids;
    int iterations = 0;
    /// Within-cluster sum of squares of the fitted rows after each assignment
    /// step, starting with the assignment to the seeds.
    std::vector<double> sse_trace;
};

namespace detail {

using Points = RowMatrix<double>;

inline double sq_dist(const Points& points, Index i, const RowMatrix<double>& centroids, Index c)
{
    return squared_distance(points.data() + i * points.cols(), centroids.data() + c * centroids.cols(),
                            points.cols());
}

inline int nearest_centroid(const Points& points, Index i, const RowMatrix<double>& centroids,
                            double* best_dist = nullptr)
{
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < centroids.rows(); ++c) {
        const double d = sq_dist(points, i, centroids, c);
        // Strict '<' keeps the lowest index on ties.
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    if (best_dist)
        *best_dist = best_d;
    return best;
}

/// Per-class coordinate sums and counts, accumulated in point order.
struct ClassSums {
    RowMatrix<double> sums;
    std::vector<Index> counts;

    void reset(Index k, Index dim)
    {
        sums.setZero(k, dim);
        counts.assign(static_cast<std::size_t>(k), 0);
    }
};

/// Lower bounds on each point's distance to every centroid other than its
/// own. Only meaningful once `valid` is set by a full assignment.
struct SecondBounds {
    std::vector<double> lower;
    bool valid = false;

    /// Loosens the bounds by how far the centroids moved.
    void shift(const RowMatrix<double>& before, const RowMatrix<double>& after, const std::vector<int>& labels)
    {
        if (!valid)
            return;
        const Index k = after.rows();
        std::vector<double> drift(static_cast<std::size_t>(k));
        int top = 0;
        for (Index c = 0; c < k; ++c) {
            drift[static_cast<std::size_t>(c)] = (after.row(c) - before.row(c)).norm();
            if (drift[static_cast<std::size_t>(c)] > drift[static_cast<std::size_t>(top)])
                top = static_cast<int>(c);
        }
        double second = 0.0;
        for (Index c = 0; c < k; ++c)
            if (c != top)
                second = std::max(second, drift[static_cast<std::size_t>(c)]);
        const double first = drift[static_cast<std::size_t>(top)];
        for (std::size_t i = 0; i < lower.size(); ++i)
            lower[i] -= labels[i] == top ? second : first;
    }
};

/// Nearest-centroid assignment over a column-major copy of the points, in
/// cache-sized blocks so the inner loop runs across points. Per point the
/// squared distance accumulates dimensions in the same order as
/// squared_distance, giving identical results.
///
/// With `bounds`, a point whose own centroid is closer than its lower bound
/// (by a relative margin far above rounding error) keeps its label and only
/// that one distance is computed. Labels and distances are the same as with
/// the full scan. When `acc` is given, the class sums of the new labels are
/// collected while each block is cached.
inline bool assign_points(const Eigen::MatrixXd& points_by_col, const RowMatrix<double>& centroids,
                          std::vector<int>& labels, std::vector<double>& dist, ClassSums* acc = nullptr,
                          SecondBounds* bounds = nullptr)
{
    constexpr Index kBlock = 256;
    constexpr double kMargin = 1e-9;
    const Index n = points_by_col.rows();
    const Index dim = points_by_col.cols();
    const Index k = centroids.rows();
    if (acc)
        acc->reset(k, dim);
    const bool use_bounds = bounds && bounds->valid;
    if (bounds)
        bounds->lower.resize(static_cast<std::size_t>(n));
    double buf[kBlock];
    double own[kBlock];
    int best[kBlock];
    double best_d[kBlock];
    double second_d[kBlock];
    Index todo[kBlock];
    bool changed = false;
    for (Index start = 0; start < n; start += kBlock) {
        const Index len = std::min(kBlock, n - start);
        Index n_todo = 0;
        if (use_bounds) {
            std::fill(own, own + len, 0.0);
            for (Index j = 0; j < dim; ++j) {
                const double* x = points_by_col.col(j).data() + start;
                for (Index i = 0; i < len; ++i) {
                    const double t = x[i] - centroids(labels[static_cast<std::size_t>(start + i)], j);
                    own[i] += t * t;
                }
            }
            for (Index i = 0; i < len; ++i) {
                if (std::sqrt(own[i]) * (1.0 + kMargin) < bounds->lower[static_cast<std::size_t>(start + i)]) {
                    best[i] = labels[static_cast<std::size_t>(start + i)];
                    best_d[i] = own[i];
                } else {
                    todo[n_todo++] = i;
                }
            }
        } else {
            for (Index i = 0; i < len; ++i)
                todo[i] = i;
            n_todo = len;
        }

        for (Index c = 0; c < k; ++c) {
            std::fill(buf, buf + n_todo, 0.0);
            for (Index j = 0; j < dim; ++j) {
                const double cj = centroids(c, j);
                const double* x = points_by_col.col(j).data() + start;
                for (Index t = 0; t < n_todo; ++t) {
                    const double d = x[todo[t]] - cj;
                    buf[t] += d * d;
                }
            }
            // Strict '<' keeps the lowest index on ties.
            for (Index t = 0; t < n_todo; ++t) {
                const Index i = todo[t];
                if (c == 0) {
                    best_d[i] = buf[t];
                    best[i] = 0;
                    second_d[i] = std::numeric_limits<double>::infinity();
                } else if (buf[t] < best_d[i]) {
                    second_d[i] = best_d[i];
                    best_d[i] = buf[t];
                    best[i] = static_cast<int>(c);
                } else if (buf[t] < second_d[i]) {
                    second_d[i] = buf[t];
                }
            }
        }
        if (bounds)
            for (Index t = 0; t < n_todo; ++t)
                bounds->lower[static_cast<std::size_t>(start + todo[t])] = std::sqrt(second_d[todo[t]]);

        for (Index i = 0; i < len; ++i) {
            const auto at = static_cast<std::size_t>(start + i);
            dist[at] = best_d[i];
            if (labels[at] != best[i]) {
                labels[at] = best[i];
                changed = true;
            }
        }
        if (acc) {
            for (Index i = 0; i < len; ++i)
                ++acc->counts[static_cast<std::size_t>(best[i])];
            for (Index j = 0; j < dim; ++j) {
                const double* x = points_by_col.col(j).data() + start;
                for (Index i = 0; i < len; ++i)
                    acc->sums(best[i], j) += x[i];
            }
        }
    }
    if (bounds)
        bounds->valid = true;
    return changed;
}

/// Moves the point farthest from its centroid into each empty cluster, taking
/// only from clusters with more than one member.
inline bool repair_empty_clusters(std::vector<int>& labels, std::vector<double>& dist, int k)
{
    bool moved = false;
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (int l : labels)
        ++counts[static_cast<std::size_t>(l)];
    for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0)
            continue;
        Index far = -1;
        double far_d = -1.0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (counts[static_cast<std::size_t>(labels[i])] > 1 && dist[i] > far_d) {
                far_d = dist[i];
                far = static_cast<Index>(i);
            }
        }
        if (far < 0)
            return moved;
        auto& l = labels[static_cast<std::size_t>(far)];
        --counts[static_cast<std::size_t>(l)];
        l = c;
        counts[static_cast<std::size_t>(c)] = 1;
        dist[static_cast<std::size_t>(far)] = 0.0;
        moved = true;
    }
    return moved;
}

/// Class sums of `labels`, accumulated in point order like assign_points.
inline void class_sums(const Eigen::MatrixXd& points_by_col, const std::vector<int>& labels, Index k,
                       ClassSums& acc)
{
    acc.reset(k, points_by_col.cols());
    for (int l : labels)
        ++acc.counts[static_cast<std::size_t>(l)];
    for (Index j = 0; j < points_by_col.cols(); ++j) {
        const double* x = points_by_col.col(j).data();
        for (Index i = 0; i < points_by_col.rows(); ++i)
            acc.sums(labels[static_cast<std::size_t>(i)], j) += x[i];
    }
}

/// Class means; rows of empty classes are left untouched.
inline void update_centroids(const ClassSums& acc, RowMatrix<double>& centroids)
{
    for (Index c = 0; c < centroids.rows(); ++c)
        if (acc.counts[static_cast<std::size_t>(c)] > 0)
            centroids.row(c) = acc.sums.row(c) / static_cast<double>(acc.counts[static_cast<std::size_t>(c)]);
}

/// k-means++ seeding: first centre uniform, then D^2-weighted draws.
inline RowMatrix<double> plus_plus_seeds(const Points& points, int k, Rng& rng)
{
    const Index n = points.rows();
    RowMatrix<double> centroids(k, points.cols());
    centroids.row(0) = points.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
    std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double d = sq_dist(points, i, centroids, c - 1);
            auto& cur = d2[static_cast<std::size_t>(i)];
            if (d < cur)
                cur = d;
            total += cur;
        }
        Index pick = n - 1;
        if (total > 0.0) {
            while (pick > 0 && d2[static_cast<std::size_t>(pick)] == 0.0)
                --pick;
            const double target = rng.uniform() * total;
            double run = 0.0;
            for (Index i = 0; i < n; ++i) {
                run += d2[static_cast<std::size_t>(i)];
                if (run > target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
        }
        centroids.row(c) = points.row(pick);
    }
    return centroids;
}

/// Class means of a warm-start labelling; empty classes take the point
/// farthest from its nearest already-placed centroid.
inline RowMatrix<double> warm_start_seeds(const Points& points, const LabelVector& warm, int k)
{
    const Index n = points.rows();
    RowMatrix<double> centroids = RowMatrix<double>::Zero(k, points.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
        const int l = warm[i];
        centroids.row(l) += points.row(i);
        ++counts[static_cast<std::size_t>(l)];
    }
    std::vector<int> placed;
    std::vector<int> empty;
    for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0) {
            centroids.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
            placed.push_back(c);
        } else {
            empty.push_back(c);
        }
    }
    for (int c : empty) {
        Index far = 0;
        double far_d = -1.0;
        for (Index i = 0; i < n; ++i) {
            double d = placed.empty() ? 0.0 : std::numeric_limits<double>::infinity();
            for (int p : placed)
                d = std::min(d, sq_dist(points, i, centroids, p));
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        centroids.row(c) = points.row(far);
        placed.push_back(c);
    }
    return centroids;
}

inline KMeansResult lloyd(const Points& points, const KMeansConfig& cfg, const LabelVector* warm_start)
{
    const Index n = points.rows();
    RowMatrix<double> centroids = warm_start ? warm_start_seeds(points, *warm_start, cfg.k)
                                             : [&] {
                                                   Rng rng(cfg.seed);
                                                   return plus_plus_seeds(points, cfg.k, rng);
                                               }();

    KMeansResult result;
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
    const Eigen::MatrixXd points_by_col = points;
    const auto total = [&] { return std::accumulate(dist.begin(), dist.end(), 0.0); };
    ClassSums acc;
    SecondBounds bounds;
    assign_points(points_by_col, centroids, labels, dist, &acc, &bounds);
    result.sse_trace.push_back(total());

    for (int it = 1; it <= cfg.max_iters; ++it) {
        result.iterations = it;
        if (repair_empty_clusters(labels, dist, cfg.k)) {
            class_sums(points_by_col, labels, cfg.k, acc);
            bounds.valid = false;
        }
        const RowMatrix<double> previous = centroids;
        update_centroids(acc, centroids);
        const double shift = (centroids - previous).rowwise().norm().maxCoeff();
        bounds.shift(previous, centroids, labels);
        const bool changed = assign_points(points_by_col, centroids, labels, dist, &acc, &bounds);
        result.sse_trace.push_back(total());
        assert(result.sse_trace[result.sse_trace.size() - 1]
               <= result.sse_trace[result.sse_trace.size() - 2] * (1.0 + 1e-9) + 1e-12);
        if (!changed || shift < cfg.tol)
            break;
    }

    result.labels = LabelVector(std::move(labels), cfg.k);
    result.centroids = std::move(centroids);
    return result;
}

}  // namespace detail

/// Lloyd's algorithm. Without a warm start, centroids are seeded by k-means++
/// from cfg.seed; with one, they start at the class means of the given labels.
/// On return every point is assigned to its nearest final centroid (ties to
/// the lowest index). Output clusters may be empty.
///
/// With cfg.fit_zero_rows = false, all-zero rows are left out of seeding and
/// centroid updates and only assigned at the end, unless fewer than k nonzero
/// rows remain.
template <typename Derived>
KMeansResult kmeans_detailed(const Eigen::MatrixBase<Derived>& input, const KMeansConfig& cfg,
                             const LabelVector* warm_start = nullptr)
{
    const Index n = input.rows();
    if (cfg.k < 1)
        throw Error("kmeans: k must be at least 1");
    if (cfg.max_iters < 1)
        throw Error("kmeans: max_iters must be at least 1");
    if (!(cfg.tol > 0.0))
        throw Error("kmeans: tol must be positive");
    if (cfg.k > n)
        throw Error("kmeans: k = " + std::to_string(cfg.k) + " exceeds the number of points "
                    + std::to_string(n));
    if (!input.allFinite())
        throw DataError("kmeans: embedding contains non-finite values");
    if (warm_start) {
        if (warm_start->size() != n)
            throw Error("kmeans: warm start length does not match the number of points");
        if (warm_start->k != cfg.k || !warm_start->fully_assigned())
            throw Error("kmeans: warm start must be fully assigned over k classes");
        warm_start->validate();
    }

    const detail::Points points = input.template cast<double>();
    if (cfg.fit_zero_rows)
        return detail::lloyd(points, cfg, warm_start);

    std::vector<Index> fitted;
    fitted.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        if (!points.row(i).isZero(0))
            fitted.push_back(i);
    if (static_cast<Index>(fitted.size()) == n || static_cast<Index>(fitted.size()) < cfg.k)
        return detail::lloyd(points, cfg, warm_start);

    RowMatrix<double> sub(static_cast<Index>(fitted.size()), points.cols());
    for (std::size_t t = 0; t < fitted.size(); ++t)
        sub.row(static_cast<Index>(t)) = points.row(fitted[t]);
    std::optional<LabelVector> sub_warm;
    if (warm_start) {
        std::vector<int> l(fitted.size());
        for (std::size_t t = 0; t < fitted.size(); ++t)
            l[t] = (*warm_start)[fitted[t]];
        sub_warm = LabelVector(std::move(l), cfg.k);
    }
    KMeansResult part = detail::lloyd(sub, cfg, sub_warm ? &*sub_warm : nullptr);

    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        if (points.row(i).isZero(0))
            labels[static_cast<std::size_t>(i)] = detail::nearest_centroid(points, i, part.centroids);
    for (std::size_t t = 0; t < fitted.size(); ++t)
        labels[static_cast<std::size_t>(fitted[t])] = part.labels[static_cast<Index>(t)];
    part.labels = LabelVector(std::move(labels), cfg.k);
    return part;
}

template <typename Derived>
LabelVector kmeans(const Eigen::MatrixBase<Derived>& points, const KMeansConfig& cfg)
{
    return kmeans_detailed(points, cfg).labels;
}

template <typename Derived>
LabelVector kmeans(const Eigen::MatrixBase<Derived>& points, const KMeansConfig& cfg,
                   const LabelVector& warm_start)
{
    return kmeans_detailed(points, cfg, &warm_start).labels;
}

}  // namespace gee

#endif  // GEE_KMEANS_HPP
