#ifndef GEE_QUALITY_HPP
#define GEE_QUALITY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gee/types.hpp"

namespace gee {

/// How cluster centres are formed for the minimal rank index.
enum class CentroidRule {
    Mean,  ///< sum over members / n_k
    Sum,   ///< bare sum over members
};

struct ClusterMeans {
    RowMatrix<double> means;
    std::vector<Index> counts;

    bool present(int k) const { return counts[static_cast<std::size_t>(k)] > 0; }
};

template <typename Derived>
ClusterMeans cluster_means(const Eigen::MatrixBase<Derived>& z, const LabelVector& y,
                           CentroidRule rule = CentroidRule::Mean)
{
    if (y.size() != z.rows())
        throw Error("label vector length does not match embedding rows");
    y.validate();
    if (!y.fully_assigned())
        throw DataError("cluster means need a fully assigned label vector");

    ClusterMeans cm;
    cm.means = RowMatrix<double>::Zero(y.k, z.cols());
    cm.counts.assign(static_cast<std::size_t>(y.k), 0);
    for (Index i = 0; i < z.rows(); ++i) {
        cm.means.row(y[i]) += z.row(i).template cast<double>();
        ++cm.counts[static_cast<std::size_t>(y[i])];
    }
    if (rule == CentroidRule::Mean)
        for (int c = 0; c < y.k; ++c)
            if (cm.present(c))
                cm.means.row(c) /= static_cast<double>(cm.counts[static_cast<std::size_t>(c)]);
    return cm;
}

/// Minimal rank index: the fraction of vertices whose nearest nonempty
/// cluster centre (Euclidean) is not their own. A vertex equidistant from its
/// own centre and another counts as correctly placed. Lower is better; 0 means
/// the labelling is a fixed point of nearest-centre assignment.
template <typename Derived>
double mri(const Eigen::MatrixBase<Derived>& z, const LabelVector& y,
           CentroidRule rule = CentroidRule::Mean)
{
    const ClusterMeans cm = cluster_means(z, y, rule);
    bool any = false;
    for (int c = 0; c < y.k; ++c)
        any = any || cm.present(c);
    if (!any)
        throw DataError("mri: all clusters are empty");

    const RowMatrix<double> pts = z.template cast<double>();
    const Index dim = pts.cols();
    auto dist = [&](Index i, int c) {
        return squared_distance(pts.data() + i * dim, cm.means.data() + c * dim, dim);
    };
    Index misplaced = 0;
    for (Index i = 0; i < pts.rows(); ++i) {
        const int own = y[i];
        const double own_d = dist(i, own);
        for (int c = 0; c < y.k; ++c) {
            if (c != own && cm.present(c) && dist(i, c) < own_d) {
                ++misplaced;
                break;
            }
        }
    }
    return static_cast<double>(misplaced) / static_cast<double>(z.rows());
}

/// Adjusted Rand index under the permutation model. Returns 1 when both
/// partitions are the same trivial partition (zero denominator).
double ari(const LabelVector& a, const LabelVector& b);

/// True iff the two labellings induce the same partition, decided by exact
/// integer pair counts (equivalent to ari(a, b) == 1).
bool same_partition(const LabelVector& a, const LabelVector& b);

/// Mean silhouette width with Euclidean distances, exact O(n^2).
/// Singleton clusters score 0, as does any point with a = b = 0.
template <typename Derived>
double silhouette(const Eigen::MatrixBase<Derived>& z, const LabelVector& y)
{
    if (y.size() != z.rows())
        throw Error("label vector length does not match embedding rows");
    y.validate();
    if (!y.fully_assigned())
        throw DataError("silhouette needs a fully assigned label vector");
    const auto counts = class_counts(y);
    int nonempty = 0;
    for (auto c : counts)
        nonempty += c > 0 ? 1 : 0;
    if (nonempty < 2)
        throw DataError("silhouette needs at least two nonempty clusters");

    const Index n = z.rows();
    const int k = y.k;
    const RowMatrix<double> pts = z.template cast<double>();
    // dist_sum(i, c): total distance from i to members of cluster c
    const Index dim = pts.cols();
    RowMatrix<double> dist_sum = RowMatrix<double>::Zero(n, k);
    for (Index i = 0; i < n; ++i) {
        const double* xi = pts.data() + i * dim;
        for (Index j = i + 1; j < n; ++j) {
            const double d = std::sqrt(squared_distance(xi, pts.data() + j * dim, dim));
            dist_sum(i, y[j]) += d;
            dist_sum(j, y[i]) += d;
        }
    }

    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
        const int own = y[i];
        const Index own_n = counts[static_cast<std::size_t>(own)];
        if (own_n <= 1)
            continue;
        const double a = dist_sum(i, own) / static_cast<double>(own_n - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c)
            if (c != own && counts[static_cast<std::size_t>(c)] > 0)
                b = std::min(b, dist_sum(i, c) / static_cast<double>(counts[static_cast<std::size_t>(c)]));
        const double m = std::max(a, b);
        if (m > 0.0)
            total += (b - a) / m;
    }
    return total / static_cast<double>(n);
}

}  // namespace gee

#endif  // GEE_QUALITY_HPP
