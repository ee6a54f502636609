#ifndef GEE_ENCODER_HPP
#define GEE_ENCODER_HPP

#include <cmath>
#include <numeric>
#include <string>
#include <type_traits>
#include <vector>

#include "gee/graph.hpp"
#include "gee/types.hpp"

namespace gee {

/// Per-vertex incidence lists of an edge list. Row u holds (v, w) for every
/// edge u -> v, and for undirected graphs also (u, w) in row v, in edge
/// order. A self-loop appears once.
struct Neighbors {
    Index n = 0;
    std::vector<Index> offsets;
    std::vector<Index> targets;
    std::vector<double> weights;

    explicit Neighbors(const EdgeList& g)
        : n(g.n_vertices()), offsets(static_cast<std::size_t>(g.n_vertices()) + 1, 0)
    {
        const bool symmetric = !g.directed();
        for (const auto& e : g.edges()) {
            ++offsets[static_cast<std::size_t>(e.u) + 1];
            if (symmetric && e.u != e.v)
                ++offsets[static_cast<std::size_t>(e.v) + 1];
        }
        std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
        targets.resize(static_cast<std::size_t>(offsets.back()));
        weights.resize(targets.size());
        std::vector<Index> fill(offsets.begin(), offsets.end() - 1);
        auto put = [&](Index from, Index to, double w) {
            const auto at = static_cast<std::size_t>(fill[static_cast<std::size_t>(from)]++);
            targets[at] = to;
            weights[at] = w;
        };
        for (const auto& e : g.edges()) {
            put(e.u, e.v, e.w);
            if (symmetric && e.u != e.v)
                put(e.v, e.u, e.w);
        }
    }
};

namespace detail {

inline Eigen::VectorXd inverse_class_sizes(Index n_vertices, const LabelVector& y)
{
    if (y.k < 1)
        throw Error("one_hot_embed: label alphabet must have K >= 1");
    if (y.size() != n_vertices)
        throw Error("one_hot_embed: label vector length " + std::to_string(y.size())
                    + " does not match vertex count " + std::to_string(n_vertices));
    y.validate();
    if (!y.fully_assigned())
        throw DataError("one_hot_embed: every vertex needs an assigned label");

    const auto counts = class_counts(y);
    Eigen::VectorXd inv_size = Eigen::VectorXd::Zero(y.k);
    for (int c = 0; c < y.k; ++c)
        if (counts[static_cast<std::size_t>(c)] > 0)
            inv_size(c) = 1.0 / static_cast<double>(counts[static_cast<std::size_t>(c)]);
    return inv_size;
}

template <typename Scalar>
Embedding<Scalar> wrap(RowMatrix<double>&& acc)
{
    Embedding<Scalar> z;
    if constexpr (std::is_same_v<Scalar, double>)
        z.values = std::move(acc);
    else
        z.values = acc.template cast<Scalar>();
    z.normalized = false;
    return z;
}

}  // namespace detail

/// One-hot graph encoder embedding Z = A W in a single pass over the edges.
///
/// W(j, k) = 1 / n_k when vertex j carries label k, so Z(i, k) sums the
/// weights of i's edges into class k divided by that class's size. W is
/// never formed: each edge (u, v, w) adds w / n_{y(v)} to Z(u, y(v)) and, for
/// undirected graphs, w / n_{y(u)} to Z(v, y(u)). A self-loop contributes
/// once. Empty classes yield zero columns. Accumulation is always double.
template <typename Scalar = double>
Embedding<Scalar> one_hot_embed(const EdgeList& g, const LabelVector& y)
{
    const Eigen::VectorXd inv_size = detail::inverse_class_sizes(g.n_vertices(), y);
    RowMatrix<double> acc = RowMatrix<double>::Zero(g.n_vertices(), y.k);
    const bool symmetric = !g.directed();
    for (const auto& e : g.edges()) {
        const int cv = y[e.v];
        acc(e.u, cv) += e.w * inv_size(cv);
        if (symmetric && e.u != e.v) {
            const int cu = y[e.u];
            acc(e.v, cu) += e.w * inv_size(cu);
        }
    }
    return detail::wrap<Scalar>(std::move(acc));
}

/// Same embedding from incidence lists, one row at a time. Every entry sees
/// its terms in the same order as the edge pass, so the result is identical.
template <typename Scalar = double>
Embedding<Scalar> one_hot_embed(const Neighbors& g, const LabelVector& y)
{
    const Eigen::VectorXd inv_size = detail::inverse_class_sizes(g.n, y);
    RowMatrix<double> acc = RowMatrix<double>::Zero(g.n, y.k);
    for (Index u = 0; u < g.n; ++u) {
        const auto end = static_cast<std::size_t>(g.offsets[static_cast<std::size_t>(u) + 1]);
        for (auto at = static_cast<std::size_t>(g.offsets[static_cast<std::size_t>(u)]); at < end; ++at) {
            const int c = y[g.targets[at]];
            acc(u, c) += g.weights[at] * inv_size(c);
        }
    }
    return detail::wrap<Scalar>(std::move(acc));
}

/// Scales every row with positive L2 norm to unit length; zero rows stay zero.
template <typename Derived>
void normalize_rows(Eigen::MatrixBase<Derived>& m)
{
    using Scalar = typename Derived::Scalar;
    for (Index i = 0; i < m.rows(); ++i) {
        const Scalar norm = m.row(i).norm();
        if (norm > Scalar(0))
            m.row(i) /= norm;
    }
}

template <typename Scalar>
Embedding<Scalar> normalize(Embedding<Scalar> z)
{
    if (!z.values.allFinite())
        throw DataError("normalize: embedding contains non-finite values");
    normalize_rows(z.values);
    z.normalized = true;
    return z;
}

}  // namespace gee

#endif  // GEE_ENCODER_HPP
