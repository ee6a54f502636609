#include "gee/ensemble.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>

#include "gee/encoder.hpp"
#include "gee/kmeans.hpp"
#include "gee/parallel.hpp"

namespace gee {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct ReplicateOutcome {
    LabelVector labels;
    double mri = 1.0;
    int iterations = 0;
    double embed_seconds = 0.0;
    double kmeans_seconds = 0.0;
    double score_seconds = 0.0;
};

void validate(const EdgeList& g, const EnsembleConfig& cfg)
{
    const auto& range = cfg.cluster_range;
    if (range.empty())
        throw Error("ensemble: cluster range is empty");
    if (range.front() < 1)
        throw Error("ensemble: cluster sizes must be at least 1");
    if (!std::is_sorted(range.begin(), range.end())
        || std::adjacent_find(range.begin(), range.end()) != range.end())
        throw Error("ensemble: cluster range must be strictly ascending");
    if (g.n_vertices() < range.back())
        throw Error("ensemble: graph has " + std::to_string(g.n_vertices())
                    + " vertices, fewer than the largest cluster size " + std::to_string(range.back()));
    if (cfg.replicates < 1)
        throw Error("ensemble: replicates must be at least 1");
    if (cfg.max_iters < 1)
        throw Error("ensemble: max_iters must be at least 1");
}

Embedding<double> embed(const Neighbors& g, const LabelVector& y, bool normalize_rows)
{
    Embedding<double> z = one_hot_embed<double>(g, y);
    return normalize_rows ? normalize(std::move(z)) : z;
}

ReplicateOutcome run_replicate(const Neighbors& g, int k, int replicate, const EnsembleConfig& cfg)
{
    ReplicateOutcome out;
    const auto key_k = static_cast<std::uint64_t>(k);
    const auto key_r = static_cast<std::uint64_t>(replicate);
    Rng rng(derive_seed(cfg.seed, {key_k, key_r}));
    LabelVector y = random_labels(g.n, k, rng);

    const KMeansConfig kc{k, cfg.kmeans_max_iters, cfg.kmeans_tol,
                          derive_seed(cfg.seed, {key_k, key_r, 1}), cfg.kmeans_fit_zero_rows};
    for (int it = 1; it <= cfg.max_iters; ++it) {
        auto t0 = Clock::now();
        const Embedding<double> z = embed(g, y, cfg.normalize);
        out.embed_seconds += seconds_since(t0);

        t0 = Clock::now();
        LabelVector next = kmeans(z.values, kc, y);
        out.kmeans_seconds += seconds_since(t0);

        out.iterations = it;
        if (same_partition(y, next))
            break;
        y = std::move(next);
    }

    auto t0 = Clock::now();
    const Embedding<double> z = embed(g, y, cfg.normalize);
    out.embed_seconds += seconds_since(t0);
    t0 = Clock::now();
    out.mri = mri(z.values, y, cfg.centroid_rule);
    out.score_seconds += seconds_since(t0);
    out.labels = std::move(y);
    return out;
}

/// Relabels `other` so each of its classes takes the reference class it
/// overlaps most, greedily by largest shared count.
LabelVector align_to(const LabelVector& reference, const LabelVector& other)
{
    const int k = reference.k;
    std::vector<Index> overlap(static_cast<std::size_t>(k * k), 0);
    for (Index i = 0; i < reference.size(); ++i)
        ++overlap[static_cast<std::size_t>(other[i] * k + reference[i])];

    std::vector<int> order(static_cast<std::size_t>(k * k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return overlap[static_cast<std::size_t>(a)] > overlap[static_cast<std::size_t>(b)];
    });
    std::vector<int> mapping(static_cast<std::size_t>(k), -1);
    std::vector<bool> taken(static_cast<std::size_t>(k), false);
    for (int cell : order) {
        const int from = cell / k;
        const int to = cell % k;
        if (mapping[static_cast<std::size_t>(from)] < 0 && !taken[static_cast<std::size_t>(to)]) {
            mapping[static_cast<std::size_t>(from)] = to;
            taken[static_cast<std::size_t>(to)] = true;
        }
    }
    LabelVector aligned = other;
    for (auto& l : aligned.labels)
        l = mapping[static_cast<std::size_t>(l)];
    return aligned;
}

}  // namespace

std::size_t select_cluster_size(std::span<const double> mris, std::span<const int> ks)
{
    if (mris.empty() || mris.size() != ks.size())
        throw Error("select_cluster_size: need one MRI per candidate size");
    std::size_t best = 0;
    for (std::size_t i = 1; i < mris.size(); ++i)
        if (mris[i] <= mris[best])
            best = i;
    return best;
}

LabelVector random_labels(Index n, int k, Rng& rng)
{
    if (k < 1 || n < k)
        throw Error("random_labels: need 1 <= k <= n");
    constexpr int kMaxAttempts = 100;
    std::vector<int> labels(static_cast<std::size_t>(n));
    std::vector<Index> counts(static_cast<std::size_t>(k));
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        std::fill(counts.begin(), counts.end(), 0);
        for (auto& l : labels) {
            l = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
            ++counts[static_cast<std::size_t>(l)];
        }
        if (std::find(counts.begin(), counts.end(), 0) == counts.end())
            return LabelVector(std::move(labels), k);
    }
    throw Error("random_labels: could not draw a labelling with all " + std::to_string(k)
                + " classes nonempty in " + std::to_string(kMaxAttempts) + " attempts");
}

Embedding<double> embed(const EdgeList& g, const LabelVector& y, bool normalize_rows)
{
    Embedding<double> z = one_hot_embed<double>(g, y);
    return normalize_rows ? normalize(std::move(z)) : z;
}

EnsembleResult fit(const EdgeList& g, const EnsembleConfig& cfg)
{
    validate(g, cfg);
    const auto start = Clock::now();
    const auto& range = cfg.cluster_range;
    const auto n_k = static_cast<Index>(range.size());
    const Index n_items = n_k * cfg.replicates;

    const Neighbors adjacency(g);
    std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(n_items));
    parallel_for(n_items, resolve_threads(cfg.threads), [&](Index item) {
        const int k = range[static_cast<std::size_t>(item / cfg.replicates)];
        const int rep = static_cast<int>(item % cfg.replicates);
        outcomes[static_cast<std::size_t>(item)] = run_replicate(adjacency, k, rep, cfg);
    });

    EnsembleResult result;
    std::vector<double> k_mris;
    std::vector<int> winners;
    for (Index ki = 0; ki < n_k; ++ki) {
        KDiagnostics diag;
        diag.k = range[static_cast<std::size_t>(ki)];
        int best = 0;
        for (int rep = 0; rep < cfg.replicates; ++rep) {
            const auto& o = outcomes[static_cast<std::size_t>(ki * cfg.replicates + rep)];
            diag.replicate_mri.push_back(o.mri);
            diag.replicate_iterations.push_back(o.iterations);
            if (o.mri < diag.replicate_mri[static_cast<std::size_t>(best)])
                best = rep;
            result.timing.embed_seconds += o.embed_seconds;
            result.timing.kmeans_seconds += o.kmeans_seconds;
            result.timing.score_seconds += o.score_seconds;
        }
        const auto& winner = outcomes[static_cast<std::size_t>(ki * cfg.replicates + best)];
        diag.best_replicate = best;
        diag.mri = winner.mri;
        diag.iterations = winner.iterations;
        if (cfg.retain_candidates)
            diag.labels = winner.labels;
        k_mris.push_back(diag.mri);
        winners.push_back(best);
        result.per_k.push_back(std::move(diag));
    }

    const std::size_t chosen = select_cluster_size(k_mris, range);
    const Index base = static_cast<Index>(chosen) * cfg.replicates;
    const auto& winner = outcomes[static_cast<std::size_t>(base + winners[chosen])];
    result.k_hat = range[chosen];
    result.labels = winner.labels;
    result.embedding = embed(adjacency, result.labels, cfg.normalize);
    result.mri = winner.mri;

    if (cfg.tie_mode == TieMode::AverageEmbedding) {
        int tied = 1;
        for (int rep = winners[chosen] + 1; rep < cfg.replicates; ++rep) {
            const auto& o = outcomes[static_cast<std::size_t>(base + rep)];
            if (o.mri != winner.mri)
                continue;
            const LabelVector aligned = align_to(winner.labels, o.labels);
            result.embedding.values += embed(adjacency, aligned, cfg.normalize).values;
            ++tied;
        }
        if (tied > 1) {
            result.embedding.values /= static_cast<double>(tied);
            if (cfg.normalize)
                result.embedding = normalize(std::move(result.embedding));
            result.mri = mri(result.embedding.values, result.labels, cfg.centroid_rule);
        }
    }

    result.timing.total_seconds = seconds_since(start);
    return result;
}

EnsembleResult fit_single(const EdgeList& g, int k, EnsembleConfig cfg)
{
    cfg.cluster_range = {k};
    return fit(g, cfg);
}

}  // namespace gee
