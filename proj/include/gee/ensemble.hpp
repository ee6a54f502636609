#ifndef GEE_ENSEMBLE_HPP
#define GEE_ENSEMBLE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gee/graph.hpp"
#include "gee/quality.hpp"
#include "gee/rng.hpp"
#include "gee/types.hpp"

namespace gee {

/// How replicates that share the smallest MRI at one k are combined.
enum class TieMode {
    FirstMin,          ///< keep the earliest replicate (strict improvement only)
    AverageEmbedding,  ///< align tied replicates' classes to the first and average
};

struct EnsembleConfig {
    /// Candidate cluster counts, strictly ascending.
    std::vector<int> cluster_range = {2};
    int replicates = 10;
    int max_iters = 20;
    std::uint64_t seed = 0;
    bool normalize = true;
    TieMode tie_mode = TieMode::FirstMin;
    CentroidRule centroid_rule = CentroidRule::Mean;
    /// Lloyd iterations per inner k-means call.
    int kmeans_max_iters = 100;
    double kmeans_tol = 1e-6;
    /// Isolated vertices embed as zero rows; by default they are assigned to
    /// the nearest centroid without pulling centroids toward the origin.
    bool kmeans_fit_zero_rows = false;
    /// 0 defers to resolve_threads().
    int threads = 0;
    /// Keep each k's winning labels in the diagnostics (for size-selection
    /// comparisons that need the per-k models).
    bool retain_candidates = false;
};

struct KDiagnostics {
    int k = 0;
    double mri = 1.0;
    int best_replicate = 0;
    /// Embed/cluster iterations used by the best replicate.
    int iterations = 0;
    std::vector<double> replicate_mri;
    std::vector<int> replicate_iterations;
    std::optional<LabelVector> labels;
};

struct PhaseTiming {
    double embed_seconds = 0.0;
    double kmeans_seconds = 0.0;
    double score_seconds = 0.0;
    double total_seconds = 0.0;
};

struct EnsembleResult {
    Embedding<double> embedding;
    LabelVector labels;
    int k_hat = 0;
    double mri = 1.0;
    std::vector<KDiagnostics> per_k;
    PhaseTiming timing;
};

/// Index into `ks` of the selected cluster size: smallest MRI, ties going to
/// the larger k. `ks` must be ascending and the same length as `mris`.
std::size_t select_cluster_size(std::span<const double> mris, std::span<const int> ks);

/// Uniform labels over [0, k) with every class nonempty; redraws up to 100
/// times before giving up.
LabelVector random_labels(Index n, int k, Rng& rng);

/// Graph encoder ensemble over every k in cfg.cluster_range.
EnsembleResult fit(const EdgeList& g, const EnsembleConfig& cfg);

/// Same as fit with the range fixed to {k}.
EnsembleResult fit_single(const EdgeList& g, int k, EnsembleConfig cfg);

/// Embedding of g under labels y, row-normalized when requested.
Embedding<double> embed(const EdgeList& g, const LabelVector& y, bool normalize);

}  // namespace gee

#endif  // GEE_ENSEMBLE_HPP
