#ifndef GEE_SIMGEN_HPP
#define GEE_SIMGEN_HPP

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "gee/graph.hpp"
#include "gee/rng.hpp"
#include "gee/types.hpp"

namespace gee {

/// Beta(alpha, beta) law of the per-vertex degree parameters.
struct ThetaDistribution {
    double alpha = 1.0;
    double beta = 4.0;

    double mean() const { return alpha / (alpha + beta); }
    double sample(Rng& rng) const;
};

/// Parameters of one (degree-corrected) stochastic block model draw.
struct SimSpec {
    Index n = 0;
    Eigen::MatrixXd block;
    std::vector<double> priors;
    /// When set, used instead of drawing labels from `priors`.
    std::optional<LabelVector> fixed_labels;
    bool degree_corrected = true;
    ThetaDistribution theta;
    std::uint64_t seed = 0;

    int k() const { return static_cast<int>(block.rows()); }

    /// Throws Error unless B is square, symmetric, within [0, 1], priors form a
    /// distribution of matching length and n >= 1.
    void validate() const;
};

struct SimDraw {
    EdgeList graph;
    LabelVector truth;
    /// Empty unless degree corrected.
    std::vector<double> thetas;
};

/// Draws labels i.i.d. from the priors, thetas i.i.d. from the Beta law, then
/// includes every pair i < j independently with probability
/// theta_i theta_j B(y_i, y_j) (or B(y_i, y_j) without degree correction).
/// The graph is undirected, binary, loop-free and simple.
SimDraw sample(const SimSpec& spec);

/// The three DC-SBM benchmark settings: "sim1", "sim2", "sim3". All use
/// n = 3000 unless overridden and Beta(1, 4) degree parameters.
SimSpec preset(std::string_view id, std::optional<Index> n = std::nullopt);

/// Sparse planted-partition multigraph with exactly `n_edges` edges over k
/// contiguous equal blocks. Each edge picks a uniform endpoint u, then a
/// partner in u's block with probability `within`, else uniformly; self-loops
/// are redrawn. Edges come out sorted by (u, v). Used for scaling benchmarks.
SimDraw planted_partition(Index n, int k, Index n_edges, double within, std::uint64_t seed);

}  // namespace gee

#endif  // GEE_SIMGEN_HPP
