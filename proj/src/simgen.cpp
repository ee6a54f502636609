#include "gee/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace gee {

double ThetaDistribution::sample(Rng& rng) const
{
    // Shape-1 cases have closed-form inverse CDFs.
    if (alpha == 1.0)
        return 1.0 - std::pow(1.0 - rng.uniform(), 1.0 / beta);
    if (beta == 1.0)
        return std::pow(rng.uniform(), 1.0 / alpha);
    std::gamma_distribution<double> ga(alpha, 1.0), gb(beta, 1.0);
    const double x = ga(rng.engine());
    const double y = gb(rng.engine());
    return x / (x + y);
}

void SimSpec::validate() const
{
    if (n < 1)
        throw Error("simulation needs at least one vertex");
    const Index k = block.rows();
    if (k < 1 || block.cols() != k)
        throw Error("block matrix must be square and nonempty");
    for (Index a = 0; a < k; ++a) {
        for (Index b = 0; b < k; ++b) {
            const double p = block(a, b);
            if (!(p >= 0.0 && p <= 1.0))
                throw Error("block probabilities must lie in [0, 1]");
            if (p != block(b, a))
                throw Error("block matrix must be symmetric for undirected generation");
        }
    }
    if (fixed_labels) {
        if (fixed_labels->size() != n || fixed_labels->k != k || !fixed_labels->fully_assigned())
            throw Error("fixed labels must assign all n vertices over the block alphabet");
        fixed_labels->validate();
    } else {
        if (static_cast<Index>(priors.size()) != k)
            throw Error("need one prior per block");
        for (double p : priors)
            if (!(p >= 0.0))
                throw Error("priors must be nonnegative");
        const double total = std::accumulate(priors.begin(), priors.end(), 0.0);
        if (std::abs(total - 1.0) > 1e-9)
            throw Error("priors must sum to 1");
    }
    if (degree_corrected && !(theta.alpha > 0.0 && theta.beta > 0.0))
        throw Error("Beta parameters must be positive");
}

SimDraw sample(const SimSpec& spec)
{
    spec.validate();
    const Index n = spec.n;
    const int k = spec.k();

    SimDraw draw;
    if (spec.fixed_labels) {
        draw.truth = *spec.fixed_labels;
    } else {
        Rng rng(derive_seed(spec.seed, {0}));
        std::vector<double> cumulative(spec.priors.size());
        std::partial_sum(spec.priors.begin(), spec.priors.end(), cumulative.begin());
        std::vector<int> labels(static_cast<std::size_t>(n));
        for (auto& l : labels) {
            const double u = rng.uniform() * cumulative.back();
            int c = 0;
            while (c < k - 1 && u >= cumulative[static_cast<std::size_t>(c)])
                ++c;
            l = c;
        }
        draw.truth = LabelVector(std::move(labels), k);
    }

    if (spec.degree_corrected) {
        Rng rng(derive_seed(spec.seed, {1}));
        draw.thetas.resize(static_cast<std::size_t>(n));
        for (auto& t : draw.thetas)
            t = spec.theta.sample(rng);
    }

    Rng rng(derive_seed(spec.seed, {2}));
    std::vector<Edge> edges;
    for (Index i = 0; i < n; ++i) {
        const int yi = draw.truth[i];
        const double ti = spec.degree_corrected ? draw.thetas[static_cast<std::size_t>(i)] : 1.0;
        for (Index j = i + 1; j < n; ++j) {
            double p = spec.block(yi, draw.truth[j]);
            if (spec.degree_corrected)
                p *= ti * draw.thetas[static_cast<std::size_t>(j)];
            if (p > 1.0)
                throw Error("edge probability exceeds 1 for pair (" + std::to_string(i + 1) + ", "
                            + std::to_string(j + 1) + ")");
            if (rng.uniform() < p)
                edges.push_back({i, j, 1.0});
        }
    }
    draw.graph = EdgeList(n, std::move(edges), false);
    return draw;
}

SimSpec preset(std::string_view id, std::optional<Index> n)
{
    SimSpec spec;
    spec.n = n.value_or(3000);
    spec.degree_corrected = true;
    spec.theta = {1.0, 4.0};
    if (id == "sim1") {
        spec.block.resize(2, 2);
        spec.block << 0.5, 0.1,
                      0.1, 0.5;
        spec.priors = {0.5, 0.5};
    } else if (id == "sim2") {
        spec.block = Eigen::MatrixXd::Constant(4, 4, 0.1);
        spec.block.diagonal() << 0.9, 0.7, 0.5, 0.3;
        spec.priors = {0.2, 0.2, 0.3, 0.3};
    } else if (id == "sim3") {
        spec.block = Eigen::MatrixXd::Constant(5, 5, 0.1);
        spec.block.diagonal().setConstant(0.2);
        spec.priors.assign(5, 0.2);
    } else {
        throw Error("unknown simulation preset '" + std::string(id) + "' (expected sim1, sim2 or sim3)");
    }
    return spec;
}

SimDraw planted_partition(Index n, int k, Index n_edges, double within, std::uint64_t seed)
{
    if (k < 1 || n < 2 || n < k)
        throw Error("planted_partition: need n >= 2 and 1 <= k <= n");
    if (n_edges < 0 || !(within >= 0.0 && within <= 1.0))
        throw Error("planted_partition: invalid edge count or within-block fraction");
    if (within > 0.0 && n / k < 2)
        throw Error("planted_partition: blocks need at least two vertices");

    // Block b holds vertices [b n / k, (b + 1) n / k).
    auto block_start = [n, k](Index b) { return b * n / k; };
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Index b = 0; b < k; ++b)
        for (Index i = block_start(b); i < block_start(b + 1); ++i)
            labels[static_cast<std::size_t>(i)] = static_cast<int>(b);

    Rng rng(seed);
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n_edges));
    while (static_cast<Index>(edges.size()) < n_edges) {
        const Index u = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
        Index v;
        if (rng.uniform() < within) {
            const Index b = labels[static_cast<std::size_t>(u)];
            const Index lo = block_start(b);
            const Index size = block_start(b + 1) - lo;
            v = lo + static_cast<Index>(rng.below(static_cast<std::uint64_t>(size)));
        } else {
            v = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
        }
        if (u != v)
            edges.push_back({std::min(u, v), std::max(u, v), 1.0});
    }
    // Sorted like sample()'s output; the encoder's edge pass is far more cache
    // friendly on ordered edges.
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });

    SimDraw draw;
    draw.graph = EdgeList(n, std::move(edges), false);
    draw.truth = LabelVector(std::move(labels), k);
    return draw;
}

}  // namespace gee
