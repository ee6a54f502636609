// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// if any fails.
//
//   gee_acceptance                 all criteria
//   gee_acceptance --only 4,5,6    a subset
//
// Criteria 1-3 run the full 100-draw Monte Carlo protocols and take about an
// hour on one core; 7 times the CLI bench sweep.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <CLI11.hpp>

#include "gee/encoder.hpp"
#include "gee/ensemble.hpp"
#include "gee/experiments.hpp"
#include "gee/kmeans.hpp"
#include "gee/quality.hpp"
#include "gee/simgen.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
namespace ex = gee::experiments;
using gee::Index;

namespace {

/// Collects sub-check outcomes and detail lines for one criterion.
class Check {
public:
    void expect(bool ok, const std::string& what)
    {
        ok_ = ok_ && ok;
        details_.push_back(std::string(ok ? "    ok    " : "    FAIL  ") + what);
    }
    void note(const std::string& what) { details_.push_back("    " + what); }
    bool ok() const { return ok_; }
    const std::vector<std::string>& details() const { return details_; }

private:
    bool ok_ = true;
    std::vector<std::string> details_;
};

std::string fmt(double v, int precision = 3)
{
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

std::string sci(double v)
{
    std::ostringstream s;
    s << std::scientific << std::setprecision(2) << v;
    return s.str();
}

const ex::SummaryRow& find(const std::vector<ex::SummaryRow>& summary, const std::string& sim,
                           const std::string& method)
{
    for (const auto& s : summary)
        if (s.sim == sim && s.method == method)
            return s;
    throw gee::Error("no summary row for " + sim + "/" + method);
}

ex::Output run_protocol(ex::Kind kind, std::optional<Index> n, const fs::path& out_dir)
{
    ex::Options o;
    o.kind = kind;
    o.mc_reps = 100;
    o.n = n;
    o.threads = 0;
    const auto start = std::chrono::steady_clock::now();
    o.progress = [&, last = std::chrono::steady_clock::now()](const std::string& line) mutable {
        const auto now = std::chrono::steady_clock::now();
        if (now - last > std::chrono::seconds(60)) {
            last = now;
            std::cerr << "[" << ex::kind_name(kind) << " "
                      << std::chrono::duration_cast<std::chrono::seconds>(now - start).count() << "s] " << line
                      << '\n';
        }
    };
    ex::Output out = ex::run(o);
    ex::write_outputs(out, o, out_dir);
    return out;
}

const std::array<std::string, 3> kSims = {"sim1", "sim2", "sim3"};

Check table1(const fs::path& out_dir)
{
    Check c;
    const auto out = run_protocol(ex::Kind::Table1, std::nullopt, out_dir);
    const double gee_target[] = {0.91, 0.73, 0.78};
    const double raw_target[] = {0.10, 0.08, 0.06};
    for (std::size_t i = 0; i < kSims.size(); ++i) {
        const auto& g = find(out.summary, kSims[i], "gee");
        const auto& r = find(out.summary, kSims[i], "gee_no_norm");
        c.expect(std::abs(g.ari_mean - gee_target[i]) <= 0.05,
                 kSims[i] + " normalized ARI " + fmt(g.ari_mean) + " vs " + fmt(gee_target[i], 2) + " +/- 0.05");
        c.expect(std::abs(r.ari_mean - raw_target[i]) <= 0.06,
                 kSims[i] + " unnormalized ARI " + fmt(r.ari_mean) + " vs " + fmt(raw_target[i], 2) + " +/- 0.06");
    }
    return c;
}

Check table2(const fs::path& out_dir)
{
    Check c;
    const auto out = run_protocol(ex::Kind::Table2, std::nullopt, out_dir);
    const double target[] = {0.91, 0.79, 0.89};
    for (std::size_t i = 0; i < kSims.size(); ++i) {
        const auto& r10 = find(out.summary, kSims[i], "r10");
        c.expect(std::abs(r10.ari_mean - target[i]) <= 0.05,
                 kSims[i] + " r=10 ARI " + fmt(r10.ari_mean) + " vs " + fmt(target[i], 2) + " +/- 0.05");
        c.expect(r10.ari_std <= 0.03, kSims[i] + " r=10 std " + fmt(r10.ari_std) + " <= 0.03");
        const auto& r1 = find(out.summary, kSims[i], "r1");
        c.note(kSims[i] + " r=1 ARI " + fmt(r1.ari_mean) + " std " + fmt(r1.ari_std));
    }
    const auto& r1 = find(out.summary, "sim3", "r1");
    c.expect(r1.ari_std >= 0.06, "sim3 r=1 std " + fmt(r1.ari_std) + " >= 0.06");
    return c;
}

Check fig1(const fs::path& out_dir)
{
    Check c;
    const auto out = run_protocol(ex::Kind::Fig1, Index{5000}, out_dir);
    for (const auto& sim : kSims) {
        const auto& s = find(out.summary, sim, "mri");
        c.expect(s.k_accuracy >= 0.9, sim + " MRI selects true K in " + fmt(s.k_accuracy, 2) + " of draws (>= 0.9)");
        c.note(sim + " silhouette selects true K in " + fmt(s.silhouette_accuracy, 2) + ", K=2 in "
               + fmt(s.silhouette_two, 2));
    }
    const auto& s3 = find(out.summary, "sim3", "mri");
    c.expect(s3.silhouette_two > 0.5, "sim3 silhouette selects K=2 in " + fmt(s3.silhouette_two, 2) + " (> 0.5)");
    return c;
}

Check worked_example()
{
    Check c;
    const std::vector<double> mris{0, 0, 0, 0.1, 0.2};
    const std::vector<int> ks{2, 3, 4, 5, 6};
    const int k_hat = ks[gee::select_cluster_size(mris, ks)];
    c.expect(k_hat == 4, "MRIs [0, 0, 0, 0.1, 0.2] over K = 2..6 select K = " + std::to_string(k_hat));
    return c;
}

Check oracle_equivalence()
{
    Check c;
    gee::Rng rng(20240);
    double worst_embed = 0.0;
    int mri_mismatch = 0, ari_mismatch = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = 1 + static_cast<Index>(rng.below(50));
        const int k = 1 + static_cast<int>(rng.below(6));
        oracle::GraphOptions opt;
        opt.density = 0.02 + 0.5 * rng.uniform();
        opt.directed = trial % 2 == 1;
        opt.weighted = trial % 3 != 0;
        opt.self_loops = trial % 5 == 0;
        opt.multi_edges = trial % 7 == 0;
        const gee::EdgeList g = oracle::random_graph(n, opt, rng);
        const gee::LabelVector y = oracle::any_labels(n, k, rng);
        const auto z = gee::one_hot_embed(g, y);
        const Eigen::MatrixXd dense = oracle::dense_embedding(g, y);
        worst_embed = std::max(worst_embed, (Eigen::MatrixXd(z.values) - dense).cwiseAbs().maxCoeff());

        const auto zn = gee::normalize(z);
        if (gee::mri(zn.values, y) != oracle::mri(Eigen::MatrixXd(zn.values), y))
            ++mri_mismatch;
        const gee::LabelVector other = oracle::any_labels(n, 1 + static_cast<int>(rng.below(6)), rng);
        if (gee::ari(y, other) != oracle::ari(y, other))
            ++ari_mismatch;
    }
    c.expect(worst_embed <= 1e-12, "embedding max deviation from dense A*W " + sci(worst_embed) + " (<= 1e-12)");
    c.expect(mri_mismatch == 0, "MRI exact mismatches " + std::to_string(mri_mismatch) + " / 200");
    c.expect(ari_mismatch == 0, "ARI exact mismatches " + std::to_string(ari_mismatch) + " / 200");
    return c;
}

Check properties()
{
    Check c;
    gee::Rng rng(31337);

    bool unit = true, idempotent = true;
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = 1 + static_cast<Index>(rng.below(40));
        const Index d = 1 + static_cast<Index>(rng.below(8));
        gee::Embedding<double> z;
        z.values.resize(n, d);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < d; ++j)
                z.values(i, j) = rng.below(4) == 0 ? 0.0 : 20.0 * (rng.uniform() - 0.5);
        const auto once = gee::normalize(z);
        const auto twice = gee::normalize(once);
        for (Index i = 0; i < n; ++i) {
            const double norm = once.values.row(i).norm();
            const bool zero = z.values.row(i).isZero(0.0);
            unit = unit && (zero ? norm == 0.0 : std::abs(norm - 1.0) <= 1e-9);
        }
        idempotent = idempotent && (twice.values - once.values).cwiseAbs().maxCoeff() <= 1e-12;
    }
    c.expect(unit, "normalized rows have unit norm, zero rows stay zero");
    c.expect(idempotent, "normalization is idempotent");

    bool mri_range = true;
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = 1 + static_cast<Index>(rng.below(40));
        gee::RowMatrix<double> z(n, 3);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < 3; ++j)
                z(i, j) = rng.uniform();
        const double m = gee::mri(z, oracle::any_labels(n, 1 + static_cast<int>(rng.below(5)), rng));
        mri_range = mri_range && m >= 0.0 && m <= 1.0;
    }
    c.expect(mri_range, "MRI lies in [0, 1]");

    bool ari_props = true;
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = 2 + static_cast<Index>(rng.below(60));
        const auto a = oracle::any_labels(n, 1 + static_cast<int>(rng.below(5)), rng);
        const auto b = oracle::any_labels(n, 1 + static_cast<int>(rng.below(5)), rng);
        gee::LabelVector pa = a;
        std::vector<int> map(static_cast<std::size_t>(a.k));
        for (int i = 0; i < a.k; ++i)
            map[static_cast<std::size_t>(i)] = i;
        std::shuffle(map.begin(), map.end(), rng.engine());
        for (auto& l : pa.labels)
            l = map[static_cast<std::size_t>(l)];
        ari_props = ari_props && gee::ari(a, b) == gee::ari(b, a) && gee::ari(pa, b) == gee::ari(a, b)
                    && gee::ari(a, a) == 1.0;
    }
    c.expect(ari_props, "ARI symmetric, label-permutation invariant, self-identity 1");

    bool sse_monotone = true;
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 10 + static_cast<Index>(rng.below(200));
        gee::RowMatrix<double> x(n, 4);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < 4; ++j)
                x(i, j) = rng.uniform();
        const auto r = gee::kmeans_detailed(x, gee::KMeansConfig{1 + static_cast<int>(rng.below(8)), 100, 1e-12,
                                                                 rng.next()});
        for (std::size_t t = 1; t < r.sse_trace.size(); ++t)
            sse_monotone = sse_monotone && r.sse_trace[t] <= r.sse_trace[t - 1] * (1.0 + 1e-12) + 1e-15;
    }
    c.expect(sse_monotone, "k-means within-cluster SSE never increases");

    double worst_order = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        oracle::GraphOptions opt;
        opt.weighted = true;
        opt.directed = trial % 2 == 0;
        const Index n = 2 + static_cast<Index>(rng.below(48));
        const gee::EdgeList g = oracle::random_graph(n, opt, rng);
        const auto y = oracle::any_labels(n, 4, rng);
        std::vector<gee::Edge> shuffled = g.edges();
        std::shuffle(shuffled.begin(), shuffled.end(), rng.engine());
        const gee::EdgeList h(n, shuffled, g.directed());
        worst_order = std::max(
            worst_order, (gee::one_hot_embed(g, y).values - gee::one_hot_embed(h, y).values).cwiseAbs().maxCoeff());
    }
    c.expect(worst_order <= 1e-12, "embedding invariant to edge order (max deviation " + sci(worst_order) + ")");

    gee::SimSpec spec = gee::preset("sim2", 600);
    spec.seed = 2024;
    const auto draw = gee::sample(spec);
    gee::EnsembleConfig cfg;
    cfg.cluster_range = {2, 3, 4, 5, 6};
    cfg.replicates = 5;
    cfg.seed = 11;
    cfg.threads = 1;
    const auto base = gee::fit(draw.graph, cfg);
    bool deterministic = true;
    for (int threads : {1, 2, 3, 8}) {
        cfg.threads = threads;
        const auto r = gee::fit(draw.graph, cfg);
        deterministic = deterministic && r.labels == base.labels && r.k_hat == base.k_hat && r.mri == base.mri
                        && r.embedding.values == base.embedding.values;
    }
    c.expect(deterministic, "fit is bit-identical for 1, 2, 3 and 8 threads");
    return c;
}

Check linearity(const fs::path& out_dir)
{
    Check c;
    const fs::path csv = out_dir / "bench.csv";
    const std::string cmd = std::string(GEE_CLI_PATH) + " bench --edges 1e4,1e5,1e6 --k-range 2..10 -r 10 -m 20 -o "
                            + csv.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    if (!WIFEXITED(raw) || WEXITSTATUS(raw) != 0) {
        c.expect(false, "bench command failed");
        return c;
    }
    std::ifstream in(csv);
    std::string line;
    std::vector<std::pair<double, double>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("edges", 0) == 0)
            continue;
        std::stringstream s(line);
        std::string edges, vertices, wall;
        std::getline(s, edges, ',');
        std::getline(s, vertices, ',');
        std::getline(s, wall, ',');
        rows.emplace_back(std::stod(edges), std::stod(wall));
    }
    if (rows.size() != 3) {
        c.expect(false, "expected 3 bench rows, found " + std::to_string(rows.size()));
        return c;
    }
    for (std::size_t i = 0; i < rows.size(); ++i)
        c.note(fmt(rows[i].first, 0) + " edges: " + fmt(rows[i].second, 2) + " s");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double ratio = rows[i].second / rows[i - 1].second;
        c.expect(ratio < 15.0, "time ratio " + fmt(rows[i - 1].first, 0) + " -> " + fmt(rows[i].first, 0) + " edges "
                                   + fmt(ratio, 2) + " (< 15)");
    }
    return c;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    std::string out_dir = "acceptance_results";
    app.add_option("--only", only, "Criteria to run (1-7)")->delimiter(',')->check(CLI::Range(1, 7));
    app.add_option("--out-dir", out_dir, "Where experiment tables are written");
    CLI11_PARSE(app, argc, argv);

    const std::set<int> selected = only.empty() ? std::set<int>{1, 2, 3, 4, 5, 6, 7}
                                                : std::set<int>(only.begin(), only.end());
    fs::create_directories(out_dir);

    struct Criterion {
        int id;
        const char* name;
        std::function<Check()> run;
    };
    const fs::path dir = out_dir;
    const std::vector<Criterion> criteria = {
        {1, "normalization ablation (table1)", [&] { return table1(dir); }},
        {2, "ensemble ablation (table2)", [&] { return table2(dir); }},
        {3, "cluster size estimation (fig1, n=5000)", [&] { return fig1(dir); }},
        {4, "size selection worked example", worked_example},
        {5, "oracle equivalence", oracle_equivalence},
        {6, "property suites", properties},
        {7, "linearity gate", [&] { return linearity(dir); }},
    };

    int failed = 0;
    for (const auto& cr : criteria) {
        if (!selected.count(cr.id))
            continue;
        const auto start = std::chrono::steady_clock::now();
        Check c;
        try {
            c = cr.run();
        } catch (const std::exception& e) {
            c.expect(false, std::string("threw: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (c.ok() ? "PASS" : "FAIL") << "  criterion " << cr.id << ": " << cr.name << "  ("
                  << fmt(secs, 1) << " s)\n";
        for (const auto& d : c.details())
            std::cout << d << '\n';
        std::cout.flush();
        failed += c.ok() ? 0 : 1;
    }
    std::cout << (failed ? "FAILED " : "ALL PASSED ") << failed << " criteria failing\n";
    return failed ? 1 : 0;
}
