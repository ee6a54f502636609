// gee: command-line front end for the graph encoder ensemble.
//
//   gee cluster    --input edges.txt --k-range 2..10
//   gee simulate   --preset sim1 --seed 7 --out-dir data
//   gee experiment table1 --mc-reps 100 --out-dir results
//   gee bench      --edges 1e4,1e5,1e6
//
// Exit status: 0 success, 1 usage error, 2 data error.

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gee/ensemble.hpp"
#include "gee/experiments.hpp"
#include "gee/graph.hpp"
#include "gee/io.hpp"
#include "gee/parallel.hpp"
#include "gee/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

struct UsageError : gee::Error {
    using gee::Error::Error;
};

/// "a..b" or a single integer.
std::vector<int> parse_range(const std::string& text)
{
    auto to_int = [&](std::string_view s) {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw UsageError("invalid cluster range '" + text + "' (expected a..b)");
        return v;
    };
    const auto dots = text.find("..");
    const int lo = to_int(std::string_view(text).substr(0, dots));
    const int hi = dots == std::string::npos ? lo : to_int(std::string_view(text).substr(dots + 2));
    if (lo < 1 || hi < lo)
        throw UsageError("invalid cluster range '" + text + "' (need 1 <= a <= b)");
    std::vector<int> ks;
    for (int k = lo; k <= hi; ++k)
        ks.push_back(k);
    return ks;
}

/// Comma-separated counts; accepts scientific notation such as 1e5.
std::vector<gee::Index> parse_counts(const std::string& text, const std::string& what)
{
    std::vector<gee::Index> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty())
            continue;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size() || v < 1.0 || v != std::floor(v))
            throw UsageError("invalid " + what + " '" + item + "'");
        out.push_back(static_cast<gee::Index>(v));
    }
    if (out.empty())
        throw UsageError(what + " list is empty");
    return out;
}

gee::TieMode parse_tie_mode(const std::string& s)
{
    if (s == "first_min")
        return gee::TieMode::FirstMin;
    if (s == "average_embedding")
        return gee::TieMode::AverageEmbedding;
    throw UsageError("unknown tie mode '" + s + "' (expected first_min or average_embedding)");
}

gee::CentroidRule parse_centroid(const std::string& s)
{
    if (s == "mean")
        return gee::CentroidRule::Mean;
    if (s == "sum")
        return gee::CentroidRule::Sum;
    throw UsageError("unknown centroid rule '" + s + "' (expected mean or sum)");
}

json summary_json(const gee::EdgeList& g, const gee::EnsembleResult& r, const gee::EnsembleConfig& cfg)
{
    json per_k = json::array();
    for (const auto& d : r.per_k)
        per_k.push_back({{"k", d.k},
                         {"mri", d.mri},
                         {"best_replicate", d.best_replicate},
                         {"iterations", d.iterations},
                         {"replicate_mri", d.replicate_mri},
                         {"replicate_iterations", d.replicate_iterations}});
    return {
        {"k_hat", r.k_hat},
        {"mri", r.mri},
        {"n_vertices", g.n_vertices()},
        {"n_edges", g.n_edges()},
        {"config",
         {{"cluster_range", cfg.cluster_range},
          {"replicates", cfg.replicates},
          {"max_iters", cfg.max_iters},
          {"seed", cfg.seed},
          {"normalize", cfg.normalize},
          {"tie_mode", cfg.tie_mode == gee::TieMode::FirstMin ? "first_min" : "average_embedding"},
          {"centroid", cfg.centroid_rule == gee::CentroidRule::Mean ? "mean" : "sum"}}},
        {"per_k", per_k},
        {"timing",
         {{"embed_seconds", r.timing.embed_seconds},
          {"kmeans_seconds", r.timing.kmeans_seconds},
          {"score_seconds", r.timing.score_seconds},
          {"total_seconds", r.timing.total_seconds}}},
    };
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw gee::Error("cannot write '" + path.string() + "'");
}

struct ClusterArgs {
    std::string input;
    std::optional<int> k;
    std::string k_range = "2..10";
    int replicates = 10;
    int max_iters = 20;
    std::uint64_t seed = 0;
    bool directed = false;
    int index_base = 1;
    std::optional<gee::Index> vertices;
    std::string delimiter;
    std::string out_dir = ".";
    std::string labels_out, embedding_out, summary_out;
    std::string format = "csv";
    bool no_normalize = false;
    std::string tie_mode = "first_min";
    std::string centroid = "mean";
    int threads = 0;
};

int run_cluster(const ClusterArgs& a)
{
    gee::ParseOptions popts;
    popts.index_base = a.index_base;
    popts.directed = a.directed;
    popts.n_vertices = a.vertices;
    if (a.delimiter.size() > 1)
        throw UsageError("delimiter must be a single character");
    if (!a.delimiter.empty())
        popts.delimiter = a.delimiter == "\\t" ? '\t' : a.delimiter[0];
    const gee::Format format = gee::parse_format(a.format);

    gee::EnsembleConfig cfg;
    cfg.cluster_range = a.k ? std::vector<int>{*a.k} : parse_range(a.k_range);
    cfg.replicates = a.replicates;
    cfg.max_iters = a.max_iters;
    cfg.seed = a.seed;
    cfg.normalize = !a.no_normalize;
    cfg.tie_mode = parse_tie_mode(a.tie_mode);
    cfg.centroid_rule = parse_centroid(a.centroid);
    cfg.threads = a.threads;
    if (a.k && *a.k < 1)
        throw UsageError("--k must be at least 1");

    const gee::EdgeList g = gee::parse_edgelist(fs::path(a.input), popts);
    const gee::EnsembleResult r = gee::fit(g, cfg);

    const std::string ext = format == gee::Format::Csv ? ".csv" : ".json";
    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    const fs::path labels = a.labels_out.empty() ? dir / ("labels" + ext) : fs::path(a.labels_out);
    const fs::path embedding = a.embedding_out.empty() ? dir / ("embedding" + ext) : fs::path(a.embedding_out);
    const fs::path summary = a.summary_out.empty() ? dir / "summary.json" : fs::path(a.summary_out);
    gee::write_labels(labels, r.labels, format, a.index_base);
    gee::write_embedding(embedding, r.embedding, format);
    const std::string text = summary_json(g, r, cfg).dump(2) + "\n";
    write_text(summary, text);
    std::cout << text;
    return 0;
}

struct SimulateArgs {
    std::string preset;
    std::optional<gee::Index> n;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::string edges_out, truth_out;
};

int run_simulate(const SimulateArgs& a)
{
    gee::SimSpec spec;
    try {
        spec = gee::preset(a.preset, a.n);
    } catch (const gee::Error& e) {
        throw UsageError(e.what());
    }
    if (spec.n < 1)
        throw UsageError("--n must be at least 1");
    spec.seed = a.seed;
    const gee::SimDraw d = gee::sample(spec);

    const std::string header = "preset=" + a.preset + " n=" + std::to_string(spec.n)
                               + " seed=" + std::to_string(a.seed) + " index_base=1";
    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    const fs::path edges = a.edges_out.empty() ? dir / (a.preset + "_edges.txt") : fs::path(a.edges_out);
    const fs::path truth = a.truth_out.empty() ? dir / (a.preset + "_truth.csv") : fs::path(a.truth_out);
    gee::write_edgelist(edges, d.graph, 1, header);

    std::ostringstream labels;
    labels << "# " << header << '\n';
    gee::write_labels(labels, d.truth, gee::Format::Csv, 1);
    write_text(truth, labels.str());
    std::cout << "wrote " << d.graph.n_edges() << " edges to " << edges.string() << " and " << spec.n
              << " labels to " << truth.string() << '\n';
    return 0;
}

struct ExperimentArgs {
    std::string name;
    int mc_reps = 100;
    std::optional<gee::Index> n;
    std::string n_sweep = "1000,2000,3000,4000,5000";
    std::uint64_t seed = 1;
    std::string sims = "sim1,sim2,sim3";
    int replicates = 10;
    int max_iters = 20;
    std::string out_dir = "results";
    std::string summarize;
    int threads = 0;
    bool quiet = false;
};

int run_experiment(const ExperimentArgs& a)
{
    if (!a.summarize.empty()) {
        std::ifstream in(a.summarize);
        if (!in)
            throw gee::DataError("cannot open '" + a.summarize + "'");
        gee::experiments::write_summary_text(std::cout,
                                             gee::experiments::summarize(gee::experiments::read_rows(in)));
        return 0;
    }
    if (a.name.empty())
        throw UsageError("an experiment name (table1, table2, fig1) or --summarize is required");

    gee::experiments::Options opts;
    try {
        opts.kind = gee::experiments::parse_kind(a.name);
    } catch (const gee::Error& e) {
        throw UsageError(e.what());
    }
    opts.mc_reps = a.mc_reps;
    opts.n = a.n;
    opts.n_sweep = parse_counts(a.n_sweep, "graph size");
    opts.seed = a.seed;
    opts.sims.clear();
    std::stringstream sims(a.sims);
    for (std::string s; std::getline(sims, s, ',');)
        if (!s.empty())
            opts.sims.push_back(s);
    opts.replicates = a.replicates;
    opts.max_iters = a.max_iters;
    opts.threads = a.threads;
    if (!a.quiet)
        opts.progress = [](const std::string& line) { std::cerr << line << '\n'; };
    try {
        opts.validate();
    } catch (const gee::Error& e) {
        throw UsageError(e.what());
    }

    const auto output = gee::experiments::run(opts);
    for (const auto& p : gee::experiments::write_outputs(output, opts, a.out_dir))
        std::cerr << "wrote " << p.string() << '\n';
    gee::experiments::write_summary_text(std::cout, output.summary);
    return 0;
}

struct BenchArgs {
    std::string edges = "1e4,1e5,1e6";
    std::string k_range = "2..10";
    int replicates = 10;
    int max_iters = 20;
    double degree = 20.0;
    int blocks = 4;
    double within = 0.8;
    std::uint64_t seed = 0;
    std::string out;
    int threads = 0;
};

int run_bench(const BenchArgs& a)
{
    const auto sweep = parse_counts(a.edges, "edge count");
    if (!(a.degree > 0.0))
        throw UsageError("--degree must be positive");
    gee::EnsembleConfig cfg;
    cfg.cluster_range = parse_range(a.k_range);
    cfg.replicates = a.replicates;
    cfg.max_iters = a.max_iters;
    cfg.seed = a.seed;
    cfg.threads = a.threads;

    std::ostringstream csv;
    csv << "# k_range=" << a.k_range << " replicates=" << a.replicates << " max_iters=" << a.max_iters
        << " degree=" << a.degree << " blocks=" << a.blocks << " within=" << a.within << " seed=" << a.seed
        << " threads=" << gee::resolve_threads(a.threads) << '\n';
    csv << "edges,vertices,wall_seconds,k_hat\n";
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        const gee::Index s = sweep[i];
        const auto n = std::max<gee::Index>(static_cast<gee::Index>(2.0 * static_cast<double>(s) / a.degree),
                                            std::max(cfg.cluster_range.back(), 2 * a.blocks));
        const gee::SimDraw d = gee::planted_partition(n, a.blocks, s, a.within, gee::derive_seed(a.seed, {i}));
        const auto t0 = std::chrono::steady_clock::now();
        const gee::EnsembleResult r = gee::fit(d.graph, cfg);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        csv << s << ',' << n << ',' << gee::format_double(wall) << ',' << r.k_hat << '\n';
        std::cerr << "edges=" << s << " vertices=" << n << " wall=" << wall << "s\n";
    }
    if (a.out.empty())
        std::cout << csv.str();
    else
        write_text(a.out, csv.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Graph encoder ensemble: embedding, clustering and cluster-count selection"};
    app.require_subcommand(1);

    ClusterArgs ca;
    auto* cluster = app.add_subcommand("cluster", "Cluster an edge-list file");
    cluster->add_option("-i,--input", ca.input, "Edge list: 'u v [w]' per line")->required();
    auto* k_opt = cluster->add_option("-k,--k", ca.k, "Fixed number of clusters");
    cluster->add_option("--k-range", ca.k_range, "Candidate cluster counts a..b")->excludes(k_opt);
    cluster->add_option("-r,--replicates", ca.replicates, "Random restarts per k")->capture_default_str();
    cluster->add_option("-m,--max-iters", ca.max_iters, "Embed/cluster iterations")->capture_default_str();
    cluster->add_option("--seed", ca.seed)->capture_default_str();
    cluster->add_flag("--directed", ca.directed);
    cluster->add_option("--index-base", ca.index_base)->check(CLI::IsMember({0, 1}))->capture_default_str();
    cluster->add_option("--vertices", ca.vertices, "Vertex count (default: largest index)");
    cluster->add_option("--delimiter", ca.delimiter, "Field separator (default: whitespace or comma)");
    cluster->add_option("--out-dir", ca.out_dir)->capture_default_str();
    cluster->add_option("--labels-out", ca.labels_out);
    cluster->add_option("--embedding-out", ca.embedding_out);
    cluster->add_option("--summary-out", ca.summary_out);
    cluster->add_option("--format", ca.format, "csv or json")->capture_default_str();
    cluster->add_flag("--no-normalize", ca.no_normalize, "Skip row normalization");
    cluster->add_option("--tie-mode", ca.tie_mode, "first_min or average_embedding")->capture_default_str();
    cluster->add_option("--centroid", ca.centroid, "mean or sum")->capture_default_str();
    cluster->add_option("--threads", ca.threads, "0: GEE_NUM_THREADS or all cores");

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Sample a benchmark block-model graph");
    simulate->add_option("-p,--preset", sa.preset, "sim1, sim2 or sim3")->required();
    simulate->add_option("-n,--n", sa.n, "Vertex count (default 3000)");
    simulate->add_option("--seed", sa.seed)->capture_default_str();
    simulate->add_option("--out-dir", sa.out_dir)->capture_default_str();
    simulate->add_option("--edges-out", sa.edges_out);
    simulate->add_option("--truth-out", sa.truth_out);

    ExperimentArgs ea;
    auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo experiment");
    experiment->add_option("name", ea.name, "table1, table2 or fig1");
    experiment->add_option("--mc-reps", ea.mc_reps, "Graph draws per setting")->capture_default_str();
    experiment->add_option("-n,--n", ea.n, "Graph size (replaces the fig1 sweep)");
    experiment->add_option("--n-sweep", ea.n_sweep, "fig1 graph sizes")->capture_default_str();
    experiment->add_option("--seed", ea.seed)->capture_default_str();
    experiment->add_option("--sims", ea.sims)->capture_default_str();
    experiment->add_option("-r,--replicates", ea.replicates)->capture_default_str();
    experiment->add_option("-m,--max-iters", ea.max_iters)->capture_default_str();
    experiment->add_option("--out-dir", ea.out_dir)->capture_default_str();
    experiment->add_option("--summarize", ea.summarize, "Recompute the summary of a replicates CSV");
    experiment->add_option("--threads", ea.threads);
    experiment->add_flag("-q,--quiet", ea.quiet, "No progress lines");

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "Time the ensemble over an edge-count sweep");
    bench->add_option("--edges", ba.edges, "Comma-separated edge counts")->capture_default_str();
    bench->add_option("--k-range", ba.k_range)->capture_default_str();
    bench->add_option("-r,--replicates", ba.replicates)->capture_default_str();
    bench->add_option("-m,--max-iters", ba.max_iters)->capture_default_str();
    bench->add_option("--degree", ba.degree, "Average degree; n = 2 s / degree")->capture_default_str();
    bench->add_option("--blocks", ba.blocks)->capture_default_str();
    bench->add_option("--within", ba.within, "Within-block edge fraction")->capture_default_str();
    bench->add_option("--seed", ba.seed)->capture_default_str();
    bench->add_option("-o,--out", ba.out, "CSV path (default stdout)");
    bench->add_option("--threads", ba.threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (cluster->parsed())
            return run_cluster(ca);
        if (simulate->parsed())
            return run_simulate(sa);
        if (experiment->parsed())
            return run_experiment(ea);
        return run_bench(ba);
    } catch (const gee::DataError& e) {
        std::cerr << "gee: " << e.what() << '\n';
        return kDataError;
    } catch (const UsageError& e) {
        std::cerr << "gee: " << e.what() << '\n';
        return kUsageError;
    } catch (const gee::Error& e) {
        std::cerr << "gee: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "gee: " << e.what() << '\n';
        return kDataError;
    }
}
