#include "gee/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>

#include "gee/ensemble.hpp"
#include "gee/io.hpp"
#include "gee/parallel.hpp"
#include "gee/quality.hpp"
#include "gee/rng.hpp"
#include "gee/simgen.hpp"

namespace gee::experiments {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::string_view kRowColumns
    = "sim,n,method,draw,seed,k_true,k_hat,k_hat_silhouette,ari,mri,iterations,class_counts";

std::string join_counts(const LabelVector& y)
{
    std::string out;
    for (Index c : class_counts(y)) {
        if (!out.empty())
            out += ';';
        out += std::to_string(c);
    }
    return out;
}

EnsembleConfig base_config(const Options& opts, std::uint64_t draw_seed)
{
    EnsembleConfig cfg;
    cfg.seed = derive_seed(draw_seed, {1});
    cfg.max_iters = opts.max_iters;
    cfg.replicates = opts.replicates;
    cfg.threads = 1;
    return cfg;
}

Row make_row(const std::string& sim, Index n, std::string method, int draw, std::uint64_t seed,
             const SimDraw& d, const EnsembleResult& fit_result)
{
    Row row;
    row.sim = sim;
    row.n = n;
    row.method = std::move(method);
    row.draw = draw;
    row.seed = seed;
    row.k_true = d.truth.k;
    row.k_hat = fit_result.k_hat;
    row.ari = ari(fit_result.labels, d.truth);
    row.mri = fit_result.mri;
    for (const auto& diag : fit_result.per_k)
        if (diag.k == fit_result.k_hat)
            row.iterations = diag.iterations;
    row.class_counts = join_counts(d.truth);
    return row;
}

struct ItemResult {
    std::vector<Row> rows;
    std::vector<CurveRow> curves;
};

ItemResult run_item(const Options& opts, std::size_t sim_index, Index n, int draw, bool with_curves)
{
    const std::string& sim = opts.sims[sim_index];
    const std::uint64_t seed = draw_seed(opts, sim_index, n, draw);
    SimSpec spec = preset(sim, n);
    spec.seed = seed;
    const SimDraw d = sample(spec);
    const int k = d.truth.k;

    ItemResult out;
    EnsembleConfig cfg = base_config(opts, seed);
    switch (opts.kind) {
    case Kind::Table1:
        cfg.replicates = 1;
        cfg.cluster_range = {k};
        out.rows.push_back(make_row(sim, n, "gee", draw, seed, d, fit(d.graph, cfg)));
        cfg.normalize = false;
        out.rows.push_back(make_row(sim, n, "gee_no_norm", draw, seed, d, fit(d.graph, cfg)));
        break;
    case Kind::Table2:
        cfg.cluster_range = {k};
        out.rows.push_back(make_row(sim, n, "r" + std::to_string(opts.replicates), draw, seed, d,
                                    fit(d.graph, cfg)));
        cfg.replicates = 1;
        out.rows.push_back(make_row(sim, n, "r1", draw, seed, d, fit(d.graph, cfg)));
        break;
    case Kind::Fig1: {
        cfg.cluster_range.clear();
        for (int c = opts.k_min; c <= opts.k_max; ++c)
            cfg.cluster_range.push_back(c);
        cfg.retain_candidates = with_curves;
        const EnsembleResult result = fit(d.graph, cfg);
        Row row = make_row(sim, n, "mri", draw, seed, d, result);
        if (with_curves) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& diag : result.per_k) {
                CurveRow curve{sim, n, draw, seed, diag.k, diag.mri, kNaN};
                try {
                    const Embedding<double> z = embed(d.graph, *diag.labels, cfg.normalize);
                    curve.silhouette = silhouette(z.values, *diag.labels);
                } catch (const DataError&) {
                    // fewer than two occupied clusters
                }
                // First maximum: ties favour the smaller k.
                if (!std::isnan(curve.silhouette) && curve.silhouette > best) {
                    best = curve.silhouette;
                    row.k_hat_silhouette = diag.k;
                }
                out.curves.push_back(curve);
            }
        }
        out.rows.push_back(std::move(row));
        break;
    }
    }
    return out;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep))
        fields.push_back(field);
    if (!line.empty() && line.back() == sep)
        fields.emplace_back();
    return fields;
}

template <typename T>
T parse_field(const std::string& text, std::size_t line_no)
{
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw DataError("line " + std::to_string(line_no) + ": cannot parse '" + text + "'");
    return value;
}

void write_header(std::ostream& out, std::string_view header)
{
    if (!header.empty())
        out << header;
}

std::string format_fixed(double value, int digits)
{
    if (std::isnan(value))
        return "-";
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << value;
    return s.str();
}

}  // namespace

Kind parse_kind(std::string_view name)
{
    if (name == "table1")
        return Kind::Table1;
    if (name == "table2")
        return Kind::Table2;
    if (name == "fig1")
        return Kind::Fig1;
    throw Error("unknown experiment '" + std::string(name) + "' (expected table1, table2 or fig1)");
}

std::string_view kind_name(Kind kind)
{
    switch (kind) {
    case Kind::Table1: return "table1";
    case Kind::Table2: return "table2";
    case Kind::Fig1: return "fig1";
    }
    return "unknown";
}

void Options::validate() const
{
    if (mc_reps < 1)
        throw Error("mc_reps must be at least 1");
    if (replicates < 1 || max_iters < 1)
        throw Error("replicates and max_iters must be at least 1");
    if (sims.empty())
        throw Error("no simulations selected");
    for (const auto& s : sims)
        preset(s);
    if (k_min < 1 || k_max < k_min)
        throw Error("cluster range must satisfy 1 <= k_min <= k_max");
    const auto ns = sizes();
    if (ns.empty())
        throw Error("no graph sizes selected");
    for (Index n : ns)
        if (n < std::max(k_max, 5))
            throw Error("graph size " + std::to_string(n) + " is too small");
}

std::vector<Index> Options::sizes() const
{
    if (n)
        return {*n};
    if (kind == Kind::Fig1)
        return n_sweep;
    return {preset("sim1").n};
}

std::uint64_t draw_seed(const Options& opts, std::size_t sim_index, Index n, int draw)
{
    return derive_seed(opts.seed, {static_cast<std::uint64_t>(opts.kind), sim_index,
                                   static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(draw)});
}

Output run(const Options& opts)
{
    opts.validate();
    const auto ns = opts.sizes();
    const Index largest = *std::max_element(ns.begin(), ns.end());

    struct Item {
        std::size_t sim;
        Index n;
        int draw;
    };
    std::vector<Item> items;
    for (std::size_t s = 0; s < opts.sims.size(); ++s)
        for (Index n : ns)
            for (int d = 0; d < opts.mc_reps; ++d)
                items.push_back({s, n, d});

    std::vector<ItemResult> results(items.size());
    std::mutex progress_mutex;
    std::size_t finished = 0;
    parallel_for(static_cast<Index>(items.size()), resolve_threads(opts.threads), [&](Index i) {
        const Item& it = items[static_cast<std::size_t>(i)];
        const bool curves = opts.kind == Kind::Fig1 && it.n == largest;
        results[static_cast<std::size_t>(i)] = run_item(opts, it.sim, it.n, it.draw, curves);
        if (opts.progress) {
            std::lock_guard lock(progress_mutex);
            ++finished;
            opts.progress(std::string(kind_name(opts.kind)) + " " + opts.sims[it.sim] + " n="
                          + std::to_string(it.n) + " draw " + std::to_string(it.draw + 1) + " ("
                          + std::to_string(finished) + "/" + std::to_string(items.size()) + ")");
        }
    });

    Output out;
    for (auto& r : results) {
        std::move(r.rows.begin(), r.rows.end(), std::back_inserter(out.rows));
        std::move(r.curves.begin(), r.curves.end(), std::back_inserter(out.curves));
    }
    out.summary = summarize(out.rows);
    return out;
}

std::vector<SummaryRow> summarize(const std::vector<Row>& rows)
{
    struct Group {
        SummaryRow summary;
        std::vector<const Row*> members;
    };
    std::vector<Group> groups;
    for (const auto& row : rows) {
        auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
            return g.summary.sim == row.sim && g.summary.n == row.n && g.summary.method == row.method;
        });
        if (it == groups.end()) {
            groups.push_back({});
            it = std::prev(groups.end());
            it->summary.sim = row.sim;
            it->summary.n = row.n;
            it->summary.method = row.method;
        }
        it->members.push_back(&row);
    }

    std::vector<SummaryRow> out;
    for (auto& g : groups) {
        SummaryRow s = g.summary;
        const auto count = static_cast<double>(g.members.size());
        s.draws = static_cast<int>(g.members.size());
        double sum = 0.0;
        double hits = 0.0;
        double sil_hits = 0.0;
        double sil_two = 0.0;
        bool has_sil = false;
        for (const Row* r : g.members) {
            sum += r->ari;
            hits += r->k_hat == r->k_true ? 1.0 : 0.0;
            if (r->k_hat_silhouette > 0) {
                has_sil = true;
                sil_hits += r->k_hat_silhouette == r->k_true ? 1.0 : 0.0;
                sil_two += r->k_hat_silhouette == 2 ? 1.0 : 0.0;
            }
        }
        s.ari_mean = sum / count;
        if (g.members.size() > 1) {
            double ss = 0.0;
            for (const Row* r : g.members)
                ss += (r->ari - s.ari_mean) * (r->ari - s.ari_mean);
            s.ari_std = std::sqrt(ss / (count - 1.0));
        } else {
            s.ari_std = kNaN;
        }
        s.k_accuracy = hits / count;
        s.silhouette_accuracy = has_sil ? sil_hits / count : kNaN;
        s.silhouette_two = has_sil ? sil_two / count : kNaN;
        s.low_power = s.draws < kLowPowerDraws;
        out.push_back(std::move(s));
    }
    return out;
}

std::string config_header(const Options& opts)
{
    std::ostringstream h;
    h << "# experiment=" << kind_name(opts.kind) << '\n';
    h << "# mc_reps=" << opts.mc_reps << '\n';
    h << "# seed=" << opts.seed << '\n';
    h << "# sims=";
    for (std::size_t i = 0; i < opts.sims.size(); ++i)
        h << (i ? ";" : "") << opts.sims[i];
    h << '\n';
    h << "# sizes=";
    const auto ns = opts.sizes();
    for (std::size_t i = 0; i < ns.size(); ++i)
        h << (i ? ";" : "") << ns[i];
    h << '\n';
    h << "# replicates=" << opts.replicates << '\n';
    h << "# max_iters=" << opts.max_iters << '\n';
    if (opts.kind == Kind::Fig1)
        h << "# k_range=" << opts.k_min << ".." << opts.k_max << '\n';
    h << "# draw_seed=derive_seed(seed,{kind,sim_index,n,draw}) fit_seed=derive_seed(draw_seed,{1})\n";
    return h.str();
}

void write_rows(std::ostream& out, const std::vector<Row>& rows, std::string_view header)
{
    write_header(out, header);
    out << kRowColumns << '\n';
    for (const auto& r : rows)
        out << r.sim << ',' << r.n << ',' << r.method << ',' << r.draw << ',' << r.seed << ','
            << r.k_true << ',' << r.k_hat << ',' << r.k_hat_silhouette << ',' << format_double(r.ari)
            << ',' << format_double(r.mri) << ',' << r.iterations << ',' << r.class_counts << '\n';
}

std::vector<Row> read_rows(std::istream& in)
{
    std::vector<Row> rows;
    std::string line;
    std::size_t line_no = 0;
    bool seen_columns = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line.front() == '#')
            continue;
        if (!seen_columns) {
            if (line != kRowColumns)
                throw DataError("line " + std::to_string(line_no) + ": unexpected column header");
            seen_columns = true;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 12)
            throw DataError("line " + std::to_string(line_no) + ": expected 12 fields, found "
                            + std::to_string(f.size()));
        Row r;
        r.sim = f[0];
        r.n = parse_field<Index>(f[1], line_no);
        r.method = f[2];
        r.draw = parse_field<int>(f[3], line_no);
        r.seed = parse_field<std::uint64_t>(f[4], line_no);
        r.k_true = parse_field<int>(f[5], line_no);
        r.k_hat = parse_field<int>(f[6], line_no);
        r.k_hat_silhouette = parse_field<int>(f[7], line_no);
        r.ari = parse_field<double>(f[8], line_no);
        r.mri = parse_field<double>(f[9], line_no);
        r.iterations = parse_field<int>(f[10], line_no);
        r.class_counts = f[11];
        rows.push_back(std::move(r));
    }
    if (!seen_columns)
        throw DataError("no replicate table found");
    return rows;
}

void write_curves(std::ostream& out, const std::vector<CurveRow>& curves, std::string_view header)
{
    write_header(out, header);
    out << "sim,n,draw,seed,k,mri,silhouette\n";
    for (const auto& c : curves)
        out << c.sim << ',' << c.n << ',' << c.draw << ',' << c.seed << ',' << c.k << ','
            << format_double(c.mri) << ',' << format_double(c.silhouette) << '\n';
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary, std::string_view header)
{
    write_header(out, header);
    out << "sim,n,method,draws,ari_mean,ari_std,k_accuracy,silhouette_accuracy,silhouette_k2,low_power\n";
    for (const auto& s : summary)
        out << s.sim << ',' << s.n << ',' << s.method << ',' << s.draws << ',' << format_double(s.ari_mean)
            << ',' << format_double(s.ari_std) << ',' << format_double(s.k_accuracy) << ','
            << format_double(s.silhouette_accuracy) << ',' << format_double(s.silhouette_two) << ','
            << (s.low_power ? 1 : 0) << '\n';
}

void write_summary_text(std::ostream& out, const std::vector<SummaryRow>& summary)
{
    out << std::left << std::setw(6) << "sim" << std::right << std::setw(7) << "n" << "  " << std::left
        << std::setw(12) << "method" << std::right << std::setw(6) << "draws" << std::setw(18)
        << "ARI mean +- std" << std::setw(8) << "K acc" << std::setw(9) << "SS acc" << std::setw(8)
        << "SS K=2" << '\n';
    for (const auto& s : summary) {
        out << std::left << std::setw(6) << s.sim << std::right << std::setw(7) << s.n << "  " << std::left
            << std::setw(12) << s.method << std::right << std::setw(6) << s.draws << std::setw(18)
            << (format_fixed(s.ari_mean, 3) + " +- " + format_fixed(s.ari_std, 3)) << std::setw(8)
            << format_fixed(s.k_accuracy, 2) << std::setw(9) << format_fixed(s.silhouette_accuracy, 2)
            << std::setw(8) << format_fixed(s.silhouette_two, 2);
        if (s.low_power)
            out << "  (low power: fewer than " << kLowPowerDraws << " draws)";
        out << '\n';
    }
}

std::vector<std::filesystem::path> write_outputs(const Output& output, const Options& opts,
                                                 const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    const std::string stem(kind_name(opts.kind));
    const std::string header = config_header(opts);
    std::vector<std::filesystem::path> written;
    auto open = [&](const std::string& name) {
        written.push_back(dir / name);
        std::ofstream f(written.back());
        if (!f)
            throw Error("cannot write '" + written.back().string() + "'");
        return f;
    };
    {
        auto f = open(stem + "_replicates.csv");
        write_rows(f, output.rows, header);
    }
    {
        auto f = open(stem + "_summary.csv");
        write_summary_csv(f, output.summary, header);
    }
    {
        auto f = open(stem + "_summary.txt");
        write_summary_text(f, output.summary);
    }
    if (opts.kind == Kind::Fig1) {
        auto f = open(stem + "_curves.csv");
        write_curves(f, output.curves, header);
    }
    return written;
}

}  // namespace gee::experiments
