#ifndef GEE_EXPERIMENTS_HPP
#define GEE_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gee/types.hpp"

namespace gee::experiments {

/// Monte Carlo protocols:
///   table1  r = 1 at the true k, normalized ("gee") vs raw ("gee_no_norm")
///   table2  true k, r = 10 ("r10") vs r = 1 ("r1")
///   fig1    k chosen from 2..10 by MRI and by silhouette, over a sweep of n
enum class Kind { Table1, Table2, Fig1 };

Kind parse_kind(std::string_view name);
std::string_view kind_name(Kind kind);

struct Options {
    Kind kind = Kind::Table1;
    int mc_reps = 100;
    /// Overrides the preset size (and, for fig1, replaces the sweep).
    std::optional<Index> n;
    std::vector<Index> n_sweep = {1000, 2000, 3000, 4000, 5000};
    std::uint64_t seed = 1;
    std::vector<std::string> sims = {"sim1", "sim2", "sim3"};
    int replicates = 10;
    int max_iters = 20;
    int k_min = 2;
    int k_max = 10;
    /// Monte Carlo draws run in parallel; each fit is single-threaded.
    int threads = 0;
    /// Called after every finished draw with a one-line status.
    std::function<void(const std::string&)> progress;

    void validate() const;
    /// Sizes actually simulated.
    std::vector<Index> sizes() const;
};

/// One fitted configuration on one graph draw.
struct Row {
    std::string sim;
    Index n = 0;
    std::string method;
    int draw = 0;
    /// Seed of the graph draw; the fit uses derive_seed(seed, {1}).
    std::uint64_t seed = 0;
    int k_true = 0;
    int k_hat = 0;
    /// 0 when not computed.
    int k_hat_silhouette = 0;
    double ari = 0.0;
    double mri = 0.0;
    int iterations = 0;
    /// Realized class sizes of the draw, separated by ';'.
    std::string class_counts;
};

/// Per-k selection curve for one draw (fig1, largest n only).
struct CurveRow {
    std::string sim;
    Index n = 0;
    int draw = 0;
    std::uint64_t seed = 0;
    int k = 0;
    double mri = 0.0;
    /// NaN when fewer than two clusters are occupied.
    double silhouette = 0.0;
};

struct SummaryRow {
    std::string sim;
    Index n = 0;
    std::string method;
    int draws = 0;
    double ari_mean = 0.0;
    /// Sample standard deviation; NaN with a single draw.
    double ari_std = 0.0;
    /// Fraction of draws with k_hat == k_true.
    double k_accuracy = 0.0;
    /// Fraction with k_hat_silhouette == k_true, and == 2; NaN if not computed.
    double silhouette_accuracy = 0.0;
    double silhouette_two = 0.0;
    bool low_power = false;
};

struct Output {
    std::vector<Row> rows;
    std::vector<CurveRow> curves;
    std::vector<SummaryRow> summary;
};

/// Draws below this count are flagged as low power in summaries.
inline constexpr int kLowPowerDraws = 10;

/// Seed of graph draw `draw` of simulation `sim_index` at size n.
std::uint64_t draw_seed(const Options& opts, std::size_t sim_index, Index n, int draw);

Output run(const Options& opts);

/// Groups rows by (sim, n, method) in first-appearance order.
std::vector<SummaryRow> summarize(const std::vector<Row>& rows);

/// '#'-prefixed lines recording every option needed to regenerate the output.
std::string config_header(const Options& opts);

void write_rows(std::ostream& out, const std::vector<Row>& rows, std::string_view header = {});
std::vector<Row> read_rows(std::istream& in);
void write_curves(std::ostream& out, const std::vector<CurveRow>& curves, std::string_view header = {});
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary,
                       std::string_view header = {});
/// Aligned plain-text table.
void write_summary_text(std::ostream& out, const std::vector<SummaryRow>& summary);

/// Writes <kind>_replicates.csv, <kind>_summary.csv, <kind>_summary.txt and,
/// for fig1, fig1_curves.csv into `dir`. Returns the paths written.
std::vector<std::filesystem::path> write_outputs(const Output& output, const Options& opts,
                                                 const std::filesystem::path& dir);

}  // namespace gee::experiments

#endif  // GEE_EXPERIMENTS_HPP
