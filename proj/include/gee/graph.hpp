#ifndef GEE_GRAPH_HPP
#define GEE_GRAPH_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gee/types.hpp"

namespace gee {

struct Edge {
    Index u = 0;
    Index v = 0;
    double w = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Sparse graph as (source, target, weight) triples with 0-based vertices.
///
/// Undirected graphs store each edge once with u <= v; consumers expand it
/// symmetrically. Duplicate edges are kept (multigraph semantics) and
/// self-loops are allowed. Immutable once constructed.
class EdgeList {
  public:
    EdgeList() = default;

    /// Validates and canonicalizes. Throws DataError on out-of-range
    /// vertices, non-finite weights, or n_vertices < 1.
    EdgeList(Index n_vertices, std::vector<Edge> edges, bool directed);

    Index n_vertices() const { return n_; }
    Index n_edges() const { return static_cast<Index>(edges_.size()); }
    bool directed() const { return directed_; }
    const std::vector<Edge>& edges() const { return edges_; }

    friend bool operator==(const EdgeList&, const EdgeList&) = default;

  private:
    Index n_ = 0;
    std::vector<Edge> edges_;
    bool directed_ = false;
};

struct ParseOptions {
    /// 0 means any run of whitespace and/or commas separates fields.
    char delimiter = 0;
    int index_base = 1;
    bool directed = false;
    double default_weight = 1.0;
    /// Overrides the vertex count inferred from the largest index.
    std::optional<Index> n_vertices;
};

/// Reads the edge-list text format: one edge per line with 2 or 3 fields
/// (source, target, optional weight). Blank lines and lines starting with
/// '#' are skipped. Errors carry the 1-based line number.
EdgeList parse_edgelist(std::istream& in, const ParseOptions& options = {});
EdgeList parse_edgelist(const std::filesystem::path& path, const ParseOptions& options = {});

}  // namespace gee

#endif  // GEE_GRAPH_HPP
