#ifndef GEE_IO_HPP
#define GEE_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "gee/graph.hpp"
#include "gee/types.hpp"

namespace gee {

enum class Format { Csv, Json };

Format parse_format(std::string_view name);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

/// CSV: one "vertex_id,label" line per vertex, both offset by index_base.
/// JSON: {"index_base": b, "k": K, "labels": [...]}. Unassigned labels are 0 in CSV
/// and null in JSON.
void write_labels(std::ostream& out, const LabelVector& y, Format format, int index_base = 1);
void write_labels(const std::filesystem::path& path, const LabelVector& y, Format format,
                  int index_base = 1);

/// CSV: one row per vertex, comma-separated columns. JSON: {"rows", "cols",
/// "normalized", "values": [[...], ...]}. Throws Error on an empty embedding.
void write_embedding(std::ostream& out, const Embedding<double>& z, Format format);
void write_embedding(const std::filesystem::path& path, const Embedding<double>& z, Format format);

/// Writes the edge-list text format read by parse_edgelist, with an optional
/// '#'-prefixed header line.
void write_edgelist(std::ostream& out, const EdgeList& g, int index_base = 1,
                    std::string_view header = {});
void write_edgelist(const std::filesystem::path& path, const EdgeList& g, int index_base = 1,
                    std::string_view header = {});

}  // namespace gee

#endif  // GEE_IO_HPP
