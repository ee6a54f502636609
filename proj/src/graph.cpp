#include "gee/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>

namespace gee {

bool LabelVector::fully_assigned() const
{
    return std::none_of(labels.begin(), labels.end(), [](int l) { return l == kUnassigned; });
}

void LabelVector::validate() const
{
    if (k < 0)
        throw DataError("label alphabet size must be nonnegative");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int l = labels[i];
        if (l != kUnassigned && (l < 0 || l >= k))
            throw DataError("label " + std::to_string(l + 1) + " of vertex " + std::to_string(i + 1)
                            + " outside [1, " + std::to_string(k) + "]");
    }
}

std::vector<Index> class_counts(const LabelVector& y)
{
    std::vector<Index> counts(static_cast<std::size_t>(std::max(y.k, 0)), 0);
    for (int l : y.labels)
        if (l >= 0 && l < y.k)
            ++counts[static_cast<std::size_t>(l)];
    return counts;
}

EdgeList::EdgeList(Index n_vertices, std::vector<Edge> edges, bool directed)
    : n_(n_vertices), edges_(std::move(edges)), directed_(directed)
{
    if (n_ < 1)
        throw DataError("graph must have at least one vertex");
    for (auto& e : edges_) {
        if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_)
            throw DataError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v)
                            + ") references a vertex outside [0, " + std::to_string(n_) + ")");
        if (!std::isfinite(e.w))
            throw DataError("non-finite edge weight");
        if (!directed_ && e.u > e.v)
            std::swap(e.u, e.v);
    }
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char delimiter)
{
    std::vector<std::string_view> fields;
    auto is_sep = [delimiter](char c) {
        if (delimiter == 0)
            return c == ' ' || c == '\t' || c == ',' || c == '\r';
        return c == delimiter;
    };
    if (delimiter == 0) {
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && is_sep(line[i]))
                ++i;
            std::size_t j = i;
            while (j < line.size() && !is_sep(line[j]))
                ++j;
            if (j > i)
                fields.push_back(line.substr(i, j - i));
            i = j;
        }
        return fields;
    }
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || is_sep(line[i])) {
            auto f = line.substr(start, i - start);
            while (!f.empty() && (f.front() == ' ' || f.front() == '\t'))
                f.remove_prefix(1);
            while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r'))
                f.remove_suffix(1);
            fields.push_back(f);
            start = i + 1;
        }
    }
    return fields;
}

template <typename T>
bool parse_number(std::string_view s, T& out)
{
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

[[noreturn]] void fail_line(Index line_no, const std::string& what)
{
    throw DataError("line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

EdgeList parse_edgelist(std::istream& in, const ParseOptions& options)
{
    if (options.index_base != 0 && options.index_base != 1)
        throw Error("index base must be 0 or 1");

    std::vector<Edge> edges;
    Index max_index = -1;
    Index line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        const auto first = view.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || view[first] == '#')
            continue;

        const auto fields = split_fields(view, options.delimiter);
        if (fields.size() != 2 && fields.size() != 3)
            fail_line(line_no, "expected 2 or 3 fields, found " + std::to_string(fields.size()));

        Index ends[2];
        for (int f = 0; f < 2; ++f) {
            if (!parse_number(fields[f], ends[f]))
                fail_line(line_no, "invalid vertex index '" + std::string(fields[f]) + "'");
            ends[f] -= options.index_base;
            if (ends[f] < 0)
                fail_line(line_no, "vertex index below base " + std::to_string(options.index_base));
            if (options.n_vertices && ends[f] >= *options.n_vertices)
                fail_line(line_no, "vertex index exceeds declared vertex count "
                                       + std::to_string(*options.n_vertices));
        }
        double w = options.default_weight;
        if (fields.size() == 3 && !parse_number(fields[2], w))
            fail_line(line_no, "invalid weight '" + std::string(fields[2]) + "'");
        if (!std::isfinite(w))
            fail_line(line_no, "non-finite weight");

        max_index = std::max({max_index, ends[0], ends[1]});
        edges.push_back({ends[0], ends[1], w});
    }
    if (in.bad())
        throw DataError("read failure");
    if (edges.empty())
        throw DataError("edge list is empty");

    const Index n = options.n_vertices.value_or(max_index + 1);
    return EdgeList(n, std::move(edges), options.directed);
}

EdgeList parse_edgelist(const std::filesystem::path& path, const ParseOptions& options)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open edge list '" + path.string() + "'");
    try {
        return parse_edgelist(in, options);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

}  // namespace gee
