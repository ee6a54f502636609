#include "gee/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include <json.hpp>

namespace gee {

namespace {

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

void check_written(std::ostream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out)
        throw Error("write to '" + path.string() + "' failed");
}

}  // namespace

Format parse_format(std::string_view name)
{
    if (name == "csv")
        return Format::Csv;
    if (name == "json")
        return Format::Json;
    throw Error("unknown output format '" + std::string(name) + "' (expected csv or json)");
}

std::string format_double(double value)
{
    if (value == 0.0)
        return "0";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc())
        throw Error("cannot format value");
    return std::string(buf, ptr);
}

void write_labels(std::ostream& out, const LabelVector& y, Format format, int index_base)
{
    y.validate();
    if (format == Format::Csv) {
        for (Index i = 0; i < y.size(); ++i) {
            const int l = y[i];
            out << (i + index_base) << ',' << (l == LabelVector::kUnassigned ? 0 : l + 1) << '\n';
        }
        return;
    }
    nlohmann::json labels = nlohmann::json::array();
    for (int l : y.labels) {
        if (l == LabelVector::kUnassigned)
            labels.push_back(nullptr);
        else
            labels.push_back(l + 1);
    }
    nlohmann::json doc = {{"index_base", index_base}, {"k", y.k}, {"labels", std::move(labels)}};
    out << doc.dump() << '\n';
}

void write_labels(const std::filesystem::path& path, const LabelVector& y, Format format,
                  int index_base)
{
    auto out = open_output(path);
    write_labels(out, y, format, index_base);
    check_written(out, path);
}

void write_embedding(std::ostream& out, const Embedding<double>& z, Format format)
{
    if (z.rows() == 0 || z.cols() == 0)
        throw Error("refusing to write an empty embedding");
    if (!z.values.allFinite())
        throw Error("embedding contains non-finite values");
    if (format == Format::Csv) {
        for (Index i = 0; i < z.rows(); ++i) {
            for (Index j = 0; j < z.cols(); ++j) {
                if (j > 0)
                    out << ',';
                out << format_double(z.values(i, j));
            }
            out << '\n';
        }
        return;
    }
    nlohmann::json values = nlohmann::json::array();
    for (Index i = 0; i < z.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Index j = 0; j < z.cols(); ++j)
            row.push_back(z.values(i, j));
        values.push_back(std::move(row));
    }
    nlohmann::json doc = {{"rows", z.rows()},
                          {"cols", z.cols()},
                          {"normalized", z.normalized},
                          {"values", std::move(values)}};
    out << doc.dump() << '\n';
}

void write_embedding(const std::filesystem::path& path, const Embedding<double>& z, Format format)
{
    auto out = open_output(path);
    write_embedding(out, z, format);
    check_written(out, path);
}

void write_edgelist(std::ostream& out, const EdgeList& g, int index_base, std::string_view header)
{
    if (!header.empty())
        out << "# " << header << '\n';
    for (const auto& e : g.edges())
        out << (e.u + index_base) << ' ' << (e.v + index_base) << ' ' << format_double(e.w) << '\n';
}

void write_edgelist(const std::filesystem::path& path, const EdgeList& g, int index_base,
                    std::string_view header)
{
    auto out = open_output(path);
    write_edgelist(out, g, index_base, header);
    check_written(out, path);
}

}  // namespace gee
