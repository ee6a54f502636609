#ifndef GEE_TYPES_HPP
#define GEE_TYPES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gee {

using Index = std::int64_t;

/// Invalid arguments or inputs that violate a documented precondition.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent data (files, graphs, label vectors).
class DataError : public Error {
  public:
    using Error::Error;
};

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Squared Euclidean distance summed left to right over `dim` coordinates.
/// Shared by k-means and the cluster indices so their nearest-centre
/// decisions agree bit for bit.
inline double squared_distance(const double* a, const double* b, Index dim)
{
    double s = 0.0;
    for (Index j = 0; j < dim; ++j) {
        const double t = a[j] - b[j];
        s += t * t;
    }
    return s;
}

/// Per-vertex community assignment. Labels are stored 0-based in [0, k);
/// files and the CLI present them 1-based.
struct LabelVector {
    static constexpr int kUnassigned = -1;

    std::vector<int> labels;
    int k = 0;

    LabelVector() = default;
    LabelVector(std::vector<int> values, int alphabet) : labels(std::move(values)), k(alphabet) {}

    Index size() const { return static_cast<Index>(labels.size()); }
    int operator[](Index i) const { return labels[static_cast<std::size_t>(i)]; }

    bool fully_assigned() const;

    /// Throws DataError if any assigned entry is outside [0, k).
    void validate() const;

    /// Same alphabet and identical entries (not partition equivalence).
    friend bool operator==(const LabelVector&, const LabelVector&) = default;
};

/// Class sizes n_1..n_k; unassigned entries are not counted.
std::vector<Index> class_counts(const LabelVector& y);

/// Dense n x K vertex representation, row i = vertex i.
template <typename Scalar = double>
struct Embedding {
    RowMatrix<Scalar> values;
    bool normalized = false;

    Index rows() const { return values.rows(); }
    Index cols() const { return values.cols(); }
};

}  // namespace gee

#endif  // GEE_TYPES_HPP
