#include "gee/quality.hpp"

#include <algorithm>
#include <cstdint>

namespace gee {

namespace {

struct PairCounts {
    std::int64_t joint = 0;  // sum over cells of C(n_ij, 2)
    std::int64_t rows = 0;   // sum over a-classes of C(a_i, 2)
    std::int64_t cols = 0;   // sum over b-classes of C(b_j, 2)
    std::int64_t total = 0;  // C(n, 2)
};

constexpr std::int64_t choose2(std::int64_t x) { return x * (x - 1) / 2; }

std::int64_t sum_choose2_of_runs(std::vector<std::uint64_t>& codes)
{
    std::sort(codes.begin(), codes.end());
    std::int64_t sum = 0;
    std::size_t i = 0;
    while (i < codes.size()) {
        std::size_t j = i;
        while (j < codes.size() && codes[j] == codes[i])
            ++j;
        sum += choose2(static_cast<std::int64_t>(j - i));
        i = j;
    }
    return sum;
}

PairCounts pair_counts(const LabelVector& a, const LabelVector& b)
{
    if (a.size() != b.size())
        throw Error("ari: label vectors differ in length (" + std::to_string(a.size()) + " vs "
                    + std::to_string(b.size()) + ")");
    a.validate();
    b.validate();
    if (!a.fully_assigned() || !b.fully_assigned())
        throw DataError("ari: label vectors must be fully assigned");

    const std::size_t n = a.labels.size();
    std::vector<std::uint64_t> joint(n), ra(n), rb(n);
    for (std::size_t i = 0; i < n; ++i) {
        ra[i] = static_cast<std::uint64_t>(a.labels[i]);
        rb[i] = static_cast<std::uint64_t>(b.labels[i]);
        joint[i] = (ra[i] << 32) | rb[i];
    }
    PairCounts pc;
    pc.joint = sum_choose2_of_runs(joint);
    pc.rows = sum_choose2_of_runs(ra);
    pc.cols = sum_choose2_of_runs(rb);
    pc.total = choose2(static_cast<std::int64_t>(n));
    return pc;
}

}  // namespace

double ari(const LabelVector& a, const LabelVector& b)
{
    const PairCounts pc = pair_counts(a, b);
    if (pc.total == 0)
        return 1.0;
    // (J - RC/N) / ((R + C)/2 - RC/N) scaled by 2N to stay in integers.
    using Wide = __int128;
    const Wide n = pc.total, j = pc.joint, r = pc.rows, c = pc.cols;
    const Wide num = 2 * (n * j - r * c);
    const Wide den = n * (r + c) - 2 * r * c;
    if (den == 0)
        return 1.0;
    constexpr Wide exact_limit = Wide(1) << 53;
    const auto magnitude = [](Wide x) { return x < 0 ? -x : x; };
    if (magnitude(num) < exact_limit && den < exact_limit)
        return static_cast<double>(num) / static_cast<double>(den);
    return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

bool same_partition(const LabelVector& a, const LabelVector& b)
{
    const PairCounts pc = pair_counts(a, b);
    return pc.joint == pc.rows && pc.joint == pc.cols;
}

}  // namespace gee
