#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "homlab/core/types.hpp"

namespace homlab {

/// Square sparse matrix in compressed-row storage.
///
/// Column indices are sorted within each row and never repeated.
class SparseSystem {
public:
    SparseSystem() = default;
    SparseSystem(std::size_t dimension, std::vector<std::size_t> row_offsets, std::vector<std::size_t> col_indices,
                 Vec values, bool symmetric)
        : dim_(dimension), rows_(std::move(row_offsets)), cols_(std::move(col_indices)), vals_(std::move(values)),
          symmetric_(symmetric) {
        require(rows_.size() == dim_ + 1, "row offsets must have dimension + 1 entries");
        require(cols_.size() == vals_.size() && rows_.back() == vals_.size(), "inconsistent CSR arrays");
        if (symmetric_) require(symmetry_defect() <= 1e-12 * std::max(max_abs(), 1e-300),
                                "matrix flagged symmetric is not symmetric");
    }

    std::size_t dimension() const noexcept { return dim_; }
    std::size_t nonzeros() const noexcept { return vals_.size(); }
    bool symmetric() const noexcept { return symmetric_; }
    const std::vector<std::size_t>& row_offsets() const noexcept { return rows_; }
    const std::vector<std::size_t>& col_indices() const noexcept { return cols_; }
    const Vec& values() const noexcept { return vals_; }

    void multiply(std::span<const double> x, std::span<double> y) const {
        for (std::size_t i = 0; i < dim_; ++i) {
            double s = 0.0;
            for (std::size_t k = rows_[i]; k < rows_[i + 1]; ++k) s += vals_[k] * x[cols_[k]];
            y[i] = s;
        }
    }

    Vec operator*(const Vec& x) const {
        Vec y(dim_);
        multiply(x, y);
        return y;
    }

    double at(std::size_t i, std::size_t j) const {
        const auto b = cols_.begin() + static_cast<std::ptrdiff_t>(rows_[i]);
        const auto e = cols_.begin() + static_cast<std::ptrdiff_t>(rows_[i + 1]);
        const auto it = std::lower_bound(b, e, j);
        return (it != e && *it == j) ? vals_[static_cast<std::size_t>(it - cols_.begin())] : 0.0;
    }

    Vec diagonal() const {
        Vec d(dim_, 0.0);
        for (std::size_t i = 0; i < dim_; ++i) d[i] = at(i, i);
        return d;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : vals_) m = std::max(m, std::abs(v));
        return m;
    }

    /// max |M - M^T| over stored entries.
    double symmetry_defect() const {
        double m = 0.0;
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t k = rows_[i]; k < rows_[i + 1]; ++k)
                m = std::max(m, std::abs(vals_[k] - at(cols_[k], i)));
        return m;
    }

private:
    std::size_t dim_ = 0;
    std::vector<std::size_t> rows_{0};
    std::vector<std::size_t> cols_;
    Vec vals_;
    bool symmetric_ = false;
};

/// Accumulates (row, col, value) contributions; duplicates are summed on build().
class TripletBuilder {
public:
    explicit TripletBuilder(std::size_t dimension) : dim_(dimension) {}

    void add(std::size_t row, std::size_t col, double value) {
        rows_.push_back(row);
        cols_.push_back(col);
        vals_.push_back(value);
    }

    void reserve(std::size_t n) {
        rows_.reserve(n);
        cols_.reserve(n);
        vals_.reserve(n);
    }

    SparseSystem build(bool symmetric) const {
        // counting sort by row, then merge columns inside each row
        std::vector<std::size_t> count(dim_ + 1, 0);
        for (std::size_t r : rows_) ++count[r + 1];
        std::partial_sum(count.begin(), count.end(), count.begin());
        std::vector<std::size_t> order(rows_.size());
        {
            auto next = count;
            for (std::size_t t = 0; t < rows_.size(); ++t) order[next[rows_[t]]++] = t;
        }
        std::vector<std::size_t> offsets(dim_ + 1, 0), cols;
        Vec vals;
        cols.reserve(rows_.size() / 2);
        vals.reserve(rows_.size() / 2);
        std::vector<std::pair<std::size_t, double>> row;
        for (std::size_t i = 0; i < dim_; ++i) {
            row.clear();
            for (std::size_t k = count[i]; k < count[i + 1]; ++k) row.emplace_back(cols_[order[k]], vals_[order[k]]);
            std::stable_sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
            for (std::size_t k = 0; k < row.size();) {
                std::size_t c = row[k].first;
                double s = 0.0;
                while (k < row.size() && row[k].first == c) s += row[k++].second;
                cols.push_back(c);
                vals.push_back(s);
            }
            offsets[i + 1] = cols.size();
        }
        return SparseSystem(dim_, std::move(offsets), std::move(cols), std::move(vals), symmetric);
    }

private:
    std::size_t dim_;
    std::vector<std::size_t> rows_, cols_;
    Vec vals_;
};

/// Partition of the full unknown vector into free and eliminated entries.
struct DofMap {
    std::vector<long> full_to_free;        // -1 when eliminated
    std::vector<std::size_t> free_to_full;

    static DofMap from_mask(const std::vector<bool>& is_free) {
        DofMap m;
        m.full_to_free.assign(is_free.size(), -1);
        for (std::size_t k = 0; k < is_free.size(); ++k)
            if (is_free[k]) {
                m.full_to_free[k] = static_cast<long>(m.free_to_full.size());
                m.free_to_full.push_back(k);
            }
        return m;
    }

    std::size_t free_count() const noexcept { return free_to_full.size(); }

    Vec restrict_vector(const Vec& full) const {
        Vec r(free_to_full.size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = full[free_to_full[i]];
        return r;
    }

    void scatter(const Vec& reduced, Vec& full) const {
        for (std::size_t i = 0; i < reduced.size(); ++i) full[free_to_full[i]] = reduced[i];
    }
};

/// Free-free block of a system.
inline SparseSystem restrict_system(const SparseSystem& full, const DofMap& map) {
    TripletBuilder b(map.free_count());
    const auto& rows = full.row_offsets();
    const auto& cols = full.col_indices();
    const auto& vals = full.values();
    for (std::size_t i = 0; i < map.free_count(); ++i) {
        const std::size_t fi = map.free_to_full[i];
        for (std::size_t k = rows[fi]; k < rows[fi + 1]; ++k) {
            const long j = map.full_to_free[cols[k]];
            if (j >= 0) b.add(i, static_cast<std::size_t>(j), vals[k]);
        }
    }
    return b.build(full.symmetric());
}

/// rhs_free - K_{free,fixed} * u_fixed, where u_full carries the fixed values.
inline Vec eliminate_fixed(const SparseSystem& full, const DofMap& map, const Vec& rhs_full, const Vec& u_full) {
    const auto& rows = full.row_offsets();
    const auto& cols = full.col_indices();
    const auto& vals = full.values();
    Vec r(map.free_count());
    for (std::size_t i = 0; i < map.free_count(); ++i) {
        const std::size_t fi = map.free_to_full[i];
        double s = rhs_full[fi];
        for (std::size_t k = rows[fi]; k < rows[fi + 1]; ++k)
            if (map.full_to_free[cols[k]] < 0) s -= vals[k] * u_full[cols[k]];
        r[i] = s;
    }
    return r;
}

}  // namespace homlab
