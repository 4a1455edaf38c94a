#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace gfb {

typedef uint32_t index_t;

// column-major sparse matrix over Z2, each column a sorted list of row indices
class SparseZ2 {
public:
    SparseZ2() { offsets_.push_back(0); }
    explicit SparseZ2(index_t rows) : rows_(rows) { offsets_.push_back(0); }

    index_t rows() const { return rows_; }
    index_t cols() const { return static_cast<index_t>(offsets_.size() - 1); }
    size_t nonzeros() const { return entries_.size(); }
    void set_rows(index_t r) { rows_ = r; }

    std::span<const index_t> col(index_t j) const {
        return {entries_.data() + offsets_[j], entries_.data() + offsets_[j + 1]};
    }

    // rows need not be sorted; duplicates cancel
    void push_col(std::vector<index_t>& rows) {
        std::sort(rows.begin(), rows.end());
        size_t w = 0;
        for (size_t r = 0; r < rows.size();) {
            if (r + 1 < rows.size() && rows[r] == rows[r + 1]) {
                r += 2;
                continue;
            }
            rows[w++] = rows[r++];
        }
        rows.resize(w);
        entries_.insert(entries_.end(), rows.begin(), rows.end());
        offsets_.push_back(entries_.size());
    }

    void push_sorted_col(std::span<const index_t> rows) {
        entries_.insert(entries_.end(), rows.begin(), rows.end());
        offsets_.push_back(entries_.size());
    }

    void reserve(size_t cols, size_t nnz) {
        offsets_.reserve(cols + 1);
        entries_.reserve(nnz);
    }

    bool col_empty(index_t j) const { return offsets_[j] == offsets_[j + 1]; }
    // pivot = largest row index of a nonzero column
    index_t pivot(index_t j) const { return entries_[offsets_[j + 1] - 1]; }

    bool operator==(const SparseZ2& o) const {
        return rows_ == o.rows_ && offsets_ == o.offsets_ && entries_ == o.entries_;
    }

    friend SparseZ2 operator*(const SparseZ2& a, const SparseZ2& b) {
        SparseZ2 c(a.rows());
        std::vector<index_t> acc;
        for (index_t j = 0; j < b.cols(); ++j) {
            acc.clear();
            for (index_t k : b.col(j))
                for (index_t i : a.col(k)) acc.push_back(i);
            c.push_col(acc);
        }
        return c;
    }

    bool is_zero() const { return entries_.empty(); }

private:
    index_t rows_ = 0;
    std::vector<size_t> offsets_;
    std::vector<index_t> entries_;
};

// symmetric difference of two sorted index lists
inline void z2_add_into(std::vector<index_t>& acc, std::span<const index_t> other,
                        std::vector<index_t>& scratch) {
    scratch.clear();
    scratch.reserve(acc.size() + other.size());
    auto a = acc.begin();
    auto b = other.begin();
    while (a != acc.end() && b != other.end()) {
        if (*a < *b)
            scratch.push_back(*a++);
        else if (*b < *a)
            scratch.push_back(*b++);
        else {
            ++a;
            ++b;
        }
    }
    scratch.insert(scratch.end(), a, acc.end());
    scratch.insert(scratch.end(), b, other.end());
    acc.swap(scratch);
}

// rank over Z2 by dense elimination on packed bit rows
inline size_t dense_rank(std::vector<std::vector<uint64_t>> rows) {
    size_t rank = 0;
    if (rows.empty()) return 0;
    size_t words = rows[0].size();
    for (size_t w = 0; w < words; ++w) {
        for (int bit = 0; bit < 64; ++bit) {
            uint64_t mask = uint64_t(1) << bit;
            size_t p = rank;
            while (p < rows.size() && !(rows[p][w] & mask)) ++p;
            if (p == rows.size()) continue;
            std::swap(rows[p], rows[rank]);
            for (size_t r = 0; r < rows.size(); ++r)
                if (r != rank && (rows[r][w] & mask))
                    for (size_t k = w; k < words; ++k) rows[r][k] ^= rows[rank][k];
            if (++rank == rows.size()) return rank;
        }
    }
    return rank;
}

// rank of the submatrix picked out by row and column masks
inline size_t submatrix_rank(const SparseZ2& a, const std::vector<char>& keep_row,
                             const std::vector<char>& keep_col) {
    std::vector<index_t> row_map(a.rows(), index_t(-1));
    index_t nr = 0;
    for (index_t i = 0; i < a.rows(); ++i)
        if (keep_row[i]) row_map[i] = nr++;
    size_t words = (nr + 63) / 64;
    std::vector<std::vector<uint64_t>> cols;
    for (index_t j = 0; j < a.cols(); ++j) {
        if (!keep_col[j]) continue;
        std::vector<uint64_t> v(words, 0);
        bool any = false;
        for (index_t i : a.col(j))
            if (row_map[i] != index_t(-1)) {
                v[row_map[i] / 64] ^= uint64_t(1) << (row_map[i] % 64);
                any = true;
            }
        if (any) cols.push_back(std::move(v));
    }
    if (words == 0) return 0;
    return dense_rank(std::move(cols));
}

// one "j row col" line per nonzero
inline void write_triplets(std::ostream& os, const SparseZ2& a, int tag) {
    for (index_t j = 0; j < a.cols(); ++j)
        for (index_t i : a.col(j)) os << tag << ' ' << i << ' ' << j << '\n';
}

struct Triplet {
    int tag;
    index_t row, col;
};

inline std::vector<Triplet> read_triplets(std::istream& is) {
    std::vector<Triplet> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        long long t, r, c;
        if (!(ls >> t >> r >> c) || r < 0 || c < 0)
            throw IoError("bad triplet on line " + std::to_string(lineno));
        out.push_back({static_cast<int>(t), static_cast<index_t>(r), static_cast<index_t>(c)});
    }
    return out;
}

} // namespace gfb
