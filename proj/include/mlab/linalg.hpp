#pragma once

#include "mlab/poly.hpp"
#include "mlab/rational.hpp"

#include <vector>

namespace mlab {

// Dense matrix over Q.  Sized at construction; row-major.
class MatQ {
public:
    MatQ() = default;
    MatQ(int rows, int cols);
    static MatQ identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Rat& at(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
    const Rat& at(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }

    MatQ operator*(const MatQ& o) const;
    std::vector<Rat> operator*(const std::vector<Rat>& v) const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<Rat> a_;
};

// Exact kernel basis of A (right null space), via Gauss-Jordan elimination
// over rationals.  Deterministic: columns are processed left to right and the
// first row with a nonzero entry is chosen as pivot.  Each basis vector has a
// 1 in its free column; vectors are ordered by free column index.
std::vector<std::vector<Rat>> nullspace(const MatQ& A);

// Rank via the same elimination.
int rank(const MatQ& A);

// Solve A x = b exactly for square nonsingular A; throws on singular input.
std::vector<Rat> solve_linear(const MatQ& A, const std::vector<Rat>& b);

// Small dense matrix with polynomial entries, used for the h-dependent
// matrices of the differential systems.  Square sizes 2 and 3 only.
class PolyMat {
public:
    PolyMat() = default;
    explicit PolyMat(int n);
    static PolyMat identity(int n);

    int size() const { return n_; }
    PolyQ& at(int r, int c) { return a_[static_cast<size_t>(r) * n_ + c]; }
    const PolyQ& at(int r, int c) const { return a_[static_cast<size_t>(r) * n_ + c]; }

    PolyMat operator*(const PolyMat& o) const;
    PolyMat operator+(const PolyMat& o) const;
    PolyMat operator-(const PolyMat& o) const;
    PolyMat scale(const PolyQ& s) const;
    PolyMat derivative() const; // entrywise d/dh

    PolyQ det() const;       // cofactor expansion (n <= 3)
    PolyMat adjugate() const; // transpose of cofactors, A * adj(A) = det(A) I

    // Entrywise evaluation at rational h.
    MatQ eval(const Rat& h) const;

private:
    int n_ = 0;
    std::vector<PolyQ> a_;
};

} // namespace mlab
