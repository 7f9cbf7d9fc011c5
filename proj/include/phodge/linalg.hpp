#pragma once

// Dense matrices over L0. Subspaces are stored as matrices whose rows are a basis.

#include <optional>
#include <vector>

#include "phodge/l0.hpp"

namespace phodge {

class L0Matrix {
 public:
  L0Matrix() = default;
  L0Matrix(L0Ptr F, long rows, long cols);

  static L0Matrix identity(const L0Ptr& F, long n);
  static L0Matrix diagonal(const std::vector<L0Number>& d);
  static L0Matrix from_rows(const L0Ptr& F, long cols, const std::vector<std::vector<L0Number>>& rows);

  const L0Ptr& field() const { return F_; }
  long rows() const { return r_; }
  long cols() const { return c_; }
  L0Number& operator()(long i, long j) { return a_[i * c_ + j]; }
  const L0Number& operator()(long i, long j) const { return a_[i * c_ + j]; }
  std::vector<L0Number> row(long i) const;
  std::vector<L0Number> col(long j) const;
  bool is_zero() const;

  L0Matrix transpose() const;
  L0Matrix sigma(long k = 1) const;
  L0Matrix scale(const L0Number& s) const;
  L0Matrix operator-() const;
  friend L0Matrix operator+(const L0Matrix& a, const L0Matrix& b);
  friend L0Matrix operator-(const L0Matrix& a, const L0Matrix& b);
  friend L0Matrix operator*(const L0Matrix& a, const L0Matrix& b);
  friend bool operator==(const L0Matrix& a, const L0Matrix& b) {
    return a.r_ == b.r_ && a.c_ == b.c_ && a.a_ == b.a_;
  }

  /// Reduced row echelon form; pivots receives the pivot column of each nonzero row.
  L0Matrix rref(std::vector<long>* pivots = nullptr) const;
  long rank() const;
  L0Number det() const;
  /// BasisSingular when not invertible.
  L0Matrix inverse() const;
  /// Coefficients of det(X − A), low degree first (monic, length n+1).
  std::vector<L0Number> charpoly() const;
  /// Rows spanning {x : A x = 0}.
  L0Matrix kernel() const;
  L0Matrix pow(long n) const;

 private:
  L0Ptr F_;
  long r_ = 0, c_ = 0;
  std::vector<L0Number> a_;
};

std::ostream& operator<<(std::ostream& os, const L0Matrix& a);

namespace subspace {

/// Row-reduced basis of the span of the rows.
L0Matrix span(const L0Matrix& rows);
/// Rows of a stacked on rows of b.
L0Matrix stack(const L0Matrix& a, const L0Matrix& b);
long dim(const L0Matrix& rows);
long intersection_dim(const L0Matrix& a, const L0Matrix& b);
bool contains(const L0Matrix& big, const L0Matrix& small);
/// Coefficients x with Σ x_i row_i(basis) = v, if v lies in the span; basis rows independent.
std::optional<std::vector<L0Number>> coordinates(const L0Matrix& basis, const std::vector<L0Number>& v);
/// Image of the rows under x ↦ A·σ^k(x) (columns convention).
L0Matrix image(const L0Matrix& A, const L0Matrix& rows, long sigma_power);

}  // namespace subspace

}  // namespace phodge
