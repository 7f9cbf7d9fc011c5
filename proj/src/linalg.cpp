#include "phodge/linalg.hpp"

#include <ostream>

#include "phodge/errors.hpp"

namespace phodge {

L0Matrix::L0Matrix(L0Ptr F, long rows, long cols)
    : F_(std::move(F)), r_(rows), c_(cols), a_(static_cast<std::size_t>(rows * cols), L0Number::zero(F_)) {}

L0Matrix L0Matrix::identity(const L0Ptr& F, long n) {
  L0Matrix m(F, n, n);
  for (long i = 0; i < n; ++i) m(i, i) = L0Number::rational(F, 1);
  return m;
}

L0Matrix L0Matrix::diagonal(const std::vector<L0Number>& d) {
  if (d.empty()) fail(Errc::InvalidArgument, "empty diagonal");
  L0Matrix m(d[0].field(), static_cast<long>(d.size()), static_cast<long>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

L0Matrix L0Matrix::from_rows(const L0Ptr& F, long cols, const std::vector<std::vector<L0Number>>& rows) {
  L0Matrix m(F, static_cast<long>(rows.size()), cols);
  for (long i = 0; i < m.r_; ++i) {
    if (static_cast<long>(rows[i].size()) != cols) fail(Errc::InvalidArgument, "ragged matrix");
    for (long j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<L0Number> L0Matrix::row(long i) const {
  return std::vector<L0Number>(a_.begin() + i * c_, a_.begin() + (i + 1) * c_);
}

std::vector<L0Number> L0Matrix::col(long j) const {
  std::vector<L0Number> v;
  for (long i = 0; i < r_; ++i) v.push_back((*this)(i, j));
  return v;
}

bool L0Matrix::is_zero() const {
  for (auto& x : a_)
    if (!x.is_zero()) return false;
  return true;
}

L0Matrix L0Matrix::transpose() const {
  L0Matrix t(F_, c_, r_);
  for (long i = 0; i < r_; ++i)
    for (long j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

L0Matrix L0Matrix::sigma(long k) const {
  L0Matrix t = *this;
  if (F_ && F_->residue_degree() > 1)
    for (auto& x : t.a_) x = x.sigma(k);
  return t;
}

L0Matrix L0Matrix::scale(const L0Number& s) const {
  L0Matrix t = *this;
  for (auto& x : t.a_) x *= s;
  return t;
}

L0Matrix L0Matrix::operator-() const {
  L0Matrix t = *this;
  for (auto& x : t.a_) x = -x;
  return t;
}

static void check_shape(const L0Matrix& a, const L0Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) fail(Errc::InvalidArgument, "matrix shape mismatch");
}

L0Matrix operator+(const L0Matrix& a, const L0Matrix& b) {
  check_shape(a, b);
  L0Matrix t = a;
  for (std::size_t i = 0; i < t.a_.size(); ++i) t.a_[i] += b.a_[i];
  return t;
}

L0Matrix operator-(const L0Matrix& a, const L0Matrix& b) {
  check_shape(a, b);
  L0Matrix t = a;
  for (std::size_t i = 0; i < t.a_.size(); ++i) t.a_[i] -= b.a_[i];
  return t;
}

L0Matrix operator*(const L0Matrix& a, const L0Matrix& b) {
  if (a.c_ != b.r_) fail(Errc::InvalidArgument, "matrix product shape mismatch");
  L0Matrix t(a.F_ ? a.F_ : b.F_, a.r_, b.c_);
  for (long i = 0; i < a.r_; ++i)
    for (long k = 0; k < a.c_; ++k) {
      const L0Number& x = a(i, k);
      if (x.is_zero()) continue;
      for (long j = 0; j < b.c_; ++j) t(i, j) += x * b(k, j);
    }
  return t;
}

L0Matrix L0Matrix::rref(std::vector<long>* pivots) const {
  L0Matrix m = *this;
  if (pivots) pivots->clear();
  long r = 0;
  for (long c = 0; c < c_ && r < r_; ++c) {
    long piv = -1;
    for (long i = r; i < r_; ++i)
      if (!m(i, c).is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != r)
      for (long j = 0; j < c_; ++j) std::swap(m(piv, j), m(r, j));
    L0Number inv = m(r, c).inverse();
    for (long j = c; j < c_; ++j) m(r, j) *= inv;
    for (long i = 0; i < r_; ++i) {
      if (i == r || m(i, c).is_zero()) continue;
      L0Number f = m(i, c);
      for (long j = c; j < c_; ++j) m(i, j) -= f * m(r, j);
    }
    if (pivots) pivots->push_back(c);
    ++r;
  }
  return m;
}

long L0Matrix::rank() const {
  std::vector<long> piv;
  rref(&piv);
  return static_cast<long>(piv.size());
}

L0Number L0Matrix::det() const {
  if (r_ != c_) fail(Errc::InvalidArgument, "determinant of a non-square matrix");
  L0Matrix m = *this;
  L0Number d = L0Number::rational(F_, 1);
  for (long c = 0; c < c_; ++c) {
    long piv = -1;
    for (long i = c; i < r_; ++i)
      if (!m(i, c).is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) return L0Number::zero(F_);
    if (piv != c) {
      for (long j = 0; j < c_; ++j) std::swap(m(piv, j), m(c, j));
      d = -d;
    }
    d *= m(c, c);
    L0Number inv = m(c, c).inverse();
    for (long i = c + 1; i < r_; ++i) {
      if (m(i, c).is_zero()) continue;
      L0Number f = m(i, c) * inv;
      for (long j = c; j < c_; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return d;
}

L0Matrix L0Matrix::inverse() const {
  if (r_ != c_) fail(Errc::InvalidArgument, "inverse of a non-square matrix");
  L0Matrix aug(F_, r_, 2 * c_);
  for (long i = 0; i < r_; ++i) {
    for (long j = 0; j < c_; ++j) aug(i, j) = (*this)(i, j);
    aug(i, c_ + i) = L0Number::rational(F_, 1);
  }
  std::vector<long> piv;
  L0Matrix red = aug.rref(&piv);
  if (static_cast<long>(piv.size()) < r_ || (r_ > 0 && piv.back() >= c_))
    fail(Errc::BasisSingular, "matrix is singular");
  L0Matrix inv(F_, r_, c_);
  for (long i = 0; i < r_; ++i)
    for (long j = 0; j < c_; ++j) inv(i, j) = red(i, c_ + j);
  return inv;
}

std::vector<L0Number> L0Matrix::charpoly() const {
  if (r_ != c_) fail(Errc::InvalidArgument, "characteristic polynomial of a non-square matrix");
  const long n = r_;
  std::vector<L0Number> c(n + 1, L0Number::zero(F_));
  c[n] = L0Number::rational(F_, 1);
  if (n == 0) return c;
  L0Matrix I = identity(F_, n), M = I;
  for (long k = 1; k <= n; ++k) {
    L0Matrix AM = (*this) * M;
    L0Number tr = L0Number::zero(F_);
    for (long i = 0; i < n; ++i) tr += AM(i, i);
    c[n - k] = -(tr * L0Number::rational(F_, Rational(1, k)));
    M = AM + I.scale(c[n - k]);
  }
  return c;
}

L0Matrix L0Matrix::kernel() const {
  std::vector<long> piv;
  L0Matrix red = rref(&piv);
  std::vector<bool> is_piv(c_, false);
  for (long c : piv) is_piv[c] = true;
  std::vector<std::vector<L0Number>> basis;
  for (long free = 0; free < c_; ++free) {
    if (is_piv[free]) continue;
    std::vector<L0Number> v(c_, L0Number::zero(F_));
    v[free] = L0Number::rational(F_, 1);
    for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -red(i, free);
    basis.push_back(std::move(v));
  }
  return from_rows(F_, c_, basis);
}

L0Matrix L0Matrix::pow(long n) const {
  L0Matrix r = identity(F_, r_), b = *this;
  while (n > 0) {
    if (n & 1) r = r * b;
    b = b * b;
    n >>= 1;
  }
  return r;
}

std::ostream& operator<<(std::ostream& os, const L0Matrix& a) {
  os << "[";
  for (long i = 0; i < a.rows(); ++i) {
    os << (i ? ", [" : "[");
    for (long j = 0; j < a.cols(); ++j) os << (j ? ", " : "") << a(i, j);
    os << "]";
  }
  return os << "]";
}

namespace subspace {

L0Matrix span(const L0Matrix& rows) {
  std::vector<long> piv;
  L0Matrix red = rows.rref(&piv);
  L0Matrix out(rows.field(), static_cast<long>(piv.size()), rows.cols());
  for (long i = 0; i < out.rows(); ++i)
    for (long j = 0; j < out.cols(); ++j) out(i, j) = red(i, j);
  return out;
}

L0Matrix stack(const L0Matrix& a, const L0Matrix& b) {
  if (a.cols() != b.cols()) fail(Errc::InvalidArgument, "stacking subspaces of different ambient dimension");
  L0Matrix out(a.field() ? a.field() : b.field(), a.rows() + b.rows(), a.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  for (long i = 0; i < b.rows(); ++i)
    for (long j = 0; j < b.cols(); ++j) out(a.rows() + i, j) = b(i, j);
  return out;
}

long dim(const L0Matrix& rows) { return rows.rank(); }

long intersection_dim(const L0Matrix& a, const L0Matrix& b) {
  return dim(a) + dim(b) - dim(stack(a, b));
}

bool contains(const L0Matrix& big, const L0Matrix& small) {
  return dim(stack(big, small)) == dim(big);
}

std::optional<std::vector<L0Number>> coordinates(const L0Matrix& basis, const std::vector<L0Number>& v) {
  const long r = basis.rows(), n = basis.cols();
  L0Matrix aug(basis.field(), n, r + 1);
  for (long i = 0; i < n; ++i) {
    for (long k = 0; k < r; ++k) aug(i, k) = basis(k, i);
    aug(i, r) = v[i];
  }
  std::vector<long> piv;
  L0Matrix red = aug.rref(&piv);
  if (!piv.empty() && piv.back() == r) return std::nullopt;
  if (static_cast<long>(piv.size()) < r) fail(Errc::InvalidArgument, "basis rows are dependent");
  std::vector<L0Number> x;
  for (long k = 0; k < r; ++k) x.push_back(red(k, r));
  return x;
}

L0Matrix image(const L0Matrix& A, const L0Matrix& rows, long sigma_power) {
  // (A σ^k(x))^T for each row x: σ^k(rows) · A^T
  return rows.sigma(sigma_power) * A.transpose();
}

}  // namespace subspace

}  // namespace phodge
