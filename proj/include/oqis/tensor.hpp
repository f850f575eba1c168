#pragma once

#include "oqis/core.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <numeric>
#include <ostream>

namespace oqis {

using SpMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

inline long dims_product(const std::vector<int>& d) {
  return std::accumulate(d.begin(), d.end(), 1L, std::multiplies<long>());
}

// Complex matrix with an ordered list of slot dimensions; leftmost slot most significant.
struct TensorOp {
  Mat data;
  std::vector<int> dims;

  TensorOp() = default;
  TensorOp(Mat m, std::vector<int> d) : data(std::move(m)), dims(std::move(d)) { check(); }

  static TensorOp identity(std::vector<int> d) {
    long n = dims_product(d);
    return TensorOp(Mat::Identity(n, n), std::move(d));
  }
  static TensorOp zero(std::vector<int> d) {
    long n = dims_product(d);
    return TensorOp(Mat::Zero(n, n), std::move(d));
  }

  long side() const { return data.rows(); }
  int slots() const { return static_cast<int>(dims.size()); }

  void check() const {
    if (data.rows() != data.cols()) throw Error(ErrorCode::ShapeMismatch, "tensor operator must be square");
    if (dims_product(dims) != data.rows()) throw Error(ErrorCode::ShapeMismatch, "slot dims do not match side");
    for (int d : dims)
      if (d < 1) throw Error(ErrorCode::ShapeMismatch, "slot dims must be positive");
  }
};

inline void same_dims(const TensorOp& A, const TensorOp& B) {
  if (A.dims != B.dims) throw Error(ErrorCode::ShapeMismatch, "slot dims differ");
}

inline TensorOp operator*(const TensorOp& A, const TensorOp& B) {
  same_dims(A, B);
  return TensorOp(A.data * B.data, A.dims);
}
inline TensorOp operator+(const TensorOp& A, const TensorOp& B) {
  same_dims(A, B);
  return TensorOp(A.data + B.data, A.dims);
}
inline TensorOp operator-(const TensorOp& A, const TensorOp& B) {
  same_dims(A, B);
  return TensorOp(A.data - B.data, A.dims);
}
inline TensorOp operator*(cplx c, const TensorOp& A) { return TensorOp(c * A.data, A.dims); }

inline double rel_residual(const TensorOp& A, const TensorOp& B) {
  same_dims(A, B);
  return rel_residual(A.data, B.data);
}

inline Mat kron_mat(const Mat& A, const Mat& B) {
  Mat R(A.rows() * B.rows(), A.cols() * B.cols());
  for (long i = 0; i < A.rows(); ++i)
    for (long j = 0; j < A.cols(); ++j) R.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return R;
}

inline TensorOp kron(const TensorOp& A, const TensorOp& B) {
  std::vector<int> d = A.dims;
  d.insert(d.end(), B.dims.begin(), B.dims.end());
  return TensorOp(kron_mat(A.data, B.data), std::move(d));
}

template <class... Ts>
TensorOp kron(const TensorOp& A, const TensorOp& B, const Ts&... rest) {
  return kron(kron(A, B), rest...);
}

// matrix unit E_ij on C^n, 1-based as in the usual notation
inline Mat unit(int i, int j, int n = 2) {
  Mat m = Mat::Zero(n, n);
  m(i - 1, j - 1) = 1.0;
  return m;
}

inline TensorOp op2(const Mat& m) { return TensorOp(m, {static_cast<int>(m.rows())}); }

// mixed-radix helpers
inline std::vector<long> strides_of(const std::vector<int>& d) {
  std::vector<long> st(d.size());
  long acc = 1;
  for (int k = static_cast<int>(d.size()) - 1; k >= 0; --k) {
    st[k] = acc;
    acc *= d[k];
  }
  return st;
}

namespace detail {

struct SlotMap {
  std::vector<int> dims;
  std::vector<long> strides;
  std::vector<int> sel;
  std::vector<int> rest;
  std::vector<int> sel_dims;
  std::vector<long> sel_strides;

  SlotMap(const std::vector<int>& full, const std::vector<int>& slots) : dims(full), strides(strides_of(full)), sel(slots) {
    std::vector<bool> used(full.size(), false);
    for (int s : slots) {
      if (s < 0 || s >= static_cast<int>(full.size()) || used[s])
        throw Error(ErrorCode::ShapeMismatch, "bad slot selection");
      used[s] = true;
      sel_dims.push_back(full[s]);
    }
    for (int k = 0; k < static_cast<int>(full.size()); ++k)
      if (!used[k]) rest.push_back(k);
    sel_strides = strides_of(sel_dims);
  }

  // full index offset contributed by a local index of the selected slots
  long sel_offset(long local) const {
    long off = 0;
    for (size_t a = 0; a < sel.size(); ++a) {
      long digit = (local / sel_strides[a]) % sel_dims[a];
      off += digit * strides[sel[a]];
    }
    return off;
  }

  long rest_count() const {
    long n = 1;
    for (int k : rest) n *= dims[k];
    return n;
  }

  long rest_offset(long r) const {
    long off = 0;
    for (int a = static_cast<int>(rest.size()) - 1; a >= 0; --a) {
      int k = rest[a];
      off += (r % dims[k]) * strides[k];
      r /= dims[k];
    }
    return off;
  }
};

}  // namespace detail

// A acting on the named slots (any order, not necessarily adjacent), identity elsewhere
inline TensorOp embed(const TensorOp& A, const std::vector<int>& slots, const std::vector<int>& dims) {
  detail::SlotMap sm(dims, slots);
  if (sm.sel_dims != A.dims) throw Error(ErrorCode::ShapeMismatch, "embed: operator dims do not match slots");
  long n = dims_product(dims);
  Mat R = Mat::Zero(n, n);
  long nr = sm.rest_count();
  std::vector<long> off(A.side());
  for (long i = 0; i < A.side(); ++i) off[i] = sm.sel_offset(i);
  for (long r = 0; r < nr; ++r) {
    long base = sm.rest_offset(r);
    for (long j = 0; j < A.side(); ++j)
      for (long i = 0; i < A.side(); ++i) {
        cplx v = A.data(i, j);
        if (v != 0.0) R(base + off[i], base + off[j]) = v;
      }
  }
  return TensorOp(std::move(R), dims);
}

inline SpMat embed_sparse(const TensorOp& A, const std::vector<int>& slots, const std::vector<int>& dims) {
  detail::SlotMap sm(dims, slots);
  if (sm.sel_dims != A.dims) throw Error(ErrorCode::ShapeMismatch, "embed: operator dims do not match slots");
  long n = dims_product(dims);
  long nr = sm.rest_count();
  std::vector<long> off(A.side());
  for (long i = 0; i < A.side(); ++i) off[i] = sm.sel_offset(i);
  std::vector<Eigen::Triplet<cplx>> trips;
  for (long j = 0; j < A.side(); ++j)
    for (long i = 0; i < A.side(); ++i) {
      cplx v = A.data(i, j);
      if (v == 0.0) continue;
      for (long r = 0; r < nr; ++r) {
        long base = sm.rest_offset(r);
        trips.emplace_back(base + off[i], base + off[j], v);
      }
    }
  SpMat S(n, n);
  S.setFromTriplets(trips.begin(), trips.end());
  return S;
}

inline TensorOp partial_trace(const TensorOp& A, int slot) {
  if (slot < 0 || slot >= A.slots()) throw Error(ErrorCode::ShapeMismatch, "partial_trace: bad slot");
  std::vector<int> rest_dims;
  std::vector<int> rest_slots;
  for (int k = 0; k < A.slots(); ++k)
    if (k != slot) {
      rest_dims.push_back(A.dims[k]);
      rest_slots.push_back(k);
    }
  auto st = strides_of(A.dims);
  long m = dims_product(rest_dims);
  auto rst = strides_of(rest_dims);
  std::vector<long> full(m);
  for (long r = 0; r < m; ++r) {
    long off = 0;
    for (size_t a = 0; a < rest_slots.size(); ++a) off += ((r / rst[a]) % rest_dims[a]) * st[rest_slots[a]];
    full[r] = off;
  }
  Mat R = Mat::Zero(m, m);
  for (int t = 0; t < A.dims[slot]; ++t) {
    long o = t * st[slot];
    for (long j = 0; j < m; ++j)
      for (long i = 0; i < m; ++i) R(i, j) += A.data(full[i] + o, full[j] + o);
  }
  if (rest_dims.empty()) rest_dims.push_back(1);
  return TensorOp(std::move(R), rest_dims);
}

// partial transposition of one slot, with an optional diagonal conjugation on that slot:
// entry (a,b) of the slot becomes X_(b,a) * w(b,a) where w(b,a) = d_b/d_a
template <class Weight>
TensorOp slot_transpose_weighted(const TensorOp& A, int slot, Weight w) {
  if (slot < 0 || slot >= A.slots()) throw Error(ErrorCode::ShapeMismatch, "slot_transpose: bad slot");
  auto st = strides_of(A.dims);
  long n = A.side();
  long sd = st[slot];
  int d = A.dims[slot];
  Mat R(n, n);
  for (long j = 0; j < n; ++j) {
    int b = static_cast<int>((j / sd) % d);
    long jb = j - b * sd;
    for (long i = 0; i < n; ++i) {
      int a = static_cast<int>((i / sd) % d);
      long ia = i - a * sd;
      cplx v = A.data(ia + b * sd, jb + a * sd);
      R(i, j) = (v == 0.0) ? v : v * w(a, b);
    }
  }
  return TensorOp(std::move(R), A.dims);
}

inline TensorOp slot_transpose(const TensorOp& A, int slot) {
  return slot_transpose_weighted(A, slot, [](int, int) { return cplx(1.0); });
}

// conjugation by the flip E12+E21 on a two-dimensional slot
inline TensorOp flip_slot(const TensorOp& A, int slot) {
  if (slot < 0 || slot >= A.slots() || A.dims[slot] != 2) throw Error(ErrorCode::ShapeMismatch, "flip_slot needs a 2-dim slot");
  auto st = strides_of(A.dims);
  long n = A.side();
  long sd = st[slot];
  std::vector<long> perm(n);
  for (long i = 0; i < n; ++i) perm[i] = (((i / sd) % 2) == 0) ? i + sd : i - sd;
  Mat R(n, n);
  for (long j = 0; j < n; ++j)
    for (long i = 0; i < n; ++i) R(i, j) = A.data(perm[i], perm[j]);
  return TensorOp(std::move(R), A.dims);
}

// header line with dims, then one `row col re im` line per nonzero
inline void dump(std::ostream& os, const TensorOp& A) {
  os << "dims";
  for (int d : A.dims) os << ' ' << d;
  os << '\n';
  for (long i = 0; i < A.side(); ++i)
    for (long j = 0; j < A.side(); ++j) {
      cplx v = A.data(i, j);
      if (v != 0.0) os << i << ' ' << j << ' ' << fmt_double(v.real()) << ' ' << fmt_double(v.imag()) << '\n';
    }
}

}  // namespace oqis
