#include "oqis/tensor.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace oqis;

namespace {

Mat rnd(int n, std::uint64_t seed) {
  Sampler S(seed);
  return S.random_matrix(n, n);
}

// multi-index <-> flat index, last slot fastest
std::vector<int> digits(long i, const std::vector<int>& d) {
  std::vector<int> out(d.size());
  for (int k = static_cast<int>(d.size()) - 1; k >= 0; --k) {
    out[k] = static_cast<int>(i % d[k]);
    i /= d[k];
  }
  return out;
}

long flat(const std::vector<int>& idx, const std::vector<int>& d) {
  long i = 0;
  for (size_t k = 0; k < d.size(); ++k) i = i * d[k] + idx[k];
  return i;
}

}  // namespace

TEST(Kron, IdentityAndUnits) {
  TensorOp I = kron(TensorOp::identity({2}), TensorOp::identity({2}));
  EXPECT_EQ(I.dims, (std::vector<int>{2, 2}));
  EXPECT_EQ(rel_residual(I.data, Mat::Identity(4, 4)), 0.0);
  // E12 (x) E21: <1|<2| ... |2>|1>, i.e. row 0*2+1 = 1, column 1*2+0 = 2
  Mat K = kron_mat(unit(1, 2), unit(2, 1));
  EXPECT_EQ(K(1, 2), cplx(1.0));
  EXPECT_EQ((K.array() != cplx(0.0)).count(), 1);
}

TEST(Kron, MixedProduct) {
  Mat A = rnd(2, 1), B = rnd(2, 2), C = rnd(2, 3), D = rnd(2, 4);
  EXPECT_LT(rel_residual(kron_mat(A, B) * kron_mat(C, D), kron_mat(A * C, B * D)), 1e-13);
}

TEST(Embed, FirstSlot) {
  Mat X = rnd(2, 5);
  TensorOp E = embed(op2(X), {0}, {2, 2});
  EXPECT_LT(rel_residual(E.data, kron_mat(X, Mat::Identity(2, 2))), 1e-15);
}

TEST(Embed, ReorderedSlotsMatchIndexOracle) {
  Mat X = rnd(2, 6), Y = rnd(2, 7);
  std::vector<int> full{2, 3, 2};
  TensorOp E = embed(TensorOp(kron_mat(X, Y), {2, 2}), {2, 0}, full);
  // X acts on slot 2, Y on slot 0, identity on slot 1
  Mat O = Mat::Zero(12, 12);
  for (long i = 0; i < 12; ++i)
    for (long j = 0; j < 12; ++j) {
      auto a = digits(i, full), b = digits(j, full);
      if (a[1] != b[1]) continue;
      O(i, j) = X(a[2], b[2]) * Y(a[0], b[0]);
    }
  EXPECT_LT(rel_residual(E.data, O), 1e-15);
}

TEST(Embed, IdentityStaysIdentity) {
  TensorOp E = embed(TensorOp::identity({3, 3}), {2, 0}, {3, 2, 3});
  EXPECT_EQ(rel_residual(E.data, Mat::Identity(18, 18)), 0.0);
}

TEST(Embed, SparseMatchesDense) {
  Mat X = rnd(2, 8);
  TensorOp A(kron_mat(rnd(3, 9), X), {3, 2});
  std::vector<int> full{3, 2, 2};
  Mat S = Mat(embed_sparse(A, {0, 2}, full));
  EXPECT_LT(rel_residual(S, embed(A, {0, 2}, full).data), 1e-15);
}

TEST(Embed, ShapeMismatchThrows) {
  EXPECT_THROW(embed(op2(rnd(2, 1)), {0}, {3, 2}), Error);
  EXPECT_THROW(embed(op2(rnd(2, 1)), {4}, {2, 2}), Error);
}

TEST(PartialTrace, ProductState) {
  Mat A = rnd(2, 10), B = rnd(3, 11);
  TensorOp T = partial_trace(TensorOp(kron_mat(A, B), {2, 3}), 0);
  EXPECT_EQ(T.dims, (std::vector<int>{3}));
  EXPECT_LT(rel_residual(T.data, A.trace() * B), 1e-14);
  TensorOp I = partial_trace(TensorOp::identity({2, 2}), 1);
  EXPECT_EQ(rel_residual(I.data, 2.0 * Mat::Identity(2, 2)), 0.0);
}

TEST(PartialTrace, MiddleSlotIndexOracle) {
  std::vector<int> d{2, 2, 2};
  Mat M = rnd(8, 12);
  TensorOp T = partial_trace(TensorOp(M, d), 1);
  Mat O = Mat::Zero(4, 4);
  for (int a0 = 0; a0 < 2; ++a0)
    for (int a2 = 0; a2 < 2; ++a2)
      for (int b0 = 0; b0 < 2; ++b0)
        for (int b2 = 0; b2 < 2; ++b2)
          for (int t = 0; t < 2; ++t) O(a0 * 2 + a2, b0 * 2 + b2) += M(flat({a0, t, a2}, d), flat({b0, t, b2}, d));
  EXPECT_LT(rel_residual(T.data, O), 1e-15);
}

TEST(PartialTrace, CyclicWithinSlot) {
  std::vector<int> d{3, 2};
  TensorOp A = embed(op2(rnd(3, 13)), {0}, d), B = embed(op2(rnd(3, 14)), {0}, d);
  TensorOp C(rnd(6, 15), d);
  EXPECT_LT(rel_residual(partial_trace(A * B * C, 0).data, partial_trace(B * C * A, 0).data), 1e-13);
}

TEST(SlotTranspose, Involution) {
  TensorOp A(rnd(6, 16), {3, 2});
  EXPECT_EQ(rel_residual(slot_transpose(slot_transpose(A, 0), 0).data, A.data), 0.0);
}

TEST(SlotTranspose, SecondSlotOfProduct) {
  Mat A = rnd(2, 17), B = rnd(3, 18);
  TensorOp T = slot_transpose(TensorOp(kron_mat(A, B), {2, 3}), 1);
  EXPECT_LT(rel_residual(T.data, kron_mat(A, B.transpose())), 1e-15);
}

TEST(SlotTranspose, BothSlotsIsFullTranspose) {
  TensorOp A(rnd(6, 19), {2, 3});
  EXPECT_LT(rel_residual(slot_transpose(slot_transpose(A, 0), 1).data, A.data.transpose()), 1e-15);
}

TEST(SlotTranspose, ProductReversal) {
  std::vector<int> d{2, 3};
  TensorOp X = embed(op2(rnd(3, 20)), {1}, d), Y = embed(op2(rnd(3, 21)), {1}, d);
  EXPECT_LT(rel_residual(slot_transpose(X * Y, 1).data, (slot_transpose(Y, 1) * slot_transpose(X, 1)).data), 1e-13);
}

TEST(FlipSlot, ConjugatesByFlip) {
  TensorOp A(rnd(4, 22), {2, 2});
  Mat Fl = kron_mat(Mat::Identity(2, 2), unit(1, 2) + unit(2, 1));
  EXPECT_LT(rel_residual(flip_slot(A, 1).data, Fl * A.data * Fl), 1e-15);
  EXPECT_THROW(flip_slot(TensorOp(rnd(6, 23), {3, 2}), 0), Error);
}

TEST(Residual, TensorShapes) {
  TensorOp A(rnd(4, 24), {2, 2}), B(rnd(4, 25), {4});
  EXPECT_THROW(rel_residual(A, B), Error);
  EXPECT_EQ(rel_residual(A, A), 0.0);
}

TEST(Dump, Format) {
  Mat m = Mat::Zero(2, 2);
  m(0, 1) = cplx(0.5, -1.0);
  std::ostringstream os;
  dump(os, op2(m));
  EXPECT_EQ(os.str(), "dims 2\n0 1 0.5 -1\n");
}
