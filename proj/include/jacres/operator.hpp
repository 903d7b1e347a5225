#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <vector>

#include "jacres/errors.hpp"
#include "jacres/periodic.hpp"

namespace jacres {

// Half-line Jacobi operator that agrees with a p-periodic block from index
// s+1 on: coefficients (b_1,a_1,...,b_s,a_s) are free, then the tail repeats.
struct EventuallyPeriodicOperator {
  std::vector<double> head_a;
  std::vector<double> head_b;
  PeriodicBlock tail;

  int s() const { return static_cast<int>(head_a.size()); }

  void check() const {
    tail.check();
    if (head_a.size() != head_b.size())
      throw Error(ErrorCode::BadInput, "head_a and head_b must have equal length");
    for (double v : head_a)
      if (!(v > 0.0)) throw Error(ErrorCode::BadInput, "offdiagonal entries must be positive");
  }

  // 1-based coefficient access; indices <= 0 continue the tail periodically
  // to the left (used when a two-sided extension is needed).
  double a(int n) const {
    if (n >= 1 && n <= s()) return head_a[static_cast<size_t>(n - 1)];
    int p = tail.p();
    int idx = ((n - s() - 1) % p + p) % p;
    return tail.a[static_cast<size_t>(idx)];
  }
  double b(int n) const {
    if (n >= 1 && n <= s()) return head_b[static_cast<size_t>(n - 1)];
    int p = tail.p();
    int idx = ((n - s() - 1) % p + p) % p;
    return tail.b[static_cast<size_t>(idx)];
  }

  // Position (in the order b_1, a_1, b_2, a_2, ...) of the last coefficient
  // that deviates from the periodic extension of the tail; 0 when exactly
  // periodic. Governs deg a = k + p - 1.
  int class_index(double tol = 1e-12) const {
    int p = tail.p();
    auto tail_a = [&](int n) {
      int idx = ((n - s() - 1) % p + p) % p;
      return tail.a[static_cast<size_t>(idx)];
    };
    auto tail_b = [&](int n) {
      int idx = ((n - s() - 1) % p + p) % p;
      return tail.b[static_cast<size_t>(idx)];
    };
    for (int n = s(); n >= 1; --n) {
      if (std::abs(a(n) - tail_a(n)) > tol) return 2 * n;
      if (std::abs(b(n) - tail_b(n)) > tol) return 2 * n - 1;
    }
    return 0;
  }
};

inline EventuallyPeriodicOperator periodic_operator(const PeriodicBlock& blk) {
  return {{}, {}, blk};
}

// Deviation sequence of Delta(J) from the shift identity: with Delta the
// tail's discriminant, Delta(J) partitioned into p x p blocks has diagonal
// blocks B_n and superdiagonal blocks A_n, and d_n = ||A_n - I||_F + ||B_n||_F
// vanishes for every n iff the operator lies on the torus of its band set.
// The matrix is extended periodically to the left so no spurious boundary
// defect enters block 1.
inline std::vector<double> magic_check(const EventuallyPeriodicOperator& op, int n_max = 10) {
  op.check();
  if (n_max < 1) throw Error(ErrorCode::BadInput, "n_max must be positive");
  int p = op.tail.p();
  Poly delta = discriminant(op.tail);

  int left = p + 2;                    // periodic extension rows above index 1
  int rows = p * n_max + p;            // blocks 1..n_max plus one superdiagonal block
  int right = p + 2;                   // safety margin against truncation
  int n_dim = left + rows + right;

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n_dim, n_dim);
  for (int i = 0; i < n_dim; ++i) {
    int idx = i - left + 1;  // operator index of row i
    J(i, i) = op.b(idx);
    if (i + 1 < n_dim) {
      J(i, i + 1) = op.a(idx);
      J(i + 1, i) = op.a(idx);
    }
  }

  const std::vector<double>& c = delta.coeffs();
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n_dim, n_dim) * c.back();
  for (size_t i = c.size() - 1; i-- > 0;) {
    P = P * J;
    P.diagonal().array() += c[i];
  }

  std::vector<double> d(static_cast<size_t>(n_max));
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p, p);
  for (int n = 1; n <= n_max; ++n) {
    int r0 = left + (n - 1) * p;
    Eigen::MatrixXd Bn = P.block(r0, r0, p, p);
    Eigen::MatrixXd An = P.block(r0, r0 + p, p, p);
    d[static_cast<size_t>(n - 1)] = (An - eye).norm() + Bn.norm();
  }
  return d;
}

}  // namespace jacres
