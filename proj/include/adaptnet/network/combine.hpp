#pragma once

#include <Eigen/Dense>
#include <string>

#include "adaptnet/errors.hpp"
#include "adaptnet/network/policy.hpp"
#include "adaptnet/network/topology.hpp"

namespace adaptnet::network {

// Three-stage combination layout. `product` = a1 * a0 * a2 drives every
// spectral quantity; the factors drive the per-step data flow.
struct CombinationMatrices {
  Eigen::MatrixXd a1, a0, a2;
  Eigen::MatrixXd product;
};

inline void check_left_stochastic(const Eigen::MatrixXd& a, const char* name,
                                  double tol = 1e-12) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw validation_error(std::string("compose: ") + name + " must be square");
  if ((a.array() < 0.0).any())
    throw validation_error(std::string("compose: ") + name + " has negative entries");
  Eigen::VectorXd cols = a.colwise().sum();
  if ((cols.array() - 1.0).abs().maxCoeff() > tol)
    throw validation_error(std::string("compose: ") + name +
                           " columns do not sum to one");
}

inline CombinationMatrices compose(const Eigen::MatrixXd& a1,
                                   const Eigen::MatrixXd& a0,
                                   const Eigen::MatrixXd& a2) {
  check_left_stochastic(a1, "first stage");
  check_left_stochastic(a0, "middle stage");
  check_left_stochastic(a2, "last stage");
  if (a0.rows() != a1.rows() || a2.rows() != a1.rows())
    throw validation_error("compose: stage sizes differ");
  CombinationMatrices m{a1, a0, a2, a1 * a0 * a2};
  // Exact in theory; rounding in the product keeps it within a few ulp.
  check_left_stochastic(m.product, "product", 1e-12);
  return m;
}

inline CombinationMatrices compose_single(const Eigen::MatrixXd& a) {
  check_left_stochastic(a, "combination matrix");
  const auto n = a.rows();
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  return CombinationMatrices{eye, a, eye, a};
}

struct PrimitivityReport {
  bool primitive = false;
  int witness_power = 0;  // smallest j with (support(A))^j all-positive
};

// Support-pattern powering up to the universal bound (n-1)^2 + 1. Boolean
// products avoid the underflow a float chain would hit for large powers.
inline PrimitivityReport check_primitive(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  if (n < 1 || a.cols() != n)
    throw validation_error("primitivity: matrix must be square");
  BoolMatrix base(n, n), acc(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) base(r, c) = a(r, c) > 0.0;
  acc = base;
  const int bound = (n - 1) * (n - 1) + 1;
  for (int j = 1; j <= bound; ++j) {
    if (acc.all()) return {true, j};
    BoolMatrix next = BoolMatrix::Constant(n, n, false);
    for (int r = 0; r < n; ++r)
      for (int k = 0; k < n; ++k)
        if (acc(r, k))
          for (int c = 0; c < n; ++c)
            if (base(k, c)) next(r, c) = true;
    acc = next;
  }
  return {false, 0};
}

}  // namespace adaptnet::network
