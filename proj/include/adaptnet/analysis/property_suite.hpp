#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "adaptnet/analysis/operators.hpp"
#include "adaptnet/analysis/theory.hpp"
#include "adaptnet/errors.hpp"
#include "adaptnet/rng.hpp"

namespace adaptnet::analysis {

// Randomized algebra checks for the block-energy operators. Every inequality
// or identity the comparison-matrix machinery leans on is exercised on random
// complex instances; a violation report carries the worst instance's seed so
// the case replays in isolation.
struct PropertyResult {
  std::string name;
  double max_violation = 0.0;   // relative; <= 0 means clean
  std::uint64_t worst_seed = 0;
  long instances = 0;
};

struct PropertySuiteOptions {
  long instances = 200;
  int max_n = 8;
  int max_m = 4;
  std::uint64_t seed = 2026;
  int threads = 1;
  std::string corrupt;  // fault-injection hook: property name to sabotage
};

struct PropertySuiteReport {
  std::vector<PropertyResult> results;
  long instances = 0;

  bool passed(double tol = 1e-9) const {
    for (const auto& r : results)
      if (r.max_violation > tol) return false;
    return true;
  }

  const PropertyResult* worst() const {
    const PropertyResult* w = nullptr;
    for (const auto& r : results)
      if (!w || r.max_violation > w->max_violation) w = &r;
    return w;
  }
};

namespace detail {

using Cx = std::complex<double>;

inline Eigen::VectorXcd random_cvec(RngStream& rng, int len) {
  Eigen::VectorXcd v(len);
  for (int j = 0; j < len; ++j) v(j) = Cx(rng.gauss(), rng.gauss());
  return v;
}

inline Eigen::MatrixXcd random_cmat(RngStream& rng, int rows, int cols) {
  Eigen::MatrixXcd m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = Cx(rng.gauss(), rng.gauss());
  return m;
}

inline Eigen::MatrixXd random_left_stochastic(RngStream& rng, int n) {
  Eigen::MatrixXd a(n, n);
  for (int c = 0; c < n; ++c) {
    double sum = 0.0;
    for (int r = 0; r < n; ++r) {
      a(r, c) = rng.uniform() + 1e-3;
      sum += a(r, c);
    }
    a.col(c) /= sum;
  }
  return a;
}

// Relative one-sided violation of lhs <= rhs (entrywise).
inline double ineq_violation(const Eigen::VectorXd& lhs, const Eigen::VectorXd& rhs) {
  double worst = 0.0;
  for (int j = 0; j < lhs.size(); ++j) {
    double scale = std::max(1.0, std::abs(lhs(j)) + std::abs(rhs(j)));
    worst = std::max(worst, (lhs(j) - rhs(j)) / scale);
  }
  return worst;
}

inline double ineq_violation(const Eigen::MatrixXd& lhs, const Eigen::MatrixXd& rhs) {
  double worst = 0.0;
  for (int c = 0; c < lhs.cols(); ++c)
    for (int r = 0; r < lhs.rows(); ++r) {
      double scale = std::max(1.0, std::abs(lhs(r, c)) + std::abs(rhs(r, c)));
      worst = std::max(worst, (lhs(r, c) - rhs(r, c)) / scale);
    }
  return worst;
}

inline double eq_violation(const Eigen::VectorXd& lhs, const Eigen::VectorXd& rhs) {
  double worst = 0.0;
  for (int j = 0; j < lhs.size(); ++j) {
    double scale = std::max(1.0, std::abs(lhs(j)) + std::abs(rhs(j)));
    worst = std::max(worst, std::abs(lhs(j) - rhs(j)) / scale);
  }
  return worst;
}

inline double eq_violation(const Eigen::MatrixXd& lhs, const Eigen::MatrixXd& rhs) {
  double worst = 0.0;
  for (int c = 0; c < lhs.cols(); ++c)
    for (int r = 0; r < lhs.rows(); ++r) {
      double scale = std::max(1.0, std::abs(lhs(r, c)) + std::abs(rhs(r, c)));
      worst = std::max(worst, std::abs(lhs(r, c) - rhs(r, c)) / scale);
    }
  return worst;
}

inline double eq_violation(double lhs, double rhs) {
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs) + std::abs(rhs));
}

inline Eigen::MatrixXcd kron_identity(const Eigen::MatrixXcd& x, int m) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(x.rows() * m, x.cols() * m);
  for (int c = 0; c < x.cols(); ++c)
    for (int r = 0; r < x.rows(); ++r)
      out.block(r * m, c * m, m, m) =
          x(r, c) * Eigen::MatrixXcd::Identity(m, m);
  return out;
}

// Random Jordan-form contraction: block sizes partition the dimension,
// eigenvalue magnitudes stay below 0.95, superdiagonal entries are 1.
inline Eigen::MatrixXcd random_jordan(RngStream& rng, int q, double* top_mag) {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(q, q);
  *top_mag = 0.0;
  int at = 0;
  while (at < q) {
    int block = 1 + static_cast<int>(rng.uniform() * 3);
    block = std::min(block, q - at);
    double mag = 0.95 * rng.uniform();
    double ang = 2.0 * 3.141592653589793 * rng.uniform();
    Cx ev = std::polar(mag, ang);
    *top_mag = std::max(*top_mag, mag);
    for (int j = 0; j < block; ++j) {
      d(at + j, at + j) = ev;
      if (j + 1 < block) d(at + j, at + j + 1) = 1.0;
    }
    at += block;
  }
  return d;
}

struct PropertyAccumulator {
  std::vector<PropertyResult>* results;
  std::uint64_t seed = 0;

  void note(int index, double violation) {
    PropertyResult& r = (*results)[index];
    if (violation > r.max_violation) {
      r.max_violation = violation;
      r.worst_seed = seed;
    }
    ++r.instances;
  }
};

inline void run_property_instance(std::uint64_t instance_seed, int max_n,
                                  int max_m, PropertyAccumulator& acc) {
  RngStream rng(instance_seed);
  const int n = 1 + static_cast<int>(rng.uniform() * max_n) % max_n;
  const int m = 1 + static_cast<int>(rng.uniform() * max_m) % max_m;

  Eigen::VectorXcd x = random_cvec(rng, n * m);
  Eigen::VectorXcd y = random_cvec(rng, n * m);
  Eigen::MatrixXcd bx = random_cmat(rng, n * m, n * m);
  Eigen::MatrixXcd by = random_cmat(rng, n * m, n * m);

  // nonnegativity
  {
    double v = std::max(-energy(x, m).minCoeff(), -norm_matrix(bx, m).minCoeff());
    acc.note(0, v);
  }
  // scaling: energy(ax) = |a|^2 energy(x); norm(aX) = |a| norm(X)
  {
    Cx a(rng.gauss(), rng.gauss());
    double v = eq_violation(energy(Eigen::VectorXcd(a * x), m),
                            Eigen::VectorXd(std::norm(a) * energy(x, m)));
    v = std::max(v,
                 eq_violation(norm_matrix(Eigen::MatrixXcd(a * bx), m),
                              Eigen::MatrixXd(std::abs(a) * norm_matrix(bx, m))));
    acc.note(1, v);
  }
  // convexity for both operators
  {
    double c = rng.uniform();
    Eigen::VectorXcd mix = c * x + (1.0 - c) * y;
    Eigen::MatrixXcd mixm = c * bx + (1.0 - c) * by;
    double v = ineq_violation(
        energy(mix, m),
        Eigen::VectorXd(c * energy(x, m) + (1.0 - c) * energy(y, m)));
    v = std::max(
        v, ineq_violation(norm_matrix(mixm, m),
                          Eigen::MatrixXd(c * norm_matrix(bx, m) +
                                          (1.0 - c) * norm_matrix(by, m))));
    acc.note(2, v);
  }
  // parallelogram: energy(x+y) + energy(x-y) = 2 energy(x) + 2 energy(y);
  // this is the deterministic face of additivity under zero cross-moments
  {
    Eigen::VectorXd lhs =
        energy(Eigen::VectorXcd(x + y), m) + energy(Eigen::VectorXcd(x - y), m);
    Eigen::VectorXd rhs = 2.0 * energy(x, m) + 2.0 * energy(y, m);
    acc.note(3, eq_violation(lhs, rhs));
  }
  // triangle inequality for the norm matrix
  {
    double v = ineq_violation(
        norm_matrix(Eigen::MatrixXcd(bx + by), m),
        Eigen::MatrixXd(norm_matrix(bx, m) + norm_matrix(by, m)));
    acc.note(4, v);
  }
  // submultiplicativity
  {
    double v = ineq_violation(
        norm_matrix(Eigen::MatrixXcd(bx * by), m),
        Eigen::MatrixXd(norm_matrix(bx, m) * norm_matrix(by, m)));
    acc.note(5, v);
  }
  // kronecker collapse: norm(X (x) I_m) = entrywise |X|; energy(a (x) b)
  {
    Eigen::MatrixXcd small = random_cmat(rng, n, n);
    double v = eq_violation(norm_matrix(kron_identity(small, m), m),
                            Eigen::MatrixXd(small.cwiseAbs()));
    Eigen::VectorXcd a = random_cvec(rng, n);
    Eigen::VectorXcd bvec = random_cvec(rng, m);
    Eigen::VectorXcd kron(n * m);
    for (int k = 0; k < n; ++k) kron.segment(k * m, m) = a(k) * bvec;
    v = std::max(v, eq_violation(energy(kron, m),
                                 Eigen::VectorXd(bvec.squaredNorm() *
                                                 energy(a, 1))));
    acc.note(6, v);
  }
  // norm identities: max-block norm and total energy
  {
    Eigen::VectorXd e = energy(x, m);
    double v = eq_violation(e.maxCoeff(), [&] {
      double mx = 0.0;
      for (int k = 0; k < n; ++k)
        mx = std::max(mx, x.segment(k * m, m).norm());
      return mx * mx;
    }());
    v = std::max(v, eq_violation(e.sum(), x.squaredNorm()));
    acc.note(7, v);
  }
  // order preservation under nonnegative matrices
  {
    Eigen::MatrixXd f = Eigen::MatrixXd::NullaryExpr(
        n, n, [&](Eigen::Index, Eigen::Index) { return rng.uniform(); });
    Eigen::VectorXd ex = energy(x, m);
    Eigen::VectorXd ey = ex + Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) {
                           return rng.uniform();
                         });
    double v = ineq_violation(Eigen::VectorXd(f * ex), Eigen::VectorXd(f * ey));
    Eigen::MatrixXd gmat =
        f + Eigen::MatrixXd::NullaryExpr(
                n, n, [&](Eigen::Index, Eigen::Index) { return rng.uniform(); });
    v = std::max(v, ineq_violation(Eigen::VectorXd(f * ex),
                                   Eigen::VectorXd(gmat * ex)));
    acc.note(8, v);
  }
  // rank-one envelopes of the norm matrix
  {
    Eigen::MatrixXd nm = norm_matrix(bx, m);
    double inf_n = nm.rowwise().sum().maxCoeff();
    double one_n = nm.colwise().sum().maxCoeff();
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, n);
    double v = ineq_violation(nm, Eigen::MatrixXd(one_n * ones));
    v = std::max(v, ineq_violation(nm, Eigen::MatrixXd(inf_n * ones)));
    acc.note(9, v);
  }
  // variance relation: energy(Q x) <= ||norm(Q)||_inf norm(Q) energy(x),
  // and its rank-one corollary
  {
    Eigen::MatrixXd nq = norm_matrix(bx, m);
    double inf_n = nq.rowwise().sum().maxCoeff();
    Eigen::VectorXd lhs = energy(Eigen::VectorXcd(bx * x), m);
    double v = ineq_violation(lhs, Eigen::VectorXd(inf_n * nq * energy(x, m)));
    double total = energy(x, m).sum();
    v = std::max(v, ineq_violation(
                        lhs, Eigen::VectorXd(Eigen::VectorXd::Constant(
                                 n, inf_n * inf_n * total))));
    acc.note(10, v);
  }
  // combination contraction: energy((A^T (x) I) x) <= A^T energy(x)
  {
    Eigen::MatrixXd a = random_left_stochastic(rng, n);
    Eigen::MatrixXcd lift = kron_identity(a.transpose().cast<Cx>(), m);
    double v = ineq_violation(energy(Eigen::VectorXcd(lift * x), m),
                              Eigen::VectorXd(a.transpose() * energy(x, m)));
    acc.note(11, v);
  }
  // update-map energy Lipschitz bound on a random quadratic family
  {
    std::vector<Eigen::MatrixXd> rs;
    std::vector<Eigen::VectorXd> mins;
    std::vector<double> nvars;
    double lu = 0.0;
    for (int k = 0; k < n; ++k) {
      Eigen::MatrixXd g = Eigen::MatrixXd::NullaryExpr(
          m, m, [&](Eigen::Index, Eigen::Index) { return rng.gauss(); });
      Eigen::MatrixXd r = g.transpose() * g / static_cast<double>(m);
      rs.push_back(r);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r);
      lu = std::max(lu, eig.eigenvalues().maxCoeff());
      mins.push_back(Eigen::VectorXd::NullaryExpr(
          m, [&](Eigen::Index) { return rng.gauss(); }));
      nvars.push_back(0.0);
    }
    models::AgentModel mod = models::make_quadratic_model(rs, mins, nvars);
    Eigen::VectorXcd xs = random_cvec(rng, n * m), ys = random_cvec(rng, n * m);
    Eigen::VectorXcd sx(n * m), sy(n * m);
    for (int k = 0; k < n; ++k) {
      // linear maps extend to complex arguments coordinatewise
      sx.segment(k * m, m) = rs[k].cast<Cx>() * (xs.segment(k * m, m) -
                                                 mins[k].cast<Cx>());
      sy.segment(k * m, m) = rs[k].cast<Cx>() * (ys.segment(k * m, m) -
                                                 mins[k].cast<Cx>());
    }
    double v = ineq_violation(
        energy(Eigen::VectorXcd(sx - sy), m),
        Eigen::VectorXd(lu * lu * energy(Eigen::VectorXcd(xs - ys), m)));
    acc.note(12, v);

    // centroid-map sandwich under a safe step-size
    Eigen::VectorXd p(n);
    for (int k = 0; k < n; ++k) p(k) = rng.uniform() + 0.05;
    double p1 = p.sum();
    Eigen::MatrixXd hc = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < n; ++k) hc += p(k) * rs[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eh(hc);
    double llc = eh.eigenvalues().minCoeff();
    if (llc > 1e-9) {
      double mu = rng.uniform() * llc / (p1 * p1 * lu * lu);
      auto tc = [&](const Eigen::VectorXd& w) {
        Eigen::VectorXd out = w;
        for (int k = 0; k < n; ++k)
          out -= mu * p(k) * (rs[k] * (w - mins[k]));
        return out;
      };
      Eigen::VectorXd wx = Eigen::VectorXd::NullaryExpr(
          m, [&](Eigen::Index) { return rng.gauss(); });
      Eigen::VectorXd wy = Eigen::VectorXd::NullaryExpr(
          m, [&](Eigen::Index) { return rng.gauss(); });
      double lhs = (tc(wx) - tc(wy)).squaredNorm();
      double dist = (wx - wy).squaredNorm();
      double gc = gamma_c_value(mu, llc, lu, p1);
      double lo = (1.0 - 2.0 * mu * p1 * lu) * dist;
      double hi = gc * gc * dist;
      double sc = std::max(1.0, std::abs(lhs) + std::abs(hi));
      double v2 = std::max((lhs - hi) / sc, (lo - lhs) / sc);
      acc.note(13, v2);
    } else {
      acc.note(13, 0.0);
    }
  }
  // stable Jordan recursions, scalar and block-lifted; includes the
  // all-zero contraction as an explicit edge case
  {
    int q = std::max(1, n - 1);
    double top = 0.0;
    Eigen::MatrixXcd dl = random_jordan(rng, q, &top);
    if (rng.uniform() < 0.1) {  // D_L = 0 edge case
      dl.setZero();
      top = 0.0;
    }
    Eigen::MatrixXd ge = Eigen::MatrixXd::Zero(q, q);
    for (int j = 0; j < q; ++j) {
      ge(j, j) = top;
      if (j + 1 < q) ge(j, j + 1) = 2.0 / (1.0 - top);
    }
    double tail = 2.0 / (1.0 - top);
    Eigen::VectorXcd xp = random_cvec(rng, q), yp = random_cvec(rng, q);
    double v = ineq_violation(
        energy(Eigen::VectorXcd(dl * xp + yp), 1),
        Eigen::VectorXd(ge * energy(xp, 1) + tail * energy(yp, 1)));
    Eigen::MatrixXcd lift = kron_identity(dl, m);
    Eigen::VectorXcd xe = random_cvec(rng, q * m), ye = random_cvec(rng, q * m);
    v = std::max(v, ineq_violation(
                        energy(Eigen::VectorXcd(lift * xe + ye), m),
                        Eigen::VectorXd(ge * energy(xe, m) +
                                        tail * energy(ye, m))));
    acc.note(14, v);
  }
}

inline const std::vector<std::string>& property_names() {
  static const std::vector<std::string> names = {
      "nonnegativity",
      "scaling",
      "convexity",
      "parallelogram-additivity",
      "triangle",
      "submultiplicativity",
      "kronecker-collapse",
      "norm-identities",
      "order-preservation",
      "rank-one-envelopes",
      "variance-relation",
      "combination-contraction",
      "update-map-lipschitz",
      "centroid-map-sandwich",
      "stable-jordan-recursion",
  };
  return names;
}

}  // namespace detail

inline PropertySuiteReport operator_property_suite(
    const PropertySuiteOptions& opts = {}) {
  if (opts.instances < 1)
    throw validation_error("property suite: nothing tested (zero instances)");
  if (opts.max_n < 1 || opts.max_m < 1)
    throw validation_error("property suite: dimensions must be positive");

  const auto& names = detail::property_names();
  const int n_props = static_cast<int>(names.size());
  const int n_threads =
      std::max(1, std::min<int>(opts.threads > 0
                                    ? opts.threads
                                    : static_cast<int>(
                                          std::thread::hardware_concurrency()),
                                16));

  std::vector<std::vector<PropertyResult>> partial(
      n_threads, std::vector<PropertyResult>(n_props));
  for (auto& vec : partial)
    for (int j = 0; j < n_props; ++j) vec[j].name = names[j];

  auto worker = [&](int tid) {
    detail::PropertyAccumulator acc{&partial[tid], 0};
    for (long i = tid; i < opts.instances; i += n_threads) {
      acc.seed = mix64(opts.seed ^ mix64(static_cast<std::uint64_t>(i) + 0x9e37ULL));
      detail::run_property_instance(acc.seed, opts.max_n, opts.max_m, acc);
    }
  };
  if (n_threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  PropertySuiteReport report;
  report.instances = opts.instances;
  report.results.assign(n_props, PropertyResult{});
  for (int j = 0; j < n_props; ++j) {
    report.results[j].name = names[j];
    for (int t = 0; t < n_threads; ++t) {
      const PropertyResult& p = partial[t][j];
      report.results[j].instances += p.instances;
      if (p.max_violation > report.results[j].max_violation) {
        report.results[j].max_violation = p.max_violation;
        report.results[j].worst_seed = p.worst_seed;
      }
    }
    if (!opts.corrupt.empty() && opts.corrupt == names[j])
      report.results[j].max_violation =
          std::max(report.results[j].max_violation, 1e-3);
  }
  return report;
}

}  // namespace adaptnet::analysis
