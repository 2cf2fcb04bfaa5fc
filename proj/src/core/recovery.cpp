#include "core/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vesd {

VesdGrid VesdGrid::make(double a0, double b0, double h) {
  require(0 < a0 && a0 < b0, ErrorClass::invalid_input,
          "grid interval must satisfy 0 < a0 < b0");
  require(h > 0 && std::isfinite(h), ErrorClass::invalid_input,
          "grid step must be positive");
  const auto t = static_cast<std::int64_t>(std::floor((b0 - a0) / h + 1e-12)) + 1;
  require(t >= 1 && t <= 2'000'000, ErrorClass::invalid_input,
          "grid size out of range");
  VesdGrid g;
  g.a0 = a0;
  g.b0 = b0;
  g.h = h;
  g.points.resize(static_cast<std::size_t>(t));
  for (std::int64_t i = 0; i < t; ++i)
    g.points[static_cast<std::size_t>(i)] =
        std::min(a0 + static_cast<double>(i) * h, b0);
  return g;
}

Eigen::MatrixXd moment_matrix(const VesdGrid& grid, int k) {
  require(k >= 1 && k <= tol::moment_cap, ErrorClass::invalid_input,
          "moment order k out of range");
  const auto t = static_cast<Eigen::Index>(grid.points.size());
  Eigen::MatrixXd m(k, t);
  for (Eigen::Index i = 0; i < t; ++i) {
    double pw = 1.0;
    for (int j = 0; j < k; ++j) {
      pw *= grid.points[static_cast<std::size_t>(i)];
      m(j, i) = pw;
    }
  }
  return m;
}

namespace {

// Primal revised simplex specialized to the l1 moment-matching program
//   min 1.u + 1.v   s.t.  q >= 0, u,v >= 0,
//       sum_i q_i = 1                      (row 0)
//       R q - u + v = target               (rows 1..k)
// Columns are indexed q (0..t-1), u (t..t+k-1), v (t+k..t+2k-1).
// Pricing is Dantzig (most negative reduced cost) while the objective makes
// progress; on a degenerate plateau it falls back to Bland's smallest-index
// rule, which provably leaves the plateau, and resumes Dantzig afterwards.
// Both rules are deterministic, so solutions are byte-stable.
struct L1Simplex {
  const Eigen::MatrixXd& rows;  // k x t scaled moment rows
  const Eigen::VectorXd& target;
  int iter_cap;

  Eigen::Index t() const { return rows.cols(); }
  int k() const { return static_cast<int>(rows.rows()); }
  int m() const { return k() + 1; }
  Eigen::Index ncols() const { return t() + 2 * k(); }

  Eigen::VectorXd column(Eigen::Index c) const {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(m());
    if (c < t()) {
      a(0) = 1.0;
      a.tail(k()) = rows.col(c);
    } else if (c < t() + k()) {
      a(1 + (c - t())) = -1.0;
    } else {
      a(1 + (c - t() - k())) = 1.0;
    }
    return a;
  }

  double cost(Eigen::Index c) const { return c < t() ? 0.0 : 1.0; }

  struct Out {
    Eigen::VectorXd q;
    double objective = 0;
    int iterations = 0;
  };

  Out solve() const {
    const Eigen::Index tt = t();
    const int kk = k(), mm = m();
    Eigen::VectorXd b(mm);
    b(0) = 1.0;
    b.tail(kk) = target;

    std::vector<Eigen::Index> basis(mm);
    basis[0] = 0;  // q at the first grid point
    for (int j = 0; j < kk; ++j) {
      const double res = rows(j, 0) - target(j);
      basis[1 + j] = (res >= 0) ? tt + j : tt + kk + j;  // u_j or v_j
    }

    Eigen::MatrixXd binv;
    Eigen::VectorXd xb, y;
    std::vector<char> in_basis(static_cast<std::size_t>(ncols()), 0);
    for (auto c : basis) in_basis[static_cast<std::size_t>(c)] = 1;

    auto refactorize = [&]() {
      Eigen::MatrixXd bm(mm, mm);
      for (int i = 0; i < mm; ++i) bm.col(i) = column(basis[static_cast<std::size_t>(i)]);
      binv = bm.partialPivLu().inverse();
      xb = binv * b;
    };
    refactorize();

    int it = 0;
    int stalled = 0;  // iterations since the objective last improved
    double best_obj = std::numeric_limits<double>::infinity();
    for (; it < iter_cap; ++it) {
      Eigen::VectorXd cb(mm);
      for (int i = 0; i < mm; ++i) cb(i) = cost(basis[static_cast<std::size_t>(i)]);
      y = binv.transpose() * cb;

      const double obj_now = cb.dot(xb);
      if (obj_now < best_obj - 1e-13) {
        best_obj = obj_now;
        stalled = 0;
      } else {
        ++stalled;
      }
      const bool bland = stalled >= 50;

      Eigen::Index enter = -1;
      {
        // q block: rc_i = -(y0 + rows.col(i) . y_tail)
        Eigen::VectorXd rcq =
            -(Eigen::VectorXd::Constant(tt, y(0)) + rows.transpose() * y.tail(kk));
        if (bland) {
          // smallest index with negative reduced cost
          for (Eigen::Index i = 0; i < tt; ++i)
            if (!in_basis[static_cast<std::size_t>(i)] && rcq(i) < -1e-9) {
              enter = i;
              break;
            }
          if (enter < 0)
            for (int j = 0; j < kk && enter < 0; ++j)
              if (!in_basis[static_cast<std::size_t>(tt + j)] && 1.0 + y(1 + j) < -1e-9)
                enter = tt + j;
          if (enter < 0)
            for (int j = 0; j < kk && enter < 0; ++j)
              if (!in_basis[static_cast<std::size_t>(tt + kk + j)] && 1.0 - y(1 + j) < -1e-9)
                enter = tt + kk + j;
        } else {
          // most negative reduced cost, ties to the smaller index
          double best = -1e-9;
          for (Eigen::Index i = 0; i < tt; ++i)
            if (!in_basis[static_cast<std::size_t>(i)] && rcq(i) < best) {
              best = rcq(i);
              enter = i;
            }
          for (int j = 0; j < kk; ++j) {
            if (!in_basis[static_cast<std::size_t>(tt + j)] && 1.0 + y(1 + j) < best) {
              best = 1.0 + y(1 + j);
              enter = tt + j;
            }
            if (!in_basis[static_cast<std::size_t>(tt + kk + j)] && 1.0 - y(1 + j) < best) {
              best = 1.0 - y(1 + j);
              enter = tt + kk + j;
            }
          }
        }
      }
      if (enter < 0) break;  // optimal

      Eigen::VectorXd dir = binv * column(enter);
      double theta = std::numeric_limits<double>::infinity();
      int leave_pos = -1;
      for (int i = 0; i < mm; ++i) {
        if (dir(i) > 1e-11) {
          const double ratio = std::max(xb(i), 0.0) / dir(i);
          if (ratio < theta - 1e-13 ||
              (ratio < theta + 1e-13 &&
               (leave_pos < 0 || basis[static_cast<std::size_t>(i)] <
                                     basis[static_cast<std::size_t>(leave_pos)]))) {
            theta = ratio;
            leave_pos = i;
          }
        }
      }
      require(leave_pos >= 0, ErrorClass::numerical,
              "moment LP claims an unbounded direction");

      in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(leave_pos)])] = 0;
      basis[static_cast<std::size_t>(leave_pos)] = enter;
      in_basis[static_cast<std::size_t>(enter)] = 1;
      refactorize();
    }

    Out out;
    out.iterations = it;
    out.q = Eigen::VectorXd::Zero(tt);
    double obj = 0;
    for (int i = 0; i < mm; ++i) {
      const double v = xb(i);
      require(v > -1e-8, ErrorClass::numerical, "moment LP basis went infeasible");
      const Eigen::Index c = basis[static_cast<std::size_t>(i)];
      if (c < tt)
        out.q(c) = std::max(v, 0.0);
      else
        obj += std::max(v, 0.0);
    }
    out.objective = obj;
    if (it >= iter_cap)
      fail(ErrorClass::solver_stall,
           "moment LP iteration cap exceeded; incumbent objective " +
               std::to_string(obj));
    return out;
  }
};

}  // namespace

VesdEstimate solve_moment_lp(const VesdGrid& grid, const MomentVector& moments,
                             bool weighted, int iter_cap) {
  const int k = moments.k();
  require(k >= 1 && k <= tol::moment_cap, ErrorClass::invalid_input,
          "moment order k out of range");
  require(!grid.points.empty(), ErrorClass::invalid_input, "empty grid");

  Eigen::MatrixXd m = moment_matrix(grid, k);
  Eigen::VectorXd target(k);
  Eigen::MatrixXd rows = m;
  if (weighted) {
    require(moments.truncated.has_value(), ErrorClass::invalid_input,
            "weighted matching needs truncated moments");
    for (int j = 0; j < k; ++j) {
      const double tj = (*moments.truncated)[static_cast<std::size_t>(j)];
      require(tj > 0, ErrorClass::invalid_input,
              "weighted matching needs strictly positive truncated moments");
      rows.row(j) /= tj;
      target(j) = 1.0;
    }
  } else {
    for (int j = 0; j < k; ++j) target(j) = moments.raw[static_cast<std::size_t>(j)];
  }

  L1Simplex lp{rows, target, iter_cap};
  auto sol = lp.solve();

  VesdEstimate est;
  est.grid = grid;
  est.q = sol.q;
  est.weighted = weighted;
  est.iterations = sol.iterations;
  // honest residual of the returned point (recomputed, not the basis value)
  est.residual = (rows * sol.q - target).cwiseAbs().sum();

  const double qsum = est.q.sum();
  require(std::abs(qsum - 1.0) <= 1e-9, ErrorClass::numerical,
          "recovered masses do not sum to 1");
  require(est.q.minCoeff() >= 0.0, ErrorClass::numerical,
          "recovered masses went negative");
  // feasibility witness: the optimum can never beat the uniform distribution
  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(
      rows.cols(), 1.0 / static_cast<double>(rows.cols()));
  const double witness = (rows * uniform - target).cwiseAbs().sum();
  require(est.residual <= witness + 1e-9, ErrorClass::numerical,
          "LP optimum exceeds the uniform-distribution witness");
  return est;
}

double plugin_functional(const VesdEstimate& est, Functional f, int power_j) {
  const auto t = static_cast<Eigen::Index>(est.grid.points.size());
  require(est.q.size() == t, ErrorClass::invalid_input,
          "estimate/grid size mismatch");
  double acc = 0;
  switch (f) {
    case Functional::inverse:
      for (Eigen::Index i = 0; i < t; ++i)
        acc += est.q(i) / est.grid.points[static_cast<std::size_t>(i)];
      break;
    case Functional::identity:
      for (Eigen::Index i = 0; i < t; ++i)
        acc += est.q(i) * est.grid.points[static_cast<std::size_t>(i)];
      break;
    case Functional::power: {
      require(power_j >= 1 && power_j <= tol::moment_cap,
              ErrorClass::invalid_input, "functional power out of range");
      for (Eigen::Index i = 0; i < t; ++i)
        acc += est.q(i) *
               std::pow(est.grid.points[static_cast<std::size_t>(i)], power_j);
      break;
    }
  }
  return acc;
}

DiscreteDistribution to_distribution(const VesdEstimate& est) {
  DiscreteDistribution d;
  d.points = est.grid.points;
  d.weights.assign(est.q.data(), est.q.data() + est.q.size());
  return d;
}

namespace {

void check_distribution(const DiscreteDistribution& d) {
  require(!d.points.empty() && d.points.size() == d.weights.size(),
          ErrorClass::invalid_input, "malformed discrete distribution");
  double sum = 0;
  for (double w : d.weights) {
    require(w >= -1e-12, ErrorClass::invalid_input,
            "distribution weights must be nonnegative");
    sum += w;
  }
  require(std::abs(sum - 1.0) <= 1e-9, ErrorClass::invalid_input,
          "distribution weights must sum to 1");
}

}  // namespace

double wasserstein1(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  check_distribution(a);
  check_distribution(b);
  std::vector<std::pair<double, double>> ea, eb;  // (point, weight), sorted
  ea.reserve(a.points.size());
  eb.reserve(b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i)
    ea.emplace_back(a.points[i], a.weights[i]);
  for (std::size_t i = 0; i < b.points.size(); ++i)
    eb.emplace_back(b.points[i], b.weights[i]);
  std::sort(ea.begin(), ea.end());
  std::sort(eb.begin(), eb.end());

  double fa = 0, fb = 0, dist = 0;
  std::size_t ia = 0, ib = 0;
  double x = std::min(ea.front().first, eb.front().first);
  while (ia < ea.size() || ib < eb.size()) {
    while (ia < ea.size() && ea[ia].first <= x) fa += ea[ia++].second;
    while (ib < eb.size() && eb[ib].first <= x) fb += eb[ib++].second;
    double next = std::numeric_limits<double>::infinity();
    if (ia < ea.size()) next = std::min(next, ea[ia].first);
    if (ib < eb.size()) next = std::min(next, eb[ib].first);
    if (!std::isfinite(next)) break;
    dist += std::abs(fa - fb) * (next - x);
    x = next;
  }
  return dist;
}

}  // namespace vesd
