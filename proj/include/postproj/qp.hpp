#pragma once

// Strictly convex quadratic programming by the dual active-set method of
// Goldfarb and Idnani:
//
//   minimize    1/2 x'Gx - a'x
//   subject to  C_eq x  = e_eq
//               A_ineq x >= b_ineq
//
// Constraint indices: equalities occupy [0, n_eq), inequalities occupy
// [n_eq, n_eq + n_ineq).

#include "postproj/errors.hpp"
#include "postproj/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace postproj {

struct QPProblem {
  Matrix G;
  Vector a;
  Matrix C_eq;
  Vector e_eq;
  Matrix A_ineq;
  Vector b_ineq;

  Eigen::Index dim() const { return a.size(); }
  Eigen::Index n_eq() const { return e_eq.size(); }
  Eigen::Index n_ineq() const { return b_ineq.size(); }
  Eigen::Index n_constraints() const { return n_eq() + n_ineq(); }

  // Euclidean projection of v: G = I, a = v.
  static QPProblem projection(const Vector& v, Matrix C_eq, Vector e_eq, Matrix A_ineq, Vector b_ineq) {
    const auto n = v.size();
    if (C_eq.size() == 0) C_eq.resize(0, n);
    if (A_ineq.size() == 0) A_ineq.resize(0, n);
    return QPProblem{Matrix::Identity(n, n), v, std::move(C_eq), std::move(e_eq), std::move(A_ineq),
                     std::move(b_ineq)};
  }
};

enum class QPStatus { optimal, infeasible };

struct QPSolution {
  Vector x;
  std::vector<Eigen::Index> active_set;  // sorted constraint indices
  Vector multipliers;                    // one per constraint, zero when inactive
  std::size_t iterations = 0;
  std::size_t degeneracies = 0;          // refused additions of dependent constraints
  QPStatus status = QPStatus::optimal;
  std::vector<double> objective_trace;   // filled when QPOptions::record_trace is set
};

struct QPOptions {
  double tol = 1e-10;
  std::optional<std::size_t> max_iter;   // default 100 * (constraints + dimension)
  bool record_trace = false;
};

struct KKTResiduals {
  double stationarity = 0.0;     // ||Gx - a - C'l_eq - A'l_ineq||_inf
  double primal = 0.0;           // worst equality or inequality violation
  double complementarity = 0.0;  // max |l_i s_i| and max negative inequality multiplier
};

inline void validate(const QPProblem& p) {
  const auto n = p.dim();
  if (n == 0) throw ShapeError("QP: empty problem");
  if (p.G.rows() != n || p.G.cols() != n) throw ShapeError("QP: G must be n x n with n = len(a)");
  if (p.C_eq.rows() != p.e_eq.size() || (p.C_eq.rows() > 0 && p.C_eq.cols() != n))
    throw ShapeError("QP: equality block has inconsistent dimensions");
  if (p.A_ineq.rows() != p.b_ineq.size() || (p.A_ineq.rows() > 0 && p.A_ineq.cols() != n))
    throw ShapeError("QP: inequality block has inconsistent dimensions");
  if (!p.G.allFinite() || !p.a.allFinite() || !p.C_eq.allFinite() || !p.e_eq.allFinite() ||
      !p.A_ineq.allFinite() || !p.b_ineq.allFinite())
    throw InvalidInput("QP: non-finite problem data");
  const double scale = std::max(1.0, p.G.cwiseAbs().maxCoeff());
  if ((p.G - p.G.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidInput("QP: G is not symmetric");
}

inline double qp_objective(const QPProblem& p, const Vector& x) {
  return 0.5 * x.dot(p.G * x) - p.a.dot(x);
}

inline KKTResiduals kkt_residuals(const QPProblem& p, const QPSolution& s) {
  KKTResiduals r;
  const auto me = p.n_eq();
  const auto mi = p.n_ineq();
  Vector grad = p.G * s.x - p.a;
  if (me > 0) grad -= p.C_eq.transpose() * s.multipliers.head(me);
  if (mi > 0) grad -= p.A_ineq.transpose() * s.multipliers.tail(mi);
  r.stationarity = grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0;
  if (me > 0) r.primal = (p.C_eq * s.x - p.e_eq).cwiseAbs().maxCoeff();
  if (mi > 0) {
    const Vector slack = p.A_ineq * s.x - p.b_ineq;
    r.primal = std::max(r.primal, std::max(0.0, -slack.minCoeff()));
    for (Eigen::Index i = 0; i < mi; ++i) {
      const double lambda = s.multipliers[me + i];
      r.complementarity = std::max({r.complementarity, std::abs(lambda * slack[i]), -lambda});
    }
  }
  return r;
}

namespace detail {

struct ActiveConstraint {
  Eigen::Index index;  // global constraint index
  Vector normal;       // signed so that the constraint reads normal'x >= rhs
  double rhs;
  double sign;         // +1, or -1 for an equality entered from above
  bool equality;
  double multiplier;
};

class DualActiveSet {
 public:
  DualActiveSet(const QPProblem& p, const QPOptions& opt)
      : p_(p), opt_(opt), llt_(p.G) {
    if (llt_.info() != Eigen::Success) throw InvalidInput("QP: G is not positive definite");
    // Cholesky of a near-singular G can "succeed" with a zero pivot.
    const Vector diag = llt_.matrixLLT().diagonal();
    if (diag.minCoeff() <= 0.0 || !(diag.array().isFinite().all()))
      throw InvalidInput("QP: G is not positive definite");
    x_ = llt_.solve(p.a);
    max_iter_ = opt.max_iter.value_or(100 * static_cast<std::size_t>(p.n_constraints() + p.dim()));
    trace();
  }

  QPSolution run() {
    for (Eigen::Index i = 0; i < p_.n_eq(); ++i) {
      if (!add_equality(i)) return finish(QPStatus::infeasible);
    }
    for (;;) {
      Eigen::Index worst = -1;
      double worst_slack = -opt_.tol;
      for (Eigen::Index i = 0; i < p_.n_ineq(); ++i) {
        if (is_active(p_.n_eq() + i)) continue;
        const double s = p_.A_ineq.row(i).dot(x_) - p_.b_ineq[i];
        if (s < worst_slack) {  // strict: ties keep the lowest index
          worst_slack = s;
          worst = i;
        }
      }
      if (worst < 0) return finish(QPStatus::optimal);
      const Vector normal = p_.A_ineq.row(worst).transpose();
      if (!add(p_.n_eq() + worst, normal, p_.b_ineq[worst], 1.0, false)) return finish(QPStatus::infeasible);
    }
  }

 private:
  bool is_active(Eigen::Index idx) const {
    return std::any_of(active_.begin(), active_.end(), [&](const ActiveConstraint& c) { return c.index == idx; });
  }

  void trace() {
    if (opt_.record_trace) trace_.push_back(qp_objective(p_, x_));
  }

  void tick() {
    if (++iterations_ > max_iter_) {
      QPSolution s = snapshot(QPStatus::optimal);
      const auto r = kkt_residuals(p_, s);
      throw NonConvergence("QP: iteration budget of " + std::to_string(max_iter_) +
                               " exceeded (stationarity " + std::to_string(r.stationarity) + ", primal " +
                               std::to_string(r.primal) + ")",
                           r.stationarity, r.primal);
    }
  }

  // Primal step direction z and negative dual step direction r for adding
  // `normal`, with G^{-1} = J J', J = L^{-T}.
  struct Step {
    Vector z;
    Vector r;
    bool dependent;
  };

  Step step_for(const Vector& normal) const {
    const auto n = p_.dim();
    const auto q = static_cast<Eigen::Index>(active_.size());
    const Vector d = llt_.matrixL().solve(normal);
    Step st;
    if (q == 0) {
      st.z = llt_.matrixU().solve(d);
      st.r.resize(0);
      st.dependent = d.norm() == 0.0;
      return st;
    }
    Matrix B(n, q);
    for (Eigen::Index j = 0; j < q; ++j) B.col(j) = llt_.matrixL().solve(active_[j].normal);
    Eigen::HouseholderQR<Matrix> qr(B);
    const Matrix Q = qr.householderQ();
    const Matrix Q1 = Q.leftCols(q);
    const Vector proj = Q1.transpose() * d;
    const Vector w = d - Q1 * proj;
    st.dependent = w.norm() <= 1e-10 * std::max(1.0, d.norm());
    st.z = st.dependent ? Vector::Zero(n) : Vector(llt_.matrixU().solve(w));
    st.r = qr.matrixQR().topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(proj);
    return st;
  }

  bool add_equality(Eigen::Index i) {
    const Vector row = p_.C_eq.row(i).transpose();
    const double s = row.dot(x_) - p_.e_eq[i];
    // Enter from the violated side so the step length is nonnegative.
    const double sign = s > 0.0 ? -1.0 : 1.0;
    return add(i, sign * row, sign * p_.e_eq[i], sign, true);
  }

  // Adds one constraint, dropping blocking inequalities on the way. Returns
  // false when the problem is infeasible.
  bool add(Eigen::Index idx, const Vector& normal, double rhs, double sign, bool equality) {
    double plus = 0.0;
    for (;;) {
      tick();
      const double slack = normal.dot(x_) - rhs;
      if (slack >= 0.0 && !equality) return true;
      const Step st = step_for(normal);

      double t1 = std::numeric_limits<double>::infinity();
      std::size_t drop = active_.size();
      for (std::size_t j = 0; j < active_.size(); ++j) {
        if (active_[j].equality || st.r[j] <= 0.0) continue;
        const double ratio = active_[j].multiplier / st.r[j];
        if (ratio < t1) {
          t1 = ratio;
          drop = j;
        }
      }

      if (st.dependent) {
        ++degeneracies_;
        if (equality && std::abs(slack) <= opt_.tol) return true;  // redundant equality
        if (drop == active_.size()) return false;
        apply_dual(st.r, t1);
        plus += t1;
        remove(drop);
        continue;
      }

      const double t2 = -slack / st.z.dot(normal);
      const double t = std::min(t1, t2);
      x_ += t * st.z;
      apply_dual(st.r, t);
      plus += t;
      trace();
      if (t2 <= t1) {
        active_.push_back(ActiveConstraint{idx, normal, rhs, sign, equality, plus});
        return true;
      }
      remove(drop);
    }
  }

  void apply_dual(const Vector& r, double t) {
    for (std::size_t j = 0; j < active_.size(); ++j) {
      active_[j].multiplier -= t * r[j];
      if (!active_[j].equality && active_[j].multiplier < 0.0) active_[j].multiplier = 0.0;
    }
  }

  void remove(std::size_t j) { active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(j)); }

  QPSolution snapshot(QPStatus status) const {
    QPSolution s;
    s.x = x_;
    s.multipliers = Vector::Zero(p_.n_constraints());
    for (const auto& c : active_) {
      s.active_set.push_back(c.index);
      s.multipliers[c.index] = c.sign * c.multiplier;
    }
    std::sort(s.active_set.begin(), s.active_set.end());
    s.iterations = iterations_;
    s.degeneracies = degeneracies_;
    s.status = status;
    s.objective_trace = trace_;
    return s;
  }

  QPSolution finish(QPStatus status) {
    QPSolution s = snapshot(status);
    if (status == QPStatus::optimal) {
      const auto r = kkt_residuals(p_, s);
      const double scale = 1.0 + p_.a.cwiseAbs().maxCoeff() + p_.G.cwiseAbs().maxCoeff();
      const double bound = std::max(1e-8, 1e3 * opt_.tol) * scale;
      if (r.stationarity > bound || r.primal > bound)
        throw NonConvergence("QP: solution fails KKT check", r.stationarity, r.primal);
    }
    return s;
  }

  const QPProblem& p_;
  QPOptions opt_;
  Eigen::LLT<Matrix> llt_;
  Vector x_;
  std::vector<ActiveConstraint> active_;
  std::vector<double> trace_;
  std::size_t iterations_ = 0;
  std::size_t degeneracies_ = 0;
  std::size_t max_iter_ = 0;
};

}  // namespace detail

inline QPSolution solve_qp(const QPProblem& problem, const QPOptions& options = {}) {
  validate(problem);
  return detail::DualActiveSet(problem, options).run();
}

}  // namespace postproj
