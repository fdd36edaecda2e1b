#pragma once

// Metric projections onto closed convex sets (and the sphere / Stiefel cases),
// applied draw-by-draw to a batch of posterior samples.

#include "postproj/constraint_set.hpp"
#include "postproj/errors.hpp"
#include "postproj/linalg.hpp"
#include "postproj/parallel.hpp"
#include "postproj/qp.hpp"
#include "postproj/stiefel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <type_traits>
#include <vector>

namespace postproj {

inline constexpr double kPolytopeFeasTol = 1e-8;

inline double project_interval(double x, double lower, double upper) {
  if (!std::isfinite(x)) throw InvalidInput("project_interval: non-finite input");
  validate(Interval{lower, upper});
  return std::min(std::max(x, lower), upper);
}

inline Vector project_box(const Vector& v, const Vector& lower, const Vector& upper) {
  if (v.size() != lower.size() || v.size() != upper.size()) throw ShapeError("project_box: length mismatch");
  validate(Box{lower, upper});
  if (!v.allFinite()) throw InvalidInput("project_box: non-finite input");
  return v.cwiseMax(lower).cwiseMin(upper);
}

// Sort-and-threshold projection onto {x >= 0, sum x = 1}.
inline Vector project_simplex(const Vector& v) {
  if (v.size() == 0) throw ShapeError("project_simplex: empty vector");
  if (!v.allFinite()) throw InvalidInput("project_simplex: non-finite input");
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double running = 0.0;
  double shift = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    running += sorted[k];
    const double candidate = (running - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) shift = candidate;
  }
  Vector out = (v.array() - shift).cwiseMax(0.0);
  // Renormalise the positive part so the sum is 1 to machine precision.
  const double total = out.sum();
  if (total > 0.0) out /= total;
  return out;
}

inline Vector project_polytope(const Vector& v, const Polytope& set, const QPOptions& options = {}) {
  validate(set);
  if (static_cast<std::size_t>(v.size()) != ambient_dim(ConstraintSet{set}))
    throw ShapeError("project_polytope: dimension mismatch");
  const QPProblem qp = QPProblem::projection(v, set.C_eq, set.e_eq, set.A_ineq, set.b_ineq);
  const QPSolution sol = solve_qp(qp, options);
  if (sol.status == QPStatus::infeasible) throw Infeasible("project_polytope: constraint set is empty");
  return sol.x;
}

// Euclidean projection of a table onto the stochastically ordered cone.
inline Matrix project_ordered_table(const Matrix& theta) {
  const OrderedTable shape{static_cast<std::size_t>(theta.rows()), static_cast<std::size_t>(theta.cols())};
  validate(shape);
  if (!theta.allFinite()) throw InvalidInput("project_ordered_table: non-finite entries");
  const RowMatrix rm = theta;
  const Vector flat = Eigen::Map<const Vector>(rm.data(), rm.size());
  Vector out;
  try {
    out = project_polytope(flat, ordered_table_polytope(shape));
  } catch (const Infeasible&) {
    throw Error("project_ordered_table: constraint assembly produced an empty set");
  }
  return Eigen::Map<const RowMatrix>(out.data(), theta.rows(), theta.cols());
}

inline Vector project_sphere(const Vector& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw NonUniqueProjection("project_sphere: zero vector has no unique nearest point", 0.0);
  return v / norm;
}

// Projection of a single point, dispatched on the set. Stiefel points are
// flattened column-major (m x p).
inline Vector project(const ConstraintSet& set, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != ambient_dim(set)) throw ShapeError("project: dimension mismatch");
  return std::visit(
      [&](const auto& s) -> Vector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Interval>) {
          return Vector::Constant(1, project_interval(x[0], s.lower, s.upper));
        } else if constexpr (std::is_same_v<T, Box>) {
          return project_box(x, s.lower, s.upper);
        } else if constexpr (std::is_same_v<T, Simplex>) {
          return project_simplex(x);
        } else if constexpr (std::is_same_v<T, Polytope>) {
          return project_polytope(x, s);
        } else if constexpr (std::is_same_v<T, OrderedTable>) {
          const Matrix table = Eigen::Map<const RowMatrix>(x.data(), static_cast<Eigen::Index>(s.rows),
                                                           static_cast<Eigen::Index>(s.cols));
          const RowMatrix out = project_ordered_table(table);
          return Eigen::Map<const Vector>(out.data(), out.size());
        } else if constexpr (std::is_same_v<T, Sphere>) {
          return project_sphere(x);
        } else {
          const Matrix th = detail::unflatten_colmajor(x, static_cast<Eigen::Index>(s.m), static_cast<Eigen::Index>(s.p));
          const Matrix out = project_stiefel(th).matrix;
          return Eigen::Map<const Vector>(out.data(), out.size());
        }
      },
      set);
}

// Draws are rows.
struct SampleBatch {
  Matrix draws;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::string label;

  Eigen::Index size() const { return draws.rows(); }
  Eigen::Index dim() const { return draws.cols(); }
};

inline void validate(const SampleBatch& batch) {
  if (batch.draws.rows() < 1) throw ShapeError("sample batch: needs at least one draw");
  if (!batch.draws.allFinite()) throw InvalidInput("sample batch: non-finite draw");
}

// Pushes every draw through the projection. Rows may be split across
// `workers` threads; the output order always matches the input order.
inline SampleBatch pushforward(const SampleBatch& batch, const ConstraintSet& set, unsigned workers = 1) {
  validate(batch);
  validate(set);
  if (static_cast<std::size_t>(batch.dim()) != ambient_dim(set)) throw ShapeError("pushforward: dimension mismatch");
  SampleBatch out{Matrix(batch.draws.rows(), batch.draws.cols()), batch.seed, batch.stream_id, batch.label};
  parallel_for(static_cast<std::size_t>(batch.size()), workers, [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.draws.row(r) = project(set, batch.draws.row(r).transpose()).transpose();
  });
  return out;
}

enum class RejectionStatus { ok, empty };

struct RejectionResult {
  SampleBatch batch;  // may have zero rows when status == empty
  double acceptance_rate = 0.0;
  RejectionStatus status = RejectionStatus::ok;
};

// Keeps the draws already inside the set (within `tol`). For i.i.d. draws from
// the unconstrained posterior this is exact sampling of the truncated posterior.
inline RejectionResult rejection_truncate(const SampleBatch& batch, const ConstraintSet& set, double tol) {
  validate(batch);
  validate(set);
  if (static_cast<std::size_t>(batch.dim()) != ambient_dim(set))
    throw ShapeError("rejection_truncate: dimension mismatch");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < batch.size(); ++i)
    if (contains(set, batch.draws.row(i).transpose(), tol)) keep.push_back(i);
  RejectionResult res;
  res.batch = SampleBatch{Matrix(static_cast<Eigen::Index>(keep.size()), batch.dim()), batch.seed, batch.stream_id,
                          batch.label};
  for (std::size_t k = 0; k < keep.size(); ++k) res.batch.draws.row(static_cast<Eigen::Index>(k)) = batch.draws.row(keep[k]);
  res.acceptance_rate = static_cast<double>(keep.size()) / static_cast<double>(batch.size());
  res.status = keep.empty() ? RejectionStatus::empty : RejectionStatus::ok;
  return res;
}

}  // namespace postproj
