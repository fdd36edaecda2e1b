#pragma once

#include "postproj/errors.hpp"
#include "postproj/linalg.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <type_traits>
#include <variant>

namespace postproj {

// Closed interval [lower, upper]; either end may be infinite.
struct Interval {
  double lower = 0.0;
  double upper = kInf;
};

struct Box {
  Vector lower;
  Vector upper;
};

// Probability simplex {x >= 0, sum x = 1} in `dim` dimensions.
struct Simplex {
  std::size_t dim = 1;
};

// {x : A_ineq x >= b_ineq, C_eq x = e_eq}.
struct Polytope {
  Matrix A_ineq;
  Vector b_ineq;
  Matrix C_eq;
  Vector e_eq;
};

// I x J table of row probability vectors, flattened row-major, whose
// cumulative row sums are nondecreasing down the rows.
struct OrderedTable {
  std::size_t rows = 2;
  std::size_t cols = 2;
};

// Unit sphere in R^m.
struct Sphere {
  std::size_t m = 1;
};

// m x p matrices with orthonormal columns, flattened column-major.
struct Stiefel {
  std::size_t p = 1;
  std::size_t m = 1;
};

using ConstraintSet = std::variant<Interval, Box, Simplex, Polytope, OrderedTable, Sphere, Stiefel>;

inline bool is_convex(const ConstraintSet& set) {
  return !std::holds_alternative<Sphere>(set) && !std::holds_alternative<Stiefel>(set);
}

inline std::string describe(const ConstraintSet& set) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Interval>) return "interval";
        else if constexpr (std::is_same_v<T, Box>) return "box";
        else if constexpr (std::is_same_v<T, Simplex>) return "simplex";
        else if constexpr (std::is_same_v<T, Polytope>) return "polytope";
        else if constexpr (std::is_same_v<T, OrderedTable>) return "ordered-table";
        else if constexpr (std::is_same_v<T, Sphere>) return "sphere";
        else return "stiefel";
      },
      set);
}

// Number of coordinates a point of the set has.
inline std::size_t ambient_dim(const ConstraintSet& set) {
  return std::visit(
      [](const auto& s) -> std::size_t {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Interval>) return 1;
        else if constexpr (std::is_same_v<T, Box>) return static_cast<std::size_t>(s.lower.size());
        else if constexpr (std::is_same_v<T, Simplex>) return s.dim;
        else if constexpr (std::is_same_v<T, Polytope>)
          return static_cast<std::size_t>(s.A_ineq.rows() > 0 ? s.A_ineq.cols() : s.C_eq.cols());
        else if constexpr (std::is_same_v<T, OrderedTable>) return s.rows * s.cols;
        else if constexpr (std::is_same_v<T, Sphere>) return s.m;
        else return s.p * s.m;
      },
      set);
}

inline void validate(const Interval& s) {
  if (std::isnan(s.lower) || std::isnan(s.upper)) throw InvalidInput("interval: NaN bound");
  if (!(s.lower < s.upper)) throw InvalidInput("interval: requires lower < upper");
}

inline void validate(const Box& s) {
  if (s.lower.size() != s.upper.size()) throw ShapeError("box: lower and upper differ in length");
  if (s.lower.size() == 0) throw ShapeError("box: empty");
  if ((s.lower.array() > s.upper.array()).any()) throw InvalidInput("box: lower > upper");
}

inline void validate(const Simplex& s) {
  if (s.dim == 0) throw ShapeError("simplex: dimension must be positive");
}

inline void validate(const Polytope& s) {
  if (s.A_ineq.rows() != s.b_ineq.size()) throw ShapeError("polytope: A_ineq rows != len(b_ineq)");
  if (s.C_eq.rows() != s.e_eq.size()) throw ShapeError("polytope: C_eq rows != len(e_eq)");
  if (s.A_ineq.rows() > 0 && s.C_eq.rows() > 0 && s.A_ineq.cols() != s.C_eq.cols())
    throw ShapeError("polytope: A_ineq and C_eq column counts differ");
  if (s.A_ineq.rows() == 0 && s.C_eq.rows() == 0) throw ShapeError("polytope: no constraints");
}

inline void validate(const OrderedTable& s) {
  if (s.rows < 2 || s.cols < 2) throw ShapeError("ordered table: needs at least 2 rows and 2 columns");
}

inline void validate(const Sphere& s) {
  if (s.m == 0) throw ShapeError("sphere: dimension must be positive");
}

inline void validate(const Stiefel& s) {
  if (s.p == 0 || s.p > s.m) throw ShapeError("stiefel: requires 1 <= p <= m");
}

inline void validate(const ConstraintSet& set) {
  std::visit([](const auto& s) { validate(s); }, set);
}

// Constraint matrices of the ordered-table cone over the row-major flattening
// x[i * J + j]: one row-sum equality per row, nonnegativity, and
// sum_{k<=j} x[i+1, k] >= sum_{k<=j} x[i, k] for j < J - 1. The j = J - 1
// cumulative sums are both 1 and are left out.
inline Polytope ordered_table_polytope(const OrderedTable& t) {
  validate(t);
  const auto I = static_cast<Eigen::Index>(t.rows);
  const auto J = static_cast<Eigen::Index>(t.cols);
  const Eigen::Index n = I * J;
  Polytope poly;
  poly.C_eq = Matrix::Zero(I, n);
  poly.e_eq = Vector::Ones(I);
  for (Eigen::Index i = 0; i < I; ++i) poly.C_eq.block(i, i * J, 1, J).setOnes();

  const Eigen::Index n_order = (I - 1) * (J - 1);
  poly.A_ineq = Matrix::Zero(n + n_order, n);
  poly.b_ineq = Vector::Zero(n + n_order);
  poly.A_ineq.topRows(n).setIdentity();
  Eigen::Index row = n;
  for (Eigen::Index i = 0; i + 1 < I; ++i) {
    for (Eigen::Index j = 0; j + 1 < J; ++j, ++row) {
      for (Eigen::Index k = 0; k <= j; ++k) {
        poly.A_ineq(row, (i + 1) * J + k) = 1.0;
        poly.A_ineq(row, i * J + k) = -1.0;
      }
    }
  }
  return poly;
}

namespace detail {

inline Matrix unflatten_colmajor(const Vector& x, Eigen::Index m, Eigen::Index p) {
  return Eigen::Map<const Matrix>(x.data(), m, p);
}

}  // namespace detail

// Membership test with absolute tolerance `tol`.
inline bool contains(const ConstraintSet& set, const Vector& x, double tol) {
  if (static_cast<std::size_t>(x.size()) != ambient_dim(set)) throw ShapeError("contains: dimension mismatch");
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Interval>) {
          return x[0] >= s.lower - tol && x[0] <= s.upper + tol;
        } else if constexpr (std::is_same_v<T, Box>) {
          return ((x.array() >= s.lower.array() - tol) && (x.array() <= s.upper.array() + tol)).all();
        } else if constexpr (std::is_same_v<T, Simplex>) {
          return x.minCoeff() >= -tol && std::abs(x.sum() - 1.0) <= tol;
        } else if constexpr (std::is_same_v<T, Polytope>) {
          bool ok = true;
          if (s.A_ineq.rows() > 0) ok = ok && ((s.A_ineq * x - s.b_ineq).array() >= -tol).all();
          if (s.C_eq.rows() > 0) ok = ok && ((s.C_eq * x - s.e_eq).cwiseAbs().array() <= tol).all();
          return ok;
        } else if constexpr (std::is_same_v<T, OrderedTable>) {
          const Polytope poly = ordered_table_polytope(s);
          return ((poly.A_ineq * x - poly.b_ineq).array() >= -tol).all() &&
                 ((poly.C_eq * x - poly.e_eq).cwiseAbs().array() <= tol).all();
        } else if constexpr (std::is_same_v<T, Sphere>) {
          return std::abs(x.norm() - 1.0) <= tol;
        } else {
          const Matrix th = detail::unflatten_colmajor(x, static_cast<Eigen::Index>(s.m), static_cast<Eigen::Index>(s.p));
          const Matrix gram = th.transpose() * th - Matrix::Identity(th.cols(), th.cols());
          return gram.cwiseAbs().maxCoeff() <= tol;
        }
      },
      set);
}

}  // namespace postproj
