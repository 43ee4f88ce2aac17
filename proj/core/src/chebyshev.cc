#include "vlbench/chebyshev.h"

#include <algorithm>
#include <limits>

namespace vlbench {
namespace {

constexpr double kPivotEps = 1e-12;
constexpr double kRadiusEps = 1e-12;

}  // namespace

SimplexResult SolveSimplex(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& c, int max_iterations) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index vars = a.cols();
  if (b.size() != rows || c.size() != vars) {
    throw InvalidArgument("simplex dimensions do not agree");
  }
  if ((b.array() < 0.0).any()) {
    throw InvalidArgument("simplex requires b >= 0 (origin feasible)");
  }

  // Tableau columns: structural variables, slacks, right-hand side. The last
  // row holds reduced costs of the minimization of -c^T y.
  const Eigen::Index cols = vars + rows + 1;
  Eigen::MatrixXd tableau = Eigen::MatrixXd::Zero(rows + 1, cols);
  tableau.topLeftCorner(rows, vars) = a;
  tableau.block(0, vars, rows, rows).setIdentity();
  tableau.topRightCorner(rows, 1) = b;
  tableau.bottomLeftCorner(1, vars) = -c.transpose();

  std::vector<Eigen::Index> basis(rows);
  for (Eigen::Index i = 0; i < rows; ++i) basis[i] = vars + i;

  SimplexResult result;
  for (int iteration = 0;; ++iteration) {
    if (iteration >= max_iterations) {
      result.status = SimplexResult::Status::kIterationLimit;
      return result;
    }
    // Bland: lowest-index column with negative reduced cost.
    Eigen::Index entering = -1;
    for (Eigen::Index j = 0; j < vars + rows; ++j) {
      if (tableau(rows, j) < -kPivotEps) {
        entering = j;
        break;
      }
    }
    if (entering < 0) break;

    Eigen::Index leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double coeff = tableau(i, entering);
      if (coeff <= kPivotEps) continue;
      const double ratio = tableau(i, cols - 1) / coeff;
      if (ratio < best_ratio - kPivotEps ||
          (ratio <= best_ratio + kPivotEps && leaving >= 0 &&
           basis[i] < basis[leaving])) {
        best_ratio = std::min(best_ratio, ratio);
        leaving = i;
      }
    }
    if (leaving < 0) {
      result.status = SimplexResult::Status::kUnbounded;
      return result;
    }

    tableau.row(leaving) /= tableau(leaving, entering);
    for (Eigen::Index i = 0; i <= rows; ++i) {
      if (i == leaving) continue;
      const double factor = tableau(i, entering);
      if (factor != 0.0) tableau.row(i) -= factor * tableau.row(leaving);
    }
    basis[leaving] = entering;
  }

  result.status = SimplexResult::Status::kOptimal;
  result.solution = Eigen::VectorXd::Zero(vars);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (basis[i] < vars) result.solution[basis[i]] = tableau(i, cols - 1);
  }
  result.objective = c.dot(result.solution);
  return result;
}

ChebyshevBall ChebyshevCenter(std::span<const HalfSpace> half_spaces) {
  ChebyshevBall ball;
  if (half_spaces.empty()) {
    ball.status = ChebyshevStatus::kUnbounded;
    return ball;
  }

  // x = x_plus - x_minus, r = r0 + rho. With r0 = min_i d_i the point
  // (x = 0, r = r0) is feasible, so the origin of the shifted problem is a
  // basic feasible solution and no phase one is needed. Since r >= r0 at the
  // optimum, rho >= 0 loses nothing.
  const auto rows = static_cast<Eigen::Index>(half_spaces.size());
  double r0 = std::numeric_limits<double>::infinity();
  for (const HalfSpace& h : half_spaces) r0 = std::min(r0, h.offset);

  Eigen::MatrixXd a(rows, 7);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const HalfSpace& h = half_spaces[static_cast<std::size_t>(i)];
    a.block<1, 3>(i, 0) = h.normal.transpose();
    a.block<1, 3>(i, 3) = -h.normal.transpose();
    a(i, 6) = 1.0;
    b[i] = std::max(0.0, h.offset - r0);
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(7);
  c[6] = 1.0;

  const SimplexResult lp = SolveSimplex(a, b, c);
  switch (lp.status) {
    case SimplexResult::Status::kUnbounded:
      ball.status = ChebyshevStatus::kUnbounded;
      return ball;
    case SimplexResult::Status::kIterationLimit:
      ball.status = ChebyshevStatus::kIterationLimit;
      return ball;
    case SimplexResult::Status::kOptimal:
      break;
  }

  const double radius = r0 + lp.solution[6];
  ball.center = lp.solution.head<3>() - lp.solution.segment<3>(3);
  if (radius <= kRadiusEps) {
    ball.status = ChebyshevStatus::kEmpty;
    ball.radius = 0.0;
    return ball;
  }
  ball.status = ChebyshevStatus::kOptimal;
  ball.radius = radius;
  return ball;
}

}  // namespace vlbench
