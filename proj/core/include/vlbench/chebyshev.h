#pragma once

#include <span>
#include <stdexcept>

#include <Eigen/Core>

#include "vlbench/geometry.h"

namespace vlbench {

enum class ChebyshevStatus {
  kOptimal,         // non-empty interior, radius > 0
  kEmpty,           // intersection empty or without interior, radius = 0
  kUnbounded,       // half-spaces do not bound a finite ball
  kIterationLimit,  // simplex did not terminate
};

struct ChebyshevBall {
  ChebyshevStatus status = ChebyshevStatus::kEmpty;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.0;
};

// Thrown when the linear program cannot be solved, as opposed to an empty
// polytope which is a regular zero-radius outcome.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Largest ball inside the intersection of the half-spaces, found by solving
//   maximize r  subject to  n_i . x + r <= d_i
// with a dense simplex. Normals must have unit length.
ChebyshevBall ChebyshevCenter(std::span<const HalfSpace> half_spaces);

// Dense primal simplex for  maximize c^T y  s.t.  A y <= b, y >= 0, b >= 0,
// pivoting with Bland's rule. Exposed for tests.
struct SimplexResult {
  enum class Status { kOptimal, kUnbounded, kIterationLimit } status;
  Eigen::VectorXd solution;
  double objective = 0.0;
};
SimplexResult SolveSimplex(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& c, int max_iterations = 1000);

}  // namespace vlbench
