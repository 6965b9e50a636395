#ifndef BISECT_GEOMETRY_HPP
#define BISECT_GEOMETRY_HPP

#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace bisect {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Failure of a numerical kernel (non-finite state, bad arguments).
class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Thrown by newton_solve when the Jacobian is numerically singular.
class SingularJacobian : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

/// Thrown by newton_solve when the iteration budget is exhausted.
class NoConvergence : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

class ChartMismatch : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

enum class ChartKind { euclidean, torus };

struct Chart
{
  ChartKind kind = ChartKind::euclidean;
  int dim = 0;

  static Chart euclidean(int d) { return {ChartKind::euclidean, d}; }
  static Chart torus(int d) { return {ChartKind::torus, d}; }

  bool operator==(const Chart&) const = default;
};

std::string to_string(ChartKind kind);
ChartKind chart_kind_from_string(const std::string& name);

/// A point in a global chart. Torus coordinates are kept reduced to [0, 2pi).
class Point
{
public:
  Point() = default;
  Point(Chart chart, Vector coords);

  static Point euclidean(Vector coords);
  static Point torus(Vector coords);

  const Chart& chart() const { return chart_; }
  int dim() const { return chart_.dim; }
  const Vector& coords() const { return coords_; }
  double operator[](int i) const { return coords_[i]; }

  /// Move by a chart-coordinate displacement (re-reduced on the torus).
  Point translated(const Vector& delta) const;

private:
  Chart chart_;
  Vector coords_;
};

/// Shortest chart displacement from `from` to `to` (wrapped on the torus).
Vector displacement(const Point& from, const Point& to);
double distance(const Point& a, const Point& b);
void require_same_chart(const Point& a, const Point& b);

/// Smooth step 0 -> 1 on [0,1] built from exp(-1/t); flat to all orders at both ends.
double smooth_step(double t);
double smooth_step_derivative(double t);

/// Radial cutoff: 1 on the closed r_in-ball, 0 outside the open r_out-ball.
class PlateauBump
{
public:
  PlateauBump() = default;
  PlateauBump(Point center, double r_in, double r_out);

  const Point& center() const { return center_; }
  double r_in() const { return r_in_; }
  double r_out() const { return r_out_; }

  double value(const Point& x) const;
  Vector gradient(const Point& x) const;
  bool vanishes_at(const Point& x) const { return distance(center_, x) >= r_out_; }

private:
  Point center_;
  double r_in_ = 0.5;
  double r_out_ = 1.0;
};

double bump_eval(const PlateauBump& b, const Point& x);

using TimeField = std::function<Vector(double t, const Vector& x)>;

/// Classical fixed-step RK4 in chart coordinates; torus results are re-reduced.
Point rk4_flow(const TimeField& field, const Point& x0, double t_final, int steps);

/// Scalar / raw-vector variant used where there is no chart (angles, parameters).
Vector rk4_integrate(const TimeField& field, Vector x0, double t_final, int steps);

using VectorMap = std::function<Vector(const Vector&)>;

inline constexpr double kDefaultFdStep = 1e-5;

/// Central-difference Jacobian, columns indexed by the input coordinates.
Matrix fd_jacobian(const VectorMap& map, const Vector& t0, double h = kDefaultFdStep);

/// Five-point central stencil, O(h^4); used by the defect audits.
Matrix fd_jacobian5(const VectorMap& map, const Vector& t0, double h);

struct NewtonResult
{
  Vector solution;
  double residual = 0.0;
  int iterations = 0;
};

struct NewtonOptions
{
  double tol = 1e-10;
  int max_iter = 50;
  int max_halvings = 30;
  double fd_step = kDefaultFdStep;
  double max_condition = 1e10;
  /// When the iteration stalls, a residual at or below this still counts as converged.
  double accept = 0.0;
};

/// Damped Newton for map(t) = target seeded at t0.
/// Throws SingularJacobian or NoConvergence; both mean "shorten the step".
NewtonResult newton_solve(const VectorMap& map, const Vector& target, const Vector& t0,
                          const NewtonOptions& options = {});

} // namespace bisect

#endif // BISECT_GEOMETRY_HPP
