#include "bisect/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bisect {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a)
{
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0)
    r += kTwoPi;
  // fmod of a tiny negative number can round up to exactly 2pi
  if (r >= kTwoPi)
    r = 0.0;
  return r;
}

void require_finite(const Vector& v, const char* what)
{
  if (!v.allFinite())
    throw NumericalError(std::string("non-finite value in ") + what);
}

} // namespace

std::string to_string(ChartKind kind)
{
  return kind == ChartKind::torus ? "torus" : "euclidean";
}

ChartKind chart_kind_from_string(const std::string& name)
{
  if (name == "euclidean")
    return ChartKind::euclidean;
  if (name == "torus")
    return ChartKind::torus;
  throw std::invalid_argument("unknown chart '" + name + "'");
}

Point::Point(Chart chart, Vector coords) : chart_(chart), coords_(std::move(coords))
{
  if (coords_.size() != chart_.dim)
    throw std::invalid_argument("point dimension does not match chart");
  require_finite(coords_, "point coordinates");
  if (chart_.kind == ChartKind::torus)
    for (Eigen::Index i = 0; i < coords_.size(); ++i)
      coords_[i] = wrap_angle(coords_[i]);
}

Point Point::euclidean(Vector coords)
{
  const int d = static_cast<int>(coords.size());
  return Point(Chart::euclidean(d), std::move(coords));
}

Point Point::torus(Vector coords)
{
  const int d = static_cast<int>(coords.size());
  return Point(Chart::torus(d), std::move(coords));
}

Point Point::translated(const Vector& delta) const
{
  return Point(chart_, coords_ + delta);
}

void require_same_chart(const Point& a, const Point& b)
{
  if (!(a.chart() == b.chart()))
    throw ChartMismatch("points live in different charts");
}

Vector displacement(const Point& from, const Point& to)
{
  require_same_chart(from, to);
  Vector d = to.coords() - from.coords();
  if (from.chart().kind == ChartKind::torus) {
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (d[i] > std::numbers::pi)
        d[i] -= kTwoPi;
      else if (d[i] < -std::numbers::pi)
        d[i] += kTwoPi;
    }
  }
  return d;
}

double distance(const Point& a, const Point& b)
{
  return displacement(a, b).norm();
}

double smooth_step(double t)
{
  if (t <= 0.0)
    return 0.0;
  if (t >= 1.0)
    return 1.0;
  // s(t) / (s(t) + s(1-t)) with s(t) = exp(-1/t)
  const double e = 1.0 / t - 1.0 / (1.0 - t);
  if (e > 700.0)
    return 0.0;
  return 1.0 / (1.0 + std::exp(e));
}

double smooth_step_derivative(double t)
{
  if (t <= 0.0 || t >= 1.0)
    return 0.0;
  const double s = smooth_step(t);
  const double u = 1.0 - t;
  return s * (1.0 - s) * (1.0 / (t * t) + 1.0 / (u * u));
}

PlateauBump::PlateauBump(Point center, double r_in, double r_out)
  : center_(std::move(center)), r_in_(r_in), r_out_(r_out)
{
  if (!(r_in > 0.0) || !(r_out > r_in) || !std::isfinite(r_out))
    throw std::invalid_argument("plateau bump needs 0 < r_in < r_out");
  if (center_.chart().kind == ChartKind::torus && r_out_ >= std::numbers::pi)
    throw std::invalid_argument("torus bump radius must stay below pi");
}

double PlateauBump::value(const Point& x) const
{
  const double rho = distance(center_, x);
  if (rho <= r_in_)
    return 1.0;
  if (rho >= r_out_)
    return 0.0;
  return smooth_step((r_out_ - rho) / (r_out_ - r_in_));
}

Vector PlateauBump::gradient(const Point& x) const
{
  const Vector d = displacement(center_, x);
  const double rho = d.norm();
  if (rho <= r_in_ || rho >= r_out_)
    return Vector::Zero(d.size());
  const double w = r_out_ - r_in_;
  const double ds = smooth_step_derivative((r_out_ - rho) / w);
  return (-ds / (w * rho)) * d;
}

double bump_eval(const PlateauBump& b, const Point& x)
{
  return b.value(x);
}

Vector rk4_integrate(const TimeField& field, Vector x, double t_final, int steps)
{
  if (steps < 1)
    throw std::invalid_argument("rk4 needs at least one step");
  const double h = t_final / steps;
  double t = 0.0;
  for (int k = 0; k < steps; ++k) {
    const Vector k1 = field(t, x);
    const Vector k2 = field(t + 0.5 * h, x + 0.5 * h * k1);
    const Vector k3 = field(t + 0.5 * h, x + 0.5 * h * k2);
    const Vector k4 = field(t + h, x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = (k + 1) * h;
    require_finite(x, "rk4 state");
  }
  return x;
}

Point rk4_flow(const TimeField& field, const Point& x0, double t_final, int steps)
{
  // Torus fields are periodic, so integrating unreduced coordinates is fine.
  return Point(x0.chart(), rk4_integrate(field, x0.coords(), t_final, steps));
}

Matrix fd_jacobian(const VectorMap& map, const Vector& t0, double h)
{
  if (!(h > 0.0))
    throw std::invalid_argument("finite-difference step must be positive");
  const Eigen::Index n = t0.size();
  Matrix jac;
  Vector t = t0;
  for (Eigen::Index j = 0; j < n; ++j) {
    t[j] = t0[j] + h;
    const Vector fp = map(t);
    t[j] = t0[j] - h;
    const Vector fm = map(t);
    t[j] = t0[j];
    if (j == 0)
      jac.resize(fp.size(), n);
    jac.col(j) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

Matrix fd_jacobian5(const VectorMap& map, const Vector& t0, double h)
{
  if (!(h > 0.0))
    throw std::invalid_argument("finite-difference step must be positive");
  const Eigen::Index n = t0.size();
  Matrix jac;
  Vector t = t0;
  for (Eigen::Index j = 0; j < n; ++j) {
    t[j] = t0[j] + 2.0 * h;
    const Vector f2p = map(t);
    t[j] = t0[j] + h;
    const Vector f1p = map(t);
    t[j] = t0[j] - h;
    const Vector f1m = map(t);
    t[j] = t0[j] - 2.0 * h;
    const Vector f2m = map(t);
    t[j] = t0[j];
    if (j == 0)
      jac.resize(f1p.size(), n);
    jac.col(j) = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h);
  }
  return jac;
}

NewtonResult newton_solve(const VectorMap& map, const Vector& target, const Vector& t0,
                          const NewtonOptions& options)
{
  if (!(options.tol > 0.0))
    throw std::invalid_argument("newton tolerance must be positive");
  if (target.size() != t0.size())
    throw std::invalid_argument("newton_solve needs a square system");

  NewtonResult result;
  result.solution = t0;
  Vector r = map(t0) - target;
  result.residual = r.norm();

  for (int it = 0; it < options.max_iter; ++it) {
    if (result.residual <= options.tol)
      return result;

    const Matrix jac = fd_jacobian(map, result.solution, options.fd_step);
    Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    const double smin = sv.size() ? sv[sv.size() - 1] : 0.0;
    if (!(smin > 0.0) || smax / smin > options.max_condition)
      throw SingularJacobian("jacobian condition estimate above threshold");

    const Vector step = svd.solve(-r);
    double lambda = 1.0;
    bool improved = false;
    for (int k = 0; k <= options.max_halvings; ++k) {
      const Vector trial = result.solution + lambda * step;
      const Vector r_trial = map(trial) - target;
      const double norm = r_trial.norm();
      if (std::isfinite(norm) && norm < result.residual) {
        result.solution = trial;
        r = r_trial;
        result.residual = norm;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    result.iterations = it + 1;
    if (!improved && result.residual <= options.accept)
      return result;
    if (!improved)
      throw NoConvergence("damped newton step failed to reduce the residual");
  }
  if (result.residual <= std::max(options.tol, options.accept))
    return result;
  throw NoConvergence("newton iteration budget exhausted");
}

} // namespace bisect
