#include "bisect/bisection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bisect {

Bisection::Bisection(GroupoidInstance instance, std::vector<Primitive> chain)
  : instance_(instance), chain_(std::move(chain))
{
  for (const auto& p : chain_)
    if (!(p.section.instance() == instance_))
      throw std::invalid_argument("primitive section belongs to another groupoid");
}

void Bisection::append(Primitive p)
{
  if (!(p.section.instance() == instance_))
    throw std::invalid_argument("primitive section belongs to another groupoid");
  chain_.push_back(std::move(p));
}

Arrow act(const Bisection& sigma, const Arrow& g, const FlowSettings& settings)
{
  Arrow gamma = g;
  for (const auto& p : sigma.chain()) {
    const Point y = target(gamma);
    if (p.time == 0.0 || p.section.vanishes_at(y))
      continue;
    gamma = multiply(p.section.flow_arrow(y, p.time, settings), gamma);
  }
  return gamma;
}

Arrow eval(const Bisection& sigma, const Point& x, const FlowSettings& settings)
{
  return act(sigma, unit(sigma.instance(), x), settings);
}

Bisection star(const Bisection& sigma, const Bisection& tau)
{
  if (!(sigma.instance() == tau.instance()))
    throw std::invalid_argument("star of bisections over different groupoids");
  std::vector<Primitive> chain = tau.chain();
  chain.insert(chain.end(), sigma.chain().begin(), sigma.chain().end());
  return {sigma.instance(), std::move(chain)};
}

Bisection inverse(const Bisection& sigma)
{
  std::vector<Primitive> chain;
  chain.reserve(sigma.size());
  for (auto it = sigma.chain().rbegin(); it != sigma.chain().rend(); ++it)
    chain.push_back({it->section, -it->time});
  return {sigma.instance(), std::move(chain)};
}

BetaMap::BetaMap(Bisection sigma, FlowSettings settings)
  : sigma_(std::move(sigma)), settings_(settings)
{
}

Point BetaMap::operator()(const Point& x) const
{
  return target(eval(sigma_, x, settings_));
}

Point BetaMap::invert(const Point& y, double tol) const
{
  const Chart chart = sigma_.instance().chart();
  // Residual expressed as a chart displacement so that the torus needs no special case.
  const VectorMap map = [&](const Vector& z) -> Vector {
    return y.coords() + displacement(y, (*this)(Point(chart, z)));
  };
  NewtonOptions opts;
  opts.tol = tol;
  opts.max_iter = 40;
  try {
    // from a seed inside the basin Newton converges in a handful of steps
    NewtonOptions quick = opts;
    quick.max_iter = 12;
    return Point(chart, newton_solve(map, y.coords(), y.coords(), quick).solution);
  } catch (const NumericalError&) {
  }

  // Strongly twisted maps defeat the query-point seed; the reversed chain is
  // the inverse up to the RK4 error, so Newton only has to polish it.
  try {
    const Point seed = target(eval(inverse(sigma_), y, settings_));
    return Point(chart, newton_solve(map, y.coords(), seed.coords(), opts).solution);
  } catch (const NumericalError&) {
  }

  // Fallback: the preimage of y lies in a support ball containing y.
  const auto balls = a_priori_support(sigma_);
  Vector best = y.coords();
  double best_res = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < balls.size(); ++k) {
    const Ball& b = balls[k];
    if (!(distance(b.center, y) <= b.radius))
      continue;
    // isotopy chains repeat the same support ball once per step
    const auto same = [&](const Ball& o) {
      return o.radius == b.radius && (o.center.coords().array() == b.center.coords().array()).all();
    };
    if (std::any_of(balls.begin(), balls.begin() + static_cast<std::ptrdiff_t>(k), same))
      continue;
    const SampleGrid grid = SampleGrid::around({b}, chart, 24);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Point z = grid.at(i);
      const double res = distance((*this)(z), y);
      if (res < best_res) {
        best_res = res;
        best = z.coords();
      }
    }
  }
  try {
    return Point(chart, newton_solve(map, y.coords(), best, opts).solution);
  } catch (const NumericalError& e) {
    throw NoConvergence(std::string("beta map inversion failed: ") + e.what());
  }
}

BetaMap beta_map(const Bisection& sigma)
{
  return BetaMap(sigma);
}

Arrow inverse_by_formula(const Bisection& sigma, const Point& x)
{
  const Point y = beta_map(sigma).invert(x);
  return invert(eval(sigma, y));
}

std::size_t SampleGrid::size() const
{
  std::size_t n = 1;
  for (int i = 0; i < chart.dim; ++i)
    n *= static_cast<std::size_t>(per_axis);
  return n;
}

Point SampleGrid::at(std::size_t index) const
{
  Vector c(chart.dim);
  for (int i = 0; i < chart.dim; ++i) {
    const auto k = index % static_cast<std::size_t>(per_axis);
    index /= static_cast<std::size_t>(per_axis);
    const double u = per_axis == 1 ? 0.5 : static_cast<double>(k) / (per_axis - 1);
    c[i] = lower[i] + u * (upper[i] - lower[i]);
  }
  return Point(chart, c);
}

SampleGrid SampleGrid::around(const std::vector<Ball>& balls, const Chart& chart, int per_axis)
{
  SampleGrid g;
  g.chart = chart;
  const int d = chart.dim;
  if (balls.empty()) {
    g.lower = Vector::Constant(d, -1.0);
    g.upper = Vector::Constant(d, 1.0);
  } else {
    g.lower = Vector::Constant(d, std::numeric_limits<double>::infinity());
    g.upper = -g.lower;
    for (const auto& b : balls) {
      g.lower = g.lower.cwiseMin(b.center.coords() - Vector::Constant(d, b.radius));
      g.upper = g.upper.cwiseMax(b.center.coords() + Vector::Constant(d, b.radius));
    }
    const Vector pad = 0.1 * (g.upper - g.lower);
    g.lower -= pad;
    g.upper += pad;
  }
  // at most 2^20 points
  int n = std::max(per_axis, 2);
  while (d > 0 && std::pow(static_cast<double>(n), d) > static_cast<double>(1 << 20))
    --n;
  g.per_axis = n;
  return g;
}

bool SupportReport::a_priori_contains(const Point& x) const
{
  return std::any_of(a_priori.begin(), a_priori.end(),
                     [&](const Ball& b) { return distance(b.center, x) <= b.radius; });
}

std::vector<Ball> a_priori_support(const Bisection& sigma)
{
  std::vector<Ball> balls;
  for (const auto& p : sigma.chain()) {
    if (p.time == 0.0 || p.section.is_zero())
      continue;
    const auto s = p.section.support_balls();
    balls.insert(balls.end(), s.begin(), s.end());
  }
  return balls;
}

SupportReport support_report(const Bisection& sigma, const SampleGrid& grid, double eps)
{
  SupportReport report;
  report.a_priori = a_priori_support(sigma);
  report.grid_points = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.at(i);
    const Arrow g = eval(sigma, x);
    if (distance(target(g), x) > eps || arrow_distance(g, unit(sigma.instance(), x)) > eps) {
      report.empirical.push_back(x);
      if (!report.a_priori_contains(x))
        report.empirical_inside = false;
    }
  }
  return report;
}

} // namespace bisect
