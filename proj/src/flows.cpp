#include "bisect/flows.hpp"

#include <algorithm>
#include <cmath>

namespace bisect {

Bisection exp_section(const Section& x, double t)
{
  Bisection sigma(x.instance());
  if (t != 0.0 && !x.is_zero())
    sigma.append({x, t});
  return sigma;
}

SectionPath::SectionPath(GroupoidInstance instance, Generator generator)
  : instance_(instance), generator_(std::move(generator))
{
}

SectionPath SectionPath::constant(const Section& x)
{
  return {x.instance(), [x](double) { return x; }};
}

SectionPath SectionPath::affine_in_time(const Section& x, double a, double b)
{
  return {x.instance(), [x, a, b](double t) { return x.scaled(a + b * t); }};
}

SectionPath SectionPath::zero(const GroupoidInstance& instance)
{
  return {instance, nullptr};
}

std::optional<Section> SectionPath::at(double t) const
{
  if (!generator_)
    return std::nullopt;
  Section s = generator_(t);
  if (!(s.instance() == instance_))
    throw std::invalid_argument("section path left its groupoid");
  return s;
}

Vector SectionPath::value(double t, const Point& x) const
{
  const auto s = at(t);
  return s ? s->value(x) : Vector::Zero(instance_.fiber_dim());
}

Isotopy::Isotopy(SectionPath path, double horizon, int steps)
  : path_(std::move(path)), horizon_(horizon), steps_(steps)
{
  if (steps < 1)
    throw std::invalid_argument("evolve needs at least one step");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("isotopy horizon must be positive");
}

Isotopy Isotopy::identity(const GroupoidInstance& instance)
{
  return {SectionPath::zero(instance), 1.0, 1};
}

int Isotopy::step_index(double t) const
{
  if (t <= 0.0)
    return 0;
  return std::min(steps_ - 1, static_cast<int>(std::floor(t / step_size())));
}

std::optional<Section> Isotopy::step_section(int k) const
{
  auto s = path_.at((k + 0.5) * step_size());
  if (s && s->is_zero())
    return std::nullopt;
  return s;
}

Bisection Isotopy::prefix(int k) const
{
  Bisection sigma(instance());
  const double h = step_size();
  for (int j = 0; j < k; ++j)
    if (auto s = step_section(j))
      sigma.append({*s, h});
  return sigma;
}

Bisection Isotopy::at(double t) const
{
  if (path_.is_zero() || t == 0.0)
    return Bisection(instance());
  const int k = t < 0.0 ? 0 : step_index(t);
  Bisection sigma = prefix(k);
  const double rest = t - k * step_size();
  if (auto s = step_section(k); s && rest != 0.0)
    sigma.append({*s, rest});
  return sigma;
}

Isotopy evolve(const SectionPath& x, double horizon, int steps)
{
  return {x, horizon, steps};
}

Vector logarithmic_velocity(const Isotopy& sigma, const Point& x, double t, double fd_step)
{
  if (sigma.generator().is_zero())
    return Vector::Zero(sigma.instance().fiber_dim());
  const Bisection now = sigma.at(t);
  const Point y = now.empty() ? x : beta_map(now).invert(x);

  // Right translation by sigma_t(y) is the identity in fiber coordinates for
  // every built-in instance: target-slot velocity (pair), covector velocity
  // (cotangent), angular velocity (rotation).
  const int k = t < 0.0 ? 0 : sigma.step_index(t);
  const double h = sigma.step_size();
  const double rest = t - k * h;
  const bool same_step = t - fd_step < 0.0 ? k == 0 : sigma.step_index(t - fd_step) == k;
  if (same_step && sigma.step_index(t + fd_step) == k) {
    // Differentiate the partial step with a frozen RK4 step count so the
    // difference quotient sees a smooth function of time.
    const Arrow base = eval(sigma.prefix(k), y);
    const auto s = sigma.step_section(k);
    if (!s)
      return Vector::Zero(sigma.instance().fiber_dim());
    const Point z = target(base);
    const int n = s->flow_steps(std::abs(rest) + fd_step);
    const Arrow ahead = multiply(s->flow_arrow_steps(z, rest + fd_step, n), base);
    const Arrow behind = multiply(s->flow_arrow_steps(z, rest - fd_step, n), base);
    return fiber_difference(behind, ahead) / (2.0 * fd_step);
  }
  const Arrow ahead = eval(sigma.at(t + fd_step), y);
  const Arrow behind = eval(sigma.at(t - fd_step), y);
  return fiber_difference(behind, ahead) / (2.0 * fd_step);
}

Cutoff localizing_cutoff(const std::vector<Ball>& u, const std::vector<Ball>& v)
{
  if (u.empty() || v.empty())
    throw GeometryError("localize needs non-empty U and V");
  std::vector<PlateauBump> bumps;
  for (const auto& inner : u) {
    double r_out = 0.0;
    for (const auto& outer : v)
      r_out = std::max(r_out, outer.radius - distance(outer.center, inner.center));
    if (!(r_out > inner.radius))
      throw GeometryError("closure(U) is not contained in V");
    bumps.emplace_back(inner.center, inner.radius, r_out);
  }
  return Cutoff(std::move(bumps));
}

Section localize(const Section& x, const std::vector<Ball>& u, const std::vector<Ball>& v)
{
  return x.with_cutoff(localizing_cutoff(u, v));
}

SectionPath localize(const SectionPath& x, const std::vector<Ball>& u,
                     const std::vector<Ball>& v)
{
  if (x.is_zero())
    return x;
  const Cutoff cutoff = localizing_cutoff(u, v);
  return {x.instance(), [x, cutoff](double t) { return x.at(t)->with_cutoff(cutoff); }};
}

std::vector<Section> fiber_basis(const GroupoidInstance& instance, const Point& x, const Ball& u,
                                 BasisKind kind)
{
  const double r_out = u.radius - distance(u.center, x);
  if (!(r_out > 0.0))
    throw GeometryError("fiber_basis: x is not inside U");
  const PlateauBump bump(x, 0.5 * r_out, r_out);
  const int d = instance.base_dim();

  std::vector<Section> basis;
  auto coordinate_potential = [&](int j) {
    return AffineFunction{x, Vector::Unit(d, j), 0.0};
  };
  switch (instance.kind()) {
  case GroupoidKind::pair:
    if (kind == BasisKind::hamiltonian)
      throw std::invalid_argument("pair groupoid has no symplectic structure");
    for (int j = 0; j < d; ++j)
      basis.push_back(Section::coordinate_field(instance, j, bump, 1.0));
    break;
  case GroupoidKind::symplectic_pair:
    for (int j = 0; j < d; ++j)
      basis.push_back(kind == BasisKind::hamiltonian
                        ? Section::hamiltonian_field(instance, bump, coordinate_potential(j))
                        : Section::coordinate_field(instance, j, bump, 1.0));
    break;
  case GroupoidKind::cotangent:
    for (int j = 0; j < d; ++j)
      basis.push_back(Section::exact_form(instance, bump, coordinate_potential(j)));
    break;
  case GroupoidKind::rotation_action:
    if (kind == BasisKind::hamiltonian)
      throw std::invalid_argument("rotation action groupoid has no symplectic structure");
    basis.push_back(Section::angular_speed(instance, bump, 1.0));
    break;
  }
  return basis;
}

Matrix section_values(const std::vector<Section>& sections, const Point& x)
{
  if (sections.empty())
    return {};
  Matrix m(sections.front().instance().fiber_dim(), static_cast<Eigen::Index>(sections.size()));
  for (std::size_t j = 0; j < sections.size(); ++j)
    m.col(static_cast<Eigen::Index>(j)) = sections[j].value(x);
  return m;
}

} // namespace bisect
