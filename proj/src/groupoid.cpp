#include "bisect/groupoid.hpp"

#include <cmath>
#include <limits>

namespace bisect {

std::string to_string(GroupoidKind kind)
{
  switch (kind) {
  case GroupoidKind::pair: return "pair";
  case GroupoidKind::cotangent: return "cotangent";
  case GroupoidKind::rotation_action: return "rotation_action";
  case GroupoidKind::symplectic_pair: return "symplectic_pair";
  }
  return "?";
}

GroupoidKind groupoid_kind_from_string(const std::string& name)
{
  if (name == "pair")
    return GroupoidKind::pair;
  if (name == "cotangent")
    return GroupoidKind::cotangent;
  if (name == "rotation_action")
    return GroupoidKind::rotation_action;
  if (name == "symplectic_pair")
    return GroupoidKind::symplectic_pair;
  throw std::invalid_argument("unknown groupoid kind '" + name + "'");
}

GroupoidInstance::GroupoidInstance(GroupoidKind kind, int dim, ChartKind chart)
  : kind_(kind), base_dim_(dim), chart_(chart)
{
  if (dim < 1)
    throw std::invalid_argument("base dimension must be positive");
}

GroupoidInstance GroupoidInstance::pair(int d, ChartKind chart)
{
  return {GroupoidKind::pair, d, chart};
}

GroupoidInstance GroupoidInstance::cotangent(int d)
{
  return {GroupoidKind::cotangent, d, ChartKind::euclidean};
}

GroupoidInstance GroupoidInstance::rotation_action()
{
  return {GroupoidKind::rotation_action, 2, ChartKind::euclidean};
}

GroupoidInstance GroupoidInstance::symplectic_pair(int two_m)
{
  if (two_m < 2 || two_m % 2 != 0)
    throw std::invalid_argument("symplectic pair groupoid needs an even base dimension");
  return {GroupoidKind::symplectic_pair, two_m, ChartKind::euclidean};
}

int GroupoidInstance::fiber_dim() const
{
  return kind_ == GroupoidKind::rotation_action ? 1 : base_dim_;
}

bool GroupoidInstance::symplectic() const
{
  return kind_ == GroupoidKind::cotangent || kind_ == GroupoidKind::symplectic_pair;
}

int GroupoidInstance::payload_dim() const
{
  switch (kind_) {
  case GroupoidKind::rotation_action: return 3;
  default: return 2 * base_dim_;
  }
}

Matrix canonical_symplectic_matrix(int two_m)
{
  if (two_m < 2 || two_m % 2 != 0)
    throw std::invalid_argument("symplectic matrix needs even dimension");
  const int m = two_m / 2;
  Matrix w = Matrix::Zero(two_m, two_m);
  w.topRightCorner(m, m) = Matrix::Identity(m, m);
  w.bottomLeftCorner(m, m) = -Matrix::Identity(m, m);
  return w;
}

Vector rotate(double angle, const Vector& x)
{
  const double c = std::cos(angle), s = std::sin(angle);
  Vector y(2);
  y << c * x[0] - s * x[1], s * x[0] + c * x[1];
  return y;
}

Point source(const Arrow& g)
{
  return std::visit(
    [](const auto& p) -> Point {
      using T = std::decay_t<decltype(p)>;
      if constexpr (std::is_same_v<T, PairPayload>)
        return p.source;
      else
        return p.base;
    },
    g.payload);
}

Point target(const Arrow& g)
{
  return std::visit(
    [](const auto& p) -> Point {
      using T = std::decay_t<decltype(p)>;
      if constexpr (std::is_same_v<T, PairPayload>)
        return p.target;
      else if constexpr (std::is_same_v<T, CotangentPayload>)
        return p.base;
      else
        return Point::euclidean(rotate(p.angle, p.base.coords()));
    },
    g.payload);
}

Arrow unit(const GroupoidInstance& instance, const Point& x)
{
  if (!(x.chart() == instance.chart()))
    throw ChartMismatch("unit: point is not in the instance chart");
  switch (instance.kind()) {
  case GroupoidKind::pair:
  case GroupoidKind::symplectic_pair:
    return {instance, PairPayload{x, x}};
  case GroupoidKind::cotangent:
    return {instance, CotangentPayload{x, Vector::Zero(instance.base_dim())}};
  case GroupoidKind::rotation_action:
    return {instance, RotationPayload{0.0, x}};
  }
  throw std::logic_error("unreachable");
}

Arrow multiply(const Arrow& g1, const Arrow& g2, double eps)
{
  if (!(g1.instance == g2.instance))
    throw NotComposable("arrows belong to different groupoids");
  const double gap = distance(source(g1), target(g2));
  if (!(gap <= eps))
    throw NotComposable("source(g1) and target(g2) differ by " + std::to_string(gap));

  switch (g1.instance.kind()) {
  case GroupoidKind::pair:
  case GroupoidKind::symplectic_pair: {
    const auto& a = std::get<PairPayload>(g1.payload);
    const auto& b = std::get<PairPayload>(g2.payload);
    return {g1.instance, PairPayload{a.target, b.source}};
  }
  case GroupoidKind::cotangent: {
    const auto& a = std::get<CotangentPayload>(g1.payload);
    const auto& b = std::get<CotangentPayload>(g2.payload);
    return {g1.instance, CotangentPayload{b.base, a.covector + b.covector}};
  }
  case GroupoidKind::rotation_action: {
    const auto& a = std::get<RotationPayload>(g1.payload);
    const auto& b = std::get<RotationPayload>(g2.payload);
    return {g1.instance, RotationPayload{a.angle + b.angle, b.base}};
  }
  }
  throw std::logic_error("unreachable");
}

Arrow invert(const Arrow& g)
{
  switch (g.instance.kind()) {
  case GroupoidKind::pair:
  case GroupoidKind::symplectic_pair: {
    const auto& a = std::get<PairPayload>(g.payload);
    return {g.instance, PairPayload{a.source, a.target}};
  }
  case GroupoidKind::cotangent: {
    const auto& a = std::get<CotangentPayload>(g.payload);
    return {g.instance, CotangentPayload{a.base, -a.covector}};
  }
  case GroupoidKind::rotation_action: {
    const auto& a = std::get<RotationPayload>(g.payload);
    return {g.instance, RotationPayload{-a.angle, target(g)}};
  }
  }
  throw std::logic_error("unreachable");
}

Vector payload_coords(const Arrow& g)
{
  Vector v(g.instance.payload_dim());
  std::visit(
    [&](const auto& p) {
      using T = std::decay_t<decltype(p)>;
      if constexpr (std::is_same_v<T, PairPayload>)
        v << p.target.coords(), p.source.coords();
      else if constexpr (std::is_same_v<T, CotangentPayload>)
        v << p.base.coords(), p.covector;
      else
        v << p.angle, p.base.coords();
    },
    g.payload);
  return v;
}

Arrow arrow_from_payload(const GroupoidInstance& instance, const Vector& c)
{
  if (c.size() != instance.payload_dim())
    throw std::invalid_argument("payload has wrong length for " + to_string(instance.kind()));
  const int d = instance.base_dim();
  const Chart chart = instance.chart();
  switch (instance.kind()) {
  case GroupoidKind::pair:
  case GroupoidKind::symplectic_pair:
    return {instance, PairPayload{Point(chart, c.head(d)), Point(chart, c.tail(d))}};
  case GroupoidKind::cotangent:
    if (!c.allFinite())
      throw std::invalid_argument("non-finite covector");
    return {instance, CotangentPayload{Point(chart, c.head(d)), c.tail(d)}};
  case GroupoidKind::rotation_action:
    if (!std::isfinite(c[0]))
      throw std::invalid_argument("non-finite angle");
    return {instance, RotationPayload{c[0], Point(chart, c.tail(2))}};
  }
  throw std::logic_error("unreachable");
}

double arrow_distance(const Arrow& a, const Arrow& b)
{
  if (!(a.instance == b.instance))
    throw std::invalid_argument("arrow_distance across groupoids");
  switch (a.instance.kind()) {
  case GroupoidKind::pair:
  case GroupoidKind::symplectic_pair: {
    const auto& p = std::get<PairPayload>(a.payload);
    const auto& q = std::get<PairPayload>(b.payload);
    const double dt = distance(p.target, q.target), ds = distance(p.source, q.source);
    return std::sqrt(dt * dt + ds * ds);
  }
  default:
    return (payload_coords(a) - payload_coords(b)).norm();
  }
}

Vector fiber_coords(const Arrow& g)
{
  return std::visit(
    [](const auto& p) -> Vector {
      using T = std::decay_t<decltype(p)>;
      if constexpr (std::is_same_v<T, PairPayload>)
        return p.target.coords();
      else if constexpr (std::is_same_v<T, CotangentPayload>)
        return p.covector;
      else
        return Vector::Constant(1, p.angle);
    },
    g.payload);
}

Arrow arrow_from_fiber(const GroupoidInstance& instance, const Point& x, const Vector& fiber)
{
  if (fiber.size() != instance.fiber_dim())
    throw std::invalid_argument("fiber coordinates have wrong length");
  switch (instance.kind()) {
  case GroupoidKind::pair:
  case GroupoidKind::symplectic_pair:
    return {instance, PairPayload{Point(instance.chart(), fiber), x}};
  case GroupoidKind::cotangent:
    return {instance, CotangentPayload{x, fiber}};
  case GroupoidKind::rotation_action:
    return {instance, RotationPayload{fiber[0], x}};
  }
  throw std::logic_error("unreachable");
}

Vector fiber_difference(const Arrow& a, const Arrow& b)
{
  switch (a.instance.kind()) {
  case GroupoidKind::pair:
  case GroupoidKind::symplectic_pair:
    return displacement(std::get<PairPayload>(a.payload).target,
                        std::get<PairPayload>(b.payload).target);
  default:
    return fiber_coords(b) - fiber_coords(a);
  }
}

std::string to_string(LeafKind kind)
{
  switch (kind) {
  case LeafKind::whole_space: return "whole_space";
  case LeafKind::single_point: return "single_point";
  case LeafKind::circle: return "circle";
  }
  return "?";
}

int LeafDescriptor::dimension(int base_dim) const
{
  switch (kind) {
  case LeafKind::whole_space: return base_dim;
  case LeafKind::single_point: return 0;
  case LeafKind::circle: return radius > 0.0 ? 1 : 0;
  }
  return 0;
}

bool LeafDescriptor::contains(const Point& x, double tol) const
{
  switch (kind) {
  case LeafKind::whole_space: return true;
  case LeafKind::single_point: return distance(point, x) <= tol;
  case LeafKind::circle: return std::abs(x.coords().norm() - radius) <= tol;
  }
  return false;
}

double LeafDescriptor::gap_to(const LeafDescriptor& other) const
{
  if (kind == LeafKind::whole_space || other.kind == LeafKind::whole_space)
    return std::numeric_limits<double>::infinity();
  if (kind == LeafKind::single_point && other.kind == LeafKind::single_point)
    return distance(point, other.point);
  if (kind == LeafKind::circle && other.kind == LeafKind::circle)
    return std::abs(radius - other.radius);
  const Point& p = kind == LeafKind::single_point ? point : other.point;
  const double r = kind == LeafKind::circle ? radius : other.radius;
  return std::abs(p.coords().norm() - r);
}

LeafDescriptor leaf_of(const GroupoidInstance& instance, const Point& x)
{
  if (!(x.chart() == instance.chart()))
    throw ChartMismatch("leaf_of: point is not in the instance chart");
  switch (instance.kind()) {
  case GroupoidKind::pair:
  case GroupoidKind::symplectic_pair:
    return {LeafKind::whole_space, x, 0.0};
  case GroupoidKind::cotangent:
    return {LeafKind::single_point, x, 0.0};
  case GroupoidKind::rotation_action:
    return {LeafKind::circle, x, x.coords().norm()};
  }
  throw std::logic_error("unreachable");
}

} // namespace bisect
