#include "bisect/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bisect {

std::string to_string(Region::Kind kind)
{
  switch (kind) {
  case Region::Kind::whole_space: return "whole_space";
  case Region::Kind::balls: return "balls";
  case Region::Kind::annulus: return "annulus";
  }
  return "?";
}

Region Region::union_of(std::vector<Ball> balls)
{
  if (balls.empty())
    throw std::invalid_argument("a ball union needs at least one ball");
  for (const auto& b : balls)
    if (!(b.radius > 0.0))
      throw std::invalid_argument("ball radius must be positive");
  Region r;
  r.kind = Kind::balls;
  r.balls = std::move(balls);
  return r;
}

Region Region::ball(Point center, double radius)
{
  return union_of({Ball{std::move(center), radius}});
}

Region Region::annulus(Point center, double r_in, double r_out)
{
  if (!(r_in >= 0.0) || !(r_out > r_in))
    throw std::invalid_argument("annulus needs 0 <= r_in < r_out");
  Region r;
  r.kind = Kind::annulus;
  r.center = std::move(center);
  r.r_in = r_in;
  r.r_out = r_out;
  return r;
}

double Region::depth(const Point& x) const
{
  switch (kind) {
  case Kind::whole_space:
    return std::numeric_limits<double>::infinity();
  case Kind::balls: {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& b : balls)
      best = std::max(best, b.radius - distance(b.center, x));
    return best;
  }
  case Kind::annulus: {
    const double rho = distance(center, x);
    return std::min(rho - r_in, r_out - rho);
  }
  }
  return 0.0;
}

bool Region::contains(const Point& x) const
{
  return depth(x) > 0.0;
}

bool Region::contains_ball(const Ball& b) const
{
  switch (kind) {
  case Kind::whole_space:
    return true;
  case Kind::balls:
    return std::any_of(balls.begin(), balls.end(), [&](const Ball& outer) {
      return distance(outer.center, b.center) + b.radius < outer.radius;
    });
  case Kind::annulus: {
    const double rho = distance(center, b.center);
    return rho - b.radius > r_in && rho + b.radius < r_out;
  }
  }
  return false;
}

bool Region::contains_leaf(const LeafDescriptor& leaf) const
{
  switch (leaf.kind) {
  case LeafKind::whole_space:
    return kind == Kind::whole_space;
  case LeafKind::single_point:
    return contains(leaf.point);
  case LeafKind::circle: {
    // the circle of radius R about the origin
    if (kind == Kind::whole_space)
      return true;
    const Point origin = Point::euclidean(Vector::Zero(2));
    if (kind == Kind::balls)
      return contains_ball(Ball{origin, leaf.radius});
    const double c = center.coords().norm();
    return leaf.radius - c > r_in && leaf.radius + c < r_out;
  }
  }
  return false;
}

} // namespace bisect
