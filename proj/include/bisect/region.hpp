#ifndef BISECT_REGION_HPP
#define BISECT_REGION_HPP

#include <vector>

#include "bisect/geometry.hpp"
#include "bisect/groupoid.hpp"

namespace bisect {

struct Ball
{
  Point center;
  double radius = 0.0;

  bool contains(const Point& x) const { return distance(center, x) < radius; }
};

/// Open subsets of the base used as neighborhoods: the whole space, a finite
/// union of open balls, or an open annulus {r_in < |x - c| < r_out}.
struct Region
{
  enum class Kind { whole_space, balls, annulus };

  Kind kind = Kind::whole_space;
  std::vector<Ball> balls;
  Point center;
  double r_in = 0.0;
  double r_out = 0.0;

  static Region whole_space() { return {}; }
  static Region union_of(std::vector<Ball> balls);
  static Region ball(Point center, double radius);
  static Region annulus(Point center, double r_in, double r_out);

  bool bounded() const { return kind != Kind::whole_space; }
  bool contains(const Point& x) const;
  /// Closed ball inclusion (conservative for unions: one member must hold it).
  bool contains_ball(const Ball& b) const;
  /// Lower bound on the distance from x to the complement (negative if outside).
  double depth(const Point& x) const;
  bool contains_leaf(const LeafDescriptor& leaf) const;
};

std::string to_string(Region::Kind kind);

} // namespace bisect

#endif // BISECT_REGION_HPP
