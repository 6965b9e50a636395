#ifndef BISECT_GROUPOID_HPP
#define BISECT_GROUPOID_HPP

#include <string>
#include <variant>

#include "bisect/geometry.hpp"

namespace bisect {

class NotComposable : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class GroupoidKind { pair, cotangent, rotation_action, symplectic_pair };

std::string to_string(GroupoidKind kind);
GroupoidKind groupoid_kind_from_string(const std::string& name);

/// Immutable descriptor of one of the built-in groupoids over a global chart.
///
///   pair(d)             M x M over R^d (or the flat torus), arrows (target, source)
///   cotangent(d)        T*R^d, source = target = base point, fiberwise addition
///   rotation_action     SO(2) acting on R^2, angle kept unreduced
///   symplectic_pair(2m) pair groupoid of (R^2m, sum dq^dp) carrying (-w) + w
class GroupoidInstance
{
public:
  GroupoidInstance() = default;

  static GroupoidInstance pair(int d, ChartKind chart = ChartKind::euclidean);
  static GroupoidInstance cotangent(int d);
  static GroupoidInstance rotation_action();
  static GroupoidInstance symplectic_pair(int two_m);

  GroupoidKind kind() const { return kind_; }
  int base_dim() const { return base_dim_; }
  Chart chart() const { return {chart_, base_dim_}; }
  int fiber_dim() const;
  bool symplectic() const;
  /// Dimension of the arrow payload in flattened coordinates.
  int payload_dim() const;

  bool operator==(const GroupoidInstance&) const = default;

private:
  GroupoidInstance(GroupoidKind kind, int dim, ChartKind chart);

  GroupoidKind kind_ = GroupoidKind::pair;
  int base_dim_ = 2;
  ChartKind chart_ = ChartKind::euclidean;
};

/// Canonical Darboux matrix W with w(v, u) = v^T W u for coordinates (q_1..q_m, p_1..p_m).
Matrix canonical_symplectic_matrix(int two_m);

struct PairPayload
{
  Point target;
  Point source;
};

struct CotangentPayload
{
  Point base;
  Vector covector;
};

struct RotationPayload
{
  double angle = 0.0;
  Point base;
};

using ArrowPayload = std::variant<PairPayload, CotangentPayload, RotationPayload>;

struct Arrow
{
  GroupoidInstance instance;
  ArrowPayload payload;
};

inline constexpr double kComposeTolerance = 1e-7;

Point source(const Arrow& g);
Point target(const Arrow& g);
Arrow unit(const GroupoidInstance& instance, const Point& x);

/// g1 . g2, defined when source(g1) = target(g2) within `eps`.
/// The interface point is snapped to target(g2).
Arrow multiply(const Arrow& g1, const Arrow& g2, double eps = kComposeTolerance);
Arrow invert(const Arrow& g);

Vector rotate(double angle, const Vector& x);

/// Flattened payload: pair [target, source], cotangent [base, covector],
/// rotation [angle, base].
Vector payload_coords(const Arrow& g);
Arrow arrow_from_payload(const GroupoidInstance& instance, const Vector& coords);

/// Euclidean distance of payload coordinates (torus components wrapped).
double arrow_distance(const Arrow& a, const Arrow& b);

/// Coordinates of g inside its source fiber: pair the target point,
/// cotangent the covector, rotation the angle.
Vector fiber_coords(const Arrow& g);
Arrow arrow_from_fiber(const GroupoidInstance& instance, const Point& source_pt,
                       const Vector& fiber);
/// Difference of fiber coordinates b - a for arrows over the same source.
Vector fiber_difference(const Arrow& a, const Arrow& b);

enum class LeafKind { whole_space, single_point, circle };

struct LeafDescriptor
{
  LeafKind kind = LeafKind::whole_space;
  Point point;          // single_point
  double radius = 0.0;  // circle, centred at the origin

  int dimension(int base_dim) const;
  bool contains(const Point& x, double tol = 1e-9) const;
  /// Distance between two leaves, used for clearance bookkeeping.
  double gap_to(const LeafDescriptor& other) const;
};

std::string to_string(LeafKind kind);

LeafDescriptor leaf_of(const GroupoidInstance& instance, const Point& x);

} // namespace bisect

#endif // BISECT_GROUPOID_HPP
