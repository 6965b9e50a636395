#ifndef BISECT_SECTION_HPP
#define BISECT_SECTION_HPP

#include <variant>
#include <vector>

#include "bisect/geometry.hpp"
#include "bisect/groupoid.hpp"
#include "bisect/region.hpp"

namespace bisect {

/// Smooth cutoff equal to 1 on the union of the inner balls and 0 outside the
/// union of the outer balls: 1 - prod_k (1 - chi_k).
class Cutoff
{
public:
  Cutoff() = default;
  explicit Cutoff(PlateauBump bump) : bumps_{std::move(bump)} {}
  explicit Cutoff(std::vector<PlateauBump> bumps);

  const std::vector<PlateauBump>& bumps() const { return bumps_; }
  double value(const Point& x) const;
  Vector gradient(const Point& x) const;
  bool vanishes_at(const Point& x) const;
  std::vector<Ball> outer_balls() const;
  /// Sum of r_out^d, used to pick the tightest support bound.
  double footprint() const;

private:
  std::vector<PlateauBump> bumps_;
};

/// l(y) = offset + slope . (y - anchor)
struct AffineFunction
{
  Point anchor;
  Vector slope;
  double offset = 0.0;

  double value(const Point& y) const { return offset + slope.dot(displacement(anchor, y)); }
};

/// Vector field m * chi * e_axis (pair, symplectic_pair).
struct CoordinateField
{
  int axis = 0;
  double magnitude = 1.0;
};

/// The closed 1-form d(chi * l) (cotangent).
struct ExactForm
{
  AffineFunction potential;
};

/// so(2)-valued function m * chi (rotation_action).
struct AngularSpeed
{
  double magnitude = 1.0;
};

/// Hamiltonian vector field w#(d(chi * l)) (symplectic_pair).
struct HamiltonianField
{
  AffineFunction potential;
};

using SectionDescriptor = std::variant<CoordinateField, ExactForm, AngularSpeed, HamiltonianField>;

/// Scale used when the flow resolution is audited by refinement.
struct FlowSettings
{
  double resolution = 1.0;
};

/// Compactly supported algebroid section. The product of the cutoffs localizes
/// the descriptor; potential-type descriptors are localized through their
/// potential so that exactness / the Hamiltonian property survives.
class Section
{
public:
  Section() = default;
  Section(GroupoidInstance instance, std::vector<Cutoff> cutoffs, SectionDescriptor descriptor);

  static Section coordinate_field(const GroupoidInstance& instance, int axis, PlateauBump bump,
                                  double magnitude);
  static Section exact_form(const GroupoidInstance& instance, PlateauBump bump,
                            AffineFunction potential);
  static Section angular_speed(const GroupoidInstance& instance, PlateauBump bump,
                               double magnitude);
  static Section hamiltonian_field(const GroupoidInstance& instance, PlateauBump bump,
                                   AffineFunction potential);

  const GroupoidInstance& instance() const { return instance_; }
  const std::vector<Cutoff>& cutoffs() const { return cutoffs_; }
  const SectionDescriptor& descriptor() const { return descriptor_; }

  /// Value in A_x in fiber coordinates (length fiber_dim).
  Vector value(const Point& x) const;
  /// True when x lies outside some cutoff's outer support.
  bool vanishes_at(const Point& x) const;
  /// Tightest available a-priori support bound.
  std::vector<Ball> support_balls() const;

  Section scaled(double factor) const;
  Section with_cutoff(Cutoff extra) const;
  bool is_zero() const;

  /// Arrow reached from the unit at y after flowing for `time`; source is y.
  Arrow flow_arrow(const Point& y, double time, const FlowSettings& settings = {}) const;
  /// Same, with an explicit RK4 step count (ignored by the closed-form cotangent flow).
  Arrow flow_arrow_steps(const Point& y, double time, int steps) const;
  int flow_steps(double time, const FlowSettings& settings = {}) const;

private:
  double cutoff_value(const Point& x) const;
  Vector cutoff_gradient(const Point& x) const;
  Vector potential_gradient(const AffineFunction& l, const Point& x) const;
  double stiffness() const;

  GroupoidInstance instance_;
  std::vector<Cutoff> cutoffs_;
  SectionDescriptor descriptor_;
};

std::string descriptor_name(const SectionDescriptor& d);

} // namespace bisect

#endif // BISECT_SECTION_HPP
