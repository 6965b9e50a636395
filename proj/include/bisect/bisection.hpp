#ifndef BISECT_BISECTION_HPP
#define BISECT_BISECTION_HPP

#include <vector>

#include "bisect/section.hpp"

namespace bisect {

struct Primitive
{
  Section section;
  double time = 0.0;
};

/// A bisection held intensionally as a chain of flow primitives. The first
/// primitive acts first; the empty chain is the unit bisection.
class Bisection
{
public:
  Bisection() = default;
  explicit Bisection(GroupoidInstance instance) : instance_(instance) {}
  Bisection(GroupoidInstance instance, std::vector<Primitive> chain);

  static Bisection identity(const GroupoidInstance& instance) { return Bisection(instance); }

  const GroupoidInstance& instance() const { return instance_; }
  const std::vector<Primitive>& chain() const { return chain_; }
  bool empty() const { return chain_.empty(); }
  std::size_t size() const { return chain_.size(); }

  void append(Primitive p);

private:
  GroupoidInstance instance_;
  std::vector<Primitive> chain_;
};

/// Left fold of the chain over the arrow action, starting from unit(x).
Arrow eval(const Bisection& sigma, const Point& x, const FlowSettings& settings = {});

/// Continue the arrow action from an arbitrary arrow g: sigma(beta(g)) . g
Arrow act(const Bisection& sigma, const Arrow& g, const FlowSettings& settings = {});

/// (sigma * tau)(x) = sigma(beta(tau(x))) . tau(x)
Bisection star(const Bisection& sigma, const Bisection& tau);

/// Reversed chain with negated times.
Bisection inverse(const Bisection& sigma);

/// beta o sigma, with a numerical inverse.
class BetaMap
{
public:
  explicit BetaMap(Bisection sigma, FlowSettings settings = {});

  Point operator()(const Point& x) const;
  /// Newton seeded at the query point, with a coarse grid search as fallback.
  /// Throws NoConvergence when neither produces a preimage within `tol`.
  Point invert(const Point& y, double tol = 1e-12) const;

  const Bisection& bisection() const { return sigma_; }

private:
  Bisection sigma_;
  FlowSettings settings_;
};

BetaMap beta_map(const Bisection& sigma);

/// sigma^{-1}(x) = sigma((beta o sigma)^{-1}(x))^{-1}, evaluated pointwise.
Arrow inverse_by_formula(const Bisection& sigma, const Point& x);

inline constexpr double kSupportTolerance = 1e-9;

/// Axis-aligned sample grid.
struct SampleGrid
{
  Vector lower;
  Vector upper;
  int per_axis = 64;
  Chart chart;

  std::size_t size() const;
  Point at(std::size_t index) const;

  /// Default grid: bounding box of the balls, padded by 10%, 64^d capped at 2^20 points.
  static SampleGrid around(const std::vector<Ball>& balls, const Chart& chart, int per_axis = 64);
};

struct SupportReport
{
  std::vector<Ball> a_priori;
  std::vector<Point> empirical;
  std::size_t grid_points = 0;
  bool empirical_inside = true;

  bool a_priori_contains(const Point& x) const;
};

SupportReport support_report(const Bisection& sigma, const SampleGrid& grid,
                             double eps = kSupportTolerance);
std::vector<Ball> a_priori_support(const Bisection& sigma);

} // namespace bisect

#endif // BISECT_BISECTION_HPP
