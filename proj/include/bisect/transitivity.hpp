#ifndef BISECT_TRANSITIVITY_HPP
#define BISECT_TRANSITIVITY_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bisect/flows.hpp"

namespace bisect {

class InvalidProblem : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

class PlanningFailed : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class SupportOverlap : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

struct Tolerances
{
  double residual = 1e-6;
  /// nullopt: 0.05 times the smallest separation in the problem.
  std::optional<double> clearance;
};

struct TransitivityProblem
{
  GroupoidInstance instance;
  std::vector<Point> points;
  std::vector<Arrow> targets;
  /// One region per point; empty means whole space for every point.
  std::vector<Region> neighborhoods;
  Tolerances tolerances;
  std::uint64_t seed = 0;

  int n() const { return static_cast<int>(points.size()); }
  const Region& neighborhood(int i) const;
  /// Resolved clearance used by the planner.
  double clearance() const;
};

/// Throws InvalidProblem when the structural invariants fail (sizes, sources,
/// distinct base points, charts).
void validate(const TransitivityProblem& p);

enum class ViolationKind { TargetCollision, OffLeafTarget, LeafHypothesisViolated, NeighborhoodTooSmall };

std::string to_string(ViolationKind kind);
ViolationKind violation_kind_from_string(const std::string& name);

struct Violation
{
  ViolationKind kind;
  std::vector<int> indices;
  std::string message;
};

struct Admissibility
{
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
};

Admissibility admissible(const TransitivityProblem& p);

/// Seeded generator with a portable double conversion, so that planner
/// detours are reproducible across standard libraries.
class PortableRng
{
public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0, 1)
  double normal();

private:
  std::mt19937_64 engine_;
};

/// Piecewise-linear path in fiber coordinates.
struct ConfigurationPath
{
  GroupoidInstance instance;
  std::vector<Point> sources;
  std::vector<std::vector<Vector>> waypoints;  // [waypoint][point]
  std::vector<double> segment_clearance;       // audited min pairwise beta distance
  double clearance = 0.0;

  int segments() const { return static_cast<int>(waypoints.size()) - 1; }
  /// Fiber coordinates at path position s in [0, segments()].
  std::vector<Vector> at(double s) const;
  std::vector<Point> beta_images(const std::vector<Vector>& fibers) const;
};

struct PlanOptions
{
  int samples_per_segment = 1000;
  int max_detours = 64;
  int max_retries = 8;
};

/// Smallest pairwise beta distance over `samples` uniform samples of a segment,
/// and the sample parameter / pair attaining it.
struct SegmentAudit
{
  double min_distance = 0.0;
  double at = 0.0;
  int i = -1;
  int j = -1;
  bool leaves_neighborhood = false;
};

SegmentAudit audit_segment(const TransitivityProblem& p, const std::vector<Vector>& from,
                           const std::vector<Vector>& to, int samples);

ConfigurationPath plan_path(const TransitivityProblem& p, const PlanOptions& options = {});

/// sections[i] are supported near beta(base[i]); t is ordered point by point.
using SectionGroups = std::vector<std::vector<Section>>;

/// The star product sigma^{11}_{t_1} * ... * sigma^{nk}_{t_N}; zero times are dropped.
Bisection phi_chain(const GroupoidInstance& instance, const SectionGroups& sections,
                    const Vector& t);
/// (eval(sigma_hat(t), beta(g_i)) . g_i)_i; throws SupportOverlap.
std::vector<Arrow> phi(const std::vector<Arrow>& base, const SectionGroups& sections,
                       const Vector& t);
/// Concatenated fiber coordinates of phi, as a map of t.
VectorMap phi_map(const std::vector<Arrow>& base, const SectionGroups& sections);
/// Block-diagonal matrix of section values at beta(g_i).
Matrix phi_jacobian_blocks(const std::vector<Arrow>& base, const SectionGroups& sections);
void check_disjoint_supports(const SectionGroups& sections);

struct LocalStepOptions
{
  BasisKind basis = BasisKind::general;
  double newton_tol = 1e-11;
  /// Residual still accepted when Newton stalls.
  double accept = 5e-7;
  double max_radius = 1.0;
};

struct LocalStep
{
  Bisection increment;
  std::vector<Arrow> arrows;
  Vector times;
  /// Support ball per point; active[i] is false when point i did not move.
  std::vector<Ball> balls;
  std::vector<bool> active;
  double residual = 0.0;
  int iterations = 0;
};

/// Support radius for point i: min(0.4 * clearance to the other points,
/// 0.9 * depth inside V_i, max_radius).
std::vector<double> support_radii(const std::vector<Point>& betas,
                                  const std::vector<Region>& neighborhoods, double max_radius);

/// Newton-solves phi(t) = targets around the current arrows.
LocalStep local_step(const std::vector<Arrow>& current, const std::vector<Arrow>& targets,
                     const std::vector<Region>& neighborhoods, const LocalStepOptions& options = {});

enum class SolveStatus { solved, inadmissible, planning_failed, step_failed };

std::string to_string(SolveStatus s);
SolveStatus solve_status_from_string(const std::string& name);

struct SupportSummary
{
  std::vector<Ball> balls;
  std::vector<int> owners;
  bool inside_neighborhoods = true;
};

struct SymplecticDefects
{
  double lagrangian = 0.0;
  double poisson = 0.0;
  int grid = 0;
};

struct TraceRecord
{
  int step = 0;
  double position = 0.0;  // along the configuration path
  std::vector<Point> betas;
};

struct Certificate
{
  SolveStatus status = SolveStatus::solved;
  Bisection chain;
  std::vector<double> residuals;
  SupportSummary support;
  int steps = 0;
  std::uint64_t seed = 0;
  std::vector<Violation> violations;
  std::string failure;
  double failed_at = -1.0;
  std::optional<SymplecticDefects> symplectic;
  std::vector<TraceRecord> history;
};

struct SolveOptions
{
  BasisKind basis = BasisKind::general;
  PlanOptions plan;
  double initial_step = 0.1;
  double max_step = 1.0;
  double min_step = 1e-7;
  int max_steps = 20000;
  double max_radius = 1.0;
  /// Per-step beta displacement as a fraction of the support radius. The
  /// default is half the plateau radius.
  double step_fraction = 0.25;
};

/// Residuals |eval(sigma, x_i) - gamma_i| recomputed from the chain.
std::vector<double> residuals(const Bisection& sigma, const TransitivityProblem& p);
SupportSummary summarize_support(const Bisection& sigma, const TransitivityProblem& p);

Certificate solve(const TransitivityProblem& p, const SolveOptions& options = {});

/// n = 1 transport of alpha(gamma) to gamma with support in V.
Certificate bisection_through_arrow(const Arrow& gamma, const Region& v,
                                    const SolveOptions& options = {});

} // namespace bisect

#endif // BISECT_TRANSITIVITY_HPP
