#include "bisect/transitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bisect {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kClearanceFraction = 0.05;
constexpr double kRadiusFraction = 0.4;
constexpr double kDepthFraction = 0.9;

Point beta_of(const GroupoidInstance& g, const Point& source, const Vector& fiber)
{
  return target(arrow_from_fiber(g, source, fiber));
}

bool linear_leaves(const GroupoidInstance& g)
{
  return (g.kind() == GroupoidKind::pair || g.kind() == GroupoidKind::symplectic_pair) &&
         g.chart().kind == ChartKind::euclidean;
}

std::vector<Vector> lerp(const std::vector<Vector>& a, const std::vector<Vector>& b, double u)
{
  std::vector<Vector> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = u == 1.0 ? b[i] : Vector(a[i] + u * (b[i] - a[i]));
  return out;
}

std::string index_list(const std::vector<int>& idx)
{
  std::string s;
  for (std::size_t k = 0; k < idx.size(); ++k)
    s += (k ? "," : "") + std::to_string(idx[k]);
  return s;
}

} // namespace

const Region& TransitivityProblem::neighborhood(int i) const
{
  static const Region whole = Region::whole_space();
  return neighborhoods.empty() ? whole : neighborhoods.at(static_cast<std::size_t>(i));
}

double TransitivityProblem::clearance() const
{
  if (tolerances.clearance)
    return *tolerances.clearance;
  double sep = kInf;
  for (int i = 0; i < n(); ++i) {
    const LeafDescriptor li = leaf_of(instance, points[i]);
    for (int j = i + 1; j < n(); ++j) {
      sep = std::min(sep, distance(target(targets[i]), target(targets[j])));
      sep = std::min(sep, distance(points[i], points[j]));
      sep = std::min(sep, li.gap_to(leaf_of(instance, points[j])));
    }
  }
  return kClearanceFraction * sep;
}

void validate(const TransitivityProblem& p)
{
  if (p.n() < 1)
    throw InvalidProblem("a transitivity problem needs at least one base point");
  if (p.targets.size() != p.points.size())
    throw InvalidProblem("targets and points differ in length");
  if (!p.neighborhoods.empty() && p.neighborhoods.size() != p.points.size())
    throw InvalidProblem("neighborhoods must be empty or one per point");
  if (!(p.tolerances.residual > 0.0))
    throw InvalidProblem("residual tolerance must be positive");
  if (p.tolerances.clearance && !(*p.tolerances.clearance > 0.0))
    throw InvalidProblem("clearance must be positive");
  const Chart chart = p.instance.chart();
  for (int i = 0; i < p.n(); ++i) {
    const std::string at = "point " + std::to_string(i);
    if (!(p.points[i].chart() == chart))
      throw InvalidProblem(at + ": base point is not in the instance chart");
    if (!(p.targets[i].instance == p.instance))
      throw InvalidProblem(at + ": target arrow belongs to another groupoid");
    if (!(distance(source(p.targets[i]), p.points[i]) == 0.0))
      throw InvalidProblem(at + ": target source differs from the base point");
    for (int j = 0; j < i; ++j)
      if (!(distance(p.points[i], p.points[j]) > 0.0))
        throw InvalidProblem("base points " + std::to_string(j) + " and " + std::to_string(i) +
                             " coincide");
  }
}

std::string to_string(ViolationKind kind)
{
  switch (kind) {
  case ViolationKind::TargetCollision: return "TargetCollision";
  case ViolationKind::OffLeafTarget: return "OffLeafTarget";
  case ViolationKind::LeafHypothesisViolated: return "LeafHypothesisViolated";
  case ViolationKind::NeighborhoodTooSmall: return "NeighborhoodTooSmall";
  }
  return "?";
}

ViolationKind violation_kind_from_string(const std::string& name)
{
  for (auto k : {ViolationKind::TargetCollision, ViolationKind::OffLeafTarget,
                 ViolationKind::LeafHypothesisViolated, ViolationKind::NeighborhoodTooSmall})
    if (to_string(k) == name)
      return k;
  throw std::invalid_argument("unknown violation kind: " + name);
}

bool Admissibility::has(ViolationKind kind) const
{
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.kind == kind; });
}

Admissibility admissible(const TransitivityProblem& p)
{
  validate(p);
  Admissibility out;
  auto add = [&](ViolationKind k, std::vector<int> idx, const std::string& why) {
    out.violations.push_back({k, idx, to_string(k) + " at " + index_list(idx) + ": " + why});
  };
  const int n = p.n();
  std::vector<Point> betas;
  std::vector<LeafDescriptor> leaves;
  for (int i = 0; i < n; ++i) {
    betas.push_back(target(p.targets[i]));
    leaves.push_back(leaf_of(p.instance, p.points[i]));
  }

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (distance(betas[i], betas[j]) <= 1e-12)
        add(ViolationKind::TargetCollision, {i, j}, "beta images coincide");

  for (int i = 0; i < n; ++i)
    if (!leaves[i].contains(betas[i]))
      add(ViolationKind::OffLeafTarget, {i}, "beta image leaves the orbit of the base point");

  for (int i = 0; i < n; ++i) {
    if (leaves[i].dimension(p.instance.base_dim()) >= 2)
      continue;
    for (int j = i + 1; j < n; ++j)
      if (leaves[i].contains(p.points[j]))
        add(ViolationKind::LeafHypothesisViolated, {i, j},
            "two base points share a leaf of dimension < 2");
  }

  for (int i = 0; i < n; ++i) {
    const Region& v = p.neighborhood(i);
    if (leaves[i].kind != LeafKind::whole_space) {
      if (!v.contains_leaf(leaves[i]))
        add(ViolationKind::NeighborhoodTooSmall, {i}, "neighborhood does not contain the leaf");
    } else if (v.bounded() && !(v.contains(p.points[i]) && v.contains(betas[i]))) {
      add(ViolationKind::NeighborhoodTooSmall, {i},
          "neighborhood misses the base point or its beta image");
    }
  }
  return out;
}

double PortableRng::uniform()
{
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double PortableRng::normal()
{
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<Vector> ConfigurationPath::at(double s) const
{
  const int m = segments();
  if (m <= 0)
    return waypoints.front();
  s = std::clamp(s, 0.0, static_cast<double>(m));
  const int k = std::min(m - 1, static_cast<int>(std::floor(s)));
  return lerp(waypoints[k], waypoints[k + 1], s - k);
}

std::vector<Point> ConfigurationPath::beta_images(const std::vector<Vector>& fibers) const
{
  std::vector<Point> out;
  for (std::size_t i = 0; i < fibers.size(); ++i)
    out.push_back(beta_of(instance, sources[i], fibers[i]));
  return out;
}

SegmentAudit audit_segment(const TransitivityProblem& p, const std::vector<Vector>& from,
                           const std::vector<Vector>& to, int samples)
{
  SegmentAudit a;
  a.min_distance = kInf;
  const int n = p.n();
  samples = std::max(samples, 2);
  for (int s = 0; s < samples; ++s) {
    const double u = static_cast<double>(s) / (samples - 1);
    const auto fibers = lerp(from, to, u);
    std::vector<Point> b;
    for (int i = 0; i < n; ++i) {
      b.push_back(beta_of(p.instance, p.points[i], fibers[i]));
      if (p.neighborhood(i).bounded() && !p.neighborhood(i).contains(b.back()))
        a.leaves_neighborhood = true;
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double d = distance(b[i], b[j]);
        if (d < a.min_distance) {
          a.min_distance = d;
          a.at = u;
          a.i = i;
          a.j = j;
        }
      }
  }
  if (linear_leaves(p.instance)) {
    // exact minimum of |r0 + u dr| between samples
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Vector r0 = from[i] - from[j];
        const Vector dr = (to[i] - to[j]) - r0;
        const double dd = dr.squaredNorm();
        const double u = dd > 0.0 ? std::clamp(-r0.dot(dr) / dd, 0.0, 1.0) : 0.0;
        const double d = (r0 + u * dr).norm();
        if (d < a.min_distance) {
          a.min_distance = d;
          a.at = u;
          a.i = i;
          a.j = j;
        }
      }
  }
  return a;
}

ConfigurationPath plan_path(const TransitivityProblem& p, const PlanOptions& options)
{
  if (!admissible(p).ok())
    throw InvalidProblem("plan_path needs an admissible problem");
  const int n = p.n();
  const double delta = p.clearance();

  std::vector<Vector> start, end;
  for (int i = 0; i < n; ++i) {
    start.push_back(fiber_coords(unit(p.instance, p.points[i])));
    end.push_back(fiber_coords(p.targets[i]));
  }

  ConfigurationPath path;
  path.instance = p.instance;
  path.sources = p.points;
  path.clearance = delta;

  PortableRng rng(p.seed);
  std::string last_reason = "no attempt made";
  for (int attempt = 0; attempt < std::max(options.max_retries, 1); ++attempt) {
    std::vector<std::vector<Vector>> wp{start, end};
    for (int detour = 0; detour <= options.max_detours; ++detour) {
      int bad = -1;
      SegmentAudit worst;
      std::vector<double> clearances;
      for (std::size_t k = 0; k + 1 < wp.size(); ++k) {
        const SegmentAudit a = audit_segment(p, wp[k], wp[k + 1], options.samples_per_segment);
        clearances.push_back(a.min_distance);
        if (bad < 0 && (a.min_distance < delta || a.leaves_neighborhood)) {
          bad = static_cast<int>(k);
          worst = a;
        }
      }
      if (bad < 0) {
        path.waypoints = std::move(wp);
        path.segment_clearance = std::move(clearances);
        return path;
      }
      if (worst.leaves_neighborhood) {
        last_reason = "path leaves a neighborhood";
        break;
      }
      if (!linear_leaves(p.instance))
        throw PlanningFailed("clearance violated on a leaf of dimension < 2 (points " +
                             std::to_string(worst.i) + ", " + std::to_string(worst.j) + ")");

      // Small perturbation: push the offending pair apart, perpendicular
      // to their relative motion, by 2 delta each.
      const int i = worst.i, j = worst.j;
      const Vector rel = (wp[bad + 1][i] - wp[bad][i]) - (wp[bad + 1][j] - wp[bad][j]);
      const int d = static_cast<int>(rel.size());
      Vector dir(d);
      if (d == 2 && rel.norm() > 0.0) {
        dir << -rel[1], rel[0];
        if (rng.uniform() < 0.5)
          dir = -dir;
      } else {
        for (int c = 0; c < d; ++c)
          dir[c] = rng.normal();
        if (rel.norm() > 0.0)
          dir -= dir.dot(rel.normalized()) * rel.normalized();
      }
      if (!(dir.norm() > 0.0)) {
        last_reason = "degenerate detour direction";
        break;
      }
      dir.normalize();

      int idx;
      if (worst.at <= 0.0) {
        idx = bad;
      } else if (worst.at >= 1.0) {
        idx = bad + 1;
      } else {
        wp.insert(wp.begin() + bad + 1, lerp(wp[bad], wp[bad + 1], worst.at));
        idx = bad + 1;
      }
      if (idx == 0 || idx + 1 == static_cast<int>(wp.size())) {
        last_reason = "clearance violated at the path ends";
        break;
      }
      wp[idx][i] += 2.0 * delta * dir;
      wp[idx][j] -= 2.0 * delta * dir;
      last_reason = "detour budget exhausted";
    }
  }
  throw PlanningFailed("no collision-free path: " + last_reason);
}

void check_disjoint_supports(const SectionGroups& sections)
{
  for (std::size_t i = 0; i < sections.size(); ++i)
    for (std::size_t j = i + 1; j < sections.size(); ++j)
      for (const auto& si : sections[i])
        for (const auto& sj : sections[j])
          for (const auto& bi : si.support_balls())
            for (const auto& bj : sj.support_balls())
              if (distance(bi.center, bj.center) < bi.radius + bj.radius)
                throw SupportOverlap("support balls of points " + std::to_string(i) + " and " +
                                     std::to_string(j) + " overlap");
}

Bisection phi_chain(const GroupoidInstance& instance, const SectionGroups& sections,
                    const Vector& t)
{
  std::vector<Primitive> order;
  Eigen::Index k = 0;
  for (const auto& group : sections)
    for (const auto& s : group) {
      if (k >= t.size())
        throw std::invalid_argument("phi: too few parameters");
      order.push_back({s, t[k++]});
    }
  if (k != t.size())
    throw std::invalid_argument("phi: too many parameters");
  // sigma^{11} * ... * sigma^{nk}: the last factor acts first
  Bisection sigma(instance);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (it->time != 0.0)
      sigma.append(*it);
  return sigma;
}

namespace {

std::vector<Arrow> phi_unchecked(const std::vector<Arrow>& base, const SectionGroups& sections,
                                 const Vector& t)
{
  const Bisection sigma = phi_chain(base.front().instance, sections, t);
  std::vector<Arrow> out;
  out.reserve(base.size());
  for (const auto& g : base)
    out.push_back(act(sigma, g));
  return out;
}

} // namespace

std::vector<Arrow> phi(const std::vector<Arrow>& base, const SectionGroups& sections,
                       const Vector& t)
{
  if (base.size() != sections.size() || base.empty())
    throw std::invalid_argument("phi: one section group per base arrow");
  check_disjoint_supports(sections);
  return phi_unchecked(base, sections, t);
}

VectorMap phi_map(const std::vector<Arrow>& base, const SectionGroups& sections)
{
  if (base.size() != sections.size() || base.empty())
    throw std::invalid_argument("phi: one section group per base arrow");
  check_disjoint_supports(sections);
  return [base, sections](const Vector& t) {
    const auto arrows = phi_unchecked(base, sections, t);
    const int k = base.front().instance.fiber_dim();
    Vector out(k * static_cast<Eigen::Index>(base.size()));
    for (std::size_t i = 0; i < base.size(); ++i)
      out.segment(k * static_cast<Eigen::Index>(i), k) = fiber_difference(base[i], arrows[i]);
    return out;
  };
}

Matrix phi_jacobian_blocks(const std::vector<Arrow>& base, const SectionGroups& sections)
{
  const int k = base.front().instance.fiber_dim();
  Eigen::Index cols = 0;
  for (const auto& g : sections)
    cols += static_cast<Eigen::Index>(g.size());
  Matrix j = Matrix::Zero(k * static_cast<Eigen::Index>(base.size()), cols);
  Eigen::Index c = 0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const Point y = target(base[i]);
    for (const auto& s : sections[i])
      j.block(k * static_cast<Eigen::Index>(i), c++, k, 1) = s.value(y);
  }
  return j;
}

std::vector<double> support_radii(const std::vector<Point>& betas,
                                  const std::vector<Region>& neighborhoods, double max_radius)
{
  std::vector<double> r(betas.size(), max_radius);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    for (std::size_t j = 0; j < betas.size(); ++j)
      if (j != i)
        r[i] = std::min(r[i], kRadiusFraction * distance(betas[i], betas[j]));
    if (!neighborhoods.empty())
      r[i] = std::min(r[i], kDepthFraction * neighborhoods[i].depth(betas[i]));
    if (!(r[i] > 0.0))
      throw GeometryError("no room for a support ball around point " + std::to_string(i));
  }
  return r;
}

LocalStep local_step(const std::vector<Arrow>& current, const std::vector<Arrow>& targets,
                     const std::vector<Region>& neighborhoods, const LocalStepOptions& options)
{
  if (current.empty() || current.size() != targets.size())
    throw std::invalid_argument("local_step: mismatched arrow lists");
  const GroupoidInstance g = current.front().instance;
  std::vector<Point> betas;
  for (const auto& a : current)
    betas.push_back(target(a));
  const auto radii = support_radii(betas, neighborhoods, options.max_radius);

  SectionGroups sections;
  for (std::size_t i = 0; i < current.size(); ++i)
    sections.push_back(fiber_basis(g, betas[i], Ball{betas[i], radii[i]}, options.basis));

  const VectorMap map = phi_map(current, sections);
  const int k = g.fiber_dim();
  Vector goal(k * static_cast<Eigen::Index>(current.size()));
  for (std::size_t i = 0; i < current.size(); ++i)
    goal.segment(k * static_cast<Eigen::Index>(i), k) = fiber_difference(current[i], targets[i]);

  NewtonOptions opts;
  opts.tol = options.newton_tol;
  opts.accept = options.accept;
  const NewtonResult res = newton_solve(map, goal, Vector::Zero(goal.size()), opts);

  LocalStep step;
  step.times = res.solution;
  step.iterations = res.iterations;
  step.increment = phi_chain(g, sections, step.times);
  step.arrows = phi_unchecked(current, sections, step.times);
  for (std::size_t i = 0; i < current.size(); ++i) {
    step.residual = std::max(step.residual, arrow_distance(step.arrows[i], targets[i]));
    step.balls.push_back({betas[i], radii[i]});
    step.active.push_back(!step.times.segment(k * static_cast<Eigen::Index>(i), k).isZero(0.0));
  }
  return step;
}

std::string to_string(SolveStatus s)
{
  switch (s) {
  case SolveStatus::solved: return "solved";
  case SolveStatus::inadmissible: return "inadmissible";
  case SolveStatus::planning_failed: return "planning_failed";
  case SolveStatus::step_failed: return "step_failed";
  }
  return "?";
}

SolveStatus solve_status_from_string(const std::string& name)
{
  for (auto s : {SolveStatus::solved, SolveStatus::inadmissible, SolveStatus::planning_failed,
                 SolveStatus::step_failed})
    if (to_string(s) == name)
      return s;
  throw std::invalid_argument("unknown status: " + name);
}

std::vector<double> residuals(const Bisection& sigma, const TransitivityProblem& p)
{
  std::vector<double> r;
  for (int i = 0; i < p.n(); ++i)
    r.push_back(arrow_distance(eval(sigma, p.points[i]), p.targets[i]));
  return r;
}

SupportSummary summarize_support(const Bisection& sigma, const TransitivityProblem& p)
{
  SupportSummary s;
  s.balls = a_priori_support(sigma);
  for (const auto& b : s.balls) {
    int owner = -1;
    for (int i = 0; i < p.n() && owner < 0; ++i)
      if (p.neighborhood(i).contains_ball(b))
        owner = i;
    s.owners.push_back(owner);
    if (owner < 0)
      s.inside_neighborhoods = false;
  }
  return s;
}

Certificate solve(const TransitivityProblem& p, const SolveOptions& options)
{
  Certificate cert;
  cert.seed = p.seed;
  cert.chain = Bisection(p.instance);

  const Admissibility adm = admissible(p);
  if (!adm.ok()) {
    cert.status = SolveStatus::inadmissible;
    cert.violations = adm.violations;
    cert.failure = adm.violations.front().message;
    return cert;
  }

  ConfigurationPath path;
  try {
    path = plan_path(p, options.plan);
  } catch (const PlanningFailed& e) {
    cert.status = SolveStatus::planning_failed;
    cert.failure = e.what();
    return cert;
  }

  const int n = p.n();
  std::vector<Arrow> current;
  for (int i = 0; i < n; ++i)
    current.push_back(unit(p.instance, p.points[i]));
  cert.history.push_back({0, 0.0, p.points});

  LocalStepOptions lopts;
  lopts.basis = options.basis;
  lopts.max_radius = options.max_radius;
  lopts.accept = 0.5 * p.tolerances.residual;

  double rho = options.initial_step;
  int successes = 0;
  for (int k = 0; k < path.segments(); ++k) {
    const auto& from = path.waypoints[k];
    const auto& to = path.waypoints[k + 1];
    double u = 0.0;
    while (u < 1.0) {
      if (cert.steps >= options.max_steps) {
        cert.status = SolveStatus::step_failed;
        cert.failed_at = k + u;
        cert.failure = "continuation step budget exhausted";
        break;
      }
      std::vector<Point> betas;
      for (const auto& a : current)
        betas.push_back(target(a));
      std::vector<double> radii;
      try {
        radii = support_radii(betas, p.neighborhoods, options.max_radius);
      } catch (const GeometryError& e) {
        cert.status = SolveStatus::step_failed;
        cert.failed_at = k + u;
        cert.failure = e.what();
        break;
      }

      double du = 1.0 - u;
      double longest = 0.0;
      for (int i = 0; i < n; ++i) {
        const double df = (to[i] - from[i]).norm();
        if (df == 0.0)
          continue;
        double cap = rho;
        if (linear_leaves(p.instance)) {
          cap = std::min(cap, options.step_fraction * radii[i]);
        } else if (p.instance.kind() == GroupoidKind::rotation_action) {
          const double rad = p.points[i].coords().norm();
          if (rad > 0.0)
            cap = std::min(cap, options.step_fraction * radii[i] / rad);
        }
        du = std::min(du, cap / df);
        longest = std::max(longest, df);
      }
      const double u_next = du >= 1.0 - u ? 1.0 : u + du;

      std::vector<Arrow> goal;
      const auto fibers = lerp(from, to, u_next);
      for (int i = 0; i < n; ++i)
        goal.push_back(u_next == 1.0 && k + 1 == path.segments()
                         ? p.targets[i]
                         : arrow_from_fiber(p.instance, p.points[i], fibers[i]));

      bool ok = false;
      std::string why;
      LocalStep step;
      try {
        step = local_step(current, goal, p.neighborhoods, lopts);
        ok = step.residual <= lopts.accept;
        if (!ok)
          why = "local residual above tolerance";
        for (int i = 0; ok && i < n; ++i)
          if (step.active[i] && !p.neighborhood(i).contains_ball(step.balls[i])) {
            ok = false;
            why = "support ball leaves its neighborhood";
          }
      } catch (const std::exception& e) {
        why = e.what();
      }

      if (ok) {
        // star(increment, sigma): the increment acts after the current chain
        for (const auto& prim : step.increment.chain())
          cert.chain.append(prim);
        current = std::move(step.arrows);
        u = u_next;
        ++cert.steps;
        std::vector<Point> now;
        for (const auto& a : current)
          now.push_back(target(a));
        cert.history.push_back({cert.steps, k + u, std::move(now)});
        if (++successes >= 3) {
          rho = std::min(2.0 * rho, options.max_step);
          successes = 0;
        }
      } else {
        successes = 0;
        rho = 0.5 * std::min(rho, longest * (u_next - u));
        if (rho < options.min_step) {
          cert.status = SolveStatus::step_failed;
          cert.failed_at = k + u;
          cert.failure = "continuation stalled: " + why;
          break;
        }
      }
    }
    if (cert.status != SolveStatus::solved)
      break;
  }

  cert.residuals = residuals(cert.chain, p);
  cert.support = summarize_support(cert.chain, p);
  if (cert.status == SolveStatus::solved) {
    for (int i = 0; i < n; ++i)
      if (!(cert.residuals[i] <= p.tolerances.residual)) {
        cert.status = SolveStatus::step_failed;
        cert.failed_at = path.segments();
        cert.failure = "final residual above tolerance at point " + std::to_string(i);
      }
  }
  return cert;
}

Certificate bisection_through_arrow(const Arrow& gamma, const Region& v,
                                    const SolveOptions& options)
{
  TransitivityProblem p;
  p.instance = gamma.instance;
  p.points = {source(gamma)};
  p.targets = {gamma};
  p.neighborhoods = {v};
  return solve(p, options);
}

} // namespace bisect
