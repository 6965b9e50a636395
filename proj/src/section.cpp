#include "bisect/section.hpp"

#include <algorithm>
#include <cmath>

namespace bisect {

namespace {

// RK4 substeps per unit of (time x stiffness). Tuned so that forward/backward
// flows of the built-in sections cancel to ~1e-11.
constexpr double kStepsPerStiffness = 24.0;
constexpr int kMaxFlowSteps = 1 << 20;

// sup |S'| of the smooth step (attained at t = 1/2) and a bound on |S''|.
constexpr double kStepSlope = 2.0;
constexpr double kStepCurvature = 12.0;

// Allocation-free evaluation of a Euclidean section field, used by the RK4
// flows where the generic Point-based path dominates the cost.
class FlatField
{
public:
  struct Bump
  {
    std::vector<double> center;
    double r_in, r_out;
  };

  FlatField(const std::vector<Cutoff>& cutoffs, const SectionDescriptor& descriptor, int dim)
    : dim_(dim), descriptor_(descriptor)
  {
    for (const auto& c : cutoffs) {
      std::vector<Bump> bumps;
      for (const auto& b : c.bumps()) {
        const Vector& x = b.center().coords();
        bumps.push_back({std::vector<double>(x.data(), x.data() + x.size()), b.r_in(), b.r_out()});
      }
      cutoffs_.push_back(std::move(bumps));
    }
    if (const auto* h = std::get_if<HamiltonianField>(&descriptor_)) {
      const Vector& a = h->potential.anchor.coords();
      anchor_.assign(a.data(), a.data() + a.size());
    }
    grad_.resize(dim);
    part_.resize(dim);
  }

  void operator()(const double* z, double* out)
  {
    std::fill(out, out + dim_, 0.0);
    const bool need_grad = std::holds_alternative<HamiltonianField>(descriptor_);
    double chi = 1.0;
    std::fill(grad_.begin(), grad_.end(), 0.0);
    for (const auto& bumps : cutoffs_) {
      double c_val = 0.0;
      if (!cutoff(bumps, z, need_grad, c_val))
        return;
      // product rule: grad(chi * c) = c grad(chi) + chi grad(c)
      for (int i = 0; i < dim_; ++i)
        grad_[i] = c_val * grad_[i] + chi * part_[i];
      chi *= c_val;
    }
    if (const auto* f = std::get_if<CoordinateField>(&descriptor_)) {
      out[f->axis] = f->magnitude * chi;
    } else if (const auto* h = std::get_if<HamiltonianField>(&descriptor_)) {
      const Vector& slope = h->potential.slope;
      double l = h->potential.offset;
      for (int i = 0; i < dim_; ++i)
        l += slope[i] * (z[i] - anchor_[i]);
      const int m = dim_ / 2;
      for (int i = 0; i < m; ++i) {
        out[i] = l * grad_[i + m] + chi * slope[i + m];
        out[i + m] = -(l * grad_[i] + chi * slope[i]);
      }
    }
  }

private:
  // False when the cutoff vanishes at z; part_ receives its gradient.
  bool cutoff(const std::vector<Bump>& bumps, const double* z, bool need_grad, double& value)
  {
    std::fill(part_.begin(), part_.end(), 0.0);
    if (bumps.size() == 1) {
      const Bump& b = bumps.front();
      const double rho = radius(b, z);
      if (rho >= b.r_out)
        return false;
      if (rho <= b.r_in) {
        value = 1.0;
        return true;
      }
      const double w = b.r_out - b.r_in;
      value = smooth_step((b.r_out - rho) / w);
      if (need_grad) {
        const double k = -smooth_step_derivative((b.r_out - rho) / w) / (w * rho);
        for (int i = 0; i < dim_; ++i)
          part_[i] = k * (z[i] - b.center[i]);
      }
      return true;
    }
    vals_.resize(bumps.size());
    coefs_.resize(bumps.size());
    bool any = false;
    for (std::size_t k = 0; k < bumps.size(); ++k) {
      const Bump& b = bumps[k];
      const double rho = radius(b, z);
      vals_[k] = coefs_[k] = 0.0;
      if (rho >= b.r_out)
        continue;
      any = true;
      if (rho <= b.r_in) {
        vals_[k] = 1.0;
        continue;
      }
      const double w = b.r_out - b.r_in;
      vals_[k] = smooth_step((b.r_out - rho) / w);
      coefs_[k] = -smooth_step_derivative((b.r_out - rho) / w) / (w * rho);
    }
    if (!any)
      return false;
    double complement = 1.0;
    for (double v : vals_)
      complement *= 1.0 - v;
    value = 1.0 - complement;
    if (need_grad) {
      for (std::size_t k = 0; k < bumps.size(); ++k) {
        if (coefs_[k] == 0.0)
          continue;
        double others = 1.0;
        for (std::size_t l = 0; l < bumps.size(); ++l)
          if (l != k)
            others *= 1.0 - vals_[l];
        for (int i = 0; i < dim_; ++i)
          part_[i] += others * coefs_[k] * (z[i] - bumps[k].center[i]);
      }
    }
    return true;
  }

  double radius(const Bump& b, const double* z) const
  {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i)
      s += (z[i] - b.center[i]) * (z[i] - b.center[i]);
    return std::sqrt(s);
  }

  int dim_;
  const SectionDescriptor& descriptor_;
  std::vector<std::vector<Bump>> cutoffs_;
  std::vector<double> anchor_, grad_, part_, vals_, coefs_;
};

Vector flat_rk4(FlatField& field, const Vector& x0, double t_final, int steps)
{
  const int d = static_cast<int>(x0.size());
  std::vector<double> x(x0.data(), x0.data() + d), k1(d), k2(d), k3(d), k4(d), tmp(d);
  const double h = t_final / steps;
  for (int s = 0; s < steps; ++s) {
    field(x.data(), k1.data());
    for (int i = 0; i < d; ++i)
      tmp[i] = x[i] + 0.5 * h * k1[i];
    field(tmp.data(), k2.data());
    for (int i = 0; i < d; ++i)
      tmp[i] = x[i] + 0.5 * h * k2[i];
    field(tmp.data(), k3.data());
    for (int i = 0; i < d; ++i)
      tmp[i] = x[i] + h * k3[i];
    field(tmp.data(), k4.data());
    for (int i = 0; i < d; ++i)
      x[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return Eigen::Map<const Vector>(x.data(), d);
}

} // namespace

Cutoff::Cutoff(std::vector<PlateauBump> bumps) : bumps_(std::move(bumps))
{
  if (bumps_.empty())
    throw std::invalid_argument("cutoff needs at least one bump");
}

double Cutoff::value(const Point& x) const
{
  if (bumps_.size() == 1)
    return bumps_.front().value(x);
  double complement = 1.0;
  for (const auto& b : bumps_)
    complement *= 1.0 - b.value(x);
  return 1.0 - complement;
}

Vector Cutoff::gradient(const Point& x) const
{
  Vector g = Vector::Zero(x.dim());
  for (std::size_t k = 0; k < bumps_.size(); ++k) {
    double others = 1.0;
    for (std::size_t l = 0; l < bumps_.size(); ++l)
      if (l != k)
        others *= 1.0 - bumps_[l].value(x);
    if (others != 0.0)
      g += others * bumps_[k].gradient(x);
  }
  return g;
}

bool Cutoff::vanishes_at(const Point& x) const
{
  return std::all_of(bumps_.begin(), bumps_.end(),
                     [&](const PlateauBump& b) { return b.vanishes_at(x); });
}

std::vector<Ball> Cutoff::outer_balls() const
{
  std::vector<Ball> out;
  out.reserve(bumps_.size());
  for (const auto& b : bumps_)
    out.push_back({b.center(), b.r_out()});
  return out;
}

double Cutoff::footprint() const
{
  double f = 0.0;
  for (const auto& b : bumps_)
    f += std::pow(b.r_out(), b.center().dim());
  return f;
}

std::string descriptor_name(const SectionDescriptor& d)
{
  return std::visit(
    [](const auto& v) -> std::string {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, CoordinateField>)
        return "coordinate_field";
      else if constexpr (std::is_same_v<T, ExactForm>)
        return "exact_form";
      else if constexpr (std::is_same_v<T, AngularSpeed>)
        return "angular_speed";
      else
        return "hamiltonian_field";
    },
    d);
}

Section::Section(GroupoidInstance instance, std::vector<Cutoff> cutoffs,
                 SectionDescriptor descriptor)
  : instance_(instance), cutoffs_(std::move(cutoffs)), descriptor_(std::move(descriptor))
{
  if (cutoffs_.empty())
    throw std::invalid_argument("a section needs a compactly supported cutoff");
  for (const auto& c : cutoffs_)
    for (const auto& b : c.bumps())
      if (!(b.center().chart() == instance_.chart()))
        throw ChartMismatch("section cutoff is not in the instance chart");

  const GroupoidKind kind = instance_.kind();
  const bool ok = std::visit(
    [&](const auto& v) {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, CoordinateField>)
        return (kind == GroupoidKind::pair || kind == GroupoidKind::symplectic_pair) &&
               v.axis >= 0 && v.axis < instance_.base_dim() && std::isfinite(v.magnitude);
      else if constexpr (std::is_same_v<T, ExactForm>)
        return kind == GroupoidKind::cotangent && v.potential.slope.size() == instance_.base_dim();
      else if constexpr (std::is_same_v<T, AngularSpeed>)
        return kind == GroupoidKind::rotation_action && std::isfinite(v.magnitude);
      else
        return kind == GroupoidKind::symplectic_pair &&
               v.potential.slope.size() == instance_.base_dim();
    },
    descriptor_);
  if (!ok)
    throw std::invalid_argument(descriptor_name(descriptor_) + " is not a valid section of " +
                                to_string(kind));
}

Section Section::coordinate_field(const GroupoidInstance& instance, int axis, PlateauBump bump,
                                  double magnitude)
{
  return {instance, {Cutoff(std::move(bump))}, CoordinateField{axis, magnitude}};
}

Section Section::exact_form(const GroupoidInstance& instance, PlateauBump bump,
                            AffineFunction potential)
{
  return {instance, {Cutoff(std::move(bump))}, ExactForm{std::move(potential)}};
}

Section Section::angular_speed(const GroupoidInstance& instance, PlateauBump bump,
                               double magnitude)
{
  return {instance, {Cutoff(std::move(bump))}, AngularSpeed{magnitude}};
}

Section Section::hamiltonian_field(const GroupoidInstance& instance, PlateauBump bump,
                                   AffineFunction potential)
{
  return {instance, {Cutoff(std::move(bump))}, HamiltonianField{std::move(potential)}};
}

double Section::cutoff_value(const Point& x) const
{
  double v = 1.0;
  for (const auto& c : cutoffs_) {
    v *= c.value(x);
    if (v == 0.0)
      break;
  }
  return v;
}

Vector Section::cutoff_gradient(const Point& x) const
{
  Vector g = Vector::Zero(x.dim());
  for (std::size_t k = 0; k < cutoffs_.size(); ++k) {
    double others = 1.0;
    for (std::size_t l = 0; l < cutoffs_.size(); ++l)
      if (l != k)
        others *= cutoffs_[l].value(x);
    if (others != 0.0)
      g += others * cutoffs_[k].gradient(x);
  }
  return g;
}

Vector Section::potential_gradient(const AffineFunction& l, const Point& x) const
{
  return l.value(x) * cutoff_gradient(x) + cutoff_value(x) * l.slope;
}

bool Section::vanishes_at(const Point& x) const
{
  return std::any_of(cutoffs_.begin(), cutoffs_.end(),
                     [&](const Cutoff& c) { return c.vanishes_at(x); });
}

Vector Section::value(const Point& x) const
{
  if (!(x.chart() == instance_.chart()))
    throw ChartMismatch("section evaluated outside its chart");
  const int k = instance_.fiber_dim();
  if (vanishes_at(x))
    return Vector::Zero(k);
  return std::visit(
    [&](const auto& v) -> Vector {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, CoordinateField>) {
        Vector out = Vector::Zero(k);
        out[v.axis] = v.magnitude * cutoff_value(x);
        return out;
      } else if constexpr (std::is_same_v<T, ExactForm>) {
        return potential_gradient(v.potential, x);
      } else if constexpr (std::is_same_v<T, AngularSpeed>) {
        return Vector::Constant(1, v.magnitude * cutoff_value(x));
      } else {
        return canonical_symplectic_matrix(instance_.base_dim()) *
               potential_gradient(v.potential, x);
      }
    },
    descriptor_);
}

std::vector<Ball> Section::support_balls() const
{
  const auto best = std::min_element(
    cutoffs_.begin(), cutoffs_.end(),
    [](const Cutoff& a, const Cutoff& b) { return a.footprint() < b.footprint(); });
  return best->outer_balls();
}

Section Section::scaled(double factor) const
{
  Section s = *this;
  std::visit(
    [&](auto& v) {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, CoordinateField> || std::is_same_v<T, AngularSpeed>) {
        v.magnitude *= factor;
      } else {
        v.potential.slope *= factor;
        v.potential.offset *= factor;
      }
    },
    s.descriptor_);
  return s;
}

Section Section::with_cutoff(Cutoff extra) const
{
  Section s = *this;
  for (const auto& b : extra.bumps())
    if (!(b.center().chart() == instance_.chart()))
      throw ChartMismatch("cutoff is not in the instance chart");
  s.cutoffs_.push_back(std::move(extra));
  return s;
}

bool Section::is_zero() const
{
  return std::visit(
    [](const auto& v) {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, CoordinateField> || std::is_same_v<T, AngularSpeed>)
        return v.magnitude == 0.0;
      else
        return v.potential.offset == 0.0 && v.potential.slope.isZero(0.0);
    },
    descriptor_);
}

double Section::stiffness() const
{
  // Crude Lipschitz bound of the generating vector field on its support.
  double grad = 0.0, curv = 0.0, reach = 0.0;
  for (const auto& c : cutoffs_) {
    for (const auto& b : c.bumps()) {
      const double w = b.r_out() - b.r_in();
      grad += kStepSlope / w;
      curv += kStepCurvature / (w * w);
      reach = std::max(reach, b.center().coords().norm() + b.r_out());
    }
  }
  return std::visit(
    [&](const auto& v) -> double {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, CoordinateField>) {
        return std::abs(v.magnitude) * grad;
      } else if constexpr (std::is_same_v<T, AngularSpeed>) {
        return std::abs(v.magnitude) * (1.0 + grad * reach);
      } else if constexpr (std::is_same_v<T, HamiltonianField>) {
        double lmax = 0.0;
        for (const auto& c : cutoffs_)
          for (const auto& b : c.bumps())
            lmax = std::max(lmax, distance(v.potential.anchor, b.center()) + b.r_out());
        lmax = std::abs(v.potential.offset) + v.potential.slope.norm() * lmax;
        return v.potential.slope.norm() * grad + lmax * curv;
      } else {
        return 0.0;
      }
    },
    descriptor_);
}

int Section::flow_steps(double time, const FlowSettings& settings) const
{
  const double raw = std::abs(time) * std::max(stiffness(), 1.0) * kStepsPerStiffness *
                     settings.resolution;
  return static_cast<int>(std::clamp(std::ceil(raw), 1.0, static_cast<double>(kMaxFlowSteps)));
}

Arrow Section::flow_arrow(const Point& y, double time, const FlowSettings& settings) const
{
  return flow_arrow_steps(y, time, flow_steps(time, settings));
}

Arrow Section::flow_arrow_steps(const Point& y, double time, int steps) const
{
  if (time == 0.0 || vanishes_at(y))
    return unit(instance_, y);

  const Chart chart = instance_.chart();
  switch (instance_.kind()) {
  case GroupoidKind::pair:
  case GroupoidKind::symplectic_pair: {
    if (chart.kind == ChartKind::euclidean) {
      FlatField field(cutoffs_, descriptor_, chart.dim);
      return {instance_, PairPayload{Point(chart, flat_rk4(field, y.coords(), time, steps)), y}};
    }
    const TimeField field = [&](double, const Vector& z) { return value(Point(chart, z)); };
    const Point end = rk4_flow(field, y, time, steps);
    return {instance_, PairPayload{end, y}};
  }
  case GroupoidKind::cotangent:
    return {instance_, CotangentPayload{y, time * value(y)}};
  case GroupoidKind::rotation_action: {
    const Vector base = y.coords();
    const TimeField field = [&](double, const Vector& theta) {
      return value(Point(chart, rotate(theta[0], base)));
    };
    const Vector theta =
      rk4_integrate(field, Vector::Zero(1), time, steps);
    return {instance_, RotationPayload{theta[0], y}};
  }
  }
  throw std::logic_error("unreachable");
}

} // namespace bisect
