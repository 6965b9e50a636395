#ifndef BISECT_FLOWS_HPP
#define BISECT_FLOWS_HPP

#include <functional>
#include <optional>
#include <vector>

#include "bisect/bisection.hpp"

namespace bisect {

/// Single-primitive bisection exp(t X); t = 0 gives the unit bisection.
Bisection exp_section(const Section& x, double t);

/// Time-dependent section t -> X_t.
class SectionPath
{
public:
  using Generator = std::function<Section(double)>;

  SectionPath(GroupoidInstance instance, Generator generator);

  static SectionPath constant(const Section& x);
  /// X_t = (a + b t) X
  static SectionPath affine_in_time(const Section& x, double a, double b);
  static SectionPath zero(const GroupoidInstance& instance);

  const GroupoidInstance& instance() const { return instance_; }
  bool is_zero() const { return !generator_; }
  /// Value X_t(x) in fiber coordinates.
  Vector value(double t, const Point& x) const;
  /// nullopt encodes the zero section.
  std::optional<Section> at(double t) const;

private:
  GroupoidInstance instance_;
  Generator generator_;
};

/// Isotopy produced by the product-integral discretization of the evolution
/// operator: sigma_t = exp((t - k h) X_{t_k}) * exp(h X_{t_{k-1}}) * ... * exp(h X_{t_0}),
/// where k is the step containing t and X is sampled at the step midpoints
/// t_k = (k + 1/2) h.
class Isotopy
{
public:
  Isotopy(SectionPath path, double horizon, int steps);

  static Isotopy identity(const GroupoidInstance& instance);

  const GroupoidInstance& instance() const { return path_.instance(); }
  double horizon() const { return horizon_; }
  int steps() const { return steps_; }
  double step_size() const { return horizon_ / steps_; }
  const SectionPath& generator() const { return path_; }

  /// sigma_t; t < 0 continues with the first step's X, t > T with the last one.
  Bisection at(double t) const;
  /// Index of the step containing t (clamped to [0, steps)).
  int step_index(double t) const;
  /// The first k full steps.
  Bisection prefix(int k) const;
  /// X sampled for step k; nullopt for the zero section.
  std::optional<Section> step_section(int k) const;
  Bisection final() const { return at(horizon_); }

private:
  SectionPath path_;
  double horizon_;
  int steps_;
};

Isotopy evolve(const SectionPath& x, double horizon, int steps);

inline constexpr double kVelocityFdStep = 1e-6;

/// Right-translated velocity of the isotopy at (x, t), in fiber coordinates of A_x.
Vector logarithmic_velocity(const Isotopy& sigma, const Point& x, double t,
                            double fd_step = kVelocityFdStep);

class GeometryError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Cutoff equal to 1 on U and vanishing outside V; needs closure(U) inside V.
Cutoff localizing_cutoff(const std::vector<Ball>& u, const std::vector<Ball>& v);

Section localize(const Section& x, const std::vector<Ball>& u, const std::vector<Ball>& v);
SectionPath localize(const SectionPath& x, const std::vector<Ball>& u,
                     const std::vector<Ball>& v);

enum class BasisKind { general, hamiltonian };

inline constexpr double kIndependenceThreshold = 0.5;

/// k = fiber_dim sections supported in U whose values at x form a basis of A_x.
/// The hamiltonian kind uses exact forms / Hamiltonian fields only.
std::vector<Section> fiber_basis(const GroupoidInstance& instance, const Point& x, const Ball& u,
                                 BasisKind kind = BasisKind::general);

/// Matrix whose columns are the values of the sections at x.
Matrix section_values(const std::vector<Section>& sections, const Point& x);

} // namespace bisect

#endif // BISECT_FLOWS_HPP
