#ifndef BISECT_SYMPLECTIC_HPP
#define BISECT_SYMPLECTIC_HPP

#include <functional>
#include <vector>

#include "bisect/transitivity.hpp"

namespace bisect {

class NotSymplectic : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Certification thresholds used by solve_symplectic and the verifier.
inline constexpr double kClosednessTolerance = 1e-6;
inline constexpr double kSymplecticTolerance = 1e-5;
inline constexpr double kPoissonTolerance = 1e-4;
// The composed chains are steep in the bump shells, where O(h^2) truncation at
// h = 1e-4 swamps the true defect; five-point stencils at 1e-5 resolve it.
inline constexpr double kDefectFdStep = 1e-5;
/// Continuation step fraction for Hamiltonian generators. Larger steps let
/// points ride the bow wave of a moving bump and shear the map by O(100).
inline constexpr double kHamiltonianStepFraction = 0.05;
inline constexpr int kDefectGrid = 32;

/// Sign convention: w = sum dq_i ^ dp_i, flat(v) = w(v, .), sharp = flat^{-1}.
///
///   cotangent(d)        w_M = -d(lambda) = dx ^ dp on payload coordinates (x, p);
///                       induced Poisson structure on the base is zero
///   symplectic_pair(2m) w on the base X; (-w) on the source factor plus w on the
///                       target factor of the groupoid; base Poisson tensor w^{-1}
class SymplecticStructure
{
public:
  explicit SymplecticStructure(const GroupoidInstance& instance);

  const GroupoidInstance& instance() const { return instance_; }
  /// Matrix W of the form on the manifold it lives on: T*R^d for cotangent,
  /// the base X for symplectic_pair.
  const Matrix& omega() const { return omega_; }
  Vector flat(const Vector& v) const;
  Vector sharp(const Vector& covector) const;
  /// Poisson tensor Lambda induced on the base.
  Matrix base_poisson() const;
  /// Form on payload coordinates of the groupoid ([target, source] for
  /// symplectic_pair, [base, covector] for cotangent).
  Matrix groupoid_form() const;

private:
  GroupoidInstance instance_;
  Matrix omega_;
};

/// Generator with potential u = chi * l: the exact form du on T*M, or the
/// Hamiltonian vector field sharp(du) on symplectic_pair.
Section hamiltonian_section(const GroupoidInstance& instance, const PlateauBump& bump,
                            const AffineFunction& u);

/// Closedness of sigma's 1-form (cotangent) or max |(f^*w - w)(e_a, e_b)|
/// with f = beta o sigma (symplectic_pair), from five-point differences.
double lagrangian_defect(const Bisection& sigma, const SampleGrid& grid,
                         const FlowSettings& settings = {}, double h = kDefectFdStep);

using ScalarFunction = std::function<double(const Vector&)>;

struct TestPair
{
  ScalarFunction u;
  ScalarFunction v;
};

/// Coordinate functions (x_a, x_b) for all a < b.
std::vector<TestPair> coordinate_pairs(int dim);

/// {u, v} = grad(u)^T Lambda grad(v), gradients by five-point central differences.
double poisson_bracket(const ScalarFunction& u, const ScalarFunction& v, const Matrix& lambda,
                       const Vector& x, double h = kDefectFdStep);

/// max over grid and pairs of |{u o f, v o f} - {u, v} o f|.
double poisson_defect(const VectorMap& f, const Matrix& lambda, const std::vector<TestPair>& pairs,
                      const SampleGrid& grid, double h = kDefectFdStep);

/// beta o sigma as a map on base coordinates.
VectorMap base_map(const Bisection& sigma, const FlowSettings& settings = {});

/// Lagrangian and Poisson defects of a solved chain on a grid^d sample of its support.
SymplecticDefects symplectic_defects(const Bisection& sigma, int grid = kDefectGrid,
                                     const FlowSettings& settings = {});
bool defects_pass(const GroupoidInstance& instance, const SymplecticDefects& d);

/// solve with Hamiltonian generators only, plus the defect report.
Certificate solve_symplectic(const TransitivityProblem& p, SolveOptions options = {},
                             int grid = kDefectGrid);

} // namespace bisect

#endif // BISECT_SYMPLECTIC_HPP
