#include "bisect/symplectic.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace bisect {

SymplecticStructure::SymplecticStructure(const GroupoidInstance& instance) : instance_(instance)
{
  switch (instance.kind()) {
  case GroupoidKind::cotangent:
    omega_ = canonical_symplectic_matrix(2 * instance.base_dim());
    break;
  case GroupoidKind::symplectic_pair:
    omega_ = canonical_symplectic_matrix(instance.base_dim());
    break;
  default:
    throw NotSymplectic(to_string(instance.kind()) + " carries no symplectic structure");
  }
}

Vector SymplecticStructure::flat(const Vector& v) const
{
  return omega_.transpose() * v;
}

Vector SymplecticStructure::sharp(const Vector& covector) const
{
  return omega_.transpose().partialPivLu().solve(covector);
}

Matrix SymplecticStructure::base_poisson() const
{
  const int d = instance_.base_dim();
  if (instance_.kind() == GroupoidKind::cotangent)
    return Matrix::Zero(d, d);
  return omega_.inverse();
}

Matrix SymplecticStructure::groupoid_form() const
{
  if (instance_.kind() == GroupoidKind::cotangent)
    return omega_;
  const int d = instance_.base_dim();
  Matrix w = Matrix::Zero(2 * d, 2 * d);
  w.topLeftCorner(d, d) = omega_;
  w.bottomRightCorner(d, d) = -omega_;
  return w;
}

Section hamiltonian_section(const GroupoidInstance& instance, const PlateauBump& bump,
                            const AffineFunction& u)
{
  switch (instance.kind()) {
  case GroupoidKind::cotangent:
    return Section::exact_form(instance, bump, u);
  case GroupoidKind::symplectic_pair:
    return Section::hamiltonian_field(instance, bump, u);
  default:
    throw NotSymplectic("hamiltonian_section needs a symplectic instance");
  }
}

VectorMap base_map(const Bisection& sigma, const FlowSettings& settings)
{
  const Chart chart = sigma.instance().chart();
  return [sigma, settings, chart](const Vector& z) -> Vector {
    return target(eval(sigma, Point(chart, z), settings)).coords();
  };
}

double lagrangian_defect(const Bisection& sigma, const SampleGrid& grid,
                         const FlowSettings& settings, double h)
{
  const GroupoidInstance& g = sigma.instance();
  const SymplecticStructure structure(g);
  if (sigma.empty())
    return 0.0;
  const Chart chart = g.chart();
  double worst = 0.0;
  if (g.kind() == GroupoidKind::cotangent) {
    const VectorMap form = [&](const Vector& z) -> Vector {
      return std::get<CotangentPayload>(eval(sigma, Point(chart, z), settings).payload).covector;
    };
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Matrix j = fd_jacobian5(form, grid.at(k).coords(), h);
      worst = std::max(worst, (j - j.transpose()).cwiseAbs().maxCoeff());
    }
  } else {
    const VectorMap f = base_map(sigma, settings);
    const Matrix& w = structure.omega();
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Matrix j = fd_jacobian5(f, grid.at(k).coords(), h);
      worst = std::max(worst, (j.transpose() * w * j - w).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

std::vector<TestPair> coordinate_pairs(int dim)
{
  std::vector<TestPair> pairs;
  for (int a = 0; a < dim; ++a)
    for (int b = a + 1; b < dim; ++b)
      pairs.push_back({[a](const Vector& x) { return x[a]; }, [b](const Vector& x) { return x[b]; }});
  return pairs;
}

namespace {

// s = f(x + 2h), f(x + h), f(x - h), f(x - 2h)
double five_point(const double* s, double h)
{
  return (-s[0] + 8.0 * s[1] - 8.0 * s[2] + s[3]) / (12.0 * h);
}

Vector gradient(const ScalarFunction& u, const Vector& x, double h)
{
  Vector g(x.size());
  Vector e = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    double s[4];
    const double offsets[4] = {2 * h, h, -h, -2 * h};
    for (int m = 0; m < 4; ++m) {
      e[k] = x[k] + offsets[m];
      s[m] = u(e);
    }
    e[k] = x[k];
    g[k] = five_point(s, h);
  }
  return g;
}

} // namespace

double poisson_bracket(const ScalarFunction& u, const ScalarFunction& v, const Matrix& lambda,
                       const Vector& x, double h)
{
  return gradient(u, x, h).dot(lambda * gradient(v, x, h));
}

double poisson_defect(const VectorMap& f, const Matrix& lambda, const std::vector<TestPair>& pairs,
                      const SampleGrid& grid, double h)
{
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vector x = grid.at(k).coords();
    const Vector fx = f(x);
    // f at the stencil points, shared by all test pairs
    std::vector<std::array<Vector, 4>> stencil(x.size());
    const double offsets[4] = {2 * h, h, -h, -2 * h};
    Vector e = x;
    for (Eigen::Index c = 0; c < x.size(); ++c) {
      for (int m = 0; m < 4; ++m) {
        e[c] = x[c] + offsets[m];
        stencil[c][m] = f(e);
      }
      e[c] = x[c];
    }
    for (const auto& pr : pairs) {
      Vector gu(x.size()), gv(x.size());
      for (Eigen::Index c = 0; c < x.size(); ++c) {
        double su[4], sv[4];
        for (int m = 0; m < 4; ++m) {
          su[m] = pr.u(stencil[c][m]);
          sv[m] = pr.v(stencil[c][m]);
        }
        gu[c] = five_point(su, h);
        gv[c] = five_point(sv, h);
      }
      const double pulled = gu.dot(lambda * gv);
      worst = std::max(worst, std::abs(pulled - poisson_bracket(pr.u, pr.v, lambda, fx, h)));
    }
  }
  return worst;
}

SymplecticDefects symplectic_defects(const Bisection& sigma, int grid, const FlowSettings& settings)
{
  const GroupoidInstance& g = sigma.instance();
  const SymplecticStructure structure(g);
  SymplecticDefects d;
  d.grid = grid;
  if (sigma.empty())
    return d;
  const SampleGrid samples = SampleGrid::around(a_priori_support(sigma), g.chart(), grid);
  d.lagrangian = lagrangian_defect(sigma, samples, settings);
  d.poisson = poisson_defect(base_map(sigma, settings), structure.base_poisson(),
                             coordinate_pairs(g.base_dim()), samples);
  return d;
}

bool defects_pass(const GroupoidInstance& instance, const SymplecticDefects& d)
{
  const double lag = instance.kind() == GroupoidKind::cotangent ? kClosednessTolerance
                                                                  : kSymplecticTolerance;
  return d.lagrangian <= lag && d.poisson <= kPoissonTolerance;
}

Certificate solve_symplectic(const TransitivityProblem& p, SolveOptions options, int grid)
{
  const SymplecticStructure structure(p.instance);
  options.basis = BasisKind::hamiltonian;
  options.step_fraction = std::min(options.step_fraction, kHamiltonianStepFraction);
  Certificate cert = solve(p, options);
  if (cert.status == SolveStatus::solved)
    cert.symplectic = symplectic_defects(cert.chain, grid);
  return cert;
}

} // namespace bisect
