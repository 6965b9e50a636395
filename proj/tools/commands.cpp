#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "bisect/serialization.hpp"
#include "bisect/symplectic.hpp"

namespace bisect::cli {

namespace {

constexpr double kReproductionTolerance = 1e-12;
constexpr int kDefaultSupportGrid = 32;

struct Loaded
{
  ProblemFile file;
  int grid = kDefectGrid;
};

Loaded load_problem(const CommandOptions& o)
{
  Loaded l;
  l.file = problem_from_json(read_json_file(o.input));
  if (o.seed)
    l.file.problem.seed = *o.seed;
  if (o.grid) {
    if (*o.grid < 2)
      throw SchemaError("--grid", "needs at least 2 points per axis");
    l.grid = *o.grid;
  }
  if (l.file.mode == SolveMode::symplectic && !l.file.problem.instance.symplectic())
    throw SchemaError("/mode", to_string(l.file.problem.instance.kind()) +
                                 " carries no symplectic structure");
  return l;
}

Certificate run(const Loaded& l, const CommandOptions& o)
{
  SolveOptions opts;
  if (o.samples) {
    if (*o.samples < 2)
      throw SchemaError("--samples", "needs at least 2 samples per segment");
    opts.plan.samples_per_segment = *o.samples;
  }
  if (l.file.mode == SolveMode::symplectic)
    return solve_symplectic(l.file.problem, opts, l.grid);
  return solve(l.file.problem, opts);
}

int exit_code(SolveStatus s)
{
  switch (s) {
  case SolveStatus::solved: return kSolved;
  case SolveStatus::inadmissible: return kInadmissible;
  default: return kSolverFailed;
  }
}

void emit(const CommandOptions& o, const std::string& text, std::ostream& out)
{
  if (o.output.empty())
    out << text;
  else
    write_text_file(o.output, text);
}

// Every command shares the I/O and schema error contract.
template <class F>
int guarded(std::ostream& log, F&& body)
{
  try {
    return body();
  } catch (const SchemaError& e) {
    log << "schema error at " << e.what() << "\n";
  } catch (const IoError& e) {
    log << "i/o error: " << e.what() << "\n";
  }
  return kIoOrSchema;
}

std::string fmt(double v)
{
  std::ostringstream s;
  s << std::setprecision(3) << std::scientific << v;
  return s.str();
}

std::string csv_number(double v)
{
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

struct Check
{
  std::string name;
  bool pass;
  std::string detail;
};

} // namespace

int cmd_solve(const CommandOptions& o, std::ostream& out, std::ostream& log)
{
  return guarded(log, [&] {
    const Loaded l = load_problem(o);
    const auto t0 = std::chrono::steady_clock::now();
    const Certificate cert = run(l, o);
    const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    emit(o, dump(to_json(cert, o.timing ? std::optional<double>(ms) : std::nullopt)), out);
    log << "status: " << to_string(cert.status) << ", " << cert.chain.size() << " primitives, "
        << cert.steps << " steps\n";
    for (const auto& v : cert.violations)
      log << "  " << v.message << "\n";
    if (!cert.failure.empty() && cert.status != SolveStatus::inadmissible)
      log << "  " << cert.failure << "\n";
    return exit_code(cert.status);
  });
}

int cmd_verify(const CommandOptions& o, std::ostream& out, std::ostream& log)
{
  return guarded(log, [&] {
    if (o.certificate.empty())
      throw SchemaError("--certificate", "verify needs a certificate file");
    const Loaded l = load_problem(o);
    const TransitivityProblem& p = l.file.problem;
    const Certificate cert = certificate_from_json(read_json_file(o.certificate), p.instance);
    const int grid = o.grid ? *o.grid : kDefaultSupportGrid;

    std::vector<Check> checks;
    checks.push_back({"status", cert.status == SolveStatus::solved, to_string(cert.status)});

    // fresh evaluation of the chain as read from disk
    const std::vector<double> fresh = residuals(cert.chain, p);
    bool same = fresh.size() == cert.residuals.size();
    double drift = 0.0, worst = 0.0;
    for (std::size_t i = 0; same && i < fresh.size(); ++i) {
      drift = std::max(drift, std::abs(fresh[i] - cert.residuals[i]));
      worst = std::max(worst, fresh[i]);
    }
    same = same && drift <= kReproductionTolerance;
    checks.push_back({"residuals_reproduced", same, "max drift " + fmt(drift)});
    checks.push_back({"residual_tolerance", worst <= p.tolerances.residual,
                      "max " + fmt(worst) + " <= " + fmt(p.tolerances.residual)});

    const SupportSummary support = summarize_support(cert.chain, p);
    bool inside = support.inside_neighborhoods;
    std::string detail = std::to_string(support.balls.size()) + " a-priori balls";
    if (!cert.chain.empty()) {
      const SupportReport r =
        support_report(cert.chain, SampleGrid::around(support.balls, p.instance.chart(), grid));
      inside = inside && r.empirical_inside;
      detail += ", " + std::to_string(r.empirical.size()) + "/" + std::to_string(r.grid_points) +
                " grid points moved";
    }
    checks.push_back({"support_containment", inside, detail});

    if (l.file.mode == SolveMode::symplectic) {
      const SymplecticDefects d = symplectic_defects(cert.chain, l.grid);
      checks.push_back({"symplectic_defects", defects_pass(p.instance, d),
                        "lagrangian " + fmt(d.lagrangian) + ", poisson " + fmt(d.poisson)});
    }

    bool all = true;
    Json report = Json::array();
    for (const auto& c : checks) {
      all = all && c.pass;
      log << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
      report.push_back(Json{{"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    if (!o.output.empty())
      write_text_file(o.output, dump(Json{{"pass", all}, {"checks", report}}));
    (void)out;
    return all ? kSolved : kVerifyFailed;
  });
}

std::string trace_header(int d)
{
  std::string h = "record,step,index,position";
  for (int k = 0; k < d; ++k)
    h += ",x" + std::to_string(k);
  for (int k = 0; k < d; ++k)
    h += ",u" + std::to_string(k);
  return h;
}

int cmd_trace(const CommandOptions& o, std::ostream& out, std::ostream& log)
{
  return guarded(log, [&] {
    const Loaded l = load_problem(o);
    const TransitivityProblem& p = l.file.problem;
    const Certificate cert = run(l, o);
    const int d = p.instance.base_dim();

    std::ostringstream csv;
    csv << trace_header(d) << "\n";
    auto row = [&](const char* record, int step, std::size_t index, double position,
                   const Vector& x, const Vector& u) {
      csv << record << "," << step << "," << index << "," << csv_number(position);
      for (int k = 0; k < d; ++k)
        csv << "," << csv_number(x[k]);
      for (int k = 0; k < d; ++k)
        csv << "," << csv_number(u[k]);
      csv << "\n";
    };

    // beta images of the base points after every accepted continuation step
    for (const auto& rec : cert.history)
      for (std::size_t i = 0; i < rec.betas.size(); ++i)
        row("trajectory", rec.step, i, rec.position, rec.betas[i].coords(),
            displacement(p.points[i], rec.betas[i]));

    // displacement field of the final beta o sigma over its support
    if (!cert.chain.empty()) {
      const int per_axis = o.grid ? l.grid : kDefaultSupportGrid;
      const SampleGrid g = SampleGrid::around(a_priori_support(cert.chain), p.instance.chart(), per_axis);
      const double end = cert.history.empty() ? 0.0 : cert.history.back().position;
      for (std::size_t k = 0; k < g.size(); ++k) {
        const Point x = g.at(k);
        row("field", cert.steps, k, end, x.coords(), displacement(x, target(eval(cert.chain, x))));
      }
    }
    emit(o, csv.str(), out);
    log << "status: " << to_string(cert.status) << ", " << cert.history.size()
        << " trajectory records\n";
    return exit_code(cert.status);
  });
}

} // namespace bisect::cli
