#include "bisect/serialization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace bisect {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what)
{
  throw SchemaError(path.empty() ? "/" : path, what);
}

const Json& field(const Json& j, const std::string& key, const std::string& path)
{
  if (!j.is_object())
    fail(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end())
    fail(path + "/" + key, "missing field");
  return *it;
}

bool has(const Json& j, const std::string& key)
{
  return j.is_object() && j.contains(key) && !j.at(key).is_null();
}

double number(const Json& j, const std::string& path)
{
  if (!j.is_number())
    fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v))
    fail(path, "expected a finite number");
  return v;
}

int integer(const Json& j, const std::string& path)
{
  if (!j.is_number_integer())
    fail(path, "expected an integer");
  return j.get<int>();
}

std::string text(const Json& j, const std::string& path)
{
  if (!j.is_string())
    fail(path, "expected a string");
  return j.get<std::string>();
}

const Json& array(const Json& j, const std::string& path)
{
  if (!j.is_array())
    fail(path, "expected an array");
  return j;
}

Vector vector(const Json& j, const std::string& path, int expected = -1)
{
  array(j, path);
  if (expected >= 0 && static_cast<int>(j.size()) != expected)
    fail(path, "expected " + std::to_string(expected) + " numbers, got " + std::to_string(j.size()));
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k)
    v[static_cast<Eigen::Index>(k)] = number(j[k], path + "/" + std::to_string(k));
  return v;
}

Json to_json(const Vector& v)
{
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k)
    out.push_back(v[k]);
  return out;
}

// Runs a constructor and turns its complaint into a schema error at `path`.
template <class F>
auto build(const std::string& path, F&& f) -> decltype(f())
{
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
}

Json ball_json(const Ball& b)
{
  return Json{{"center", to_json(b.center)}, {"radius", b.radius}};
}

Ball ball_from_json(const Json& j, const Chart& chart, const std::string& path)
{
  const Point c = point_from_json(field(j, "center", path), chart, path + "/center");
  const double r = number(field(j, "radius", path), path + "/radius");
  if (!(r > 0.0))
    fail(path + "/radius", "radius must be positive");
  return {c, r};
}

Json affine_json(const AffineFunction& l)
{
  return Json{{"anchor", to_json(l.anchor)}, {"slope", to_json(l.slope)}, {"offset", l.offset}};
}

AffineFunction affine_from_json(const Json& j, const Chart& chart, const std::string& path)
{
  AffineFunction l;
  l.anchor = point_from_json(field(j, "anchor", path), chart, path + "/anchor");
  l.slope = vector(field(j, "slope", path), path + "/slope", chart.dim);
  l.offset = has(j, "offset") ? number(j.at("offset"), path + "/offset") : 0.0;
  return l;
}

Json violation_json(const Violation& v)
{
  return Json{{"kind", to_string(v.kind)}, {"indices", v.indices}, {"message", v.message}};
}

} // namespace

Json to_json(const GroupoidInstance& g)
{
  return Json{{"kind", to_string(g.kind())},
              {"dim", g.base_dim()},
              {"chart", to_string(g.chart().kind)}};
}

GroupoidInstance instance_from_json(const Json& j, const std::string& path)
{
  const std::string name = text(field(j, "kind", path), path + "/kind");
  const GroupoidKind kind = build(path + "/kind", [&] { return groupoid_kind_from_string(name); });
  const int dim = has(j, "dim") ? integer(j.at("dim"), path + "/dim") : 2;
  const ChartKind chart =
    has(j, "chart") ? build(path + "/chart", [&] { return chart_kind_from_string(text(j.at("chart"), path + "/chart")); })
                    : ChartKind::euclidean;
  if (dim < 1)
    fail(path + "/dim", "dimension must be positive");
  if (chart == ChartKind::torus && kind != GroupoidKind::pair)
    fail(path + "/chart", "only the pair groupoid supports the torus chart");
  switch (kind) {
  case GroupoidKind::pair: return GroupoidInstance::pair(dim, chart);
  case GroupoidKind::cotangent: return GroupoidInstance::cotangent(dim);
  case GroupoidKind::rotation_action:
    if (dim != 2)
      fail(path + "/dim", "rotation_action lives on R^2");
    return GroupoidInstance::rotation_action();
  case GroupoidKind::symplectic_pair:
    return build(path + "/dim", [&] { return GroupoidInstance::symplectic_pair(dim); });
  }
  fail(path, "unreachable");
}

Json to_json(const Point& x)
{
  return to_json(x.coords());
}

Point point_from_json(const Json& j, const Chart& chart, const std::string& path)
{
  const Vector v = vector(j, path, chart.dim);
  return build(path, [&] { return Point(chart, v); });
}

Json to_json(const Arrow& g)
{
  return Json{{"kind", to_string(g.instance.kind())}, {"payload", to_json(payload_coords(g))}};
}

Arrow arrow_from_json(const Json& j, const GroupoidInstance& g, const std::string& path)
{
  const std::string kind = text(field(j, "kind", path), path + "/kind");
  if (kind != to_string(g.kind()))
    fail(path + "/kind", "arrow of kind '" + kind + "' in a " + to_string(g.kind()) + " problem");
  const Vector coords = vector(field(j, "payload", path), path + "/payload", g.payload_dim());
  return build(path + "/payload", [&] { return arrow_from_payload(g, coords); });
}

Json to_json(const Section& s)
{
  Json out{{"kind", descriptor_name(s.descriptor())}};
  Json cutoffs = Json::array();
  for (const auto& c : s.cutoffs()) {
    Json bumps = Json::array();
    for (const auto& b : c.bumps())
      bumps.push_back(Json{{"center", to_json(b.center())}, {"r_in", b.r_in()}, {"r_out", b.r_out()}});
    cutoffs.push_back(bumps);
  }
  out["cutoffs"] = cutoffs;
  std::visit(
    [&](const auto& v) {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, CoordinateField>) {
        out["axis"] = v.axis;
        out["magnitude"] = v.magnitude;
      } else if constexpr (std::is_same_v<T, AngularSpeed>) {
        out["magnitude"] = v.magnitude;
      } else {
        out["potential"] = affine_json(v.potential);
      }
    },
    s.descriptor());
  return out;
}

Section section_from_json(const Json& j, const GroupoidInstance& g, const std::string& path)
{
  const Chart chart = g.chart();
  const std::string kind = text(field(j, "kind", path), path + "/kind");
  const std::string cpath = path + "/cutoffs";
  std::vector<Cutoff> cutoffs;
  const Json& cj = array(field(j, "cutoffs", path), cpath);
  for (std::size_t k = 0; k < cj.size(); ++k) {
    const std::string kpath = cpath + "/" + std::to_string(k);
    std::vector<PlateauBump> bumps;
    for (std::size_t m = 0; m < array(cj[k], kpath).size(); ++m) {
      const std::string bpath = kpath + "/" + std::to_string(m);
      const Json& b = cj[k][m];
      const Point c = point_from_json(field(b, "center", bpath), chart, bpath + "/center");
      const double r_in = number(field(b, "r_in", bpath), bpath + "/r_in");
      const double r_out = number(field(b, "r_out", bpath), bpath + "/r_out");
      bumps.push_back(build(bpath, [&] { return PlateauBump(c, r_in, r_out); }));
    }
    cutoffs.push_back(build(kpath, [&] { return Cutoff(std::move(bumps)); }));
  }

  SectionDescriptor d;
  if (kind == "coordinate_field")
    d = CoordinateField{integer(field(j, "axis", path), path + "/axis"),
                        number(field(j, "magnitude", path), path + "/magnitude")};
  else if (kind == "angular_speed")
    d = AngularSpeed{number(field(j, "magnitude", path), path + "/magnitude")};
  else if (kind == "exact_form")
    d = ExactForm{affine_from_json(field(j, "potential", path), chart, path + "/potential")};
  else if (kind == "hamiltonian_field")
    d = HamiltonianField{affine_from_json(field(j, "potential", path), chart, path + "/potential")};
  else
    fail(path + "/kind", "unknown section kind '" + kind + "'");
  return build(path, [&] { return Section(g, std::move(cutoffs), std::move(d)); });
}

Json to_json(const Bisection& sigma)
{
  Json out = Json::array();
  for (const auto& p : sigma.chain())
    out.push_back(Json{{"section", to_json(p.section)}, {"time", p.time}});
  return out;
}

Bisection chain_from_json(const Json& j, const GroupoidInstance& g, const std::string& path)
{
  Bisection sigma(g);
  for (std::size_t k = 0; k < array(j, path).size(); ++k) {
    const std::string ppath = path + "/" + std::to_string(k);
    const Section s = section_from_json(field(j[k], "section", ppath), g, ppath + "/section");
    sigma.append({s, number(field(j[k], "time", ppath), ppath + "/time")});
  }
  return sigma;
}

Json to_json(const Region& r)
{
  Json out{{"kind", to_string(r.kind)}};
  if (r.kind == Region::Kind::balls) {
    Json balls = Json::array();
    for (const auto& b : r.balls)
      balls.push_back(ball_json(b));
    out["balls"] = balls;
  } else if (r.kind == Region::Kind::annulus) {
    out["center"] = to_json(r.center);
    out["r_in"] = r.r_in;
    out["r_out"] = r.r_out;
  }
  return out;
}

Region region_from_json(const Json& j, const Chart& chart, const std::string& path)
{
  const std::string kind = text(field(j, "kind", path), path + "/kind");
  if (kind == "whole_space")
    return Region::whole_space();
  if (kind == "balls") {
    std::vector<Ball> balls;
    const Json& bj = array(field(j, "balls", path), path + "/balls");
    for (std::size_t k = 0; k < bj.size(); ++k)
      balls.push_back(ball_from_json(bj[k], chart, path + "/balls/" + std::to_string(k)));
    return build(path + "/balls", [&] { return Region::union_of(balls); });
  }
  if (kind == "annulus") {
    const Point c = point_from_json(field(j, "center", path), chart, path + "/center");
    const double r_in = number(field(j, "r_in", path), path + "/r_in");
    const double r_out = number(field(j, "r_out", path), path + "/r_out");
    return build(path, [&] { return Region::annulus(c, r_in, r_out); });
  }
  fail(path + "/kind", "unknown region kind '" + kind + "'");
}

std::string to_string(SolveMode m)
{
  return m == SolveMode::symplectic ? "symplectic" : "general";
}

Json to_json(const ProblemFile& file)
{
  const TransitivityProblem& p = file.problem;
  Json points = Json::array(), targets = Json::array(), hoods = Json::array();
  for (const auto& x : p.points)
    points.push_back(to_json(x));
  for (const auto& g : p.targets)
    targets.push_back(to_json(g));
  for (const auto& r : p.neighborhoods)
    hoods.push_back(to_json(r));
  Json tol{{"residual", p.tolerances.residual}};
  if (p.tolerances.clearance)
    tol["clearance"] = *p.tolerances.clearance;
  return Json{{"instance", to_json(p.instance)}, {"points", points},   {"targets", targets},
              {"neighborhoods", hoods},          {"tolerances", tol},  {"seed", p.seed},
              {"mode", to_string(file.mode)}};
}

ProblemFile problem_from_json(const Json& j)
{
  if (!j.is_object())
    fail("/", "expected a problem object");
  ProblemFile file;
  TransitivityProblem& p = file.problem;
  p.instance = instance_from_json(field(j, "instance", ""));
  const Chart chart = p.instance.chart();

  const Json& pts = array(field(j, "points", ""), "/points");
  for (std::size_t k = 0; k < pts.size(); ++k)
    p.points.push_back(point_from_json(pts[k], chart, "/points/" + std::to_string(k)));
  const Json& tgs = array(field(j, "targets", ""), "/targets");
  for (std::size_t k = 0; k < tgs.size(); ++k)
    p.targets.push_back(arrow_from_json(tgs[k], p.instance, "/targets/" + std::to_string(k)));
  if (has(j, "neighborhoods")) {
    const Json& nb = array(j.at("neighborhoods"), "/neighborhoods");
    for (std::size_t k = 0; k < nb.size(); ++k)
      p.neighborhoods.push_back(region_from_json(nb[k], chart, "/neighborhoods/" + std::to_string(k)));
  }
  if (has(j, "tolerances")) {
    const Json& t = j.at("tolerances");
    if (!t.is_object())
      fail("/tolerances", "expected an object");
    if (has(t, "residual"))
      p.tolerances.residual = number(t.at("residual"), "/tolerances/residual");
    if (has(t, "clearance"))
      p.tolerances.clearance = number(t.at("clearance"), "/tolerances/clearance");
  }

  const Json& seed = field(j, "seed", "");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0))
    fail("/seed", "expected a non-negative integer");
  p.seed = seed.get<std::uint64_t>();

  if (has(j, "mode")) {
    const std::string mode = text(j.at("mode"), "/mode");
    if (mode == "symplectic")
      file.mode = SolveMode::symplectic;
    else if (mode != "general")
      fail("/mode", "expected \"general\" or \"symplectic\"");
  }
  try {
    validate(p);
  } catch (const InvalidProblem& e) {
    fail("/", e.what());
  }
  return file;
}

Json to_json(const Certificate& c, std::optional<double> runtime_ms)
{
  Json out{{"status", to_string(c.status)}, {"instance", to_json(c.chain.instance())}};
  out["chain"] = to_json(c.chain);
  out["residuals"] = c.residuals;

  Json balls = Json::array();
  for (const auto& b : c.support.balls)
    balls.push_back(ball_json(b));
  out["support"] = Json{{"balls", balls},
                        {"owners", c.support.owners},
                        {"inside_neighborhoods", c.support.inside_neighborhoods}};
  if (c.symplectic)
    out["symplectic"] = Json{{"lagrangian", c.symplectic->lagrangian},
                             {"poisson", c.symplectic->poisson},
                             {"grid", c.symplectic->grid}};
  out["steps"] = c.steps;
  out["seed"] = c.seed;
  out["runtime_ms"] = runtime_ms ? Json(*runtime_ms) : Json(nullptr);

  Json violations = Json::array();
  for (const auto& v : c.violations)
    violations.push_back(violation_json(v));
  out["violations"] = violations;
  if (!c.failure.empty()) {
    out["failure"] = c.failure;
    out["failed_at"] = c.failed_at;
  }
  return out;
}

Certificate certificate_from_json(const Json& j, const GroupoidInstance& g)
{
  if (!j.is_object())
    fail("/", "expected a certificate object");
  Certificate c;
  c.status = build("/status", [&] { return solve_status_from_string(text(field(j, "status", ""), "/status")); });
  if (has(j, "instance") && !(instance_from_json(j.at("instance")) == g))
    fail("/instance", "certificate was produced for a different instance");
  c.chain = chain_from_json(field(j, "chain", ""), g);

  const Json& res = array(field(j, "residuals", ""), "/residuals");
  for (std::size_t k = 0; k < res.size(); ++k)
    c.residuals.push_back(number(res[k], "/residuals/" + std::to_string(k)));

  const Json& sup = field(j, "support", "");
  const Json& balls = array(field(sup, "balls", "/support"), "/support/balls");
  for (std::size_t k = 0; k < balls.size(); ++k)
    c.support.balls.push_back(ball_from_json(balls[k], g.chart(), "/support/balls/" + std::to_string(k)));
  const Json& owners = array(field(sup, "owners", "/support"), "/support/owners");
  for (std::size_t k = 0; k < owners.size(); ++k)
    c.support.owners.push_back(integer(owners[k], "/support/owners/" + std::to_string(k)));
  const Json& inside = field(sup, "inside_neighborhoods", "/support");
  if (!inside.is_boolean())
    fail("/support/inside_neighborhoods", "expected a boolean");
  c.support.inside_neighborhoods = inside.get<bool>();

  if (has(j, "symplectic")) {
    const Json& s = j.at("symplectic");
    c.symplectic = SymplecticDefects{number(field(s, "lagrangian", "/symplectic"), "/symplectic/lagrangian"),
                                     number(field(s, "poisson", "/symplectic"), "/symplectic/poisson"),
                                     integer(field(s, "grid", "/symplectic"), "/symplectic/grid")};
  }
  c.steps = integer(field(j, "steps", ""), "/steps");
  const Json& seed = field(j, "seed", "");
  if (!seed.is_number_integer())
    fail("/seed", "expected an integer");
  c.seed = seed.get<std::uint64_t>();

  if (has(j, "violations")) {
    const Json& vs = array(j.at("violations"), "/violations");
    for (std::size_t k = 0; k < vs.size(); ++k) {
      const std::string vp = "/violations/" + std::to_string(k);
      Violation v;
      v.kind = build(vp + "/kind", [&] { return violation_kind_from_string(text(field(vs[k], "kind", vp), vp + "/kind")); });
      const Json& idx = array(field(vs[k], "indices", vp), vp + "/indices");
      for (std::size_t m = 0; m < idx.size(); ++m)
        v.indices.push_back(integer(idx[m], vp + "/indices/" + std::to_string(m)));
      if (has(vs[k], "message"))
        v.message = text(vs[k].at("message"), vp + "/message");
      c.violations.push_back(v);
    }
  }
  if (has(j, "failure"))
    c.failure = text(j.at("failure"), "/failure");
  if (has(j, "failed_at"))
    c.failed_at = number(j.at("failed_at"), "/failed_at");
  return c;
}

Json read_json_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // translate the byte offset into a line and column
    const std::size_t at = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < at; ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SchemaError(path + ":" + std::to_string(line) + ":" + std::to_string(col),
                      "malformed JSON");
  }
}

void write_text_file(const std::string& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot write " + path);
  out << text;
  if (!out)
    throw IoError("write failed for " + path);
}

std::string dump(const Json& j)
{
  return j.dump(2) + "\n";
}

} // namespace bisect
