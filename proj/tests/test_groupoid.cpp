#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bisect/groupoid.hpp"
#include "test_support.hpp"

using namespace bisect;
using namespace bisect::testing;

namespace {

constexpr double pi = std::numbers::pi;

double payload_gap(const Arrow& a, const Arrow& b)
{
  return (payload_coords(a) - payload_coords(b)).norm();
}

} // namespace

TEST_CASE("fiber dimensions and symplectic flags")
{
  CHECK(GroupoidInstance::pair(3).fiber_dim() == 3);
  CHECK(GroupoidInstance::cotangent(2).fiber_dim() == 2);
  CHECK(GroupoidInstance::rotation_action().fiber_dim() == 1);
  CHECK(GroupoidInstance::symplectic_pair(4).fiber_dim() == 4);
  CHECK_FALSE(GroupoidInstance::pair(2).symplectic());
  CHECK_FALSE(GroupoidInstance::rotation_action().symplectic());
  CHECK(GroupoidInstance::cotangent(2).symplectic());
  CHECK(GroupoidInstance::symplectic_pair(2).symplectic());
  CHECK_THROWS(GroupoidInstance::symplectic_pair(3));
}

TEST_CASE("multiply examples")
{
  const auto pair = GroupoidInstance::pair(2);
  const Arrow a{pair, PairPayload{pt({2, 0}), pt({1, 0})}};
  const Arrow b{pair, PairPayload{pt({1, 0}), pt({0, 0})}};
  const Arrow ab = multiply(a, b);
  CHECK(payload_gap(ab, Arrow{pair, PairPayload{pt({2, 0}), pt({0, 0})}}) == 0.0);
  CHECK_THROWS_AS(multiply(b, b), NotComposable);

  const auto cot = GroupoidInstance::cotangent(2);
  const Point x = pt({0.3, -0.2});
  const Arrow c = multiply(Arrow{cot, CotangentPayload{x, vec({1, 0})}},
                           Arrow{cot, CotangentPayload{x, vec({0, 2})}});
  CHECK((std::get<CotangentPayload>(c.payload).covector - vec({1, 2})).norm() == 0.0);

  const auto rot = GroupoidInstance::rotation_action();
  const Arrow r2{rot, RotationPayload{pi / 4, pt({1, 0})}};
  const Arrow r1{rot, RotationPayload{pi / 2, target(r2)}};
  const Arrow r = multiply(r1, r2);
  CHECK(std::get<RotationPayload>(r.payload).angle == doctest::Approx(3 * pi / 4));
  CHECK(distance(source(r), pt({1, 0})) == 0.0);
  CHECK(distance(target(r), Point::euclidean(rotate(3 * pi / 4, vec({1, 0})))) < 1e-15);
}

TEST_CASE("invert examples")
{
  const auto pair = GroupoidInstance::pair(2);
  const Arrow inv = invert(Arrow{pair, PairPayload{pt({1, 0}), pt({0, 0})}});
  CHECK(payload_gap(inv, Arrow{pair, PairPayload{pt({0, 0}), pt({1, 0})}}) == 0.0);

  const auto cot = GroupoidInstance::cotangent(2);
  const Arrow c = invert(Arrow{cot, CotangentPayload{pt({1, 1}), vec({0.5, -2})}});
  CHECK((std::get<CotangentPayload>(c.payload).covector - vec({-0.5, 2})).norm() == 0.0);

  const auto rot = GroupoidInstance::rotation_action();
  const Arrow g{rot, RotationPayload{0.7, pt({2, 1})}};
  const Arrow gi = invert(g);
  CHECK(std::get<RotationPayload>(gi.payload).angle == -0.7);
  CHECK(distance(source(gi), Point::euclidean(rotate(0.7, vec({2, 1})))) == 0.0);
}

TEST_CASE("units are (x,x), (x,0), (0,x)")
{
  const Point x = pt({0.25, 4.0});
  CHECK(payload_gap(unit(GroupoidInstance::pair(2), x),
                    arrow_from_payload(GroupoidInstance::pair(2), vec({0.25, 4, 0.25, 4}))) == 0.0);
  CHECK(payload_gap(unit(GroupoidInstance::cotangent(2), x),
                    arrow_from_payload(GroupoidInstance::cotangent(2), vec({0.25, 4, 0, 0}))) == 0.0);
  CHECK(payload_gap(unit(GroupoidInstance::rotation_action(), x),
                    arrow_from_payload(GroupoidInstance::rotation_action(), vec({0, 0.25, 4}))) == 0.0);
  for (const auto& g : all_instances()) {
    const Point y(g.chart(), x.coords());
    CHECK(distance(source(unit(g, y)), y) == 0.0);
    CHECK(distance(target(unit(g, y)), y) == 0.0);
  }
  CHECK_THROWS_AS(unit(GroupoidInstance::pair(3), x), ChartMismatch);
}

TEST_CASE("leaf_of oracles")
{
  const auto l1 = leaf_of(GroupoidInstance::pair(2), pt({3, 4}));
  CHECK(l1.kind == LeafKind::whole_space);
  CHECK(l1.dimension(2) == 2);
  const auto l2 = leaf_of(GroupoidInstance::cotangent(2), pt({1, 1}));
  CHECK(l2.kind == LeafKind::single_point);
  CHECK(distance(l2.point, pt({1, 1})) == 0.0);
  CHECK(l2.dimension(2) == 0);
  const auto l3 = leaf_of(GroupoidInstance::rotation_action(), pt({3, 4}));
  CHECK(l3.kind == LeafKind::circle);
  CHECK(l3.radius == doctest::Approx(5.0));
  CHECK(l3.dimension(2) == 1);
  CHECK(l3.contains(pt({0, -5})));
  CHECK_FALSE(l3.contains(pt({0, -4})));
  CHECK(leaf_of(GroupoidInstance::symplectic_pair(2), pt({0, 0})).kind == LeafKind::whole_space);
}

TEST_CASE("associativity, unit and inverse laws on random arrows")
{
  Sampler s(2024);
  for (const auto& g : all_instances()) {
    CAPTURE(to_string(g.kind()));
    for (int trial = 0; trial < 1000; ++trial) {
      const Arrow c = s.arrow(g);
      const Arrow b = s.arrow_from(g, target(c));
      const Arrow a = s.arrow_from(g, target(b));
      const Arrow left = multiply(multiply(a, b), c);
      const Arrow right = multiply(a, multiply(b, c));
      REQUIRE(payload_gap(left, right) <= 1e-10);

      REQUIRE(payload_gap(multiply(unit(g, target(a)), a), a) <= 1e-14);
      REQUIRE(payload_gap(multiply(a, unit(g, source(a))), a) <= 1e-14);
      REQUIRE(arrow_distance(multiply(invert(a), a), unit(g, source(a))) <= 1e-12);
      REQUIRE(arrow_distance(multiply(a, invert(a)), unit(g, target(a))) <= 1e-12);
    }
  }
}

TEST_CASE("payload and fiber coordinate round trips")
{
  Sampler s(5);
  for (const auto& g : all_instances()) {
    for (int trial = 0; trial < 50; ++trial) {
      const Arrow a = s.arrow(g);
      REQUIRE(payload_gap(arrow_from_payload(g, payload_coords(a)), a) == 0.0);
      REQUIRE(payload_gap(arrow_from_fiber(g, source(a), fiber_coords(a)), a) == 0.0);
    }
  }
  CHECK_THROWS(arrow_from_payload(GroupoidInstance::pair(2), vec({1, 2, 3})));
}

TEST_CASE("composition tolerance is enforced and snaps the interface point")
{
  const auto pair = GroupoidInstance::pair(2);
  const Arrow b{pair, PairPayload{pt({1, 0}), pt({0, 0})}};
  const Arrow near{pair, PairPayload{pt({2, 0}), pt({1 + 5e-8, 0})}};
  const Arrow far{pair, PairPayload{pt({2, 0}), pt({1 + 1e-6, 0})}};
  const Arrow ab = multiply(near, b);
  CHECK(distance(source(ab), pt({0, 0})) == 0.0);
  CHECK_THROWS_AS(multiply(far, b), NotComposable);
  CHECK_THROWS_AS(multiply(unit(GroupoidInstance::cotangent(2), pt({0, 0})), b), NotComposable);
}

TEST_CASE("torus pair groupoid composes through the wrap")
{
  const auto g = GroupoidInstance::pair(1, ChartKind::torus);
  const Point a = Point::torus(vec({0.05}));
  const Point b = Point::torus(vec({2 * pi - 0.05}));
  const Arrow ab{g, PairPayload{a, b}};
  const Arrow bb{g, PairPayload{Point::torus(vec({-0.05})), a}};
  const Arrow c = multiply(ab, bb);
  CHECK(distance(source(c), a) == 0.0);
  CHECK(distance(target(c), a) == 0.0);
}
