#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "sausage/parallel.hpp"
#include "sausage/spectral.hpp"
#include "sausage/walker.hpp"

using namespace sausage;

namespace {

MetricMeasureGraph pair_graph(double w, double mu_a, double mu_b) {
  ExplicitGraph g;
  g.vertex_count = 2;
  g.edges.push_back({0, 1, w, 1.0});
  g.measure = {mu_a, mu_b};
  SpaceDescriptor d;
  d.kind = g;
  return build_space(d);
}

}  // namespace

TEST_CASE("zero horizon") {
  const MetricMeasureGraph g = path_graph(5);
  auto rng = seed_stream(1, StreamLabel::kPath, 0);
  const PathSample p = simulate_path(g, 2, 0.0, rng);
  REQUIRE(p.events.size() == 1);
  CHECK(p.events[0].vertex == 2);
  CHECK(p.events[0].time == 0.0);
  CHECK(p.position(0.0) == 2);
}

TEST_CASE("first jump of a pair is exponential with mean mu_a / w") {
  const double w = 2.0, mu_a = 3.0;
  const MetricMeasureGraph g = pair_graph(w, mu_a, 1.0);
  const WalkSampler sampler(g);
  std::vector<double> first(100'000);
  parallel_for(first.size(), 2, [&](std::size_t k) {
    auto rng = seed_stream(12, StreamLabel::kPath, k);
    first[k] = sampler.holding_time(0, rng);
  });
  const Estimate e = summarize(first);
  CHECK(std::abs(e.value - mu_a / w) <= 3.0 * e.se);
}

TEST_CASE("path records") {
  const MetricMeasureGraph g = lattice_box(2, 7);
  auto rng = seed_stream(3, StreamLabel::kPath, 5);
  const PathSample p = simulate_path(g, 24, 6.0, rng);
  REQUIRE(p.events.size() > 1);
  for (std::size_t k = 1; k < p.events.size(); ++k) {
    CHECK(p.events[k].time > p.events[k - 1].time);
    CHECK(g.distance(p.events[k].vertex, p.events[k - 1].vertex) == 1.0);
    CHECK(p.holding_time(k - 1) > 0.0);
  }
  CHECK(p.events.back().time <= 6.0);
  std::stringstream out;
  write_path(out, p);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(out, line)) ++lines;
  CHECK(lines == p.events.size());
}

TEST_CASE("sausage volume") {
  const MetricMeasureGraph g = path_graph(11);
  auto rng = seed_stream(4, StreamLabel::kPath, 0);
  const PathSample still = simulate_path(g, 5, 0.0, rng);
  CHECK(sausage_volume(g, still, 1.0, 0.0) == g.volume(5, 1.0));
  CHECK(sausage_volume(g, still, g.diameter(), 0.0) == g.total_measure());

  auto rng2 = seed_stream(4, StreamLabel::kPath, 1);
  const PathSample p = simulate_path(g, 5, 3.0, rng2);
  std::vector<char> seen(g.size(), 0);
  for (const PathEvent& e : p.events) seen[e.vertex] = 1;
  double mass = 0.0;
  for (std::size_t v = 0; v < g.size(); ++v) mass += seen[v] ? g.measure(static_cast<Vertex>(v)) : 0.0;
  CHECK(sausage_volume(g, p, 0.5, 3.0) == doctest::Approx(mass));

  SausageTracker tracker(g, 1.0);
  for (const PathEvent& e : p.events) tracker.visit(e.vertex);
  CHECK(tracker.volume() == doctest::Approx(sausage_volume(g, p, 1.0, 3.0)));
  const auto trajectory = sausage_trajectory(g, p, 1.0);
  REQUIRE_FALSE(trajectory.empty());
  CHECK(trajectory.back().second == doctest::Approx(tracker.volume()));
}

TEST_CASE("stopping times") {
  const MetricMeasureGraph g = path_graph(21);
  auto rng = seed_stream(8, StreamLabel::kPath, 0);
  const PathSample p = simulate_path(g, 10, 5.0, rng);
  const std::vector<char> everything(g.size(), 1);
  const StoppingTime never = exit_time(p, everything);
  CHECK(never.censored);
  CHECK(never.exceeds(5.0));
  CHECK(hitting_time(p, to_mask(g.size(), VertexSet{10})).time == 0.0);
}

TEST_CASE("exit times against the killed semigroup") {
  const MetricMeasureGraph g = path_graph(21);
  const VertexSet ball{8, 9, 10, 11, 12};
  const std::vector<char> inside = to_mask(g.size(), ball);
  const WalkSampler sampler(g);
  const double s = 3.0;
  std::vector<double> alive(100'000);
  parallel_for(alive.size(), 2, [&](std::size_t k) {
    auto rng = seed_stream(21, StreamLabel::kPath, k);
    const PathSample p = simulate_path(sampler, 10, s, rng);
    alive[k] = exit_time(p, inside).exceeds(s) ? 1.0 : 0.0;
  });
  const Estimate e = summarize(alive);
  CHECK(std::abs(e.value - killed_mass(g, ball, s, 10)) <= 3.0 * e.se);
}

TEST_CASE("exit tail edge cases") {
  const MetricMeasureGraph g = path_graph(31);
  const TailBound bound{2.0, 0.5, 1.0, 1.0};
  const ExitTailResult zero = exit_tail_check(g, 15, 0.0, 1.0, 200, bound, 1);
  CHECK(zero.empirical.value == 1.0);
  CHECK_FALSE(zero.in_regime);
  CHECK(zero.pass);
  const ExitTailResult far = exit_tail_check(g, 15, 100.0, 1.0, 200, bound, 1);
  CHECK(far.empirical.value == 0.0);
  CHECK(far.exact == 0.0);
  CHECK(far.pass);
}
