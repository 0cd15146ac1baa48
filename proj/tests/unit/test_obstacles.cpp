#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "sausage/asymptotics.hpp"
#include "sausage/obstacles.hpp"
#include "sausage/parallel.hpp"

using namespace sausage;

TEST_CASE("Poisson field") {
  const MetricMeasureGraph g = lattice_box(2, 9);
  auto rng = seed_stream(1, StreamLabel::kField, 0);
  const ObstacleField empty = sample_field(g, 0.0, 0.5, rng);
  CHECK(empty.arrivals.empty());
  CHECK(empty.blocked_mass == 0.0);

  const double nu = 0.1;
  const Vertex v = 40;
  std::vector<double> hit(100'000), total(100'000);
  parallel_for(hit.size(), 2, [&](std::size_t k) {
    auto r = seed_stream(2, StreamLabel::kField, k);
    const ObstacleField f = sample_field(g, nu, 0.5, r);
    hit[k] = f.counts[v] > 0 ? 1.0 : 0.0;
    double n = 0.0;
    for (int c : f.counts) n += c;
    total[k] = n;
  });
  const Estimate occ = summarize(hit), arrivals = summarize(total);
  CHECK(std::abs(occ.value - (1.0 - std::exp(-nu * g.measure(v)))) <= 3.0 * occ.se);
  CHECK(std::abs(arrivals.value - nu * g.total_measure()) <= 3.0 * arrivals.se);
}

TEST_CASE("dilation and field round trip") {
  const MetricMeasureGraph g = path_graph(10);
  std::vector<int> counts(10, 0);
  counts[4] = 2;
  const ObstacleField f = field_from_counts(g, counts, 1.0, 1.0);
  CHECK(f.arrivals == VertexSet{4});
  CHECK(f.blocked == to_mask(10, VertexSet{3, 4, 5}));
  CHECK(f.blocked_mass == doctest::Approx(6.0));
  std::stringstream io;
  write_field(io, f);
  CHECK(read_field_counts(io, 10) == counts);
}

TEST_CASE("negative moment") {
  SUBCASE("nu = 0") {
    CHECK(negative_moment(path_graph(9), 4, 2.0, 0.0, 0.5, 100, 1).value == 1.0);
  }
  SUBCASE("pair closed form") {
    ExplicitGraph e;
    e.vertex_count = 2;
    e.edges.push_back({0, 1, 1.0, 1.0});
    e.measure = {1.0, 2.0};
    SpaceDescriptor d;
    d.kind = e;
    const MetricMeasureGraph g = build_space(d);
    const Estimate m = negative_moment(g, 0, 1.5, 0.4, 0.5, 100'000, 3, 2);
    CHECK(std::abs(m.value - oracle::two_state_moment(1.0, 1.0, 2.0, 0.4, 1.5)) <= 3.0 * m.se);
  }
  SUBCASE("path-41 against the interval DP") {
    const MetricMeasureGraph g = lattice_box(1, 41);
    const Estimate m = negative_moment(g, 20, 6.0, 0.3, 0.5, 100'000, 5, 2);
    CHECK(std::abs(m.value - exact_interval_dp(g, 20, 6.0, 0.3, 0.5)) <= 3.0 * m.se);
  }
}

TEST_CASE("annealed survival") {
  CHECK(annealed_survival(path_graph(9), 4, 2.0, 0.0, 0.5, 10, 5, 1).estimate.value == 1.0);
  const MetricMeasureGraph g = path_graph(15);
  const AnnealedSurvival a = annealed_survival(g, 7, 3.0, 0.2, 0.5, 4000, 20, 9, 2);
  CHECK(a.exact_inner);
  const double exact = exact_interval_dp(g, 7, 3.0, 0.2, 0.5);
  CHECK(std::abs(a.estimate.value - exact) <= 3.0 * a.estimate.se);
}

TEST_CASE("Cramer tail") {
  const MetricMeasureGraph g = path_graph(8, MeasureRule::kUnit);
  const VertexSet block = oracle::everything(g);
  CHECK(cramer_tail(g, block, 1.0, 0.5, 1.0).probability == 1.0);
  CHECK(cramer_tail(g, block, 1.0, 0.5, -0.1).probability == 0.0);
  for (double frac : {0.0, 0.25, 0.5, 0.8}) {
    const CramerTail t = cramer_tail(g, block, 1.0, 0.5, frac);
    CHECK(t.exact);
    CHECK(t.probability == doctest::Approx(oracle::cramer_brute_force(g, block, 1.0, frac)).epsilon(1e-12));
  }
  const CramerTail mc = cramer_tail(g, block, 1.0, 1.5, 0.5, 20'000, 4);
  CHECK_FALSE(mc.exact);
  CHECK(mc.se > 0.0);
}
