#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "sausage/error.hpp"
#include "sausage/rng.hpp"
#include "sausage/spectral.hpp"

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

MetricMeasureGraph random_graph(std::size_t n, std::uint64_t seed) {
  RandomConnected p;
  p.vertex_count = n;
  p.extra_edges = n;
  p.seed = seed;
  return random_connected(p);
}

}  // namespace

TEST_CASE("killed eigenvalue") {
  SUBCASE("single vertex") {
    const MetricMeasureGraph g = random_graph(12, 3);
    for (Vertex v : {0, 5, 11}) {
      CHECK(dirichlet_eigenvalue(g, VertexSet{v}).value == doctest::Approx(g.holding_rate(v)));
    }
  }
  SUBCASE("two adjacent interior vertices of a unit path") {
    const MetricMeasureGraph g = path_graph(6, MeasureRule::kUnit);
    CHECK(dirichlet_eigenvalue(g, VertexSet{2, 3}).value == doctest::Approx(1.0));
  }
  SUBCASE("whole space") {
    CHECK(dirichlet_eigenvalue(path_graph(6), oracle::everything(path_graph(6))).value == 0.0);
  }
  SUBCASE("matches the generalized eigenproblem and is monotone") {
    for (std::uint64_t k = 0; k < 100; ++k) {
      const MetricMeasureGraph g = random_graph(25, 100 + k);
      auto rng = seed_stream(7, StreamLabel::kSubset, k);
      const VertexSet outer = oracle::grow_connected(g, 0, 15, rng);
      const VertexSet inner = oracle::grow_connected(g, 0, 6, rng);
      VertexSet nested = set_intersection(inner, outer);
      if (nested.empty()) nested = {0};
      const double lo = dirichlet_eigenvalue(g, outer).value;
      const double hi = dirichlet_eigenvalue(g, nested).value;
      CHECK(lo == doctest::Approx(oracle::killed_lambda(g, outer)).epsilon(1e-9));
      CHECK(hi >= lo - 1e-12);
    }
  }
  SUBCASE("sparse solver on a 50x50 square") {
    const MetricMeasureGraph g = lattice_box(2, 52, false, MeasureRule::kUnit);
    VertexSet inside;
    for (int i = 1; i <= 50; ++i) {
      for (int j = 1; j <= 50; ++j) {
        const std::vector<int> c{i, j};
        inside.push_back(lattice_index(c, 52));
      }
    }
    std::sort(inside.begin(), inside.end());
    const EigenResult r = dirichlet_eigenvalue(g, inside);
    CHECK_FALSE(r.dense);
    const double exact = 2.0 * (2.0 - 2.0 * std::cos(std::numbers::pi / 51.0));
    CHECK(r.value == doctest::Approx(exact).epsilon(1e-8));
  }
}

TEST_CASE("Neumann gap and Poincare constant") {
  const MetricMeasureGraph g = pair_graph(1.5, 1.0, 1.0);
  CHECK(neumann_gap(g, VertexSet{0, 1}).value == doctest::Approx(3.0));
  const PoincareResult p = poincare_constant(g, 0, 1.0, 2.0);
  CHECK(p.c_pi == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(neumann_gap(path_graph(5), VertexSet{0, 2}), DisconnectedError);

  const MetricMeasureGraph big = random_graph(60, 9);
  const PoincareResult q = poincare_constant(big, 0, 2.0, 2.0);
  const auto n = static_cast<Eigen::Index>(q.witness.domain.size());
  REQUIRE(n >= 10);
  const PoincareCheck flat = poincare_check(big, q, Eigen::VectorXd::Constant(n, 3.0));
  CHECK(flat.lhs == doctest::Approx(0.0));
  CHECK(flat.holds);
  auto rng = seed_stream(3, StreamLabel::kTestFunction, 0);
  for (int k = 0; k < 500; ++k) {
    Eigen::VectorXd f(n);
    for (Eigen::Index i = 0; i < n; ++i) f(i) = rng.uniform() - 0.5;
    CHECK(poincare_check(big, q, f).holds);
  }
}

TEST_CASE("heat kernel") {
  SUBCASE("t = 0 is the identity") {
    const MetricMeasureGraph g = random_graph(15, 2);
    const HeatKernel h(g);
    CHECK(h(0.0, 3, 3) == doctest::Approx(1.0 / g.measure(3)));
    CHECK(h(0.0, 3, 4) == 0.0);
    CHECK_THROWS_AS(h(-1.0, 3, 3), InvalidArgument);
  }
  SUBCASE("two-vertex closed form") {
    const double w = 0.7, a = 1.3, b = 2.1;
    const MetricMeasureGraph g = pair_graph(w, a, b);
    for (double t : {0.1, 1.0, 5.0}) {
      CHECK(heat_kernel(g, t, 0, 0) == doctest::Approx(oracle::two_state_kernel(w, a, b, t, true)));
      CHECK(heat_kernel(g, t, 0, 1) == doctest::Approx(oracle::two_state_kernel(w, a, b, t, false)));
    }
  }
  SUBCASE("semigroup on a random 50-vertex graph") {
    const MetricMeasureGraph g = random_graph(50, 77);
    const HeatKernel h(g);
    const Eigen::MatrixXd h1 = oracle::kernel(g, oracle::everything(g), 1.0);
    for (Vertex x : {0, 17, 49}) {
      const Eigen::VectorXd a = h.row(0.3, x);
      for (Vertex y : {0, 9, 33}) {
        double composed = 0.0;
        const Eigen::VectorXd b = h.row(0.7, y);
        for (std::size_t z = 0; z < g.size(); ++z) {
          composed += a(static_cast<Eigen::Index>(z)) * b(static_cast<Eigen::Index>(z)) *
                      g.measure(static_cast<Vertex>(z));
        }
        CHECK(std::abs(composed - h1(x, y)) <= 1e-10);
      }
    }
  }
  SUBCASE("Krylov agrees with the dense path") {
    const MetricMeasureGraph g = random_graph(150, 5);
    const HeatKernel dense(g, KernelMode::kDense);
    const HeatKernel krylov(g, KernelMode::kKrylov);
    CHECK_FALSE(krylov.dense());
    const Eigen::VectorXd a = dense.row(2.5, 7), b = krylov.row(2.5, 7);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("killed kernel") {
    const MetricMeasureGraph g = random_graph(30, 12);
    const VertexSet all = oracle::everything(g);
    CHECK(killed_kernel(g, all, 1.0, 2, 5) == doctest::Approx(heat_kernel(g, 1.0, 2, 5)));
    auto rng = seed_stream(2, StreamLabel::kSubset, 0);
    const VertexSet U = oracle::grow_connected(g, 2, 12, rng);
    const Eigen::MatrixXd ref = oracle::kernel(g, U, 0.8);
    for (std::size_t i = 0; i < U.size(); ++i) {
      for (std::size_t j = 0; j < U.size(); ++j) {
        const double v = killed_kernel(g, U, 0.8, U[i], U[j]);
        CHECK(std::abs(v - ref(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) <= 1e-10);
        CHECK(v <= heat_kernel(g, 0.8, U[i], U[j]) + 1e-12);
      }
    }
    const VertexSet outside = set_difference(all, U);
    REQUIRE_FALSE(outside.empty());
    CHECK_THROWS_AS(killed_kernel(g, U, 0.8, U[0], outside[0]), InvalidArgument);
  }
}

TEST_CASE("escape probability") {
  const MetricMeasureGraph g = path_graph(21);
  VertexSet U;
  for (Vertex v = 5; v <= 15; ++v) U.push_back(v);
  for (double t : {0.5, 2.0, 10.0}) {
    CHECK(escape_probability(g, U, t, 10) ==
          doctest::Approx(1.0 - killed_mass(g, U, t, 10)).epsilon(1e-9));
  }
  CHECK(escape_probability(g, U, 1.0, 0) == 1.0);
  CHECK(escape_probability(g, oracle::everything(g), 1.0, 3) == 0.0);
  // Tiny tails keep relative accuracy: reaching 10 steps away by t = 0.05.
  const MetricMeasureGraph p = path_graph(41);
  VertexSet mid;
  for (Vertex v = 11; v <= 29; ++v) mid.push_back(v);
  const double tiny = escape_probability(p, mid, 0.05, 20);
  CHECK(tiny > 0.0);
  CHECK(tiny < 1e-15);
}

TEST_CASE("Dynkin-Hunt with nothing killed") {
  const MetricMeasureGraph g = path_graph(9);
  const DynkinHuntResult r = dynkin_hunt_residual(g, oracle::everything(g), 1.0, 4, 5, 1000, 1);
  CHECK(r.exits == 0);
  CHECK(r.expectation == 0.0);
  CHECK(r.residual <= 1e-12);
}

TEST_CASE("Thirring inequality") {
  const MetricMeasureGraph g = random_graph(30, 21);
  auto rng = seed_stream(11, StreamLabel::kSubset, 0);
  const VertexSet U = oracle::grow_connected(g, 0, 14, rng);
  const ThirringResult none = thirring_bound(g, U, {});
  CHECK(none.rhs == 0.0);
  CHECK(none.holds);
  const ThirringResult all = thirring_bound(g, U, U);
  CHECK(std::isinf(all.lambda_a));
  CHECK(all.holds);
  for (int k = 0; k < 50; ++k) {
    VertexSet A;
    for (Vertex v : U) {
      if (rng.uniform() < 0.3) A.push_back(v);
    }
    const ThirringResult r = thirring_bound(g, U, A);
    CHECK(r.holds);
    CHECK(r.lambda_u == doctest::Approx(oracle::neumann_second(g, U)).epsilon(1e-9));
    if (A.size() < U.size()) {
      CHECK(r.lambda_a == doctest::Approx(oracle::thirring_lambda_a(g, U, A)).epsilon(1e-9));
    }
  }
}

TEST_CASE("net eigenvalue bound edge cases") {
  const MetricMeasureGraph g = lattice_box(2, 11);
  const NetCover net = build_net(g, 2.0);
  const NetSpectra spectra = prepare_net_spectra(g, net, 2.0);
  const VertexSet all = oracle::everything(g);
  std::vector<char> none(g.size(), 0), every(g.size(), 1);
  const NetEigenvalueBound empty = net_eigenvalue_lower_bound(g, all, net, spectra, none);
  CHECK(empty.bound == 0.0);
  CHECK(empty.holds);
  const NetEigenvalueBound full = net_eigenvalue_lower_bound(g, {}, net, spectra, every);
  CHECK(std::isinf(full.lambda));
  CHECK(full.holds);
}

TEST_CASE("GE fit guards") {
  const MetricMeasureGraph pair = pair_graph(1.0, 1.0, 1.0);
  const std::vector<Vertex> centers{0};
  const std::vector<double> long_times{10, 100, 1000};
  CHECK(fit_ge_beta(pair, centers, long_times).rejected);
  const std::vector<double> short_grid{1, 2};
  CHECK_THROWS_AS(fit_ge_beta(lattice_box(2, 21), centers, short_grid), InvalidArgument);
}
