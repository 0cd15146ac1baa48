#include <map>
#include <tuple>

#include "doctest.h"
#include "oracles.hpp"
#include "sausage/asymptotics.hpp"
#include "sausage/error.hpp"

using namespace sausage;

namespace {

/// E[exp(-nu mu(C_s^eps))] on a path from the chain on (a, b, position)
/// states: the visited interval is part of the state, so exp(sQ) gives its
/// law directly.
double range_chain_moment(const MetricMeasureGraph& g, Vertex x, double s, double nu, double eps) {
  const int n = static_cast<int>(g.size());
  std::map<std::tuple<int, int, int>, Eigen::Index> index;
  std::vector<std::tuple<int, int, int>> states;
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      for (int p = a; p <= b; ++p) {
        index[{a, b, p}] = static_cast<Eigen::Index>(states.size());
        states.emplace_back(a, b, p);
      }
    }
  }
  const auto m = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto [a, b, p] = states[static_cast<std::size_t>(i)];
    for (const Arc& arc : g.neighbors(p)) {
      const double rate = arc.conductance / g.measure(p);
      const int q = arc.to;
      Q(i, index[{std::min(a, q), std::max(b, q), q}]) += rate;
      Q(i, i) -= rate;
    }
  }
  const Eigen::MatrixXd P = (s * Q).exp();
  const Eigen::Index start = index[{x, x, x}];
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto [a, b, p] = states[static_cast<std::size_t>(i)];
    double mass = 0.0;
    for (int v = 0; v < n; ++v) {
      if (v >= a - eps - 1e-12 && v <= b + eps + 1e-12) mass += g.measure(v);
    }
    acc += P(start, i) * std::exp(-nu * mass);
  }
  return acc;
}

}  // namespace

TEST_CASE("interval DP") {
  SUBCASE("matches the range chain") {
    const MetricMeasureGraph g = path_graph(7);
    for (double s : {0.5, 2.0, 6.0}) {
      for (double eps : {0.5, 1.0}) {
        CHECK(exact_interval_dp(g, 3, s, 0.7, eps) ==
              doctest::Approx(range_chain_moment(g, 3, s, 0.7, eps)).epsilon(1e-10));
      }
    }
    CHECK(exact_interval_dp(g, 0, 2.0, 0.3, 0.5) ==
          doctest::Approx(range_chain_moment(g, 0, 2.0, 0.3, 0.5)).epsilon(1e-10));
  }
  SUBCASE("s = 0") {
    const MetricMeasureGraph g = path_graph(11);
    CHECK(exact_interval_dp(g, 5, 0.0, 0.4, 1.0) == doctest::Approx(std::exp(-0.4 * g.volume(5, 1.0))));
  }
  SUBCASE("two-vertex path") {
    const MetricMeasureGraph g = path_graph(2);
    for (double s : {0.1, 1.0, 4.0}) {
      CHECK(std::abs(exact_interval_dp(g, 0, s, 0.5, 0.5) -
                     oracle::two_state_moment(1.0, 1.0, 1.0, 0.5, s)) <= 1e-10);
    }
  }
  SUBCASE("decreasing in nu") {
    const MetricMeasureGraph g = path_graph(31);
    double prev = 1.0;
    for (double nu : {0.1, 0.5, 1.0, 5.0, 50.0}) {
      const double v = exact_interval_dp(g, 15, 4.0, nu, 0.5);
      CHECK(v < prev);
      prev = v;
    }
    CHECK(prev < 1e-30);
  }
  SUBCASE("non-path spaces are rejected") {
    CHECK_THROWS_AS(path_order(lattice_box(2, 3)), InvalidArgument);
    CHECK_THROWS_AS(path_order(lattice_box(1, 6, true)), InvalidArgument);
  }
}

TEST_CASE("monotone divergence") {
  const std::vector<double> grow{1.0, 2.0, 3.5, 6.0};
  const std::vector<double> flat{1.0, 1.2, 1.3, 1.35};
  const std::vector<double> wobble{1.0, 1.5, 1.2, 1.6};
  CHECK(monotone_divergence(grow));
  CHECK_FALSE(monotone_divergence(flat));
  CHECK_FALSE(monotone_divergence(wobble));
}

TEST_CASE("scaling experiment") {
  SUBCASE("nu = 0") {
    ScalingConfig c;
    c.start = 50;
    c.nu = 0.0;
    c.times = {4.0};
    const ScalingReport r = run_scaling_experiment(path_graph(101), c);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].log_moment == 0.0);
    CHECK(r.rows[0].ratio == 0.0);
    CHECK(r.pass);
  }
  SUBCASE("MC agrees with the DP") {
    ScalingConfig c;
    c.start = 20;
    c.nu = 0.05;
    c.times = {1.0, 1.5};
    c.mode = MomentMode::kBoth;
    c.n_paths = 50'000;
    const ScalingReport r = run_scaling_experiment(path_graph(41), c);
    for (const ScalingRow& row : r.rows) {
      CHECK(std::abs(row.mc.value - row.moment.value) <= 3.0 * row.mc.se);
      CHECK(row.upper_holds);
    }
  }
  SUBCASE("bad grids") {
    ScalingConfig c;
    c.times = {2.0, 1.0};
    CHECK_THROWS_AS(run_scaling_experiment(path_graph(11), c), InvalidArgument);
    c.times = {1.0};
    CHECK_THROWS_AS(run_scaling_experiment(lattice_box(2, 5), c), InvalidArgument);
  }
}

TEST_CASE("lower-bound certificate") {
  const MetricMeasureGraph g = path_graph(41);
  SUBCASE("single-vertex ball exits exponentially") {
    const LowerBoundCertificate c = lower_bound_certificate(g, 20, 1.2, 0.5, 0.5, 2.0);
    CHECK(c.survival == doctest::Approx(std::exp(-g.holding_rate(20) * c.sigma)));
    CHECK(c.confinement_holds);
  }
  SUBCASE("nu = 0") {
    const LowerBoundCertificate c = lower_bound_certificate(g, 20, 4.0, 0.0, 0.5, 2.0);
    CHECK(c.moment.value == 1.0);
    CHECK(c.confinement_holds);
  }
  SUBCASE("whole-space ball is rejected") {
    CHECK_THROWS_AS(lower_bound_certificate(path_graph(5), 2, 5.0, 1.0, 0.5, 2.0), InvalidArgument);
  }
}

TEST_CASE("upper-bound diagnostic") {
  const MetricMeasureGraph g = lattice_box(2, 9);
  UpperBoundConfig c;
  c.t = 1.0;
  c.nu = 0.3;
  c.tail = {2.0, 0.1, 1.0, 1.0};
  const NetCover net = build_net(g, c.t);
  const NetSpectra spectra = prepare_net_spectra(g, net, c.beta);
  const Vertex x = 40;
  std::vector<int> counts(g.size(), 0);
  const UpperBoundDiagnostic clear =
      upper_bound_diagnostic(g, x, c, field_from_counts(g, counts, c.nu, 0.5), net, spectra);
  CHECK(clear.survival <= clear.spectral_bound);
  CHECK(clear.spectral_holds);
  CHECK(clear.net.holds);
  counts[x] = 1;
  const UpperBoundDiagnostic hit =
      upper_bound_diagnostic(g, x, c, field_from_counts(g, counts, c.nu, 0.5), net, spectra);
  CHECK(hit.start_blocked);
  CHECK(hit.survival == 0.0);
  CHECK(hit.pass);
}
