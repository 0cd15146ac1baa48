#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sausage/asymptotics.hpp"
#include "sausage/error.hpp"
#include "sausage/obstacles.hpp"
#include "sausage/rng.hpp"
#include "sausage/spectral.hpp"

namespace sausagelab {

using sausage::CsvTable;
using sausage::MetricMeasureGraph;
using sausage::Vertex;
using sausage::VertexSet;
using Type = CsvTable::Type;

void RunContext::check(bool ok, const std::string& invariant) {
  if (!ok) failures.push_back(invariant);
}

void RunContext::write_results(const CsvTable& table) const {
  std::ofstream file(out / ("results_" + command + ".csv"), std::ios::binary);
  table.write(file);
}

void RunContext::write_series(const std::string& name, const CsvTable& table) const {
  std::ofstream file(out / ("series_" + name + ".csv"), std::ios::binary);
  table.write(file);
}

namespace {

std::vector<Vertex> centers_of(const json& config, const MetricMeasureGraph& space) {
  std::vector<Vertex> centers;
  if (config.contains("centers")) {
    centers = get_vertices(config, "centers", "");
    check_vertices(space, centers, "centers");
  } else {
    centers = {static_cast<Vertex>(get_int(config, "start", "", 0))};
    check_vertices(space, centers, "start");
  }
  if (centers.empty()) throw ConfigError("field 'centers': must not be empty");
  return centers;
}

Vertex start_of(const json& config, const MetricMeasureGraph& space) {
  const Vertex x = static_cast<Vertex>(get_int(config, "start", ""));
  check_vertices(space, {x}, "start");
  return x;
}

/// Powers of two from `first` up to `last`.
std::vector<double> dyadic(double first, double last) {
  std::vector<double> out;
  for (double r = first; r <= last * (1.0 + 1e-12); r *= 2.0) out.push_back(r);
  return out;
}

void require_increasing(const std::vector<double>& values, const std::string& field) {
  if (values.empty()) throw ConfigError("field '" + field + "': must not be empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || (i > 0 && values[i] <= values[i - 1])) {
      throw ConfigError("field '" + field + "': must be positive and increasing");
    }
  }
}

void require_positive(double v, const std::string& field) {
  if (!(v > 0.0)) throw ConfigError("field '" + field + "': must be positive");
}

void require_nonnegative(double v, const std::string& field) {
  if (!(v >= 0.0)) throw ConfigError("field '" + field + "': must be nonnegative");
}

std::size_t count_of(const json& config, const std::string& key, long long fallback) {
  const long long v = get_int(config, key, "", fallback);
  if (v <= 0) throw ConfigError("field '" + key + "': must be positive");
  return static_cast<std::size_t>(v);
}

/// Optional [lo, hi] range; returns false when absent.
bool range_of(const json& config, const std::string& key, double& lo, double& hi) {
  if (!config.contains(key)) return false;
  const std::vector<double> r = get_doubles(config, key, "");
  if (r.size() != 2 || r[0] > r[1]) throw ConfigError("field '" + key + "': expected [lo, hi]");
  lo = r[0];
  hi = r[1];
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------

void space_audit(RunContext& ctx, const MetricMeasureGraph& space) {
  const json& cfg = ctx.config;
  const std::vector<Vertex> centers = centers_of(cfg, space);
  const double diameter = space.diameter();
  std::vector<double> radii = get_doubles(cfg, "radii", "", dyadic(1.0, std::max(1.0, diameter / 2)));
  require_increasing(radii, "radii");
  const double beta = get_double(cfg, "beta", "", 2.0);
  require_positive(beta, "beta");

  const sausage::DoublingEstimate doubling = sausage::doubling_constant(space, centers, radii);

  CsvTable results({{"center", Type::kInt},
                    {"r", Type::kFloat},
                    {"volume", Type::kFloat},
                    {"doubling_ratio", Type::kFloat}});
  CsvTable series({{"center", Type::kInt}, {"log_r", Type::kFloat}, {"log_volume", Type::kFloat}});
  for (Vertex x : centers) {
    const sausage::VolumeProfile profile = sausage::volume_profile(space, x, radii);
    for (std::size_t i = 0; i < radii.size(); ++i) {
      results.row()
          .cell(static_cast<long long>(x))
          .cell(radii[i])
          .cell(profile.volumes[i])
          .cell(space.volume(x, 2.0 * radii[i]) / profile.volumes[i]);
      series.row()
          .cell(static_cast<long long>(x))
          .cell(std::log(radii[i]))
          .cell(std::log(profile.volumes[i]));
    }
  }

  json& s = ctx.summary;
  s["vertices"] = space.size();
  s["diameter"] = diameter;
  s["c_vd"] = doubling.c_vd;
  s["alpha"] = doubling.alpha;
  s["worst_center"] = doubling.worst_center;
  s["worst_radius"] = doubling.worst_radius;
  double lo = 0.0, hi = 0.0;
  if (range_of(cfg, "expect_alpha", lo, hi)) {
    ctx.check(doubling.alpha >= lo && doubling.alpha <= hi, "volume doubling exponent in expected range");
  }
  if (get_bool(cfg, "linear_growth", "", false)) {
    const sausage::LinearGrowthCheck growth = sausage::check_linear_growth(space, centers, radii);
    s["linear_growth"] = {{"inf_ratio", growth.inf_ratio}, {"sup_volume", growth.sup_volume}};
    ctx.check(growth.pass, "linear volume growth");
  }

  const double net_scale = get_double(cfg, "net_scale", "", 0.0);
  require_nonnegative(net_scale, "net_scale");
  if (net_scale > 0.0) {
    const sausage::NetCover net = sausage::build_net(space, net_scale);
    const double overlap_bound = sausage::NetCover::overlap_bound(doubling);
    const double horizon = get_double(cfg, "overlap_s", "", net_scale);
    require_positive(horizon, "overlap_s");
    const sausage::OverlapCount overlap =
        sausage::count_overlapping(space, net, centers.front(), horizon, doubling);
    s["net"] = {{"scale", net_scale},
                {"elements", net.centers.size()},
                {"max_overlap", net.max_overlap},
                {"overlap_bound", overlap_bound},
                {"overlapping", overlap.count},
                {"packing_bound", overlap.packing_bound},
                {"polynomial_bound", overlap.polynomial_bound}};
    ctx.check(net.verify(space), "net covers the space with disjoint half-balls");
    ctx.check(net.max_overlap <= overlap_bound * (1.0 + 1e-12), "net multiplicity below C_VD 6^alpha");
    ctx.check(static_cast<double>(overlap.count) <= overlap.packing_bound * (1.0 + 1e-12),
              "overlap count below the packing bound");
  }

  const sausage::RelativeVolumeCheck relative =
      sausage::check_relative_volume(space, centers.front(), beta, radii);
  s["relative_volume_min"] = relative.min_value;
  s["relative_volume_truncated"] = relative.truncated;
  ctx.write_results(results);
  ctx.write_series("volume", series);
}

// ---------------------------------------------------------------------------

void spectral_audit(RunContext& ctx, const MetricMeasureGraph& space) {
  const json& cfg = ctx.config;
  const std::vector<Vertex> centers = centers_of(cfg, space);
  const double diameter = space.diameter();
  const std::vector<double> times =
      get_doubles(cfg, "times", "", dyadic(1.0, diameter * diameter / 16.0));
  require_increasing(times, "times");

  CsvTable results({{"check", Type::kString},
                    {"center", Type::kInt},
                    {"radius", Type::kFloat},
                    {"value", Type::kFloat},
                    {"bound", Type::kFloat},
                    {"holds", Type::kBool}});
  json& s = ctx.summary;

  sausage::GaussianFitOptions options;
  options.beta_min = get_double(cfg, "beta_min", "", options.beta_min);
  options.beta_max = get_double(cfg, "beta_max", "", options.beta_max);
  sausage::GaussianFit fit;
  try {
    fit = sausage::fit_ge_beta(space, centers, times, options);
  } catch (const sausage::InvalidArgument& e) {
    throw ConfigError(std::string("field 'times': ") + e.what());
  }
  double lo = 0.0, hi = 0.0;
  const bool expect = range_of(cfg, "expect_beta", lo, hi);
  const bool beta_ok = !fit.rejected && (!expect || (fit.beta >= lo && fit.beta <= hi));
  results.row()
      .cell("ge_beta")
      .cell(static_cast<long long>(centers.front()))
      .cell(0.0)
      .cell(fit.beta)
      .cell(fit.diagonal_residual)
      .cell(beta_ok);
  s["ge_fit"] = {{"rejected", fit.rejected},
                 {"reason", fit.reason},
                 {"beta", fit.beta},
                 {"c_upper", fit.c_upper},
                 {"C_upper", fit.C_upper},
                 {"c_lower", fit.c_lower},
                 {"C_lower", fit.C_lower},
                 {"violation_fraction", fit.violation_fraction},
                 {"train_samples", fit.train_samples},
                 {"test_samples", fit.test_samples},
                 {"times", fit.times}};
  ctx.check(!fit.rejected, "GE fit accepted: " + fit.reason);
  if (expect) ctx.check(beta_ok, "fitted walk dimension in expected range");

  CsvTable series({{"t", Type::kFloat}, {"log_t", Type::kFloat}, {"log_h", Type::kFloat}});
  if (!fit.times.empty()) {
    const sausage::HeatKernel kernel(space);
    const std::vector<Eigen::VectorXd> rows = kernel.rows(fit.times, centers.front());
    const auto local = kernel.domain().local(centers.front());
    for (std::size_t k = 0; k < fit.times.size(); ++k) {
      series.row().cell(fit.times[k]).cell(std::log(fit.times[k])).cell(std::log(rows[k](local)));
    }
  }

  const double beta = fit.rejected ? get_double(cfg, "beta", "", 2.0) : fit.beta;
  const std::vector<double> radii =
      get_doubles(cfg, "poincare_radii", "", dyadic(2.0, std::max(2.0, diameter / 4)));
  require_increasing(radii, "poincare_radii");
  double c_pi = 0.0;
  for (Vertex x : centers) {
    for (double r : radii) {
      const VertexSet ball = space.ball(x, r);
      if (ball.size() < 2 || ball.size() > sausage::kDenseLimit) continue;
      const sausage::PoincareResult p = sausage::poincare_constant(space, x, r, beta);
      c_pi = std::max(c_pi, p.c_pi);
      sausage::Philox4x32 rng = sausage::seed_stream(ctx.seed, sausage::StreamLabel::kTestFunction,
                                                     static_cast<std::uint64_t>(results.rows()));
      Eigen::VectorXd f(static_cast<Eigen::Index>(ball.size()));
      for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = rng.uniform() - 0.5;
      const sausage::PoincareCheck random = sausage::poincare_check(space, p, f);
      const sausage::PoincareCheck witness = sausage::poincare_check(space, p, p.witness.witness);
      const bool holds = random.holds && witness.holds;
      results.row()
          .cell("poincare")
          .cell(static_cast<long long>(x))
          .cell(r)
          .cell(random.lhs)
          .cell(random.rhs)
          .cell(holds);
      ctx.check(holds, "Poincare inequality at r=" + sausage::format_number(r));
    }
  }
  s["c_pi"] = c_pi;

  const std::size_t n_thirring = count_of(cfg, "n_thirring", 20);
  const double removed_fraction = get_double(cfg, "thirring_fraction", "", 0.3);
  std::size_t thirring_failures = 0;
  for (std::size_t k = 0; k < n_thirring; ++k) {
    sausage::Philox4x32 rng = sausage::seed_stream(ctx.seed, sausage::StreamLabel::kSubset, k);
    const Vertex x = centers[k % centers.size()];
    const double r = radii[k % radii.size()];
    const VertexSet domain = space.ball(x, r);
    if (domain.size() < 2 || domain.size() > sausage::kDenseLimit) continue;
    VertexSet removed;
    for (Vertex v : domain) {
      if (rng.uniform() < removed_fraction) removed.push_back(v);
    }
    const sausage::ThirringResult t = sausage::thirring_bound(space, domain, removed);
    thirring_failures += t.holds ? 0 : 1;
    results.row()
        .cell("thirring")
        .cell(static_cast<long long>(x))
        .cell(r)
        .cell(t.lambda_a)
        .cell(t.rhs)
        .cell(t.holds);
  }
  s["thirring_failures"] = thirring_failures;
  ctx.check(thirring_failures == 0, "Thirring inequality on every sampled subset");

  ctx.write_results(results);
  ctx.write_series("diagonal_decay", series);
}

// ---------------------------------------------------------------------------

void sausage_scaling(RunContext& ctx, const MetricMeasureGraph& space) {
  const json& cfg = ctx.config;
  sausage::ScalingConfig config;
  config.start = start_of(cfg, space);
  config.beta = get_double(cfg, "beta", "", 2.0);
  if (!(config.beta > 1.0)) throw ConfigError("field 'beta': must exceed 1");
  config.nu = get_double(cfg, "nu", "");
  require_nonnegative(config.nu, "nu");
  config.epsilon = get_double(cfg, "epsilon", "", 0.5);
  require_nonnegative(config.epsilon, "epsilon");
  config.times = get_doubles(cfg, "times", "");
  require_increasing(config.times, "times");
  const std::string mode = get_string(cfg, "mode", "", std::string("dp"));
  if (mode == "mc") {
    config.mode = sausage::MomentMode::kMonteCarlo;
  } else if (mode == "dp") {
    config.mode = sausage::MomentMode::kExactDp;
  } else if (mode == "both") {
    config.mode = sausage::MomentMode::kBoth;
  } else {
    throw ConfigError("field 'mode': expected \"mc\", \"dp\" or \"both\"");
  }
  if (config.mode != sausage::MomentMode::kMonteCarlo) {
    try {
      sausage::path_order(space);
    } catch (const sausage::InvalidArgument&) {
      throw ConfigError("field 'mode': \"" + mode + "\" needs a path graph space");
    }
  }
  config.n_paths = count_of(cfg, "n_paths", 10'000);
  config.band_limit = get_double(cfg, "band_limit", "", config.band_limit);
  config.seed = ctx.seed;
  config.workers = ctx.workers;

  const sausage::ScalingReport report = sausage::run_scaling_experiment(space, config);

  CsvTable results({{"t", Type::kFloat},
                    {"volume", Type::kFloat},
                    {"s", Type::kFloat},
                    {"moment", Type::kFloat},
                    {"moment_se", Type::kFloat},
                    {"exact", Type::kBool},
                    {"mc_moment", Type::kFloat},
                    {"mc_se", Type::kFloat},
                    {"L", Type::kFloat},
                    {"ratio", Type::kFloat},
                    {"upper_L", Type::kFloat},
                    {"upper_holds", Type::kBool},
                    {"unresolved", Type::kBool}});
  CsvTable series({{"t", Type::kFloat}, {"ratio", Type::kFloat}});
  for (const sausage::ScalingRow& row : report.rows) {
    results.row()
        .cell(row.t)
        .cell(row.volume)
        .cell(row.s)
        .cell(row.moment.value)
        .cell(row.moment.se)
        .cell(row.exact)
        .cell(row.mc.value)
        .cell(row.mc.se)
        .cell(row.log_moment)
        .cell(row.ratio)
        .cell(row.upper_L)
        .cell(row.upper_holds)
        .cell(row.use_exact);
    if (!row.use_exact) series.row().cell(row.t).cell(row.ratio);
    ctx.check(row.upper_holds, "L(t) below the ball-confinement bound at t=" +
                                   sausage::format_number(row.t));
    if (row.use_exact) {
      ctx.check(false, "moment not resolved by the sampler at t=" + sausage::format_number(row.t) +
                           " (switch to mode \"dp\" or raise n_paths)");
    }
  }
  json& s = ctx.summary;
  s["c_low"] = report.c_low;
  s["c_high"] = report.c_high;
  s["band_ratio"] = report.band_ratio;
  s["monotone_divergence"] = report.monotone_divergence;
  if (config.nu > 0.0) {
    ctx.check(report.c_low > 0.0, "L(t) / V(x, t) bounded away from 0");
    ctx.check(report.band_ratio <= config.band_limit, "L(t) / V(x, t) band within band_limit");
    ctx.check(!report.monotone_divergence, "L(t) / V(x, t) does not diverge monotonically");
  }
  ctx.write_results(results);
  ctx.write_series("scaling", series);
}

// ---------------------------------------------------------------------------

void survival(RunContext& ctx, const MetricMeasureGraph& space) {
  const json& cfg = ctx.config;
  const Vertex x = start_of(cfg, space);
  const double s = get_double(cfg, "s", "");
  require_nonnegative(s, "s");
  const double nu = get_double(cfg, "nu", "");
  require_nonnegative(nu, "nu");
  const double epsilon = get_double(cfg, "epsilon", "", 0.5);
  require_nonnegative(epsilon, "epsilon");
  const std::size_t n_fields = count_of(cfg, "n_fields", 1000);
  const std::size_t n_paths = count_of(cfg, "n_paths", 50);
  const std::size_t n_moment = count_of(cfg, "n_moment_paths", 10'000);

  const sausage::AnnealedSurvival annealed =
      sausage::annealed_survival(space, x, s, nu, epsilon, n_fields, n_paths, ctx.seed, ctx.workers);
  const sausage::Estimate moment =
      sausage::negative_moment(space, x, s, nu, epsilon, n_moment, ctx.seed, ctx.workers);

  CsvTable results({{"quantity", Type::kString},
                    {"value", Type::kFloat},
                    {"se", Type::kFloat},
                    {"samples", Type::kInt}});
  results.row().cell("annealed_survival").cell(annealed.estimate.value).cell(annealed.estimate.se)
      .cell(static_cast<long long>(annealed.estimate.n));
  results.row().cell("negative_moment").cell(moment.value).cell(moment.se)
      .cell(static_cast<long long>(moment.n));

  const double gap = std::abs(annealed.estimate.value - moment.value);
  const double spread = 3.0 * std::hypot(annealed.estimate.se, moment.se);
  json& sum = ctx.summary;
  sum["annealed"] = {{"value", annealed.estimate.value},
                     {"se", annealed.estimate.se},
                     {"environment_variance", annealed.environment_variance},
                     {"path_variance", annealed.path_variance},
                     {"exact_inner", annealed.exact_inner}};
  sum["moment"] = {{"value", moment.value}, {"se", moment.se}};
  sum["difference"] = gap;
  ctx.check(gap <= spread + 1e-12, "annealed survival equals the negative exponential moment");

  if (cfg.contains("cramer")) {
    const json& c = cfg["cramer"];
    const Vertex center = static_cast<Vertex>(get_int(c, "center", "cramer", x));
    check_vertices(space, {center}, "cramer.center");
    const std::vector<double> radii = get_doubles(c, "radii", "cramer");
    require_increasing(radii, "cramer.radii");
    const double frac = get_double(c, "frac", "cramer");
    if (!(frac >= 0.0 && frac <= 1.0)) throw ConfigError("field 'cramer.frac': must lie in [0, 1]");
    const std::size_t n_mc = count_of(c, "n_mc", 100'000);
    CsvTable series({{"radius", Type::kFloat},
                     {"block_mass", Type::kFloat},
                     {"probability", Type::kFloat},
                     {"se", Type::kFloat},
                     {"rate", Type::kFloat},
                     {"exact", Type::kBool}});
    json rates = json::array();
    for (double r : radii) {
      const VertexSet block = space.ball(center, r);
      const sausage::CramerTail tail =
          sausage::cramer_tail(space, block, nu, epsilon, frac, n_mc, ctx.seed, ctx.workers);
      series.row().cell(r).cell(space.mass(block)).cell(tail.probability).cell(tail.se)
          .cell(tail.rate).cell(tail.exact);
      results.row().cell("cramer_probability").cell(tail.probability).cell(tail.se)
          .cell(static_cast<long long>(tail.samples));
      rates.push_back(tail.rate);
    }
    sum["cramer_rates"] = rates;
    ctx.write_series("cramer", series);
  }
  ctx.write_results(results);
}

// ---------------------------------------------------------------------------

void certify(RunContext& ctx, const MetricMeasureGraph& space) {
  const json& cfg = ctx.config;
  const Vertex x = start_of(cfg, space);
  const double beta = get_double(cfg, "beta", "", 2.0);
  if (!(beta > 1.0)) throw ConfigError("field 'beta': must exceed 1");
  const double nu = get_double(cfg, "nu", "");
  require_nonnegative(nu, "nu");
  const double epsilon = get_double(cfg, "epsilon", "", 0.5);
  require_nonnegative(epsilon, "epsilon");
  json& s = ctx.summary;

  CsvTable results({{"kind", Type::kString},
                    {"t", Type::kFloat},
                    {"a", Type::kFloat},
                    {"value", Type::kFloat},
                    {"bound", Type::kFloat},
                    {"holds", Type::kBool}});

  if (cfg.contains("times")) {
    const std::vector<double> times = get_doubles(cfg, "times", "");
    require_increasing(times, "times");
    for (double t : times) {
      if (!(t > epsilon)) throw ConfigError("field 'times': every t must exceed epsilon");
    }
    sausage::LowerBoundOptions options;
    options.a_grid = get_doubles(cfg, "a_grid", "", options.a_grid);
    options.c_prime = get_double(cfg, "c_prime", "", options.c_prime);
    options.n_paths = count_of(cfg, "n_paths", 100'000);
    options.seed = ctx.seed;
    options.workers = ctx.workers;
    std::vector<sausage::LowerBoundCertificate> certs;
    CsvTable series({{"t", Type::kFloat}, {"moment", Type::kFloat}, {"lower", Type::kFloat}});
    for (double t : times) {
      sausage::LowerBoundCertificate cert;
      try {
        cert = sausage::lower_bound_certificate(space, x, t, nu, epsilon, beta, options);
      } catch (const sausage::InvalidArgument& e) {
        throw ConfigError(std::string("field 'times': ") + e.what());
      }
      results.row().cell("confinement").cell(t).cell(0.0).cell(cert.moment.value).cell(cert.lower)
          .cell(cert.confinement_holds);
      for (std::size_t j = 0; j < cert.a_values.size(); ++j) {
        results.row().cell("lambda").cell(t).cell(cert.a_values[j]).cell(cert.lambdas[j])
            .cell(cert.log_c[j]).cell(true);
      }
      series.row().cell(t).cell(cert.moment.value).cell(cert.lower);
      ctx.check(cert.confinement_holds, "moment above exp(-nu V) P[confined] at t=" +
                                       sausage::format_number(t));
      certs.push_back(std::move(cert));
    }
    const sausage::LowerBoundFit fit = sausage::fit_lower_bound(certs, beta);
    s["lower"] = {{"a", fit.a},
                  {"c", fit.c},
                  {"c_prime", fit.c_prime},
                  {"window_low", fit.window_low},
                  {"window_high", fit.window_high},
                  {"pass", fit.pass}};
    ctx.check(fit.pass, "lower bound constants uniform over the t grid");
    ctx.write_series("lower_bound", series);
  }

  if (cfg.contains("upper")) {
    const json& u = cfg["upper"];
    sausage::UpperBoundConfig config;
    config.t = get_double(u, "t", "upper", config.t);
    require_positive(config.t, "upper.t");
    config.beta = beta;
    config.nu = get_double(u, "nu", "upper", nu);
    require_nonnegative(config.nu, "upper.nu");
    config.epsilon = get_double(u, "epsilon", "upper", epsilon);
    config.outer_factor = get_double(u, "outer_factor", "upper", config.outer_factor);
    require_positive(config.outer_factor, "upper.outer_factor");
    if (u.contains("tail")) {
      const json& tail = u["tail"];
      config.tail.beta = get_double(tail, "beta", "upper.tail", beta);
      config.tail.c = get_double(tail, "c", "upper.tail");
      config.tail.C = get_double(tail, "C", "upper.tail");
      config.tail.min_ratio = get_double(tail, "min_ratio", "upper.tail", 1.0);
    }
    const std::size_t n_fields = count_of(u, "n_fields", 20);
    const sausage::NetCover net = sausage::build_net(space, config.t);
    const sausage::NetSpectra spectra = sausage::prepare_net_spectra(space, net, config.beta);
    std::size_t failures = 0;
    CsvTable series({{"field", Type::kInt},
                     {"lambda", Type::kFloat},
                     {"net_bound", Type::kFloat},
                     {"survival", Type::kFloat},
                     {"spectral_bound", Type::kFloat}});
    for (std::size_t f = 0; f < n_fields; ++f) {
      sausage::Philox4x32 rng = sausage::seed_stream(ctx.seed, sausage::StreamLabel::kField, f);
      const sausage::ObstacleField field = sausage::sample_field(space, config.nu, config.epsilon, rng);
      const sausage::UpperBoundDiagnostic d =
          sausage::upper_bound_diagnostic(space, x, config, field, net, spectra);
      const double net_bound = std::max(d.net.bound, d.net.element_bound);
      results.row().cell("net_eigenvalue").cell(config.t).cell(0.0).cell(d.lambda).cell(net_bound)
          .cell(d.net.holds);
      results.row().cell("spectral_survival").cell(config.t).cell(0.0).cell(d.survival)
          .cell(d.spectral_bound).cell(d.spectral_holds);
      results.row().cell("escape").cell(config.t).cell(0.0).cell(d.escape).cell(d.escape_bound)
          .cell(d.escape_holds);
      series.row().cell(static_cast<long long>(f)).cell(d.lambda).cell(net_bound).cell(d.survival)
          .cell(d.spectral_bound);
      failures += d.pass ? 0 : 1;
    }
    s["upper"] = {{"fields", n_fields}, {"failures", failures}, {"net_elements", net.centers.size()},
                  {"c_pi", spectra.c_pi}, {"c_over", spectra.c_over}};
    ctx.check(failures == 0, "upper-bound diagnostic holds on every sampled field");
    ctx.write_series("upper_bound", series);
  }
  if (!cfg.contains("times") && !cfg.contains("upper")) {
    throw ConfigError("missing field 'times' or 'upper': nothing to certify");
  }
  ctx.write_results(results);
}

}  // namespace sausagelab
