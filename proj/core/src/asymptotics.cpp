#include "sausage/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "sausage/error.hpp"

namespace sausage {

bool monotone_divergence(std::span<const double> sequence) {
  if (sequence.size() < 3) return false;
  double prev = sequence[1] - sequence[0];
  if (prev == 0.0) return false;
  for (std::size_t i = 2; i < sequence.size(); ++i) {
    const double d = sequence[i] - sequence[i - 1];
    if (d == 0.0 || (d > 0.0) != (prev > 0.0) || std::abs(d) < std::abs(prev)) return false;
    prev = d;
  }
  return true;
}

namespace {

bool is_path_graph(const MetricMeasureGraph& space) {
  try {
    path_order(space);
    return true;
  } catch (const InvalidArgument&) {
    return false;
  }
}

/// P^x[tau_{B(x, r)} > s]; 1 when the ball is the whole space.
double ball_survival(const MetricMeasureGraph& space, Vertex x, double r, double s) {
  const VertexSet ball = space.ball(x, r);
  if (ball.size() == space.size()) return 1.0;
  return HeatKernel(space, ball).survival(s, x);
}

}  // namespace

ScalingReport run_scaling_experiment(const MetricMeasureGraph& space, const ScalingConfig& config) {
  if (!space.contains(config.start)) throw InvalidArgument("scaling: start not in space");
  if (config.times.empty()) throw InvalidArgument("scaling: empty t grid");
  for (std::size_t i = 0; i < config.times.size(); ++i) {
    if (!(config.times[i] > 0.0) || (i > 0 && config.times[i] <= config.times[i - 1])) {
      throw InvalidArgument("scaling: t grid must be positive and increasing");
    }
  }
  if (!(config.beta > 1.0)) throw InvalidArgument("scaling: beta must exceed 1");
  const bool want_dp = config.mode != MomentMode::kMonteCarlo;
  const bool want_mc = config.mode != MomentMode::kExactDp;
  if (want_dp && !is_path_graph(space)) {
    throw InvalidArgument("scaling: exact-dp mode needs a path graph");
  }

  ScalingReport report;
  const Vertex x = config.start;
  for (std::size_t i = 0; i < config.times.size(); ++i) {
    ScalingRow row;
    row.t = config.times[i];
    row.volume = space.volume(x, row.t);
    row.s = std::pow(row.t, config.beta) * row.volume;
    if (want_mc) {
      const std::uint64_t seed = config.seed + 0x9E3779B97F4A7C15ull * (i + 1);
      row.mc = negative_moment(space, x, row.s, config.nu, config.epsilon, config.n_paths, seed,
                               config.workers);
    }
    if (want_dp) {
      row.moment = {interval_dp(space, x, row.s, config.nu, config.epsilon).value, 0.0, 0};
      row.exact = true;
    } else {
      row.moment = row.mc;
      row.use_exact = config.nu > 0.0 &&
                      (row.mc.value <= 0.0 || row.mc.value <= 3.0 * row.mc.se);
    }
    const double survival = ball_survival(space, x, row.t - config.epsilon, row.s);
    row.upper_L = config.nu * row.volume - std::log(survival);
    if (!row.use_exact) {
      // Clamped: rounding at nu -> 0 (and -log 1 == -0).
      row.log_moment = std::max(0.0, -std::log(row.moment.value));
      row.ratio = row.log_moment / row.volume;
      row.upper_holds = row.exact
                            ? row.log_moment <= row.upper_L * (1.0 + 1e-9) + 1e-12
                            : row.moment.upper95() >= std::exp(-row.upper_L);
    }
    report.rows.push_back(row);
  }

  std::vector<double> ratios;
  bool all_upper = true;
  for (const ScalingRow& row : report.rows) {
    all_upper = all_upper && row.upper_holds;
    if (!row.use_exact) ratios.push_back(row.ratio);
  }
  if (!ratios.empty()) {
    report.c_low = *std::min_element(ratios.begin(), ratios.end());
    report.c_high = *std::max_element(ratios.begin(), ratios.end());
  }
  if (report.c_low > 0.0) {
    report.band_ratio = report.c_high / report.c_low;
  } else {
    report.band_ratio = report.c_high == 0.0 ? 1.0 : kInfinity;
  }
  report.monotone_divergence = monotone_divergence(ratios);
  if (config.nu == 0.0) {
    report.pass = all_upper;
  } else {
    report.pass = all_upper && ratios.size() == report.rows.size() && report.c_low > 0.0 &&
                  report.band_ratio <= config.band_limit && !report.monotone_divergence;
  }
  return report;
}

// ---------------------------------------------------------------------------

LowerBoundCertificate lower_bound_certificate(const MetricMeasureGraph& space, Vertex x, double t,
                                              double nu, double epsilon, double beta,
                                              const LowerBoundOptions& options) {
  if (!space.contains(x)) throw InvalidArgument("certificate: start not in space");
  if (!(t > epsilon)) throw InvalidArgument("certificate: need t > eps");
  LowerBoundCertificate cert;
  cert.t = t;
  cert.rho = t - epsilon;
  cert.volume = space.volume(x, t);
  cert.sigma = std::pow(t, beta) * cert.volume;
  cert.c_prime = options.c_prime;
  const VertexSet ball = space.ball(x, cert.rho);
  if (ball.size() == space.size()) {
    throw InvalidArgument("certificate: B(x, t - eps) is the whole space, nothing to exit to");
  }
  cert.survival = HeatKernel(space, ball).survival(cert.sigma, x);
  if (is_path_graph(space)) {
    cert.moment = {interval_dp(space, x, cert.sigma, nu, epsilon).value, 0.0, 0};
    cert.moment_exact = true;
  } else {
    cert.moment = negative_moment(space, x, cert.sigma, nu, epsilon, options.n_paths, options.seed,
                                  options.workers);
  }
  cert.lower = std::exp(-nu * cert.volume) * cert.survival;
  cert.confinement_holds = cert.moment_exact ? cert.moment.value >= cert.lower * (1.0 - 1e-9)
                                        : cert.moment.upper95() >= cert.lower;

  const double log_prefactor =
      std::log(2.0 * space.volume(x, std::pow(cert.rho, 1.0 / beta))) + std::log(cert.survival) +
      options.c_prime * cert.rho;
  for (double a : options.a_grid) {
    const VertexSet inner = space.ball(x, a * cert.rho);
    const double lambda = dirichlet_eigenvalue(space, inner).value;
    cert.a_values.push_back(a);
    cert.lambdas.push_back(lambda);
    cert.log_c.push_back(log_prefactor + cert.sigma * lambda);
  }
  return cert;
}

LowerBoundFit fit_lower_bound(std::span<const LowerBoundCertificate> certificates, double beta,
                              double window_limit) {
  LowerBoundFit fit;
  if (certificates.empty()) return fit;
  const std::size_t grid = certificates.front().a_values.size();
  bool all_i = true;
  for (const auto& cert : certificates) all_i = all_i && cert.confinement_holds;
  fit.c_prime = certificates.front().c_prime;
  for (std::size_t j = grid; j-- > 0;) {
    double lo = kInfinity, hi = 0.0, log_c = kInfinity;
    for (const auto& cert : certificates) {
      const double scaled = cert.lambdas[j] * std::pow(cert.a_values[j] * cert.rho, beta);
      lo = std::min(lo, scaled);
      hi = std::max(hi, scaled);
      log_c = std::min(log_c, cert.log_c[j]);
    }
    if (!(lo > 0.0) || hi / lo > window_limit || !std::isfinite(log_c)) continue;
    fit.a = certificates.front().a_values[j];
    fit.c = std::exp(log_c);
    fit.window_low = lo;
    fit.window_high = hi;
    fit.pass = all_i;
    return fit;
  }
  return fit;
}

// ---------------------------------------------------------------------------

UpperBoundDiagnostic upper_bound_diagnostic(const MetricMeasureGraph& space, Vertex x,
                                            const UpperBoundConfig& config,
                                            const ObstacleField& field, const NetCover& net,
                                            const NetSpectra& spectra) {
  if (!space.contains(x)) throw InvalidArgument("upper diagnostic: start not in space");
  if (field.blocked.size() != space.size()) throw InvalidArgument("upper diagnostic: field size");
  UpperBoundDiagnostic out;
  out.s = std::pow(config.t, config.beta) * space.volume(x, config.t);
  const double outer = config.outer_factor * out.s;
  const VertexSet ball = space.ball(x, outer);
  if (ball.size() > kDenseLimit) {
    throw ResourceLimitError("upper diagnostic: B(x, Ns) exceeds the dense eigensolver limit");
  }
  VertexSet domain;
  for (Vertex v : ball) {
    if (!field.blocked[v]) domain.push_back(v);
  }
  out.domain_size = domain.size();
  out.start_blocked = field.blocked[x] != 0;

  out.net = net_eigenvalue_lower_bound(space, domain, net, spectra, field.blocked, false);
  if (domain.empty()) {
    out.lambda = kInfinity;
  } else {
    out.lambda = dirichlet_eigenvalue(space, domain).value;
  }
  out.net.lambda = out.lambda;
  out.net.holds = out.lambda >= std::max(out.net.bound, out.net.element_bound) * (1.0 - 1e-9) - 1e-12;

  if (out.start_blocked) {
    out.survival = 0.0;
    out.spectral_bound = 0.0;
    out.volume_bound = 0.0;
    out.spectral_holds = true;
  } else {
    out.survival = HeatKernel(space, domain).survival(out.s, x);
    const double decay = std::exp(-out.s * out.lambda);
    out.spectral_bound = decay * std::sqrt(space.mass(domain) / space.measure(x));
    out.volume_bound = decay * std::sqrt(space.mass(ball));
    out.spectral_holds = out.survival <= out.spectral_bound * (1.0 + 1e-9) + 1e-15;
  }

  out.escape = ball.size() == space.size() ? 0.0 : escape_probability(space, ball, out.s, x);
  out.escape_bound = config.tail(outer, out.s);
  out.escape_holds = out.escape <= out.escape_bound + 1e-15;
  out.pass = out.spectral_holds && out.net.holds && out.escape_holds;
  return out;
}

}  // namespace sausage
