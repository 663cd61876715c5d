#include "reslat/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "reslat/dynamics.hpp"
#include "reslat/resavg.hpp"

namespace reslat {

GaussHermiteRule gauss_hermite(int order) {
  if (order < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = std::sqrt(0.5 * k);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussHermiteRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights.resize(order);
  const double mu0 = std::sqrt(M_PI);  // integral of e^{-x^2}
  for (int i = 0; i < order; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

double gaussian_pair_expectation(const std::function<double(Complex, Complex)>& f,
                                 double t_k, double t_j, int order) {
  const GaussHermiteRule rule = gauss_hermite(order);
  const double sk = std::sqrt(2.0 * t_k);
  const double sj = std::sqrt(2.0 * t_j);
  const double norm = 1.0 / (M_PI * M_PI);
  double acc = 0.0;
  for (int a = 0; a < order; ++a)
    for (int b = 0; b < order; ++b) {
      const Complex uk(sk * rule.nodes[a], sk * rule.nodes[b]);
      const double wab = rule.weights[a] * rule.weights[b];
      for (int c = 0; c < order; ++c)
        for (int d = 0; d < order; ++d) {
          const Complex uj(sj * rule.nodes[c], sj * rule.nodes[d]);
          acc += wab * rule.weights[c] * rule.weights[d] * f(uk, uj);
        }
    }
  return acc * norm;
}

namespace {

inline double dot_c(Complex a, Complex b) {
  return a.real() * b.real() + a.imag() * b.imag();
}

}  // namespace

double quartic_eta(Complex u_k, Complex u_j, double t_k, double t_j) {
  const Complex i_uk(-u_k.imag(), u_k.real());
  return 1.5 * dot_c(i_uk, u_j) *
         (std::norm(u_j - u_k) + 4.0 * (t_j + t_k));
}

double kappa_closed_form_quartic(double t_k, double t_j, int order) {
  if (!(t_k > 0.0) || !(t_j > 0.0))
    throw std::invalid_argument("conductivity needs positive temperatures");
  const PotentialModel quartic = PotentialModel::quartic();
  const double corr = gaussian_pair_expectation(
      [&](Complex uk, Complex uj) {
        return resonant_flow(quartic, uk, uj) * quartic_eta(uk, uj, t_k, t_j);
      },
      t_k, t_j, order);
  return -corr / (t_k * t_j);
}

double quartic_kappa_coefficient(int order) {
  return kappa_closed_form_quartic(1.0, 1.0, order) / 4.0;
}

void ConductivityQuery::validate() const {
  if (!(t_k > 0.0) || !(t_j > 0.0))
    throw std::invalid_argument("conductivity needs positive temperatures");
  if (tau_max < 10.0)
    throw std::invalid_argument(
        "tau_max must be >= 10; the correlation tail beyond is negligible only "
        "past several mixing times");
  if (method == ConductivityMethod::ClosedFormQuartic &&
      model != PotentialKind::Quartic)
    throw std::invalid_argument("closed-form conductivity exists for the quartic model only");
  if (replicas < 2) throw std::invalid_argument("conductivity needs replicas >= 2");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
}

EstimatorResult conductivity(const ConductivityQuery& query) {
  query.validate();
  if (query.method == ConductivityMethod::ClosedFormQuartic) {
    EstimatorResult r;
    r.mean = kappa_closed_form_quartic(query.t_k, query.t_j);
    r.standard_error = 0.0;
    r.n_samples = 0;
    r.batch_size = 0;
    return r;
  }

  const PotentialModel model = query.model == PotentialKind::Quartic
                                   ? PotentialModel::quartic()
                                   : PotentialModel::quadratic();
  Eigen::VectorXd temps(2);
  temps << query.t_k, query.t_j;
  const TemperatureProfile profile = make_profile(temps);
  const auto n_steps =
      static_cast<std::int64_t>(std::llround(query.tau_max / query.dt));

  std::vector<double> samples(static_cast<std::size_t>(query.replicas));
  parallel_for_replicas(query.replicas, query.threads, [&](int r) {
    const NoiseStream rng(query.seed, static_cast<std::uint32_t>(r));
    PhaseState u = sample_mu0(profile, rng);
    const double j0 = resonant_flow(model, u[0], u[1]);
    double integral = 0.5 * j0;  // trapezoid left endpoint
    for (std::int64_t s = 0; s < n_steps; ++s) {
      u = step_ou_exact(u, query.dt, profile, rng,
                        static_cast<std::uint32_t>(s));
      const double js = resonant_flow(model, u[0], u[1]);
      integral += (s + 1 == n_steps) ? 0.5 * js : js;
    }
    samples[static_cast<std::size_t>(r)] = j0 * integral * query.dt;
  });

  EstimatorResult r = mean_of_iid(samples);
  r.mean /= query.t_k * query.t_j;
  r.standard_error /= query.t_k * query.t_j;
  return r;
}

double generator_apply(const std::function<double(const PhaseState&)>& f,
                       const PhaseState& u, double t_k, double t_j,
                       double fd_scale) {
  if (u.size() != 2)
    throw std::invalid_argument("generator_apply acts on two-node states");
  const double temps[2] = {t_k, t_j};
  const double f0 = f(u);
  double acc = 0.0;
  for (int l = 0; l < 2; ++l) {
    const double h = fd_scale * (std::abs(u[l]) + 1.0);
    for (int part = 0; part < 2; ++part) {  // 0: real, 1: imag
      PhaseState up = u, um = u;
      const Complex delta = part == 0 ? Complex(h, 0.0) : Complex(0.0, h);
      up[l] += delta;
      um[l] -= delta;
      const double fp = f(up);
      const double fm = f(um);
      const double d1 = (fp - fm) / (2.0 * h);
      const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
      const double coord = part == 0 ? u[l].real() : u[l].imag();
      acc += 0.5 * temps[l] * d2 - 0.5 * coord * d1;
    }
  }
  return acc;
}

EstimatorResult solve_eta(Complex u_k, Complex u_j, const PotentialModel& model,
                          double t_k, double t_j, double tau_max, int replicas,
                          std::uint64_t seed, double dt, int threads) {
  if (replicas < 2) throw std::invalid_argument("solve_eta needs replicas >= 2");
  Eigen::VectorXd temps(2);
  temps << t_k, t_j;
  const TemperatureProfile profile = make_profile(temps);
  const auto n_steps = static_cast<std::int64_t>(std::llround(tau_max / dt));

  std::vector<double> samples(static_cast<std::size_t>(replicas));
  parallel_for_replicas(replicas, threads, [&](int r) {
    const NoiseStream rng(seed, static_cast<std::uint32_t>(r));
    PhaseState u(2);
    u << u_k, u_j;
    double integral = 0.5 * resonant_flow(model, u[0], u[1]);
    for (std::int64_t s = 0; s < n_steps; ++s) {
      u = step_ou_exact(u, dt, profile, rng, static_cast<std::uint32_t>(s));
      const double js = resonant_flow(model, u[0], u[1]);
      integral += (s + 1 == n_steps) ? 0.5 * js : js;
    }
    samples[static_cast<std::size_t>(r)] = -integral * dt;
  });
  return mean_of_iid(samples);
}

namespace {

double trapezoid_lag_integral(const std::vector<double>& c, double lag_dt) {
  double s = 0.5 * (c.front() + c.back());
  for (std::size_t i = 1; i + 1 < c.size(); ++i) s += c[i];
  return s * lag_dt;
}

struct EdgeSeriesSpec {
  // Directed edges with signs; the observable is the signed sum of flows.
  std::vector<std::pair<DirectedEdge, double>> terms;
};

// One replica of bin-averaged flow series for each requested observable.
std::vector<std::vector<double>> gk_binned_series(
    const GreenKuboParams& params, const LatticeSpec& lattice,
    const PotentialModel& model, const TemperatureProfile& profile,
    const std::vector<EdgeSeriesSpec>& specs, std::uint32_t trajectory) {
  SimParams sim;
  sim.epsilon = params.epsilon;
  sim.lambda = params.lambda;
  sim.dt = params.step();
  sim.horizon = params.burn_in + params.traj_length;
  sim.burn_in = params.burn_in;
  sim.frame = Frame::Rotating;
  sim.seed = params.seed;
  sim.validate();

  const auto bin_steps =
      std::max<std::int64_t>(1, std::llround(params.lag_dt / sim.dt));
  const auto burn_steps =
      static_cast<std::int64_t>(std::llround(sim.burn_in / sim.dt));
  const auto total_steps =
      static_cast<std::int64_t>(std::llround(sim.horizon / sim.dt));
  const auto n_bins = (total_steps - burn_steps) / bin_steps;

  const NoiseStream rng(params.seed, trajectory);
  PhaseState a = sample_mu0(profile, rng);

  std::vector<std::vector<double>> series(
      specs.size(), std::vector<double>(static_cast<std::size_t>(n_bins), 0.0));
  std::vector<double> bin_acc(specs.size(), 0.0);
  std::int64_t in_bin = 0;
  std::int64_t bin_index = 0;

  for (std::int64_t s = 0; s < total_steps; ++s) {
    const double tau = s * sim.dt;
    a = step_full_rotating(a, tau, sim, lattice, model, profile, rng,
                           static_cast<std::uint32_t>(s));
    if (s < burn_steps) continue;
    if (bin_index >= n_bins) break;
    const PhaseState u = to_lab_frame(a, tau + sim.dt, sim.epsilon);
    for (std::size_t o = 0; o < specs.size(); ++o) {
      double v = 0.0;
      for (const auto& [edge, w] : specs[o].terms)
        v += w * energy_flow(u, lattice, model, edge.first, edge.second);
      bin_acc[o] += v;
    }
    if (++in_bin == bin_steps) {
      for (std::size_t o = 0; o < specs.size(); ++o) {
        series[o][static_cast<std::size_t>(bin_index)] =
            bin_acc[o] / static_cast<double>(bin_steps);
        bin_acc[o] = 0.0;
      }
      in_bin = 0;
      ++bin_index;
    }
  }
  return series;
}

std::vector<EstimatorResult> gk_run(
    const GreenKuboParams& params, const LatticeSpec& lattice,
    const PotentialModel& model, const TemperatureProfile& profile,
    const std::vector<EdgeSeriesSpec>& specs,
    const std::vector<std::pair<int, int>>& correlate) {
  if (params.replicas < 2)
    throw std::invalid_argument("green_kubo needs replicas >= 2");
  const double dt = params.step();
  const auto bin_steps = std::max<std::int64_t>(1, std::llround(params.lag_dt / dt));
  const double lag_dt = static_cast<double>(bin_steps) * dt;
  const int max_lag = static_cast<int>(std::llround(params.tau_max / lag_dt));

  std::vector<std::vector<double>> y(
      correlate.size(), std::vector<double>(static_cast<std::size_t>(params.replicas)));
  parallel_for_replicas(params.replicas, params.threads, [&](int r) {
    const auto series = gk_binned_series(params, lattice, model, profile, specs,
                                         static_cast<std::uint32_t>(r));
    for (std::size_t p = 0; p < correlate.size(); ++p) {
      const auto& [ia, ib] = correlate[p];
      const auto c = centered_cross_correlation(
          series[static_cast<std::size_t>(ia)],
          series[static_cast<std::size_t>(ib)], max_lag);
      y[p][static_cast<std::size_t>(r)] = trapezoid_lag_integral(c, lag_dt);
    }
  });

  std::vector<EstimatorResult> out;
  out.reserve(correlate.size());
  for (const auto& samples : y) out.push_back(mean_of_iid(samples));
  return out;
}

}  // namespace

std::vector<EstimatorResult> green_kubo_correlations(
    const std::vector<std::pair<DirectedEdge, DirectedEdge>>& pairs,
    const GreenKuboParams& params, const LatticeSpec& lattice,
    const PotentialModel& model, const TemperatureProfile& profile) {
  // Collect one series per distinct directed edge.
  std::map<DirectedEdge, int> index;
  std::vector<EdgeSeriesSpec> specs;
  auto intern = [&](DirectedEdge e) {
    if (!lattice.adjacent(e.first, e.second))
      throw std::invalid_argument("green_kubo: edge nodes are not nearest neighbours");
    auto it = index.find(e);
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(specs.size());
    specs.push_back(EdgeSeriesSpec{{{e, 1.0}}});
    index.emplace(e, id);
    return id;
  };
  std::vector<std::pair<int, int>> correlate;
  correlate.reserve(pairs.size());
  for (const auto& [ab, ml] : pairs) correlate.emplace_back(intern(ab), intern(ml));
  return gk_run(params, lattice, model, profile, specs, correlate);
}

EstimatorResult green_kubo_correlation(int k, int j, int m, int l,
                                       const GreenKuboParams& params,
                                       const LatticeSpec& lattice,
                                       const PotentialModel& model,
                                       const TemperatureProfile& profile) {
  return green_kubo_correlations({{{k, j}, {m, l}}}, params, lattice, model,
                                 profile)[0];
}

EstimatorResult green_kubo_total(int n_edges, double t_hat,
                                 const GreenKuboParams& params,
                                 const PotentialModel& model) {
  const LatticeSpec lattice = build_chain(n_edges);
  const TemperatureProfile profile =
      uniform_temperature_profile(t_hat, lattice.size());
  EdgeSeriesSpec total;
  for (int j = 0; j < n_edges; ++j)
    total.terms.push_back({{j, j + 1}, 1.0});
  auto res = gk_run(params, lattice, model, profile, {total}, {{0, 0}});
  EstimatorResult r = res[0];
  const double scale = 1.0 / (t_hat * t_hat * n_edges);
  r.mean *= scale;
  r.standard_error *= scale;
  return r;
}

std::vector<FourierRow> fourier_sweep(const std::vector<int>& n_list,
                                      double lambda, double epsilon, double t0,
                                      double t1, const PotentialModel& model,
                                      const FourierParams& fp) {
  std::vector<FourierRow> rows;
  const bool quartic = model.kind == PotentialKind::Quartic;
  const double coeff = quartic ? quartic_kappa_coefficient() : 0.0;
  for (int n : n_list) {
    const LatticeSpec lattice = build_chain(n);
    const TemperatureProfile profile = linear_temperature_profile(t0, t1, n);
    StationaryRunSpec spec;
    spec.params.epsilon = epsilon;
    spec.params.lambda = lambda;
    spec.params.dt = fp.dt > 0.0 ? fp.dt : epsilon / 8.0;
    spec.params.horizon = fp.horizon;
    spec.params.burn_in = fp.burn_in;
    spec.params.frame = Frame::Rotating;
    spec.params.seed = fp.seed;
    spec.replicas = fp.replicas;
    spec.threads = fp.threads;
    spec.record_stride = fp.record_stride;
    spec.batch_time = fp.batch_time;

    std::vector<int> lo_nodes;
    std::vector<Observer> obs;
    for (double x : fp.xs) {
      int lo = static_cast<int>(std::floor(x * n));
      lo = std::clamp(lo, 0, n - 1);
      lo_nodes.push_back(lo);
      obs.push_back({"flow_x",
                     [&lattice, &model, lo](const PhaseState& u, double) {
                       return energy_flow(u, lattice, model, lo + 1, lo);
                     }});
    }
    const auto results =
        stationary_averages(spec, lattice, model, profile, obs);
    for (std::size_t i = 0; i < fp.xs.size(); ++i) {
      FourierRow row;
      row.n_edges = n;
      row.x = fp.xs[i];
      row.edge_lo = lo_nodes[i];
      row.scaled_flow = results[i];
      const double scale = static_cast<double>(n) / lambda;
      row.scaled_flow.mean *= scale;
      row.scaled_flow.standard_error *= scale;
      if (quartic) {
        const double tx = t1 * fp.xs[i] + t0 * (1.0 - fp.xs[i]);
        row.predicted = coeff * (2.0 * tx) * (2.0 * tx) * (t1 - t0);
      } else {
        row.predicted = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::pair<PhaseState, double> low_temperature_rescale(const PhaseState& state,
                                                      double delta, int degree) {
  if (degree < 3)
    throw std::invalid_argument("low_temperature_rescale needs degree >= 3");
  if (!(delta > 0.0))
    throw std::invalid_argument("low_temperature_rescale needs delta > 0");
  return {std::sqrt(delta) * state,
          std::pow(delta, 0.5 * (degree - 2))};
}

}  // namespace reslat
