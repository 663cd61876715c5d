#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "reslat/harness.hpp"

namespace reslat {

namespace {

struct CellLayout {
  std::vector<std::string> names;
  int n_nodes = 0;
  std::vector<std::pair<int, int>> pairs;

  std::size_t size() const { return names.size(); }

  void eval(const Eigen::VectorXd& actions_vec, double* out) const {
    std::size_t i = 0;
    for (int j = 0; j < n_nodes; ++j) out[i++] = actions_vec[j];
    for (int j = 0; j < n_nodes; ++j) out[i++] = actions_vec[j] * actions_vec[j];
    for (int j = 0; j < n_nodes; ++j) out[i++] = std::exp(-actions_vec[j]);
    for (const auto& [a, b] : pairs) out[i++] = actions_vec[a] * actions_vec[b];
  }
};

CellLayout make_cell_layout(const LatticeSpec& lattice) {
  CellLayout c;
  c.n_nodes = lattice.size();
  c.pairs = lattice.edges;
  for (int j = 0; j < c.n_nodes; ++j)
    c.names.push_back("I[" + std::to_string(j) + "]");
  for (int j = 0; j < c.n_nodes; ++j)
    c.names.push_back("I^2[" + std::to_string(j) + "]");
  for (int j = 0; j < c.n_nodes; ++j)
    c.names.push_back("exp(-I)[" + std::to_string(j) + "]");
  for (const auto& [a, b] : c.pairs)
    c.names.push_back("I[" + std::to_string(a) + "]*I[" + std::to_string(b) + "]");
  return c;
}

std::vector<std::int64_t> checkpoint_steps(const std::vector<double>& taus,
                                           double dt) {
  std::vector<std::int64_t> steps;
  steps.reserve(taus.size());
  for (double tau : taus) {
    const auto s = std::llround(tau / dt);
    if (std::abs(s * dt - tau) > 1e-9)
      throw std::invalid_argument("checkpoints must be multiples of the step");
    steps.push_back(s);
  }
  return steps;
}

// Per-replica cell values at each checkpoint; rows indexed by replica,
// columns by (checkpoint, cell).
Eigen::MatrixXd run_checkpoint_ensemble(
    bool effective_side, double epsilon, double lambda, double dt,
    const std::vector<double>& checkpoints, const LatticeSpec& lattice,
    const PotentialModel& model, const TemperatureProfile& profile,
    const PhaseState& initial, const CellLayout& layout, int replicas,
    std::uint64_t seed, std::uint32_t traj_offset, int threads) {
  const auto ckpt_steps = checkpoint_steps(checkpoints, dt);
  const std::int64_t n_steps =
      *std::max_element(ckpt_steps.begin(), ckpt_steps.end());
  const std::size_t n_cols = checkpoints.size() * layout.size();

  SimParams params;
  params.epsilon = epsilon;
  params.lambda = lambda;
  params.dt = dt;
  params.horizon = std::max(1e-9, n_steps * dt);
  params.frame = effective_side ? Frame::Effective : Frame::Rotating;
  params.seed = seed;
  params.validate();

  Eigen::MatrixXd values(replicas, static_cast<Eigen::Index>(n_cols));
  parallel_for_replicas(replicas, threads, [&](int r) {
    const NoiseStream rng(seed, traj_offset + static_cast<std::uint32_t>(r));
    PhaseState state = initial;
    std::vector<double> cells(layout.size());
    std::size_t next_ckpt = 0;
    for (std::int64_t s = 0; s <= n_steps; ++s) {
      while (next_ckpt < ckpt_steps.size() && ckpt_steps[next_ckpt] == s) {
        layout.eval(actions(state), cells.data());
        for (std::size_t c = 0; c < layout.size(); ++c)
          values(r, static_cast<Eigen::Index>(next_ckpt * layout.size() + c)) =
              cells[c];
        ++next_ckpt;
      }
      if (s == n_steps) break;
      const auto step_index = static_cast<std::uint32_t>(s);
      if (effective_side)
        state = step_effective(state, params, lattice, model, profile, rng,
                               step_index);
      else
        state = step_full_rotating(state, s * dt, params, lattice, model,
                                   profile, rng, step_index);
    }
  });
  return values;
}

EstimatorResult column_stats(const Eigen::MatrixXd& values, Eigen::Index col) {
  const Eigen::Index n = values.rows();
  const double mean = values.col(col).mean();
  const double var =
      (values.col(col).array() - mean).square().sum() / static_cast<double>(n - 1);
  EstimatorResult r;
  r.mean = mean;
  r.standard_error = std::sqrt(var / static_cast<double>(n));
  r.n_samples = n;
  r.batch_size = 1;
  return r;
}

}  // namespace

std::vector<AveragingCell> averaging_cells(const AveragingOptions& opt) {
  const LatticeSpec lattice = build_chain(opt.n_edges);
  const TemperatureProfile profile =
      opt.profile.size() == lattice.size()
          ? opt.profile
          : linear_temperature_profile(1.0, 2.0, opt.n_edges);
  PhaseState initial = opt.initial;
  if (initial.size() != lattice.size())
    initial = PhaseState::Constant(lattice.size(), Complex(1.0, 0.0));
  const CellLayout layout = make_cell_layout(lattice);

  std::vector<double> checkpoints = opt.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());

  // Effective-side trajectories use a disjoint index range so the two sides
  // are statistically independent.
  const Eigen::MatrixXd eff = run_checkpoint_ensemble(
      true, 1.0, opt.lambda, opt.dt_eff, checkpoints, lattice, opt.model,
      profile, initial, layout, opt.replicas, opt.seed, 0x80000000u,
      opt.threads);

  std::vector<AveragingCell> out;
  for (double epsilon : opt.epsilons) {
    const double dt = opt.dt_full > 0.0 ? opt.dt_full : epsilon / 8.0;
    const Eigen::MatrixXd full = run_checkpoint_ensemble(
        false, epsilon, opt.lambda, dt, checkpoints, lattice, opt.model,
        profile, initial, layout, opt.replicas, opt.seed, 0u, opt.threads);
    for (std::size_t t = 0; t < checkpoints.size(); ++t)
      for (std::size_t c = 0; c < layout.size(); ++c) {
        const auto col = static_cast<Eigen::Index>(t * layout.size() + c);
        AveragingCell cell;
        cell.epsilon = epsilon;
        cell.tau = checkpoints[t];
        cell.observable = layout.names[c];
        cell.full = column_stats(full, col);
        cell.effective = column_stats(eff, col);
        out.push_back(std::move(cell));
      }
  }
  return out;
}

FlowResult flow_vs_lambda(const FlowOptions& opt) {
  const LatticeSpec lattice = build_chain(1);
  Eigen::VectorXd temps(2);
  temps << opt.t_k, opt.t_j;
  const TemperatureProfile profile = make_profile(temps);

  auto run_point = [&](double lambda, const TemperatureProfile& prof) {
    StationaryRunSpec spec;
    spec.params.epsilon = opt.epsilon;
    spec.params.lambda = lambda;
    spec.params.dt = opt.dt > 0.0 ? opt.dt : opt.epsilon / 8.0;
    spec.params.horizon = opt.horizon;
    spec.params.burn_in = opt.burn_in;
    spec.params.frame = Frame::Rotating;
    spec.params.seed = opt.seed;
    spec.replicas = opt.replicas;
    spec.threads = opt.threads;
    spec.record_stride = opt.record_stride;
    spec.batch_time = opt.batch_time;
    std::vector<Observer> obs{
        {"flow",
         [&](const PhaseState& u, double) {
           return energy_flow(u, lattice, opt.model, 0, 1);
         }},
        {"p2_k", [](const PhaseState& u, double) { return u[0].real() * u[0].real(); }},
        {"p2_j", [](const PhaseState& u, double) { return u[1].real() * u[1].real(); }}};
    return stationary_averages(spec, lattice, opt.model, prof, obs);
  };

  FlowResult result;
  double sxy = 0.0, sxx = 0.0, var_num = 0.0;
  for (double lambda : opt.lambdas) {
    const auto res = run_point(lambda, profile);
    FlowPoint p;
    p.lambda = lambda;
    p.flow = res[0];
    p.p2_k = res[1];
    p.p2_j = res[2];
    result.points.push_back(p);
    sxy += lambda * p.flow.mean;
    sxx += lambda * lambda;
    var_num += lambda * lambda * p.flow.standard_error * p.flow.standard_error;
  }
  result.slope = sxy / sxx;
  result.slope_se = std::sqrt(var_num) / sxx;
  if (opt.model.kind == PotentialKind::Quartic)
    result.kappa_ref = kappa_closed_form_quartic(opt.t_k, opt.t_j);

  if (opt.include_uniform) {
    const double t_flat = 0.5 * (opt.t_k + opt.t_j);
    const TemperatureProfile flat = uniform_temperature_profile(t_flat, 2);
    const double lambda_mid = opt.lambdas[opt.lambdas.size() / 2];
    result.uniform_flow = run_point(lambda_mid, flat)[0];
  }
  return result;
}

StationaryMeasureResult stationary_measure(const StationaryMeasureOptions& opt) {
  const LatticeSpec lattice = build_chain(opt.n_edges);
  const TemperatureProfile profile =
      linear_temperature_profile(opt.t0, opt.t1, opt.n_edges);

  std::vector<Observer> obs;
  for (int j = 0; j < lattice.size(); ++j)
    obs.push_back({"I[" + std::to_string(j) + "]",
                   [j](const PhaseState& u, double) { return action(u[j]); }});
  for (int j = 0; j < lattice.size(); ++j)
    obs.push_back({"I^2[" + std::to_string(j) + "]", [j](const PhaseState& u, double) {
                     const double a = action(u[j]);
                     return a * a;
                   }});
  for (const auto& [a, b] : lattice.edges)
    obs.push_back({"J[" + std::to_string(a) + "->" + std::to_string(b) + "]",
                   [&lattice, &opt, a = a, b = b](const PhaseState& u, double) {
                     return energy_flow(u, lattice, opt.model, a, b);
                   }});

  auto collect = [&](Frame frame, double epsilon, double dt) {
    StationaryRunSpec spec;
    spec.params.epsilon = epsilon;
    spec.params.lambda = opt.lambda;
    spec.params.dt = dt;
    spec.params.horizon = opt.horizon;
    spec.params.burn_in = opt.burn_in;
    spec.params.frame = frame;
    spec.params.seed = opt.seed;
    spec.replicas = opt.replicas;
    spec.threads = opt.threads;
    spec.record_stride = opt.record_stride;
    spec.batch_time = opt.batch_time;

    StationaryMoments m;
    const auto base = stationary_averages(spec, lattice, opt.model, profile, obs);

    StationaryRunSpec doubled = spec;
    doubled.params.burn_in = 2.0 * opt.burn_in;
    const auto shifted =
        stationary_averages(doubled, lattice, opt.model, profile, obs);
    double worst = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
      const double se = std::sqrt(
          base[i].standard_error * base[i].standard_error +
          shifted[i].standard_error * shifted[i].standard_error);
      if (se > 0.0)
        worst = std::max(worst, std::abs(base[i].mean - shifted[i].mean) / se);
    }
    m.burnin_shift = worst;

    const int n = lattice.size();
    for (int j = 0; j < n; ++j) m.action_mean.push_back(base[j]);
    for (int j = 0; j < n; ++j) m.action_sq.push_back(base[n + j]);
    for (std::size_t e = 0; e < lattice.edges.size(); ++e)
      m.edge_flow.push_back(base[2 * n + e]);

    // Autocorrelation proxy from one longer recording of I_0.
    SimParams single = spec.params;
    NoiseStream init_stream(single.seed, 0);
    const PhaseState u0 = sample_mu0(profile, init_stream);
    std::vector<Observer> probe{
        {"I0", [](const PhaseState& u, double) { return action(u[0]); }}};
    const auto rec = simulate(u0, single, lattice, opt.model, profile, probe, 0,
                              spec.record_stride);
    std::vector<double> series(static_cast<std::size_t>(rec.values.rows()));
    for (Eigen::Index i = 0; i < rec.values.rows(); ++i)
      series[static_cast<std::size_t>(i)] = rec.values(i, 0);
    m.autocorr_time =
        integrated_autocorr_time(series, single.dt * spec.record_stride);
    return m;
  };

  StationaryMeasureResult result;
  for (double epsilon : opt.epsilons) {
    const double dt = opt.dt_full > 0.0 ? opt.dt_full : epsilon / 8.0;
    result.full.emplace_back(epsilon, collect(Frame::Rotating, epsilon, dt));
  }
  result.effective = collect(Frame::Effective, 1.0, opt.dt_eff);
  return result;
}

GreenKuboCaseResult green_kubo_case(const GreenKuboCaseOptions& opt) {
  if (opt.n_edges < 4)
    throw std::invalid_argument("green_kubo_case expects a chain with >= 4 edges");
  const LatticeSpec lattice = build_chain(opt.n_edges);
  const TemperatureProfile profile =
      uniform_temperature_profile(opt.t_hat, lattice.size());

  const std::vector<std::pair<DirectedEdge, DirectedEdge>> pairs = {
      {{1, 2}, {1, 2}},                      // same edge
      {{1, 2}, {2, 1}},                      // reversed orientation
      {{0, 1}, {opt.n_edges - 1, opt.n_edges}},  // disjoint node sets
  };
  const auto corr =
      green_kubo_correlations(pairs, opt.params, lattice, opt.model, profile);

  GreenKuboCaseResult result;
  result.same_edge = corr[0];
  result.reversed = corr[1];
  result.disjoint = corr[2];
  result.total_large =
      green_kubo_total(opt.n_edges, opt.t_hat, opt.params, opt.model);
  GreenKuboParams small = opt.params;
  small.seed = opt.params.seed + 1;  // distinct trajectories for the small chain
  result.total_small =
      green_kubo_total(opt.n_edges_small, opt.t_hat, small, opt.model);
  if (opt.model.kind == PotentialKind::Quartic)
    result.kappa_ref = kappa_closed_form_quartic(opt.t_hat, opt.t_hat);
  return result;
}

}  // namespace reslat
