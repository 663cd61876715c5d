#include <sstream>
#include <stdexcept>

#include "reslat/harness.hpp"

namespace reslat {

namespace {

std::string csv_row(const std::vector<std::string>& cells) {
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) row += ',';
    row += cells[i];
  }
  row += '\n';
  return row;
}

std::string fmt(double x) { return format_double(x); }

Json estimator_json(const EstimatorResult& r) {
  return Json{{"mean", r.mean},
              {"se", r.standard_error},
              {"n", r.n_samples},
              {"batch", r.batch_size}};
}

Json estimator_json(const std::string& name, const EstimatorResult& r) {
  Json j = estimator_json(r);
  j["name"] = name;
  return j;
}

}  // namespace

Report run_simulate(const ExperimentConfig& cfg) {
  Report report;
  report.name = "simulate";
  for (int r = 0; r < cfg.replicas; ++r) {
    std::string csv = "tau,node,re_u,im_u\n";
    auto sink = [&csv](double tau, const PhaseState& u) {
      for (Eigen::Index j = 0; j < u.size(); ++j)
        csv += csv_row({fmt(tau), std::to_string(j), fmt(u[j].real()),
                        fmt(u[j].imag())});
    };
    PhaseState initial;
    const auto traj = static_cast<std::uint32_t>(r);
    NoiseStream init_stream(cfg.sim.seed, traj);
    initial = sample_mu0(cfg.profile, init_stream);
    simulate(initial, cfg.sim, cfg.lattice, cfg.model, cfg.profile, {}, traj,
             cfg.record_stride, sink);
    report.files.emplace_back("trajectory_" + std::to_string(r) + ".csv", csv);
  }
  report.summary = Json{{"experiment", "simulate"},
                        {"replicas", cfg.replicas},
                        {"config", cfg.raw}};
  return report;
}

Report run_averaging_sweep(const ExperimentConfig& cfg) {
  const Json sweep = cfg.raw.value("sweep", Json::object());
  AveragingOptions opt;
  opt.epsilons = sweep.value("epsilons", std::vector<double>{0.1, 0.05, 0.025});
  opt.checkpoints = sweep.value("checkpoints", std::vector<double>{0.5, 1.0, 2.0});
  opt.lambda = cfg.sim.lambda;
  opt.n_edges = cfg.lattice.size() - 1;
  opt.model = cfg.model;
  opt.profile = cfg.profile;
  opt.replicas = cfg.replicas;
  opt.dt_eff = sweep.value("dt_eff", 0.005);
  opt.seed = cfg.sim.seed;
  opt.threads = cfg.threads;
  const Json init = cfg.raw.value("initial", Json::object());
  if (init.value("kind", std::string("constant")) == "constant")
    opt.initial = PhaseState::Constant(
        cfg.lattice.size(),
        Complex(init.value("re", 1.0), init.value("im", 0.0)));

  const auto cells = averaging_cells(opt);

  std::string csv =
      "epsilon,tau,observable,mean_full,se_full,mean_eff,se_eff,abs_diff,"
      "combined_se\n";
  for (const auto& c : cells)
    csv += csv_row({fmt(c.epsilon), fmt(c.tau), c.observable, fmt(c.full.mean),
                    fmt(c.full.standard_error), fmt(c.effective.mean),
                    fmt(c.effective.standard_error), fmt(c.abs_diff()),
                    fmt(c.combined_se())});

  // Aggregate discrepancy per (epsilon, tau).
  Json agg = Json::array();
  for (double eps : opt.epsilons)
    for (double tau : opt.checkpoints) {
      double d = 0.0, se = 0.0;
      int n = 0;
      for (const auto& c : cells)
        if (c.epsilon == eps && c.tau == tau) {
          d += c.abs_diff();
          se += c.combined_se();
          ++n;
        }
      agg.push_back(Json{{"epsilon", eps},
                         {"tau", tau},
                         {"mean_abs_diff", d / n},
                         {"mean_combined_se", se / n}});
    }

  Report report;
  report.name = "averaging";
  report.files.emplace_back("averaging_cells.csv", csv);
  report.summary = Json{{"experiment", "averaging-sweep"},
                        {"aggregate", agg},
                        {"config", cfg.raw}};
  return report;
}

Report run_stationary_measure(const ExperimentConfig& cfg) {
  const Json sweep = cfg.raw.value("sweep", Json::object());
  StationaryMeasureOptions opt;
  opt.epsilons = sweep.value("epsilons", std::vector<double>{0.1, 0.05, 0.025});
  opt.lambda = cfg.sim.lambda;
  opt.n_edges = cfg.lattice.size() - 1;
  opt.model = cfg.model;
  opt.t0 = cfg.profile[0];
  opt.t1 = cfg.profile[cfg.profile.size() - 1];
  opt.dt_eff = sweep.value("dt_eff", 0.005);
  opt.horizon = cfg.sim.horizon;
  opt.burn_in = cfg.sim.burn_in;
  opt.replicas = cfg.replicas;
  opt.threads = cfg.threads;
  opt.record_stride = cfg.record_stride;
  opt.batch_time = cfg.batch_time;
  opt.seed = cfg.sim.seed;

  const auto result = stationary_measure(opt);

  std::string csv = "epsilon,observable,mean,se\n";
  Json diag = Json::array();
  auto emit = [&](const std::string& label, const StationaryMoments& m) {
    for (std::size_t j = 0; j < m.action_mean.size(); ++j)
      csv += csv_row({label, "I[" + std::to_string(j) + "]",
                      fmt(m.action_mean[j].mean),
                      fmt(m.action_mean[j].standard_error)});
    for (std::size_t j = 0; j < m.action_sq.size(); ++j)
      csv += csv_row({label, "I^2[" + std::to_string(j) + "]",
                      fmt(m.action_sq[j].mean),
                      fmt(m.action_sq[j].standard_error)});
    for (std::size_t e = 0; e < m.edge_flow.size(); ++e)
      csv += csv_row({label, "J[edge" + std::to_string(e) + "]",
                      fmt(m.edge_flow[e].mean),
                      fmt(m.edge_flow[e].standard_error)});
    diag.push_back(Json{{"run", label},
                        {"autocorr_time", m.autocorr_time},
                        {"burnin_shift_se", m.burnin_shift}});
  };
  for (const auto& [eps, m] : result.full) emit(fmt(eps), m);
  emit("effective", result.effective);

  bool burnin_ok = true;
  for (const auto& [eps, m] : result.full)
    burnin_ok = burnin_ok && m.burnin_shift <= 1.0;

  Report report;
  report.name = "stationary";
  report.files.emplace_back("stationary_moments.csv", csv);
  report.summary = Json{{"experiment", "stationary"},
                        {"diagnostics", diag},
                        {"burnin_ok", burnin_ok},
                        {"config", cfg.raw}};
  return report;
}

Report run_flow_vs_lambda(const ExperimentConfig& cfg) {
  if (cfg.lattice.size() != 2)
    throw std::invalid_argument("flow experiment runs on a single edge (chain_length 1)");
  const Json sweep = cfg.raw.value("sweep", Json::object());
  FlowOptions opt;
  opt.lambdas = sweep.value("lambdas", std::vector<double>{0.05, 0.1, 0.2});
  opt.epsilon = cfg.sim.epsilon;
  opt.t_k = cfg.profile[0];
  opt.t_j = cfg.profile[1];
  opt.model = cfg.model;
  opt.horizon = cfg.sim.horizon;
  opt.burn_in = cfg.sim.burn_in;
  opt.replicas = cfg.replicas;
  opt.threads = cfg.threads;
  opt.record_stride = cfg.record_stride;
  opt.batch_time = cfg.batch_time;
  opt.seed = cfg.sim.seed;

  const FlowResult result = flow_vs_lambda(opt);

  std::string csv =
      "lambda,flow,flow_se,flow_over_lambda,p2_k,p2_k_se,p2_j,p2_j_se,"
      "balance_k,balance_k_tol,balance_j,balance_j_tol\n";
  for (const auto& p : result.points) {
    const double half = 0.5 * p.lambda;
    const double bal_k = p.p2_k.mean - (opt.t_k - half * p.flow.mean);
    const double bal_j = p.p2_j.mean - (opt.t_j + half * p.flow.mean);
    const double tol_k = 3.0 * std::sqrt(p.p2_k.standard_error * p.p2_k.standard_error +
                                         half * half * p.flow.standard_error *
                                             p.flow.standard_error);
    const double tol_j = 3.0 * std::sqrt(p.p2_j.standard_error * p.p2_j.standard_error +
                                         half * half * p.flow.standard_error *
                                             p.flow.standard_error);
    csv += csv_row({fmt(p.lambda), fmt(p.flow.mean), fmt(p.flow.standard_error),
                    fmt(p.flow.mean / p.lambda), fmt(p.p2_k.mean),
                    fmt(p.p2_k.standard_error), fmt(p.p2_j.mean),
                    fmt(p.p2_j.standard_error), fmt(bal_k), fmt(tol_k),
                    fmt(bal_j), fmt(tol_j)});
  }

  Report report;
  report.name = "flow";
  report.files.emplace_back("flow_vs_lambda.csv", csv);
  report.summary =
      Json{{"experiment", "flow"},
           {"slope", result.slope},
           {"slope_se", result.slope_se},
           {"kappa_ref", result.kappa_ref},
           {"kappa_times_dT", result.kappa_ref * (opt.t_k - opt.t_j)},
           {"uniform_flow", estimator_json(result.uniform_flow)},
           {"config", cfg.raw}};
  return report;
}

Report run_conductivity(const ExperimentConfig& cfg) {
  const Json opts = cfg.raw.value("conductivity", Json::object());
  const auto pairs = opts.value(
      "pairs", std::vector<std::vector<double>>{{1, 1}, {1, 2}, {2, 3}});
  ConductivityQuery base;
  base.model = cfg.model.kind;
  base.tau_max = opts.value("tau_max", 20.0);
  base.replicas = opts.value("replicas", 200000);
  base.dt = opts.value("dt", 0.05);
  base.seed = cfg.sim.seed;
  base.threads = cfg.threads;

  std::string csv = "t_k,t_j,method,mean,se,n\n";
  Json rows = Json::array();
  for (const auto& pair : pairs) {
    if (pair.size() != 2)
      throw std::invalid_argument("conductivity pairs must be [t_k, t_j]");
    ConductivityQuery q = base;
    q.t_k = pair[0];
    q.t_j = pair[1];
    if (cfg.model.kind == PotentialKind::Quartic) {
      q.method = ConductivityMethod::ClosedFormQuartic;
      const auto r = conductivity(q);
      csv += csv_row({fmt(q.t_k), fmt(q.t_j), "closed_form_quartic",
                      fmt(r.mean), fmt(r.standard_error),
                      std::to_string(r.n_samples)});
      rows.push_back(estimator_json("closed_form(" + fmt(q.t_k) + "," +
                                        fmt(q.t_j) + ")",
                                    r));
    }
    q.method = ConductivityMethod::OuCorrelation;
    const auto r = conductivity(q);
    csv += csv_row({fmt(q.t_k), fmt(q.t_j), "ou_correlation", fmt(r.mean),
                    fmt(r.standard_error), std::to_string(r.n_samples)});
    rows.push_back(estimator_json(
        "ou_correlation(" + fmt(q.t_k) + "," + fmt(q.t_j) + ")", r));
  }

  Report report;
  report.name = "conductivity";
  report.files.emplace_back("conductivity.csv", csv);
  report.summary = Json{{"experiment", "conductivity"},
                        {"results", rows},
                        {"config", cfg.raw}};
  if (cfg.model.kind == PotentialKind::Quartic)
    report.summary["quartic_coefficient"] = quartic_kappa_coefficient();
  return report;
}

Report run_green_kubo(const ExperimentConfig& cfg) {
  const Json opts = cfg.raw.value("greenkubo", Json::object());
  for (int j = 1; j < cfg.profile.size(); ++j)
    if (cfg.profile[j] != cfg.profile[0])
      throw std::invalid_argument("green_kubo requires a uniform temperature profile");

  GreenKuboCaseOptions opt;
  opt.params.epsilon = opts.value("epsilon", cfg.sim.epsilon);
  opt.params.lambda = opts.value("lambda", cfg.sim.lambda);
  opt.params.dt = opts.value("dt", 0.0);
  opt.params.tau_max = opts.value("tau_max", 20.0);
  opt.params.lag_dt = opts.value("lag_dt", 0.0);
  opt.params.traj_length = opts.value("traj_length", 4000.0);
  opt.params.burn_in = opts.value("burn_in", 20.0);
  opt.params.replicas = opts.value("replicas", 10);
  opt.params.threads = cfg.threads;
  opt.params.seed = cfg.sim.seed;
  opt.t_hat = cfg.profile[0];
  opt.model = cfg.model;
  opt.n_edges = cfg.lattice.size() - 1;
  opt.n_edges_small = opts.value("n_edges_small", 2);

  const auto result = green_kubo_case(opt);

  std::string csv = "case,mean,se,n\n";
  auto add = [&](const std::string& name, const EstimatorResult& r) {
    csv += csv_row({name, fmt(r.mean), fmt(r.standard_error),
                    std::to_string(r.n_samples)});
  };
  add("same_edge", result.same_edge);
  add("reversed", result.reversed);
  add("disjoint", result.disjoint);
  add("kappa_hat_large", result.total_large);
  add("kappa_hat_small", result.total_small);

  Report report;
  report.name = "greenkubo";
  report.files.emplace_back("greenkubo.csv", csv);
  report.summary = Json{{"experiment", "greenkubo"},
                        {"kappa_ref", result.kappa_ref},
                        {"same_edge", estimator_json(result.same_edge)},
                        {"reversed", estimator_json(result.reversed)},
                        {"disjoint", estimator_json(result.disjoint)},
                        {"kappa_hat_large", estimator_json(result.total_large)},
                        {"kappa_hat_small", estimator_json(result.total_small)},
                        {"config", cfg.raw}};
  return report;
}

Report run_fourier(const ExperimentConfig& cfg) {
  const Json sweep = cfg.raw.value("sweep", Json::object());
  const Json prof = cfg.raw.value("profile", Json::object());
  const double t0 = prof.value("T0", 1.0);
  const double t1 = prof.value("T1", 2.0);
  const auto n_list = sweep.value("chain_lengths", std::vector<int>{2, 4, 8});

  FourierParams fp;
  fp.horizon = cfg.sim.horizon;
  fp.burn_in = cfg.sim.burn_in;
  fp.replicas = cfg.replicas;
  fp.threads = cfg.threads;
  fp.record_stride = cfg.record_stride;
  fp.batch_time = cfg.batch_time;
  fp.seed = cfg.sim.seed;
  fp.xs = sweep.value("xs", std::vector<double>{0.25, 0.5, 0.75});

  const auto rows = fourier_sweep(n_list, cfg.sim.lambda, cfg.sim.epsilon, t0,
                                  t1, cfg.model, fp);

  std::string csv = "n,x,edge_lo,scaled_flow,scaled_flow_se,predicted\n";
  for (const auto& r : rows)
    csv += csv_row({std::to_string(r.n_edges), fmt(r.x),
                    std::to_string(r.edge_lo), fmt(r.scaled_flow.mean),
                    fmt(r.scaled_flow.standard_error), fmt(r.predicted)});

  Report report;
  report.name = "fourier";
  report.files.emplace_back("fourier.csv", csv);
  report.summary = Json{{"experiment", "fourier"}, {"config", cfg.raw}};
  return report;
}

}  // namespace reslat
