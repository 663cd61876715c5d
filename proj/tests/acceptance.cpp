// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one pass/fail line each. Exit code is the number of failures.
// argv[1] (optional): path to the CLI binary, needed by the determinism
// criterion; argv[2..] (optional): criterion numbers to run.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "reslat/harness.hpp"

using namespace reslat;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

std::string fmtv(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

PhaseState random_pair(const NoiseStream& rng, std::uint32_t tag, double scale) {
  const auto zk = rng.normal_pair(0, tag, 0);
  const auto zj = rng.normal_pair(1, tag, 0);
  PhaseState u(2);
  u << scale * Complex(zk[0], zk[1]), scale * Complex(zj[0], zj[1]);
  return u;
}

// 1. Resonant-averaging closed forms against 16-point quadrature.
Outcome criterion_closed_forms() {
  const PotentialModel quartic = PotentialModel::quartic();
  const PotentialModel quadratic = PotentialModel::quadratic();
  const NoiseStream rng(101, 0);
  double worst = 0.0;
  for (std::uint32_t i = 0; i < 1000; ++i) {
    const PhaseState u = random_pair(rng, i, 1.0);
    for (const auto* m : {&quartic, &quadratic}) {
      const double closed = resonant_potential(*m, u[0], u[1]);
      const double quad = resonant_potential_quadrature(*m, u[0], u[1], 16);
      worst = std::max(worst, std::abs(closed - quad) / std::max(std::abs(closed), 1e-30));
    }
  }
  return {worst <= 1e-10, "max rel err " + fmtv(worst) + " (limit 1e-10)"};
}

// 2. Averaging property suite on polynomial observables.
Outcome criterion_averaging_properties() {
  const NoiseStream rng(102, 0);
  const std::vector<std::function<double(const PhaseState&)>> polys = {
      [](const PhaseState& u) { return u[0].imag() * u[0].imag() * u[1].imag(); },
      [](const PhaseState& u) {
        return u[0].real() * u[1].real() + u[0].imag() * u[1].imag();
      },
      [](const PhaseState& u) {
        const double d = u[0].imag() - u[1].imag();
        return d * d * d * d;
      },
      [](const PhaseState& u) {
        return std::pow(u[0].real(), 3) * u[1].imag() - u[0].imag() * u[1].real();
      }};
  double worst = 0.0;
  std::uint32_t tag = 0;
  for (const auto& f : polys)
    for (int i = 0; i < 25; ++i) {
      const PhaseState u = random_pair(rng, tag++, 1.0);
      const double base = resonant_average(f, u, 64);
      const double xi = 2.0 * M_PI * (i + 0.37) / 25.0;
      worst = std::max(worst, std::abs(resonant_average(f, std::polar(1.0, xi) * u, 64) -
                                       base));
      const double lhs = resonant_average(
          [&](const PhaseState& v) { return angle_derivative(f, v, 0); }, u, 64);
      auto avg = [&](const PhaseState& v) { return resonant_average(f, v, 64); };
      const double rhs = angle_derivative(avg, u, 0);
      worst = std::max(worst, std::abs(lhs - rhs));
      worst = std::max(worst, std::abs(angle_derivative(avg, u, 0) +
                                       angle_derivative(avg, u, 1)));
    }
  return {worst <= 1e-8, "max defect " + fmtv(worst) + " (limit 1e-8)"};
}

// 3. Gaussian sampling against long exact OU runs.
Outcome criterion_ou_exactness() {
  Eigen::VectorXd temps(2);
  temps << 1.3, 0.6;
  const TemperatureProfile prof = make_profile(temps);
  const int n = 1000000;

  double s1[2] = {0, 0}, s2[2] = {0, 0}, q1[2] = {0, 0}, q2[2] = {0, 0};
  for (int i = 0; i < n; ++i) {
    NoiseStream rep(103, static_cast<std::uint32_t>(i));
    const PhaseState u = sample_mu0(prof, rep);
    for (int j = 0; j < 2; ++j) {
      const double a = action(u[j]);
      s1[j] += a;
      q1[j] += a * a;
      const double a2 = a * a;
      s2[j] += a2;
      q2[j] += a2 * a2;
    }
  }

  bool pass = true;
  std::ostringstream detail;
  for (int j = 0; j < 2; ++j) {
    const double t = prof[j];
    const double m1 = s1[j] / n, v1 = q1[j] / n - m1 * m1;
    const double m2 = s2[j] / n, v2 = q2[j] / n - m2 * m2;
    pass = pass && std::abs(m1 - t) <= 4.0 * std::sqrt(v1 / n);
    pass = pass && std::abs(m2 - 2.0 * t * t) <= 4.0 * std::sqrt(v2 / n);
  }
  detail << "mu0 moments ok=" << pass;

  // one long exact-transition trajectory per node, 1e6 recorded points
  const LatticeSpec chain = build_chain(1);
  SimParams p;
  p.lambda = 0.0;
  p.dt = 0.05;
  p.horizon = 50020.0;
  p.burn_in = 20.0;
  p.frame = Frame::OrnsteinUhlenbeck;
  p.seed = 103;
  std::vector<Observer> obs{
      {"I0", [](const PhaseState& u, double) { return action(u[0]); }},
      {"I1", [](const PhaseState& u, double) { return action(u[1]); }}};
  const NoiseStream init(p.seed, 1u << 20);
  const auto rec = simulate(sample_mu0(prof, init), p, chain,
                            PotentialModel::quadratic(), prof, obs, 1u << 20, 1);
  for (int j = 0; j < 2; ++j) {
    std::vector<double> series(rec.values.rows());
    std::vector<double> series_sq(rec.values.rows());
    for (Eigen::Index i = 0; i < rec.values.rows(); ++i) {
      series[static_cast<std::size_t>(i)] = rec.values(i, j);
      series_sq[static_cast<std::size_t>(i)] = rec.values(i, j) * rec.values(i, j);
    }
    const auto est = time_average(series, 200);
    const auto est2 = time_average(series_sq, 200);
    const double t = prof[j];
    pass = pass && std::abs(est.mean - t) <= 4.0 * est.standard_error;
    pass = pass && std::abs(est2.mean - 2.0 * t * t) <= 4.0 * est2.standard_error;
    // the two routes agree with each other as well
    const double mu0_mean = s1[j] / n;
    const double mu0_se = std::sqrt((q1[j] / n - mu0_mean * mu0_mean) / n);
    const double comb = std::sqrt(mu0_se * mu0_se +
                                  est.standard_error * est.standard_error);
    pass = pass && std::abs(est.mean - mu0_mean) <= 4.0 * comb;
  }
  detail << ", ou run vs thermostats within 4 SE";
  return {pass, detail.str()};
}

// 4. OU generator applied to the Poisson solution returns the flow.
Outcome criterion_generator_identity() {
  const PotentialModel quartic = PotentialModel::quartic();
  const NoiseStream rng(104, 0);
  const double tk = 1.0, tj = 2.0;
  double worst = 0.0;
  for (std::uint32_t i = 0; i < 100; ++i) {
    const PhaseState u = random_pair(rng, i, 1.0);
    auto eta = [&](const PhaseState& v) { return quartic_eta(v[0], v[1], tk, tj); };
    const double lhs = generator_apply(eta, u, tk, tj);
    const double rhs = resonant_flow(quartic, u[0], u[1]);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  return {worst <= 1e-5, "max rel err " + fmtv(worst) + " (limit 1e-5)"};
}

// 5. Conductivity cross-validation: Monte-Carlo correlation route against
//    the Gauss-Hermite closed form, plus the temperature-square ratio.
Outcome criterion_conductivity() {
  bool pass = true;
  std::ostringstream detail;
  const std::vector<std::pair<double, double>> pairs = {{1, 1}, {1, 2}, {2, 3}};
  for (const auto& [tk, tj] : pairs) {
    const double cf = kappa_closed_form_quartic(tk, tj);
    ConductivityQuery q;
    q.t_k = tk;
    q.t_j = tj;
    q.method = ConductivityMethod::OuCorrelation;
    q.tau_max = 15.0;
    q.replicas = 400000;
    q.dt = 0.05;
    q.seed = 105;
    q.threads = 2;
    const auto mc = conductivity(q);
    const double rel = std::abs(mc.mean - cf) / cf;
    pass = pass && rel <= 0.05;
    detail << "(" << tk << "," << tj << "): mc " << fmtv(mc.mean) << "+-"
           << fmtv(mc.standard_error) << " cf " << fmtv(cf) << " rel "
           << fmtv(rel) << "; ";
  }
  const double ratio =
      kappa_closed_form_quartic(1, 1) / kappa_closed_form_quartic(2, 2);
  pass = pass && std::abs(ratio - 0.25) <= 1e-12;
  detail << "ratio(1,1)/(2,2) " << fmtv(ratio);
  return {pass, detail.str()};
}

// 6. Averaging limit at desk scale: full rotating dynamics against the
//    effective equation at tau = 1 on the stated epsilon grid.
Outcome criterion_averaging_limit() {
  AveragingOptions opt;
  opt.epsilons = {0.1, 0.05, 0.025};
  opt.checkpoints = {0.5, 1.0, 2.0};
  opt.lambda = 1.0;
  opt.n_edges = 3;
  opt.replicas = 10000;
  opt.dt_eff = 0.0025;
  opt.seed = 106;
  opt.threads = 2;
  const auto cells = averaging_cells(opt);

  double worst_z = 0.0;
  std::string worst_cell;
  std::vector<double> diff_by_eps, se_by_eps;
  for (double eps : opt.epsilons) {
    double d = 0.0, se = 0.0;
    int n = 0;
    for (const auto& c : cells)
      if (c.epsilon == eps && c.tau == 1.0) {
        d += c.abs_diff();
        se += c.combined_se();
        ++n;
        if (eps == 0.025) {
          const double z = c.abs_diff() / c.combined_se();
          if (z > worst_z) {
            worst_z = z;
            worst_cell = c.observable;
          }
        }
      }
    diff_by_eps.push_back(d / n);
    se_by_eps.push_back(se / n);
  }
  const bool match = worst_z <= 3.0;
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < diff_by_eps.size(); ++i)
    monotone = monotone && diff_by_eps[i + 1] <= diff_by_eps[i] + se_by_eps[i + 1];

  std::ostringstream detail;
  detail << "tau=1 mean |diff| over eps grid: ";
  for (double d : diff_by_eps) detail << fmtv(d) << " ";
  detail << "(mean 3SE " << fmtv(3.0 * se_by_eps.back())
         << "); worst cell z=" << fmtv(worst_z) << " [" << worst_cell
         << "] (limit 3); monotone=" << (monotone ? "yes" : "no");
  return {match && monotone, detail.str()};
}

FlowResult shared_flow_result() {
  FlowOptions opt;
  opt.lambdas = {0.05, 0.1, 0.2};
  opt.epsilon = 0.025;
  opt.t_k = 2.0;
  opt.t_j = 1.0;
  opt.horizon = 2020.0;
  opt.burn_in = 20.0;
  opt.replicas = 8;
  opt.threads = 2;
  opt.seed = 107;
  return flow_vs_lambda(opt);
}

// 7. Stationary flow law: least-squares slope of <J> against lambda, against
//    the closed-form conductivity; uniform temperatures give zero flow.
Outcome criterion_flow_law(const FlowResult& flow) {
  const double want = flow.kappa_ref * (2.0 - 1.0);
  const double rel = std::abs(flow.slope - want) / want;
  const bool slope_ok = rel <= 0.15;
  const bool uniform_ok = std::abs(flow.uniform_flow.mean) <=
                          3.0 * flow.uniform_flow.standard_error;
  std::ostringstream detail;
  detail << "slope " << fmtv(flow.slope) << "+-" << fmtv(flow.slope_se)
         << " vs kappa(2,1)*dT " << fmtv(want) << " (rel " << fmtv(rel)
         << ", limit 0.15); uniform flow " << fmtv(flow.uniform_flow.mean)
         << "+-" << fmtv(flow.uniform_flow.standard_error)
         << (uniform_ok ? " ~ 0" : " != 0");
  return {slope_ok && uniform_ok, detail.str()};
}

// 8. Green-Kubo three-case check plus chain-length independence.
Outcome criterion_green_kubo() {
  GreenKuboCaseOptions opt;
  opt.params.epsilon = 0.025;
  opt.params.lambda = 0.005;
  opt.params.tau_max = 20.0;
  opt.params.lag_dt = 0.0;
  opt.params.traj_length = 4000.0;
  opt.params.burn_in = 20.0;
  opt.params.replicas = 10;
  opt.params.threads = 2;
  opt.params.seed = 108;
  opt.t_hat = 1.0;
  opt.n_edges = 4;
  opt.n_edges_small = 2;
  const auto r = green_kubo_case(opt);

  const double want = opt.t_hat * opt.t_hat * r.kappa_ref;
  const bool positive = r.same_edge.mean > 0.0;
  const bool same_ok = std::abs(r.same_edge.mean - want) <= 0.15 * want;
  const double rev_se = std::sqrt(
      r.same_edge.standard_error * r.same_edge.standard_error +
      r.reversed.standard_error * r.reversed.standard_error);
  const bool reversed_ok =
      std::abs(r.reversed.mean + r.same_edge.mean) <= 3.0 * rev_se;
  const bool disjoint_ok =
      std::abs(r.disjoint.mean) <= 3.0 * r.disjoint.standard_error;
  const double tot_se = std::sqrt(
      r.total_large.standard_error * r.total_large.standard_error +
      r.total_small.standard_error * r.total_small.standard_error);
  const bool totals_ok =
      r.total_large.mean > 0.0 && r.total_small.mean > 0.0 &&
      std::abs(r.total_large.mean - r.total_small.mean) <= 3.0 * tot_se;

  std::ostringstream detail;
  detail << "same " << fmtv(r.same_edge.mean) << "+-"
         << fmtv(r.same_edge.standard_error) << " vs " << fmtv(want)
         << "; reversed " << fmtv(r.reversed.mean) << "; disjoint "
         << fmtv(r.disjoint.mean) << "+-" << fmtv(r.disjoint.standard_error)
         << "; kappa_hat N4 " << fmtv(r.total_large.mean) << " N2 "
         << fmtv(r.total_small.mean);
  return {positive && same_ok && reversed_ok && disjoint_ok && totals_ok,
          detail.str()};
}

// 9. Stationary momentum balance on the flow runs.
Outcome criterion_momentum_balance(const FlowResult& flow) {
  bool pass = true;
  double worst = 0.0;
  for (const auto& p : flow.points) {
    const double half = 0.5 * p.lambda;
    // flow enters node j and leaves node k
    const double res_k = p.p2_k.mean - (2.0 - half * p.flow.mean);
    const double res_j = p.p2_j.mean - (1.0 + half * p.flow.mean);
    const double se = std::sqrt(
        p.p2_k.standard_error * p.p2_k.standard_error +
        half * half * p.flow.standard_error * p.flow.standard_error);
    const double se_j = std::sqrt(
        p.p2_j.standard_error * p.p2_j.standard_error +
        half * half * p.flow.standard_error * p.flow.standard_error);
    worst = std::max({worst, std::abs(res_k) / (3.0 * se),
                      std::abs(res_j) / (3.0 * se_j)});
    pass = pass && std::abs(res_k) <= 3.0 * se && std::abs(res_j) <= 3.0 * se_j;
  }
  return {pass, "worst residual / (3 SE) = " + fmtv(worst)};
}

// 10. Byte-identical outputs under re-runs of a CLI subcommand.
Outcome criterion_determinism(const std::string& cli) {
  if (cli.empty()) return {false, "CLI path not provided"};
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "reslat_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path cfg_path = base / "cfg.json";
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({
  "lattice": {"chain_length": 2},
  "model": {"kind": "quartic"},
  "profile": {"T0": 1.0, "T1": 2.0},
  "sim": {"epsilon": 0.1, "lambda": 0.2, "horizon": 2.0, "burn_in": 0.5,
          "frame": "rotating", "seed": 99, "replicas": 2, "record_stride": 4}
})";
  }
  // Re-run with the identical invocation (same config, seed and output
  // directory) and compare every produced file byte for byte.
  const std::string out = (base / "run").string();
  auto run = [&]() {
    const std::string cmd = "\"" + cli + "\" simulate --config \"" +
                            cfg_path.string() + "\" --out \"" + out + "\" > /dev/null";
    return std::system(cmd.c_str());
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  if (run() != 0) return {false, "CLI invocation failed"};
  std::map<std::string, std::string> first;
  for (const auto& entry : fs::directory_iterator(out))
    first[entry.path().filename().string()] = slurp(entry.path());
  if (run() != 0) return {false, "CLI invocation failed"};
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(out)) {
    const auto name = entry.path().filename().string();
    const auto it = first.find(name);
    if (it == first.end()) return {false, "new file appeared: " + name};
    if (slurp(entry.path()) != it->second)
      return {false, "byte mismatch in " + name};
    ++compared;
  }
  if (compared != static_cast<int>(first.size()))
    return {false, "output file set changed between runs"};
  fs::remove_all(base);
  return {compared > 0, std::to_string(compared) + " files byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  std::set<int> selected;
  for (int i = 2; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  auto wanted = [&](int id) { return selected.empty() || selected.count(id); };

  struct Entry {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };

  FlowResult flow;
  bool flow_ready = false;
  auto ensure_flow = [&]() {
    if (!flow_ready) {
      flow = shared_flow_result();
      flow_ready = true;
    }
    return flow;
  };

  const std::vector<Entry> entries = {
      {1, "resonant-averaging closed forms", criterion_closed_forms},
      {2, "rotation-averaging property suite", criterion_averaging_properties},
      {3, "ou exactness", criterion_ou_exactness},
      {4, "generator identity", criterion_generator_identity},
      {5, "conductivity cross-validation", criterion_conductivity},
      {6, "averaging limit at desk scale", criterion_averaging_limit},
      {7, "stationary flow law", [&]() { return criterion_flow_law(ensure_flow()); }},
      {8, "green-kubo three-case check", criterion_green_kubo},
      {9, "stationary momentum balance",
       [&]() { return criterion_momentum_balance(ensure_flow()); }},
      {10, "byte-identical reruns", [&]() { return criterion_determinism(cli); }},
  };

  int failures = 0;
  for (const auto& e : entries) {
    if (!wanted(e.id)) continue;
    Timer timer;
    Outcome o;
    try {
      o = e.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %02d %-38s [%s]  %s  (%.1f s)\n", e.id, e.name,
                o.pass ? "PASS" : "FAIL", o.detail.c_str(), timer.seconds());
    std::fflush(stdout);
  }
  if (failures)
    std::printf("%d criterion(s) failed\n", failures);
  else
    std::printf("all criteria passed\n");
  return failures;
}
