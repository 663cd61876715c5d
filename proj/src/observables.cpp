#include "reslat/observables.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include <unsupported/Eigen/FFT>

namespace reslat {

EstimatorResult merge(const EstimatorResult& a, const EstimatorResult& b) {
  if (a.n_samples == 0) return b;
  if (b.n_samples == 0) return a;
  EstimatorResult r;
  r.n_samples = a.n_samples + b.n_samples;
  const double wa = static_cast<double>(a.n_samples);
  const double wb = static_cast<double>(b.n_samples);
  r.mean = (wa * a.mean + wb * b.mean) / (wa + wb);
  // Parts are independent, so the absolute variances of the partial sums add.
  const double va = wa * wa * a.standard_error * a.standard_error;
  const double vb = wb * wb * b.standard_error * b.standard_error;
  r.standard_error = std::sqrt(va + vb) / (wa + wb);
  r.batch_size = (a.batch_size == b.batch_size) ? a.batch_size : 0;
  return r;
}

EstimatorResult pool(const std::vector<EstimatorResult>& parts) {
  EstimatorResult r;
  for (const auto& p : parts) r = merge(r, p);
  return r;
}

EstimatorResult time_average(const std::vector<double>& series,
                             long long batch_size) {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  const long long n_batches = static_cast<long long>(series.size()) / batch_size;
  if (n_batches < 20)
    throw std::invalid_argument("time_average needs at least 20 complete batches");

  std::vector<double> batch_means;
  batch_means.reserve(n_batches);
  for (long long b = 0; b < n_batches; ++b) {
    double s = 0.0;
    for (long long i = b * batch_size; i < (b + 1) * batch_size; ++i)
      s += series[static_cast<std::size_t>(i)];
    batch_means.push_back(s / static_cast<double>(batch_size));
  }

  double mean = 0.0;
  for (double m : batch_means) mean += m;
  mean /= static_cast<double>(n_batches);
  double var = 0.0;
  for (double m : batch_means) var += (m - mean) * (m - mean);
  var /= static_cast<double>(n_batches - 1);

  EstimatorResult r;
  r.mean = mean;
  r.standard_error = std::sqrt(var / static_cast<double>(n_batches));
  r.n_samples = n_batches * batch_size;
  r.batch_size = batch_size;
  return r;
}

EstimatorResult mean_of_iid(const std::vector<double>& samples) {
  if (samples.empty()) throw std::invalid_argument("mean_of_iid: empty input");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var = samples.size() > 1 ? var / static_cast<double>(samples.size() - 1) : 0.0;
  EstimatorResult r;
  r.mean = mean;
  r.standard_error = std::sqrt(var / static_cast<double>(samples.size()));
  r.n_samples = static_cast<long long>(samples.size());
  r.batch_size = 1;
  return r;
}

double energy_flow(const PhaseState& state, const LatticeSpec& lattice,
                   const PotentialModel& model, int k, int j) {
  if (!lattice.adjacent(k, j))
    throw std::invalid_argument("energy_flow: nodes are not nearest neighbours");
  const double qk = state[k].imag();
  const double qj = state[j].imag();
  return state[k].real() * model.d1(qk, qj) - state[j].real() * model.d1(qj, qk);
}

double resonant_flow_quadrature(const PotentialModel& model, Complex u_k,
                                Complex u_j, int n_points) {
  double acc = 0.0;
  for (int i = 0; i < n_points; ++i) {
    const Complex w = std::polar(1.0, 2.0 * M_PI * i / n_points);
    const Complex vk = w * u_k;
    const Complex vj = w * u_j;
    acc += vk.real() * model.d1(vk.imag(), vj.imag()) -
           vj.real() * model.d1(vj.imag(), vk.imag());
  }
  return acc / n_points;
}

double resonant_flow(const PotentialModel& model, Complex u_k, Complex u_j) {
  if (model.kind == PotentialKind::Quartic) {
    // Sign pinned against 2 * d/d(phi_k) of the resonant potential.
    const Complex i_uk(-u_k.imag(), u_k.real());
    const double dot = i_uk.real() * u_j.real() + i_uk.imag() * u_j.imag();
    return -3.0 * dot * std::norm(u_j - u_k);
  }
  return resonant_flow_quadrature(model, u_k, u_j, kDefaultResonantPoints);
}

void parallel_for_replicas(int replicas, int threads,
                           const std::function<void(int)>& body) {
  if (replicas <= 0) return;
  int n_threads = threads > 0
                      ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads < 1) n_threads = 1;
  if (n_threads > replicas) n_threads = replicas;
  if (n_threads == 1) {
    for (int r = 0; r < replicas; ++r) body(r);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t)
    workers.emplace_back([&, t]() {
      for (int r = t; r < replicas; r += n_threads) body(r);
    });
  for (auto& w : workers) w.join();
}

std::vector<EstimatorResult> stationary_averages(
    const StationaryRunSpec& spec, const LatticeSpec& lattice,
    const PotentialModel& model, const TemperatureProfile& profile,
    const std::vector<Observer>& observers, const PhaseState* initial) {
  spec.params.validate();
  const long long batch_size = std::max<long long>(
      1, std::llround(spec.batch_time / (spec.params.dt * spec.record_stride)));

  std::vector<std::vector<EstimatorResult>> per_replica(
      static_cast<std::size_t>(spec.replicas));

  parallel_for_replicas(spec.replicas, spec.threads, [&](int r) {
    const auto traj = static_cast<std::uint32_t>(r);
    PhaseState u0;
    if (initial) {
      u0 = *initial;
    } else {
      NoiseStream init_stream(spec.params.seed, traj);
      u0 = sample_mu0(profile, init_stream);
    }
    const SimulationRecord rec =
        simulate(u0, spec.params, lattice, model, profile, observers, traj,
                 spec.record_stride);
    std::vector<EstimatorResult> results;
    results.reserve(observers.size());
    for (std::size_t c = 0; c < observers.size(); ++c) {
      std::vector<double> series(static_cast<std::size_t>(rec.values.rows()));
      for (Eigen::Index i = 0; i < rec.values.rows(); ++i)
        series[static_cast<std::size_t>(i)] =
            rec.values(i, static_cast<Eigen::Index>(c));
      results.push_back(time_average(series, batch_size));
    }
    per_replica[static_cast<std::size_t>(r)] = std::move(results);
  });

  std::vector<EstimatorResult> pooled(observers.size());
  for (const auto& rep : per_replica)
    for (std::size_t c = 0; c < rep.size(); ++c)
      pooled[c] = merge(pooled[c], rep[c]);
  return pooled;
}

std::vector<double> centered_cross_correlation(const std::vector<double>& a,
                                               const std::vector<double>& b,
                                               int max_lag) {
  const auto n = static_cast<std::int64_t>(a.size());
  if (n != static_cast<std::int64_t>(b.size()))
    throw std::invalid_argument("cross correlation: length mismatch");
  if (max_lag >= n)
    throw std::invalid_argument("cross correlation: series shorter than max lag");
  double abar = 0.0, bbar = 0.0;
  for (double x : a) abar += x;
  for (double x : b) bbar += x;
  abar /= static_cast<double>(n);
  bbar /= static_cast<double>(n);

  std::size_t m = 1;
  while (m < static_cast<std::size_t>(n + max_lag + 1)) m <<= 1;

  std::vector<std::complex<double>> fa(m, 0.0), fb(m, 0.0);
  for (std::int64_t t = 0; t < n; ++t) {
    fa[static_cast<std::size_t>(t)] = a[static_cast<std::size_t>(t)] - abar;
    fb[static_cast<std::size_t>(t)] = b[static_cast<std::size_t>(t)] - bbar;
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> sa(m), sb(m);
  fft.fwd(sa, fa);
  fft.fwd(sb, fb);
  for (std::size_t i = 0; i < m; ++i) sa[i] = std::conj(sa[i]) * sb[i];
  std::vector<std::complex<double>> conv(m);
  fft.inv(conv, sa);

  std::vector<double> c(static_cast<std::size_t>(max_lag) + 1);
  for (int l = 0; l <= max_lag; ++l)
    c[static_cast<std::size_t>(l)] =
        conv[static_cast<std::size_t>(l)].real() / static_cast<double>(n - l);
  return c;
}

double integrated_autocorr_time(const std::vector<double>& series, double dt) {
  const auto n = static_cast<std::int64_t>(series.size());
  if (n < 4) throw std::invalid_argument("autocorr time needs a longer series");
  const int max_lag = static_cast<int>(std::min<std::int64_t>(n / 4, 4000));
  const auto c = centered_cross_correlation(series, series, max_lag);
  if (!(c[0] > 0.0)) return 0.0;
  double tau = 0.5;
  for (int l = 1; l <= max_lag; ++l) {
    const double rho = c[static_cast<std::size_t>(l)] / c[0];
    if (rho < 0.0) break;
    tau += rho;
  }
  return tau * dt;
}

EstimatorResult stationary_flow(const StationaryRunSpec& spec,
                                const LatticeSpec& lattice,
                                const PotentialModel& model,
                                const TemperatureProfile& profile, int k, int j) {
  if (!lattice.adjacent(k, j))
    throw std::invalid_argument("stationary_flow: nodes are not nearest neighbours");
  std::vector<Observer> obs{{"flow",
                             [&lattice, &model, k, j](const PhaseState& u, double) {
                               return energy_flow(u, lattice, model, k, j);
                             }}};
  return stationary_averages(spec, lattice, model, profile, obs)[0];
}

}  // namespace reslat
