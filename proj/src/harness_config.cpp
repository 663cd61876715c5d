#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "reslat/harness.hpp"
#include "reslat/version.hpp"

namespace reslat {

Json lattice_to_json(const LatticeSpec& lattice) {
  Json j;
  j["dimension"] = lattice.dimension;
  // A 1-d chain {0..N} round-trips through its length alone.
  bool is_chain = lattice.dimension == 1;
  for (int n = 0; is_chain && n < lattice.size(); ++n)
    is_chain = lattice.nodes[n][0] == n;
  if (is_chain && lattice.size() >= 2) {
    j["chain_length"] = lattice.size() - 1;
  } else {
    Json nodes = Json::array();
    for (const auto& n : lattice.nodes) {
      Json coord = Json::array();
      for (Eigen::Index d = 0; d < n.size(); ++d) coord.push_back(n[d]);
      nodes.push_back(coord);
    }
    j["nodes"] = nodes;
  }
  return j;
}

LatticeSpec lattice_from_json(const Json& j) {
  const int dim = j.value("dimension", 1);
  if (j.contains("chain_length")) {
    if (dim != 1)
      throw std::invalid_argument("chain_length implies dimension 1");
    return build_chain(j.at("chain_length").get<int>());
  }
  if (!j.contains("nodes"))
    throw std::invalid_argument("lattice needs chain_length or nodes");
  std::vector<Eigen::VectorXi> nodes;
  for (const auto& coord : j.at("nodes")) {
    Eigen::VectorXi c(static_cast<Eigen::Index>(coord.size()));
    for (std::size_t d = 0; d < coord.size(); ++d)
      c[static_cast<Eigen::Index>(d)] = coord[d].get<int>();
    nodes.push_back(std::move(c));
  }
  return make_lattice(dim, std::move(nodes));
}

Json profile_to_json(const TemperatureProfile& profile) {
  Json j;
  Json t = Json::array();
  for (int i = 0; i < profile.size(); ++i) t.push_back(profile[i]);
  j["temperatures"] = t;
  return j;
}

TemperatureProfile profile_from_json(const Json& j, int n_nodes) {
  if (j.contains("temperatures")) {
    const auto& arr = j.at("temperatures");
    Eigen::VectorXd t(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i)
      t[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    if (t.size() != n_nodes)
      throw std::invalid_argument("temperature list does not match the lattice");
    return make_profile(std::move(t));
  }
  if (j.contains("uniform"))
    return uniform_temperature_profile(j.at("uniform").get<double>(), n_nodes);
  if (j.contains("T0") && j.contains("T1"))
    return linear_temperature_profile(j.at("T0").get<double>(),
                                      j.at("T1").get<double>(), n_nodes - 1);
  throw std::invalid_argument("profile needs temperatures, uniform, or T0/T1");
}

PotentialModel model_from_json(const Json& j) {
  const std::string kind = j.value("kind", "quartic");
  if (kind == "quadratic") return PotentialModel::quadratic();
  if (kind == "quartic") return PotentialModel::quartic();
  throw std::invalid_argument("config models are quadratic or quartic; custom potentials are API-only");
}

ExperimentConfig parse_config(const Json& j) {
  ExperimentConfig cfg;
  cfg.lattice = lattice_from_json(j.value("lattice", Json{{"chain_length", 1}}));
  cfg.model = model_from_json(j.value("model", Json{{"kind", "quartic"}}));
  cfg.profile = profile_from_json(j.value("profile", Json{{"uniform", 1.0}}),
                                  cfg.lattice.size());

  const Json sim = j.value("sim", Json::object());
  cfg.sim.epsilon = sim.value("epsilon", 0.05);
  cfg.sim.lambda = sim.value("lambda", 0.1);
  cfg.sim.dt = sim.value("dt", 0.0);
  if (cfg.sim.dt <= 0.0) cfg.sim.dt = cfg.sim.epsilon / 8.0;
  cfg.sim.horizon = sim.value("horizon", 220.0);
  cfg.sim.burn_in = sim.value("burn_in", 20.0);
  cfg.sim.frame = frame_from_string(sim.value("frame", std::string("rotating")));
  cfg.sim.seed = sim.value("seed", std::uint64_t{0});
  cfg.replicas = sim.value("replicas", 4);
  cfg.record_stride = sim.value("record_stride", 4);

  cfg.batch_time = j.value("estimator", Json::object()).value("batch_time", 10.0);
  cfg.threads = j.value("threads", 0);
  cfg.out_dir = j.value("output", Json::object()).value("dir", std::string("out"));

  // Echo the resolved configuration.
  Json raw = j;
  raw["lattice"] = lattice_to_json(cfg.lattice);
  raw["model"] = Json{{"kind", to_string(cfg.model.kind)}};
  raw["profile"] = profile_to_json(cfg.profile);
  raw["sim"] = Json{{"epsilon", cfg.sim.epsilon}, {"lambda", cfg.sim.lambda},
                    {"dt", cfg.sim.dt},           {"horizon", cfg.sim.horizon},
                    {"burn_in", cfg.sim.burn_in}, {"frame", to_string(cfg.sim.frame)},
                    {"seed", cfg.sim.seed},       {"replicas", cfg.replicas},
                    {"record_stride", cfg.record_stride}};
  raw["estimator"] = Json{{"batch_time", cfg.batch_time}};
  raw["threads"] = cfg.threads;
  raw["output"] = Json{{"dir", cfg.out_dir}};
  cfg.raw = std::move(raw);
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_report(const Report& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  for (const auto& [name, contents] : report.files) {
    std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + name);
    out << contents;
  }
  Json summary = report.summary;
  summary["tool"] = "reslat";
  summary["version"] = kVersion;
  std::ofstream out(fs::path(out_dir) / (report.name + "_summary.json"),
                    std::ios::binary);
  if (!out) throw std::runtime_error("cannot write summary");
  out << summary.dump(2) << "\n";
}

Json ValidationOutcome::to_json() const {
  Json arr = Json::array();
  for (const auto& c : checks)
    arr.push_back(Json{{"name", c.name},
                       {"pass", c.pass},
                       {"measured", c.measured},
                       {"threshold", c.threshold},
                       {"detail", c.detail}});
  return Json{{"all_pass", all_pass}, {"checks", arr}};
}

}  // namespace reslat
