#include "memheat/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace memheat {

namespace {

constexpr char kMagic[4] = {'M', 'H', 'C', 'K'};

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_f64(std::ofstream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
double get_f64(std::ifstream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const SolveResult& run,
                          int stride) {
  if (stride < 1) throw std::invalid_argument("write_trajectory_csv: stride >= 1");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.precision(17);
  const int n = run.trajectory.n_modes;
  out << "t";
  for (int j = 1; j <= n; ++j) out << ",b_" << j;
  out << ",u_h,u_v,eta_mu,energy,lv2,dissipation_residual\n";
  const std::size_t count = run.records.size();
  for (std::size_t k = 0; k < count; ++k) {
    if (k % static_cast<std::size_t>(stride) != 0 && k + 1 != count) continue;
    const DiagnosticsRecord& r = run.records[k];
    out << r.t;
    for (double b : run.trajectory.modal(k)) out << "," << b;
    out << "," << std::sqrt(r.u_h_sq) << "," << std::sqrt(r.u_v_sq) << ","
        << std::sqrt(r.eta_mu_sq) << "," << r.energy << "," << r.lv2 << ","
        << r.dissipation_residual << "\n";
  }
}

void write_history_csv(const std::string& path, const HistoryField& eta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.precision(17);
  out << "s";
  out << ",omega";
  for (int j = 1; j <= eta.n_modes; ++j) out << ",e_" << j;
  out << "\n";
  for (int i = 0; i < eta.n_nodes(); ++i) {
    out << eta.rule->nodes[static_cast<std::size_t>(i)] << ","
        << eta.rule->weights[static_cast<std::size_t>(i)];
    for (int j = 0; j < eta.n_modes; ++j) out << "," << eta.at(j, i);
    out << "\n";
  }
}

void write_json_report(const std::string& path, const std::string& inner_json) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "{\"format_version\": " << kFormatVersion << ", \"report\": " << inner_json
      << "}\n";
}

void write_campaign_csv(const std::string& path,
                        const std::vector<CampaignRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.precision(17);
  out << "config_hash,e0,entry_time,min_envelope_margin,fitted_separation_rate\n";
  for (const CampaignRow& r : rows)
    out << r.config_hash << "," << r.e0 << "," << r.entry_time << ","
        << r.min_envelope_margin << "," << r.fitted_separation_rate << "\n";
}

void write_checkpoint(const std::string& path, const SystemState& state,
                      const MemoryKernel& kernel, double gamma) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.write(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(kFormatVersion));
  put_u32(out, static_cast<std::uint32_t>(state.u.size()));
  put_u32(out, static_cast<std::uint32_t>(state.eta.n_nodes()));
  put_u32(out, kernel.family() == KernelFamily::exponential ? 0u : 1u);
  put_f64(out, state.t);
  put_f64(out, gamma);
  put_f64(out, kernel.amplitude());
  put_f64(out, kernel.delta());
  put_f64(out, kernel.alpha());
  const WeightedQuadrature& rule = *state.eta.rule;
  put_f64(out, rule.s_max);
  put_f64(out, rule.mass);
  put_f64(out, rule.tol);
  for (double s : rule.nodes) put_f64(out, s);
  for (double w : rule.weights) put_f64(out, w);
  for (double b : state.u.coeffs) put_f64(out, b);
  for (double e : state.eta.values) put_f64(out, e);
  for (double d : state.eta.slopes) put_f64(out, d);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("checkpoint: bad magic");
  const std::uint32_t version = get_u32(in);
  if (version != static_cast<std::uint32_t>(kFormatVersion))
    throw std::runtime_error("checkpoint: unsupported version");
  const std::uint32_t n = get_u32(in);
  const std::uint32_t ns = get_u32(in);
  const std::uint32_t fam = get_u32(in);
  Checkpoint cp;
  cp.t = get_f64(in);
  cp.gamma = get_f64(in);
  const double c = get_f64(in);
  const double delta = get_f64(in);
  const double alpha = get_f64(in);
  cp.kernel = fam == 0 ? MemoryKernel::exponential(c, delta)
                       : MemoryKernel::singular(delta, alpha);
  WeightedQuadrature rule;
  rule.s_max = get_f64(in);
  rule.mass = get_f64(in);
  rule.tol = get_f64(in);
  rule.nodes.resize(ns);
  rule.weights.resize(ns);
  for (auto& s : rule.nodes) s = get_f64(in);
  for (auto& w : rule.weights) w = get_f64(in);
  cp.rule = std::make_shared<const WeightedQuadrature>(std::move(rule));
  cp.u.coeffs.resize(n);
  for (auto& b : cp.u.coeffs) b = get_f64(in);
  cp.eta.rule = cp.rule;
  cp.eta.n_modes = static_cast<int>(n);
  cp.eta.values.resize(static_cast<std::size_t>(n) * ns);
  for (auto& e : cp.eta.values) e = get_f64(in);
  cp.eta.slopes.resize(cp.eta.values.size());
  for (auto& d : cp.eta.slopes) d = get_f64(in);
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return cp;
}

}  // namespace memheat
