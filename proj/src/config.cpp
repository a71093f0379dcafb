#include "memheat/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

namespace memheat {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

struct Raw {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::vector<std::string> errors;
};

Raw tokenize(const std::string& text) {
  Raw raw;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        raw.errors.push_back("line " + std::to_string(lineno) + ": malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!raw.sections.count(section)) raw.sections[section] = {};
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      raw.errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (section.empty()) {
      raw.errors.push_back("line " + std::to_string(lineno) + ": key '" + key +
                           "' outside any section");
      continue;
    }
    if (raw.sections[section].count(key)) {
      raw.errors.push_back("duplicate key '" + section + "." + key + "'");
      continue;
    }
    raw.sections[section][key] = val;
  }
  return raw;
}

class Reader {
 public:
  Reader(Raw& raw, std::vector<std::string>& errors)
      : raw_(raw), errors_(errors) {}

  bool has(const std::string& sec, const std::string& key) const {
    auto s = raw_.sections.find(sec);
    return s != raw_.sections.end() && s->second.count(key) > 0;
  }

  std::string take(const std::string& sec, const std::string& key) {
    used_.insert(sec + "." + key);
    return raw_.sections[sec][key];
  }

  double number(const std::string& sec, const std::string& key, double fallback) {
    if (!has(sec, key)) return fallback;
    const std::string v = take(sec, key);
    try {
      std::size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing");
      return x;
    } catch (const std::exception&) {
      errors_.push_back("key '" + sec + "." + key + "': expected a number, got '" + v + "'");
      return fallback;
    }
  }

  int integer(const std::string& sec, const std::string& key, int fallback) {
    const double x = number(sec, key, static_cast<double>(fallback));
    if (x != std::floor(x)) {
      errors_.push_back("key '" + sec + "." + key + "': expected an integer");
      return fallback;
    }
    return static_cast<int>(x);
  }

  std::vector<double> list(const std::string& sec, const std::string& key) {
    std::vector<double> out;
    if (!has(sec, key)) return out;
    const std::string v = take(sec, key);
    for (const std::string& tok : split_ws(v)) {
      try {
        out.push_back(std::stod(tok));
      } catch (const std::exception&) {
        errors_.push_back("key '" + sec + "." + key + "': non-numeric entry '" + tok + "'");
        return {};
      }
    }
    return out;
  }

  std::string word(const std::string& sec, const std::string& key,
                   const std::string& fallback) {
    if (!has(sec, key)) return fallback;
    return take(sec, key);
  }

  // Unknown-key sweep (strict mode): everything not consumed is an error.
  void finish(const std::set<std::string>& known_sections) {
    for (const auto& [sec, kv] : raw_.sections) {
      if (!known_sections.count(sec)) {
        errors_.push_back("unknown section [" + sec + "]");
        continue;
      }
      for (const auto& [key, val] : kv) {
        (void)val;
        if (!used_.count(sec + "." + key))
          errors_.push_back("unknown key '" + sec + "." + key + "'");
      }
    }
  }

 private:
  Raw& raw_;
  std::vector<std::string>& errors_;
  std::set<std::string> used_;
};

std::vector<ExpTerm> parse_terms(const std::string& v,
                                 std::vector<std::string>& errors,
                                 const std::string& keyname) {
  std::vector<ExpTerm> terms;
  for (const std::string& tok : split_ws(v)) {
    auto colon = tok.find(':');
    if (colon == std::string::npos) {
      errors.push_back("key '" + keyname + "': expected amp:rate, got '" + tok + "'");
      return {};
    }
    try {
      ExpTerm t;
      t.amp = std::stod(tok.substr(0, colon));
      t.rate = std::stod(tok.substr(colon + 1));
      terms.push_back(t);
    } catch (const std::exception&) {
      errors.push_back("key '" + keyname + "': non-numeric term '" + tok + "'");
      return {};
    }
  }
  return terms;
}

void validate(const RunConfig& c, std::vector<std::string>& errors) {
  if (!(c.length > 0.0)) errors.push_back("domain.length must be positive");
  if (c.n_modes < 1) errors.push_back("domain.n_modes must be >= 1");
  if (!(c.dt > 0.0)) errors.push_back("time.dt must be positive");
  if (c.horizon < 0.0) errors.push_back("time.T must be non-negative");
  if (c.scheme != "imex" && c.scheme != "rk4")
    errors.push_back("time.scheme must be imex or rk4");
  if (c.sample_stride < 1) errors.push_back("time.sample_stride must be >= 1");
  if (c.n_nodes < 2 || c.n_nodes % 2 != 0)
    errors.push_back("kernel.n_nodes must be an even count >= 2");
  if (c.s_max && !(*c.s_max > 0.0)) errors.push_back("kernel.s_max must be positive");
  if (!(c.gamma_safety > 0.0 && c.gamma_safety < 1.0))
    errors.push_back("kernel.gamma_safety must lie strictly in (0,1)");
  try {
    (void)parse_kernel_spec(c.kernel_spec);
  } catch (const std::exception& e) {
    errors.push_back(std::string("kernel.spec: ") + e.what());
  }
  if (!c.f_coeffs.empty()) {
    if (c.f_coeffs.size() % 2 != 0)
      errors.push_back("f.coeffs must have even length (odd degree)");
    else if (!(c.f_coeffs.front() > 0.0))
      errors.push_back("f.coeffs leading coefficient must be positive");
  }
  if (c.a_kind != "constant" && c.a_kind != "clamped_affine")
    errors.push_back("a.kind must be constant or clamped_affine");
  if (c.a_kind == "constant" && !(c.a_value > 0.0))
    errors.push_back("a.value must be positive");
  if (c.a_kind == "clamped_affine") {
    if (!(c.a_m > 0.0)) errors.push_back("a.m must be positive");
    if (!(c.a_m_tilde >= c.a_m)) errors.push_back("a.m_tilde must be >= a.m");
  }
  if (static_cast<int>(c.u0.size()) > c.n_modes)
    errors.push_back("initial.u0 has more entries than n_modes");
  if (static_cast<int>(c.forcing.size()) > c.n_modes)
    errors.push_back("domain.forcing has more entries than n_modes");
  bool any_phi_terms = false;
  for (const auto& mode : c.phi_terms)
    if (!mode.empty()) any_phi_terms = true;
  if (!c.phi_csv.empty() && any_phi_terms)
    errors.push_back("initial: give either phi<j> terms or phi_csv, not both");
  const int p = c.f_coeffs.empty() ? 1 : static_cast<int>(c.f_coeffs.size()) / 2;
  const int nc_min = std::max((3 * c.n_modes + 1) / 2, p * c.n_modes + 1);
  if (c.n_collocation && *c.n_collocation < nc_min)
    errors.push_back("domain.n_collocation too small: need >= " + std::to_string(nc_min));
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += " ";
    out += fmt(v[i]);
  }
  return out;
}

}  // namespace

ParseOutcome parse_config_text(const std::string& text) {
  ParseOutcome out;
  Raw raw = tokenize(text);
  out.errors = raw.errors;
  Reader rd(raw, out.errors);
  RunConfig c;

  c.length = rd.number("domain", "length", c.length);
  c.n_modes = rd.integer("domain", "n_modes", c.n_modes);
  if (rd.has("domain", "n_collocation"))
    c.n_collocation = rd.integer("domain", "n_collocation", 0);
  c.forcing = rd.list("domain", "forcing");

  c.kernel_spec = rd.word("kernel", "spec", c.kernel_spec);
  c.n_nodes = rd.integer("kernel", "n_nodes", c.n_nodes);
  if (rd.has("kernel", "s_max")) c.s_max = rd.number("kernel", "s_max", 0.0);
  c.gamma_safety = rd.number("kernel", "gamma_safety", c.gamma_safety);
  if (rd.has("kernel", "gamma")) c.gamma_override = rd.number("kernel", "gamma", 0.0);

  c.f_coeffs = rd.list("f", "coeffs");

  c.a_kind = rd.word("a", "kind", c.a_kind);
  c.a_value = rd.number("a", "value", c.a_value);
  c.a_base = rd.number("a", "base", c.a_base);
  c.a_slope = rd.number("a", "slope", c.a_slope);
  c.a_m = rd.number("a", "m", c.a_m);
  c.a_m_tilde = rd.number("a", "m_tilde", c.a_m_tilde);
  c.l_weight = rd.list("a", "l_weight");

  c.u0 = rd.list("initial", "u0");
  c.phi_csv = rd.word("initial", "phi_csv", "");
  c.phi_terms.assign(static_cast<std::size_t>(std::max(1, c.n_modes)), {});
  for (int j = 1; j <= c.n_modes; ++j) {
    const std::string key = "phi" + std::to_string(j);
    if (rd.has("initial", key)) {
      const std::string v = rd.take("initial", key);
      c.phi_terms[static_cast<std::size_t>(j - 1)] =
          parse_terms(v, out.errors, "initial." + key);
    }
  }

  c.dt = rd.number("time", "dt", c.dt);
  c.horizon = rd.number("time", "T", c.horizon);
  c.scheme = rd.word("time", "scheme", c.scheme);
  c.sample_stride = rd.integer("time", "sample_stride", c.sample_stride);

  c.out_dir = rd.word("output", "dir", c.out_dir);
  c.out_prefix = rd.word("output", "prefix", c.out_prefix);

  rd.finish({"domain", "kernel", "f", "a", "initial", "time", "output"});
  validate(c, out.errors);
  if (out.errors.empty()) out.config = std::move(c);
  return out;
}

ParseOutcome parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseOutcome out;
    out.errors.push_back("cannot open config file '" + path + "'");
    return out;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  os << "[domain]\n";
  os << "length = " << fmt(length) << "\n";
  os << "n_modes = " << n_modes << "\n";
  if (n_collocation) os << "n_collocation = " << *n_collocation << "\n";
  if (!forcing.empty()) os << "forcing = " << fmt_list(forcing) << "\n";
  os << "\n[kernel]\n";
  os << "spec = " << kernel_spec << "\n";
  os << "n_nodes = " << n_nodes << "\n";
  if (s_max) os << "s_max = " << fmt(*s_max) << "\n";
  os << "gamma_safety = " << fmt(gamma_safety) << "\n";
  if (gamma_override) os << "gamma = " << fmt(*gamma_override) << "\n";
  if (!f_coeffs.empty()) {
    os << "\n[f]\n";
    os << "coeffs = " << fmt_list(f_coeffs) << "\n";
  }
  os << "\n[a]\n";
  os << "kind = " << a_kind << "\n";
  if (a_kind == "constant") {
    os << "value = " << fmt(a_value) << "\n";
  } else {
    os << "base = " << fmt(a_base) << "\n";
    os << "slope = " << fmt(a_slope) << "\n";
    os << "m = " << fmt(a_m) << "\n";
    os << "m_tilde = " << fmt(a_m_tilde) << "\n";
    if (!l_weight.empty()) os << "l_weight = " << fmt_list(l_weight) << "\n";
  }
  os << "\n[initial]\n";
  if (!u0.empty()) os << "u0 = " << fmt_list(u0) << "\n";
  for (std::size_t j = 0; j < phi_terms.size(); ++j) {
    if (phi_terms[j].empty()) continue;
    os << "phi" << (j + 1) << " =";
    for (const ExpTerm& t : phi_terms[j])
      os << " " << fmt(t.amp) << ":" << fmt(t.rate);
    os << "\n";
  }
  if (!phi_csv.empty()) os << "phi_csv = " << phi_csv << "\n";
  os << "\n[time]\n";
  os << "dt = " << fmt(dt) << "\n";
  os << "T = " << fmt(horizon) << "\n";
  os << "scheme = " << scheme << "\n";
  os << "sample_stride = " << sample_stride << "\n";
  os << "\n[output]\n";
  os << "dir = " << out_dir << "\n";
  os << "prefix = " << out_prefix << "\n";
  return os.str();
}

std::string RunConfig::hash() const {
  const std::string text = echo();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

BuiltProblem build_problem(const RunConfig& cfg) {
  MemoryKernel kernel = parse_kernel_spec(cfg.kernel_spec);
  const int p = cfg.f_coeffs.empty() ? 1 : static_cast<int>(cfg.f_coeffs.size()) / 2;
  const int nc = cfg.n_collocation
                     ? *cfg.n_collocation
                     : std::max((3 * cfg.n_modes + 1) / 2, p * cfg.n_modes + 1);
  SpatialBasis basis(cfg.length, cfg.n_modes, nc);

  NonlocalCoefficient a =
      cfg.a_kind == "constant"
          ? NonlocalCoefficient::constant(cfg.a_value)
          : NonlocalCoefficient::clamped_affine(cfg.a_base, cfg.a_slope, cfg.a_m,
                                                cfg.a_m_tilde, cfg.l_weight);

  const double s_max = cfg.s_max ? *cfg.s_max : default_s_max(kernel);
  auto rule = std::make_shared<const WeightedQuadrature>(
      build_quadrature(kernel, cfg.n_nodes, s_max));

  const double gamma =
      cfg.gamma_override
          ? *cfg.gamma_override
          : gamma_select(a.m(), basis.lambda1(), kernel.delta(), cfg.gamma_safety);

  BuiltProblem built{ProblemConfig{basis, kernel, rule, std::nullopt,
                                   a, SpectralField{}, gamma, cfg.dt,
                                   cfg.horizon,
                                   cfg.scheme == "rk4" ? Scheme::rk4_explicit
                                                       : Scheme::imex,
                                   default_exec()},
                     SpectralField{}, PastTrajectory::exp_mix({}), gamma};
  if (!cfg.f_coeffs.empty()) built.problem.f = Nonlinearity(cfg.f_coeffs);

  built.problem.forcing.coeffs.assign(static_cast<std::size_t>(cfg.n_modes), 0.0);
  for (std::size_t j = 0; j < cfg.forcing.size(); ++j)
    built.problem.forcing.coeffs[j] = cfg.forcing[j];

  built.u0.coeffs.assign(static_cast<std::size_t>(cfg.n_modes), 0.0);
  for (std::size_t j = 0; j < cfg.u0.size(); ++j) built.u0.coeffs[j] = cfg.u0[j];

  if (!cfg.phi_csv.empty()) {
    std::ifstream in(cfg.phi_csv);
    if (!in) throw std::runtime_error("cannot open phi_csv '" + cfg.phi_csv + "'");
    std::vector<double> rows;
    std::vector<double> rs;
    std::string line;
    while (std::getline(in, line)) {
      line = trim(line);
      if (line.empty() || line.front() == '#' || line.front() == 'r') continue;
      for (char& ch : line)
        if (ch == ',') ch = ' ';
      const auto toks = split_ws(line);
      if (static_cast<int>(toks.size()) != cfg.n_modes + 1)
        throw std::runtime_error("phi_csv: expected r,b_1..b_n per row");
      rs.push_back(std::stod(toks[0]));
      for (int j = 1; j <= cfg.n_modes; ++j) rows.push_back(std::stod(toks[static_cast<std::size_t>(j)]));
    }
    if (rs.size() < 2) throw std::runtime_error("phi_csv: need at least two rows");
    const double dtr = rs[1] - rs[0];
    for (std::size_t i = 1; i < rs.size(); ++i)
      if (std::fabs(rs[i] - rs[i - 1] - dtr) > 1e-9 * std::max(1.0, std::fabs(dtr)))
        throw std::runtime_error("phi_csv: rows must be uniformly spaced in r");
    if (std::fabs(rs.back()) > 1e-12)
      throw std::runtime_error("phi_csv: last row must be at r = 0");
    built.phi = PastTrajectory::sampled(std::move(rows), cfg.n_modes, dtr);
  } else {
    built.phi = PastTrajectory::exp_mix(cfg.phi_terms);
  }
  return built;
}

}  // namespace memheat
