#include "spde/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spde/estimators.hpp"
#include "spde/monotone_graph.hpp"
#include "spde/strfmt.hpp"

namespace spde {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    q += c;
    if (c == '"') q += '"';
  }
  return q + "\"";
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

ExperimentConfig ExperimentConfig::parse_lines(
    const std::vector<std::string>& lines) {
  ExperimentConfig cfg;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string line = trim(lines[n]);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(
          cat("config line ", n + 1, " has no '=': ", line));
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ConfigError(cat("config line ", n + 1, " has empty key"));
    cfg.kv_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return parse_lines(lines);
}

std::string ExperimentConfig::get(const std::string& key,
                                  const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

std::string ExperimentConfig::require(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

double ExperimentConfig::get_num(const std::string& key,
                                 double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError(cat("key ", key, " is not numeric: ", it->second));
  }
}

std::uint64_t ExperimentConfig::get_uint(const std::string& key,
                                         std::uint64_t fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw ConfigError(
        cat("key ", key, " is not an integer: ", it->second));
  }
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
}

std::string ExperimentConfig::normalized() const {
  std::string out;
  for (const auto& [k, v] : kv_) out += k + " = " + v + "\n";
  return out;
}

std::string ExperimentConfig::digest() const {
  return hex16(fnv1a(normalized()));
}

namespace {

struct Instruments {
  std::size_t mesh_m;
  std::size_t modes;
  std::uint64_t seed;
  std::size_t n_paths;
  SolverConfig solver;
  DirichletLaplacian a;
  MonotoneGraph f;
  DiffusionCoefficient b;
  WienerDriver wd;
  GridFunction u0;
};

DiffusionCoefficient build_noise(const ExperimentConfig& cfg,
                                 const DirichletLaplacian& a) {
  const auto m = static_cast<std::size_t>(cfg.get_num("noise.modes", 8));
  const std::string kind = cfg.get("noise.kind", "additive");
  const double scale = cfg.get_num("noise.scale", 0.1);
  if (kind == "none") {
    std::vector<GridFunction> cols(1, GridFunction(a.dimension()));
    return DiffusionCoefficient::additive(cols);
  }
  if (kind == "additive") {
    std::vector<GridFunction> cols;
    for (std::size_t k = 1; k <= m; ++k) {
      GridFunction col = a.eigenvector(std::min(k, a.dimension()));
      col *= scale * std::pow(2.0, -static_cast<double>(k - 1));
      cols.push_back(std::move(col));
    }
    return DiffusionCoefficient::additive(std::move(cols));
  }
  if (kind == "nemytskii") {
    const std::string bspec = cfg.get("noise.b", "linear:0.5");
    const std::string wspec = cfg.get("noise.weights", "geometric:0.5");
    double ratio = 0.5;
    if (wspec.rfind("geometric:", 0) == 0)
      ratio = std::stod(wspec.substr(10));
    else
      throw ConfigError("unknown noise.weights: " + wspec);
    std::vector<double> weights;
    double wsum2 = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      weights.push_back(scale * std::pow(ratio, static_cast<double>(k)));
      wsum2 += weights.back() * weights.back();
    }
    std::vector<DiffusionCoefficient::ScalarFn> fns;
    double blip = 1.0;
    if (bspec.rfind("linear:", 0) == 0) {
      const double kappa = std::stod(bspec.substr(7));
      blip = std::abs(kappa);
      for (std::size_t k = 0; k < m; ++k)
        fns.push_back([kappa](double x) { return kappa * x; });
    } else if (bspec == "sin") {
      for (std::size_t k = 0; k < m; ++k)
        fns.push_back([](double x) { return std::sin(x); });
    } else {
      throw ConfigError("unknown noise.b: " + bspec);
    }
    return DiffusionCoefficient::nemytskii_diagonal(
        std::move(fns), std::move(weights), blip * std::sqrt(wsum2));
  }
  throw ConfigError("unknown noise.kind: " + kind);
}

GridFunction build_initial(const ExperimentConfig& cfg,
                           const DirichletLaplacian& a) {
  const std::string kind = cfg.get("initial.kind", "eigen:1");
  const double scale = cfg.get_num("initial.scale", 1.0);
  GridFunction u0(a.dimension());
  if (kind == "zero") return u0;
  if (kind.rfind("eigen:", 0) == 0) {
    const auto k = static_cast<std::size_t>(std::stoul(kind.substr(6)));
    if (k < 1 || k > a.dimension())
      throw ConfigError("initial eigen index out of range");
    u0 = a.eigenvector(k);
  } else if (kind.rfind("constant:", 0) == 0) {
    const double c = std::stod(kind.substr(9));
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = c;
  } else {
    throw ConfigError("unknown initial.kind: " + kind);
  }
  u0 *= scale;
  return u0;
}

Instruments build_instruments(const ExperimentConfig& cfg) {
  const auto mesh_m = static_cast<std::size_t>(cfg.get_num("mesh.M", 63));
  const std::string op = cfg.get("operator.kind", "dirichlet_laplacian");
  if (op != "dirichlet_laplacian")
    throw ConfigError("unknown operator.kind: " + op);
  SolverConfig sc;
  sc.T = cfg.get_num("solver.T", 0.5);
  sc.dt = cfg.get_num("solver.dt", 1e-3);
  sc.lambda = cfg.get_num("solver.lambda", 0.0);
  sc.eta = cfg.get_num("solver.eta", 0.0);
  sc.alpha = cfg.get_num("solver.alpha", 0.0);
  sc.q = cfg.get_num("solver.q", 2.0);
  sc.p = cfg.get_num("solver.p", 2.0);
  DirichletLaplacian a(mesh_m);
  const auto modes = static_cast<std::size_t>(cfg.get_num("noise.modes", 8));
  Instruments ins{mesh_m,
                  modes,
                  cfg.get_uint("noise.seed", cfg.get_uint("seed", 1)),
                  static_cast<std::size_t>(cfg.get_num("paths", 200)),
                  sc,
                  a,
                  make_graph(cfg.get("graph.kind", "sign")),
                  build_noise(cfg, a),
                  WienerDriver(modes, cfg.get_uint("noise.seed",
                                                   cfg.get_uint("seed", 1))),
                  build_initial(cfg, a)};
  return ins;
}

}  // namespace

RegimeReport validate(const ExperimentConfig& cfg) {
  RegimeReport rep;
  MonotoneGraph f = [&] {
    try {
      return make_graph(cfg.get("graph.kind", "sign"));
    } catch (const GraphError& e) {
      throw ConfigError(e.what());
    }
  }();
  const double q = cfg.get_num("solver.q", 2.0);
  const double p = cfg.get_num("solver.p", 2.0);
  const double d = f.growth_exponent();
  const double t = cfg.get_num("solver.T", 0.5);
  const double dt = cfg.get_num("solver.dt", 1e-3);
  const double eta = cfg.get_num("solver.eta", 0.0);
  const auto n_paths = static_cast<std::size_t>(cfg.get_num("paths", 200));

  if (q < 2.0) throw ConfigError("solver.q must be >= 2");
  if (p <= 0.0) throw ConfigError("solver.p must be > 0");
  if (t <= 0.0 || dt <= 0.0) throw ConfigError("solver.T and solver.dt must be > 0");
  SolverConfig probe;
  probe.T = t;
  probe.dt = dt;
  try {
    probe.steps();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (n_paths < 30) throw ConfigError("paths must be >= 30 for any estimate");
  if (eta * t > 20.0)
    rep.notes.push_back("warning: eta*T > 20, growth factor is large");

  rep.p_star = p * (2.0 * d + q - 2.0) / q;
  rep.strict_mild = rep.p_star > d;
  rep.generalized = true;  // p > 0, q >= 2 already enforced

  bool zero_in_f0 = f(0.0).contains(0.0);
  bool even = false;
  {
    const ConvexPotential F = potential_from_graph(f);
    std::vector<double> grid;
    for (int i = 0; i <= 64; ++i) grid.push_back(-4.0 + 0.125 * i);
    even = check_symmetry(F, grid).symmetric;
  }
  const bool sigma_declared = cfg.has("operator.sigma");
  rep.mild = p >= q && q >= 2.0 && zero_in_f0 && even && sigma_declared;

  rep.strongest = rep.strict_mild ? "strict_mild"
                  : rep.mild      ? "mild"
                                  : "generalized";

  const std::string requested = cfg.get("regime", "generalized");
  if (requested == "strict_mild") {
    if (!rep.strict_mild)
      throw ConfigError(cat("strict_mild rejected: p* = p(2d+q-2)/q = ",
                            rep.p_star, " is not > d = ", d));
  } else if (requested == "mild") {
    if (p < q) throw ConfigError("mild regime requires p >= q");
    if (!zero_in_f0) throw ConfigError("mild regime requires 0 in f(0)");
    if (!even)
      throw ConfigError("mild regime requires an even potential (symmetry "
                        "check failed)");
    if (!sigma_declared)
      throw ConfigError("mild regime requires operator.sigma to be declared");
  } else if (requested != "generalized") {
    throw ConfigError("unknown regime: " + requested);
  }
  rep.notes.push_back(cat("p_star = ", num_str(rep.p_star)));
  return rep;
}

namespace {

struct StudyRow {
  std::string label;
  double value = 0.0;
  double ci = 0.0;
  bool pass = true;
};

struct RunOutput {
  std::vector<StudyRow> rows;
  std::vector<std::string> trajectory_lines;  // optional trajectory.csv body
  // little-endian dumps: u64 M, u64 steps+1, then row-major doubles
  std::vector<std::pair<std::string, std::string>> state_dumps;
};

std::string dump_states(const TrajectoryRecord& rec) {
  std::string bytes;
  auto put_u64 = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<char>(v >> (8 * i)));
  };
  auto put_f64 = [&](double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    put_u64(v);
  };
  put_u64(rec.states.front().size());
  put_u64(rec.states.size());
  for (const auto& u : rec.states)
    for (double v : u.values) put_f64(v);
  return bytes;
}

RunOutput execute_study(const ExperimentConfig& cfg, const Instruments& ins,
                        std::ostream& log, const RunOptions& opts) {
  RunOutput out;
  const std::string study = cfg.get("study.kind", "smoke");
  log << "study " << study << "\n";

  if (study == "smoke") {
    const std::size_t k = ins.solver.steps();
    const std::size_t stride = std::max<std::size_t>(1, (k + 15) / 16);
    std::vector<double> samples(ins.n_paths);
    for (std::size_t path = 0; path < ins.n_paths; ++path) {
      const TrajectoryRecord rec = solve_proximal(
          ins.solver, ins.f, ins.b, ins.a, ins.u0, ins.wd, path);
      if (opts.dump_states)
        out.state_dumps.emplace_back(cat("states_", path, ".bin"),
                                     dump_states(rec));
      samples[path] =
          path_sup_functional(rec, ins.solver.p, ins.solver.q,
                              ins.solver.alpha);
      const std::vector<double> slack =
          ito_inequality_residual(rec, ins.solver.eta, ins.solver.q);
      for (std::size_t j = stride; j <= k; j += stride) {
        GridFunction abs_g = rec.selections[j - 1];
        for (auto& v : abs_g.values) v = std::abs(v);
        out.trajectory_lines.push_back(cat(
            path, ",", num_str(rec.times[j]), ",",
            num_str(norm_q(rec.states[j], ins.solver.q)), ",",
            num_str(norm_q(abs_g, 1.0)), ",",
            num_str(gamma_norm(rec.noise_values[j - 1], ins.solver.q)), ",",
            num_str(slack[j])));
      }
    }
    const MonteCarloEstimate est = power_mean(samples, ins.solver.p, "hp");
    out.rows.push_back({"hp_norm", est.value, est.half_width, true});
    return out;
  }

  if (study == "cauchy") {
    const std::vector<double> lambdas = parse_list(cfg.get(
        "study.lambdas", "1,0.5,0.25,0.125,0.0625,0.03125,0.015625"));
    const CauchyStudyReport rep = cauchy_in_lambda_study(
        ins.solver, ins.f, ins.b, ins.a, ins.u0, lambdas, ins.wd,
        ins.n_paths);
    for (std::size_t i = 0; i < rep.distances.size(); ++i)
      out.rows.push_back({cat("pair lambda+mu=", rep.lambda_pairs[i]),
                          rep.distances[i].value, rep.distances[i].half_width,
                          rep.pass});
    out.rows.push_back({"slope", rep.slope, 0.0, rep.pass});
    return out;
  }

  if (study == "apriori") {
    const std::vector<double> scales =
        parse_list(cfg.get("study.scales", "0.5,1,2"));
    const std::vector<double> lambdas =
        parse_list(cfg.get("study.lambdas", "1,0.25,0.0625,0"));
    const AprioriStudyReport rep =
        apriori_bound_study(ins.solver, ins.f, ins.b, ins.a, ins.u0, scales,
                            lambdas, ins.wd, ins.n_paths);
    for (std::size_t s = 0; s < scales.size(); ++s)
      for (std::size_t l = 0; l < lambdas.size(); ++l)
        out.rows.push_back({cat("scale=", scales[s], " lambda=",
                                lambdas[l]),
                            rep.ratio[s][l], 0.0, rep.pass});
    return out;
  }

  if (study == "lipschitz") {
    const std::vector<double> distances =
        parse_list(cfg.get("study.distances", "1,0.25"));
    const DependenceStudyReport rep = lipschitz_dependence_study(
        ins.solver, ins.f, ins.b, ins.a, ins.u0, ins.a.eigenvector(2),
        distances, ins.wd, ins.n_paths);
    for (std::size_t i = 0; i < rep.constant.size(); ++i)
      out.rows.push_back({cat("distance=", rep.perturbation[i]),
                          rep.constant[i], 0.0, rep.pass});
    return out;
  }

  if (study == "two_noise") {
    const std::vector<double> deltas =
        parse_list(cfg.get("study.deltas", "1,0.25,0.0625"));
    std::vector<GridFunction> base;
    base.push_back(0.1 * ins.a.eigenvector(1));
    const DependenceStudyReport rep = two_noise_study(
        ins.solver, ins.f, base, ins.a.eigenvector(2), deltas, ins.a, ins.u0,
        ins.wd, ins.n_paths);
    for (std::size_t i = 0; i < rep.constant.size(); ++i)
      out.rows.push_back({cat("delta=", rep.perturbation[i]),
                          rep.constant[i], 0.0, rep.pass});
    return out;
  }

  if (study == "maximal") {
    const std::vector<double> p_list =
        parse_list(cfg.get("study.p_list", "1,2,4"));
    const std::vector<double> scales =
        parse_list(cfg.get("study.scale_list", "0.25,1,4"));
    std::vector<GridFunction> cols;
    cols.push_back(0.5 * ins.a.eigenvector(1));
    const MaximalInequalityReport rep = maximal_inequality_study(
        ins.a, cols, p_list, scales, ins.solver.q, ins.solver, ins.wd,
        ins.n_paths);
    for (const auto& r : rep.rows)
      out.rows.push_back({cat("p=", r.p, " c=", r.scale), r.ratio,
                          0.0, rep.pass});
    return out;
  }

  if (study == "integrability") {
    const std::vector<double> extra =
        parse_list(cfg.get("study.lambdas", "0.0625,0.015625"));
    const CompositeGraphs comp = composite_graphs(ins.f, ins.solver.q);
    const IntegrabilityReport rep = selection_integrability_certificate(
        ins.solver, ins.f, comp, ins.b, ins.a, ins.u0, extra, ins.wd,
        ins.n_paths);
    for (const auto& r : rep.rows) {
      out.rows.push_back({r.label + " pairing", r.pairing, 0.0, rep.pass});
      out.rows.push_back({r.label + " potential", r.potential, 0.0, rep.pass});
      out.rows.push_back({r.label + " conjugate", r.conjugate, 0.0, rep.pass});
    }
    return out;
  }

  if (study == "gamma") {
    const auto n_outer =
        static_cast<std::size_t>(cfg.get_num("study.outer", 5));
    const GammaContractionReport rep =
        gamma_contraction_study(ins.solver, ins.f, ins.b, ins.a, ins.u0,
                                ins.wd, ins.n_paths, n_outer);
    for (std::size_t i = 0; i < rep.iterate_distance.size(); ++i)
      out.rows.push_back({cat("iterate ", i + 1),
                          rep.iterate_distance[i], 0.0, rep.pass});
    out.rows.push_back({"max ratio upper95", rep.max_ratio_upper95, 0.0,
                        rep.pass});
    return out;
  }

  throw ConfigError("unknown study.kind: " + study);
}

void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << body;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                   std::ostream& log, const RunOptions& opts) {
  const RegimeReport regime = validate(cfg);
  const Instruments ins = build_instruments(cfg);
  const std::string digest = cfg.digest();
  log << "config digest " << digest << ", regime " << regime.strongest
      << "\n";
  if (opts.threads > 1)
    log << "threads " << opts.threads
        << " requested; paths execute sequentially, results are "
           "schedule-independent\n";

  const RunOutput out = execute_study(cfg, ins, log, opts);
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  bool all_pass = true;
  std::string study_csv = "label,value,ci,verdict,config_digest\n";
  for (const auto& r : out.rows) {
    all_pass = all_pass && r.pass;
    study_csv += cat(csv_field(r.label), ",", num_str(r.value), ",",
                     num_str(r.ci), ",", r.pass ? "PASS" : "FAIL", ",",
                     digest, "\n");
  }

  std::string report_txt =
      cat("config ", digest, "\nregime ", regime.strongest, "\n");
  for (const auto& n : regime.notes) report_txt += n + "\n";
  for (const auto& r : out.rows)
    {
      std::string label = r.label;
      label.resize(std::max<std::size_t>(label.size(), 40), ' ');
      report_txt += cat(label, " ", num_str(r.value), " ",
                        r.pass ? "PASS" : "FAIL", "\n");
    }
  report_txt += std::string("VERDICT ") + (all_pass ? "PASS" : "FAIL") + "\n";

  const std::string echo =
      cfg.normalized() + "# digest " + digest + "\n";

  std::vector<std::pair<std::string, std::string>> files = {
      {"config.echo", echo},
      {"study.csv", study_csv},
      {"report.txt", report_txt}};
  if (!out.trajectory_lines.empty()) {
    std::string traj =
        "path,t,u_norm_q,g_norm_1,b_gamma,slack,config_digest\n";
    for (const auto& l : out.trajectory_lines)
      traj += l + "," + digest + "\n";
    files.emplace_back("trajectory.csv", std::move(traj));
  }
  for (const auto& [name, body] : out.state_dumps)
    files.emplace_back(name, body);

  std::string sums = "digest " + digest + "\n";
  for (const auto& [name, body] : files) {
    write_file(fs::path(out_dir) / name, body);
    sums += cat(hex16(fnv1a(body)), " ", name, "\n");
  }
  write_file(fs::path(out_dir) / "checksums.txt", sums);
  log << (all_pass ? "all studies PASS" : "FAIL present") << "\n";
  return all_pass ? 0 : 1;
}

int report_directory(const std::string& dir, std::ostream& out) {
  namespace fs = std::filesystem;
  auto slurp = [&](const std::string& name) -> std::string {
    std::ifstream in(fs::path(dir) / name, std::ios::binary);
    if (!in) throw std::runtime_error("missing file: " + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  std::string sums;
  try {
    sums = slurp("checksums.txt");
  } catch (const std::exception& e) {
    out << "integrity error: " << e.what() << "\n";
    return 2;
  }
  std::string digest;
  std::stringstream ss(sums);
  std::string line;
  while (std::getline(ss, line)) {
    std::stringstream ls(line);
    std::string a, b;
    ls >> a >> b;
    if (a == "digest") {
      digest = b;
      continue;
    }
    std::string body;
    try {
      body = slurp(b);
    } catch (const std::exception& e) {
      out << "integrity error: " << e.what() << "\n";
      return 2;
    }
    if (hex16(fnv1a(body)) != a) {
      out << "integrity error: checksum mismatch for " << b << "\n";
      return 2;
    }
  }

  const std::string study = slurp("study.csv");
  bool any_fail = false;
  std::stringstream cs(study);
  bool header = true;
  while (std::getline(cs, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.find(",FAIL,") != std::string::npos) any_fail = true;
    const auto last = line.rfind(',');
    if (last != std::string::npos && !digest.empty() &&
        line.substr(last + 1) != digest) {
      out << "integrity error: mixed config digests in study.csv\n";
      return 2;
    }
  }
  out << slurp("report.txt");
  return any_fail ? 1 : 0;
}

}  // namespace spde
