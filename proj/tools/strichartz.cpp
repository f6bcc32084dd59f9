// strichartz: command-line front end for the Hermite-basis Strichartz library.
//
// Exit codes: 0 pass, 2 a numerical check failed, 3 usage error, 1 other
// (I/O) failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "strichartz/strichartz.hpp"

namespace fs = std::filesystem;
using namespace strichartz;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFailure = 2;
constexpr int kExitUsage = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Global {
  unsigned threads = 0;
  std::string format;  // empty: command default
  std::string out = "-";
  double tolerance = kDefaultZeroTolerance;
};

std::string format_or(const Global& g, const std::string& fallback) { return g.format.empty() ? fallback : g.format; }

void emit(const Global& g, const std::string& text) {
  if (g.out == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + g.out);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + g.out);
}

std::string dump(const Json& j) { return j.dump(1) + "\n"; }

Json header(const std::string& command) {
  Json j;
  j["schema_version"] = kOutputSchemaVersion;
  j["command"] = command;
  return j;
}

// ------------------------------------------------------------------ lambda

LambdaTable obtain_table(int order, unsigned threads, const std::string& explicit_path = "") {
  if (!explicit_path.empty()) {
    LambdaTable t = LambdaTable::load(explicit_path);
    if (t.order() < order)
      throw UsageError("table " + explicit_path + " has order " + std::to_string(t.order()) + " < " +
                       std::to_string(order));
    return t;
  }
  const char* dir = std::getenv("STRICHARTZ_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return LambdaTable::build(order, threads);
  const fs::path path = fs::path(dir) / ("lambda-" + std::to_string(order) + "-" + kLambdaConvention + ".json");
  if (fs::is_regular_file(path)) {
    try {
      LambdaTable t = LambdaTable::load(path.string());
      if (t.order() == order) return t;
    } catch (const std::exception& e) {
      std::cerr << "strichartz: ignoring cache entry " << path << ": " << e.what() << '\n';
    }
  }
  LambdaTable t = LambdaTable::build(order, threads);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = path.string() + ".tmp";
  t.save(tmp.string());
  fs::rename(tmp, path);
  return t;
}

int run_lambda(const Global& g, int order) {
  if (order < 0 || order > kLambdaOrderCap)
    throw UsageError("--order must be in [0, " + std::to_string(kLambdaOrderCap) + "]");
  const LambdaTable t = obtain_table(order, g.threads);
  emit(g, t.to_json().dump(1) + "\n");
  std::cerr << "lambda: order " << t.order() << ", " << t.size() << " canonical entries, hash " << t.content_hash()
            << '\n';
  return kExitPass;
}

// -------------------------------------------------------------------- flow

struct FlowArgs {
  std::string init = "gaussian";
  int order = 8;
  std::string table;
  std::string direction = "ascent";
  int max_steps = 2000;
  double tolerance = 1e-8;
  double dt = 1e-4;
  double t_end = 1.0;
  int record_every = 100;
};

int run_flow(const Global& g, const FlowArgs& a, bool hamiltonian) {
  if (a.order < 0 || a.order > kLambdaOrderCap)
    throw UsageError("--order must be in [0, " + std::to_string(kLambdaOrderCap) + "]");
  CoeffVector alpha;
  try {
    alpha = parse_initial_condition(a.init, a.order);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  const LambdaTable table = obtain_table(a.order, g.threads, a.table);
  const StrichartzFunctional f(table);
  FlowReport rep;
  bool ok = true;
  if (hamiltonian) {
    HamiltonianFlowOptions o;
    o.dt = a.dt;
    o.t_end = a.t_end;
    o.record_every = a.record_every;
    rep = hamiltonian_flow(f, alpha, o);
    ok = rep.conserved;
    std::cerr << "flow hamiltonian: " << rep.steps << " steps, drift H " << format_double(rep.drift_H) << " P "
              << format_double(rep.drift_P) << " Q " << format_double(rep.drift_Q) << (ok ? "" : " (exceeds 1e-8)")
              << '\n';
  } else {
    GradientFlowOptions o;
    if (a.direction == "descent")
      o.direction = FlowDirection::descent;
    else if (a.direction != "ascent")
      throw UsageError("--direction must be ascent or descent");
    o.max_steps = a.max_steps;
    o.tolerance = a.tolerance;
    rep = gradient_flow(f, alpha, o);
    ok = rep.monotone;
    std::cerr << "flow gradient: " << rep.steps << " steps, S " << format_double(rep.S.back()) << ", residual "
              << format_double(rep.grad_residual.back()) << (rep.converged ? ", converged" : ", not converged")
              << (rep.monotone ? "" : ", NOT monotone") << '\n';
  }
  if (format_or(g, "csv") == "csv") {
    std::ostringstream os;
    write_flow_csv(os, rep);
    emit(g, os.str());
  } else {
    Json j = header(hamiltonian ? "flow hamiltonian" : "flow gradient");
    j["order"] = a.order;
    j["init"] = a.init;
    j["normalization"] = exact_number(table.normalization());
    j["report"] = flow_json(rep);
    emit(g, dump(j));
  }
  return ok ? kExitPass : kExitFailure;
}

// ----------------------------------------------------------------- hessian

int run_hessian_mode(const Global& g, int m, int K) {
  if (m < 0) throw UsageError("--m must be non-negative");
  if (K <= 2 * m) throw UsageError("--tail must exceed 2m");
  if (K > kDefaultOrderCap) throw UsageError("--tail exceeds the order cap");
  const auto h = assemble_hessian_1d(m, K);
  const auto s = spectrum_1d(h, g.tolerance);
  std::cerr << "hessian mode " << m << ": negative " << s.spectrum.negative << ", zero " << s.spectrum.zero
            << ", positive " << s.spectrum.positive << '\n';
  if (format_or(g, "csv") == "csv") {
    std::ostringstream os;
    write_spectrum_csv(os, s.spectrum);
    emit(g, os.str());
    return kExitPass;
  }
  Json j = header("hessian mode");
  j["m"] = m;
  j["tail_cutoff"] = K;
  j["spectrum"] = spectrum_json(s.spectrum);
  j["block_eigenvalues"] = exact_array(s.block_eigenvalues);
  j["tail"] = exact_array(s.tail);
  Json zm;
  if (m >= 1) zm["translation"] = exact_number(zero_mode_check_translation(m));
  zm["phase"] = exact_number(zero_mode_check_phase(m));
  zm["dilation"] = exact_number(zero_mode_check_dilation(m));
  j["zero_mode_checks"] = zm;
  if (m >= 1) {
    Json pr;
    std::size_t block = 0, tail = 0;
    for (double v : s.block_eigenvalues) block += v > g.tolerance;
    for (double v : s.tail) tail += v > g.tolerance;
    pr["block_positive"] = block;
    pr["tail_positive"] = tail;
    pr["ratio"] = exact_number(static_cast<double>(block + tail) / (2.0 * m));
    pr["tail_settled"] = tail_settled(s.tail);
    j["positive_ratio"] = pr;
  }
  emit(g, dump(j));
  return kExitPass;
}

int run_hessian_gaussian(const Global& g, int d, int N, const std::string& convention) {
  if (d < 1) throw UsageError("--dim must be >= 1");
  if (N < 1) throw UsageError("--nmax must be >= 1");
  HessianConvention c;
  try {
    c = parse_convention(convention);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  double size = 1.0;
  for (int j = 0; j < d; ++j) size *= (N + 1);
  if (size - 1.0 > static_cast<double>(kDefaultEigenSizeCap))
    throw UsageError("(nmax+1)^dim - 1 exceeds the eigensolver cap " + std::to_string(kDefaultEigenSizeCap));
  const auto h = assemble_hessian_gaussian(d, N, c, g.threads);
  const auto s = spectrum_gaussian(h, g.tolerance);
  std::cerr << "hessian gaussian d=" << d << " N=" << N << " (" << to_string(c) << "): negative "
            << s.spectrum.negative << ", zero " << s.spectrum.zero << ", positive " << s.spectrum.positive
            << ", gap " << format_double(s.gap) << '\n';
  if (format_or(g, "csv") == "csv") {
    std::ostringstream os;
    write_spectrum_csv(os, s.spectrum);
    emit(g, os.str());
  } else {
    Json j = header("hessian gaussian");
    j["dim"] = d;
    j["nmax"] = N;
    j["q"] = exact_number(h.q().value());
    j["convention"] = to_string(c);
    j["convention_factor"] = exact_number(h.factor());
    j["shift"] = exact_number(h.shift());
    j["spectrum"] = spectrum_json(s.spectrum);
    j["gap"] = std::isnan(s.gap) ? Json(nullptr) : exact_number(s.gap);
    if (N >= 2) {
      const auto z = gaussian_zero_mode_checks(h);
      j["zero_mode_checks"] = {{"translation", exact_number(z.translation)}, {"phase", exact_number(z.phase)}};
    }
    emit(g, dump(j));
  }
  return s.spectrum.positive == 0 ? kExitPass : kExitFailure;
}

// -------------------------------------------------------------- inequality

int run_inequality(const Global& g, int n_max, int detail) {
  if (n_max < 1) throw UsageError("--nmax must be >= 1");
  const auto r = binomial_sum_check(n_max, detail);
  Json j = header("inequality");
  j["n_max"] = n_max;
  j["passed"] = r.passed();
  j["equalities"] = r.equalities;
  j["violations"] = r.violations;
  j["key_steps_checked"] = r.key_steps_checked;
  j["key_step_failures"] = r.key_step_failures;
  j["direct_sum_cross_checks"] = r.cross_checks;
  j["margin_increasing_3_to_200"] = r.margin_increasing;
  Json margins = Json::array();
  for (const auto& [n, m] : r.margins) margins.push_back({{"n", n}, {"margin", m}, {"equality", m == "0"}});
  j["margins"] = std::move(margins);
  emit(g, dump(j));
  std::cerr << "inequality: n <= " << n_max << ", " << r.violations.size() << " violations, equalities at";
  for (int n : r.equalities) std::cerr << ' ' << n;
  std::cerr << '\n';
  return r.passed() ? kExitPass : kExitFailure;
}

int run_inequality_column(const Global& g, int d, int kmax, double q_value) {
  if (d < 1) throw UsageError("--dim must be >= 1");
  if (kmax < 1) throw UsageError("--kmax must be >= 1");
  const ExponentQ q = q_value > 0.0 ? ExponentQ(q_value) : ExponentQ::for_dimension(d);
  const auto sums = column_sum_sweep(d, kmax, q, g.threads);
  bool all = true;
  Json rows = Json::array();
  for (const auto& c : sums) {
    all = all && c.holds;
    Json k = Json::array();
    for (int v : c.k.entries()) k.push_back(v);
    rows.push_back({{"k", k}, {"lhs", exact_number(c.lhs)}, {"rhs", exact_number(c.rhs)}, {"holds", c.holds}});
  }
  Json j = header("inequality column");
  j["dim"] = d;
  j["kmax"] = kmax;
  j["q"] = exact_number(q.value());
  j["all_hold"] = all;
  j["columns"] = std::move(rows);
  emit(g, dump(j));
  std::cerr << "inequality column: " << sums.size() << " columns, " << (all ? "all hold" : "VIOLATION") << '\n';
  return all ? kExitPass : kExitFailure;
}

// -------------------------------------------------------------------- qmho

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--init: cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("--init: empty list");
  return out;
}

int run_qmho_flow(const Global& g, const std::string& init, double step, int steps) {
  if (!(step > 0.0) || step > 1e-2) throw UsageError("--step must be in (0, 1e-2]");
  if (steps < 0) throw UsageError("--steps must be non-negative");
  std::vector<double> alpha = parse_real_list(init);
  double p = 0.0;
  for (double v : alpha) p += v * v;
  if (!(p > 0.0)) throw UsageError("--init: zero vector");
  const auto tr = qmho_flow(alpha, step, steps);
  std::ostringstream os;
  const std::size_t shown = std::min<std::size_t>(alpha.size(), 4);
  os << "step,Q,norm";
  for (std::size_t k = 0; k < shown; ++k) os << ",alpha" << k;
  os << '\n';
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    os << i << ',' << format_double(tr.Q[i]) << ',' << format_double(tr.norm[i]);
    for (std::size_t k = 0; k < shown; ++k) os << ',' << format_double(tr.alpha[i][k]);
    os << '\n';
  }
  emit(g, os.str());
  std::cerr << "qmho flow: final Q " << format_double(tr.Q.back()) << '\n';
  return kExitPass;
}

int run_qmho_hessian(const Global& g, int m, int kmax) {
  if (m < 0 || kmax < 0) throw UsageError("--m and --kmax must be non-negative");
  std::ostringstream os;
  os << "k,value\n";
  for (int k = 0; k <= kmax; ++k)
    if (k != m) os << k << ',' << format_double(qmho_hessian_diag(m, k)) << '\n';
  emit(g, os.str());
  return kExitPass;
}

// ------------------------------------------------------------------ oracle

int run_oracle(const Global& g, int max_mode, int samples, std::uint64_t seed) {
  if (max_mode < 0 || max_mode > kLambdaOrderCap) throw UsageError("--max-mode out of range");
  if (samples < 0) throw UsageError("--samples must be non-negative");
  const LambdaTable table = obtain_table(max_mode, g.threads);
  const StrichartzFunctional f(table);
  const std::size_t size = static_cast<std::size_t>(max_mode) + 1;
  std::vector<std::pair<std::string, CoeffVector>> cases;
  for (int m = 0; m <= max_mode; ++m) cases.emplace_back("mode:" + std::to_string(m), unit_vector(size, m));
  for (int m = 0; m < max_mode; ++m) {
    CoeffVector a(size);
    a[static_cast<std::size_t>(m)] = 1.0;
    a[static_cast<std::size_t>(m) + 1] = 1.0;
    cases.emplace_back("pair:" + std::to_string(m) + "+" + std::to_string(m + 1), normalized(a));
  }
  for (int s = 0; s < samples; ++s)
    cases.emplace_back("random:" + std::to_string(seed + static_cast<std::uint64_t>(s)),
                       normalized(random_coefficients(size, seed + static_cast<std::uint64_t>(s))));
  double worst = 0.0;
  Json rows = Json::array();
  for (const auto& [name, a] : cases) {
    const double lam = f.numerator(a);
    const double direct = direct_quadrature_oracle(a);
    const double rel = std::abs(lam - direct) / std::abs(direct);
    worst = std::max(worst, rel);
    rows.push_back({{"case", name},
                    {"lambda_sum", exact_number(lam)},
                    {"direct", exact_number(direct)},
                    {"relative_error", exact_number(rel)}});
  }
  const bool ok = worst < 1e-6;
  Json j = header("oracle check");
  j["max_mode"] = max_mode;
  j["normalization"] = exact_number(table.normalization());
  j["max_relative_error"] = exact_number(worst);
  j["passed"] = ok;
  j["cases"] = std::move(rows);
  emit(g, dump(j));
  std::cerr << "oracle check: " << cases.size() << " cases, max relative error " << format_double(worst) << '\n';
  return ok ? kExitPass : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strichartz functional in the Hermite basis: tables, flows, Hessian spectra, inequalities"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("-o,--out", g.out, "output file ('-' for stdout)");
  app.add_option("--tol", g.tolerance, "zero-classification tolerance")->check(CLI::PositiveNumber);

  int lambda_order = 8;
  auto* lambda = app.add_subcommand("lambda", "build (or reuse) the Lambda table");
  lambda->add_option("--order", lambda_order, "truncation order N");

  FlowArgs fa;
  auto* flow = app.add_subcommand("flow", "gradient or Hamiltonian flow");
  flow->require_subcommand(1);
  auto add_common_flow = [&](CLI::App* sc) {
    sc->add_option("--init", fa.init, "gaussian | mode:m | gaussian+noise:eps:seed | JSON [[re,im],...] | file");
    sc->add_option("--order", fa.order, "truncation order N");
    sc->add_option("--table", fa.table, "Lambda table file to load");
  };
  auto* flow_grad = flow->add_subcommand("gradient", "projected gradient flow of S");
  add_common_flow(flow_grad);
  flow_grad->add_option("--direction", fa.direction, "ascent or descent")->check(CLI::IsMember({"ascent", "descent"}));
  flow_grad->add_option("--steps", fa.max_steps, "maximum steps")->check(CLI::PositiveNumber);
  flow_grad->add_option("--residual", fa.tolerance, "stop below this gradient residual")->check(CLI::PositiveNumber);
  auto* flow_ham = flow->add_subcommand("hamiltonian", "Hamiltonian flow (RK4)");
  add_common_flow(flow_ham);
  flow_ham->add_option("--dt", fa.dt, "time step")->check(CLI::PositiveNumber);
  flow_ham->add_option("--t", fa.t_end, "final time")->check(CLI::NonNegativeNumber);
  flow_ham->add_option("--record-every", fa.record_every, "steps between rows")->check(CLI::PositiveNumber);

  auto* hessian = app.add_subcommand("hessian", "constrained Hessian spectra");
  hessian->require_subcommand(1);
  int hm = 1, tail = kDefaultTailCutoff;
  auto* h_mode = hessian->add_subcommand("mode", "1d Hessian at the Hermite mode m");
  h_mode->add_option("--m", hm, "mode");
  h_mode->add_option("--tail", tail, "tail cutoff K");
  int dim = 1, nmax = 10;
  std::string convention = "gram-shift";
  auto* h_gauss = hessian->add_subcommand("gaussian", "Hessian at the Gaussian in dimension d");
  h_gauss->add_option("--dim", dim, "dimension d");
  h_gauss->add_option("--nmax", nmax, "per-coordinate truncation N");
  h_gauss->add_option("--convention", convention, "second-variation | gram-shift | iminus")
      ->check(CLI::IsMember({"second-variation", "gram-shift", "iminus"}));

  int ineq_nmax = 10000, ineq_detail = 200, col_dim = 1, col_kmax = 10;
  double col_q = 0.0;
  auto* ineq = app.add_subcommand("inequality", "exact check of the binomial-sum inequality");
  ineq->add_option("--nmax", ineq_nmax, "largest n");
  ineq->add_option("--detail", ineq_detail, "emit per-n margins up to this n");
  auto* column = ineq->add_subcommand("column", "column-sum inequality in dimension d");
  column->add_option("--dim", col_dim, "dimension d");
  column->add_option("--kmax", col_kmax, "largest |k|");
  column->add_option("--q", col_q, "exponent q (default 2 + 4/d)");

  auto* qmho = app.add_subcommand("qmho", "harmonic-oscillator reference model");
  qmho->require_subcommand(1);
  std::string q_init = "1,0.1,0.1";
  double q_step = 1e-3;
  int q_steps = 5000, q_m = 0, q_kmax = 10;
  auto* q_flow = qmho->add_subcommand("flow", "Euler gradient flow of Q");
  q_flow->add_option("--init", q_init, "comma-separated real coefficients");
  q_flow->add_option("--step", q_step, "Euler step");
  q_flow->add_option("--steps", q_steps, "number of steps");
  auto* q_hess = qmho->add_subcommand("hessian", "Hessian diagonal 4(k-m)");
  q_hess->add_option("--m", q_m, "mode");
  q_hess->add_option("--kmax", q_kmax, "largest k");

  auto* oracle = app.add_subcommand("oracle", "cross-checks");
  oracle->require_subcommand(1);
  int o_max = 4, o_samples = 8;
  std::uint64_t o_seed = 1;
  auto* o_check = oracle->add_subcommand("check", "Lambda-sum numerator vs direct space-time quadrature");
  o_check->add_option("--max-mode", o_max, "largest mode");
  o_check->add_option("--samples", o_samples, "random vectors");
  o_check->add_option("--seed", o_seed, "seed of the first random vector");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (lambda->parsed()) return run_lambda(g, lambda_order);
    if (flow_grad->parsed()) return run_flow(g, fa, false);
    if (flow_ham->parsed()) return run_flow(g, fa, true);
    if (h_mode->parsed()) return run_hessian_mode(g, hm, tail);
    if (h_gauss->parsed()) return run_hessian_gaussian(g, dim, nmax, convention);
    if (column->parsed()) return run_inequality_column(g, col_dim, col_kmax, col_q);
    if (ineq->parsed()) return run_inequality(g, ineq_nmax, ineq_detail);
    if (q_flow->parsed()) return run_qmho_flow(g, q_init, q_step, q_steps);
    if (q_hess->parsed()) return run_qmho_hessian(g, q_m, q_kmax);
    if (o_check->parsed()) return run_oracle(g, o_max, o_samples, o_seed);
  } catch (const UsageError& e) {
    std::cerr << "strichartz: " << e.what() << '\n';
    return kExitUsage;
  } catch (const VerificationFailure& e) {
    std::cerr << "strichartz: check failed: " << e.what() << '\n';
    return kExitFailure;
  } catch (const ConvergenceError& e) {
    std::cerr << "strichartz: check failed: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "strichartz: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "strichartz: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::length_error& e) {
    std::cerr << "strichartz: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "strichartz: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
