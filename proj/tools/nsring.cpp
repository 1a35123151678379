// nsring: command-line front end for the ring coloring toolkit.

#include "nsring/bounds.hpp"
#include "nsring/frames.hpp"
#include "nsring/lp.hpp"
#include "nsring/nonsignal_lp.hpp"
#include "nsring/qsim.hpp"
#include "nsring/rational.hpp"
#include "nsring/ring_model.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace nsring;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string show(const Rational& q) { return to_string(q) + " (" + to_decimal(q, 12) + ")"; }

Rational rational_arg(const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  return out;
}

// Beta sets, optionally cached as CSV under NONSIGNAL_CACHE_DIR.
std::optional<fs::path> cache_file(const std::string& kind, int size, bool proper_only) {
  const char* dir = std::getenv("NONSIGNAL_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return std::nullopt;
  fs::create_directories(dir);
  return fs::path(dir) / ("beta-" + kind + "-" + std::to_string(size) + (proper_only ? "-proper" : "-all") + ".csv");
}

std::vector<BetaVectorRing> ring_betas(int n, bool proper_only) {
  const auto file = cache_file("ring", n, proper_only);
  if (file && fs::exists(*file)) {
    std::ifstream in(*file);
    return read_beta_ring_csv(in, n);
  }
  auto set = distinct_beta_set_ring(n, proper_only);
  if (file) {
    std::ofstream out(*file);
    write_beta_csv(out, set);
  }
  return set;
}

std::vector<BetaVectorSegment> segment_betas(int k, bool proper_only) {
  const auto file = cache_file("segment", k, proper_only);
  if (file && fs::exists(*file)) {
    std::ifstream in(*file);
    return read_beta_segment_csv(in, k);
  }
  auto set = distinct_beta_set_segment(k, proper_only);
  if (file) {
    std::ofstream out(*file);
    write_beta_csv(out, set);
  }
  return set;
}

BiasSolve ring_bias(int n) {
  if (n < 5) throw UsageError("--ring must be at least 5");
  return bias_lp_ring(n, ring_betas(n, true));
}

BiasSolve segment_bias(int k) {
  if (k < 4) throw UsageError("--segment must be at least 4");
  return bias_lp_segment(k, segment_betas(k, true));
}

void print_witness(const BiasWitness& w) {
  for (std::size_t i = 0; i < w.support_size(); ++i) {
    if (sgn(w.p[i]) == 0 && sgn(w.p_prime[i]) == 0) continue;
    std::cout << "  " << w.support_label(i) << ": p = " << to_string(w.p[i]) << ", p' = " << to_string(w.p_prime[i])
              << "\n";
  }
}

// Common flags of ring-lp and segment-lp.
struct LpFlags {
  int size = 0;
  int r = 1;
  bool color_sym = false;
  bool reflection = false;
  bool no_class_reduction = false;
  bool exact = false;
  bool dump_constraints = false;
  std::optional<int> max_frames;
  std::optional<int> max_total_length;
  std::string out;
  std::string cert;
};

void add_lp_flags(CLI::App* cmd, LpFlags& f, const char* size_flag, bool ring) {
  cmd->add_option(size_flag, f.size, ring ? "Ring size n" : "Segment length k")->required();
  cmd->add_option("--r", f.r, "Non-signaling distance (gap)")->check(CLI::NonNegativeNumber);
  if (ring) cmd->add_flag("--no-class-reduction", f.no_class_reduction, "One variable per coloring");
  cmd->add_flag("--color-sym", f.color_sym, "Merge colorings related by color permutations");
  cmd->add_flag("--reflection", f.reflection, "Also merge mirror images (requires --color-sym)");
  cmd->add_flag("--exact", f.exact, "Skip the floating-point presolve");
  cmd->add_flag("--dump-constraints", f.dump_constraints, "Print the marginal-equality family and exit");
  cmd->add_option("--max-frames", f.max_frames, "Largest number of frames t");
  cmd->add_option("--max-total-length", f.max_total_length, "Largest total frame length");
  cmd->add_option("--out", f.out, "Write the LP as JSON");
  cmd->add_option("--cert", f.cert, "Write the optimality certificate as JSON");
}

int run_lp(const LpFlags& f, bool ring, unsigned threads) {
  BuildOptions opts;
  opts.budget.max_frames = f.max_frames;
  opts.budget.max_total_length = f.max_total_length;
  opts.reflection = f.reflection;
  opts.threads = threads;
  if (f.reflection && !f.color_sym) throw UsageError("--reflection requires --color-sym");
  if (ring && f.size < 3) throw UsageError("--n must be at least 3");
  if (!ring && f.size < 2) throw UsageError("--k must be at least 2");
  const Context ctx = ring ? Context::ring(f.size) : Context::segment(f.size);
  if (f.dump_constraints) {
    dump_constraints(std::cout, ctx, f.r, opts.budget);
    return 0;
  }
  const NonsignalLP model = ring ? build_ring_lp(f.size, f.r, !f.no_class_reduction, f.color_sym, opts)
                                 : build_segment_lp(f.size, f.r, f.color_sym, opts);
  if (!f.out.empty()) {
    auto out = open_out(f.out);
    write_lp_json(out, model.lp);
  }
  const SolveResult res = f.exact ? solve_exact(model.lp) : solve_via_presolve(model.lp);
  if (res.status != SolveStatus::Optimal) {
    std::cerr << "LP not solved: " << res.message << "\n";
    return kExitCheckFailed;
  }
  if (!f.cert.empty()) {
    auto out = open_out(f.cert);
    write_certificate_json(out, res.certificate);
  }
  const VerifyResult check = verify_certificate(model.lp, res.certificate);
  std::cout << "optimum = " << show(res.certificate.objective) << "\n";
  std::cout << "variables = " << model.lp.num_variables() << ", rows = " << model.lp.num_rows()
            << ", independent rows = " << res.stats.selected_rows << "\n";
  std::cout << "certificate: " << (check.accepted() ? "verified" : "REJECTED: " + check.message) << "\n";
  return check.accepted() ? 0 : kExitCheckFailed;
}

void write_csv_rational(std::ostream& out, const Rational& q) { out << to_string(q) << ',' << to_decimal(q, 15); }

int run_figures(int which, const std::string& dir, int n_max, const std::vector<int>& ns, unsigned threads) {
  fs::create_directories(dir);
  if (which == 4) {
    if (n_max < 11) throw UsageError("--n-max must be at least 11");
    auto out = open_out((fs::path(dir) / "bias-vs-n.csv").string());
    out << "n,delta,delta_float,epsilon_lower,epsilon_lower_float\n";
    for (int n = 11; n <= n_max; ++n) {
      const auto solve = ring_bias(n);
      const auto& w = solve.witness;
      const Rational g = sgn(w.delta) > 0 ? gamma(w, threads) : Rational(0);
      out << n << ',';
      write_csv_rational(out, w.delta);
      out << ',';
      write_csv_rational(out, error_lower_bound(w.delta, g).epsilon_lower);
      out << '\n';
      std::cout << "n = " << n << ": delta = " << show(w.delta) << "\n";
    }
    return 0;
  }
  if (which == 5) {
    for (int n : ns) {
      const auto solve = ring_bias(n);
      const auto& w = solve.witness;
      auto out = open_out((fs::path(dir) / ("witness-n" + std::to_string(n) + ".csv")).string());
      out << "d,p,p_float,p_prime,p_prime_float\n";
      for (std::size_t i = 0; i < w.support_size(); ++i) {
        out << w.support_label(i) << ',';
        write_csv_rational(out, w.p[i]);
        out << ',';
        write_csv_rational(out, w.p_prime[i]);
        out << '\n';
      }
      std::cout << "n = " << n << ": delta = " << show(w.delta) << "\n";
    }
    return 0;
  }
  if (which == 6) {
    const auto solve = segment_bias(15);
    const auto& w = solve.witness;
    auto out = open_out((fs::path(dir) / "witness-grid-k15.csv").string());
    out << "u,v,p,p_float,p_prime,p_prime_float\n";
    const auto pairs = segment_pairs(15);
    for (std::size_t i = 0; i < w.support_size(); ++i) {
      out << pairs[i].u << ',' << pairs[i].v << ',';
      write_csv_rational(out, w.p[i]);
      out << ',';
      write_csv_rational(out, w.p_prime[i]);
      out << '\n';
    }
    std::cout << "k = 15: delta = " << show(w.delta) << "\n";
    return 0;
  }
  throw UsageError("--which must be 4, 5 or 6");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-signaling bounds for 3-coloring rings and segments"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 0;
  std::uint64_t seed = 1;
  app.add_option("--threads", threads, "Worker threads (0 = available parallelism)");
  app.add_option("--seed", seed, "Seed for randomized subcommands");

  int count_l = 0;
  auto* count = app.add_subcommand("count", "Proper segment colorings with equal (a) and different (b) endpoints");
  count->add_option("--l", count_l, "Segment length (edges)")->required()->check(CLI::NonNegativeNumber);

  int up_n = 0, up_d = 0;
  auto* uprob = app.add_subcommand("uniform-prob", "Same-color probability at distance d, uniform proper coloring");
  uprob->add_option("--n", up_n)->required();
  uprob->add_option("--d", up_d)->required();

  int beta_ring = 0, beta_seg = 0;
  bool beta_proper = false;
  std::string beta_out;
  auto* beta = app.add_subcommand("beta", "Distinct beta vectors");
  auto* beta_ring_opt = beta->add_option("--ring", beta_ring, "Ring size n");
  beta->add_option("--segment", beta_seg, "Segment length k")->excludes(beta_ring_opt);
  beta->add_flag("--proper-only", beta_proper, "Only proper colorings");
  beta->add_option("--out", beta_out, "CSV output");

  int bias_ring = 0, bias_seg = 0;
  bool bias_gamma = false;
  std::string bias_out;
  auto* bias = app.add_subcommand("bias-lp", "Maximum-bias LP and its witness");
  auto* bias_ring_opt = bias->add_option("--ring", bias_ring, "Ring size n");
  bias->add_option("--segment", bias_seg, "Segment length k")->excludes(bias_ring_opt);
  bias->add_flag("--gamma", bias_gamma, "Also compute the penalty of the witness");
  bias->add_option("--out", bias_out, "Witness JSON output");

  std::string gamma_witness;
  auto* gam = app.add_subcommand("gamma", "Penalty of a witness over improper colorings");
  gam->add_option("--witness", gamma_witness)->required();

  LpFlags ring_flags, seg_flags;
  auto* ring_lp = app.add_subcommand("ring-lp", "Non-signaling LP on the ring");
  add_lp_flags(ring_lp, ring_flags, "--n", true);
  auto* seg_lp = app.add_subcommand("segment-lp", "Non-signaling LP on a line segment");
  add_lp_flags(seg_lp, seg_flags, "--k", false);

  std::string verify_lp, verify_cert;
  auto* verify = app.add_subcommand("verify", "Check an LP certificate exactly");
  verify->add_option("--lp", verify_lp)->required();
  verify->add_option("--cert", verify_cert)->required();

  std::string bound_q;
  int bound_k = 0, bound_r = 0;
  long long bound_n = 0;
  auto* bound = app.add_subcommand("bound", "Exponential composition q^floor(n/(k+r))");
  bound->add_option("--q", bound_q)->required();
  bound->add_option("--k", bound_k)->required();
  bound->add_option("--r", bound_r)->required();
  bound->add_option("--n", bound_n)->required();

  auto* exp11 = app.add_subcommand("experiments11", "Matching experiments on the eleven-node ring");

  int n4_grid = 1000;
  auto* n4 = app.add_subcommand("n4-scan", "Negative forced probabilities for independent 4-node colorings");
  n4->add_option("--grid", n4_grid, "Grid denominator");

  std::string qsim_spec, qsim_out, qsim_write_spec;
  bool qsim_indep = false;
  double qsim_tol = 1e-9;
  int qsim_n = 5, qsim_r = 1, qsim_w = 1, qsim_m = 1;
  auto* qs = app.add_subcommand("qsim", "Simulate a one-way quantum ring protocol");
  auto* qsim_spec_opt = qs->add_option("--spec", qsim_spec, "ProtocolSpec JSON (default: random U from --seed)");
  qs->add_option("--n", qsim_n)->excludes(qsim_spec_opt);
  qs->add_option("--r", qsim_r)->excludes(qsim_spec_opt);
  qs->add_option("--w", qsim_w)->excludes(qsim_spec_opt);
  qs->add_option("--m", qsim_m)->excludes(qsim_spec_opt);
  qs->add_flag("--check-independence", qsim_indep, "Check independence beyond r");
  qs->add_option("--tol", qsim_tol, "Tolerance for the checks");
  qs->add_option("--out", qsim_out, "Distribution CSV output");
  qs->add_option("--write-spec", qsim_write_spec, "Write the simulated ProtocolSpec as JSON");

  int fig_which = 0, fig_n_max = 16;
  std::string fig_out;
  std::vector<int> fig_ns{13, 14, 15};
  auto* fig = app.add_subcommand("figures", "Figure data as CSV");
  fig->add_option("--which", fig_which)->required();
  fig->add_option("--out", fig_out)->required();
  fig->add_option("--n-max", fig_n_max, "Largest n for the bias-vs-n data");
  fig->add_option("--n", fig_ns, "Ring sizes for witness data");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*count) {
      const auto c = count_colorings(count_l);
      std::cout << "a = " << c.a.get_str() << "\nb = " << c.b.get_str() << "\n";
      return 0;
    }
    if (*uprob) {
      if (up_n < 3 || up_d < 0 || up_d > up_n) throw UsageError("need n >= 3 and 0 <= d <= n");
      std::cout << "P = " << show(uniform_same_color_prob(up_n, up_d)) << "\n";
      return 0;
    }
    if (*beta) {
      std::ostringstream csv;
      std::size_t size = 0;
      if (beta_ring > 0) {
        if (beta_ring < 4) throw UsageError("--ring must be at least 4");
        const auto set = ring_betas(beta_ring, beta_proper);
        write_beta_csv(csv, set);
        size = set.size();
      } else if (beta_seg > 0) {
        if (beta_seg < 3) throw UsageError("--segment must be at least 3");
        const auto set = segment_betas(beta_seg, beta_proper);
        write_beta_csv(csv, set);
        size = set.size();
      } else {
        throw UsageError("beta needs --ring or --segment");
      }
      if (beta_out.empty()) {
        std::cout << csv.str();
      } else {
        auto out = open_out(beta_out);
        out << csv.str();
        std::cout << "distinct beta vectors = " << size << "\n";
      }
      return 0;
    }
    if (*bias) {
      if (bias_ring == 0 && bias_seg == 0) throw UsageError("bias-lp needs --ring or --segment");
      BiasSolve solve = bias_ring > 0 ? ring_bias(bias_ring) : segment_bias(bias_seg);
      auto& w = solve.witness;
      std::cout << "delta = " << show(w.delta) << "\n";
      print_witness(w);
      if (bias_gamma && sgn(w.delta) > 0) {
        w.gamma = gamma(w, threads);
        const auto eb = error_lower_bound(w.delta, *w.gamma);
        std::cout << "gamma = " << show(*w.gamma) << "\n";
        std::cout << "epsilon_lower = " << show(eb.epsilon_lower) << "\n";
        std::cout << "success_upper = " << show(eb.success_upper) << "\n";
      }
      if (!bias_out.empty()) {
        auto out = open_out(bias_out);
        write_witness_json(out, w);
      }
      return 0;
    }
    if (*gam) {
      auto in = open_in(gamma_witness);
      BiasWitness w;
      try {
        w = read_witness_json(in);
      } catch (const std::exception& e) {
        throw UsageError(std::string("bad witness: ") + e.what());
      }
      const Rational min_proper = min_bias_over_proper(w);
      const Rational g = gamma(w, threads);
      const auto eb = error_lower_bound(w.delta, g);
      std::cout << "min over proper colorings = " << show(min_proper) << "\n";
      std::cout << "gamma = " << show(g) << "\n";
      std::cout << "epsilon_lower = " << show(eb.epsilon_lower) << "\n";
      std::cout << "success_upper = " << show(eb.success_upper) << "\n";
      if (min_proper < w.delta) {
        std::cout << "witness check FAILED: claimed delta " << to_string(w.delta) << " exceeds the proper minimum\n";
        return kExitCheckFailed;
      }
      return 0;
    }
    if (*ring_lp) return run_lp(ring_flags, true, threads);
    if (*seg_lp) return run_lp(seg_flags, false, threads);
    if (*verify) {
      auto lp_in = open_in(verify_lp);
      const RationalLP lp = read_lp_json(lp_in);
      auto cert_in = open_in(verify_cert);
      const Certificate cert = read_certificate_json(cert_in, lp);
      const VerifyResult res = verify_certificate(lp, cert);
      if (!res.accepted()) {
        std::cout << "certificate rejected: " << res.message << "\n";
        return kExitCheckFailed;
      }
      std::cout << "certificate accepted: objective = " << show(cert.objective) << "\n";
      return 0;
    }
    if (*bound) {
      const Rational q = rational_arg(bound_q);
      const long long e = composition_exponent(bound_k, bound_r, bound_n);
      const Rational b = compose_exponential(q, bound_k, bound_r, bound_n);
      std::cout << "(" << to_string(q) << ")^" << e << " = " << show(b) << "\n";
      return 0;
    }
    if (*exp11) {
      const auto rep = experiments11();
      std::cout << "proper colorings = " << rep.colorings << "\n";
      std::cout << "min bias = " << show(rep.min_bias) << "\n";
      std::cout << "every coloring >= 1/451: " << (rep.per_coloring_check ? "yes" : "no") << "\n";
      std::cout << "bias of 01201201201 = " << show(rep.sample_bias) << "\n";
      return rep.min_bias == Rational(1, 451) && rep.per_coloring_check ? 0 : kExitCheckFailed;
    }
    if (*n4) {
      const auto rep = n4_infeasibility_scan(n4_grid, threads);
      std::cout << "grid points = " << rep.points << "\n";
      std::cout << "points with a negative forced probability = " << rep.violating_points << "\n";
      std::cout << "worst min q = " << show(rep.worst) << " at (" << to_string(rep.worst_point[0]) << ", "
                << to_string(rep.worst_point[1]) << ", " << to_string(rep.worst_point[2]) << ")\n";
      return rep.all_violate() ? 0 : kExitCheckFailed;
    }
    if (*qs) {
      qsim::ProtocolSpec spec;
      if (!qsim_spec.empty()) {
        auto in = open_in(qsim_spec);
        try {
          spec = qsim::read_protocol_json(in);
        } catch (const std::exception& e) {
          throw UsageError(std::string("bad protocol spec: ") + e.what());
        }
      } else {
        spec.n = qsim_n;
        spec.r = qsim_r;
        spec.w = qsim_w;
        spec.m = qsim_m;
        if (spec.n < 1 || spec.r < 0 || spec.w < 0 || spec.m < 0 || spec.n * (spec.w + spec.m) > 24)
          throw UsageError("need n >= 1, r, w, m >= 0 and n*(w+m) <= 24");
        spec.unitary = qsim::random_unitary(spec.local_dimension(), seed);
        for (std::size_t i = 0; i < spec.local_dimension(); ++i) spec.color_map.push_back(static_cast<int>(i % 3));
      }
      if (!qsim_write_spec.empty()) {
        auto out = open_out(qsim_write_spec);
        qsim::write_protocol_json(out, spec);
      }
      const auto dist = qsim::run_protocol(spec);
      if (!qsim_out.empty()) {
        auto out = open_out(qsim_out);
        qsim::write_distribution_csv(out, dist);
      }
      const bool cyclic = qsim::check_cyclicity(dist, qsim_tol);
      std::cout << "cyclic: " << (cyclic ? "yes" : "no") << "\n";
      bool ok = cyclic;
      if (qsim_indep) {
        const auto rep = qsim::check_independence(dist, spec.r, qsim_tol);
        std::cout << std::scientific << std::setprecision(3);
        std::cout << "independence beyond " << spec.r << ": max deviation = " << rep.max_deviation << " over "
                  << rep.frame_collections << " frame collections, " << rep.placements << " placements: "
                  << (rep.passed ? "pass" : "FAIL") << "\n";
        ok = ok && rep.passed;
      }
      return ok ? 0 : kExitCheckFailed;
    }
    if (*fig) return run_figures(fig_which, fig_out, fig_n_max, fig_ns, threads);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}
