// chaoslab: exact and Monte Carlo moments of multiple Rademacher sums,
// extremal multilinear forms, and certified constants, from the shell.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "chaoslab/chaos.hpp"
#include "chaoslab/constructions.hpp"
#include "chaoslab/forms.hpp"
#include "chaoslab/inequalities.hpp"
#include "chaoslab/search.hpp"
#include "chaoslab/serialize.hpp"
#include "chaoslab/tensor.hpp"

namespace {

using namespace chaoslab;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Manifest {
  std::string command;
  std::map<std::string, std::string> input_digests;
  std::vector<std::uint64_t> seeds;
  int threads = 0;
  double wall_ms = 0.0;

  Json to_json() const {
    Json j;
    j["version"] = kVersion;
    j["command"] = command;
    j["threads"] = threads;
    j["seeds"] = seeds;
    Json d = Json::object();
    for (const auto& [path, digest] : input_digests) d[path] = digest;
    j["input_digests"] = std::move(d);
    j["wall_ms"] = wall_ms;
    return j;
  }
};

struct Ctx {
  RunOptions opts;
  bool json = false;
  Manifest manifest;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void note_input(const std::string& path) {
    manifest.input_digests[path] = fnv1a_hex(read_file(path));
  }

  // Reports wrap the result with the run manifest; wall time is the one
  // field that varies between identical runs.
  void emit(const Json& result, const std::string& human) {
    if (json) {
      manifest.wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count();
      Json j;
      j["schema"] = "chaoslab/1";
      j["manifest"] = manifest.to_json();
      j["result"] = result;
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << human;
    }
  }
};

std::string moment_human(const MomentResult& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "p=%g value=%.17g mode=%s %s=%llu", m.p, m.value,
                to_string(m.mode),
                m.mode == MomentMode::exact_enumeration ? "patterns" : "samples",
                static_cast<unsigned long long>(m.count));
  std::string out = buf;
  if (m.exact_power.has_value()) out += " exact=" + m.exact_power->to_string();
  if (m.std_error.has_value()) {
    std::snprintf(buf, sizeof buf, " stderr=%.6g", *m.std_error);
    out += buf;
  }
  out += '\n';
  return out;
}

std::string report_human(const BoundReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s: lhs=%.17g rhs=%.17g ratio=%.17g holds=%s\n",
                r.context.theorem.c_str(), r.lhs, r.rhs, r.ratio,
                r.holds ? "yes" : "no");
  return buf;
}

MixedNormSpec parse_spec(const std::string& csv) {
  MixedNormSpec spec;
  std::istringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      spec.exponents.push_back(std::stod(tok));
    } catch (...) {
      throw ParseError("bad exponent list: " + csv);
    }
  }
  if (spec.exponents.empty()) throw ParseError("empty exponent list");
  return spec;
}

int run(int argc, char** argv) {
  CLI::App app{"Rademacher chaos moments, extremal forms, and certified constants"};
  app.require_subcommand(1);

  Ctx ctx;
  {
    std::string cmd;
    for (int i = 0; i < argc; ++i) {
      if (i) cmd += ' ';
      cmd += argv[i];
    }
    ctx.manifest.command = std::move(cmd);
  }
  app.add_option("--threads", ctx.opts.threads, "worker threads (0 = all cores)");
  app.add_option("--max-bits", ctx.opts.max_bits,
                 "enumeration budget override in sign bits");
  app.add_flag("--json", ctx.json, "emit a JSON report");

  // moment <tensor-file>
  auto* c_moment = app.add_subcommand("moment", "L_p moment of a tensor file");
  std::string moment_file, moment_mode = "exact";
  double moment_p = 1.0;
  std::uint64_t moment_samples = 200000, moment_seed = 0;
  c_moment->add_option("tensor", moment_file, "tensor file")->required();
  c_moment->add_option("--p", moment_p, "moment order p > 0");
  c_moment->add_option("--mode", moment_mode, "exact|mc")
      ->check(CLI::IsMember({"exact", "mc"}));
  c_moment->add_option("--samples", moment_samples, "MC sample count");
  c_moment->add_option("--seed", moment_seed, "MC seed");

  // supnorm <form-file>
  auto* c_sup = app.add_subcommand("supnorm", "exact sup-norm of a form file");
  std::string sup_file;
  c_sup->add_option("form", sup_file, "form file")->required();

  // rm --m
  auto* c_rm = app.add_subcommand("rm", "build the recursive extremal form R_m");
  int rm_m = 2;
  std::string rm_out;
  c_rm->add_option("--m", rm_m, "order (2..6)")->required();
  c_rm->add_option("--out", rm_out, "output form file (default stdout)");

  // ksz
  auto* c_ksz = app.add_subcommand("ksz", "random unimodular witness search");
  int ksz_m = 2, ksz_n = 4;
  std::uint64_t ksz_budget = 100, ksz_seed = 0;
  c_ksz->add_option("--m", ksz_m)->required();
  c_ksz->add_option("--n", ksz_n)->required();
  c_ksz->add_option("--budget", ksz_budget, "trial count");
  c_ksz->add_option("--seed", ksz_seed);

  // bound --which ... <input>
  auto* c_bound = app.add_subcommand("bound", "verify one displayed inequality");
  std::string bound_which, bound_file, bound_spec;
  double bound_r = 2.0, bound_p = 1.0, bound_q = 2.0;
  c_bound->add_option("--which", bound_which,
                      "multik|theorem1|mixed|prop|contraction|kahane|hilbert")
      ->required()
      ->check(CLI::IsMember({"multik", "theorem1", "mixed", "prop", "contraction",
                             "kahane", "hilbert"}));
  c_bound->add_option("input", bound_file, "tensor file (scalar or vec)")->required();
  c_bound->add_option("--r", bound_r, "exponent r");
  c_bound->add_option("--spec", bound_spec, "comma list of mixed exponents");
  c_bound->add_option("--p", bound_p);
  c_bound->add_option("--q", bound_q);

  // slices --form --r
  auto* c_slices = app.add_subcommand("slices", "slice lower bound for 2^(m/r)");
  std::string slices_file;
  double slices_r = 2.0;
  c_slices->add_option("--form", slices_file)->required();
  c_slices->add_option("--r", slices_r, "exponent r > 0");

  // fit --csv
  auto* c_fit = app.add_subcommand("fit", "power-law fit of an n,value CSV");
  std::string fit_file;
  c_fit->add_option("--csv", fit_file)->required();

  // search
  auto* c_search = app.add_subcommand("search", "maximize ell_r / moment_p");
  SearchConfig scfg;
  std::string search_strategy = "exhaustive-signs", search_trace_csv;
  c_search->add_option("--m", scfg.m)->required();
  c_search->add_option("--n", scfg.n)->required();
  c_search->add_option("--r", scfg.r);
  c_search->add_option("--p", scfg.p);
  c_search->add_option("--strategy", search_strategy)
      ->check(CLI::IsMember({"exhaustive-signs", "sign-coordinate-ascent", "annealing",
                             "continuous-perturbation", "product-ones"}));
  c_search->add_option("--budget", scfg.budget);
  c_search->add_option("--seed", scfg.seed);
  c_search->add_option("--restarts", scfg.restarts);
  c_search->add_option("--trace-csv", search_trace_csv, "write the trace as CSV");

  // sweep: exponent fit over a size list
  auto* c_sweep = app.add_subcommand("sweep", "fit the blow-up exponent over n");
  int sweep_m = 1;
  double sweep_r = 1.0, sweep_p = 1.0;
  std::string sweep_strategy = "product-ones", sweep_csv;
  std::vector<int> sweep_ns;
  std::uint64_t sweep_budget = 0, sweep_seed = 0;
  c_sweep->add_option("--m", sweep_m)->required();
  c_sweep->add_option("--r", sweep_r);
  c_sweep->add_option("--p", sweep_p);
  c_sweep->add_option("--n", sweep_ns, "sizes (repeat or comma list)")
      ->required()
      ->delimiter(',');
  c_sweep->add_option("--strategy", sweep_strategy);
  c_sweep->add_option("--budget", sweep_budget);
  c_sweep->add_option("--seed", sweep_seed);
  c_sweep->add_option("--points-csv", sweep_csv, "write the fitted points as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  if (c_moment->parsed()) {
    ctx.note_input(moment_file);
    std::ifstream in(moment_file);
    if (!in) throw ParseError("cannot open tensor file: " + moment_file);
    MomentResult res;
    if (sniff_vector_tensor(in)) {
      VectorTensor y = parse_vector_tensor(in);
      res = moment_mode == "exact" ? moment_p_exact_vec(y, moment_p, ctx.opts)
                                   : moment_p_mc(y, moment_p, moment_samples,
                                                 moment_seed, ctx.opts);
    } else {
      CoefficientTensor a = parse_tensor(in);
      res = moment_mode == "exact"
                ? moment_p_exact(a, moment_p, ctx.opts)
                : moment_p_mc(a, moment_p, moment_samples, moment_seed, ctx.opts);
    }
    if (moment_mode == "mc") ctx.manifest.seeds.push_back(moment_seed);
    ctx.emit(to_json(res), moment_human(res));
    return kExitOk;
  }

  if (c_sup->parsed()) {
    ctx.note_input(sup_file);
    NormCertificate cert = sup_norm(parse_form_file(sup_file), ctx.opts);
    char buf[64];
    std::snprintf(buf, sizeof buf, "sup_norm=%.17g witness:\n", cert.value);
    std::string human = buf;
    for (const auto& var : cert.witness) {
      human += " ";
      for (std::int8_t s : var) human += s < 0 ? " -1" : " +1";
      human += '\n';
    }
    ctx.emit(to_json(cert), human);
    return kExitOk;
  }

  if (c_rm->parsed()) {
    SparseMultilinearForm f = build_rm(rm_m);
    std::string text = format_form(f);
    if (!rm_out.empty()) {
      std::ofstream out(rm_out);
      if (!out) throw ParseError("cannot open output file: " + rm_out);
      out << "# chaoslab " << kVersion << " R_" << rm_m << "\n"
          << "# " << ctx.manifest.command << "\n"
          << text;
      ctx.emit(Json{{"monomials", f.monomials().size()}, {"out", rm_out}},
               "wrote " + rm_out + "\n");
    } else {
      ctx.emit(Json{{"monomials", f.monomials().size()}, {"form", text}}, text);
    }
    return kExitOk;
  }

  if (c_ksz->parsed()) {
    ctx.manifest.seeds.push_back(ksz_seed);
    KszCertificate cert = ksz_search(ksz_m, ksz_n, ksz_budget, ksz_seed, ctx.opts);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "m=%d n=%d certified_norm=%.17g k_hat=%.17g trials=%llu\n", ksz_m,
                  ksz_n, cert.certified_norm, cert.k_hat,
                  static_cast<unsigned long long>(cert.trials_run));
    ctx.emit(to_json(cert), buf);
    return kExitOk;
  }

  if (c_bound->parsed()) {
    ctx.note_input(bound_file);
    std::ifstream in(bound_file);
    if (!in) throw ParseError("cannot open input file: " + bound_file);
    BoundReport rep;
    if (sniff_vector_tensor(in)) {
      VectorTensor y = parse_vector_tensor(in);
      if (bound_which == "contraction")
        rep = verify_contraction(y, ctx.opts);
      else if (bound_which == "kahane")
        rep = verify_multiple_kahane(y, bound_p, bound_q, ctx.opts);
      else if (bound_which == "hilbert")
        rep = verify_hilbert_prop(y, bound_r, ctx.opts);
      else
        throw ParseError("bound '" + bound_which + "' expects a scalar tensor");
    } else {
      CoefficientTensor a = parse_tensor(in);
      if (bound_which == "multik")
        rep = verify_multik(a, ctx.opts);
      else if (bound_which == "theorem1")
        rep = verify_theorem1(a, bound_r, ctx.opts);
      else if (bound_which == "mixed")
        rep = verify_mixed(a, parse_spec(bound_spec), ctx.opts);
      else if (bound_which == "prop")
        rep = verify_prop(a, bound_r, ctx.opts);
      else if (bound_which == "contraction")
        rep = verify_contraction(a, ctx.opts);
      else
        throw ParseError("bound '" + bound_which + "' expects a vec tensor file");
    }
    ctx.emit(to_json(rep), report_human(rep));
    return rep.holds ? kExitOk : kExitViolation;
  }

  if (c_slices->parsed()) {
    ctx.note_input(slices_file);
    SliceLowerBound s = lower_bound_from_slices(parse_form_file(slices_file),
                                                slices_r, ctx.opts);
    char buf[128];
    std::snprintf(buf, sizeof buf, "slice lower bound: %.17g (cap 2^(m/r)=%.17g)\n",
                  s.bound, s.report.constant_used);
    ctx.emit(to_json(s), buf);
    return kExitOk;
  }

  if (c_fit->parsed()) {
    ctx.note_input(fit_file);
    std::ifstream in(fit_file);
    if (!in) throw ParseError("cannot open CSV: " + fit_file);
    std::vector<std::pair<double, double>> pts;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("n,", 0) == 0) continue;
      const std::size_t comma = line.find(',');
      if (comma == std::string::npos) throw ParseError("bad CSV line: " + line);
      try {
        pts.emplace_back(std::stod(line.substr(0, comma)),
                         std::stod(line.substr(comma + 1)));
      } catch (...) {
        throw ParseError("bad CSV line: " + line);
      }
    }
    FitResult fit = fit_exponent(pts);
    char buf[128];
    std::snprintf(buf, sizeof buf, "slope=%.17g intercept=%.17g max_residual=%.3g\n",
                  fit.slope, fit.intercept, fit.max_residual);
    ctx.emit(to_json(fit), buf);
    return kExitOk;
  }

  if (c_search->parsed()) {
    scfg.strategy = strategy_from_string(search_strategy);
    ctx.manifest.seeds.push_back(scfg.seed);
    SearchResult res = maximize_ratio(scfg, ctx.opts);
    if (!search_trace_csv.empty()) {
      std::ofstream out(search_trace_csv);
      if (!out) throw ParseError("cannot open output file: " + search_trace_csv);
      out << "# chaoslab " << kVersion << "; " << ctx.manifest.command << "\n";
      out << "n,value\n";
      for (const auto& [step, ratio] : res.trace) out << step << ',' << ratio << '\n';
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "best_ratio=%.17g\n", res.best_ratio);
    ctx.emit(to_json(res), buf);
    return kExitOk;
  }

  if (c_sweep->parsed()) {
    ctx.manifest.seeds.push_back(sweep_seed);
    FitResult fit = exponent_sweep(sweep_m, sweep_r, sweep_p, sweep_ns,
                                   strategy_from_string(sweep_strategy), sweep_budget,
                                   sweep_seed, ctx.opts);
    if (!sweep_csv.empty()) {
      std::ofstream out(sweep_csv);
      if (!out) throw ParseError("cannot open output file: " + sweep_csv);
      out << "# chaoslab " << kVersion << "; " << ctx.manifest.command << "\n";
      out << "n,value\n";
      for (const auto& [n, v] : fit.points) {
        char row[80];
        std::snprintf(row, sizeof row, "%.17g,%.17g\n", n, v);
        out << row;
      }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "slope=%.17g\n", fit.slope);
    ctx.emit(to_json(fit), buf);
    return kExitOk;
  }

  return kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const BudgetError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
