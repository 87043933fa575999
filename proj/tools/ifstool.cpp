// ifstool: command-line front end for the ifs library.
//
// Exit status: 0 success, 1 failed check or runtime failure, 2 usage or
// config error.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ifs/config.hpp"
#include "ifs/ifs.hpp"
#include "ifs/report_json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

ifs::Vec2 parse_point(const std::string& text, const std::string& flag) {
  std::istringstream in(text);
  ifs::Vec2 p;
  char comma = 0;
  if (!(in >> p.x >> comma >> p.y) || comma != ',' || !(in >> std::ws).eof())
    throw ifs::Error(ifs::Errc::InvalidArgument, flag + " expects x,y, got '" + text + "'");
  return p;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ifs::Error(ifs::Errc::InvalidArgument, "cannot write '" + path + "'");
  return out;
}

/// Writes to `path`, or stdout when path is empty or "-".
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
  } else {
    auto out = open_out(path);
    fn(out);
  }
}

int exit_code_for(const ifs::Error& e) {
  switch (e.code()) {
    case ifs::Errc::ParseError:
    case ifs::Errc::AddressParseError:
    case ifs::Errc::InvalidArgument:
    case ifs::Errc::InvalidProbability:
    case ifs::Errc::NotInvariant:
      return kExitUsage;
    default:
      return kExitFailure;
  }
}

std::string describe(const ifs::CriticalProbability& c) {
  switch (c.kind) {
    case ifs::CriticalProbability::Kind::Threshold: {
      std::ostringstream os;
      os << std::setprecision(10) << "p1 < " << c.value;
      return os.str();
    }
    case ifs::CriticalProbability::Kind::AlwaysContractive: return "contractive for every p1";
    case ifs::CriticalProbability::Kind::NeverContractive: return "contractive for no p1";
  }
  return "";
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string config;
  unsigned max_k = 4;
  unsigned max_word_len = 4;
  bool json = false;
  std::string out;
};

int run_analyze(const AnalyzeArgs& a) {
  const auto cfg = ifs::load_config(a.config);
  const auto r = ifs::analyze(cfg.system, a.max_k, a.max_word_len);
  emit(a.out, [&](std::ostream& os) {
    if (a.json) {
      os << ifs::to_json(r).dump(2) << '\n';
      return;
    }
    os << std::setprecision(12);
    for (std::size_t i = 0; i < r.map_lipschitz.size(); ++i)
      os << "Lip(f" << i + 1 << ") = " << r.map_lipschitz[i] << '\n';
    if (r.uniform_substituted) os << "(no probabilities given; using uniform ones)\n";
    for (const auto& st : r.iterates) {
      os << "k = " << st.k << ": average contractivity " << st.average << (st.average < 1.0 ? "  < 1" : "") << '\n';
      if (st.critical) os << "       critical probability: " << describe(*st.critical) << '\n';
    }
    if (r.min_contractive_k)
      os << "min k contractive on average: " << *r.min_contractive_k << '\n';
    else
      os << "min k contractive on average: none up to k = " << a.max_k << '\n';
    if (r.contractive_word)
      os << "contractive word: " << r.contractive_word->word.str() << " (Lip " << r.contractive_word->lipschitz << ")\n";
    else
      os << "contractive word: none up to length " << a.max_word_len << '\n';
  });
  return kExitOk;
}

// ------------------------------------------------------------------ chaos

struct ChaosArgs {
  std::string config;
  std::string start;
  std::uint64_t n = 100000;
  std::uint64_t burn_in = 100;
  std::uint64_t seed = 0;
  std::uint64_t chunks = 1;
  double resolution = 0.0;
  std::string out;
};

int run_chaos(const ChaosArgs& a) {
  const auto cfg = ifs::load_config(a.config);
  ifs::Vec2 start{};
  if (!a.start.empty())
    start = parse_point(a.start, "--start");
  else if (cfg.invariant_hint)
    start = cfg.invariant_hint->vertex_mean();
  const ifs::IfsSystem sys = cfg.system.has_probabilities() ? cfg.system : cfg.system.with_uniform_probabilities();
  const auto cloud = ifs::chaos_game(sys, start, {a.burn_in, a.n, a.seed, a.chunks}, a.resolution);
  emit(a.out, [&](std::ostream& os) { ifs::write_csv(os, cloud); });
  if (!a.out.empty() && a.out != "-") std::cerr << cloud.size() << " points written to " << a.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- measure

struct MeasureArgs {
  std::string config;
  std::size_t grid = 256;
  std::size_t iters = 500;
  double tol = 1e-3;
  std::string init;
  std::string deposit = "nearest";
  std::string probe;
  double radius = 0.05;
  std::string out;
};

int run_measure(const MeasureArgs& a) {
  const auto cfg = ifs::load_config(a.config);
  const ifs::Box box = cfg.grid_bounds();
  ifs::GridMeasure start = [&] {
    const std::string init = a.init.empty() ? (cfg.invariant_hint ? "hint" : "bounds") : a.init;
    if (init == "bounds") return ifs::GridMeasure::uniform(box, a.grid);
    if (init == "hint") {
      if (!cfg.invariant_hint) throw ifs::Error(ifs::Errc::InvalidArgument, "--init hint needs invariant_hint in the config");
      return ifs::uniform_on_polygon(*cfg.invariant_hint, box, a.grid);
    }
    if (init.rfind("point:", 0) == 0) return ifs::GridMeasure::point_mass(box, a.grid, parse_point(init.substr(6), "--init point:"));
    throw ifs::Error(ifs::Errc::InvalidArgument, "--init must be bounds, hint or point:x,y");
  }();
  const auto deposit = a.deposit == "bilinear" ? ifs::Deposit::Bilinear : ifs::Deposit::NearestCell;
  const auto res = ifs::iterate_to_invariance(cfg.system, std::move(start), a.tol, a.iters, deposit);
  const auto& mu = res.measure;

  {
    auto pgm = open_out(a.out + ".pgm");
    ifs::write_pgm(pgm, mu);
    auto csv = open_out(a.out + ".csv");
    ifs::write_csv(csv, mu);
    auto log = open_out(a.out + "_log.csv");
    log << std::setprecision(17) << "iteration,tv_residual\n";
    for (std::size_t i = 0; i < res.report.residuals.size(); ++i) log << i + 1 << ',' << res.report.residuals[i] << '\n';
  }

  std::cout << std::setprecision(10);
  std::cout << "iterations: " << res.report.iterations << '\n'
            << "converged: " << (res.report.converged ? "true" : "false") << '\n'
            << "final_residual: " << (res.report.residuals.empty() ? 0.0 : res.report.residuals.back()) << '\n'
            << "escaped_mass: " << mu.escaped_mass() << '\n';
  if (cfg.invariant_hint) {
    const auto reference = ifs::uniform_on_polygon(*cfg.invariant_hint, box, a.grid);
    std::cout << "tv_to_uniform_on_hint: " << ifs::total_variation(mu, reference) << '\n';
  }
  std::size_t peak = 0;
  for (std::size_t k = 0; k < mu.mass().size(); ++k)
    if (mu.mass()[k] > mu.mass()[peak]) peak = k;
  const auto c = mu.center(peak);
  std::cout << "peak_cell_center: " << c.x << ',' << c.y << '\n';
  if (!a.probe.empty()) {
    const auto p = parse_point(a.probe, "--probe");
    std::cout << "mass_within_radius: " << mu.mass_within(p, a.radius) << '\n';
  }
  return kExitOk;
}

// ------------------------------------------------------------------ fibre

struct FibreArgs {
  std::string config;
  std::string address;
  std::size_t depth = 40;
  bool fibredness = false;
  unsigned max_word_len = 4;
  bool json = false;
  std::string out;
};

int run_fibre(const FibreArgs& a) {
  const auto cfg = ifs::load_config(a.config);
  if (!cfg.invariant_hint)
    throw ifs::Error(ifs::Errc::InvalidArgument, "fibre needs an invariant_hint polygon in the config");
  const auto address = ifs::parse_address(a.address);
  const auto seq = ifs::fibre_sequence(cfg.system, *cfg.invariant_hint, address, a.depth);
  const auto cls = ifs::classify_fibre(seq);
  std::optional<ifs::StronglyFibredReport> fib;
  if (a.fibredness) fib = ifs::strongly_fibred_report(cfg.system, *cfg.invariant_hint, a.max_word_len);

  emit(a.out, [&](std::ostream& os) {
    if (a.json) {
      auto j = ifs::to_json(seq, cls);
      if (fib) j["fibredness"] = ifs::to_json(*fib);
      os << j.dump(2) << '\n';
      return;
    }
    os << "address " << seq.address.str() << (seq.truncated ? " (finite address, truncated)" : "") << '\n';
    os << "depth,area,diameter\n" << std::setprecision(17);
    for (const auto& st : seq.steps) os << st.depth << ',' << st.area << ',' << st.diameter << '\n';
    os << std::setprecision(12) << "class: " << ifs::FibreClass::name(cls.kind);
    if (cls.kind == ifs::FibreClass::Kind::Point) os << " (" << cls.point.x << ", " << cls.point.y << ")";
    if (cls.kind == ifs::FibreClass::Kind::Segment)
      os << " (" << cls.from.x << ", " << cls.from.y << ") - (" << cls.to.x << ", " << cls.to.y << ")";
    os << '\n';
    if (fib) {
      os << "fibredness: "
         << (fib->verdict == ifs::StronglyFibredReport::Verdict::StronglyFibred ? "strongly fibred" : "inconclusive");
      if (fib->witness_word)
        os << " (contractive word " << fib->witness_word->word.str() << ", singleton fibre at " << fib->singleton->x
           << ", " << fib->singleton->y << ")";
      os << "\npoint fibred: "
         << (fib->point_fibred_falsified ? "no (segment fibre at " + fib->segment_witness->str() + ")" : "not falsified")
         << '\n';
    }
  });
  return kExitOk;
}

// ----------------------------------------------------------------- verify

int run_verify(const std::string& scale, const std::string& json_out) {
  const auto report = ifs::verify_all(scale == "full" ? ifs::Scale::Full : ifs::Scale::Quick);
  for (const auto& c : report.checks)
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.id << "  " << c.title << "  [" << ifs::to_string(c.source)
              << "]\n      expected: " << c.expected << "\n      measured: " << c.measured << "\n";
  std::cout << report.checks.size() - report.failures() << "/" << report.checks.size() << " checks passed\n";
  if (!json_out.empty()) emit(json_out, [&](std::ostream& os) { os << ifs::to_json(report).dump(2) << '\n'; });
  return report.all_passed() ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------- builtin

int run_builtin(const std::string& name, double p1, const std::string& out) {
  const ifs::NamedSystem ns = name == "triangle" ? ifs::triangle_pair(p1) : ifs::shear_pair();
  const ifs::IfsConfig cfg{ns.system, ns.invariant_hint, std::nullopt};
  emit(out, [&](std::ostream& os) { os << ifs::write_config(cfg); });
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analyse affine iterated function systems: contractivity, semiattractors, invariant measures, fibres"};
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  auto* an = app.add_subcommand("analyze", "Lipschitz constants, average contractivity and critical probabilities");
  an->add_option("config", analyze.config, "System config (JSON)")->required();
  an->add_option("--max-k", analyze.max_k, "Largest iterate to examine")->check(CLI::Range(1u, 64u));
  an->add_option("--max-word-len", analyze.max_word_len, "Longest word in the contractive-word search")->check(CLI::Range(1u, 64u));
  an->add_flag("--json", analyze.json, "Emit JSON");
  an->add_option("--out", analyze.out, "Output file (default stdout)");

  ChaosArgs chaos;
  auto* ch = app.add_subcommand("chaos", "Chaos-game point cloud as CSV");
  ch->add_option("config", chaos.config, "System config (JSON)")->required();
  ch->add_option("--start", chaos.start, "Start point x,y (default: hint centroid or origin)");
  ch->add_option("--n", chaos.n, "Number of samples")->check(CLI::PositiveNumber);
  ch->add_option("--burn-in", chaos.burn_in, "Discarded initial steps per chunk");
  ch->add_option("--seed", chaos.seed, "RNG seed");
  ch->add_option("--chunks", chaos.chunks, "Independent orbit chunks")->check(CLI::PositiveNumber);
  ch->add_option("--resolution", chaos.resolution, "Dedup lattice spacing (0 = exact duplicates only)");
  ch->add_option("--out", chaos.out, "Output CSV (default stdout)");

  MeasureArgs measure;
  auto* me = app.add_subcommand("measure", "Iterate the Markov operator on a grid to an invariant measure");
  me->add_option("config", measure.config, "System config (JSON)")->required();
  me->add_option("--grid", measure.grid, "Cells per axis")->check(CLI::Range(std::size_t{2}, std::size_t{8192}));
  me->add_option("--iters", measure.iters, "Maximum iterations");
  me->add_option("--tol", measure.tol, "Stop when successive iterates are closer than this in total variation");
  me->add_option("--init", measure.init, "Initial measure: bounds, hint or point:x,y (default hint if present)");
  me->add_option("--deposit", measure.deposit, "Mass deposit: nearest or bilinear")->check(CLI::IsMember({"nearest", "bilinear"}));
  me->add_option("--probe", measure.probe, "Report mass within --radius of x,y");
  me->add_option("--radius", measure.radius, "Probe radius");
  me->add_option("--out", measure.out, "Output prefix for .pgm, .csv and _log.csv")->required();

  FibreArgs fibre;
  auto* fi = app.add_subcommand("fibre", "Nested fibre polygons for an address, with classification");
  fi->add_option("config", fibre.config, "System config (JSON) with invariant_hint")->required();
  fi->add_option("--address", fibre.address, "Address 'prefix' or 'prefix:tail', letters 1-9")->required();
  fi->add_option("--depth", fibre.depth, "Depth")->check(CLI::Range(std::size_t{1}, std::size_t{2000}));
  fi->add_flag("--fibredness", fibre.fibredness, "Also report strong fibredness");
  fi->add_option("--max-word-len", fibre.max_word_len, "Longest word in the contractive-word search");
  fi->add_flag("--json", fibre.json, "Emit JSON");
  fi->add_option("--out", fibre.out, "Output file (default stdout)");

  std::string scale = "quick", verify_json;
  auto* ve = app.add_subcommand("verify", "Run the built-in verification suite");
  ve->add_option("--scale", scale, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  ve->add_option("--json", verify_json, "Also write the report as JSON to this file");

  std::string builtin_name;
  double p1 = 0.5;
  std::string builtin_out;
  auto* bi = app.add_subcommand("builtin", "Write a built-in system as a config file");
  bi->add_option("name", builtin_name, "triangle or shear-pair")->required()->check(CLI::IsMember({"triangle", "shear-pair"}));
  bi->add_option("--p1", p1, "First-map probability (triangle)");
  bi->add_option("--out", builtin_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*an) return run_analyze(analyze);
    if (*ch) return run_chaos(chaos);
    if (*me) return run_measure(measure);
    if (*fi) return run_fibre(fibre);
    if (*ve) return run_verify(scale, verify_json);
    if (*bi) return run_builtin(builtin_name, p1, builtin_out);
  } catch (const ifs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
