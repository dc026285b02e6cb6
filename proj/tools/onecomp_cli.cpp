#include <chrono>
#include <ctime>
#include <iostream>

#include <CLI11.hpp>

#include "cli_io.hpp"

namespace fs = std::filesystem;
using namespace onecomp;
using cli::Json;

namespace {

struct Options {
  std::string inner, measure, points;
  std::string out = ".";
  int depth = 0;
  double epsilon = 0.0, tol = 0.0, threshold = 1.0;
  std::size_t horizon = 2000;
  unsigned threads = 0;
  bool seed = false;
};

std::string timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json envelope(const std::string& command) {
  return Json{{"command", command}, {"metadata", Json{{"tool", "onecomp 0.1.0"}, {"created", timestamp()}}}};
}

InnerFunction load_inner(const std::string& path) {
  if (path.empty()) throw cli::InputError("--inner is required");
  const fs::path p(path);
  return cli::inner_from_json(cli::parse_json(cli::read_file(p), p.string()), p.parent_path());
}

void emit(const Options& o, const std::string& name, const std::string& content) {
  fs::create_directories(o.out);
  cli::write_file(fs::path(o.out) / name, content);
}

std::vector<DiscPoint> eval_points(const Options& o) {
  if (!o.points.empty()) return cli::zeros_from_csv(cli::read_file(o.points), o.points);
  std::vector<DiscPoint> pts;
  for (int n = 2; n <= o.depth; ++n) {
    for (const auto& z : scan_points(n, 0.0)) pts.push_back(z);
  }
  return pts;
}

int run_eval(const Options& o) {
  const auto f = load_inner(o.inner);
  const double tol = o.tol > 0.0 ? o.tol : 1e-10;
  const auto pts = eval_points(o);
  std::vector<Complex> vals(pts.size());
  std::vector<Bracket> mods(pts.size());
  parallel_for(pts.size(), o.threads, [&](std::size_t i) {
    vals[i] = evaluate(f, pts[i], tol);
    mods[i] = modulus_bracket(f, pts[i], tol);
  });
  std::string csv = "re,im,value_re,value_im,modulus_lo,modulus_hi\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    csv += cli::format_real(pts[i].re()) + "," + cli::format_real(pts[i].im()) + "," +
           cli::format_real(vals[i].real()) + "," + cli::format_real(vals[i].imag()) + "," +
           cli::format_real(mods[i].lo) + "," + cli::format_real(mods[i].hi) + "\n";
  }
  emit(o, "eval.csv", csv);
  std::cout << pts.size() << " points\n";
  return 0;
}

int run_classify(const Options& o) {
  const auto f = load_inner(o.inner);
  ClassifyBudget b;
  b.scan.depth = o.depth > 0 ? o.depth : 14;
  if (o.tol > 0.0) b.scan.tol = o.tol;
  b.scan.threads = o.threads;
  const auto r = classify(f, b);
  Json j = envelope("classify");
  j["report"] = cli::report_json(r);
  emit(o, "report.json", cli::dump(j));
  std::cout << to_string(r.verdict) << " c_star=" << cli::format_real(r.c_star) << "\n";
  return 0;
}

int run_levelset(const Options& o) {
  const auto f = load_inner(o.inner);
  LevelSetOptions opt;
  opt.threads = o.threads;
  if (o.tol > 0.0) opt.eval_tol = o.tol;
  const auto a = level_set_components(f, o.epsilon, o.depth > 0 ? o.depth : 10, opt);
  Json j = envelope("levelset");
  j["level_set"] = cli::level_set_json(a);
  emit(o, "levelset.json", cli::dump(j));
  std::ostringstream csv, pgm;
  write_level_csv(csv, a);
  write_level_pgm(pgm, a);
  emit(o, "levelset.csv", csv.str());
  emit(o, "levelset.pgm", pgm.str());
  std::cout << "component_count=" << a.component_count << (a.stabilized ? "" : " (not stabilized)") << "\n";
  return 0;
}

int run_construct(const Options& o) {
  const auto f = load_inner(o.inner);
  CompanionOptions opt;
  opt.threads = o.threads;
  const auto r = construct_companion(f, o.horizon, o.depth > 0 ? o.depth : 14, opt);
  Json j = envelope("construct");
  j["companion"] = cli::companion_json(r);
  emit(o, "companion.json", cli::dump(j));
  emit(o, "zeros.csv", cli::zeros_to_csv(r.zeros.materialize(r.zeros.available().value_or(0))));
  std::ostringstream gamma;
  write_gamma_csv(gamma, r.gamma);
  emit(o, "gamma.csv", gamma.str());
  std::cout << (r.verified() ? "verified" : "verification failed") << " zeros=" << r.zeros.available().value_or(0)
            << "\n";
  return 0;
}

std::vector<double> support_sample(const BoundarySet& s) {
  std::vector<double> out;
  for (const auto& c : s.components()) {
    if (const auto* p = std::get_if<BoundarySet::Points>(&c)) {
      out.insert(out.end(), p->angles.begin(), p->angles.end());
    } else if (const auto* a = std::get_if<BoundarySet::Arcs>(&c)) {
      for (auto [lo, hi] : a->spans) out.push_back(0.5 * (lo + hi));
    } else {
      const auto& g = *std::get<BoundarySet::Cantor>(c).geometry;
      for (long double u : g.interval_starts(3)) out.push_back(static_cast<double>(u) + g.offset());
    }
  }
  return out;
}

int run_measure(const Options& o) {
  if (o.measure.empty()) throw cli::InputError("--measure is required");
  const auto sigma = cli::measure_from_json(cli::parse_json(cli::read_file(o.measure), o.measure));
  const int depth = o.depth > 0 ? o.depth : 8;
  if (depth > 20) throw PreconditionError("measure: depth must be at most 20");
  const auto support = sigma.support();
  const auto sample = support_sample(support);
  const auto grid = SingularMeasure::default_density_grid();
  Json lim = Json::array();
  for (double xi : sample) lim.push_back(sigma.density_liminf(xi, grid));
  Json j = envelope("measure");
  j["measure"] = Json{{"total_mass", sigma.total_mass()},
                      {"support", cli::boundary_set_json(support)},
                      {"support_lebesgue_measure", support.lebesgue_measure()},
                      {"density", Json{{"threshold", o.threshold},
                                       {"sample", sample},
                                       {"grid_minimum", lim},
                                       {"verdict", to_string(density_test(sigma, sample, o.threshold, grid))}}}};
  emit(o, "measure.json", cli::dump(j));
  std::string csv = "index,lo,hi,mass\n";
  const double len = kTwoPi * std::ldexp(1.0, -depth);
  for (std::uint64_t k = 0; k < (std::uint64_t{1} << depth); ++k) {
    const double lo = len * static_cast<double>(k);
    // half-open dyadic arcs [lo, hi)
    const double m = sigma.mass_of_arc(BoundaryArc::between(lo, lo + len), false) +
                     sigma.mass_of_arc(BoundaryArc{wrap_angle(lo), 0.0}, true);
    csv += std::to_string(k) + "," + cli::format_real(lo) + "," + cli::format_real(lo + len) + "," +
           cli::format_real(m) + "\n";
  }
  emit(o, "arcs.csv", csv);
  std::cout << "total_mass=" << cli::format_real(sigma.total_mass()) << "\n";
  return 0;
}

std::string dec(double v) { return cli::format_real(v); }

Json atoms_json(const std::vector<std::pair<double, double>>& atoms, double tail = 0.0,
                std::vector<double> acc = {}) {
  Json list = Json::array();
  for (auto [t, m] : atoms) list.push_back(Json{{"theta", dec(t)}, {"mass", dec(m)}});
  Json j{{"kind", "atoms"}, {"atoms", list}, {"tail_mass", dec(tail)}};
  if (!acc.empty()) {
    j["accumulation"] = Json::array();
    for (double a : acc) j["accumulation"].push_back(dec(a));
  }
  return j;
}

int seed_examples(const Options& o) {
  std::vector<std::pair<double, double>> ex1;
  for (int n = 1; n <= 60; ++n) ex1.emplace_back(std::ldexp(1.0, -n), std::ldexp(1.0, -3 * n));
  const Json ex1_measure = atoms_json(ex1, std::ldexp(1.0, -180) / 7.0, {0.0});
  const Json cantor_measure{{"kind", "cantor"}, {"delta", "middle-thirds"}};
  const std::vector<std::pair<std::string, Json>> files{
      {"atom1.json", Json{{"measure", atoms_json({{0.0, 1.0}})}}},
      {"atoms2.json", Json{{"measure", atoms_json({{0.0, 1.0}, {kPi, 1.0}})}}},
      {"example1.json", Json{{"measure", ex1_measure}}},
      {"cantor.json", Json{{"measure", cantor_measure}}},
      {"radial.json", Json{{"zeros", Json{{"kind", "radial"}, {"angle", "0"}, {"exponent", "linear"}}}}},
      {"sparse.json", Json{{"zeros", Json{{"kind", "radial"}, {"angle", "0"}, {"exponent", "square"}}}}},
      {"mobius.json", Json{{"zeros_csv", "re,im\n0.5,0\n"}}},
      {"example1_measure.json", ex1_measure},
      {"cantor_measure.json", cantor_measure},
  };
  for (const auto& [name, j] : files) emit(o, name, cli::dump(j));
  std::cout << files.size() << " files written to " << o.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inner functions on the unit disc: evaluation, one-component classification, "
               "level sets and companion Blaschke products"};
  Options o;
  app.add_flag("--seed-examples", o.seed, "write the example families as input files into --out");
  app.add_option("--out", o.out, "output directory")->capture_default_str();
  app.add_option("--threads", o.threads, "worker cap (0: hardware concurrency)");

  auto add_inner = [&](CLI::App* c) { c->add_option("--inner", o.inner, "inner function JSON")->required(); };
  auto add_common = [&](CLI::App* c) {
    c->add_option("--out", o.out, "output directory");
    c->add_option("--threads", o.threads, "worker cap (0: hardware concurrency)");
  };
  auto* eval = app.add_subcommand("eval", "evaluate on the scan grid or on listed points");
  add_inner(eval);
  add_common(eval);
  eval->add_option("--depth", o.depth, "scan grid depth")->check(CLI::Range(2, 16));
  eval->add_option("--points", o.points, "points CSV (re,im) instead of the grid");
  eval->add_option("--tol", o.tol, "evaluation tolerance")->check(CLI::PositiveNumber);

  auto* classify_cmd = app.add_subcommand("classify", "one-component classification report");
  add_inner(classify_cmd);
  add_common(classify_cmd);
  classify_cmd->add_option("--depth", o.depth, "scan depth (default 14)")->check(CLI::Range(3, 40));
  classify_cmd->add_option("--tol", o.tol, "stabilization tolerance")->check(CLI::PositiveNumber);

  auto* levelset = app.add_subcommand("levelset", "components of { |f| < epsilon }");
  add_inner(levelset);
  add_common(levelset);
  levelset->add_option("--epsilon", o.epsilon, "level")->required()->check(CLI::Range(0.0, 1.0));
  levelset->add_option("--depth", o.depth, "grid depth (default 10)")->check(CLI::Range(3, 22));
  levelset->add_option("--tol", o.tol, "evaluation tolerance")->check(CLI::PositiveNumber);

  auto* construct = app.add_subcommand("construct", "companion Blaschke product");
  add_inner(construct);
  add_common(construct);
  construct->add_option("--horizon", o.horizon, "number of zeros")->check(CLI::Range(2, 1000000));
  construct->add_option("--depth", o.depth, "verification scan depth (default 14)")->check(CLI::Range(3, 40));

  auto* measure = app.add_subcommand("measure", "mass, support and density of a singular measure");
  add_common(measure);
  measure->add_option("--measure", o.measure, "measure JSON")->required();
  measure->add_option("--depth", o.depth, "dyadic arc level for arcs.csv (default 8)")->check(CLI::Range(0, 20));
  measure->add_option("--threshold", o.threshold, "density threshold")->check(CLI::PositiveNumber);

  app.require_subcommand(0, 1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    if (o.seed) return seed_examples(o);
    if (*eval) return run_eval(o);
    if (*classify_cmd) return run_classify(o);
    if (*levelset) return run_levelset(o);
    if (*construct) return run_construct(o);
    if (*measure) return run_measure(o);
    std::cerr << "error: a command or --seed-examples is required\n" << app.help();
    return 2;
  } catch (const PrecisionExhausted& e) {
    std::cerr << "precision exhausted: " << e.what() << "\n";
    return 3;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
