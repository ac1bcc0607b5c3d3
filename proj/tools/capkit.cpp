// capkit: command-line driver for the chain, profile and validation suites.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "capkit/chain.hpp"
#include "capkit/io.hpp"
#include "capkit/multidim.hpp"
#include "validate_suite.hpp"

namespace fs = std::filesystem;
using namespace capkit;

namespace {

enum Exit { Ok = 0, Usage = 2, SolverFault = 3, Violation = 4, ValidateFailed = 5 };

struct Options {
  std::string command;
  std::string spec_path;
  std::string points;
  std::string t_grid = "-3,-0.3,10";
  std::uint64_t seed = 1;
  std::string out = "capkit-out";
  int resolution = 0;  // collocation nodes; 0 keeps the default
  int degree = 30;
  double tol = 0.0;  // equality tolerance; 0 keeps the default
  int grid = 0;
  int quad = 0;
  double defect_tol = 0.0;
};

struct LevelGrid {
  std::vector<double> levels;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v))
    throw Error(Errc::ParseError, "cannot read " + what + " from \"" + text + "\"");
  return v;
}

// "re:im" or "re"; coordinates of a point in C^n are joined by '/', points by ','.
std::vector<std::vector<cplx>> parse_points(const std::string& text) {
  std::vector<std::vector<cplx>> pts;
  if (text.empty()) return pts;
  for (const auto& item : split(text, ',')) {
    std::vector<cplx> p;
    for (const auto& coord : split(item, '/')) {
      const auto parts = split(coord, ':');
      if (parts.empty() || parts.size() > 2) throw Error(Errc::ParseError, "bad point coordinate \"" + coord + "\"");
      const double re = parse_number(parts[0], "point real part");
      const double im = parts.size() == 2 ? parse_number(parts[1], "point imaginary part") : 0.0;
      p.emplace_back(re, im);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

LevelGrid parse_t_grid(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw Error(Errc::ParseError, "--t-grid expects min,max,count");
  const double lo = parse_number(parts[0], "t-grid min"), hi = parse_number(parts[1], "t-grid max");
  const double count = parse_number(parts[2], "t-grid count");
  if (!(lo < hi && hi < 0.0)) throw Error(Errc::ParseError, "--t-grid needs min < max < 0");
  if (count < 2 || count != std::floor(count) || count > 10000)
    throw Error(Errc::ParseError, "--t-grid count must be an integer in [2, 10000]");
  LevelGrid g;
  const int n = static_cast<int>(count);
  for (int i = 0; i < n; ++i) g.levels.push_back(i + 1 == n ? hi : lo + (hi - lo) * i / (n - 1));
  return g;
}

ChainConfig chain_config(const Options& o) {
  ChainConfig c;
  c.solver.seed = o.seed;
  if (o.resolution > 0) c.solver.collocation_nodes = o.resolution;
  if (o.grid > 0) c.solver.level_grid = o.grid;
  if (o.tol > 0.0) c.solver.equality_tolerance = o.tol;
  if (o.defect_tol > 0.0) c.solver.defect_tolerance = o.defect_tol;
  if (o.quad > 0) c.quadrature_resolution = o.quad;
  c.bergman_degree = o.degree;
  return c;
}

io::RunInfo run_info(const Options& o, const ChainConfig& c, const io::json& extra) {
  io::RunInfo info;
  info.command = o.command;
  info.seed = o.seed;
  info.config = io::chain_config_to_json(c);
  for (auto it = extra.begin(); it != extra.end(); ++it) info.config[it.key()] = it.value();
  info.defect_tolerance = c.solver.defect_tolerance;
  info.equality_tolerance = c.solver.equality_tolerance;
  return info;
}

fs::path output_dir(const Options& o) {
  const char* env = std::getenv("CAPKIT_OUT");
  fs::path dir = (env && *env) ? fs::path(env) : fs::path(o.out);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::ParseError, "cannot open spec file \"" + path + "\"");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_multidim(const Options& o, const MultiDomain& domain, const std::vector<std::vector<cplx>>& points) {
  const ChainConfig cfg = chain_config(o);
  const io::json spec = io::domain_to_json(domain);
  const auto info = run_info(o, cfg, {{"domain", spec}});
  const fs::path dir = output_dir(o);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& z = points[i];
    io::json doc = {{"schema", "capkit.multidim/1"}, {"ndim", domain.dimension()}};
    doc.update(info.to_json());
    doc["domain"] = spec;
    doc["point"] = io::complex_list_to_json(z);
    doc["kernel"] = kernel_at(domain, z);
    doc["boundary_distance"] = domain.boundary_distance(z);
    doc["lemma_gap"] = lemma_de_gap(domain, z);
    try {
      const auto ind = azukawa_volume(domain, z);
      doc["indicatrix"] = {{"volume", ind.volume}, {"bound", ind.bound}, {"gap", ind.gap}};
      doc["bz_gap"] = bz_lower_bound_gap(domain, z);
      doc["delta_c_gap"] = delta_c_gap(domain, z);
    } catch (const Error& e) {
      if (e.code() != Errc::NoClosedForm) throw;
      doc["indicatrix"] = nullptr;
      doc["indicatrix_unavailable"] = e.what();
    }
    write_file(dir / ("multidim_" + std::to_string(i) + ".json"), doc.dump(2) + "\n");
  }
  std::cout << "wrote " << points.size() << " multidim report(s) to " << dir.string() << "\n";
  return Ok;
}

int cmd_analyze_or_sweep(const Options& o) {
  const io::DomainSpec spec = io::parse_domain_spec(read_file(o.spec_path));
  const auto points = parse_points(o.points);
  if (points.empty()) throw Error(Errc::ParseError, "--points must list at least one point");
  const LevelGrid grid = parse_t_grid(o.t_grid);

  if (const auto* multi = std::get_if<MultiDomain>(&spec)) {
    for (const auto& p : points)
      if (static_cast<int>(p.size()) != multi->dimension())
        throw Error(Errc::ParseError, "point dimension does not match the domain");
    return run_multidim(o, *multi, points);
  }
  const PlanarDomain& domain = std::get<PlanarDomain>(spec);
  std::vector<cplx> zs;
  for (const auto& p : points) {
    if (p.size() != 1) throw Error(Errc::ParseError, "planar points take a single re:im coordinate");
    if (!domain.contains(p[0])) throw Error(Errc::PointOutsideDomain, "point " + io::complex_to_json(p[0]).dump() + " is not inside the domain");
    zs.push_back(p[0]);
  }

  const ChainConfig cfg = chain_config(o);
  const io::json domain_json = io::domain_to_json(domain);
  const auto info = run_info(o, cfg, {{"domain", domain_json}, {"t_grid", grid.levels}});
  const fs::path dir = output_dir(o);
  const BergmanModel model = chain_model(domain, zs[0], cfg);

  std::string sweep_csv = info.csv_preamble() + io::chain_csv_header() + "\n";
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const GreenSolution sol = solve_escalating(domain, zs[i], cfg.solver);
    const auto profile = sublevel_profile(sol, grid.levels, cfg.solver);
    const auto& lv = profile.levels;
    if (o.command == "analyze") {
      write_file(dir / ("profile_" + std::to_string(i) + ".csv"), io::profile_csv(profile, info));
      try {
        const auto r = assemble_chain(model, sol, lv.front(), lv.back(), cfg.solver.equality_tolerance);
        write_file(dir / ("chain_" + std::to_string(i) + ".json"),
                   io::chain_report_document(r, domain_json, info).dump(2) + "\n");
        std::cout << "point " << i << ": verdict " << to_string(r.verdict) << "\n";
      } catch (const ChainViolation& v) {
        io::json doc = io::chain_report_document(v.report(), domain_json, info);
        doc["violation"] = {{"link", v.link_name()}, {"magnitude", v.magnitude()}};
        write_file(dir / ("chain_" + std::to_string(i) + ".json"), doc.dump(2) + "\n");
        throw;
      }
    } else {
      for (std::size_t k = 0; k + 1 < lv.size(); ++k) {
        const auto r = assemble_chain(model, sol, lv[k], lv[k + 1], cfg.solver.equality_tolerance);
        sweep_csv += io::chain_csv_row(i, r) + "\n";
      }
    }
  }
  if (o.command == "sweep") {
    write_file(dir / "sweep.csv", sweep_csv);
    std::cout << "wrote sweep.csv to " << dir.string() << "\n";
  }
  return Ok;
}

int cmd_validate(const Options& o) {
  validate::Settings s;
  s.chain = chain_config(o);
  s.levels = parse_t_grid(o.t_grid).levels;
  validate::Runner runner(s);
  runner.run_all();

  const auto info = run_info(o, s.chain, {{"levels", s.levels}});
  io::json doc = {{"schema", "capkit.validate/1"}, {"ndim", 1}};
  doc.update(info.to_json());
  doc["checks"] = runner.to_json();
  doc["pass"] = runner.all_pass();
  write_file(output_dir(o) / "validate.json", doc.dump(2) + "\n");

  const validate::Check* first_failure = nullptr;
  for (const auto& c : runner.checks()) {
    std::printf("%s %-40s measured=%s %s %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                numerics::format17(c.measured).c_str(), c.at_most ? "<=" : ">=", numerics::format17(c.threshold).c_str());
    if (!c.pass && !first_failure) first_failure = &c;
  }
  if (first_failure) {
    std::cerr << "validate: first failing invariant: " << first_failure->name;
    if (!first_failure->note.empty()) std::cerr << " (" << first_failure->note << ")";
    std::cerr << "\n";
    return ValidateFailed;
  }
  return Ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of the capacity, Bergman kernel and sublevel-volume inequality chain"};
  app.set_version_flag("--version", std::string(tool_version));
  Options o;
  app.add_option("command", o.command, "analyze | validate | sweep")
      ->required()
      ->check(CLI::IsMember({"analyze", "validate", "sweep"}));
  app.add_option("--spec", o.spec_path, "domain spec JSON file");
  app.add_option("--points", o.points, "points: re:im, comma separated; C^n coordinates joined by '/'");
  app.add_option("--t-grid", o.t_grid, "level grid min,max,count (all < 0)");
  app.add_option("--seed", o.seed, "RNG seed for Monte Carlo volume checks");
  app.add_option("--out", o.out, "output directory (CAPKIT_OUT overrides)");
  app.add_option("--resolution", o.resolution, "boundary collocation nodes per component")->check(CLI::PositiveNumber);
  app.add_option("--degree", o.degree, "Bergman basis degree")->check(CLI::NonNegativeNumber);
  app.add_option("--tol", o.tol, "relative equality tolerance")->check(CLI::PositiveNumber);
  app.add_option("--grid", o.grid, "marching-squares cells per side")->check(CLI::PositiveNumber);
  app.add_option("--quad", o.quad, "Bergman quadrature resolution")->check(CLI::PositiveNumber);
  app.add_option("--defect-tol", o.defect_tol, "boundary defect tolerance")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return Usage;
  }

  try {
    if (o.command == "validate") return cmd_validate(o);
    if (o.spec_path.empty()) throw Error(Errc::ParseError, "--spec is required for " + o.command);
    return cmd_analyze_or_sweep(o);
  } catch (const ChainViolation& v) {
    std::cerr << "capkit: chain violation at link " << v.link_name() << ", magnitude "
              << numerics::format17(v.magnitude()) << ": " << v.what() << "\n";
    return Violation;
  } catch (const Error& e) {
    std::cerr << "capkit: " << e.what() << "\n";
    switch (e.code()) {
      case Errc::ParseError:
      case Errc::InvalidDomain:
      case Errc::InvalidArgument:
      case Errc::InvalidCount:
      case Errc::PointOutsideDomain:
      case Errc::PoleOutsideDomain:
        return Usage;
      default:
        return SolverFault;
    }
  } catch (const std::exception& e) {
    std::cerr << "capkit: " << e.what() << "\n";
    return SolverFault;
  }
}
