// Batch front door: envelope | decide | solve | verify | sweep.
// Exit codes: 0 success / Exists, 2 config error, 3 computation error,
// 10 NotExists, 11 Unknown, 12 solve refused after NotExists.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>

#include "supremal/io.hpp"

namespace fs = std::filesystem;
using namespace supremal;
using nlohmann::json;

namespace {

struct RunConfig {
  std::string builtin_name;
  std::string field_file;
  int grid_n = 0;            // nodes per axis; 0 = dimension default
  double lo = -2.0, hi = 2.0;
  std::vector<double> xi0;
  std::string omega;         // "a:b" or "ax:bx,ay:by"
  double tol_geom = 1e-9;
  double tol_level = 1e-7;
  unsigned seed = 0;
  std::string out = "out";
  // solve
  int pieces = 8;
  double residual_tol = 1e-2;
  int max_cells = 4096;
  // verify
  std::string solution_file;
  double claimed = 0.0;
  bool claimed_set = false;
  // sweep
  std::string range = "-1.5:1.5";
  int steps = 31;
  std::vector<double> sweep_dir;
};

void apply_config_file(const std::string& path, RunConfig& c) {
  const json j = json::parse(io::read_text(path));
  static const std::vector<std::string> keys = {
      "builtin", "field", "grid", "lo", "hi", "xi0", "omega", "tol_geom",
      "tol_level", "seed", "out", "pieces", "residual_tol", "max_cells",
      "solution", "claimed", "range", "steps", "sweep_dir"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
      throw ParseError("config: unknown key '" + it.key() + "'");
  }
  if (j.contains("builtin")) c.builtin_name = j.at("builtin").get<std::string>();
  if (j.contains("field")) c.field_file = j.at("field").get<std::string>();
  if (j.contains("grid")) c.grid_n = j.at("grid").get<int>();
  if (j.contains("lo")) c.lo = j.at("lo").get<double>();
  if (j.contains("hi")) c.hi = j.at("hi").get<double>();
  if (j.contains("xi0")) c.xi0 = j.at("xi0").get<std::vector<double>>();
  if (j.contains("omega")) c.omega = j.at("omega").get<std::string>();
  if (j.contains("tol_geom")) c.tol_geom = j.at("tol_geom").get<double>();
  if (j.contains("tol_level")) c.tol_level = j.at("tol_level").get<double>();
  if (j.contains("seed")) c.seed = j.at("seed").get<unsigned>();
  if (j.contains("out")) c.out = j.at("out").get<std::string>();
  if (j.contains("pieces")) c.pieces = j.at("pieces").get<int>();
  if (j.contains("residual_tol")) c.residual_tol = j.at("residual_tol").get<double>();
  if (j.contains("max_cells")) c.max_cells = j.at("max_cells").get<int>();
  if (j.contains("solution")) c.solution_file = j.at("solution").get<std::string>();
  if (j.contains("claimed")) { c.claimed = j.at("claimed").get<double>(); c.claimed_set = true; }
  if (j.contains("range")) c.range = j.at("range").get<std::string>();
  if (j.contains("steps")) c.steps = j.at("steps").get<int>();
  if (j.contains("sweep_dir")) c.sweep_dir = j.at("sweep_dir").get<std::vector<double>>();
}

ScalarField load_field(const RunConfig& c) {
  if (!c.builtin_name.empty() && !c.field_file.empty())
    throw Error("give either --builtin or --field, not both");
  if (!c.builtin_name.empty()) return builtin(c.builtin_name);
  if (!c.field_file.empty())
    return io::field_from_json(json::parse(io::read_text(c.field_file)));
  throw Error("a field is required (--builtin or --field)");
}

GridSpec make_grid(const RunConfig& c, const ScalarField& f,
                   const Vec2* xi0 = nullptr) {
  if (f.kind() == FieldKind::Sampled) return f.grid();
  double lo = c.lo, hi = c.hi;
  if (xi0) {
    // widen the window only when the datum gradient falls outside it
    const double m = f.dim() == 2 ? std::max(std::abs(xi0->x()), std::abs(xi0->y()))
                                  : std::abs(xi0->x());
    if (m >= hi || -m <= lo) {
      lo = std::min(lo, -m - 1.0);
      hi = std::max(hi, m + 1.0);
    }
  }
  const int n = c.grid_n > 0 ? c.grid_n : (f.dim() == 1 ? 401 : 65);
  return f.dim() == 1 ? GridSpec::line(lo, hi, n) : GridSpec::square(lo, hi, n);
}

Vec2 parse_xi0(const RunConfig& c, int dim) {
  if (c.xi0.empty()) throw Error("--xi0 is required");
  if (static_cast<int>(c.xi0.size()) != dim)
    throw Error("--xi0 must have one value per dimension");
  return Vec2(c.xi0[0], dim == 2 ? c.xi0[1] : 0.0);
}

Domain parse_omega(const RunConfig& c, int dim) {
  if (c.omega.empty())
    return dim == 1 ? Domain::interval(0, 1) : Domain::box(0, 1, 0, 1);
  const auto parse_pair = [](const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw Error("omega range needs a ':'");
    return std::pair<double, double>(std::stod(s.substr(0, colon)),
                                     std::stod(s.substr(colon + 1)));
  };
  const auto comma = c.omega.find(',');
  if (dim == 1) {
    const auto [a, b] = parse_pair(c.omega);
    return Domain::interval(a, b);
  }
  if (comma == std::string::npos) {
    const auto [a, b] = parse_pair(c.omega);
    return Domain::box(a, b, a, b);
  }
  const auto [ax, bx] = parse_pair(c.omega.substr(0, comma));
  const auto [ay, by] = parse_pair(c.omega.substr(comma + 1));
  return Domain::box(ax, bx, ay, by);
}

int exit_code_for(Decision d) {
  switch (d) {
    case Decision::Exists: return 0;
    case Decision::NotExists: return 10;
    case Decision::Unknown: return 11;
  }
  return 3;
}

int cmd_envelope(const RunConfig& c) {
  const ScalarField f = load_field(c);
  const GridSpec g = make_grid(c, f);
  const Tolerances tol{c.tol_geom, c.tol_level};
  const EnvelopeResult env = compute_envelope(f, g, tol);
  fs::create_directories(c.out);
  io::write_text(c.out + "/envelope.csv", io::envelope_to_csv(env, f));
  io::write_text(c.out + "/certificates.json",
                 io::envelope_meta_to_json(env).dump(2) + "\n");
  std::cout << "envelope: " << g.size() << " nodes -> " << c.out
            << "/envelope.csv\n";
  return 0;
}

int cmd_decide(const RunConfig& c) {
  const ScalarField f = load_field(c);
  const Vec2 xi0 = parse_xi0(c, f.dim());
  const GridSpec g = make_grid(c, f, &xi0);
  const Tolerances tol{c.tol_geom, c.tol_level};
  const ExistenceVerdict v = decide_affine(f, xi0, g, tol);
  fs::create_directories(c.out);
  io::write_text(c.out + "/verdict.json", io::verdict_to_json(v).dump(2) + "\n");
  std::cout << "decide: " << io::verdict_to_json(v)["decision"].get<std::string>()
            << " relaxed-value " << io::double_str(v.relaxed_value);
  if (v.nu) std::cout << " nu (" << v.nu->x() << ", " << v.nu->y() << ")";
  std::cout << "\n";
  return exit_code_for(v.decision);
}

int cmd_solve(const RunConfig& c) {
  const ScalarField f = load_field(c);
  const Vec2 xi0 = parse_xi0(c, f.dim());
  const GridSpec g = make_grid(c, f, &xi0);
  const Tolerances tol{c.tol_geom, c.tol_level};
  const Domain omega = parse_omega(c, f.dim());
  SolveOptions opts;
  opts.pieces = c.pieces;
  opts.residual_tol = c.residual_tol;
  opts.max_cells = c.max_cells;
  SolveReport rep;
  try {
    rep = solve_P(f, xi0, g, omega, opts, tol);
  } catch (const VerdictWasNotExists& e) {
    std::cerr << "solve: " << e.what() << "\n";
    return 12;
  }
  fs::create_directories(c.out);
  io::write_text(c.out + "/solution_mesh.json",
                 io::mesh_to_json(rep.u).dump(2) + "\n");
  io::write_text(c.out + "/gradients.csv", io::gradient_csv(rep.u, f));
  json r;
  r["ess_sup_f"] = rep.ess_sup_f;
  r["relaxed_value"] = rep.verdict.relaxed_value;
  r["residual_fraction"] = rep.residual_fraction;
  r["sup_deviation"] = rep.sup_deviation;
  r["verdict"] = io::verdict_to_json(rep.verdict);
  json e = json::array();
  for (const Vec2& p : rep.target_E) e.push_back(json::array({p.x(), p.y()}));
  r["target_E"] = e;
  io::write_text(c.out + "/solve_report.json", r.dump(2) + "\n");
  std::cout << "solve: ess-sup " << io::double_str(rep.ess_sup_f) << " residual "
            << io::double_str(rep.residual_fraction) << "\n";
  return 0;
}

int cmd_verify(const RunConfig& c) {
  const ScalarField f = load_field(c);
  if (c.solution_file.empty()) throw Error("verify needs --solution FILE");
  const PiecewiseAffineFunction u =
      io::mesh_from_json(json::parse(io::read_text(c.solution_file)));
  const Tolerances tol{c.tol_geom, c.tol_level};
  double claimed = c.claimed;
  if (!c.claimed_set) {
    const GridSpec g = make_grid(c, f, &u.datum.xi0);
    claimed = relaxed_value_affine(f, u.datum.xi0, g, tol).value;
  }
  const AuditReport audit = audit_solution(f, u, claimed, tol);
  const JensenReport jensen = jensen_audit(f, u, tol);
  fs::create_directories(c.out);
  json r;
  r["audit"] = io::audit_to_json(audit);
  r["jensen"] = io::jensen_to_json(jensen);
  io::write_text(c.out + "/verify_report.json", r.dump(2) + "\n");
  std::cout << "verify: audit " << (audit.pass ? "pass" : "fail") << " (max f "
            << io::double_str(audit.max_f) << " vs claimed "
            << io::double_str(claimed) << "), jensen "
            << (jensen.holds ? "holds" : "violated") << "\n";
  return audit.pass ? 0 : 3;
}

int cmd_sweep(const RunConfig& c) {
  const ScalarField f = load_field(c);
  const auto colon = c.range.find(':');
  if (colon == std::string::npos) throw Error("--range needs lo:hi");
  const double s_lo = std::stod(c.range.substr(0, colon));
  const double s_hi = std::stod(c.range.substr(colon + 1));
  if (c.steps < 2) throw Error("--steps >= 2");
  Vec2 dir(1, 0);
  if (!c.sweep_dir.empty()) {
    if (c.sweep_dir.size() != 2) throw Error("--dir needs two components");
    dir = Vec2(c.sweep_dir[0], c.sweep_dir[1]).normalized();
  }
  const double reach = std::max(std::abs(s_lo), std::abs(s_hi));
  const Vec2 far = reach * dir;
  const GridSpec g = make_grid(c, f, &far);
  const Tolerances tol{c.tol_geom, c.tol_level};
  EnvelopeResult env;
  const EnvelopeResult* penv = nullptr;
  if (f.dim() == 2) {
    env = envelope_levelsweep(f, g, tol);
    penv = &env;
  }
  std::ostringstream os;
  os << "xi0_1,xi0_2,relaxed_value,verdict,branch,level_margin,boundary_margin\n";
  for (int k = 0; k < c.steps; ++k) {
    const double s = s_lo + (s_hi - s_lo) * k / (c.steps - 1);
    const Vec2 xi0 = s * dir;
    const ExistenceVerdict v = decide_affine(f, xi0, g, tol, penv);
    const json vj = io::verdict_to_json(v);
    os << io::double_str(xi0.x()) << ',' << io::double_str(xi0.y()) << ','
       << io::double_str(v.relaxed_value) << ','
       << vj["decision"].get<std::string>() << ','
       << vj["branch"].get<std::string>() << ',' << io::double_str(v.level_margin)
       << ',' << io::double_str(v.boundary_distance) << '\n';
  }
  fs::create_directories(c.out);
  io::write_text(c.out + "/sweep.csv", os.str());
  std::cout << "sweep: " << c.steps << " verdicts -> " << c.out << "/sweep.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"level-convex envelopes and existence verdicts for supremal "
               "variational problems"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  RunConfig cfg;
  // A config file seeds the defaults; flags parsed afterwards override it.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        apply_config_file(argv[i + 1], cfg);
      } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
      }
    }
  }
  std::string config_file;
  app.add_option("--config", config_file, "JSON config file (flags override)");
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--tol-geom", cfg.tol_geom, "geometric tolerance");
  app.add_option("--tol-level", cfg.tol_level, "level tolerance");
  app.add_option("--seed", cfg.seed, "random seed for oracle restarts");

  auto add_field_opts = [&](CLI::App* sub) {
    sub->add_option("--builtin", cfg.builtin_name, "builtin field name");
    sub->add_option("--field", cfg.field_file, "field definition file");
    sub->add_option("--grid", cfg.grid_n, "grid nodes per axis");
    sub->add_option("--lo", cfg.lo, "grid window lower bound");
    sub->add_option("--hi", cfg.hi, "grid window upper bound");
  };
  auto add_xi0 = [&](CLI::App* sub) {
    sub->add_option("--xi0", cfg.xi0, "datum gradient components")->delimiter(',');
  };

  CLI::App* envc = app.add_subcommand("envelope", "compute the envelope on a grid");
  add_field_opts(envc);

  CLI::App* dec = app.add_subcommand("decide", "existence verdict for affine data");
  add_field_opts(dec);
  add_xi0(dec);

  CLI::App* sol = app.add_subcommand("solve", "construct a minimizer");
  add_field_opts(sol);
  add_xi0(sol);
  sol->add_option("--omega", cfg.omega, "domain: a:b or ax:bx,ay:by");
  sol->add_option("--pieces", cfg.pieces, "zigzag teeth (1D)");
  sol->add_option("--residual-tol", cfg.residual_tol, "Vitali residual tolerance");
  sol->add_option("--max-cells", cfg.max_cells, "Vitali cell budget");

  CLI::App* ver = app.add_subcommand("verify", "audit a solution mesh");
  add_field_opts(ver);
  ver->add_option("--solution", cfg.solution_file, "solution mesh file");
  ver->add_option("--claimed", cfg.claimed, "claimed ess-sup value")
      ->each([&cfg](const std::string&) { cfg.claimed_set = true; });

  CLI::App* swp = app.add_subcommand("sweep", "verdict phase diagram over xi0");
  add_field_opts(swp);
  swp->add_option("--range", cfg.range, "sweep range lo:hi");
  swp->add_option("--steps", cfg.steps, "sweep steps");
  swp->add_option("--dir", cfg.sweep_dir, "sweep direction (2D)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (envc->parsed()) return cmd_envelope(cfg);
    if (dec->parsed()) return cmd_decide(cfg);
    if (sol->parsed()) return cmd_solve(cfg);
    if (ver->parsed()) return cmd_verify(cfg);
    if (swp->parsed()) return cmd_sweep(cfg);
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
