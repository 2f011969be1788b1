// Command-line front end for the lattice-spectra library.
//
// Subcommands:
//   spectrum    closed-form lattice spectrum            -> CSV j_index,eigenvalue,multiplicity
//   solve       deterministic-equivalent density/CDF    -> CSV x,f,F        (+ JSON sidecar)
//   sample      Monte-Carlo expected ESD                -> CSV x,F_expected (+ JSON sidecar)
//   compare     KS/Levy metrics between two curve files -> JSON report
//   normalized  normalized-adjacency Levy trend         -> CSV dims,d_levy_mean,d_levy_std,trials
//
// Configuration can come from a JSON file (--config); command-line flags
// override it.  Every command is reproducible: identical configuration and
// seed produce byte-identical primary output, independent of --threads.
//
// Exit codes: 0 success, 2 configuration error, 3 solver failure,
// 4 resource cap exceeded, 5 input mismatch.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "latspec/latspec.hpp"

namespace {

using nlohmann::ordered_json;

// Shortest-round-trip decimal text for a double (via the JSON serializer);
// used in provenance comments and sidecars.  CSV data cells use the fixed
// 17-significant-digit form instead.
std::string num_str(double v) { return ordered_json(v).dump(); }

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const long v = std::strtol(item.c_str(), &end, 10);
    if (end == item.c_str() || *end != '\0')
      throw latspec::invalid_argument_error("cannot parse dimension '" + item +
                                            "'");
    dims.push_back(static_cast<int>(v));
  }
  if (dims.empty())
    throw latspec::invalid_argument_error("empty dimension list");
  return dims;
}

std::vector<std::vector<int>> parse_dims_list(const std::string& text) {
  std::vector<std::vector<int>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';'))
    if (!item.empty()) out.push_back(parse_dims(item));
  if (out.empty())
    throw latspec::invalid_argument_error("empty dimension-list");
  return out;
}

struct GridWindow {
  double x_min = 0.0;
  double x_max = 0.0;
  long n_points = 0;
};

GridWindow parse_grid(const std::string& text) {
  GridWindow g;
  const auto first = text.find(':');
  const auto second = text.find(':', first == std::string::npos ? first : first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw latspec::invalid_argument_error(
        "grid must be min:max:count, got '" + text + "'");
  const std::string smin = text.substr(0, first);
  const std::string smax = text.substr(first + 1, second - first - 1);
  const std::string scount = text.substr(second + 1);
  char* end = nullptr;
  g.x_min = std::strtod(smin.c_str(), &end);
  if (end == smin.c_str() || *end != '\0')
    throw latspec::invalid_argument_error("cannot parse grid minimum '" +
                                          smin + "'");
  g.x_max = std::strtod(smax.c_str(), &end);
  if (end == smax.c_str() || *end != '\0')
    throw latspec::invalid_argument_error("cannot parse grid maximum '" +
                                          smax + "'");
  g.n_points = std::strtol(scount.c_str(), &end, 10);
  if (end == scount.c_str() || *end != '\0')
    throw latspec::invalid_argument_error("cannot parse grid count '" +
                                          scount + "'");
  return g;
}

std::string dims_str(const std::vector<int>& dims, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(dims[i]);
  }
  return out;
}

// All tunables of an experiment; fields stay empty until supplied by the
// config file or a flag, so flag-over-config precedence is a plain overwrite.
struct ExperimentConfig {
  std::optional<std::vector<int>> dims;
  std::optional<std::vector<std::vector<int>>> dims_list;
  std::optional<double> p;
  std::optional<GridWindow> grid;
  std::optional<double> epsilon;
  std::optional<long> trials;
  std::optional<std::uint64_t> master_seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  std::optional<double> tolerance;
  std::optional<long> max_iterations;
  std::optional<double> damping;
};

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw latspec::invalid_argument_error("cannot open config '" + path + "'");
  const ordered_json j = ordered_json::parse(in);
  ExperimentConfig c;
  if (j.contains("dims")) c.dims = j.at("dims").get<std::vector<int>>();
  if (j.contains("dims_list"))
    c.dims_list = j.at("dims_list").get<std::vector<std::vector<int>>>();
  if (j.contains("p")) c.p = j.at("p").get<double>();
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    GridWindow w;
    w.x_min = g.at("x_min").get<double>();
    w.x_max = g.at("x_max").get<double>();
    w.n_points = g.at("n_points").get<long>();
    c.grid = w;
  }
  if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
  if (j.contains("trials")) c.trials = j.at("trials").get<long>();
  if (j.contains("master_seed"))
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  if (j.contains("out")) c.out = j.at("out").get<std::string>();
  if (j.contains("tolerance")) c.tolerance = j.at("tolerance").get<double>();
  if (j.contains("max_iterations"))
    c.max_iterations = j.at("max_iterations").get<long>();
  if (j.contains("damping")) c.damping = j.at("damping").get<double>();
  return c;
}

void write_json(const std::string& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw latspec::invalid_argument_error("cannot open '" + path +
                                          "' for writing");
  out << j.dump(2) << "\n";
}

// Thread-count precedence: --threads flag / config file, then the
// LATTICE_SPECTRA_THREADS environment variable, then 0 (= all hardware).
int resolved_threads(const ExperimentConfig& cfg) {
  if (cfg.threads) return *cfg.threads;
  if (const char* env = std::getenv("LATTICE_SPECTRA_THREADS")) {
    std::size_t used = 0;
    int v = -1;
    try {
      v = std::stoi(env, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || env[used] != '\0' || v < 0)
      throw latspec::invalid_argument_error(
          "LATTICE_SPECTRA_THREADS must be a non-negative integer, got '" +
          std::string(env) + "'");
    return v;
  }
  return 0;
}

latspec::SolverOptions solver_options(const ExperimentConfig& cfg) {
  latspec::SolverOptions opts;
  if (cfg.tolerance) opts.tolerance = *cfg.tolerance;
  if (cfg.max_iterations) opts.max_iterations = *cfg.max_iterations;
  if (cfg.damping) opts.damping = *cfg.damping;
  return opts;
}

GridWindow effective_window(const ExperimentConfig& cfg,
                            const latspec::LatticeSpec& spec, double p) {
  if (cfg.grid) {
    if (cfg.grid->n_points < 2)
      throw latspec::invalid_argument_error("grid needs at least 2 points");
    return *cfg.grid;
  }
  const auto window = latspec::default_support_window(spec, p);
  return GridWindow{window.first, window.second, 2001};
}

const std::vector<int>& require_dims(const ExperimentConfig& cfg) {
  if (!cfg.dims)
    throw latspec::invalid_argument_error(
        "missing dimensions (--dims or config key 'dims')");
  return *cfg.dims;
}

double require_p(const ExperimentConfig& cfg) {
  if (!cfg.p)
    throw latspec::invalid_argument_error(
        "missing link probability (--p or config key 'p')");
  return *cfg.p;
}

int cmd_spectrum(const ExperimentConfig& cfg) {
  const latspec::LatticeSpec spec(require_dims(cfg));
  const auto lines = latspec::deterministic_spectrum(spec);
  std::vector<std::vector<std::string>> rows;
  rows.reserve(lines.size());
  for (std::size_t k = 0; k < lines.size(); ++k)
    rows.push_back({std::to_string(k),
                    latspec::format_g17(lines[k].eigenvalue),
                    std::to_string(lines[k].multiplicity)});
  const std::string out = cfg.out.value_or("spectrum.csv");
  latspec::write_csv(out,
                     "lattice_spectra spectrum dims=" + dims_str(*cfg.dims),
                     {"j_index", "eigenvalue", "multiplicity"}, rows);
  return 0;
}

int cmd_solve(const ExperimentConfig& cfg) {
  const latspec::LatticeSpec spec(require_dims(cfg));
  const double p = require_p(cfg);
  const double eps = cfg.epsilon.value_or(1e-3);
  const GridWindow w = effective_window(cfg, spec, p);
  const latspec::Grid grid(w.x_min, w.x_max, w.n_points, eps);
  const latspec::SolverOptions opts = solver_options(cfg);
  latspec::DensityDiagnostics diag;
  const latspec::DensityCurve curve = latspec::density_on_grid(
      spec, p, grid, opts, resolved_threads(cfg), &diag);
  std::vector<std::vector<std::string>> rows;
  rows.reserve(curve.f.size());
  for (long k = 0; k < grid.n_points(); ++k)
    rows.push_back({latspec::format_g17(grid.x(k)),
                    latspec::format_g17(curve.f[k]),
                    latspec::format_g17(curve.F[k])});
  const std::string out = cfg.out.value_or("solve.csv");
  const std::string provenance =
      "lattice_spectra solve dims=" + dims_str(*cfg.dims) + " p=" + num_str(p) +
      " grid=" + num_str(w.x_min) + ":" + num_str(w.x_max) + ":" +
      std::to_string(w.n_points) + " eps=" + num_str(eps) +
      " tol=" + num_str(opts.tolerance) +
      " max_iter=" + std::to_string(opts.max_iterations);
  latspec::write_csv(out, provenance, {"x", "f", "F"}, rows);
  ordered_json sidecar;
  sidecar["command"] = "solve";
  sidecar["dims"] = dims_str(*cfg.dims);
  sidecar["p"] = p;
  sidecar["x_min"] = w.x_min;
  sidecar["x_max"] = w.x_max;
  sidecar["n_points"] = w.n_points;
  sidecar["epsilon"] = eps;
  sidecar["tolerance"] = opts.tolerance;
  sidecar["max_iterations"] = opts.max_iterations;
  sidecar["damping"] = opts.damping;
  sidecar["iterations_max"] = diag.max_iterations;
  sidecar["residual_max"] = diag.max_residual;
  sidecar["class_l_ok"] = true;  // enforced per point; failure aborts the run
  write_json(out + ".json", sidecar);
  return 0;
}

int cmd_sample(const ExperimentConfig& cfg) {
  const latspec::LatticeSpec spec(require_dims(cfg));
  const double p = require_p(cfg);
  const latspec::PercolationModel model(spec, p);
  const long trials = cfg.trials.value_or(100);
  const std::uint64_t seed = cfg.master_seed.value_or(0);
  const GridWindow w = effective_window(cfg, spec, p);
  if (w.n_points < 2)
    throw latspec::invalid_argument_error("grid needs at least 2 points");
  std::vector<double> grid_x(w.n_points);
  for (long k = 0; k < w.n_points; ++k)
    grid_x[k] = w.x_min + k * (w.x_max - w.x_min) / (w.n_points - 1);
  std::vector<long long> zero_counts;
  const latspec::EmpiricalCDF curve = latspec::expected_esd(
      model, trials, seed, grid_x, resolved_threads(cfg), &zero_counts);
  std::vector<std::vector<std::string>> rows;
  rows.reserve(grid_x.size());
  for (std::size_t k = 0; k < grid_x.size(); ++k)
    rows.push_back({latspec::format_g17(grid_x[k]),
                    latspec::format_g17(curve.F[k])});
  const std::string out = cfg.out.value_or("sample.csv");
  const std::string provenance =
      "lattice_spectra sample dims=" + dims_str(*cfg.dims) + " p=" + num_str(p) +
      " trials=" + std::to_string(trials) + " seed=" + std::to_string(seed) +
      " grid=" + num_str(w.x_min) + ":" + num_str(w.x_max) + ":" +
      std::to_string(w.n_points);
  latspec::write_csv(out, provenance, {"x", "F_expected"}, rows);
  long long zero_total = 0;
  long long zero_max = 0;
  for (long long c : zero_counts) {
    zero_total += c;
    zero_max = std::max(zero_max, c);
  }
  ordered_json sidecar;
  sidecar["command"] = "sample";
  sidecar["dims"] = dims_str(*cfg.dims);
  sidecar["p"] = p;
  sidecar["trials"] = trials;
  sidecar["master_seed"] = seed;
  sidecar["x_min"] = w.x_min;
  sidecar["x_max"] = w.x_max;
  sidecar["n_points"] = w.n_points;
  sidecar["zero_degree_total"] = zero_total;
  sidecar["zero_degree_max"] = zero_max;
  write_json(out + ".json", sidecar);
  return 0;
}

// Pulls the grid column and the distribution column out of a curve CSV
// (accepts both solve output, column F, and sample output, column
// F_expected; otherwise falls back to the last column).
void load_curve(const std::string& path, std::vector<double>* x,
                std::vector<double>* f) {
  const latspec::CsvTable table = latspec::read_csv(path);
  const int xcol = table.column("x");
  if (xcol < 0)
    throw latspec::invalid_argument_error("'" + path + "' has no x column");
  int fcol = table.column("F");
  if (fcol < 0) fcol = table.column("F_expected");
  if (fcol < 0) fcol = static_cast<int>(table.header.size()) - 1;
  if (fcol == xcol)
    throw latspec::invalid_argument_error("'" + path +
                                          "' has no distribution column");
  *x = table.numeric_column(xcol);
  *f = table.numeric_column(fcol);
}

int cmd_compare(const std::string& file_a, const std::string& file_b,
                const std::string& metrics, const std::string& out_path) {
  std::set<std::string> wanted;
  {
    std::stringstream ss(metrics);
    std::string item;
    while (std::getline(ss, item, ',')) wanted.insert(item);
  }
  for (const auto& m : wanted)
    if (m != "ks" && m != "levy")
      throw latspec::invalid_argument_error("unknown metric '" + m + "'");
  latspec::EmpiricalCDF a, b;
  load_curve(file_a, &a.x, &a.F);
  load_curve(file_b, &b.x, &b.F);
  ordered_json report;
  if (wanted.count("ks")) report["ks"] = latspec::ks_distance(a, b);
  if (wanted.count("levy")) {
    report["levy"] = latspec::levy_distance(a, b);
    report["levy_resolution"] = latspec::levy_resolution(a.x);
  }
  const std::string text = report.dump(2);
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
      throw latspec::invalid_argument_error("cannot open '" + out_path + "'");
    out << text << "\n";
  }
  std::cout << text << "\n";
  return 0;
}

int cmd_normalized(const ExperimentConfig& cfg) {
  if (!cfg.dims_list)
    throw latspec::invalid_argument_error(
        "missing dimension list (--dims-list or config key 'dims_list')");
  const double p = require_p(cfg);
  const long trials = cfg.trials.value_or(20);
  const std::uint64_t seed = cfg.master_seed.value_or(0);
  std::vector<std::vector<std::string>> rows;
  long long zero_total = 0;
  for (const auto& dims : *cfg.dims_list) {
    const latspec::LatticeSpec spec(dims);
    const latspec::PercolationModel model(spec, p);
    const double half =
        std::sqrt(static_cast<double>(spec.gamma())) + 0.5;
    std::vector<double> grid_x(2001);
    for (std::size_t k = 0; k < grid_x.size(); ++k)
      grid_x[k] = -half + k * (2.0 * half) / (grid_x.size() - 1);
    const latspec::NormalizedComparison result = latspec::normalized_comparison(
        model, trials, seed, grid_x, resolved_threads(cfg));
    for (long long c : result.zero_degree_counts) zero_total += c;
    rows.push_back({dims_str(dims, 'x'),
                    latspec::format_g17(result.d_levy_mean),
                    latspec::format_g17(result.d_levy_std),
                    std::to_string(trials)});
  }
  const std::string out = cfg.out.value_or("normalized.csv");
  std::string dims_all;
  for (std::size_t i = 0; i < cfg.dims_list->size(); ++i) {
    if (i) dims_all += ";";
    dims_all += dims_str((*cfg.dims_list)[i]);
  }
  const std::string provenance =
      "lattice_spectra normalized dims_list=" + dims_all + " p=" + num_str(p) +
      " trials=" + std::to_string(trials) + " seed=" + std::to_string(seed);
  latspec::write_csv(out, provenance,
                     {"dims", "d_levy_mean", "d_levy_std", "trials"}, rows);
  ordered_json sidecar;
  sidecar["command"] = "normalized";
  sidecar["dims_list"] = dims_all;
  sidecar["p"] = p;
  sidecar["trials"] = trials;
  sidecar["master_seed"] = seed;
  sidecar["zero_degree_total"] = zero_total;
  write_json(out + ".json", sidecar);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Deterministic-equivalent spectral distributions for lattice "
      "bond-percolation models"};
  app.require_subcommand(1);

  std::string config_path, dims, grid, out, dims_list, metrics = "ks,levy";
  std::string file_a, file_b;
  double p = 0.0, eps = 0.0, tol = 0.0, damping = 0.0;
  long trials = 0, max_iter = 0;
  std::uint64_t seed = 0;
  int threads = 0;

  struct SubOpts {
    CLI::Option* config = nullptr;
    CLI::Option* dims = nullptr;
    CLI::Option* dims_list = nullptr;
    CLI::Option* p = nullptr;
    CLI::Option* grid = nullptr;
    CLI::Option* eps = nullptr;
    CLI::Option* trials = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* threads = nullptr;
    CLI::Option* out = nullptr;
    CLI::Option* tol = nullptr;
    CLI::Option* max_iter = nullptr;
    CLI::Option* damping = nullptr;
  };

  auto add_common = [&](CLI::App* sub, bool with_p, bool with_solver,
                        bool with_trials, bool with_grid) {
    SubOpts o;
    o.config = sub->add_option("--config", config_path,
                               "JSON config file; flags override it");
    o.dims = sub->add_option("--dims", dims,
                             "comma-separated dimension sizes, e.g. 20,40");
    if (with_p)
      o.p = sub->add_option("--p", p, "link inclusion probability in [0,1]");
    o.out = sub->add_option("--out", out, "output CSV path");
    o.threads = sub->add_option(
        "--threads", threads,
        "worker threads (0 = LATTICE_SPECTRA_THREADS or hardware)");
    if (with_grid) {
      o.grid = sub->add_option("--grid", grid,
                               "evaluation grid as min:max:count "
                               "(default: support window x 2001)");
    }
    if (with_solver) {
      o.eps = sub->add_option("--eps", eps,
                              "imaginary offset epsilon (default 1e-3)");
      o.tol = sub->add_option("--tol", tol,
                              "solver residual tolerance (default 1e-12)");
      o.max_iter = sub->add_option("--max-iter", max_iter,
                                   "solver iteration cap (default 10000)");
      o.damping = sub->add_option(
          "--damping", damping, "starting solver step size in (0,1], default 1");
    }
    if (with_trials) {
      o.trials = sub->add_option("--trials", trials, "Monte-Carlo trial count");
      o.seed = sub->add_option("--seed", seed, "master seed (default 0)");
    }
    return o;
  };

  CLI::App* sub_spectrum =
      app.add_subcommand("spectrum", "closed-form lattice spectrum");
  SubOpts so_spectrum = add_common(sub_spectrum, false, false, false, false);

  CLI::App* sub_solve = app.add_subcommand(
      "solve", "deterministic-equivalent density and CDF on a grid");
  SubOpts so_solve = add_common(sub_solve, true, true, false, true);

  CLI::App* sub_sample = app.add_subcommand(
      "sample", "Monte-Carlo expected empirical spectral distribution");
  SubOpts so_sample = add_common(sub_sample, true, false, true, true);

  CLI::App* sub_compare =
      app.add_subcommand("compare", "KS/Levy distances between curve files");
  sub_compare->add_option("--file-a", file_a, "first curve CSV")->required();
  sub_compare->add_option("--file-b", file_b, "second curve CSV")->required();
  sub_compare->add_option("--metrics", metrics,
                          "comma-separated subset of ks,levy");
  CLI::Option* compare_out =
      sub_compare->add_option("--out", out, "also write the report here");

  CLI::App* sub_normalized = app.add_subcommand(
      "normalized", "Levy distance between normalized and scaled spectra");
  SubOpts so_normalized = add_common(sub_normalized, true, false, true, false);
  CLI::Option* normalized_list = sub_normalized->add_option(
      "--dims-list", dims_list,
      "semicolon-separated dimension tuples, e.g. 5,5;10,10;20,20");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto merge = [&](const SubOpts& o) {
      ExperimentConfig cfg;
      if (o.config && o.config->count()) cfg = load_config(config_path);
      if (o.dims && o.dims->count()) cfg.dims = parse_dims(dims);
      if (o.p && o.p->count()) cfg.p = p;
      if (o.grid && o.grid->count()) cfg.grid = parse_grid(grid);
      if (o.eps && o.eps->count()) cfg.epsilon = eps;
      if (o.trials && o.trials->count()) cfg.trials = trials;
      if (o.seed && o.seed->count()) cfg.master_seed = seed;
      if (o.threads && o.threads->count()) cfg.threads = threads;
      if (o.out && o.out->count()) cfg.out = out;
      if (o.tol && o.tol->count()) cfg.tolerance = tol;
      if (o.max_iter && o.max_iter->count()) cfg.max_iterations = max_iter;
      if (o.damping && o.damping->count()) cfg.damping = damping;
      return cfg;
    };

    if (sub_spectrum->parsed()) return cmd_spectrum(merge(so_spectrum));
    if (sub_solve->parsed()) return cmd_solve(merge(so_solve));
    if (sub_sample->parsed()) return cmd_sample(merge(so_sample));
    if (sub_compare->parsed())
      return cmd_compare(file_a, file_b, metrics,
                         compare_out->count() ? out : std::string());
    if (sub_normalized->parsed()) {
      ExperimentConfig cfg = merge(so_normalized);
      if (normalized_list->count()) cfg.dims_list = parse_dims_list(dims_list);
      return cmd_normalized(cfg);
    }
    return 2;
  } catch (const latspec::grid_mismatch_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const latspec::resource_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const latspec::convergence_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const latspec::solution_class_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
