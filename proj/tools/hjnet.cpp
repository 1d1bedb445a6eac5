// Command-line front end: evaluate networks, emit solution slices and
// conservation-law profiles, check structural assumptions, compare against
// the numerical references, and run training experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hjnet/conservation.hpp"
#include "hjnet/convex.hpp"
#include "hjnet/families.hpp"
#include "hjnet/io.hpp"
#include "hjnet/network.hpp"
#include "hjnet/oracle.hpp"
#include "hjnet/training.hpp"

namespace {

using hjnet::Index;
using hjnet::NetworkParams;
using hjnet::VectorX;

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::runtime_error("cannot parse real: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw std::runtime_error("empty number list");
  return out;
}

VectorX<double> to_vector(const std::vector<double>& v) {
  return Eigen::Map<const VectorX<double>>(v.data(), Index(v.size()));
}

struct Truth {
  std::function<double(const VectorX<double>&, double)> solution;
  std::function<double(const VectorX<double>&)> initial;
  std::optional<NetworkParams<double>> params;
  Index dim;
};

Truth resolve_truth(const std::string& spec) {
  if (std::ifstream probe(spec); probe.good()) {
    auto net = hjnet::load_params(spec);
    Truth t{[net](const VectorX<double>& x, double tt) {
              return hjnet::evaluate(net, x, tt);
            },
            [net](const VectorX<double>& x) { return hjnet::initial_value(net, x); },
            net, net.dim()};
    return t;
  }
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::runtime_error("truth must be a params file or name:dim");
  const std::string name = spec.substr(0, colon);
  const Index dim = Index(std::stol(spec.substr(colon + 1)));
  if (name == "l1") {
    return Truth{[](const VectorX<double>& x, double t) {
                   return hjnet::l1_solution(x, t);
                 },
                 [](const VectorX<double>& x) { return x.lpNorm<1>(); },
                 hjnet::make_l1_network<double>(dim), dim};
  }
  if (name == "linf") {
    return Truth{[](const VectorX<double>& x, double t) {
                   return hjnet::linf_solution(x, t);
                 },
                 [](const VectorX<double>& x) { return x.lpNorm<Eigen::Infinity>(); },
                 hjnet::make_linf_network<double>(dim), dim};
  }
  throw std::runtime_error("unknown truth name: " + name +
                           " (expected l1:<dim>, linf:<dim>, or a params file)");
}

int cmd_eval(const std::string& file, const std::string& x_text, double t) {
  const auto net = hjnet::load_params(file);
  const auto x = to_vector(parse_reals(x_text));
  const double v = hjnet::evaluate(net, x, t);
  std::printf("%.17g\n", v);
  return 0;
}

int cmd_slice(const std::string& file, const std::string& axes_text, double fix,
              const std::string& bounds_text, Index grid,
              const std::string& times_text, const std::string& out_path) {
  const auto net = hjnet::load_params(file);
  const auto axes = parse_reals(axes_text);
  const auto bounds = parse_reals(bounds_text);
  const auto times = parse_reals(times_text);
  if (axes.size() != 2) throw std::runtime_error("--axes needs two indices");
  const Index a0 = Index(axes[0]);
  const Index a1 = Index(axes[1]);
  if (a0 == a1 || a0 < 0 || a1 < 0 || a0 >= net.dim() || a1 >= net.dim())
    throw std::runtime_error("slice axes must be distinct and within the dimension");
  if (bounds.size() != 2 || bounds[0] >= bounds[1])
    throw std::runtime_error("--bounds needs lo,hi with lo < hi");
  if (grid < 2) throw std::runtime_error("--grid must be at least 2");
  for (const double t : times)
    if (t < 0) throw std::runtime_error("t must be nonnegative");

  const auto coord = [&](Index k) {
    return bounds[0] + (bounds[1] - bounds[0]) * double(k) / double(grid - 1);
  };

  hjnet::MatrixX<double> points(grid * grid, net.dim());
  points.setConstant(fix);
  Index row = 0;
  for (Index i = 0; i < grid; ++i) {
    for (Index j = 0; j < grid; ++j) {
      points(row, a0) = coord(i);
      points(row, a1) = coord(j);
      ++row;
    }
  }

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << "x1,x2,t,value\n";
  for (const double t : times) {
    const VectorX<double> tv = VectorX<double>::Constant(grid * grid, t);
    const VectorX<double> values = hjnet::evaluate_many(net, points, tv);
    row = 0;
    for (Index i = 0; i < grid; ++i) {
      for (Index j = 0; j < grid; ++j) {
        out << hjnet::format17(coord(i)) << ',' << hjnet::format17(coord(j))
            << ',' << hjnet::format17(t) << ',' << hjnet::format17(values(row))
            << '\n';
        ++row;
      }
    }
  }
  return 0;
}

int cmd_check(const std::string& file, double tol) {
  const auto net = hjnet::load_params(file);
  const auto report = hjnet::check_assumptions(net, tol);
  nlohmann::json j;
  j["a1"] = report.distinct_slopes;
  j["a2"] = report.convex_offsets;
  j["a3"] = report.essential_pieces;
  nlohmann::json w = nlohmann::json::object();
  if (!report.distinct_slopes)
    w["a1"] = {{"pair", {report.duplicate_pair.first, report.duplicate_pair.second}}};
  if (!report.convex_offsets)
    w["a2"] = {{"index", report.offset_index},
               {"value", report.offset_value},
               {"combination",
                std::vector<double>(report.offset_combination.begin(),
                                    report.offset_combination.end())}};
  if (!report.essential_pieces)
    w["a3"] = {{"index", report.redundant_index},
               {"value", report.redundant_value},
               {"combination",
                std::vector<double>(report.redundant_combination.begin(),
                                    report.redundant_combination.end())}};
  j["witnesses"] = std::move(w);
  std::cout << j.dump(2) << "\n";
  return report.pass() ? 0 : 1;
}

int cmd_reduce(const std::string& file, const std::string& out_path, double tol) {
  const auto net = hjnet::load_params(file);
  const auto reduced = hjnet::remove_redundant_pieces(net, tol);
  hjnet::save_params(out_path, reduced);
  std::cout << "{\"m_before\": " << net.pieces()
            << ", \"m_after\": " << reduced.pieces() << "}\n";
  return 0;
}

int cmd_conslaw(const std::string& file, double t, const std::string& range_text,
                Index nx, const std::string& out_path) {
  const auto raw = hjnet::load_params(file);
  const hjnet::EntropyNet1D<double> net(raw);
  const auto range = parse_reals(range_text);
  if (range.size() != 2 || range[0] >= range[1])
    throw std::runtime_error("--x needs lo,hi with lo < hi");
  if (nx < 2) throw std::runtime_error("--nx must be at least 2");

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << "x,u\n";
  for (Index k = 0; k < nx; ++k) {
    const double x = range[0] + (range[1] - range[0]) * double(k) / double(nx - 1);
    out << hjnet::format17(x) << ','
        << hjnet::format17(hjnet::evaluate_entropy(net, x, t)) << '\n';
  }

  const auto lines = hjnet::shock_lines(net, std::max(t, 1.0));
  nlohmann::json j = nlohmann::json::array();
  for (const auto& line : lines) {
    j.push_back({{"left", line.left_index},
                 {"right", line.right_index},
                 {"slope", line.slope},
                 {"intercept", line.intercept},
                 {"t_begin", line.t_begin},
                 {"t_end", line.t_end}});
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& truth_spec,
              const std::string& out_path, const std::string& metrics_path,
              std::uint64_t seed) {
  auto config = hjnet::load_config(config_path);
  config.seed = seed;
  const Truth truth = resolve_truth(truth_spec);

  const hjnet::SplitMix64 root(seed);
  const auto data = hjnet::sample_dataset<double>(
      truth.solution, truth.dim, config.sample_count, root.split(3).state());
  const auto run = hjnet::train(config, data);

  hjnet::save_params(out_path, run.final_params);
  {
    std::ofstream metrics(metrics_path);
    if (!metrics) throw std::runtime_error("cannot write " + metrics_path);
    metrics << "step,loss\n";
    for (const auto& [step, value] : run.loss_history)
      metrics << step << ',' << hjnet::format17(value) << '\n';
  }

  nlohmann::json summary;
  summary["initial_loss"] = run.loss_history.front().second;
  summary["final_loss"] = run.loss_history.back().second;
  summary["effective_neurons"] = run.effective_indices.size();
  summary["effective_indices"] = run.effective_indices;
  summary["jtilde_rel_error"] = hjnet::initial_error(
      run.final_params, truth.initial, root.split(4).state());
  if (truth.params && truth.params->pieces() == run.final_params.pieces() &&
      truth.params->dim() == run.final_params.dim()) {
    const auto pm = hjnet::parameter_metrics(run.final_params, *truth.params);
    summary["parameter_metrics"] = {{"p", pm.slopes_error},
                                    {"theta", pm.rates_error},
                                    {"gamma", pm.offsets_error},
                                    {"p_absolute", pm.slopes_absolute},
                                    {"theta_absolute", pm.rates_absolute},
                                    {"gamma_absolute", pm.offsets_absolute}};
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

nlohmann::json oracle_json(double max_err, double mean_err, double bound) {
  nlohmann::json j;
  j["max_abs_err"] = max_err;
  j["mean_abs_err"] = mean_err;
  j["bound"] = bound;
  j["pass"] = max_err <= bound;
  return j;
}

int finish_oracle(const nlohmann::json& j) {
  std::cout << j.dump(2) << "\n";
  return j.at("pass").get<bool>() ? 0 : 1;
}

int oracle_hopf(const NetworkParams<double>& net, double grid_step, Index probes,
                double t_max, std::uint64_t seed) {
  if (net.dim() > 2)
    throw std::runtime_error("hopf mode tabulates the dual grid in 1 or 2 dimensions only");
  const auto table = hjnet::tabulate_dual(net, grid_step);
  const auto [lip_conj, lip_ham] = hjnet::dual_lipschitz(table);

  hjnet::SplitMix64 rng(seed);
  double max_err = 0, sum_err = 0, max_bound = 0;
  bool all_within = true;
  VectorX<double> x(net.dim());
  for (Index k = 0; k < probes; ++k) {
    for (Index c = 0; c < net.dim(); ++c) x(c) = rng.next_normal();
    const double t = t_max * rng.next_double();
    double best = std::numeric_limits<double>::lowest();
    bool any = false;
    for (Index g = 0; g < table.points.rows(); ++g) {
      if (std::isnan(table.conjugate(g))) continue;
      const double v = table.points.row(g).dot(x) - t * table.hamiltonian(g) -
                       table.conjugate(g);
      if (!any || v > best) best = v;
      any = true;
    }
    if (!any) throw std::runtime_error("empty dual domain");
    const double err = std::abs(hjnet::evaluate(net, x, t) - best);
    const double bound =
        (x.lpNorm<Eigen::Infinity>() + t * lip_ham + lip_conj) * grid_step *
        (1.0 + t);
    max_err = std::max(max_err, err);
    sum_err += err;
    max_bound = std::max(max_bound, bound);
    all_within = all_within && err <= bound;
  }
  auto j = oracle_json(max_err, sum_err / double(probes), max_bound);
  j["pass"] = all_within;
  return finish_oracle(j);
}

int oracle_viscous(const NetworkParams<double>& net, double epsilon, double h,
                   double x_lo, double x_hi, Index x_cells, double t_lo,
                   double t_hi, Index t_cells) {
  hjnet::BoxGrid<double> box;
  box.x_lo = VectorX<double>::Constant(net.dim(), x_lo);
  box.x_hi = VectorX<double>::Constant(net.dim(), x_hi);
  box.x_cells = x_cells;
  box.t_lo = t_lo;
  box.t_hi = t_hi;
  box.t_cells = t_cells;
  const double fine = hjnet::viscous_residual(net, box, epsilon, h);
  const double coarse = hjnet::viscous_residual(net, box, epsilon, 2 * h);
  // Second-order differences: a quarter of the coarse residual plus slack.
  const double bound = 1.25 * coarse / 4.0;
  return finish_oracle(oracle_json(fine, fine, bound));
}

int oracle_conslaw(const NetworkParams<double>& raw, double t,
                   const std::string& range_text, Index nx, double cfl) {
  const hjnet::EntropyNet1D<double> net(raw);
  const auto range = parse_reals(range_text);
  if (range.size() != 2 || range[0] >= range[1])
    throw std::runtime_error("--x needs lo,hi with lo < hi");
  const hjnet::Grid1D<double> grid{range[0], range[1], nx};
  const double p_lo = net.slope_value(0);
  const double p_hi = net.slope_value(net.pieces() - 1);
  const auto flux = [&net, p_lo, p_hi](double u) {
    return hjnet::interpolated_hamiltonian(net, std::clamp(u, p_lo, p_hi));
  };
  const auto u0 = [&net](double x) { return hjnet::evaluate_entropy(net, x, 0.0); };
  const VectorX<double> ref = hjnet::lax_friedrichs(flux, u0, grid, t, cfl);

  double l1 = 0, max_abs = 0;
  for (Index i = 0; i < grid.cells; ++i) {
    const double diff =
        std::abs(hjnet::evaluate_entropy(net, grid.center(i), t) - ref(i));
    l1 += diff * grid.h();
    max_abs = std::max(max_abs, diff);
  }
  const double bound = 5.0 * std::sqrt(grid.h());
  // The error functional for profiles is the L1 distance.
  auto j = oracle_json(l1, l1 / (range[1] - range[0]), bound);
  j["max_pointwise_err"] = max_abs;
  return finish_oracle(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"max-of-affine network toolkit for first-order PDE solutions"};
  app.require_subcommand(1);

  std::string params_file, x_text, axes_text = "0,1", bounds_text = "-4,4";
  std::string times_text = "0", out_path, metrics_path, range_text = "-2,2";
  std::string config_path, truth_spec, mode;
  double t = 0, fix = 0, tol = 1e-8, grid_step = 1e-2, t_max = 2;
  double epsilon = 0.1, fd_step = 1e-3, cfl = 0.9;
  double x_lo = -1, x_hi = 1, t_lo = 0.1, t_hi = 1;
  Index grid = 101, nx = 401, probes = 200, x_cells = 20, t_cells = 9;
  std::uint64_t seed = 0;

  auto* eval = app.add_subcommand("eval", "print the network value at (x, t)");
  eval->add_option("params", params_file)->required();
  eval->add_option("--x", x_text, "comma-separated coordinates")->required();
  eval->add_option("--t", t)->required();

  auto* slice = app.add_subcommand("slice", "CSV slice over two coordinates");
  slice->add_option("params", params_file)->required();
  slice->add_option("--axes", axes_text, "two coordinate indices");
  slice->add_option("--fix", fix, "value for the remaining coordinates");
  slice->add_option("--bounds", bounds_text, "lo,hi per axis");
  slice->add_option("--grid", grid, "points per axis");
  slice->add_option("--times", times_text, "comma-separated times");
  slice->add_option("--out", out_path)->required();

  auto* check = app.add_subcommand("check", "verify the structural assumptions");
  check->add_option("params", params_file)->required();
  check->add_option("--tol", tol);

  auto* reduce = app.add_subcommand("reduce", "drop pieces that never win");
  reduce->add_option("params", params_file)->required();
  reduce->add_option("--out", out_path)->required();
  reduce->add_option("--tol", tol);

  auto* conslaw =
      app.add_subcommand("conslaw", "1D profile CSV plus shock lines as JSON");
  conslaw->add_option("params", params_file)->required();
  conslaw->add_option("--t", t)->required();
  conslaw->add_option("--x", range_text, "lo,hi");
  conslaw->add_option("--nx", nx);
  conslaw->add_option("--out", out_path)->required();

  auto* train = app.add_subcommand("train", "fit a network to sampled data");
  train->add_option("--config", config_path)->required();
  train->add_option("--truth", truth_spec,
                    "params file, l1:<dim>, or linf:<dim>")
      ->required();
  train->add_option("--out", out_path)->required();
  train->add_option("--metrics", metrics_path)->required();
  train->add_option("--seed", seed);

  auto* cmp = app.add_subcommand("compare-oracle",
                                 "check the network against a reference");
  cmp->add_option("params", params_file)->required();
  cmp->add_option("--mode", mode, "hopf | viscous | conslaw")->required();
  cmp->add_option("--grid-step", grid_step);
  cmp->add_option("--probes", probes);
  cmp->add_option("--t-max", t_max);
  cmp->add_option("--seed", seed);
  cmp->add_option("--epsilon", epsilon);
  cmp->add_option("--h", fd_step);
  cmp->add_option("--x-lo", x_lo);
  cmp->add_option("--x-hi", x_hi);
  cmp->add_option("--x-cells", x_cells);
  cmp->add_option("--t-lo", t_lo);
  cmp->add_option("--t-hi", t_hi);
  cmp->add_option("--t-cells", t_cells);
  cmp->add_option("--t", t);
  cmp->add_option("--x", range_text, "lo,hi for conslaw mode");
  cmp->add_option("--nx", nx);
  cmp->add_option("--cfl", cfl);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (eval->parsed()) return cmd_eval(params_file, x_text, t);
    if (slice->parsed())
      return cmd_slice(params_file, axes_text, fix, bounds_text, grid,
                       times_text, out_path);
    if (check->parsed()) return cmd_check(params_file, tol);
    if (reduce->parsed()) return cmd_reduce(params_file, out_path, tol);
    if (conslaw->parsed())
      return cmd_conslaw(params_file, t, range_text, nx, out_path);
    if (train->parsed())
      return cmd_train(config_path, truth_spec, out_path, metrics_path, seed);
    if (cmp->parsed()) {
      if (t < 0) throw std::invalid_argument("t must be nonnegative");
      const auto net = hjnet::load_params(params_file);
      if (mode == "hopf") return oracle_hopf(net, grid_step, probes, t_max, seed);
      if (mode == "viscous")
        return oracle_viscous(net, epsilon, fd_step, x_lo, x_hi, x_cells, t_lo,
                              t_hi, t_cells);
      if (mode == "conslaw") {
        const double tt = cmp->count("--t") ? t : 1.0;
        return oracle_conslaw(net, tt, range_text, nx, cfl);
      }
      throw std::runtime_error("unknown mode: " + mode);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
