// framesub: subsampling of finite frames, Marcinkiewicz-Zygmund node
// generation, and least-squares recovery on top of them.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "framesub/bss.hpp"
#include "framesub/fourier.hpp"
#include "framesub/io.hpp"
#include "framesub/recovery.hpp"
#include "framesub/strategies.hpp"

namespace {

using namespace framesub;

constexpr std::uint64_t kDefaultSeed = 20220531;  // fixed so published outputs reproduce

struct BasisArgs {
  std::string kind = "hyperbolic-cross";
  Index d = 2;
  Index radius = 12;
  int k_min = -6;
  int k_max = 6;
};

FrequencyIndexSet build_frequencies(const BasisArgs& args) {
  if (args.kind == "hyperbolic-cross") return hyperbolic_cross(args.d, args.radius);
  if (args.kind == "fourier-grid") return full_grid_frequencies(args.d, args.k_min, args.k_max);
  throw_invalid_config("unknown basis kind '" + args.kind + "'");
}

void add_basis_flags(CLI::App* cmd, BasisArgs& args) {
  cmd->add_option("--basis", args.kind, "basis family: hyperbolic-cross | fourier-grid")
      ->default_val("hyperbolic-cross");
  cmd->add_option("--d", args.d, "spatial dimension")->default_val(2);
  cmd->add_option("--R", args.radius, "hyperbolic cross radius")->default_val(12);
  cmd->add_option("--kmin", args.k_min, "fourier-grid lower frequency")->default_val(-6);
  cmd->add_option("--kmax", args.k_max, "fourier-grid upper frequency")->default_val(6);
}

int run_bounds(const std::string& in_path) {
  const FrameMatrix frame = read_frame_auto(in_path);
  const FrameBounds bounds = frame_bounds(frame.rows);
  nlohmann::json j;
  j["A"] = bounds.lower;
  j["B"] = bounds.upper;
  j["frobenius_sq"] = frobenius_norm_sq(frame.rows);
  std::cout << j.dump(2) << "\n";
  return 0;
}

struct SubsampleArgs {
  std::string strategy = "bss";
  std::string in_path;
  std::string out_path;
  double b = 4.0;
  double b_prime = 2.0;
  double delta = 0.0;
  double p = 0.1;
  double t = 0.5;
  double c = 0.5;
  std::uint64_t seed = kDefaultSeed;
  std::optional<Index> n_override;
  bool fixed_shifts = false;
  Index lookahead = 4;
  std::string traversal = "random";
};

Traversal parse_traversal(const std::string& name) {
  if (name == "random") return Traversal::seeded_permutation;
  if (name == "sequential") return Traversal::sequential;
  throw_invalid_config("traversal must be 'random' or 'sequential'");
}

int run_subsample(const SubsampleArgs& args) {
  const FrameMatrix frame = read_frame_auto(args.in_path);
  const Index count = frame.count();
  const Index m = frame.dimension();

  nlohmann::json report;
  report["strategy"] = args.strategy;
  report["seed"] = args.seed;

  SubsampleOptions opts;
  opts.seed = args.seed;
  opts.traversal = parse_traversal(args.traversal);
  opts.fixed_shifts = args.fixed_shifts;
  opts.selection_lookahead = args.lookahead;

  if (args.strategy == "bss" || args.strategy == "bss-perp") {
    BssResult result;
    if (args.strategy == "bss") {
      BssConfig cfg;
      cfg.b = args.b;
      cfg.delta = args.delta;
      cfg.seed = args.seed;
      cfg.traversal = opts.traversal;
      cfg.fixed_shifts = args.fixed_shifts;
      cfg.selection_lookahead = args.lookahead;
      result = bss_subsample(frame.rows, frame_bounds(frame.rows), cfg);
    } else {
      result = bss_perp(frame.rows, args.b, args.delta, opts);
    }
    report.update(bss_report_json(result, count, m, args.b, args.delta));
  } else if (args.strategy == "random-weighted") {
    RandomDrawConfig cfg{args.p, args.t, args.c, args.seed, args.n_override};
    const FrameBounds bounds = frame_bounds(frame.rows);
    const WeightedSubframe sub = random_weighted_subsample(frame.rows, bounds, cfg);
    report.update(subframe_to_json(sub));
    report["m"] = m;
    report["M"] = count;
    report["p"] = args.p;
    report["t"] = args.t;
    report["bounds_in"] = bounds_to_json(bounds);
    report["bounds_out"] = bounds_to_json(weighted_frame_bounds(frame.rows, sub));
  } else if (args.strategy == "random-unweighted") {
    RandomDrawConfig cfg{args.p, args.t, args.c, args.seed, args.n_override};
    const std::vector<Index> draws = random_unweighted_subsample(frame.rows, cfg);
    report["J"] = draws;
    report["m"] = m;
    report["M"] = count;
    report["p"] = args.p;
    report["t"] = args.t;
    report["c"] = args.c;
    report["bounds_out"] = bounds_to_json(multiset_bounds(frame.rows, draws));
  } else if (args.strategy == "plain-bss") {
    const PlainBssResult result = plain_bss(frame.rows, args.b_prime, args.delta, opts);
    report["J"] = result.indices;
    report["m"] = m;
    report["M"] = count;
    report["b_prime"] = args.b_prime;
    report["b"] = result.plan.b;
    report["alpha"] = result.plan.alpha;
    report["certified_constant"] = result.certified_constant;
    report["bounds_out"] = bounds_to_json(subframe_bounds(frame.rows, result.indices));
  } else if (args.strategy == "two-step") {
    const TwoStepResult result = two_step_unitnorm(frame.rows, args.b_prime, args.p, args.t, opts);
    report["J"] = result.indices;
    report["m"] = m;
    report["M"] = count;
    report["b_prime"] = args.b_prime;
    report["p"] = args.p;
    report["t"] = args.t;
    report["draw_count"] = result.draw_count;
    report["lower_constant"] = result.lower_constant;
    report["upper_constant"] = result.upper_constant;
  } else {
    throw_invalid_config("unknown strategy '" + args.strategy + "'");
  }

  const std::string text = report.dump(2) + "\n";
  if (!args.out_path.empty()) {
    write_text_file(args.out_path, text);
    std::cout << "report written to " << args.out_path << "\n";
  } else {
    std::cout << text;
  }
  return 0;
}

struct NodesArgs {
  BasisArgs basis;
  double b = 1.5;
  double p = 0.1;
  double t = 2.0 / 3.0;
  std::uint64_t seed = kDefaultSeed;
  bool redraw = false;
  std::string out_path;
};

int run_nodes(const NodesArgs& args) {
  const FrequencyIndexSet freq = build_frequencies(args.basis);
  const BasisSpec basis = fourier_basis(freq);
  MzNodeConfig cfg;
  cfg.b = args.b;
  cfg.p = args.p;
  cfg.t = args.t;
  cfg.seed = args.seed;
  cfg.redraw_until_valid = args.redraw;
  const MzNodeResult result = generate_mz_nodes(basis, cfg);
  if (!args.out_path.empty()) write_nodes_csv(args.out_path, result.nodes);

  nlohmann::json j;
  j["m"] = basis.size;
  j["M_initial"] = result.initial_count;
  j["n"] = result.nodes.size();
  j["b"] = args.b;
  j["initial_lambda_min"] = result.initial_lambda_min;
  j["mz_lambda_min"] = mz_lambda_min(basis, result.nodes);
  j["seed"] = args.seed;
  std::cout << j.dump(2) << "\n";
  return 0;
}

struct RecoverArgs {
  BasisArgs basis;
  std::string nodes_path;
  std::string samples_path;
  std::string out_path;
  bool weighted = false;
};

int run_recover(const RecoverArgs& args) {
  const FrequencyIndexSet freq = build_frequencies(args.basis);
  const BasisSpec basis = fourier_basis(freq);
  const NodeSet nodes = read_nodes_csv(args.nodes_path, basis.domain.dimension());
  const CVector samples = read_samples_csv(args.samples_path);
  const CVector coefficients = least_squares_recover(basis, nodes, samples, args.weighted);
  if (!args.out_path.empty()) write_samples_csv(args.out_path, coefficients);

  const CMatrix design = design_matrix(basis, nodes);
  nlohmann::json j;
  j["n"] = nodes.size();
  j["m"] = basis.size;
  j["weighted"] = args.weighted;
  j["residual"] = (design * coefficients - samples).norm();
  std::cout << j.dump(2) << "\n";
  return 0;
}

struct ExperimentArgs {
  int id = 1;
  std::vector<double> b_values{1.5};
  std::uint64_t seed = kDefaultSeed;
  Index m_override = 0;
  std::string variant = "random";
  bool no_streaming = false;
  std::string out_path;
  std::string format = "csv";
};

int run_experiment_cmd(const ExperimentArgs& args) {
  ExperimentOptions opts;
  opts.frequency_count = args.m_override;
  opts.grid_variant = (args.variant == "grid");
  opts.enable_streaming = !args.no_streaming;
  const std::vector<ExperimentReport> reports =
      run_experiment(args.id, args.b_values, args.seed, opts);

  std::string text;
  if (args.format == "json") {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& report : reports) j.push_back(experiment_report_json(report));
    text = j.dump(2) + "\n";
  } else if (args.format == "csv") {
    text = experiment_report_csv(reports);
  } else {
    throw_invalid_config("format must be 'csv' or 'json'");
  }

  if (!args.out_path.empty()) {
    write_text_file(args.out_path, text);
    std::cout << "report written to " << args.out_path << "\n";
  } else {
    std::cout << text;
  }
  for (const auto& report : reports)
    std::cerr << "# experiment " << report.experiment_id << " b=" << report.b << " took "
              << report.runtime_seconds << "s\n";
  return 0;
}

int emit_error(const Error& err) {
  nlohmann::json context = nlohmann::json::object();
  if (err.iteration) context["iteration"] = *err.iteration;
  if (err.sigma_min) context["sigma_min"] = *err.sigma_min;
  nlohmann::json j;
  j["code"] = error_code_name(err.code());
  j["message"] = err.what();
  j["context"] = context;
  std::cerr << j.dump(2) << "\n";
  return err.is_validation() ? 2 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("FRAMESUB_THREADS")) {
    const int n = std::atoi(threads);
    if (n > 0) Eigen::setNbThreads(n);
  }

  CLI::App app{"framesub: well-conditioned subframes, MZ nodes, least-squares recovery"};
  app.require_subcommand(1);

  std::string bounds_in;
  CLI::App* bounds_cmd = app.add_subcommand("bounds", "frame bounds of a stored frame");
  bounds_cmd->add_option("--in", bounds_in, "frame file (.csv or .json)")->required();

  SubsampleArgs sub_args;
  CLI::App* sub_cmd = app.add_subcommand("subsample", "extract a subframe");
  sub_cmd->add_option("--strategy", sub_args.strategy,
                      "bss | bss-perp | plain-bss | two-step | random-weighted | random-unweighted");
  sub_cmd->add_option("--in", sub_args.in_path, "frame file")->required();
  sub_cmd->add_option("--out", sub_args.out_path, "report JSON path");
  sub_cmd->add_option("--b", sub_args.b, "oversampling factor (bss, bss-perp)");
  sub_cmd->add_option("--b-prime", sub_args.b_prime, "budget factor (plain-bss, two-step)");
  sub_cmd->add_option("--delta", sub_args.delta, "stability factor");
  sub_cmd->add_option("--p", sub_args.p, "failure probability (random strategies)");
  sub_cmd->add_option("--t", sub_args.t, "deviation (random strategies)");
  sub_cmd->add_option("--c", sub_args.c, "mixing weight (random-unweighted)");
  sub_cmd->add_option("--seed", sub_args.seed, "RNG seed");
  Index n_override = 0;
  sub_cmd->add_option("--n-override", n_override, "explicit draw count (random strategies)");
  sub_cmd->add_flag("--fixed-shifts", sub_args.fixed_shifts, "disable variable barrier shifts");
  sub_cmd->add_option("--lookahead", sub_args.lookahead,
                      "passing candidates examined per iteration (1 = stop at first)");
  sub_cmd->add_option("--traversal", sub_args.traversal, "candidate order: random | sequential");

  NodesArgs nodes_args;
  CLI::App* nodes_cmd = app.add_subcommand("nodes", "generate MZ sampling nodes");
  add_basis_flags(nodes_cmd, nodes_args.basis);
  nodes_cmd->add_option("--b", nodes_args.b, "oversampling factor");
  nodes_cmd->add_option("--p", nodes_args.p, "failure probability");
  nodes_cmd->add_option("--t", nodes_args.t, "deviation");
  nodes_cmd->add_option("--seed", nodes_args.seed, "RNG seed");
  nodes_cmd->add_flag("--redraw", nodes_args.redraw, "redraw until the frame condition holds");
  nodes_cmd->add_option("--out", nodes_args.out_path, "node CSV path");

  RecoverArgs recover_args;
  CLI::App* recover_cmd = app.add_subcommand("recover", "least-squares fit on sampled values");
  add_basis_flags(recover_cmd, recover_args.basis);
  recover_cmd->add_option("--nodes", recover_args.nodes_path, "node CSV")->required();
  recover_cmd->add_option("--samples", recover_args.samples_path, "sample CSV")->required();
  recover_cmd->add_option("--out", recover_args.out_path, "coefficient CSV path");
  recover_cmd->add_flag("--weighted", recover_args.weighted, "use the node weight column");

  ExperimentArgs exp_args;
  CLI::App* exp_cmd = app.add_subcommand("experiment", "reproduce the Fourier experiments");
  exp_cmd->add_option("--id", exp_args.id, "experiment id: 1, 2 or 3")->required();
  exp_cmd->add_option("--b", exp_args.b_values, "oversampling factor(s)");
  exp_cmd->add_option("--seed", exp_args.seed, "RNG seed");
  exp_cmd->add_option("--m", exp_args.m_override, "experiment 3: frequency count override");
  exp_cmd->add_option("--variant", exp_args.variant, "experiment 3: random | grid");
  exp_cmd->add_flag("--no-streaming", exp_args.no_streaming,
                    "decline the grid variant instead of streaming");
  exp_cmd->add_option("--out", exp_args.out_path, "report path");
  exp_cmd->add_option("--format", exp_args.format, "csv | json");

  try {
    app.parse(argc, argv);
    if (n_override > 0) sub_args.n_override = n_override;

    if (*bounds_cmd) return run_bounds(bounds_in);
    if (*sub_cmd) return run_subsample(sub_args);
    if (*nodes_cmd) return run_nodes(nodes_args);
    if (*recover_cmd) return run_recover(recover_args);
    if (*exp_cmd) return run_experiment_cmd(exp_args);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& err) {
    return emit_error(err);
  } catch (const std::exception& e) {
    nlohmann::json j;
    j["code"] = "internal";
    j["message"] = e.what();
    j["context"] = nlohmann::json::object();
    std::cerr << j.dump(2) << "\n";
    return 3;
  }
}
