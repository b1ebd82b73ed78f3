// kronopt: DC Opti-KRON reduction pipeline, one subcommand per stage.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "kronopt/community.hpp"
#include "kronopt/dcpf.hpp"
#include "kronopt/driver.hpp"
#include "kronopt/errors.hpp"
#include "kronopt/eval.hpp"
#include "kronopt/kron.hpp"
#include "kronopt/log.hpp"
#include "kronopt/milp.hpp"
#include "kronopt/mps.hpp"
#include "kronopt/network.hpp"
#include "kronopt/textio.hpp"

namespace {

using namespace kronopt;

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    write_text_file(out_path, text);
  }
}

// --keep takes "101,105,113" or a file of whitespace-separated ids.
std::vector<int> parse_id_list(const std::string& arg) {
  std::string text = arg;
  if (arg.find_first_not_of("0123456789,+- \t") != std::string::npos) {
    text = read_text_file(arg);
    for (char& c : text)
      if (c == ',') c = ' ';
  } else {
    for (char& c : text)
      if (c == ',') c = ' ';
  }
  std::vector<int> ids;
  for (const std::string& tok : split_ws(text)) ids.push_back(std::stoi(tok));
  if (ids.empty()) throw ValidationError("empty id list");
  return ids;
}

std::vector<double> parse_double_list(const std::string& arg) {
  std::string text = arg;
  for (char& c : text)
    if (c == ',') c = ' ';
  std::vector<double> vals;
  for (const std::string& tok : split_ws(text)) vals.push_back(std::stod(tok));
  return vals;
}

struct Cfg {
  std::string input;
  std::string out;
  std::string log_path;
  std::string summary;
  std::string map_path;
  std::string keep_arg;
  std::string method = "greedy";
  std::string alphas_arg;
  std::string multipliers_arg = "1.2,0.8";
  double alpha = 0.0;
  int q = 1;
  int k = 0;
  int k_min = 2;
  int k_max = 12;
  bool weighted = false;
  uint64_t seed = 0;
  int max_iters = 50;
  int jobs = 0;
  long node_limit = 500000;
  double time_limit = 0.0;
  bool deterministic = false;
};

ReduceParams to_reduce_params(const Cfg& cfg) {
  ReduceParams p;
  p.alpha = cfg.alpha;
  p.q = cfg.q;
  p.method = cfg.method;
  p.weighted = cfg.weighted;
  p.seed = cfg.seed;
  p.max_iters = cfg.max_iters;
  p.jobs = cfg.jobs > 0 ? cfg.jobs
                        : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  p.k_min = cfg.k_min;
  p.k_max = cfg.k_max;
  p.node_limit = cfg.node_limit;
  p.time_limit_s = cfg.time_limit;
  p.deterministic = cfg.deterministic;
  return p;
}

void add_solver_flags(CLI::App* cmd, Cfg& cfg) {
  cmd->add_option("--q", cfg.q, "max eliminations per iteration (cutting plane)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--method", cfg.method, "community detection: none|greedy|spectral")
      ->check(CLI::IsMember({"none", "greedy", "spectral"}));
  cmd->add_flag("--weighted", cfg.weighted, "weighted detection for baselines/reports");
  cmd->add_option("--seed", cfg.seed, "RNG seed (default 0)");
  cmd->add_option("--max-iters", cfg.max_iters, "iteration cap per community")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--jobs", cfg.jobs, "worker pool size (default: available parallelism)");
  cmd->add_option("--k-min", cfg.k_min, "spectral: smallest k tried");
  cmd->add_option("--k-max", cfg.k_max, "spectral: largest k tried");
  cmd->add_option("--node-limit", cfg.node_limit, "branch-and-bound node cap");
  cmd->add_option("--time-limit", cfg.time_limit, "per-MILP time limit in seconds");
  cmd->add_flag("--deterministic", cfg.deterministic,
                "zero timing fields, sequential-equivalent scheduling");
}

int run_parse(const Cfg& cfg) {
  Network net = load_network(cfg.input);
  emit(cfg.out, net.to_json_text());
  return 0;
}

int run_dcpf(const Cfg& cfg) {
  Network net = load_network(cfg.input);
  Eigen::VectorXd theta = solve_dc(net);
  std::vector<double> flows = branch_flows(net, theta);
  std::ostringstream out;
  out << "bus_id,angle_rad\n";
  for (int i = 0; i < net.n(); ++i)
    out << net.buses()[i].id << "," << fmt_double(theta(i)) << "\n";
  out << "\nfrom,to,flow_pu\n";
  for (size_t b = 0; b < flows.size(); ++b)
    out << net.branches()[b].from << "," << net.branches()[b].to << ","
        << fmt_double(flows[b]) << "\n";
  emit(cfg.out, out.str());
  return 0;
}

int run_communities(const Cfg& cfg) {
  Network net = load_network(cfg.input);
  Eigen::MatrixXd B = build_susceptance(net);
  Eigen::MatrixXi adj = adjacency_of(B);
  Partition part;
  if (cfg.method == "greedy") {
    part = cfg.k > 0 ? detect_greedy_k(adj, cfg.k) : detect_greedy(adj);
  } else if (cfg.method == "spectral") {
    part = cfg.k > 0 ? detect_spectral_k(B, cfg.k, cfg.seed)
                     : detect_spectral(B, cfg.k_min, cfg.k_max, cfg.seed);
  } else {
    throw ValidationError("communities requires --method greedy or spectral");
  }
  double q_report;
  if (cfg.weighted) {
    Eigen::MatrixXd W = (-B).cwiseMax(0.0);
    W.diagonal().setZero();
    q_report = modularity(W, part.labels);
  } else {
    q_report = modularity(adj, part.labels);
  }
  std::ostringstream out;
  out << "bus_id,community_id\n";
  for (int i = 0; i < net.n(); ++i)
    out << net.buses()[i].id << "," << part.labels[i] << "\n";
  emit(cfg.out, out.str());
  std::fprintf(stderr, "communities: %d, modularity %s\n", part.k,
               fmt_double(q_report).c_str());
  return 0;
}

int run_kron(const Cfg& cfg) {
  Network net = load_network(cfg.input);
  std::vector<int> keep;
  for (int id : parse_id_list(cfg.keep_arg)) keep.push_back(net.index_of(id));
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  int slack_pos = -1;
  for (size_t i = 0; i < keep.size(); ++i)
    if (keep[i] == net.slack_index()) slack_pos = static_cast<int>(i);
  if (slack_pos < 0) throw ValidationError("--keep must contain the slack bus");
  Eigen::MatrixXd B = build_susceptance(net);
  Eigen::MatrixXd Bred = kron_reduce(B, keep);
  Eigen::VectorXd Pred = ward_injections(B, net.injections(), keep);
  Network red = reduced_network(net, keep, Bred, Pred, slack_pos);
  emit(cfg.out, red.to_json_text());
  return 0;
}

int run_reduce(const Cfg& cfg, bool with_report) {
  Network net = load_network(cfg.input);
  ReduceParams params = to_reduce_params(cfg);
  auto t0 = std::chrono::steady_clock::now();
  ReductionResult res = run(net, params);
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double level = 1.0 - static_cast<double>(res.keep.size()) / net.n();
  std::fprintf(stderr, "reduce: kept %zu of %d nodes (level %s)%s\n", res.keep.size(),
               net.n(), fmt_double(level).c_str(),
               res.optimal ? "" : ", node limit hit");
  if (!cfg.log_path.empty())
    write_text_file(cfg.log_path, iteration_log_csv(res.logs, params.deterministic));
  if (with_report) {
    std::vector<int> ids;
    for (const Bus& b : res.reduced.buses()) ids.push_back(b.id);
    std::vector<double> errs = mice(net, res.reduced, res.omega, res.theta_hat);
    ReductionReport rep = make_report("opti-kron", level, "1", std::move(ids),
                                      std::move(errs), params.deterministic ? 0.0 : wall);
    emit(cfg.out, report_csv({rep}));
    if (!cfg.summary.empty())
      write_text_file(cfg.summary, summary_json({rep}, params.deterministic));
  } else {
    emit(cfg.out, res.reduced.to_json_text());
  }
  return 0;
}

int run_compare(const Cfg& cfg) {
  Network net = load_network(cfg.input);
  CompareParams params;
  params.alphas = parse_double_list(cfg.alphas_arg);
  if (params.alphas.empty()) throw ValidationError("--alphas must not be empty");
  params.multipliers = parse_double_list(cfg.multipliers_arg);
  if (params.multipliers.empty()) throw ValidationError("--multipliers must not be empty");
  params.reduce = to_reduce_params(cfg);
  std::vector<ReductionReport> reports = compare(net, params);
  emit(cfg.out, report_csv(reports));
  if (!cfg.summary.empty())
    write_text_file(cfg.summary, summary_json(reports, params.reduce.deterministic));
  return 0;
}

int run_export_milp(const Cfg& cfg) {
  Network net = load_network(cfg.input);
  Eigen::MatrixXd B = build_susceptance(net);
  Eigen::VectorXd theta_hat = solve_dc(net);
  OptiKronInstance inst;
  inst.active.resize(net.n());
  for (int i = 0; i < net.n(); ++i) inst.active[i] = i;
  inst.omega_prev = Eigen::MatrixXi::Identity(net.n(), net.n());
  inst.B_cur = B;
  inst.lambda_cur = adjacency_of(B);
  inst.P_cur = net.injections();
  inst.theta_hat = theta_hat;
  inst.alpha = cfg.alpha;
  inst.q = cfg.q;
  inst.M = choose_big_m(theta_hat);
  inst.ref = net.slack_index();
  OptiKronModel model = build(inst);
  std::string map_path = cfg.map_path;
  if (map_path.empty()) map_path = cfg.out + ".names.csv";
  export_mps(model.milp, cfg.out, map_path);
  std::fprintf(stderr, "export-milp: %d vars, %d rows -> %s\n", model.milp.ncols(),
               model.milp.nrows(), cfg.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DC Opti-KRON: optimal Kron-based reduction of DC power networks"};
  app.require_subcommand(1);
  Cfg cfg;

  auto* parse_cmd = app.add_subcommand("parse", "parse a case file, write native JSON");
  parse_cmd->add_option("input", cfg.input, "case file (.m or .json)")->required();
  parse_cmd->add_option("--out", cfg.out, "output path (default stdout)");

  auto* dcpf_cmd = app.add_subcommand("dcpf", "solve DC power flow, print angles and flows");
  dcpf_cmd->add_option("input", cfg.input)->required();
  dcpf_cmd->add_option("--out", cfg.out);

  auto* comm_cmd = app.add_subcommand("communities", "detect communities, print labels CSV");
  comm_cmd->add_option("input", cfg.input)->required();
  comm_cmd->add_option("--method", cfg.method, "greedy|spectral")
      ->check(CLI::IsMember({"greedy", "spectral"}));
  comm_cmd->add_flag("--weighted", cfg.weighted, "report weighted modularity");
  comm_cmd->add_option("--seed", cfg.seed);
  comm_cmd->add_option("--k", cfg.k, "force exactly k communities");
  comm_cmd->add_option("--k-min", cfg.k_min);
  comm_cmd->add_option("--k-max", cfg.k_max);
  comm_cmd->add_option("--out", cfg.out);

  auto* kron_cmd = app.add_subcommand("kron", "Kron-reduce onto a keep set (Ward injections)");
  kron_cmd->add_option("input", cfg.input)->required();
  kron_cmd->add_option("--keep", cfg.keep_arg, "bus ids, comma list or file")->required();
  kron_cmd->add_option("--out", cfg.out);

  auto* reduce_cmd = app.add_subcommand("reduce", "run the Opti-KRON reduction");
  reduce_cmd->add_option("input", cfg.input)->required();
  reduce_cmd->add_option("--alpha", cfg.alpha, "elimination reward weight")
      ->required()
      ->check(CLI::NonNegativeNumber);
  reduce_cmd->add_option("--out", cfg.out, "reduced network JSON (default stdout)");
  reduce_cmd->add_option("--log", cfg.log_path, "iteration log CSV");
  add_solver_flags(reduce_cmd, cfg);

  auto* eval_cmd = app.add_subcommand("evaluate", "reduce and report per-cluster MICE");
  eval_cmd->add_option("input", cfg.input)->required();
  eval_cmd->add_option("--alpha", cfg.alpha)->required()->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--out", cfg.out, "report CSV (default stdout)");
  eval_cmd->add_option("--summary", cfg.summary, "summary JSON path");
  eval_cmd->add_option("--log", cfg.log_path, "iteration log CSV");
  add_solver_flags(eval_cmd, cfg);

  auto* cmp_cmd = app.add_subcommand("compare", "Opti-KRON vs CD and CD+Kron across scenarios");
  cmp_cmd->add_option("input", cfg.input)->required();
  cmp_cmd->add_option("--alphas", cfg.alphas_arg, "comma list, one run per alpha")->required();
  cmp_cmd->add_option("--multipliers", cfg.multipliers_arg,
                      "loading scenarios (default 1.2,0.8)");
  cmp_cmd->add_option("--out", cfg.out, "report CSV (default stdout)");
  cmp_cmd->add_option("--summary", cfg.summary, "summary JSON path");
  add_solver_flags(cmp_cmd, cfg);

  auto* milp_cmd = app.add_subcommand("export-milp", "write the iteration-1 MILP as MPS");
  milp_cmd->add_option("input", cfg.input)->required();
  milp_cmd->add_option("--out", cfg.out, "MPS path")->required();
  milp_cmd->add_option("--map", cfg.map_path, "name map CSV (default <out>.names.csv)");
  milp_cmd->add_option("--alpha", cfg.alpha)->check(CLI::NonNegativeNumber);
  milp_cmd->add_option("--q", cfg.q)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "%s\n\n%s", e.what(), app.help().c_str());
    return 1;
  }

  try {
    if (parse_cmd->parsed()) return run_parse(cfg);
    if (dcpf_cmd->parsed()) return run_dcpf(cfg);
    if (comm_cmd->parsed()) return run_communities(cfg);
    if (kron_cmd->parsed()) return run_kron(cfg);
    if (reduce_cmd->parsed()) return run_reduce(cfg, false);
    if (eval_cmd->parsed()) return run_reduce(cfg, true);
    if (cmp_cmd->parsed()) return run_compare(cfg);
    if (milp_cmd->parsed()) return run_export_milp(cfg);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
