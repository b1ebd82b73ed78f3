#include "kronopt/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "json.hpp"
#include "kronopt/dcpf.hpp"
#include "kronopt/errors.hpp"
#include "kronopt/log.hpp"
#include "kronopt/textio.hpp"

namespace kronopt {

std::vector<double> mice(const Network& orig, const Network& reduced,
                         const Eigen::MatrixXi& omega_final,
                         const Eigen::VectorXd& theta_hat) {
  const int k = reduced.n();
  const int n = orig.n();
  if (omega_final.rows() != k || omega_final.cols() != n)
    throw ValidationError("omega dimensions inconsistent with networks");
  if (theta_hat.size() != n)
    throw ValidationError("theta_hat dimension mismatch");

  std::vector<int> keep(static_cast<size_t>(k));
  for (int r = 0; r < k; ++r)
    keep[static_cast<size_t>(r)] = orig.index_of(reduced.id_of(r));
  int slack_row = reduced.slack_index();
  double pin = theta_hat(keep[static_cast<size_t>(slack_row)]);

  Eigen::MatrixXd B_red = build_susceptance(reduced);
  Eigen::VectorXd Theta =
      solve_dc(B_red, reduced.injections(), slack_row, pin);

  std::vector<double> out(static_cast<size_t>(k), 0.0);
  for (int r = 0; r < k; ++r) {
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
      if (omega_final(r, j))
        worst = std::max(worst, std::abs(theta_hat(j) - Theta(r)));
    out[static_cast<size_t>(r)] = worst;
  }
  return out;
}

namespace {

// minimum eccentricity over unweighted hops inside the community; ties by
// larger in-community weighted degree, then lower index
int central_node(const Eigen::MatrixXi& adj, const Eigen::MatrixXd& B,
                 const std::vector<int>& members) {
  const int m = static_cast<int>(members.size());
  if (m == 1) return members[0];
  std::vector<int> pos(static_cast<size_t>(adj.rows()), -1);
  for (int i = 0; i < m; ++i) pos[static_cast<size_t>(members[static_cast<size_t>(i)])] = i;

  int best = -1, best_ecc = 0;
  double best_deg = 0.0;
  std::vector<int> dist(static_cast<size_t>(m));
  std::vector<int> queue(static_cast<size_t>(m));
  for (int s = 0; s < m; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    int head = 0, tail = 0;
    queue[tail++] = s;
    dist[static_cast<size_t>(s)] = 0;
    int ecc = 0;
    while (head < tail) {
      int u = queue[head++];
      int gu = members[static_cast<size_t>(u)];
      for (int v = 0; v < m; ++v) {
        if (dist[static_cast<size_t>(v)] >= 0) continue;
        if (!adj(gu, members[static_cast<size_t>(v)])) continue;
        dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
        ecc = std::max(ecc, dist[static_cast<size_t>(v)]);
        queue[tail++] = v;
      }
    }
    if (tail < m)
      throw ValidationError("community is not connected");
    double deg = 0.0;
    int gs = members[static_cast<size_t>(s)];
    for (int v = 0; v < m; ++v)
      if (v != s) deg += std::abs(B(gs, members[static_cast<size_t>(v)]));
    if (best < 0 || ecc < best_ecc ||
        (ecc == best_ecc && deg > best_deg + 1e-12)) {
      best = s;
      best_ecc = ecc;
      best_deg = deg;
    }
  }
  return members[static_cast<size_t>(best)];
}

struct CenterSet {
  Partition part;
  std::vector<int> centers;        // ascending global positions
  std::vector<int> center_of;      // community id -> center position
};

CenterSet pick_centers(const Network& net, int K, bool weighted,
                       uint64_t seed) {
  if (K < 2) throw ValidationError("baseline requires K >= 2");
  if (K > net.n()) throw ValidationError("K exceeds the node count");
  Eigen::MatrixXd B = build_susceptance(net);
  Eigen::MatrixXi adj = adjacency_of(B);
  CenterSet cs;
  cs.part = weighted ? detect_spectral_k(B, K, seed) : detect_greedy_k(adj, K);
  cs.center_of.resize(static_cast<size_t>(cs.part.k));
  for (int c = 0; c < cs.part.k; ++c) {
    std::vector<int> members;
    for (int j = 0; j < net.n(); ++j)
      if (cs.part.labels[static_cast<size_t>(j)] == c) members.push_back(j);
    cs.center_of[static_cast<size_t>(c)] = central_node(adj, B, members);
  }
  cs.centers = cs.center_of;
  std::sort(cs.centers.begin(), cs.centers.end());
  return cs;
}

Eigen::MatrixXi centers_omega(const Network& net, const CenterSet& cs) {
  Eigen::MatrixXi omega =
      Eigen::MatrixXi::Zero(static_cast<int>(cs.centers.size()), net.n());
  for (int j = 0; j < net.n(); ++j) {
    int center = cs.center_of[static_cast<size_t>(
        cs.part.labels[static_cast<size_t>(j)])];
    auto it = std::lower_bound(cs.centers.begin(), cs.centers.end(), center);
    omega(static_cast<int>(it - cs.centers.begin()), j) = 1;
  }
  return omega;
}

}  // namespace

BaselineResult baseline_cd(const Network& net, int K, bool weighted,
                           uint64_t seed) {
  CenterSet cs = pick_centers(net, K, weighted, seed);
  const int k = static_cast<int>(cs.centers.size());

  Eigen::VectorXd P = net.injections();
  std::vector<Bus> buses(static_cast<size_t>(k));
  int slack_comm = cs.part.labels[static_cast<size_t>(net.slack_index())];
  for (int r = 0; r < k; ++r) {
    Bus b;
    b.id = net.id_of(cs.centers[static_cast<size_t>(r)]);
    b.injection_pu = 0.0;
    b.is_slack =
        cs.centers[static_cast<size_t>(r)] == cs.center_of[static_cast<size_t>(slack_comm)];
    buses[static_cast<size_t>(r)] = b;
  }
  for (int j = 0; j < net.n(); ++j) {
    int center = cs.center_of[static_cast<size_t>(cs.part.labels[static_cast<size_t>(j)])];
    auto it = std::lower_bound(cs.centers.begin(), cs.centers.end(), center);
    buses[static_cast<size_t>(it - cs.centers.begin())].injection_pu += P(j);
  }

  // inter-community branches survive; parallel ties between the same pair
  // merge by susceptance summation
  std::map<std::pair<int, int>, double> ties;
  for (const Branch& br : net.branches()) {
    int u = net.index_of(br.from), v = net.index_of(br.to);
    int cu = cs.part.labels[static_cast<size_t>(u)];
    int cv = cs.part.labels[static_cast<size_t>(v)];
    if (cu == cv) continue;
    int a = net.id_of(cs.center_of[static_cast<size_t>(cu)]);
    int b = net.id_of(cs.center_of[static_cast<size_t>(cv)]);
    if (a > b) std::swap(a, b);
    ties[{a, b}] += 1.0 / br.x;
  }
  std::vector<Branch> branches;
  for (auto& [key, y] : ties)
    branches.push_back({key.first, key.second, 1.0 / y});

  BaselineResult out;
  out.reduced = Network::from_records(net.base_mva(), buses, branches);
  out.omega = centers_omega(net, cs);
  out.centers = cs.centers;
  out.partition = std::move(cs.part);
  return out;
}

BaselineResult baseline_cd_kron(const Network& net, int K, bool weighted,
                                uint64_t seed) {
  CenterSet cs = pick_centers(net, K, weighted, seed);
  Eigen::MatrixXd B = build_susceptance(net);

  ClusterMap cmap(static_cast<size_t>(net.n()));
  for (int j = 0; j < net.n(); ++j)
    cmap[static_cast<size_t>(j)] =
        cs.center_of[static_cast<size_t>(cs.part.labels[static_cast<size_t>(j)])];
  Eigen::MatrixXd B_red = kron_reduce(B, cs.centers);
  Eigen::VectorXd P_red =
      aggregate_injections(net.injections(), cmap, cs.centers);
  int slack_center = cs.center_of[static_cast<size_t>(
      cs.part.labels[static_cast<size_t>(net.slack_index())])];
  auto it = std::lower_bound(cs.centers.begin(), cs.centers.end(), slack_center);

  BaselineResult out;
  out.reduced = reduced_network(net, cs.centers, B_red, P_red,
                                static_cast<int>(it - cs.centers.begin()));
  out.omega = centers_omega(net, cs);
  out.centers = cs.centers;
  out.partition = std::move(cs.part);
  return out;
}

ReductionReport make_report(const std::string& method, double level,
                            const std::string& scenario,
                            std::vector<int> cluster_ids,
                            std::vector<double> mice_rad, double wall_s) {
  ReductionReport r;
  r.method = method;
  r.level = level;
  r.scenario = scenario;
  r.cluster_ids = std::move(cluster_ids);
  r.mice_rad = std::move(mice_rad);
  r.wall_s = wall_s;
  std::vector<double> sorted = r.mice_rad;
  std::sort(sorted.begin(), sorted.end());
  double med = sorted.empty()
                   ? 0.0
                   : (sorted.size() % 2
                          ? sorted[sorted.size() / 2]
                          : 0.5 * (sorted[sorted.size() / 2 - 1] +
                                   sorted[sorted.size() / 2]));
  r.outlier.resize(r.mice_rad.size());
  for (size_t i = 0; i < r.mice_rad.size(); ++i)
    r.outlier[i] = r.mice_rad[i] > 3.0 * med + 1e-12;
  return r;
}

namespace {

Network scale_loads(const Network& net, double multiplier) {
  if (multiplier <= 0.0) throw ValidationError("load multiplier must be > 0");
  std::vector<Bus> buses = net.buses();
  for (Bus& b : buses)
    if (b.injection_pu < 0.0) b.injection_pu *= multiplier;
  double imbalance = 0.0;
  for (const Bus& b : buses) imbalance += b.injection_pu;
  buses[static_cast<size_t>(net.slack_index())].injection_pu -= imbalance;
  return Network::from_records(net.base_mva(), buses, net.branches());
}

double quantile_r7(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  size_t i = static_cast<size_t>(h);
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + (h - static_cast<double>(i)) * (sorted[i + 1] - sorted[i]);
}

}  // namespace

std::vector<ReductionReport> compare(const Network& net,
                                     const CompareParams& params) {
  if (params.alphas.empty())
    throw ValidationError("compare needs at least one alpha");
  std::vector<ReductionReport> reports;
  const int n = net.n();

  for (double mult : params.multipliers) {
    std::string scenario = fmt_double(mult);
    Network net_s = scale_loads(net, mult);
    Eigen::VectorXd theta_s = solve_dc(net_s);

    for (double alpha : params.alphas) {
      ReduceParams rp = params.reduce;
      rp.alpha = alpha;
      auto t0 = std::chrono::steady_clock::now();
      ReductionResult rr = run(net_s, rp);
      double wall =
          rp.deterministic
              ? 0.0
              : std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      int K = static_cast<int>(rr.keep.size());
      double level = 1.0 - static_cast<double>(K) / n;

      std::vector<int> ids;
      for (int pos : rr.keep) ids.push_back(net.id_of(pos));
      reports.push_back(make_report(
          "opti-kron", level, scenario, std::move(ids),
          mice(net_s, rr.reduced, rr.omega, theta_s), wall));

      if (K < 2 || K >= n) {
        log_warn("skipping baselines: opti-kron kept %d nodes", K);
        continue;
      }
      for (int which = 0; which < 2; ++which) {
        auto b0 = std::chrono::steady_clock::now();
        BaselineResult br =
            which == 0
                ? baseline_cd(net_s, K, rp.weighted, rp.seed)
                : baseline_cd_kron(net_s, K, rp.weighted, rp.seed);
        double bwall =
            rp.deterministic
                ? 0.0
                : std::chrono::duration<double>(std::chrono::steady_clock::now() - b0).count();
        std::vector<int> bids;
        for (int pos : br.centers) bids.push_back(net.id_of(pos));
        reports.push_back(make_report(
            which == 0 ? "cd" : "cd-kron", level, scenario, std::move(bids),
            mice(net_s, br.reduced, br.omega, theta_s), bwall));
      }
    }
  }
  return reports;
}

std::string report_csv(const std::vector<ReductionReport>& reports) {
  std::string out = "method,level,scenario,cluster_id,mice_rad\n";
  for (const ReductionReport& r : reports)
    for (size_t i = 0; i < r.mice_rad.size(); ++i)
      out += r.method + "," + fmt_double(r.level) + "," + r.scenario + "," +
             std::to_string(r.cluster_ids[i]) + "," + fmt_double(r.mice_rad[i]) +
             "\n";
  return out;
}

std::string summary_json(const std::vector<ReductionReport>& reports,
                         bool deterministic) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const ReductionReport& r : reports) {
    std::vector<double> sorted = r.mice_rad;
    std::sort(sorted.begin(), sorted.end());
    double mean = 0.0;
    for (double v : sorted) mean += v;
    if (!sorted.empty()) mean /= static_cast<double>(sorted.size());
    nlohmann::ordered_json o;
    o["method"] = r.method;
    o["level"] = r.level;
    o["scenario"] = r.scenario;
    o["clusters"] = sorted.size();
    o["mean"] = mean;
    o["max"] = sorted.empty() ? 0.0 : sorted.back();
    o["q1"] = quantile_r7(sorted, 0.25);
    o["median"] = quantile_r7(sorted, 0.5);
    o["q3"] = quantile_r7(sorted, 0.75);
    nlohmann::ordered_json outliers = nlohmann::ordered_json::array();
    for (size_t i = 0; i < r.mice_rad.size(); ++i)
      if (r.outlier[i]) outliers.push_back(r.cluster_ids[i]);
    o["outliers"] = outliers;
    o["wall_s"] = deterministic ? 0.0 : r.wall_s;
    arr.push_back(o);
  }
  return arr.dump(2) + "\n";
}

}  // namespace kronopt
