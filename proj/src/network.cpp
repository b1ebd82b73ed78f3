#include "kronopt/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "json.hpp"
#include "kronopt/errors.hpp"
#include "kronopt/textio.hpp"

namespace kronopt {

Network Network::from_records(double base_mva, std::vector<Bus> buses,
                              std::vector<Branch> branches) {
  if (!(base_mva > 0.0) || !std::isfinite(base_mva))
    throw ValidationError("base_mva must be positive");
  if (buses.empty()) throw ValidationError("network has no buses");

  std::sort(buses.begin(), buses.end(),
            [](const Bus& a, const Bus& b) { return a.id < b.id; });

  Network net;
  net.base_mva_ = base_mva;
  net.buses_ = std::move(buses);
  for (int i = 0; i < net.n(); ++i) {
    const Bus& b = net.buses_[static_cast<size_t>(i)];
    if (!std::isfinite(b.injection_pu))
      throw ValidationError("bus " + std::to_string(b.id) +
                            ": injection is not finite");
    if (!net.idx_.emplace(b.id, i).second)
      throw ValidationError("duplicate bus id " + std::to_string(b.id));
    if (b.is_slack) {
      if (net.slack_index_ >= 0)
        throw ValidationError("more than one slack bus (ids " +
                              std::to_string(net.id_of(net.slack_index_)) +
                              " and " + std::to_string(b.id) + ")");
      net.slack_index_ = i;
    }
  }
  if (net.slack_index_ < 0) throw ValidationError("no slack bus");

  for (const Branch& br : branches) {
    if (br.from == br.to)
      throw ValidationError("branch " + std::to_string(br.from) + "-" +
                            std::to_string(br.to) + " is a self-loop");
    if (!net.idx_.count(br.from))
      throw ValidationError("branch references unknown bus " +
                            std::to_string(br.from));
    if (!net.idx_.count(br.to))
      throw ValidationError("branch references unknown bus " +
                            std::to_string(br.to));
    if (!(br.x > 0.0) || !std::isfinite(br.x))
      throw ValidationError("branch " + std::to_string(br.from) + "-" +
                            std::to_string(br.to) +
                            ": reactance must be positive");
  }
  net.branches_ = std::move(branches);

  // connectivity over in-service branches
  std::vector<std::vector<int>> adj(static_cast<size_t>(net.n()));
  for (const Branch& br : net.branches_) {
    int a = net.index_of(br.from), b = net.index_of(br.to);
    adj[static_cast<size_t>(a)].push_back(b);
    adj[static_cast<size_t>(b)].push_back(a);
  }
  std::vector<char> seen(static_cast<size_t>(net.n()), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[static_cast<size_t>(u)])
      if (!seen[static_cast<size_t>(v)]) {
        seen[static_cast<size_t>(v)] = 1;
        ++reached;
        q.push(v);
      }
  }
  if (reached != net.n())
    throw ValidationError("network is not connected (" +
                          std::to_string(net.n() - reached) +
                          " buses unreachable from bus " +
                          std::to_string(net.id_of(0)) + ")");
  return net;
}

int Network::index_of(int bus_id) const {
  auto it = idx_.find(bus_id);
  if (it == idx_.end())
    throw ValidationError("unknown bus id " + std::to_string(bus_id));
  return it->second;
}

Eigen::VectorXd Network::injections() const {
  Eigen::VectorXd p(n());
  for (int i = 0; i < n(); ++i) p(i) = buses_[static_cast<size_t>(i)].injection_pu;
  return p;
}

Network Network::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), -1);
  }
  try {
    double base = j.at("base_mva").get<double>();
    std::vector<Bus> buses;
    for (const auto& jb : j.at("buses")) {
      Bus b;
      b.id = jb.at("id").get<int>();
      b.injection_pu = jb.at("injection_pu").get<double>();
      b.is_slack = jb.value("is_slack", false);
      buses.push_back(b);
    }
    std::vector<Branch> branches;
    for (const auto& jb : j.at("branches")) {
      Branch br;
      br.from = jb.at("from").get<int>();
      br.to = jb.at("to").get<int>();
      br.x = jb.at("x").get<double>();
      branches.push_back(br);
    }
    return from_records(base, std::move(buses), std::move(branches));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad network JSON: ") + e.what(), -1);
  }
}

std::string Network::to_json_text() const {
  nlohmann::ordered_json j;
  j["base_mva"] = base_mva_;
  j["buses"] = nlohmann::ordered_json::array();
  for (const Bus& b : buses_) {
    nlohmann::ordered_json jb;
    jb["id"] = b.id;
    jb["injection_pu"] = b.injection_pu;
    jb["is_slack"] = b.is_slack;
    j["buses"].push_back(jb);
  }
  j["branches"] = nlohmann::ordered_json::array();
  for (const Branch& br : branches_) {
    nlohmann::ordered_json jb;
    jb["from"] = br.from;
    jb["to"] = br.to;
    jb["x"] = br.x;
    j["branches"].push_back(jb);
  }
  return j.dump(2) + "\n";
}

Eigen::MatrixXd build_susceptance(const Network& net) {
  const int n = net.n();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (const Branch& br : net.branches()) {
    int a = net.index_of(br.from), b = net.index_of(br.to);
    double y = 1.0 / br.x;
    B(a, a) += y;
    B(b, b) += y;
    B(a, b) -= y;
    B(b, a) -= y;
  }
  return B;
}

Eigen::MatrixXi adjacency_of(const Eigen::MatrixXd& B, double tol) {
  const int n = static_cast<int>(B.rows());
  Eigen::MatrixXi A = Eigen::MatrixXi::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && std::abs(B(i, j)) > tol) A(i, j) = 1;
  return A;
}

}  // namespace kronopt
