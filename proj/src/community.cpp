#include "kronopt/community.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <random>

#include "kronopt/errors.hpp"
#include "kronopt/log.hpp"

namespace kronopt {

namespace {

std::vector<int> relabel_dense(const std::vector<int>& raw, int* k_out) {
  std::vector<int> labels(raw.size(), -1);
  std::map<int, int> seen;
  int next = 0;
  for (size_t i = 0; i < raw.size(); ++i) {
    auto it = seen.find(raw[i]);
    if (it == seen.end()) it = seen.emplace(raw[i], next++).first;
    labels[i] = it->second;
  }
  if (k_out) *k_out = next;
  return labels;
}

}  // namespace

double modularity(const Eigen::MatrixXd& W, const std::vector<int>& labels) {
  const int n = static_cast<int>(W.rows());
  if (static_cast<int>(labels.size()) != n)
    throw ValidationError("modularity: label count mismatch");
  double total = W.sum();  // 2m
  if (!(total > 0.0))
    throw ValidationError("modularity undefined on an empty edge set");
  Eigen::VectorXd deg = W.rowwise().sum();
  double q = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (labels[static_cast<size_t>(i)] == labels[static_cast<size_t>(j)])
        q += W(i, j) - deg(i) * deg(j) / total;
  return q / total;
}

double modularity(const Eigen::MatrixXi& adj, const std::vector<int>& labels) {
  const Eigen::MatrixXd w = adj.cast<double>();
  return modularity(w, labels);
}

namespace {

// Shared CNM merge loop. Stops at the modularity peak (K <= 0) or when
// exactly K communities remain.
Partition cnm(const Eigen::MatrixXi& adj, int K) {
  const int n = static_cast<int>(adj.rows());
  if (n == 0) throw ValidationError("empty graph");
  if (K > n) throw ValidationError("requested more communities than nodes");

  double m = 0.0;
  std::vector<double> deg(static_cast<size_t>(n), 0.0);
  // community id = smallest node index inside; merge target keeps the id
  std::map<int, std::map<int, double>> nbr;  // id -> (other id -> weight)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (adj(i, j)) {
        deg[static_cast<size_t>(i)] += 1.0;
        if (i < j) {
          m += 1.0;
          nbr[i][j] = 1.0;
          nbr[j][i] = 1.0;
        }
      }
    }
    nbr[i];  // ensure every node exists even if isolated
  }
  if (!(m > 0.0)) throw ValidationError("modularity undefined on an empty edge set");

  std::vector<int> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) {
    while (parent[static_cast<size_t>(v)] != v) {
      parent[static_cast<size_t>(v)] = parent[static_cast<size_t>(parent[static_cast<size_t>(v)])];
      v = parent[static_cast<size_t>(v)];
    }
    return v;
  };

  double q_run = 0.0;
  for (double d : deg) q_run -= d * d / (4.0 * m * m);
  int alive = n;

  while (alive > 1) {
    if (K > 0 && alive == K) break;
    double best_dq = -std::numeric_limits<double>::infinity();
    int best_a = -1, best_b = -1;
    for (const auto& [a, edges] : nbr) {
      for (const auto& [b, w] : edges) {
        if (b <= a) continue;
        double dq = w / m - deg[static_cast<size_t>(a)] * deg[static_cast<size_t>(b)] /
                                (2.0 * m * m);
        if (dq > best_dq + 1e-15) {
          best_dq = dq;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best_a < 0) {
      if (K > 0)
        throw ValidationError("cannot form " + std::to_string(K) +
                              " connected groups: no adjacent pairs left");
      break;
    }
    if (K <= 0 && best_dq <= 0.0) break;  // modularity peak reached

    // merge best_b into best_a (best_a < best_b keeps the smaller id)
    q_run += best_dq;
    parent[static_cast<size_t>(best_b)] = best_a;
    deg[static_cast<size_t>(best_a)] += deg[static_cast<size_t>(best_b)];
    auto moved = std::move(nbr[best_b]);
    nbr.erase(best_b);
    nbr[best_a].erase(best_b);
    for (const auto& [e, w] : moved) {
      if (e == best_a) continue;
      nbr[best_a][e] += w;
      auto& back = nbr[e];
      back.erase(best_b);
      back[best_a] += w;
    }
    --alive;
  }

  std::vector<int> raw(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) raw[static_cast<size_t>(v)] = find(v);
  Partition p;
  p.labels = relabel_dense(raw, &p.k);
  p.q = q_run;
  return p;
}

}  // namespace

Partition detect_greedy(const Eigen::MatrixXi& adj) { return cnm(adj, 0); }

Partition detect_greedy_k(const Eigen::MatrixXi& adj, int K) {
  if (K < 1) throw ValidationError("community count must be >= 1");
  return cnm(adj, K);
}

Partition split_disconnected(const Eigen::MatrixXi& adj, const Partition& p) {
  const int n = static_cast<int>(adj.rows());
  std::vector<int> raw(static_cast<size_t>(n), -1);
  int next = 0;
  for (int start = 0; start < n; ++start) {
    if (raw[static_cast<size_t>(start)] >= 0) continue;
    int lbl = p.labels[static_cast<size_t>(start)];
    std::queue<int> bfs;
    bfs.push(start);
    raw[static_cast<size_t>(start)] = next;
    while (!bfs.empty()) {
      int u = bfs.front();
      bfs.pop();
      for (int v = 0; v < n; ++v)
        if (adj(u, v) && raw[static_cast<size_t>(v)] < 0 &&
            p.labels[static_cast<size_t>(v)] == lbl) {
          raw[static_cast<size_t>(v)] = next;
          bfs.push(v);
        }
    }
    ++next;
  }
  Partition out;
  out.labels = relabel_dense(raw, &out.k);
  out.q = p.q;
  return out;
}

namespace {

struct KMeansResult {
  std::vector<int> labels;
  double inertia = 0.0;
};

KMeansResult kmeans_once(const Eigen::MatrixXd& pts, int k,
                         std::mt19937_64& rng) {
  const int n = static_cast<int>(pts.rows());
  const int d = static_cast<int>(pts.cols());
  Eigen::MatrixXd centers(k, d);

  // k-means++ seeding
  std::uniform_int_distribution<int> uni(0, n - 1);
  centers.row(0) = pts.row(uni(rng));
  Eigen::VectorXd d2 = (pts.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    double total = d2.sum();
    int pick;
    if (total <= 1e-300) {
      pick = uni(rng);
    } else {
      std::uniform_real_distribution<double> ur(0.0, total);
      double r = ur(rng), acc = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    }
    centers.row(c) = pts.row(pick);
    d2 = d2.cwiseMin(
        (pts.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> labels(static_cast<size_t>(n), 0);
  for (int iter = 0; iter < 300; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = (pts.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        double dist = (pts.row(i) - centers.row(c)).squaredNorm();
        if (dist < bd - 1e-15) {
          bd = dist;
          best = c;
        }
      }
      if (labels[static_cast<size_t>(i)] != best) {
        labels[static_cast<size_t>(i)] = best;
        changed = true;
      }
    }
    // recompute centers; reseed empty clusters with the worst-fit point
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
    std::vector<int> counts(static_cast<size_t>(k), 0);
    for (int i = 0; i < n; ++i) {
      sums.row(labels[static_cast<size_t>(i)]) += pts.row(i);
      counts[static_cast<size_t>(labels[static_cast<size_t>(i)])]++;
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] == 0) {
        int far = 0;
        double fd = -1.0;
        for (int i = 0; i < n; ++i) {
          double dist =
              (pts.row(i) - centers.row(labels[static_cast<size_t>(i)]))
                  .squaredNorm();
          if (dist > fd) {
            fd = dist;
            far = i;
          }
        }
        centers.row(c) = pts.row(far);
        labels[static_cast<size_t>(far)] = c;
        changed = true;
      } else {
        centers.row(c) = sums.row(c) / counts[static_cast<size_t>(c)];
      }
    }
    if (!changed) break;
  }

  KMeansResult res;
  res.labels = labels;
  for (int i = 0; i < n; ++i)
    res.inertia +=
        (pts.row(i) - centers.row(labels[static_cast<size_t>(i)])).squaredNorm();
  return res;
}

}  // namespace

Partition detect_spectral(const Eigen::MatrixXd& B, int k_min, int k_max,
                          uint64_t seed) {
  const int n = static_cast<int>(B.rows());
  if (k_min < 1) k_min = 1;
  if (k_max > n) k_max = n;
  if (k_min > k_max) throw ValidationError("empty k range");

  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) W(i, j) = std::abs(B(i, j));
  Eigen::MatrixXd L = Eigen::MatrixXd(W.rowwise().sum().asDiagonal()) - W;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  if (es.info() != Eigen::Success)
    throw SolveError("spectral embedding: eigensolver failed to converge");
  Eigen::MatrixXd vecs = es.eigenvectors();
  // canonical signs: largest-magnitude entry positive
  for (int c = 0; c < n; ++c) {
    int arg = 0;
    double mx = 0.0;
    for (int r = 0; r < n; ++r)
      if (std::abs(vecs(r, c)) > mx + 1e-15) {
        mx = std::abs(vecs(r, c));
        arg = r;
      }
    if (vecs(arg, c) < 0.0) vecs.col(c) *= -1.0;
  }

  Eigen::MatrixXi adj = adjacency_of(B);
  std::mt19937_64 rng(seed);
  Partition best;
  bool have = false;
  for (int k = k_min; k <= k_max; ++k) {
    std::vector<int> labels(static_cast<size_t>(n), 0);
    if (k > 1) {
      Eigen::MatrixXd pts = vecs.leftCols(k);
      KMeansResult bestkm;
      bool first = true;
      for (int restart = 0; restart < 20; ++restart) {
        KMeansResult km = kmeans_once(pts, k, rng);
        if (first || km.inertia < bestkm.inertia - 1e-12) {
          bestkm = km;
          first = false;
        }
      }
      labels = bestkm.labels;
    }
    Partition p;
    p.labels = relabel_dense(labels, &p.k);
    p = split_disconnected(adj, p);
    p.q = modularity(W, p.labels);
    if (!have || p.q > best.q + 1e-12) {
      best = p;
      have = true;
    }
  }
  return best;
}

Partition detect_spectral_k(const Eigen::MatrixXd& B, int k, uint64_t seed) {
  return detect_spectral(B, k, k, seed);
}

std::vector<CommunityProblem> extract_subproblem(
    const Network& net, const Eigen::MatrixXd& B, const Partition& part,
    int community_id, const Eigen::VectorXd& theta_hat) {
  (void)B;
  const int n = net.n();
  if (static_cast<int>(part.labels.size()) != n)
    throw ValidationError("partition does not match network");
  if (theta_hat.size() != n)
    throw ValidationError("theta_hat does not match network");

  std::vector<int> members;
  for (int i = 0; i < n; ++i)
    if (part.labels[static_cast<size_t>(i)] == community_id) members.push_back(i);
  if (members.empty())
    throw ValidationError("community " + std::to_string(community_id) +
                          " has no members");
  const int nm = static_cast<int>(members.size());
  std::vector<int> local(static_cast<size_t>(n), -1);
  for (int i = 0; i < nm; ++i) local[static_cast<size_t>(members[static_cast<size_t>(i)])] = i;

  Eigen::MatrixXd Bl = Eigen::MatrixXd::Zero(nm, nm);
  Eigen::VectorXd Pl(nm);
  for (int i = 0; i < nm; ++i)
    Pl(i) = net.buses()[static_cast<size_t>(members[static_cast<size_t>(i)])].injection_pu;

  for (const Branch& br : net.branches()) {
    int u = net.index_of(br.from), v = net.index_of(br.to);
    int lu = local[static_cast<size_t>(u)], lv = local[static_cast<size_t>(v)];
    double y = 1.0 / br.x;
    if (lu >= 0 && lv >= 0) {
      Bl(lu, lu) += y;
      Bl(lv, lv) += y;
      Bl(lu, lv) -= y;
      Bl(lv, lu) -= y;
    } else if (lu >= 0) {
      Pl(lu) -= (theta_hat(u) - theta_hat(v)) * y;  // flow leaving at u
    } else if (lv >= 0) {
      Pl(lv) -= (theta_hat(v) - theta_hat(u)) * y;
    }
  }

  // connected components over interior branches
  std::vector<int> comp(static_cast<size_t>(nm), -1);
  int ncomp = 0;
  for (int s = 0; s < nm; ++s) {
    if (comp[static_cast<size_t>(s)] >= 0) continue;
    std::queue<int> bfs;
    bfs.push(s);
    comp[static_cast<size_t>(s)] = ncomp;
    while (!bfs.empty()) {
      int u = bfs.front();
      bfs.pop();
      for (int v = 0; v < nm; ++v)
        if (v != u && comp[static_cast<size_t>(v)] < 0 && Bl(u, v) != 0.0) {
          comp[static_cast<size_t>(v)] = ncomp;
          bfs.push(v);
        }
    }
    ++ncomp;
  }
  if (ncomp > 1)
    log_warn("community %d splits into %d components without its tie-lines",
             community_id, ncomp);

  std::vector<CommunityProblem> out;
  for (int c = 0; c < ncomp; ++c) {
    std::vector<int> sel;  // local indices in this component
    for (int i = 0; i < nm; ++i)
      if (comp[static_cast<size_t>(i)] == c) sel.push_back(i);
    const int ns = static_cast<int>(sel.size());
    CommunityProblem cp;
    cp.members.reserve(static_cast<size_t>(ns));
    cp.B = Eigen::MatrixXd::Zero(ns, ns);
    cp.P = Eigen::VectorXd(ns);
    cp.theta_hat = Eigen::VectorXd(ns);
    for (int i = 0; i < ns; ++i) {
      int li = sel[static_cast<size_t>(i)];
      cp.members.push_back(members[static_cast<size_t>(li)]);
      cp.P(i) = Pl(li);
      cp.theta_hat(i) = theta_hat(members[static_cast<size_t>(li)]);
      for (int j = 0; j < ns; ++j) cp.B(i, j) = Bl(li, sel[static_cast<size_t>(j)]);
    }
    cp.adj = adjacency_of(cp.B);
    double imb = cp.P.sum();
    if (std::abs(imb) > 1e-8)
      throw ValidationError("community subproblem injections do not balance (" +
                            std::to_string(imb) + ")");
    int ref = 0;
    double bestdeg = -1.0;
    for (int i = 0; i < ns; ++i)
      if (cp.B(i, i) > bestdeg + 1e-12) {
        bestdeg = cp.B(i, i);
        ref = i;
      }
    cp.ref = ref;
    out.push_back(std::move(cp));
  }
  return out;
}

}  // namespace kronopt
