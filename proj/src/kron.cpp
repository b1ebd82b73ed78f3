#include "kronopt/kron.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "kronopt/errors.hpp"

namespace kronopt {

namespace {

void check_keep(const std::vector<int>& keep, int n) {
  if (keep.empty()) throw ReductionError("keep set is empty");
  for (size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= n)
      throw ReductionError("keep index out of range: " + std::to_string(keep[i]));
    if (i > 0 && keep[i] <= keep[i - 1])
      throw ReductionError("keep indices must be strictly increasing");
  }
}

std::vector<int> complement(const std::vector<int>& keep, int n) {
  std::vector<int> elim;
  elim.reserve(static_cast<size_t>(n) - keep.size());
  size_t k = 0;
  for (int i = 0; i < n; ++i) {
    if (k < keep.size() && keep[k] == i) {
      ++k;
    } else {
      elim.push_back(i);
    }
  }
  return elim;
}

Eigen::MatrixXd pick(const Eigen::MatrixXd& B, const std::vector<int>& rows,
                     const std::vector<int>& cols) {
  Eigen::MatrixXd M(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          B(rows[i], cols[j]);
  return M;
}

// Factor B_rr once; used by both the reduction and the Ward shift.
struct Elimination {
  std::vector<int> elim;
  Eigen::MatrixXd Bkr;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;

  Elimination(const Eigen::MatrixXd& B, const std::vector<int>& keep) {
    const int n = static_cast<int>(B.rows());
    check_keep(keep, n);
    elim = complement(keep, n);
    if (elim.empty()) return;
    Eigen::MatrixXd Brr = pick(B, elim, elim);
    Bkr = pick(B, keep, elim);
    lu.compute(Brr);
    // Brr is singular iff an eliminated block has no path to a kept node.
    Eigen::VectorXd probe = lu.solve(Eigen::VectorXd::Ones(Brr.rows()));
    double resid =
        (Brr * probe - Eigen::VectorXd::Ones(Brr.rows())).lpNorm<Eigen::Infinity>();
    if (!probe.allFinite() || resid > 1e-6)
      throw ReductionError(
          "eliminated block is disconnected from every kept node");
  }
};

}  // namespace

Eigen::MatrixXd kron_reduce(const Eigen::MatrixXd& B,
                            const std::vector<int>& keep) {
  if (B.rows() != B.cols()) throw ReductionError("B must be square");
  Elimination el(B, keep);
  Eigen::MatrixXd Bkk = pick(B, keep, keep);
  if (el.elim.empty()) return Bkk;
  Eigen::MatrixXd S = Bkk - el.Bkr * el.lu.solve(el.Bkr.transpose());
  // symmetrize away factorization roundoff
  return 0.5 * (S + S.transpose());
}

Eigen::MatrixXd kron_reduce_via_impedance(const Eigen::MatrixXd& B,
                                          const std::vector<int>& keep,
                                          int ref) {
  const int n = static_cast<int>(B.rows());
  if (B.rows() != B.cols()) throw ReductionError("B must be square");
  check_keep(keep, n);
  if (!std::binary_search(keep.begin(), keep.end(), ref))
    throw ReductionError("ref must be a kept node");
  if (static_cast<int>(keep.size()) == 1) return Eigen::MatrixXd::Zero(1, 1);

  std::vector<int> grounded;  // all nodes except ref
  grounded.reserve(static_cast<size_t>(n) - 1);
  for (int i = 0; i < n; ++i)
    if (i != ref) grounded.push_back(i);

  Eigen::MatrixXd Z = pick(B, grounded, grounded).inverse();
  if (!Z.allFinite())
    throw ReductionError("grounded susceptance matrix is singular");

  // positions inside `grounded` of the kept nodes (ref excluded)
  std::vector<int> kpos;
  for (size_t i = 0; i < grounded.size(); ++i)
    if (std::binary_search(keep.begin(), keep.end(), grounded[i]))
      kpos.push_back(static_cast<int>(i));

  Eigen::MatrixXd Zkk = pick(Z, kpos, kpos);
  Eigen::MatrixXd Bg = Zkk.inverse();
  if (!Bg.allFinite())
    throw ReductionError("kept impedance block is singular");

  // Bg is the reduced Laplacian with the ref row/col deleted; rebuild them
  // from symmetry and zero row sums.
  const int m = static_cast<int>(keep.size());
  int ref_pos = static_cast<int>(
      std::lower_bound(keep.begin(), keep.end(), ref) - keep.begin());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  std::vector<int> others;  // positions in keep other than ref_pos
  for (int i = 0; i < m; ++i)
    if (i != ref_pos) others.push_back(i);
  for (size_t i = 0; i < others.size(); ++i)
    for (size_t j = 0; j < others.size(); ++j)
      out(others[i], others[j]) =
          Bg(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  for (size_t j = 0; j < others.size(); ++j) {
    double col = 0.0;
    for (size_t i = 0; i < others.size(); ++i) col += out(others[i], others[j]);
    out(ref_pos, others[j]) = -col;
    out(others[j], ref_pos) = -col;
  }
  double diag = 0.0;
  for (size_t j = 0; j < others.size(); ++j) diag -= out(ref_pos, others[j]);
  out(ref_pos, ref_pos) = diag;
  return 0.5 * (out + out.transpose());
}

Eigen::VectorXd aggregate_injections(const Eigen::VectorXd& P,
                                     const ClusterMap& cmap,
                                     const std::vector<int>& keep) {
  const int n = static_cast<int>(P.size());
  if (static_cast<int>(cmap.size()) != n)
    throw ReductionError("cluster map size mismatch");
  check_keep(keep, n);
  std::vector<int> pos(static_cast<size_t>(n), -1);
  for (size_t k = 0; k < keep.size(); ++k) pos[static_cast<size_t>(keep[k])] =
      static_cast<int>(k);
  for (int k : keep)
    if (cmap[static_cast<size_t>(k)] != k)
      throw ReductionError("kept node " + std::to_string(k) +
                           " does not map to itself");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(keep.size()));
  for (int i = 0; i < n; ++i) {
    int rep = cmap[static_cast<size_t>(i)];
    if (rep < 0 || rep >= n || pos[static_cast<size_t>(rep)] < 0)
      throw ReductionError("node " + std::to_string(i) +
                           " maps to a non-kept node");
    out(pos[static_cast<size_t>(rep)]) += P(i);
  }
  return out;
}

Eigen::VectorXd ward_injections(const Eigen::MatrixXd& B,
                                const Eigen::VectorXd& P,
                                const std::vector<int>& keep) {
  if (B.rows() != B.cols() || P.size() != B.rows())
    throw ReductionError("ward_injections: dimension mismatch");
  Elimination el(B, keep);
  Eigen::VectorXd Pk(static_cast<Eigen::Index>(keep.size()));
  for (size_t i = 0; i < keep.size(); ++i)
    Pk(static_cast<Eigen::Index>(i)) = P(keep[i]);
  if (el.elim.empty()) return Pk;
  Eigen::VectorXd Pr(static_cast<Eigen::Index>(el.elim.size()));
  for (size_t i = 0; i < el.elim.size(); ++i)
    Pr(static_cast<Eigen::Index>(i)) = P(el.elim[i]);
  return Pk - el.Bkr * el.lu.solve(Pr);
}

Network reduced_network(const Network& orig, const std::vector<int>& keep,
                        const Eigen::MatrixXd& Bred,
                        const Eigen::VectorXd& Pred, int slack_pos,
                        double fill_tol) {
  const int m = static_cast<int>(keep.size());
  check_keep(keep, orig.n());
  if (Bred.rows() != m || Bred.cols() != m || Pred.size() != m)
    throw ReductionError("reduced_network: dimension mismatch");
  if (slack_pos < 0 || slack_pos >= m)
    throw ReductionError("reduced_network: slack_pos out of range");

  std::vector<Bus> buses(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    buses[static_cast<size_t>(i)].id = orig.id_of(keep[static_cast<size_t>(i)]);
    buses[static_cast<size_t>(i)].injection_pu = Pred(i);
    buses[static_cast<size_t>(i)].is_slack = (i == slack_pos);
  }
  std::vector<Branch> branches;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      double y = -Bred(i, j);
      if (std::abs(y) <= fill_tol) continue;
      if (y < 0.0)
        throw ReductionError("negative equivalent susceptance between buses " +
                             std::to_string(buses[static_cast<size_t>(i)].id) +
                             " and " +
                             std::to_string(buses[static_cast<size_t>(j)].id));
      Branch br;
      br.from = buses[static_cast<size_t>(i)].id;
      br.to = buses[static_cast<size_t>(j)].id;
      br.x = 1.0 / y;
      branches.push_back(br);
    }
  return Network::from_records(orig.base_mva(), std::move(buses),
                               std::move(branches));
}

}  // namespace kronopt
