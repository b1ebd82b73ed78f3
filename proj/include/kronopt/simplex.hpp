#pragma once

// Bounded-variable revised simplex over the computational form
//
//   min c.[x; y]   s.t.  A x - y = 0,   lo <= [x; y] <= hi
//
// where x are the n structural columns and y the m row activities.  Row
// senses are encoded purely in the logical bounds (LE -> y <= rhs, GE ->
// y >= rhs, EQ -> y fixed).  Both a primal method (composite phase-1) and a
// bound-flipping-free dual method are provided; the dual is the workhorse
// for warm-started branch-and-bound reoptimisation.

#include <memory>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace kronopt::lp {

struct Problem {
  int n = 0;                    // structural columns
  int m = 0;                    // rows
  std::vector<double> c;        // size n+m (logicals usually 0)
  std::vector<int> col_start;   // size n+1, structural columns only
  std::vector<int> row_idx;
  std::vector<double> val;
  std::vector<double> lo;       // size n+m
  std::vector<double> hi;       // size n+m
};

enum class VarStatus : unsigned char { AtLower, AtUpper, Basic, FreeNB };

struct Basis {
  std::vector<int> basic;          // size m, variable index per row position
  std::vector<VarStatus> status;   // size n+m
};

enum class SolveStat { Optimal, Infeasible, Unbounded, IterLimit, Singular };

struct Result {
  SolveStat stat = SolveStat::IterLimit;
  double obj = 0.0;
  long iters = 0;
};

class Simplex {
 public:
  explicit Simplex(const Problem& p);

  // Installs a basis (factorises, recomputes basic values).
  void set_basis(const Basis& b);
  Basis basis() const;

  void set_bound(int var, double lo, double hi);
  double lower(int var) const { return lo_[static_cast<size_t>(var)]; }
  double upper(int var) const { return hi_[static_cast<size_t>(var)]; }

  // Logical basis, structurals at the bound consistent with min c'x when
  // one exists (free -> nonbasic at zero).
  void reset_to_slack_basis();

  Result solve(long iter_limit = 2000000);
  Result solve_primal(long iter_limit = 2000000);
  Result solve_dual(long iter_limit = 2000000);

  double value(int var) const { return xval_[static_cast<size_t>(var)]; }
  std::vector<double> values() const { return xval_; }
  double objective() const;
  bool dual_feasible_start() const;

 private:
  struct Eta {
    int r;
    Eigen::VectorXd w;
  };

  int nv() const { return prob_.n + prob_.m; }
  void column(int var, Eigen::VectorXd& out) const;   // dense column of [A -I]
  double col_dot(int var, const Eigen::VectorXd& v) const;
  void factorize();
  void ftran(Eigen::VectorXd& v) const;
  void btran(Eigen::VectorXd& v) const;
  void compute_basic_values();
  void compute_duals();
  double infeas_sum() const;
  int price_primal(bool phase1, bool bland, int& dir) const;
  Result primal_loop(long iter_limit, long& iters);

  Problem prob_;
  std::vector<double> lo_, hi_;
  std::vector<int> basic_;                 // row position -> var
  std::vector<int> basic_pos_;             // var -> row position or -1
  std::vector<VarStatus> status_;
  std::vector<double> xval_;               // size n+m
  std::vector<double> dual_;               // reduced costs, size n+m
  Eigen::SparseMatrix<double> bmat_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  std::vector<Eta> etas_;
  bool factor_ok_ = false;
  bool values_dirty_ = true;
};

}  // namespace kronopt::lp
