#pragma once

#include <limits>
#include <string>
#include <vector>

namespace kronopt {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lo = -kInf;
  double hi = kInf;
};

enum class Sense { LE, EQ, GE };

struct LinTerm {
  int col = 0;
  double coef = 0.0;
};

struct Row {
  std::string name;
  std::vector<LinTerm> terms;
  Sense sense = Sense::LE;
  double rhs = 0.0;
};

// Solver-neutral model: minimize obj·x + obj_offset subject to rows and
// variable bounds. Binaries carry bounds within [0,1].
struct MilpModel {
  std::vector<Variable> vars;
  std::vector<Row> rows;
  std::vector<double> obj;
  double obj_offset = 0.0;
  // optional per-column branching priority (higher branches first; empty = uniform)
  std::vector<int> branch_priority;

  int add_var(const std::string& name, VarKind kind, double lo, double hi,
              double obj_coef = 0.0) {
    vars.push_back({name, kind, lo, hi});
    obj.push_back(obj_coef);
    return static_cast<int>(vars.size()) - 1;
  }
  void add_row(const std::string& name, std::vector<LinTerm> terms, Sense sense,
               double rhs) {
    rows.push_back({name, std::move(terms), sense, rhs});
  }
  int ncols() const { return static_cast<int>(vars.size()); }
  int nrows() const { return static_cast<int>(rows.size()); }
};

}  // namespace kronopt
