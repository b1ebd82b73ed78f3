#include "kronopt/mps.hpp"

#include <cstdio>
#include <string>

#include "kronopt/errors.hpp"
#include "kronopt/textio.hpp"

namespace kronopt {

namespace {

std::string rname(int i) {
  char b[16];
  std::snprintf(b, sizeof b, "R%07d", i + 1);
  return b;
}

std::string cname(int j) {
  char b[16];
  std::snprintf(b, sizeof b, "C%07d", j + 1);
  return b;
}

std::string num(double v) { return fmt_double(v); }

// field 2 starts at column 5, field 3 at 15, field 4 at 25
void entry(std::string& out, const std::string& f2, const std::string& f3,
           const std::string& f4) {
  out += "    ";
  out += f2;
  for (size_t k = f2.size(); k < 10; ++k) out += ' ';
  out += f3;
  if (!f4.empty()) {
    for (size_t k = f3.size(); k < 10; ++k) out += ' ';
    out += f4;
  }
  out += '\n';
}

}  // namespace

std::string to_mps(const MilpModel& model, const std::string& name) {
  if (model.ncols() > 9999999 || model.nrows() > 9999999)
    throw ValidationError("model too large for the MPS renaming scheme");
  std::string out;
  out += "NAME          " + name + "\n";
  out += "ROWS\n";
  out += " N  COST\n";
  for (int i = 0; i < model.nrows(); ++i) {
    char s = model.rows[static_cast<size_t>(i)].sense == Sense::LE   ? 'L'
             : model.rows[static_cast<size_t>(i)].sense == Sense::GE ? 'G'
                                                                     : 'E';
    out += ' ';
    out += s;
    out += "  " + rname(i) + "\n";
  }

  // column-major gather of the row-stored coefficients
  std::vector<std::vector<std::pair<int, double>>> cols(
      static_cast<size_t>(model.ncols()));
  for (int i = 0; i < model.nrows(); ++i)
    for (const LinTerm& t : model.rows[static_cast<size_t>(i)].terms)
      cols[static_cast<size_t>(t.col)].push_back({i, t.coef});

  out += "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (int j = 0; j < model.ncols(); ++j) {
    const Variable& v = model.vars[static_cast<size_t>(j)];
    bool want_int = v.kind == VarKind::Binary;
    if (want_int != in_int) {
      char b[16];
      std::snprintf(b, sizeof b, "M%07d", ++marker);
      entry(out, b, "'MARKER'", want_int ? "'INTORG'" : "'INTEND'");
      in_int = want_int;
    }
    if (model.obj[static_cast<size_t>(j)] != 0.0)
      entry(out, cname(j), "COST", num(model.obj[static_cast<size_t>(j)]));
    for (auto& [row, coef] : cols[static_cast<size_t>(j)])
      entry(out, cname(j), rname(row), num(coef));
  }
  if (in_int) {
    char b[16];
    std::snprintf(b, sizeof b, "M%07d", ++marker);
    entry(out, b, "'MARKER'", "'INTEND'");
  }

  out += "RHS\n";
  if (model.obj_offset != 0.0) entry(out, "RHS", "COST", num(-model.obj_offset));
  for (int i = 0; i < model.nrows(); ++i)
    if (model.rows[static_cast<size_t>(i)].rhs != 0.0)
      entry(out, "RHS", rname(i), num(model.rows[static_cast<size_t>(i)].rhs));

  out += "BOUNDS\n";
  for (int j = 0; j < model.ncols(); ++j) {
    const Variable& v = model.vars[static_cast<size_t>(j)];
    auto bline = [&](const char* type, bool with_val, double val) {
      out += ' ';
      out += type;
      out += " BND       " + cname(j);
      if (with_val) {
        for (size_t k = cname(j).size(); k < 10; ++k) out += ' ';
        out += num(val);
      }
      out += '\n';
    };
    bool lo_inf = v.lo == -kInf, hi_inf = v.hi == kInf;
    if (!lo_inf && !hi_inf && v.lo == v.hi) {
      bline("FX", true, v.lo);
    } else if (lo_inf && hi_inf) {
      bline("FR", false, 0.0);
    } else if (lo_inf) {
      bline("MI", false, 0.0);
      bline("UP", true, v.hi);
    } else if (hi_inf) {
      bline("LO", true, v.lo);
    } else {
      bline("LO", true, v.lo);
      bline("UP", true, v.hi);
    }
  }
  out += "ENDATA\n";
  return out;
}

std::string to_name_map_csv(const MilpModel& model) {
  std::string out = "mps_name,semantic_name\n";
  out += "COST,objective\n";
  for (int i = 0; i < model.nrows(); ++i)
    out += rname(i) + "," + model.rows[static_cast<size_t>(i)].name + "\n";
  for (int j = 0; j < model.ncols(); ++j)
    out += cname(j) + "," + model.vars[static_cast<size_t>(j)].name + "\n";
  return out;
}

void export_mps(const MilpModel& model, const std::string& mps_path,
                const std::string& map_path) {
  write_text_file(mps_path, to_mps(model));
  write_text_file(map_path, to_name_map_csv(model));
}

}  // namespace kronopt
