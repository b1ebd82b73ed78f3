#include <cctype>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "kronopt/errors.hpp"
#include "kronopt/log.hpp"
#include "kronopt/network.hpp"
#include "kronopt/textio.hpp"

namespace kronopt {

namespace {

std::string strip_comment(const std::string& line) {
  auto pos = line.find('%');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double num(const std::string& tok, int line_no) {
  try {
    size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + tok + "'", line_no);
  }
}

struct Matrix {
  std::vector<std::vector<double>> rows;
  std::vector<int> row_lines;
};

}  // namespace

Network parse_matpower(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;

  double base_mva = -1.0;
  std::map<std::string, Matrix> mats;
  std::string cur;  // matrix currently being filled, "" if none

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (cur.empty()) {
      if (line.rfind("function", 0) == 0) continue;
      if (line.rfind("mpc.baseMVA", 0) == 0) {
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected '='", line_no);
        std::string rhs = trim(line.substr(eq + 1));
        if (!rhs.empty() && rhs.back() == ';') rhs.pop_back();
        base_mva = num(trim(rhs), line_no);
        continue;
      }
      if (line.rfind("mpc.", 0) == 0 && line.find('=') != std::string::npos &&
          line.find('[') != std::string::npos) {
        auto eq = line.find('=');
        std::string name = trim(line.substr(4, eq - 4));
        if (name == "bus" || name == "gen" || name == "branch") {
          cur = name;
          mats[cur];  // create
          std::string rest = trim(line.substr(line.find('[') + 1));
          if (!rest.empty()) {
            // rows may start on the same line as the bracket
            raw = rest;
            goto matrix_row;
          }
        }
        continue;
      }
      continue;  // unknown assignments (gencost, version, ...) are ignored
    }

  matrix_row : {
    std::string body = trim(strip_comment(raw));
    if (body.empty()) continue;
    bool closed = false;
    auto close = body.find(']');
    if (close != std::string::npos) {
      closed = true;
      body = trim(body.substr(0, close));
    }
    if (!body.empty()) {
      if (body.back() == ';') body.pop_back();
      std::vector<std::string> toks = split_ws(body);
      if (!toks.empty()) {
        std::vector<double> row;
        row.reserve(toks.size());
        for (const auto& t : toks) row.push_back(num(t, line_no));
        mats[cur].rows.push_back(std::move(row));
        mats[cur].row_lines.push_back(line_no);
      }
    }
    if (closed) cur.clear();
    continue;
  }
  }
  if (!cur.empty())
    throw ParseError("unterminated matrix mpc." + cur, line_no);
  if (base_mva <= 0.0) throw ParseError("missing or invalid mpc.baseMVA", line_no);
  if (!mats.count("bus")) throw ParseError("missing mpc.bus", line_no);
  if (!mats.count("branch")) throw ParseError("missing mpc.branch", line_no);

  std::map<int, double> gen_pu;  // bus id -> total in-service PG (MW)
  if (mats.count("gen")) {
    const Matrix& g = mats["gen"];
    for (size_t r = 0; r < g.rows.size(); ++r) {
      const auto& row = g.rows[r];
      if (row.size() < 2)
        throw ParseError("gen row needs at least 2 columns", g.row_lines[r]);
      int status = row.size() >= 8 ? static_cast<int>(row[7]) : 1;
      if (status <= 0) continue;
      gen_pu[static_cast<int>(row[0])] += row[1];
    }
  }

  std::vector<Bus> buses;
  const Matrix& bm = mats["bus"];
  for (size_t r = 0; r < bm.rows.size(); ++r) {
    const auto& row = bm.rows[r];
    if (row.size() < 3)
      throw ParseError("bus row needs at least 3 columns", bm.row_lines[r]);
    Bus b;
    b.id = static_cast<int>(row[0]);
    int type = static_cast<int>(row[1]);
    if (type == 4)
      throw ParseError("isolated bus (type 4) not supported: bus " +
                           std::to_string(b.id),
                       bm.row_lines[r]);
    b.is_slack = type == 3;
    double pd = row[2];
    double pg = 0.0;
    auto it = gen_pu.find(b.id);
    if (it != gen_pu.end()) pg = it->second;
    b.injection_pu = (pg - pd) / base_mva;
    buses.push_back(b);
  }

  std::vector<Branch> branches;
  const Matrix& brm = mats["branch"];
  for (size_t r = 0; r < brm.rows.size(); ++r) {
    const auto& row = brm.rows[r];
    if (row.size() < 4)
      throw ParseError("branch row needs at least 4 columns", brm.row_lines[r]);
    int status = row.size() >= 11 ? static_cast<int>(row[10]) : 1;
    if (status <= 0) continue;
    Branch br;
    br.from = static_cast<int>(row[0]);
    br.to = static_cast<int>(row[1]);
    br.x = row[3];
    if (!(br.x > 0.0))
      throw ParseError("branch " + std::to_string(br.from) + "-" +
                           std::to_string(br.to) + ": reactance must be positive",
                       brm.row_lines[r]);
    branches.push_back(br);
  }

  return Network::from_records(base_mva, std::move(buses), std::move(branches));
}

Network load_network(const std::string& path) {
  std::string text = read_text_file(path);
  auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".m") return parse_matpower(text);
  if (ext == ".json") return Network::from_json_text(text);
  throw ValidationError("unsupported network file extension: " + path);
}

}  // namespace kronopt
