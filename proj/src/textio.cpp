#include "kronopt/textio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kronopt/errors.hpp"

namespace kronopt {

std::string fmt_double(double v, int precision) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

std::string fmt_double(double v) { return fmt_double(v, 12); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << content;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace kronopt
