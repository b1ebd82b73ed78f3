#pragma once

#include <string>
#include <vector>

namespace kronopt {

// Locale-independent numeric formatting shared by every CSV/JSON writer so
// that identical runs emit byte-identical files.
std::string fmt_double(double v);
std::string fmt_double(double v, int precision);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::vector<std::string> split_ws(const std::string& s);

}  // namespace kronopt
