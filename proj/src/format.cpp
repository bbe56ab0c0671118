#include "chainlab/format.hpp"

#include <charconv>
#include <cmath>

namespace chainlab {

void append_number(std::string& out, double x) {
  if (std::isnan(x)) {
    out += "nan";
    return;
  }
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

std::string format_number(double x) {
  std::string s;
  append_number(s, x);
  return s;
}

std::string format_short(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace chainlab
