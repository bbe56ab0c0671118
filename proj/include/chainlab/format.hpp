#pragma once

#include <string>

namespace chainlab {

/// Shortest-free decimal rendering with 17 significant digits (round-trip
/// exact). Non-finite values come out as `nan`, `inf`, `-inf`.
std::string format_number(double x);

/// Shortest round-trip rendering, for labels and messages.
std::string format_short(double x);

/// Appends format_number(x) to out.
void append_number(std::string& out, double x);

}  // namespace chainlab
