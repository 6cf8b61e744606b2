#pragma once

#include <string>

namespace z2hubo {

/// Whole-file read/write. Throw z2hubo::Error naming the path on failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

/// Shortest decimal form of `value` that parses back to the same double.
std::string format_double(double value);

}  // namespace z2hubo
