#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace snlab {

// Parses a linear grid "a:b:n" (n points, both ends included).
std::vector<double> parse_grid(const std::string& text);

// Entry point of the command-line front end. argv[0] is the program name.
// Data goes to `out` unless --out names a file; diagnostics and error JSON
// go to `err`. Returns the process exit status.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace snlab
