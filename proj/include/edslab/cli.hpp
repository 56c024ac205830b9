#pragma once

#include "edslab/resonances.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace edslab {

/// Runs the edslab command line. argv[0] is the program name. Returns 0 on
/// success, 1 on invalid input, 2 on numerical or I/O failure.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& argv);

/// SVG of the zeros in the lower half-plane with the forbidden-domain boundary
/// Im k = ln(eps + C/|k|) / (2 gamma) for the fitted C.
std::string plot_svg(const ResonanceList& res, double gamma, double eps);
void emit_plot(const ResonanceList& res, double gamma, double eps, const std::string& path);

}  // namespace edslab
