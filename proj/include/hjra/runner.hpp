#ifndef HJRA_RUNNER_HPP
#define HJRA_RUNNER_HPP

#include <string>
#include <vector>

#include "hjra/scenario.hpp"

namespace hjra {

// Executes a scenario and writes value-field CSVs, contour CSVs, the
// conflict report (algorithm1) and a manifest under out_dir. Outputs are
// byte-identical across runs and worker counts; manifest timing lines are the
// one exception and carry the "timing_" prefix.
struct RunReport {
    std::vector<std::string> outputs;
    std::size_t warnings = 0;
};

RunReport run_solve(const Scenario& s, const std::string& out_dir);
RunReport run_algorithm1_scenario(const Scenario& s, const std::string& out_dir);
// Standalone DP oracle run over a solve-form scenario.
RunReport run_oracle(const Scenario& s, const std::string& out_dir);

// Reference solution for the 1D reach benchmark: f = u, |u| <= 1, target
// |x| <= r, no obstacle. V(x, T - tau) = max(0, |x| - tau) - r.
double analytic_1d_reference(double x, double tau, double radius);

} // namespace hjra

#endif
