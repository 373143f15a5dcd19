#pragma once

#include <functional>
#include <vector>

namespace nlsv {

// Adaptive Gauss-Kronrod on [a, b], split at the given interior breakpoints so
// that kinks (ball edges, positive/negative part switches) sit on panel ends.
double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    const std::vector<double>& breakpoints = {}, double rel_tol = 1e-11);

// Golden-section search for the maximum of a unimodal f on [a, b].
double golden_section_max(const std::function<double(double)>& f, double a, double b,
                          double x_tol, double* f_max = nullptr);

}  // namespace nlsv
