#include "nlsv/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace nlsv {

double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    const std::vector<double>& breakpoints, double rel_tol) {
  if (!(b > a)) return 0.0;
  std::vector<double> nodes{a};
  for (double p : breakpoints)
    if (p > a && p < b) nodes.push_back(p);
  nodes.push_back(b);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    // Each panel is mapped onto [0, 1]: boost compares its error estimate on the
    // reference interval against a tolerance scaled by the panel length, which
    // otherwise forces full-depth recursion on very short panels.
    const double a0 = nodes[i];
    const double w = nodes[i + 1] - nodes[i];
    auto g = [&f, a0, w](double t) { return w * f(a0 + w * t); };
    double err = 0.0;
    total += gauss_kronrod<double, 31>::integrate(g, 0.0, 1.0, 12, rel_tol, &err);
  }
  return total;
}

double golden_section_max(const std::function<double(double)>& f, double a, double b,
                          double x_tol, double* f_max) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > x_tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  if (f_max) *f_max = std::max({fc, fd, f(x)});
  return x;
}

}  // namespace nlsv
