#include "crossreg/roots.hpp"

#include <algorithm>

namespace crossreg {

double bisect(const std::function<double(double)>& f, double a, double b, double tol, int max_iter) {
  double fa = f(a);
  if (fa == 0.0) return a;
  double fb = f(b);
  if (fb == 0.0) return b;
  for (int it = 0; it < max_iter && std::fabs(b - a) > tol; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

std::vector<double> scan_roots(const std::function<double(double)>& f,
                               const std::function<double(double)>& df, double a, double b, int n,
                               double tol, double merge) {
  std::vector<double> roots;
  std::vector<double> xs(n + 1), fs(n + 1), ds(n + 1);
  for (int k = 0; k <= n; ++k) {
    xs[k] = a + (b - a) * k / n;
    fs[k] = f(xs[k]);
    ds[k] = df ? df(xs[k]) : 0.0;
  }
  for (int k = 0; k <= n; ++k) {
    if (fs[k] == 0.0) roots.push_back(xs[k]);
    if (k == n) break;
    if (fs[k] != 0.0 && fs[k + 1] != 0.0 && (fs[k] < 0.0) != (fs[k + 1] < 0.0)) {
      roots.push_back(bisect(f, xs[k], xs[k + 1], tol));
    } else if (df && fs[k] != 0.0 && fs[k + 1] != 0.0 && (ds[k] < 0.0) != (ds[k + 1] < 0.0) &&
               ds[k] != 0.0 && ds[k + 1] != 0.0) {
      // an extremum inside the cell may dip across zero and come back
      const double xm = bisect(df, xs[k], xs[k + 1], tol);
      const double fm = f(xm);
      if (fm == 0.0) {
        roots.push_back(xm);
      } else if ((fm < 0.0) != (fs[k] < 0.0)) {
        roots.push_back(bisect(f, xs[k], xm, tol));
        roots.push_back(bisect(f, xm, xs[k + 1], tol));
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots)
    if (out.empty() || r - out.back() > merge) out.push_back(r);
  return out;
}

}  // namespace crossreg
