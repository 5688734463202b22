#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace crossreg {

// Bisection on [a, b] with f(a), f(b) of opposite sign (or one of them zero).
double bisect(const std::function<double(double)>& f, double a, double b, double tol = 1e-14,
              int max_iter = 200);

// Roots of f on [a, b]: sign changes between n uniform cells refined by
// bisection, exact grid zeros, and root pairs hidden inside a cell (detected
// through a sign change of df, which is enough for low-degree inputs).
// Roots closer than `merge` collapse to one.
std::vector<double> scan_roots(const std::function<double(double)>& f,
                               const std::function<double(double)>& df, double a, double b, int n,
                               double tol, double merge);

}  // namespace crossreg
