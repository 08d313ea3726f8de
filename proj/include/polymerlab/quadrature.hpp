#pragma once

#include <functional>
#include <vector>

namespace polymerlab::quad {

using Fn = std::function<double(double)>;

// Adaptive Gauss-Kronrod on [a, b]. Wide intervals are first cut at
// geometrically spaced points so power-law integrands resolve.
double finite(const Fn& f, double a, double b, double rel_tol = 1e-13);

// Same, over consecutive pairs of the sorted, deduplicated break list.
double piecewise(const Fn& f, std::vector<double> breaks, double rel_tol = 1e-13);

// exp-sinh on [a, inf) and (-inf, b].
double to_infinity(const Fn& f, double a, double rel_tol = 1e-13);
double from_minus_infinity(const Fn& f, double b, double rel_tol = 1e-13);

// tanh-sinh on [a, b]; tolerates integrable endpoint singularities.
double singular(const Fn& f, double a, double b, double rel_tol = 1e-13);

// Fourier-type tails: int_a^inf f(u) cos(u) du and int_a^inf f(u) sin(u) du.
double cos_tail(const Fn& f, double a);
double sin_tail(const Fn& f, double a);

}  // namespace polymerlab::quad
