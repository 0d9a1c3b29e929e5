#pragma once

// Shared quadrature and finite-difference helpers.  Integrands here are smooth
// (theta kernels, Gaussians), so adaptive Simpson with a generous depth cap is
// all we need.

#include <complex>
#include <functional>

namespace rmlab {

using Cplx = std::complex<double>;

// Adaptive Simpson on [a, b] to absolute tolerance tol.
Cplx integrate(const std::function<Cplx(double)>& f, double a, double b, double tol,
               int max_depth = 40);

// Iterated adaptive Simpson over [ax, bx] x [ay, by].
Cplx integrate2d(const std::function<Cplx(double, double)>& f, double ax, double bx, double ay,
                 double by, double tol);

// Composite 32-point Gauss-Legendre over equal panels: no error control, but
// near machine precision once the panel width is below the integrand's decay
// scale.  Callers compare panel counts to certify convergence.
Cplx integrate_gl(const std::function<Cplx(double)>& f, double a, double b, int panels);

// Central difference with one Richardson step: error O(h^4).
double richardson_derivative(const std::function<double(double)>& f, double x, double h);

// Gamma function on the complex plane (Lanczos, reflection for Re s < 1/2).
Cplx cgamma(Cplx s);

// 1/Gamma, entire: exactly zero at 0, -1, -2, ...
Cplx rgamma(Cplx s);

}  // namespace rmlab
