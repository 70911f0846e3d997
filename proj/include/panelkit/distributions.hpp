#pragma once

namespace panelkit::dist {

/// Upper-tail probability P(Z > x) for the standard normal.
double normal_sf(double x);

/// Upper-tail probability P(T > x) for Student's t with df degrees of freedom.
double student_t_sf(double x, double df);

/// Upper-tail probability P(X > x) for chi-square with df degrees of freedom.
/// Negative x returns 1.
double chi_square_sf(double x, double df);

/// Upper-tail probability P(F > x) for the F distribution with (df1, df2).
double f_sf(double x, double df1, double df2);

/// Two-sided p-values, 2 * sf(|x|).
double normal_two_sided(double x);
double student_t_two_sided(double x, double df);

/// Regularized incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a), a > 0.
double gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double beta_inc(double a, double b, double x);

}  // namespace panelkit::dist
