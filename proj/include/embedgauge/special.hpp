#pragma once

namespace embedgauge::statkit {

// Regularized incomplete beta I_x(a, b), evaluated by the Lentz continued
// fraction on whichever side of the mean converges faster. Absolute error is
// below 1e-10 over the domain. Throws DomainError outside a,b > 0, 0 <= x <= 1.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided Student-t tail P(|T| >= |t|) with `df` degrees of freedom.
// Throws DomainError for df <= 0 or non-finite arguments other than |t| = inf.
double student_t_sf(double t, double df);

}  // namespace embedgauge::statkit
