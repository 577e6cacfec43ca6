#pragma once

namespace wehnet {

/// Gauss hypergeometric function 2F1(a,b;c;z) by direct power series, with
/// the Pfaff transform z -> z/(z-1) applied for z < -0.5 to speed up
/// convergence. The transform maps all z < 0 into [0,1), so any z < 1 is
/// accepted (the interference tail integrals push the argument toward
/// -inf). Throws std::domain_error for z >= 1 or c a non-positive
/// integer. Relative accuracy ~1e-12.
double hyp2f1(double a, double b, double c, double z);

/// Exponential integral Ei(x) = -int_{-x}^inf e^-t/t dt, x != 0.
/// Series for small |x|, continued fraction for large negative x,
/// asymptotic expansion for large positive x. Relative accuracy ~1e-10
/// or better over the range exercised here.
double expint_ei(double x);

/// Complementary error function (thin wrapper, kept so every special
/// function used by the closed forms has a single audited entry point).
double erfc_c(double x);

/// Scaled complementary error function exp(x^2) erfc(x) for x >= 0. Stays
/// finite where exp(x^2) alone would overflow; used by the alpha=4 success
/// probability closed form whose argument grows like 1/sqrt(noise).
double erfcx(double x);

/// Tail probability of the standard normal distribution,
/// Q(x) = erfc(x/sqrt(2))/2.
double q_function(double x);

}  // namespace wehnet
