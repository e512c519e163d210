#pragma once

// Special functions that appear in the closed-form intensities, evaluated
// without overflow at large argument and without cancellation near zero.

namespace paircorr::stable {

/// sinh(z)/z for z >= 0. Returns +inf once the true value exceeds DBL_MAX (z > ~710).
double sinhc(double z);

/// sinh(z)/z - 1, accurate to full relative precision for small z.
double sinhc_minus_one(double z);

/// log(sinh(z)/z), finite for every finite z >= 0.
double log_sinhc(double z);

/// z / sinh(z), finite (and underflowing gracefully) for every z >= 0.
double inv_sinhc(double z);

/// exp(-(dp^2 + a^2) / (4 sigma^2)) * sinh(z)/z with z = a dp / (2 sigma^2).
///
/// The exponents are combined before exponentiation,
///   = exp(-(dp - a)^2 / (4 sigma^2)) * (1 - exp(-2z)) / (2z),
/// so the result is finite wherever it is representable even when sinh(z)
/// alone overflows.
double shell_factor(double dp, double a, double sigma);

} // namespace paircorr::stable
