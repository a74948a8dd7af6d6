"""Standard normal CDF and quantile function.

The quantile routine is Wichura's PPND16 rational approximation (algorithm
AS 241), accurate to well below 1e-8 absolute error over (1e-12, 1 - 1e-12),
which is the accuracy contract the stock formulas rely on.  It accepts
scalars or numpy arrays.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["inv_norm_cdf", "norm_cdf"]

# PPND16 coefficients, central region |p - 0.5| <= 0.425.
_A = np.array([
    3.3871328727963666080e0, 1.3314166789178437745e2,
    1.9715909503065514427e3, 1.3731693765509461125e4,
    4.5921953931549871457e4, 6.7265770927008700853e4,
    3.3430575583588128105e4, 2.5090809287301226727e3,
])
_B = np.array([
    1.0, 4.2313330701600911252e1, 6.8718700749205790830e2,
    5.3941960214247511077e3, 2.1213794301586595867e4,
    3.9307895800092710610e4, 2.8729085735721942674e4,
    5.2264952788528545610e3,
])
# Intermediate tail, sqrt(-log(min(p, 1-p))) <= 5.
_C = np.array([
    1.42343711074968357734e0, 4.63033784615654529590e0,
    5.76949722146069140550e0, 3.64784832476320460504e0,
    1.27045825245236838258e0, 2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4,
])
_D = np.array([
    1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
    6.89767334985100004550e-1, 1.48103976427480074590e-1,
    1.51986665636164571966e-2, 5.47593808499534494600e-4,
    1.05075007164441684324e-9,
])
# Far tail.
_E = np.array([
    6.65790464350110377720e0, 5.46378491116411436990e0,
    1.78482653991729133580e0, 2.96560571828504891230e-1,
    2.65321895265761230930e-2, 1.24266094738807843860e-3,
    2.71155556874348757815e-5, 2.01033439929228813265e-7,
])
_F = np.array([
    1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
    1.48753612908506148525e-2, 7.86869131145613259100e-4,
    1.84631831751005468180e-5, 1.42151175831644588870e-7,
    2.04426310338993978564e-15,
])


def _poly(coef: np.ndarray, x):
    # Horner evaluation with coefficients ordered low to high degree.
    out = coef[-1]
    for c in coef[-2::-1]:
        out = out * x + c
    return out


def inv_norm_cdf(p):
    """Quantile of the standard normal distribution.

    Accepts a scalar or array of probabilities strictly inside (0, 1) and
    raises ValueError otherwise.
    """
    arr = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError("probability must lie strictly inside (0, 1)")

    q = arr - 0.5
    central = np.abs(q) <= 0.425

    # Central region.
    r_c = 0.180625 - q * q
    x_central = q * _poly(_A, r_c) / _poly(_B, r_c)

    # Tail regions, computed on the folded probability.
    r_t = np.where(q < 0.0, arr, 1.0 - arr)
    r_t = np.where(central, 0.25, r_t)  # placeholder keeps log() defined
    r_t = np.sqrt(-np.log(r_t))
    near = r_t <= 5.0
    x_near = _poly(_C, r_t - 1.6) / _poly(_D, r_t - 1.6)
    x_far = _poly(_E, r_t - 5.0) / _poly(_F, r_t - 5.0)
    x_tail = np.where(near, x_near, x_far)
    x_tail = np.where(q < 0.0, -x_tail, x_tail)

    out = np.where(central, x_central, x_tail)
    if np.ndim(p) == 0:
        return float(out)
    return out


def norm_cdf(x):
    """Standard normal CDF via the complementary error function."""
    if np.ndim(x) == 0:
        return 0.5 * math.erfc(-float(x) / math.sqrt(2.0))
    arr = np.asarray(x, dtype=float)
    vec = np.vectorize(math.erfc, otypes=[float])
    return 0.5 * vec(-arr / math.sqrt(2.0))
