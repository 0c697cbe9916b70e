"""Closed-form hyperbolic-plane quantities.

Every function here is a pure scalar map evaluated in double precision.
Lengths are hyperbolic lengths in the curvature -1 plane.
"""

import math
import operator

# Inputs closer than this to an open domain boundary are rejected, not clamped.
POLE_GUARD = 1e-12

TRUE_AREA = "true_area"
PAPER_VARIANT = "paper_variant"
AREA_CONVENTIONS = (TRUE_AREA, PAPER_VARIANT)


class DomainError(ValueError):
    """An argument lies outside the domain of a closed-form formula."""


def _finite(name, x):
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


def comparison_h(u):
    """Solution of h' = -1 + h**2 with h(0) = 0, i.e. -tanh(u).

    Evaluated through the exponential quotient (e^-u - e^u)/(e^-u + e^u),
    rewritten with e^{-2u} so large u does not overflow.
    """
    u = _finite("u", u)
    if u < 0:
        raise DomainError(f"u must be >= 0, got {u!r}")
    q = math.exp(-2.0 * u)
    return (q - 1.0) / (q + 1.0)


def disk_area(R, convention=TRUE_AREA):
    """Area of a hyperbolic disk of radius ``R``.

    ``true_area`` is 4*pi*sinh(R/2)**2 = 2*pi*(cosh R - 1).
    ``paper_variant`` is 4*pi/(1 - tanh(R/2)**2) = 2*pi*(cosh R + 1), which
    exceeds the true area by exactly 4*pi.
    """
    R = _finite("R", R)
    if R < 0:
        raise DomainError(f"R must be >= 0, got {R!r}")
    if convention == TRUE_AREA:
        return 4.0 * math.pi * math.sinh(0.5 * R) ** 2
    if convention == PAPER_VARIANT:
        return 4.0 * math.pi * math.cosh(0.5 * R) ** 2
    raise ValueError(f"unknown area convention {convention!r}")


def log_disk_area(R, convention=TRUE_AREA):
    """Natural log of :func:`disk_area`, finite for radii where the area overflows."""
    R = _finite("R", R)
    if R < 0:
        raise DomainError(f"R must be >= 0, got {R!r}")
    x = 0.5 * R
    if convention == TRUE_AREA:
        if x == 0:
            return -math.inf
        # log sinh x = x + log1p(-e^{-2x}) - log 2
        log_s = x + math.log1p(-math.exp(-2.0 * x)) - math.log(2.0)
    elif convention == PAPER_VARIANT:
        log_s = x + math.log1p(math.exp(-2.0 * x)) - math.log(2.0)
    else:
        raise ValueError(f"unknown area convention {convention!r}")
    return math.log(4.0 * math.pi) + 2.0 * log_s


def collar_halfwidth(x):
    """Half-width arcsinh(1/sinh(x/2)) of the standard collar about a closed geodesic of length x."""
    x = _finite("x", x)
    if x < POLE_GUARD:
        raise DomainError(f"geodesic length must be > 0, got {x!r}")
    return math.asinh(1.0 / math.sinh(0.5 * x))


def collar_area(d_c):
    """Area 2*d_c*sinh(S(d_c)) = 2*d_c/sinh(d_c/2) of the collar about a geodesic of length d_c."""
    d_c = _finite("d_c", d_c)
    if d_c < POLE_GUARD:
        raise DomainError(f"geodesic length must be > 0, got {d_c!r}")
    return 2.0 * d_c / math.sinh(0.5 * d_c)


def basmajian_width(g_boundary):
    """Lower bound (1/4) ln((g+1)/(g-1)) on the collar width of a totally geodesic boundary of genus g."""
    try:
        g = operator.index(g_boundary)
    except TypeError:
        raise DomainError(f"boundary genus must be an integer, got {g_boundary!r}") from None
    if g <= 1:
        raise DomainError(
            f"boundary genus must be >= 2 (pole at genus 1; torus components need an external N(g)), got {g}"
        )
    return 0.25 * math.log((g + 1) / (g - 1))
