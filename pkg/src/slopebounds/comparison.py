"""Riccati comparison for the geodesic curvature of equidistant curves.

Along a geodesic orthogonal to a geodesic boundary, with metric
du^2 + J(u)^2 dv^2 and Gaussian curvature K(u) <= -1, the Jacobi field J
solves J'' = -K J with J(0) = 1, J'(0) = 0, and the curvature of the
equidistant curve {u = c}, oriented as the boundary of {u >= c}, is
k = -J'/J, which solves the Riccati equation k' = K + k**2 with k(0) = 0.
The model solution for K = -1 is h(u) = -tanh(u); this module integrates
both equations and certifies k <= h on a grid.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .hypmath import comparison_h

DEFAULT_TOLERANCE = 1e-7
DEFAULT_STEPS = 100_000
BLOWUP = 1e6
# slack allowed when checking K <= -1 on the grid
CURVATURE_SLACK = 1e-12


class ProfileError(ValueError):
    """Curvature profile violates K <= -1 or is malformed."""

    def __init__(self, message, u=None):
        super().__init__(message)
        self.u = u


class IntegrationError(RuntimeError):
    def __init__(self, message, u=None):
        super().__init__(message)
        self.u = u


@dataclass(frozen=True)
class CurvatureProfile:
    """Gaussian curvature K(u) on [0, U], closed form or piecewise linear."""

    U: float
    func: Optional[Callable] = None
    u_samples: Optional[np.ndarray] = None
    K_samples: Optional[np.ndarray] = None
    name: str = "profile"

    def __post_init__(self):
        if not (math.isfinite(self.U) and self.U > 0):
            raise ProfileError(f"U must be a positive length, got {self.U!r}")
        if (self.func is None) == (self.u_samples is None):
            raise ProfileError("give exactly one of a callable or samples")

    @classmethod
    def constant(cls, value, U):
        value = float(value)
        return cls(U=float(U), func=lambda u: np.full_like(u, value), name=f"constant:{value:g}")

    @classmethod
    def from_callable(cls, K, U, name="callable"):
        return cls(U=float(U), func=K, name=name)

    @classmethod
    def from_samples(cls, u, K, name="samples"):
        u = np.asarray(u, dtype=float)
        K = np.asarray(K, dtype=float)
        if u.ndim != 1 or u.shape != K.shape or len(u) < 2:
            raise ProfileError("samples need matching 1-d u and K arrays with at least 2 rows")
        if u[0] != 0.0:
            raise ProfileError(f"samples must start at u = 0, got {u[0]!r}")
        if np.any(np.diff(u) <= 0):
            raise ProfileError("sample abscissae must be strictly increasing")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(K))):
            raise ProfileError("samples must be finite")
        return cls(U=float(u[-1]), u_samples=u, K_samples=K, name=name)

    def truncated(self, U):
        """Same curvature restricted to [0, U]."""
        U = float(U)
        if self.u_samples is not None and U > self.u_samples[-1]:
            raise ProfileError(f"{self.name}: samples end at u = {self.u_samples[-1]!r}, cannot extend to {U!r}")
        return CurvatureProfile(U=U, func=self.func, u_samples=self.u_samples, K_samples=self.K_samples,
                                name=self.name)

    @classmethod
    def from_file(cls, path):
        """Read a two-column (u, K) text file; '#' starts a comment."""
        path = Path(path)
        try:
            data = np.loadtxt(path, comments="#", ndmin=2)
        except ValueError as exc:
            raise ProfileError(f"{path}: cannot parse two-column (u, K) data: {exc}") from None
        if data.shape[1] != 2:
            raise ProfileError(f"{path}: expected 2 columns, got {data.shape[1]}")
        return cls.from_samples(data[:, 0], data[:, 1], name=path.name)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.func is None:
            return np.interp(u, self.u_samples, self.K_samples)
        K = np.asarray(self.func(u), dtype=float)
        if K.shape != u.shape:
            K = np.array([float(self.func(x)) for x in u.ravel()]).reshape(u.shape)
        return K

    def check(self, u):
        """Raise ProfileError naming the worst abscissa where K > -1 (or K is not finite)."""
        u = np.asarray(u, dtype=float)
        if self.u_samples is not None:
            mids = 0.5 * (self.u_samples[1:] + self.u_samples[:-1])
            extra = np.concatenate([self.u_samples, mids])
            u = np.sort(np.concatenate([u, extra[extra <= self.U]]))
        K = self(u)
        bad = ~np.isfinite(K) | (K > -1.0 + CURVATURE_SLACK)
        if np.any(bad):
            i = int(np.argmax(np.where(np.isfinite(K), K, np.inf)))
            raise ProfileError(
                f"{self.name}: curvature hypothesis K <= -1 fails at u = {u[i]:.17g} (K = {K[i]:.17g})",
                u=float(u[i]),
            )


def random_smooth_profile(seed, U=3.0, terms=3):
    """K(u) = -1 - (c + sum a_j sin(w_j u + p_j))**2 with seeded coefficients."""
    rng = np.random.default_rng(seed)
    c = rng.uniform(0.0, 1.0)
    a = rng.uniform(-0.5, 0.5, terms)
    w = rng.uniform(0.5, 4.0, terms)
    p = rng.uniform(0.0, 2 * math.pi, terms)

    def K(u):
        u = np.asarray(u, dtype=float)
        s = c + np.sum(a[:, None] * np.sin(w[:, None] * u.ravel()[None, :] + p[:, None]), axis=0)
        return (-1.0 - s * s).reshape(u.shape)

    return CurvatureProfile.from_callable(K, U, name=f"random:{seed}")


def _grid(profile, step):
    U = profile.U
    if step is None:
        step = U / DEFAULT_STEPS
    step = float(step)
    if not (step > 0):
        raise ValueError(f"step must be positive, got {step!r}")
    if step > U / 10 * (1 + 1e-12):
        raise ValueError(f"step {step!r} exceeds U/10 = {U / 10!r}")
    n = max(10, math.ceil(U / step - 1e-9))
    # half-step nodes carry the RK4 midpoint curvature values
    half = np.linspace(0.0, U, 2 * n + 1)
    profile.check(half)
    return half[::2], profile(half).tolist(), U / n


def integrate_riccati(profile, step=None):
    """RK4 integration of k' = K(u) + k**2, k(0) = 0.

    The step is shrunk so that an integer number of steps lands on U.
    Returns ``(u, k)`` arrays.
    """
    u, Kh, dt = _grid(profile, step)
    n = len(u) - 1
    k = [0.0] * (n + 1)
    y = 0.0
    half = 0.5 * dt
    for i in range(n):
        K0, K1, K2 = Kh[2 * i], Kh[2 * i + 1], Kh[2 * i + 2]
        s1 = K0 + y * y
        y2 = y + half * s1
        s2 = K1 + y2 * y2
        y3 = y + half * s2
        s3 = K1 + y3 * y3
        y4 = y + dt * s3
        s4 = K2 + y4 * y4
        y += dt / 6.0 * (s1 + 2.0 * s2 + 2.0 * s3 + s4)
        if not abs(y) <= BLOWUP:
            raise IntegrationError(f"Riccati solution blew up near u = {u[i + 1]:.17g}", u=float(u[i + 1]))
        k[i + 1] = y
    return u, np.array(k)


def integrate_jacobi(profile, step=None):
    """RK4 integration of J'' = -K J with J(0) = 1, J'(0) = 0.

    Returns ``(u, J, dJ)``.
    """
    u, Kh, dt = _grid(profile, step)
    n = len(u) - 1
    J = [1.0] * (n + 1)
    dJ = [0.0] * (n + 1)
    x, p = 1.0, 0.0
    half = 0.5 * dt
    for i in range(n):
        K0, K1, K2 = Kh[2 * i], Kh[2 * i + 1], Kh[2 * i + 2]
        a1, b1 = p, -K0 * x
        a2, b2 = p + half * b1, -K1 * (x + half * a1)
        a3, b3 = p + half * b2, -K1 * (x + half * a2)
        a4, b4 = p + dt * b3, -K2 * (x + dt * a3)
        x += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        p += dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        J[i + 1] = x
        dJ[i + 1] = p
    return u, np.array(J), np.array(dJ)


def _derivative_at(x, y, i):
    # three-point Lagrange derivative, second order on non-uniform grids
    n = len(x)
    if i == 0:
        j = (0, 1, 2)
    elif i == n - 1:
        j = (n - 3, n - 2, n - 1)
    else:
        j = (i - 1, i, i + 1)
    x0, x1, x2 = (x[m] for m in j)
    y0, y1, y2 = (y[m] for m in j)
    t = x[i]
    return (
        y0 * (2 * t - x1 - x2) / ((x0 - x1) * (x0 - x2))
        + y1 * (2 * t - x0 - x2) / ((x1 - x0) * (x1 - x2))
        + y2 * (2 * t - x0 - x1) / ((x2 - x0) * (x2 - x1))
    )


def vcurve_geodesic_curvature(u, J, index, orientation="outer"):
    """Curvature of the v-curve {u = u[index]} from sampled J.

    ``inner`` orients the curve as the boundary of {0 <= u <= c} and gives
    +J_u/J; ``outer`` orients it as the boundary of {u >= c} and gives -J_u/J.
    J_u comes from second-order differences (one-sided at the ends).
    """
    u = np.asarray(u, dtype=float)
    J = np.asarray(J, dtype=float)
    if len(u) < 3 or len(J) != len(u):
        raise ValueError("need at least 3 matching samples of u and J")
    n = len(u)
    if not -n <= index < n:
        raise IndexError(f"grid index {index} out of range for {n} samples")
    index %= n
    kappa = _derivative_at(u, J, index) / J[index]
    if orientation == "inner":
        return float(kappa)
    if orientation == "outer":
        return float(-kappa)
    raise ValueError(f"orientation must be 'inner' or 'outer', got {orientation!r}")


def vcurve_geodesic_curvatures(u, J, orientation="outer"):
    """Vectorised :func:`vcurve_geodesic_curvature` over the whole grid."""
    u = np.asarray(u, dtype=float)
    J = np.asarray(J, dtype=float)
    if len(u) < 3 or len(J) != len(u):
        raise ValueError("need at least 3 matching samples of u and J")
    kappa = np.gradient(J, u, edge_order=2) / J
    if orientation == "inner":
        return kappa
    if orientation == "outer":
        return -kappa
    raise ValueError(f"orientation must be 'inner' or 'outer', got {orientation!r}")


def general_geodesic_curvature(E, G, curve, t, dt=1e-4):
    """Geodesic curvature of ``curve`` at parameter t in the metric E du^2 + G dv^2.

    Uses the Liouville form

        (phi' + (G_u v' - E_v u') / (2 sqrt(E G))) / sqrt(E u'^2 + G v'^2)

    where phi is the angle from the u-curves to the tangent.  E and G are
    callables of (u, v); curve maps t to (u, v).  All derivatives are
    central differences with spacing dt.
    """

    def tangent(s):
        u1, v1 = curve(s + dt)
        u0, v0 = curve(s - dt)
        return (u1 - u0) / (2 * dt), (v1 - v0) / (2 * dt)

    def metric(u, v):
        e, g = float(E(u, v)), float(G(u, v))
        if not (e > 0 and g > 0):
            raise ValueError(f"metric not positive definite at (u, v) = ({u}, {v}): E = {e}, G = {g}")
        return e, g

    def angle(s):
        du, dv = tangent(s)
        e, g = metric(*curve(s))
        return math.atan2(math.sqrt(g) * dv, math.sqrt(e) * du)

    u, v = curve(t)
    e, g = metric(u, v)
    du, dv = tangent(t)
    speed2 = e * du * du + g * dv * dv
    if not speed2 > 1e-24:
        raise ValueError(f"curve is degenerate at t = {t}")
    dphi = angle(t + dt) - angle(t - dt)
    dphi = (dphi + math.pi) % (2 * math.pi) - math.pi
    dphi /= 2 * dt
    G_u = (G(u + dt, v) - G(u - dt, v)) / (2 * dt)
    E_v = (E(u, v + dt) - E(u, v - dt)) / (2 * dt)
    return (dphi + (G_u * dv - E_v * du) / (2 * math.sqrt(e * g))) / math.sqrt(speed2)


@dataclass
class ComparisonReport:
    profile: str
    U: float
    step: float
    tolerance: float
    grid: np.ndarray = field(repr=False)
    kg: np.ndarray = field(repr=False)
    h: np.ndarray = field(repr=False)
    J: np.ndarray = field(repr=False)
    margin: float = math.nan
    certified: bool = False
    kg_max: float = math.nan
    # max over interior points of (k-h)' - (k-h)(k+h); should be <= tolerance
    riccati_residual: float = math.nan
    riccati_inequality_ok: bool = False
    # min of J'(u) - int_0^u J
    jacobi_margin: float = math.nan
    jacobi_ok: bool = False
    # max |k + J'/J|
    consistency: float = math.nan

    def to_dict(self, max_points=1001):
        n = len(self.grid)
        stride = max(1, math.ceil((n - 1) / (max_points - 1))) if n > 1 else 1
        idx = np.arange(0, n, stride)
        if idx[-1] != n - 1:
            idx = np.append(idx, n - 1)
        out = {k: getattr(self, k) for k in (
            "profile", "U", "step", "tolerance", "margin", "certified", "kg_max",
            "riccati_residual", "riccati_inequality_ok", "jacobi_margin", "jacobi_ok", "consistency",
        )}
        out["samples"] = {
            "stride": int(stride),
            "u": self.grid[idx].tolist(),
            "kg": self.kg[idx].tolist(),
            "h": self.h[idx].tolist(),
            "J": self.J[idx].tolist(),
        }
        return out


def verify_comparison(profile, step=None, tolerance=DEFAULT_TOLERANCE):
    """Integrate k and J for ``profile`` and certify k(u) <= h(u) + tolerance on the grid."""
    u, k = integrate_riccati(profile, step)
    _, J, dJ = integrate_jacobi(profile, step)
    dt = float(u[1] - u[0])
    h = np.array([comparison_h(x) for x in u])

    diff = k - h
    margin = float(np.min(h - k))
    # (k-h)' <= (k-h)(k+h), derivative by central differences on the grid
    ddiff = (diff[2:] - diff[:-2]) / (2 * dt)
    residual = float(np.max(ddiff - diff[1:-1] * (k[1:-1] + h[1:-1])))

    # J'(u) >= int_0^u J by the trapezoid rule; quadrature error is O(dt^2)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * dt * (J[1:] + J[:-1]))])
    jac = dJ - cum
    jac_tol = tolerance + dt * dt * float(np.max(np.abs(J))) * profile.U

    return ComparisonReport(
        profile=profile.name,
        U=profile.U,
        step=dt,
        tolerance=float(tolerance),
        grid=u,
        kg=k,
        h=h,
        J=J,
        margin=margin,
        certified=bool(margin >= -tolerance),
        kg_max=float(np.max(k)),
        riccati_residual=residual,
        riccati_inequality_ok=bool(residual <= tolerance),
        jacobi_margin=float(np.min(jac)),
        jacobi_ok=bool(np.min(jac) >= -jac_tol and np.min(dJ) >= -tolerance),
        consistency=float(np.max(np.abs(k + dJ / J))),
    )
