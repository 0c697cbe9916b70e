"""Separated point sets in the hyperbolic plane (Poincare disk model).

Greedy random packings of a disk D(R) by points at mutual distance >= L,
audited against the count bound A(R+L)/A(L) and against the packing
bound A(R+L/2)/A(L/2) that disjoint L/2-balls inside D(R+L/2) give.

Random numbers come from numpy's Philox4x64-10 counter-based generator
with ``key = seed`` and zero counter.  Candidates are drawn in fixed
batches of ``BATCH`` (t, theta) pairs, t and theta uniform on [0, 1),
radius arccosh(1 + t (cosh R - 1)), angle 2 pi theta.  Within a batch
candidates are accepted or rejected strictly in order, so the outcome is
the same as one-at-a-time sampling from that stream.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .hypmath import AREA_CONVENTIONS, PAPER_VARIANT, TRUE_AREA, DomainError, log_disk_area

BOUNDARY_GUARD = 1e-12
SEPARATION_SLACK = 1e-9
BATCH = 512
MAX_RADIUS = 10.0


def _check_point(p):
    p = np.asarray(p, dtype=float)
    if p.shape != (2,) or not np.all(np.isfinite(p)):
        raise DomainError(f"expected a finite point (x, y), got {p!r}")
    if math.hypot(p[0], p[1]) >= 1.0 - BOUNDARY_GUARD:
        raise DomainError(f"point {tuple(p)} is too close to the ideal boundary")
    return p


def hyp_distance(p, q):
    """Hyperbolic distance between two points of the Poincare disk.

    Uses 2 asinh(|p-q| / sqrt((1-|p|^2)(1-|q|^2))), which equals
    arccosh(1 + 2|p-q|^2/((1-|p|^2)(1-|q|^2))) and is accurate for close points.
    """
    p = _check_point(p)
    q = _check_point(q)
    dx, dy = p[0] - q[0], p[1] - q[1]
    a = 1.0 - (p[0] * p[0] + p[1] * p[1])
    b = 1.0 - (q[0] * q[0] + q[1] * q[1])
    return 2.0 * math.asinh(math.hypot(dx, dy) / math.sqrt(a * b))


def _distances(p, pts):
    # hyperbolic distance from one point (array of 2) to many (n x 2)
    d = pts - p
    a = 1.0 - (p[0] * p[0] + p[1] * p[1])
    b = 1.0 - np.einsum("ij,ij->i", pts, pts)
    return 2.0 * np.arcsinh(np.hypot(d[:, 0], d[:, 1]) / np.sqrt(a * b))


def pairwise_distances(points):
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    out = np.zeros((len(pts), len(pts)))
    for i in range(len(pts)):
        out[i] = _distances(pts[i], pts)
    return out


def _separated(cand, pts, thresh):
    # d(c, p) >= L  <=>  |c-p|^2 >= sinh^2(L/2) (1-|c|^2)(1-|p|^2); one flag per candidate
    a = 1.0 - np.einsum("ij,ij->i", cand, cand)
    b = 1.0 - np.einsum("ij,ij->i", pts, pts)
    diff = cand[:, None, :] - pts[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    return np.all(sq >= thresh * np.outer(a, b), axis=1)


def make_rng(seed):
    return np.random.Generator(np.random.Philox(key=int(seed) & 0xFFFFFFFFFFFFFFFF))


def sample_disk(rng, R, size):
    """Points uniform in hyperbolic area in D(R); returns (points, radii)."""
    draw = rng.random((size, 2))
    r = np.arccosh(1.0 + draw[:, 0] * (math.cosh(R) - 1.0))
    rho = np.tanh(0.5 * r)
    theta = 2.0 * math.pi * draw[:, 1]
    return np.column_stack([rho * np.cos(theta), rho * np.sin(theta)]), r


@dataclass
class PackingExperiment:
    R: float
    L: float
    seed: int
    attempts: int
    points: np.ndarray = field(repr=False)
    count: int = 0
    bound_paper: float = math.nan
    bound_rigorous: float = math.nan
    convention: str = PAPER_VARIANT

    def to_dict(self, flags=None):
        return {
            "R": self.R,
            "L": self.L,
            "seed": self.seed,
            "attempts": self.attempts,
            "points": self.points.tolist(),
            "count": self.count,
            "bound_paper": self.bound_paper,
            "bound_rigorous": self.bound_rigorous,
            "flags": flags if flags is not None else audit_bound(self, self.convention)["flags"],
        }


def paper_bound(R, L, convention=PAPER_VARIANT):
    return math.exp(log_disk_area(R + L, convention) - log_disk_area(L, convention))


def rigorous_bound(R, L):
    return math.exp(log_disk_area(R + 0.5 * L, TRUE_AREA) - log_disk_area(0.5 * L, TRUE_AREA))


def greedy_pack(R, L, seed=0, attempts=100_000, convention=PAPER_VARIANT):
    """Greedy random L-separated set in D(R).

    Candidates are accepted when at distance >= L from every accepted
    point; sampling stops after ``attempts`` consecutive rejections.
    """
    R, L = float(R), float(L)
    if not (0 < R <= MAX_RADIUS):
        raise DomainError(f"R must lie in (0, {MAX_RADIUS}], got {R!r}")
    if not L > 0:
        raise DomainError(f"L must be positive, got {L!r}")
    if attempts < 1:
        raise ValueError("attempts must be >= 1")
    if convention not in AREA_CONVENTIONS:
        raise ValueError(f"unknown area convention {convention!r}")
    rng = make_rng(seed)
    thresh = math.sinh(0.5 * L) ** 2
    cap = 64
    pts = np.empty((cap, 2))
    n = 0
    misses = 0
    while misses < attempts:
        cand, _ = sample_disk(rng, R, BATCH)
        if n:
            # prefilter against points accepted before this batch
            ok = _separated(cand, pts[:n], thresh)
        else:
            ok = np.ones(BATCH, dtype=bool)
        start = n
        pos = 0
        for i in np.flatnonzero(ok):
            # candidates pos..i-1 failed the prefilter
            if misses + (i - pos) >= attempts:
                misses = attempts
                break
            misses += i - pos
            pos = i + 1
            if n == start or _separated(cand[i:i + 1], pts[start:n], thresh)[0]:
                if n == cap:
                    cap *= 2
                    pts = np.resize(pts, (cap, 2))
                pts[n] = cand[i]
                n += 1
                misses = 0
            else:
                misses += 1
                if misses >= attempts:
                    break
        else:
            misses = min(attempts, misses + BATCH - pos)
    points = pts[:n].copy()
    return PackingExperiment(
        R=R, L=L, seed=int(seed), attempts=int(attempts), points=points, count=n,
        bound_paper=paper_bound(R, L, convention), bound_rigorous=rigorous_bound(R, L),
        convention=convention,
    )


def check_experiment(exp):
    """Re-verify separation and containment in O(count^2); returns (min_separation, max_radius)."""
    pts = exp.points
    origin = np.zeros(2)
    max_r = float(np.max(_distances(origin, pts))) if len(pts) else 0.0
    if len(pts) < 2:
        return math.inf, max_r
    D = pairwise_distances(pts)
    np.fill_diagonal(D, math.inf)
    return float(D.min()), max_r


def audit_bound(exp, convention=PAPER_VARIANT):
    """Compare an experiment's count with both count bounds.

    The packing-bound flag marks a genuine error; the other flag is
    informational.
    """
    bp = paper_bound(exp.R, exp.L, convention)
    br = rigorous_bound(exp.R, exp.L)
    min_sep, max_r = check_experiment(exp)
    flags = {
        "rigorous_violation": exp.count > math.floor(br),
        "paper_violation": exp.count > math.floor(bp),
        "separation_ok": min_sep >= exp.L - SEPARATION_SLACK,
        "containment_ok": max_r <= exp.R + SEPARATION_SLACK,
    }
    return {
        "R": exp.R,
        "L": exp.L,
        "seed": exp.seed,
        "count": exp.count,
        "convention": convention,
        "bound_paper": bp,
        "bound_rigorous": br,
        "min_separation": min_sep if math.isfinite(min_sep) else None,
        "flags": flags,
    }


def summarize(audits):
    """Aggregate audits of one (R, L) campaign."""
    if not audits:
        return {}
    counts = [a["count"] for a in audits]
    return {
        "R": audits[0]["R"],
        "L": audits[0]["L"],
        "experiments": len(audits),
        "max_count": max(counts),
        "min_count": min(counts),
        "bound_paper": audits[0]["bound_paper"],
        "bound_rigorous": audits[0]["bound_rigorous"],
        "rigorous_violations": sum(a["flags"]["rigorous_violation"] for a in audits),
        "paper_violations": sum(a["flags"]["paper_violation"] for a in audits),
        "paper_violation_seeds": [a["seed"] for a in audits if a["flags"]["paper_violation"]],
    }
