"""Explicit bounds on lengths and numbers of boundary slopes.

Pipeline for a 3-manifold whose totally geodesic boundary has genus g_b:

* collar width U* = (1/4) ln((g_b+1)/(g_b-1))
* slope length d <= 2 pi (2g + n - 2)/(-h n) <= 2 pi (2g+1)/tanh U*, h = -tanh U*
* lattice count A(R + L)/A(L) with R = 2 pi (2g+1)/tanh U*
* short-geodesic count 2 pi (g_b - 1)
* n(g, g_b) = lattice count + short-geodesic count

Counts grow like e^R, so every count is also carried as a natural log;
the plain float is ``inf`` once it overflows.
"""

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Optional

from .hypmath import (
    AREA_CONVENTIONS,
    PAPER_VARIANT,
    TRUE_AREA,
    DomainError,
    basmajian_width,
    comparison_h,
    log_disk_area,
)

DEFAULT_L = 1.75
MIN_L = 1e-6
TWO_PI = 2.0 * math.pi


class ConfigError(ValueError):
    """Inconsistent bound configuration (e.g. torus components without N(g))."""


def _exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _floor(x):
    return math.floor(x) if math.isfinite(x) else None


def _logsumexp(logs):
    logs = [x for x in logs if x != -math.inf]
    if not logs:
        return -math.inf
    m = max(logs)
    return m + math.log(sum(math.exp(x - m) for x in logs))


def _log(x):
    return math.log(x) if x > 0 else -math.inf


def _check_genus(g):
    if isinstance(g, bool) or not isinstance(g, int) or g < 0:
        raise DomainError(f"surface genus must be a non-negative integer, got {g!r}")


def _check_L(L):
    L = float(L)
    if not (math.isfinite(L) and L >= MIN_L):
        raise DomainError(f"length cutoff L must be >= {MIN_L}, got {L!r}")
    return L


def _check_width(U_star):
    U_star = float(U_star)
    if not (math.isfinite(U_star) and U_star > 0):
        raise DomainError(f"collar width must be positive and finite, got {U_star!r}")
    return U_star


def slope_length_bound(g, n, h_val):
    """Upper bounds on the length of a boundary slope.

    Returns ``(detailed, simplified)`` with detailed = 2 pi (2g+n-2)/(-h n)
    and simplified = 2 pi (2g+1)/(-h).
    """
    _check_genus(g)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DomainError(f"boundary count n must be an integer >= 1, got {n!r}")
    if not h_val < 0:
        raise DomainError(f"h must be negative, got {h_val!r}")
    if 2 * g + n - 2 <= 0:
        raise DomainError(f"Euler characteristic 2 - 2g - n = {2 - 2 * g - n} is not negative (disk or annulus)")
    detailed = TWO_PI * (2 * g + n - 2) / (-h_val * n)
    simplified = TWO_PI * (2 * g + 1) / (-h_val)
    return detailed, simplified


class LengthWindow(NamedTuple):
    lower: float
    upper: float
    empty: bool


def length_window(g, U_star, L=DEFAULT_L):
    """Window L <= d <= 2 pi (2g+1)/tanh U* for slopes no shorter than L."""
    _check_genus(g)
    U_star = _check_width(U_star)
    L = float(L)
    if not L > 0:
        raise DomainError(f"L must be positive, got {L!r}")
    upper = TWO_PI * (2 * g + 1) / math.tanh(U_star)
    return LengthWindow(L, upper, L > upper)


def lattice_radius(g, U_star):
    return TWO_PI * (2 * g + 1) / math.tanh(U_star)


class LatticeBound(NamedTuple):
    R: float
    ratio: float
    log_ratio: float
    rigorous: float
    log_rigorous: float
    convention: str


def lattice_count_bound(g, U_star, L=DEFAULT_L, convention=PAPER_VARIANT):
    """Count bound A(R+L)/A(L) for L-separated points in a disk of radius R.

    R = 2 pi (2g+1)/tanh U*.  Also returns the packing bound
    A(R+L/2)/A(L/2) (true areas), which follows from disjointness of the
    L/2-balls about the points.
    """
    _check_genus(g)
    U_star = _check_width(U_star)
    L = _check_L(L)
    if convention not in AREA_CONVENTIONS:
        raise ValueError(f"unknown area convention {convention!r}")
    R = lattice_radius(g, U_star)
    log_ratio = log_disk_area(R + L, convention) - log_disk_area(L, convention)
    log_rig = log_disk_area(R + 0.5 * L, TRUE_AREA) - log_disk_area(0.5 * L, TRUE_AREA)
    return LatticeBound(R, _exp(log_ratio), log_ratio, _exp(log_rig), log_rig, convention)


def collar_count_bound(genus_F):
    """Bound 2 pi (genus - 1) on the number of closed geodesics of length <= L."""
    if isinstance(genus_F, bool) or not isinstance(genus_F, int) or genus_F < 1:
        raise DomainError(f"genus must be an integer >= 1, got {genus_F!r}")
    return TWO_PI * (genus_F - 1)


@dataclass
class BoundInput:
    g: int
    g_boundary: Optional[int] = None
    n: Optional[int] = None
    U_star: Optional[float] = None
    L: float = DEFAULT_L
    N_torus: Optional[int] = None
    components: Optional[list] = None  # genera >= 2 of the non-torus components
    torus_count: int = 0
    convention: str = PAPER_VARIANT

    def validate(self):
        _check_genus(self.g)
        _check_L(self.L)
        if self.convention not in AREA_CONVENTIONS:
            raise ConfigError(f"unknown area convention {self.convention!r}")
        if self.torus_count < 0:
            raise ConfigError("torus count must be >= 0")
        if self.torus_count > 0 and self.N_torus is None:
            raise ConfigError(
                f"{self.torus_count} torus component(s) need the external per-torus slope count N(g)"
            )
        if self.N_torus is not None and (isinstance(self.N_torus, bool) or not isinstance(self.N_torus, int)
                                         or self.N_torus < 0):
            raise ConfigError(f"N(g) must be a non-negative integer, got {self.N_torus!r}")
        if self.components is None:
            if self.U_star is None and (self.g_boundary is None or self.g_boundary < 2):
                raise DomainError(
                    f"boundary genus must be >= 2 without a collar-width override, got {self.g_boundary!r}"
                    " (pole at genus 1; give torus components with N(g) instead)"
                )
        else:
            for gi in self.components:
                if isinstance(gi, bool) or not isinstance(gi, int) or gi < 2:
                    raise DomainError(f"non-torus component genus must be an integer >= 2, got {gi!r}")
        return self


@dataclass
class BoundReport:
    g: int
    L: float
    area_convention: str
    g_boundary: Optional[int] = None
    n: Optional[int] = None
    U_star: Optional[float] = None
    U_star_source: Optional[str] = None
    h_at_U: Optional[float] = None
    d_max_detailed: Optional[float] = None
    d_max: Optional[float] = None
    R: Optional[float] = None
    count_lattice: Optional[float] = None
    count_lattice_floor: Optional[int] = None
    log_count_lattice: Optional[float] = None
    count_lattice_true_area: Optional[float] = None
    log_count_lattice_true_area: Optional[float] = None
    count_lattice_rigorous: Optional[float] = None
    log_count_lattice_rigorous: Optional[float] = None
    count_collar: Optional[float] = None
    count_collar_floor: Optional[int] = None
    total: float = 0.0
    total_floor: Optional[int] = 0
    log_total: float = -math.inf
    torus_count: int = 0
    N_torus: Optional[int] = None
    per_component: list = field(default_factory=list)
    readings: dict = field(default_factory=dict)
    paper_claim: Optional[dict] = None

    def to_dict(self):
        return asdict(self)


_READINGS = {
    "lattice_radius": "2*pi*(2g+1)/tanh(U*)",
    "alternative_denominator": "tan(U*)",
    "log": "natural",
}


def combined_bound(g, g_boundary=None, L=DEFAULT_L, convention=PAPER_VARIANT, n=None, U_star=None):
    """n(g, g_b): lattice count plus short-geodesic count, with the full trace.

    ``U_star`` overrides the width derived from ``g_boundary``; with an
    override and no boundary genus only the lattice term is reported.
    """
    BoundInput(g=g, g_boundary=g_boundary, n=n, U_star=U_star, L=L, convention=convention).validate()
    if U_star is None:
        U_star, source = basmajian_width(g_boundary), "basmajian"
    else:
        U_star, source = _check_width(U_star), "override"
    h = comparison_h(U_star)
    detailed = None
    if n is not None:
        detailed, simplified = slope_length_bound(g, n, h)
    else:
        simplified = TWO_PI * (2 * g + 1) / (-h)
    lat = lattice_count_bound(g, U_star, L, convention)
    true = lattice_count_bound(g, U_star, L, TRUE_AREA)
    logs = [lat.log_ratio]
    collar = collar_floor = None
    if g_boundary is not None:
        collar = collar_count_bound(g_boundary)
        collar_floor = _floor(collar)
        logs.append(_log(collar))
    log_total = _logsumexp(logs)
    total = lat.ratio + (collar or 0.0)
    readings = dict(_READINGS)
    readings["lattice_radius_tan_reading"] = (
        TWO_PI * (2 * g + 1) / math.tan(U_star) if U_star < math.pi / 2 else None
    )
    return BoundReport(
        g=g,
        L=float(L),
        area_convention=convention,
        g_boundary=g_boundary,
        n=n,
        U_star=U_star,
        U_star_source=source,
        h_at_U=h,
        d_max_detailed=detailed,
        d_max=simplified,
        R=lat.R,
        count_lattice=lat.ratio,
        count_lattice_floor=_floor(lat.ratio),
        log_count_lattice=lat.log_ratio,
        count_lattice_true_area=true.ratio,
        log_count_lattice_true_area=true.log_ratio,
        count_lattice_rigorous=lat.rigorous,
        log_count_lattice_rigorous=lat.log_rigorous,
        count_collar=collar,
        count_collar_floor=collar_floor,
        total=total,
        total_floor=_floor(total),
        log_total=log_total,
        readings=readings,
    )


def _claim(g, components, torus_count, N_torus, L, convention, log_parts):
    # the closing claim sum_i n(g, g_i) + N(g) <= n(g, g_b), compared in log space
    g_b = sum(components) + torus_count
    if g_b < 2:
        return {"g_boundary": g_b, "evaluable": False, "holds": None, "log_lhs": None, "log_rhs": None}
    N = N_torus or 0
    log_lhs = _logsumexp(log_parts + [_log(N)])
    log_rhs = combined_bound(g, g_b, L, convention).log_total
    return {
        "g_boundary": g_b,
        "evaluable": True,
        "N_torus_assumed": N,
        "log_lhs": log_lhs,
        "log_rhs": log_rhs,
        "holds": bool(log_lhs <= log_rhs),
    }


def multi_component_bound(inp):
    """Sum of n(g, g_i) over non-torus components plus k N(g) for k tori."""
    if inp.components is None:
        inp = BoundInput(**{**asdict(inp), "components": [inp.g_boundary] if inp.g_boundary else []})
    inp.validate()
    parts = [combined_bound(inp.g, gi, inp.L, inp.convention, n=inp.n) for gi in inp.components]
    k, N = inp.torus_count, inp.N_torus
    torus_total = k * N if k else 0
    log_parts = [p.log_total for p in parts]
    log_total = _logsumexp(log_parts + [_log(torus_total)])
    total = sum(p.total for p in parts) + torus_total
    per_component = [p.to_dict() for p in parts]
    if k:
        per_component.append({"torus_count": k, "N_torus": N, "total": float(torus_total)})
    claim = _claim(inp.g, inp.components, k, N, inp.L, inp.convention, log_parts)
    if k == 0 and len(parts) == 1:
        report = parts[0]
        report.per_component = per_component
        report.paper_claim = claim
        return report
    return BoundReport(
        g=inp.g,
        L=float(inp.L),
        area_convention=inp.convention,
        g_boundary=sum(inp.components) + k,
        n=inp.n,
        total=float(total),
        total_floor=_floor(total),
        log_total=log_total,
        torus_count=k,
        N_torus=N,
        per_component=per_component,
        readings=dict(_READINGS),
        paper_claim=claim,
    )


def paper_claim_sweep(max_g=5, max_component_genus=5, max_components=3, max_tori=1, N_torus=0,
                      L=DEFAULT_L, convention=PAPER_VARIANT):
    """Evaluate sum n(g, g_i) + N(g) <= n(g, g_b) over a grid of boundary configurations.

    The verdicts are recorded, not asserted.
    """
    rows = []
    genera = range(2, max_component_genus + 1)
    for g in range(max_g + 1):
        for m in range(0, max_components + 1):
            for comps in itertools.combinations_with_replacement(genera, m):
                for k in range(0, max_tori + 1):
                    if m + k == 0:
                        continue
                    inp = BoundInput(g=g, components=list(comps), torus_count=k,
                                     N_torus=N_torus, L=L, convention=convention)
                    claim = multi_component_bound(inp).paper_claim
                    rows.append({"g": g, "components": list(comps), "torus_count": k, **claim})
    evaluable = [r for r in rows if r["evaluable"]]
    return {
        "N_torus": N_torus,
        "L": L,
        "convention": convention,
        "evaluated": len(evaluable),
        "violations": sum(1 for r in evaluable if not r["holds"]),
        "all_hold": all(r["holds"] for r in evaluable),
        "rows": rows,
    }


SWEEP_COLUMNS = (
    "g", "g_boundary", "U_star", "h_at_U", "d_max", "R",
    "count_lattice", "log_count_lattice", "count_lattice_floor",
    "count_collar", "count_collar_floor", "total", "log_total", "total_floor",
)


def sweep_table(g_values, gb_values, L=DEFAULT_L, convention=PAPER_VARIANT):
    """One row per (g, g_b) pair for documentation tables."""
    rows = []
    for g in g_values:
        for gb in gb_values:
            d = combined_bound(g, gb, L, convention).to_dict()
            rows.append({c: d[c] for c in SWEEP_COLUMNS})
    return rows
