"""Closed-geodesic length spectra of surfaces given by Fuchsian generators.

A hyperbolic element of SL(2, R) with trace t translates its axis by
2 arccosh(|t|/2), the length of the corresponding closed geodesic on the
quotient surface.  Spectra are found by brute-force enumeration of
cyclically reduced words in the generators and their inverses, so they are
complete only up to the word length searched.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import hypmath

DET_TOL = 1e-9
TRACE_TOL = 1e-9
ELLIPTIC_TOL = 1e-6
BUCKET_TOL = 1e-6
RENORMALIZE_EVERY = 8


class ZeroLengthError(ValueError):
    """Parabolic element: the fixed point is a cusp, not a closed geodesic."""


class NotGeodesicError(ValueError):
    """Elliptic element: fixes an interior point, no axis."""


@dataclass(frozen=True)
class GroupElement:
    a: float
    b: float
    c: float
    d: float
    word: tuple = ()

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if not abs(det - 1.0) <= DET_TOL:
            raise ValueError(f"determinant {det!r} is not 1 within {DET_TOL}")

    @classmethod
    def from_matrix(cls, m, word=()):
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]), tuple(word))

    @property
    def matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def trace(self):
        return self.a + self.d

    def inverse(self):
        return GroupElement(self.d, -self.b, -self.c, self.a, tuple(-x for x in reversed(self.word)))

    def __matmul__(self, other):
        m = self.matrix @ other.matrix
        return GroupElement.from_matrix(m, self.word + other.word)


def translation_length(g):
    """Translation length 2 arccosh(|tr g|/2) of a hyperbolic element."""
    t = abs(g.trace)
    if abs(t - 2.0) <= TRACE_TOL:
        raise ZeroLengthError(f"parabolic element (|trace| = {t!r}) has no closed geodesic")
    if t < 2.0:
        raise NotGeodesicError(f"elliptic element (|trace| = {t!r}) has no axis")
    return 2.0 * math.acosh(0.5 * t)


@dataclass
class FuchsianGroup:
    generators: list
    genus: int
    name: str = "group"

    def __post_init__(self):
        if isinstance(self.genus, bool) or not isinstance(self.genus, int) or self.genus < 1:
            raise ValueError(f"declared genus must be an integer >= 1, got {self.genus!r}")
        gens = []
        for i, g in enumerate(self.generators):
            if not isinstance(g, GroupElement):
                g = GroupElement.from_matrix(g, (i + 1,))
            if abs(g.trace) < 2.0 - TRACE_TOL:
                raise ValueError(f"generator {i + 1} is elliptic (|trace| = {abs(g.trace)!r})")
            gens.append(g)
        self.generators = gens

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - {"name", "genus", "generators"}
        if unknown:
            raise ValueError(f"unknown group file keys: {sorted(unknown)}")
        return cls(generators=[np.asarray(m, dtype=float) for m in data["generators"]],
                   genus=data["genus"], name=data.get("name", "group"))

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        return {"name": self.name, "genus": self.genus,
                "generators": [g.matrix.tolist() for g in self.generators]}


def modular_torus():
    """Once-punctured torus: the commutator subgroup of SL(2, Z), free on two trace-3 generators."""
    return FuchsianGroup([[[1, 1], [1, 2]], [[1, -1], [-1, 2]]], genus=1, name="modular-torus")


# Regular octagon with interior angles pi/4, opposite sides paired (Bolza surface).
# In the disk, side k is paired by R(k pi/4) T R(-k pi/4), T = [[1+sqrt2, s], [s, 1+sqrt2]]
# with s = sqrt(2 + 2 sqrt2), R(t) = diag(e^{it/2}, e^{-it/2}); transported to the upper
# half-plane by z -> (z - i)/(z + i).  Relation: g1 g2^-1 g3 g4^-1 g1^-1 g2 g3^-1 g4 = 1.
_OCTAGON = (
    ((4.61158178930871, 0.0), (0.0, 0.216845335437475)),
    ((3.96798753640313, -1.55377397403004), (-1.55377397403004, 0.860439588343058)),
    ((2.41421356237310, -2.19736822693562), (-2.19736822693562, 2.41421356237310)),
    ((0.860439588343058, -1.55377397403004), (-1.55377397403004, 3.96798753640313)),
)


def octagon_genus2():
    return FuchsianGroup([np.array(m) for m in _OCTAGON], genus=2, name="octagon-g2")


PRESETS = {"modular-torus": modular_torus, "octagon-g2": octagon_genus2}


def preset(name):
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


@dataclass
class SpectrumEntry:
    length: float
    trace_abs: float
    representative_word: tuple
    multiplicity: int = 1
    primitive: bool = True

    @property
    def word_str(self):
        return format_word(self.representative_word)

    def to_dict(self):
        return {"length": self.length, "trace_abs": self.trace_abs,
                "word": self.word_str, "multiplicity": self.multiplicity, "primitive": self.primitive}


@dataclass
class Spectrum:
    """Enumeration result; iterates over its entries."""

    group: str
    L_max: float
    max_word_length: int
    entries: list = field(default_factory=list)
    words_examined: int = 0
    parabolic_words: int = 0
    warnings: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def lengths(self):
        return [e.length for e in self.entries]

    def to_dict(self):
        return {
            "group": self.group,
            "L_max": self.L_max,
            "max_word_length": self.max_word_length,
            "complete_up_to_word_length": self.max_word_length,
            "words_examined": self.words_examined,
            "parabolic_words": self.parabolic_words,
            "warnings": self.warnings,
            "entries": [e.to_dict() for e in self.entries],
        }


def format_word(word):
    return " ".join(str(x) for x in word)


def _letters(group):
    # letter 2i is generator i, letter 2i+1 its inverse; inverse letter of j is j ^ 1
    mats = []
    for g in group.generators:
        mats.append(g.matrix)
        mats.append(g.inverse().matrix)
    return np.array(mats).reshape(-1, 2, 2)


def _signed(letters):
    return tuple((int(j) // 2 + 1) * (1 if j % 2 == 0 else -1) for j in letters)


def canonical_cyclic_word(word):
    """Lexicographically least rotation of the word or of its inverse."""
    word = tuple(word)
    if not word:
        return word
    inv = tuple(-x for x in reversed(word))
    key = lambda w: tuple((abs(x), x < 0) for x in w)  # noqa: E731
    rots = [w[i:] + w[:i] for w in (word, inv) for i in range(len(w))]
    return min(rots, key=key)


def enumerate_spectrum(group, L_max, max_word_length=8):
    """Closed-geodesic lengths <= L_max from all cyclically reduced words up to ``max_word_length``.

    Words are grown breadth-first, one first letter at a time, as batched
    2x2 products.  Lengths within ``BUCKET_TOL`` are merged into one entry
    whose multiplicity is the number of distinct cyclic words (up to
    rotation and inversion) found for it.  An entry whose length is an
    integer multiple of a shorter entry's is marked non-primitive.
    """
    L_max = float(L_max)
    if not L_max > 0:
        raise ValueError(f"L_max must be positive, got {L_max!r}")
    if isinstance(max_word_length, bool) or not isinstance(max_word_length, int) or max_word_length < 1:
        raise ValueError(f"max_word_length must be an integer >= 1, got {max_word_length!r}")
    result = Spectrum(group=group.name, L_max=L_max, max_word_length=max_word_length)
    if not group.generators:
        return result
    mats = _letters(group)
    nl = len(mats)
    t_max = 2.0 * math.cosh(0.5 * (L_max + BUCKET_TOL))
    found = []  # (length, |trace|, letters)
    for first in range(nl):
        M = mats[first][None].copy()
        words = np.array([[first]], dtype=np.int16)
        for level in range(1, max_word_length + 1):
            if level > 1:
                # extend by every letter that does not cancel the last one
                ext = np.einsum("nij,ljk->nlik", M, mats)
                keep = np.arange(nl)[None, :] != (words[:, -1:] ^ 1)
                M = ext[keep]
                words = np.concatenate(
                    [np.repeat(words, nl, axis=0), np.tile(np.arange(nl, dtype=np.int16), len(words))[:, None]],
                    axis=1,
                )[keep.ravel()]
                if level % RENORMALIZE_EVERY == 0:
                    det = M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]
                    M /= np.sqrt(det)[:, None, None]
            cyc = words[:, -1] != (words[:, 0] ^ 1) if level > 1 else np.ones(len(words), dtype=bool)
            tr = np.abs(M[:, 0, 0] + M[:, 1, 1])
            result.words_examined += int(cyc.sum())
            result.parabolic_words += int(np.sum(cyc & (np.abs(tr - 2.0) <= TRACE_TOL)))
            for i in np.flatnonzero(cyc & (tr < 2.0 - ELLIPTIC_TOL)):
                result.warnings.append({"word": format_word(_signed(words[i])), "trace_abs": float(tr[i]),
                                        "kind": "elliptic"})
            hit = cyc & (tr > 2.0 + TRACE_TOL) & (tr <= t_max)
            for i in np.flatnonzero(hit):
                length = 2.0 * math.acosh(0.5 * float(tr[i]))
                if length <= L_max + BUCKET_TOL:
                    found.append((length, float(tr[i]), _signed(words[i])))
    result.entries = _bucket(found, L_max)
    return result


def _bucket(found, L_max):
    found.sort(key=lambda x: (x[0], len(x[2]), canonical_cyclic_word(x[2])))
    buckets = []
    for length, tr, word in found:
        if buckets and length - buckets[-1][0][0] <= BUCKET_TOL:
            buckets[-1].append((length, tr, word))
        else:
            buckets.append([(length, tr, word)])
    entries = []
    for b in buckets:
        length, tr, _ = b[0]
        if length > L_max:
            continue
        classes = {canonical_cyclic_word(w) for _, _, w in b}
        rep = min(classes, key=lambda w: (len(w), tuple((abs(x), x < 0) for x in w)))
        entries.append(SpectrumEntry(length, tr, rep, len(classes)))
    for e in entries:
        for shorter in entries:
            if shorter.length >= e.length:
                break
            m = round(e.length / shorter.length)
            if m >= 2 and abs(e.length - m * shorter.length) <= BUCKET_TOL * m:
                e.primitive = False
                break
    return entries


def collar_report(entries, L=1.75, genus=1):
    """Collar data for every entry of length <= L, checked against 2 pi (genus - 1)."""
    if isinstance(genus, bool) or not isinstance(genus, int) or genus < 1:
        raise hypmath.DomainError(f"genus must be an integer >= 1, got {genus!r}")
    bound = 2.0 * math.pi * (genus - 1)
    rows = []
    for e in entries:
        if e.length > L:
            continue
        S = hypmath.collar_halfwidth(e.length)
        area = hypmath.collar_area(e.length)
        rows.append({
            "length": e.length,
            "word": e.word_str,
            "multiplicity": e.multiplicity,
            "primitive": e.primitive,
            "halfwidth": S,
            "collar_area": area,
            "area_flag": area < 2.0,
            "halfwidth_flag": not S > 0.5 * e.length,
        })
    count = len(rows)
    return {
        "L": float(L),
        "genus": genus,
        "count": count,
        "count_with_multiplicity": sum(r["multiplicity"] for r in rows),
        "bound": bound,
        "bound_floor": math.floor(bound),
        "within_bound": count <= math.floor(bound),
        # counts primitive classes, not simple geodesics; exceeding the bound needs a manual look
        "review_required": count > math.floor(bound),
        "flags": any(r["area_flag"] or r["halfwidth_flag"] for r in rows),
        "entries": rows,
    }


SPECTRUM_COLUMNS = ("length", "trace_abs", "word", "multiplicity")
