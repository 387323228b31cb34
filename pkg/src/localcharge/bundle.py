"""Rank-2 bundles on Z_k given by splitting type j and extension class p.

Conventions. Canonical charts are U = (z, u) and V = (xi, v) with
xi = 1/z, v = z^k u. A bundle is the transition matrix

    T = [[z^j, p], [0, z^-j]]

acting on frame coordinates from U to V, i.e. a section with U-coordinates
(f1, f2) has V-coordinates T.(f1, f2) = (z^j f1 + p f2, z^-j f2). In this
direction the sub line bundle is O(-j) and the quotient O(j), and p only
matters modulo z^j.(U-holomorphic) + z^-j.(V-holomorphic), which leaves
exactly the terms k*l - j + 1 <= i <= j - 1.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

from .series import LaurentPoly, MonomialIndex


class SpecError(ValueError):
    """Malformed or inconsistent bundle data."""


@dataclass(frozen=True, order=True)
class Term:
    i: int
    l: int
    c: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        if self.c == 0:
            raise SpecError("extension class terms must have nonzero coefficient")

    @property
    def monomial(self) -> MonomialIndex:
        return MonomialIndex(self.i, self.l)


def _term_order(t: Term):
    return (t.l, t.i)


@dataclass(frozen=True)
class ExtensionClass:
    """Finite sum of c * z^i u^l, all l >= 1, sorted by (l, i)."""

    terms: Tuple[Term, ...] = ()

    def __post_init__(self):
        terms = tuple(sorted(self.terms, key=_term_order))
        seen = set()
        for t in terms:
            if not isinstance(t, Term):
                raise SpecError(f"not a Term: {t!r}")
            if t.l < 1:
                raise SpecError(f"term z^{t.i}*u^{t.l} has u-degree < 1; it would change the splitting type")
            if (t.i, t.l) in seen:
                raise SpecError(f"duplicate monomial z^{t.i}*u^{t.l}")
            seen.add((t.i, t.l))
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_terms(cls, items: Iterable) -> "ExtensionClass":
        """Build from (i, l, c) triples or Terms, merging repeats and dropping zeros."""
        acc = {}
        for t in items:
            i, l, c = (t.i, t.l, t.c) if isinstance(t, Term) else t
            acc[(i, l)] = acc.get((i, l), 0) + Fraction(c)
        return cls(tuple(Term(i, l, c) for (i, l), c in acc.items() if c))

    @classmethod
    def monomial(cls, i: int, l: int, c=1) -> "ExtensionClass":
        return cls((Term(i, l, Fraction(c)),))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __add__(self, other: "ExtensionClass") -> "ExtensionClass":
        return ExtensionClass.from_terms(self.terms + other.terms)

    def as_poly(self) -> LaurentPoly:
        return LaurentPoly({(t.i, t.l): t.c for t in self.terms})

    def truncate(self, n: int) -> "ExtensionClass":
        return ExtensionClass(tuple(t for t in self.terms if t.l <= n))

    def __str__(self) -> str:
        return format_class(self)

    # wire form
    def to_json(self) -> list:
        return [{"i": t.i, "l": t.l, "num": t.c.numerator, "den": t.c.denominator} for t in self.terms]

    @classmethod
    def from_json(cls, data) -> "ExtensionClass":
        try:
            return cls.from_terms((int(d["i"]), int(d["l"]), Fraction(int(d["num"]), int(d.get("den", 1)))) for d in data)
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, SpecError):
                raise
            raise SpecError(f"bad extension class JSON: {exc}") from exc


ZERO = ExtensionClass()


def in_canonical_window(k: int, j: int, i: int, l: int) -> bool:
    return l >= 1 and k * l - j + 1 <= i <= j - 1


def canonical_window(k: int, j: int) -> List[MonomialIndex]:
    """Monomials z^i u^l that survive coboundary reduction, sorted by (l, i)."""
    if k < 1 or j < 0:
        raise SpecError(f"need k >= 1 and j >= 0, got k={k}, j={j}")
    out = []
    for l in range(1, (2 * j - 2) // k + 1 if j >= 1 else 1):
        for i in range(k * l - j + 1, j):
            out.append(MonomialIndex(i, l))
    return out


@dataclass(frozen=True)
class BundleSpec:
    """Bundle on Z_k with splitting type j and extension class p.

    Construction insists on canonical p unless ``raw=True``; raw specs are
    meant to be canonicalized right away.
    """

    k: int
    j: int
    p: ExtensionClass = ZERO
    raw: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.p, ExtensionClass):
            object.__setattr__(self, "p", ExtensionClass.from_terms(self.p))
        if int(self.k) != self.k or self.k < 1:
            raise SpecError(f"k must be a positive integer, got {self.k!r}")
        if int(self.j) != self.j or self.j < 0:
            raise SpecError(f"j must be a non-negative integer, got {self.j!r}")
        if self.raw:
            return
        bad = [t for t in self.p if not in_canonical_window(self.k, self.j, t.i, t.l)]
        if bad:
            raise SpecError(
                f"p is not canonical for (k={self.k}, j={self.j}): "
                + ", ".join(format_term(t) for t in bad)
                + "; canonicalize() it first"
            )

    def canonical(self) -> "BundleSpec":
        return canonicalize(self.k, self.j, self.p)

    def with_k(self, k: int) -> "BundleSpec":
        return BundleSpec(k, self.j, self.p, raw=True)

    def to_json(self) -> dict:
        return {"k": self.k, "j": self.j, "p": self.p.to_json()}

    @classmethod
    def from_json(cls, data) -> "BundleSpec":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls(int(data["k"]), int(data["j"]), ExtensionClass.from_json(data.get("p", [])))
        except (KeyError, TypeError) as exc:
            raise SpecError(f"bad bundle JSON: {exc}") from exc

    def __str__(self) -> str:
        return f"(k={self.k}, j={self.j}, p={format_class(self.p)})"


def split_off(k: int, j: int, p: ExtensionClass) -> Tuple[ExtensionClass, ExtensionClass]:
    """Partition p into (canonical part, coboundary part)."""
    for t in p:
        if t.l < 1:
            raise SpecError(f"term {format_term(t)} has u-degree < 1")
    keep = tuple(t for t in p if in_canonical_window(k, j, t.i, t.l))
    drop = tuple(t for t in p if not in_canonical_window(k, j, t.i, t.l))
    return ExtensionClass(keep), ExtensionClass(drop)


def canonicalize(k: int, j: int, p: ExtensionClass) -> BundleSpec:
    # i >= j: absorbed by T.[[1, z^(i-j) u^l], [0, 1]] on U.
    # i <= k*l - j: absorbed by [[1, z^(i+j) u^l], [0, 1]].T on V.
    keep, _ = split_off(k, j, p)
    return BundleSpec(k, j, keep)


@dataclass(frozen=True)
class TransitionMatrix:
    entries: Tuple[Tuple[LaurentPoly, LaurentPoly], Tuple[LaurentPoly, LaurentPoly]]

    def det(self) -> LaurentPoly:
        (a, b), (c, d) = self.entries
        return a * d - b * c

    def inverse(self) -> "TransitionMatrix":
        (a, b), (c, d) = self.entries
        det = self.det()
        if det != LaurentPoly.monomial(0, 0):
            raise ValueError("only unimodular transition matrices are inverted")
        return TransitionMatrix(((d, -b), (-c, a)))

    def __getitem__(self, ij):
        r, c = ij
        return self.entries[r][c]


def transition_matrix(spec: BundleSpec) -> TransitionMatrix:
    zj = LaurentPoly.monomial(spec.j, 0)
    zmj = LaurentPoly.monomial(-spec.j, 0)
    return TransitionMatrix(((zj, spec.p.as_poly()), (LaurentPoly(), zmj)))


@dataclass(frozen=True)
class NeighborhoodSpec:
    """A bundle restricted to the n-th formal neighbourhood (u^(n+1) = 0)."""

    k: int
    j: int
    p: ExtensionClass
    order: int


def restrict_to_neighborhood(spec: BundleSpec, n: int) -> NeighborhoodSpec:
    if n < 0:
        raise SpecError(f"neighbourhood order must be >= 0, got {n}")
    return NeighborhoodSpec(spec.k, spec.j, spec.p.truncate(n), n)


# --- monomial strings: "z^-1*u", "u^2", "3/2*z*u + -z^2*u^3", "" ---------

_TERM_RE = re.compile(
    r"""^(?P<sign>[+-]?)
        (?:(?P<coef>\d+(?:/\d+)?)\*?)?
        (?:z(?:\^(?P<zexp>[+-]?\d+))?\*?)?
        (?:u(?:\^(?P<uexp>\d+))?)?$""",
    re.X,
)


def parse_term(text: str) -> Term:
    m = _TERM_RE.match(text)
    if not m or not text.strip("+-"):
        raise SpecError(f"cannot parse term {text!r}")
    try:
        coef = Fraction(m["coef"]) if m["coef"] else Fraction(1)
    except ZeroDivisionError:
        raise SpecError(f"zero denominator in term {text!r}") from None
    if m["sign"] == "-":
        coef = -coef
    has_z = "z" in text
    has_u = "u" in text
    i = int(m["zexp"]) if m["zexp"] is not None else (1 if has_z else 0)
    if not has_u:
        raise SpecError(f"term {text!r} has no u factor; u-degree must be >= 1")
    l = int(m["uexp"]) if m["uexp"] is not None else 1
    if l < 1:
        raise SpecError(f"term {text!r} has u-degree < 1")
    return Term(i, l, coef)


def parse_class(text: Optional[str]) -> ExtensionClass:
    """Parse a '+'-joined monomial string; '', '0' and 'zero' mean p = 0."""
    if text is None:
        return ZERO
    s = re.sub(r"\s+", "", text)
    if s in ("", "0", "zero"):
        return ZERO
    # split on '+', and on '-' unless it is an exponent sign
    pieces = [q for q in re.split(r"\+|(?<!\^)(?=-)", s) if q]
    if not pieces:
        raise SpecError(f"cannot parse extension class {text!r}")
    return ExtensionClass.from_terms(parse_term(q) for q in pieces)


def format_term(t: Term, with_coef: bool = True) -> str:
    factors = []
    if t.i == 1:
        factors.append("z")
    elif t.i != 0:
        factors.append(f"z^{t.i}")
    factors.append("u" if t.l == 1 else f"u^{t.l}")
    body = "*".join(factors)
    if not with_coef or t.c == 1:
        return body
    if t.c == -1:
        return "-" + body
    return f"{t.c}*{body}"


def format_class(p: ExtensionClass) -> str:
    if not p:
        return "zero"
    return "+".join(format_term(t) for t in p).replace("+-", "-")
