"""Exact rational linear algebra on spaces spanned by monomials z^i u^l.

Vectors are sparse dicts keyed by ``(component, l, i)`` triples, so plain
tuple comparison is the monomial order: component first, then u-degree,
then z-exponent. Nothing here ever touches a float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, NamedTuple, Sequence, Tuple

Key = Tuple[int, int, int]  # (component, l, i)
CoeffVector = Dict[Key, Fraction]
Functional = Dict[Key, Fraction]


class MonomialIndex(NamedTuple):
    """Exponents of z^i u^l. Sorted by (l, i), not by field order."""

    i: int
    l: int

    def order_key(self) -> Tuple[int, int]:
        return (self.l, self.i)


def key(component: int, i: int, l: int) -> Key:
    return (component, l, i)


def chart_transform(i: int, l: int, k: int) -> Tuple[int, int]:
    """(xi, v) exponents of the monomial z^i u^l, using xi = 1/z, v = z^k u."""
    return (k * l - i, l)


@dataclass(frozen=True)
class Window:
    """Rectangle of monomial indices, bounds inclusive."""

    z_min: int
    z_max: int
    l_min: int
    l_max: int

    def __post_init__(self):
        if self.z_min > self.z_max or self.l_min > self.l_max:
            raise ValueError(f"empty window {self}")

    @property
    def size(self) -> int:
        return (self.z_max - self.z_min + 1) * (self.l_max - self.l_min + 1)

    def __contains__(self, m) -> bool:
        i, l = m
        return self.z_min <= i <= self.z_max and self.l_min <= l <= self.l_max

    def __iter__(self) -> Iterator[MonomialIndex]:
        for l in range(self.l_min, self.l_max + 1):
            for i in range(self.z_min, self.z_max + 1):
                yield MonomialIndex(i, l)

    def keys(self, component: int) -> List[Key]:
        return [key(component, m.i, m.l) for m in self]


class LaurentPoly:
    """Laurent polynomial in z, u with exact coefficients.

    Only used for small symbolic bookkeeping (transition matrices,
    determinants), never in the elimination hot path.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for m, c in dict(terms or {}).items():
            c = Fraction(c)
            if c:
                clean[MonomialIndex(*m)] = c
        self.terms: Dict[MonomialIndex, Fraction] = clean

    @classmethod
    def monomial(cls, i: int, l: int, c=1) -> "LaurentPoly":
        return cls({(i, l): c})

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        out: Dict[Tuple[int, int], Fraction] = {}
        for (i1, l1), c1 in self.terms.items():
            for (i2, l2), c2 in other.terms.items():
                m = (i1 + i2, l1 + l2)
                out[m] = out.get(m, 0) + c1 * c2
        return LaurentPoly(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "LaurentPoly(0)"
        parts = [f"{c}*z^{m.i}*u^{m.l}" for m, c in sorted(self.terms.items(), key=lambda t: t[0].order_key())]
        return "LaurentPoly(" + " + ".join(parts) + ")"


class NotInSpan(ValueError):
    """A vector expected to lie in a span does not."""


class Echelon:
    """Incrementally maintained reduced row echelon form of sparse rows.

    ``pivot="min"`` pivots each row on its smallest key, ``"max"`` on its
    largest. Either way the pivot choice is a pure function of the keys, so
    results do not depend on the order rows happen to be enumerated in
    beyond the usual row-space equality.
    """

    def __init__(self, pivot: str = "min"):
        if pivot not in ("min", "max"):
            raise ValueError(pivot)
        self._choose = min if pivot == "min" else max
        self.rows: Dict[Key, CoeffVector] = {}
        # column -> pivots of rows having a nonzero entry there (excluding the pivot itself)
        self._occurs: Dict[Key, set] = {}

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: CoeffVector) -> CoeffVector:
        """Return ``vec`` minus its projection on the current row space."""
        out = {k: Fraction(c) for k, c in vec.items() if c}
        hits = [k for k in out if k in self.rows]
        # rows are fully reduced, so subtracting one never re-creates another pivot
        for p in hits:
            c = out.get(p)
            if not c:
                continue
            for k2, c2 in self.rows[p].items():
                v = out.get(k2, 0) - c * c2
                if v:
                    out[k2] = v
                else:
                    out.pop(k2, None)
        return out

    def add(self, vec: CoeffVector) -> bool:
        """Insert a row; return False if it was already in the row space."""
        r = self.reduce(vec)
        if not r:
            return False
        p = self._choose(r)
        inv = 1 / r[p]
        if inv != 1:
            r = {k: c * inv for k, c in r.items()}
        # clear the new pivot column from older rows
        for q in list(self._occurs.get(p, ())):
            row = self.rows[q]
            c = row[p]
            for k2, c2 in r.items():
                v = row.get(k2, 0) - c * c2
                if v:
                    if k2 not in row and k2 != q:
                        self._occurs.setdefault(k2, set()).add(q)
                    row[k2] = v
                else:
                    if k2 in row:
                        del row[k2]
                        s = self._occurs.get(k2)
                        if s is not None:
                            s.discard(q)
        self._occurs.pop(p, None)
        self.rows[p] = r
        for k2 in r:
            if k2 != p:
                self._occurs.setdefault(k2, set()).add(p)
        return True

    def contains(self, vec: CoeffVector) -> bool:
        return not self.reduce(vec)

    def rows_with(self, col: Key) -> Iterable[Key]:
        return self._occurs.get(col, ())


def kernel_dim_and_basis(
    constraints: Sequence[Functional], variables: Iterable[Key]
) -> Tuple[int, List[CoeffVector]]:
    """Exact kernel of a list of linear functionals on the span of ``variables``.

    Every key a constraint mentions must be one of ``variables``. The basis has
    one vector per free variable; that variable carries coefficient 1, every
    other free variable 0, and it is the largest key in its vector.
    """
    variables = sorted(set(variables))
    varset = set(variables)
    ech = Echelon("min")
    for f in constraints:
        stray = [k for k in f if k not in varset]
        if stray:
            raise ValueError(f"constraint mentions keys outside the window: {stray[:3]}")
        ech.add(f)
    basis = []
    for v in variables:
        if v in ech.rows:
            continue
        vec = {v: Fraction(1)}
        for p in ech.rows_with(v):
            vec[p] = -ech.rows[p][v]
        basis.append(vec)
    return len(basis), basis


def span_dim(vectors: Iterable[CoeffVector]) -> int:
    ech = Echelon("max")
    for v in vectors:
        ech.add(v)
    return ech.rank


def quotient_dim(ambient: Iterable[CoeffVector], sub: Iterable[CoeffVector]) -> int:
    """dim span(ambient) - dim span(sub), after checking sub lies in span(ambient).

    Raises NotInSpan otherwise; upstream that almost always means a
    truncation window too small to hold the subspace.
    """
    big = Echelon("max")
    for v in ambient:
        big.add(v)
    small = Echelon("max")
    for n, v in enumerate(sub):
        if not big.contains(v):
            raise NotInSpan(f"sub vector #{n} is not in the ambient span")
        small.add(v)
    return big.rank - small.rank
