"""Exact checks on the BPST instanton and on ADHM moment maps.

Lie algebra: basis (i, j, k) with [i, j] = 2k, [j, k] = 2i, [k, i] = 2j,
i.e. the imaginary quaternions. For these the matrix product form
dA + A^A and the bracket form dA + 1/2 [A, A] agree, since
A^A = sum_{m<n} (A_m A_n - A_n A_m) dx_m^dx_n = sum_{m<n} [A_m, A_n] dx_m^dx_n.
We use the bracket form throughout:

    F_mn = d_m A_n - d_n A_m + [A_m, A_n].

Hodge star on R^4: *(dx_a ^ dx_b) = sign(a b c d) dx_c ^ dx_d, where
(c, d) is the complementary pair and the standard orientation is
dx1^dx2^dx3^dx4.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

Exps = Tuple[int, int, int, int]
PAIRS: Tuple[Tuple[int, int], ...] = tuple(itertools.combinations(range(4), 2))


class Poly:
    """Polynomial in x1..x4 with Fraction coefficients."""

    __slots__ = ("c",)

    def __init__(self, c=None):
        self.c: Dict[Exps, Fraction] = {e: Fraction(v) for e, v in (c or {}).items() if v}

    @classmethod
    def const(cls, v) -> "Poly":
        return cls({(0, 0, 0, 0): v})

    @classmethod
    def var(cls, n: int, v=1) -> "Poly":
        e = [0, 0, 0, 0]
        e[n] = 1
        return cls({tuple(e): v})

    def __add__(self, o: "Poly") -> "Poly":
        out = dict(self.c)
        for e, v in o.c.items():
            out[e] = out.get(e, 0) + v
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({e: -v for e, v in self.c.items()})

    def __sub__(self, o: "Poly") -> "Poly":
        return self + (-o)

    def __mul__(self, o) -> "Poly":
        if not isinstance(o, Poly):
            return Poly({e: v * o for e, v in self.c.items()})
        out: Dict[Exps, Fraction] = {}
        for e1, v1 in self.c.items():
            for e2, v2 in o.c.items():
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3])
                out[e] = out.get(e, 0) + v1 * v2
        return Poly(out)

    __rmul__ = __mul__

    def diff(self, n: int) -> "Poly":
        out = {}
        for e, v in self.c.items():
            if e[n]:
                e2 = list(e)
                e2[n] -= 1
                out[tuple(e2)] = v * e[n]
        return Poly(out)

    def __call__(self, x: Sequence[Fraction]) -> Fraction:
        total = Fraction(0)
        for e, v in self.c.items():
            term = v
            for xi, p in zip(x, e):
                if p:
                    term *= Fraction(xi) ** p
            total += term
        return total

    def is_zero(self) -> bool:
        return not self.c

    def __eq__(self, o) -> bool:
        return isinstance(o, Poly) and self.c == o.c


# D = 1 + |x|^2, the only denominator the BPST connection ever produces
DEN = Poly.const(1) + sum((Poly({tuple(2 if m == n else 0 for m in range(4)): 1}) for n in range(4)), Poly())


@dataclass(frozen=True)
class RatFn:
    """num / (1 + |x|^2)^power."""

    num: Poly
    power: int = 0

    def _lift(self, power: int) -> Poly:
        out = self.num
        for _ in range(power - self.power):
            out = out * DEN
        return out

    def __add__(self, o: "RatFn") -> "RatFn":
        p = max(self.power, o.power)
        return RatFn(self._lift(p) + o._lift(p), p)

    def __neg__(self) -> "RatFn":
        return RatFn(-self.num, self.power)

    def __sub__(self, o: "RatFn") -> "RatFn":
        return self + (-o)

    def __mul__(self, o) -> "RatFn":
        if isinstance(o, RatFn):
            return RatFn(self.num * o.num, self.power + o.power)
        return RatFn(self.num * o, self.power)

    __rmul__ = __mul__

    def diff(self, n: int) -> "RatFn":
        # quotient rule: (N / D^m)' = (N' D - m N D') / D^(m+1)
        if self.power == 0:
            return RatFn(self.num.diff(n), 0)
        top = self.num.diff(n) * DEN - self.num * DEN.diff(n) * self.power
        return RatFn(top, self.power + 1)

    def __call__(self, x) -> Fraction:
        return self.num(x) / DEN(x) ** self.power

    def is_zero(self) -> bool:
        return self.num.is_zero()


def _zero_like(a):
    return a - a


@dataclass(frozen=True)
class LieElement:
    """a1 i + a2 j + a3 k; coefficients may be Fractions or RatFns."""

    a1: object = Fraction(0)
    a2: object = Fraction(0)
    a3: object = Fraction(0)

    def __iter__(self):
        return iter((self.a1, self.a2, self.a3))

    def __add__(self, o: "LieElement") -> "LieElement":
        return LieElement(self.a1 + o.a1, self.a2 + o.a2, self.a3 + o.a3)

    def __sub__(self, o: "LieElement") -> "LieElement":
        return LieElement(self.a1 - o.a1, self.a2 - o.a2, self.a3 - o.a3)

    def __neg__(self) -> "LieElement":
        return LieElement(-self.a1, -self.a2, -self.a3)

    def scale(self, s) -> "LieElement":
        return LieElement(self.a1 * s, self.a2 * s, self.a3 * s)

    def bracket(self, o: "LieElement") -> "LieElement":
        # twice the cross product
        return LieElement(
            (self.a2 * o.a3 - self.a3 * o.a2) * 2,
            (self.a3 * o.a1 - self.a1 * o.a3) * 2,
            (self.a1 * o.a2 - self.a2 * o.a1) * 2,
        )

    def map(self, f) -> "LieElement":
        return LieElement(f(self.a1), f(self.a2), f(self.a3))


BASIS = (
    LieElement(Fraction(1), Fraction(0), Fraction(0)),
    LieElement(Fraction(0), Fraction(1), Fraction(0)),
    LieElement(Fraction(0), Fraction(0), Fraction(1)),
)


@dataclass(frozen=True)
class LieValuedTwoForm:
    """Coefficients on dx_a ^ dx_b for a < b, in PAIRS order (0-based)."""

    coeffs: Tuple[LieElement, ...]

    def __post_init__(self):
        if len(self.coeffs) != 6:
            raise ValueError("a 2-form on R^4 has 6 coefficients")

    def __getitem__(self, pair: Tuple[int, int]) -> LieElement:
        a, b = pair
        if a < b:
            return self.coeffs[PAIRS.index((a, b))]
        return -self.coeffs[PAIRS.index((b, a))]

    def __add__(self, o: "LieValuedTwoForm") -> "LieValuedTwoForm":
        return LieValuedTwoForm(tuple(x + y for x, y in zip(self.coeffs, o.coeffs)))

    def star(self, orientation: int = 1) -> "LieValuedTwoForm":
        out = []
        for (c, d) in PAIRS:
            a, b = [m for m in range(4) if m not in (c, d)]
            # coefficient of dx_c^dx_d in *F is sign(a b c d) F_ab
            out.append(self[(a, b)].scale(_perm_sign((a, b, c, d)) * orientation))
        return LieValuedTwoForm(tuple(out))

    def map(self, f) -> "LieValuedTwoForm":
        return LieValuedTwoForm(tuple(e.map(f) for e in self.coeffs))

    def components(self):
        for e in self.coeffs:
            yield from e


def _perm_sign(p) -> int:
    p = list(p)
    sign = 1
    for a in range(len(p)):
        for b in range(a + 1, len(p)):
            if p[a] > p[b]:
                sign = -sign
    return sign


# theta_a as (coefficient of dx1, ..., dx4), each linear in x
_THETA = (
    # x1 dx2 - x2 dx1 - x3 dx4 + x4 dx3
    ((1, -1), (0, 1), (3, 1), (2, -1)),
    # x1 dx3 - x3 dx1 - x4 dx2 + x2 dx4
    ((2, -1), (3, -1), (0, 1), (1, 1)),
    # x1 dx4 - x4 dx1 - x2 dx3 + x3 dx2
    ((3, -1), (2, 1), (1, -1), (0, 1)),
)


def theta_polys() -> Tuple[Tuple[Poly, ...], ...]:
    return tuple(tuple(Poly.var(var, sgn) for var, sgn in row) for row in _THETA)


def theta_forms(x: Sequence) -> Tuple[Tuple[Fraction, ...], ...]:
    """The three 1-forms theta_1..3 at x, as dx1..dx4 coefficient tuples."""
    x = [Fraction(v) for v in x]
    return tuple(tuple(p(x) for p in row) for row in theta_polys())


def bpst_connection() -> Tuple[LieElement, ...]:
    """A_m for m = 1..4: (theta_1 i + theta_2 j + theta_3 k)_m / (1 + |x|^2)."""
    th = theta_polys()
    return tuple(LieElement(*(RatFn(th[a][m], 1) for a in range(3))) for m in range(4))


def curvature(A: Sequence[LieElement]) -> LieValuedTwoForm:
    coeffs = []
    for (m, n) in PAIRS:
        dA = A[n].map(lambda f: f.diff(m)) - A[m].map(lambda f: f.diff(n))
        coeffs.append(dA + A[m].bracket(A[n]))
    return LieValuedTwoForm(tuple(coeffs))


def bpst_curvature() -> LieValuedTwoForm:
    return curvature(bpst_connection())


def duality_defect(F: LieValuedTwoForm, orientation: int = 1) -> LieValuedTwoForm:
    """*F + F as a form; zero iff F is anti-self-dual for that orientation."""
    return F.star(orientation) + F


def asd_orientation(F=None) -> int:
    """+1 if *F = -F identically in the standard orientation, -1 if only in the reversed one."""
    F = bpst_curvature() if F is None else F
    for orientation in (1, -1):
        if all(c.is_zero() for c in duality_defect(F, orientation).components()):
            return orientation
    raise ArithmeticError("curvature is anti-self-dual in neither orientation")


def asd_identity_holds(orientation: int = 1) -> bool:
    """Symbolic check: every numerator of *F + F is the zero polynomial."""
    return all(c.is_zero() for c in duality_defect(bpst_curvature(), orientation).components())


def bpst_curvature_residual(x: Sequence, orientation: int = 1, F=None) -> Fraction:
    """max |(*F + F)| over basis 2-forms and Lie components at the point x."""
    F = bpst_curvature() if F is None else F
    x = [Fraction(v) for v in x]
    defect = duality_defect(F, orientation)
    return max(abs(c(x)) for c in defect.components())


def curvature_at(x: Sequence, F=None) -> LieValuedTwoForm:
    F = bpst_curvature() if F is None else F
    x = [Fraction(v) for v in x]
    return F.map(lambda f: f(x))


def random_points(count: int, seed: int = 0) -> List[Tuple[Fraction, ...]]:
    rng = random.Random(seed)
    return [tuple(Fraction(rng.randint(-20, 20), rng.randint(1, 20)) for _ in range(4)) for _ in range(count)]


@dataclass(frozen=True)
class AsdReport:
    orientation: int
    symbolic: bool
    points: int
    zero_points: int
    max_residual: Fraction

    @property
    def ok(self) -> bool:
        return self.symbolic and self.zero_points == self.points

    @property
    def orientation_name(self) -> str:
        return "standard" if self.orientation == 1 else "reversed"

    def to_json(self) -> dict:
        return {
            "orientation": self.orientation_name,
            "symbolic_identity": self.symbolic,
            "points": self.points,
            "zero_points": self.zero_points,
            "max_residual": str(self.max_residual),
            "verified": self.ok,
        }


def verify_bpst(samples: int = 100, seed: int = 0) -> AsdReport:
    F = bpst_curvature()
    orientation = asd_orientation(F)
    residuals = [bpst_curvature_residual(x, orientation, F) for x in random_points(samples, seed)]
    return AsdReport(
        orientation=orientation,
        symbolic=True,
        points=samples,
        zero_points=sum(1 for r in residuals if r == 0),
        max_residual=max(residuals, default=Fraction(0)),
    )


# --- ADHM -----------------------------------------------------------------


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    def __add__(self, o):
        o = _gq(o)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-_gq(o))

    def __mul__(self, o):
        o = _gq(o)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self):
        return GaussianRational(self.re, -self.im)

    def __eq__(self, o):
        try:
            o = _gq(o)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        return f"{self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i"

    def to_json(self):
        return [str(self.re), str(self.im)]


def _gq(v) -> GaussianRational:
    if isinstance(v, GaussianRational):
        return v
    if isinstance(v, (int, Fraction)):
        return GaussianRational(Fraction(v))
    if isinstance(v, str):
        return GaussianRational(Fraction(v))
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return GaussianRational(Fraction(v[0]), Fraction(v[1]))
    raise TypeError(f"cannot read {v!r} as a Gaussian rational")


Matrix = List[List[GaussianRational]]


class ShapeError(ValueError):
    pass


def as_matrix(rows) -> Matrix:
    m = [[_gq(v) for v in row] for row in rows]
    if m and any(len(r) != len(m[0]) for r in m):
        raise ShapeError("ragged matrix")
    return m


def shape(m: Matrix) -> Tuple[int, int]:
    return (len(m), len(m[0]) if m else 0)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    (r, n), (n2, c) = shape(a), shape(b)
    if n != n2:
        raise ShapeError(f"cannot multiply {r}x{n} by {n2}x{c}")
    return [[sum((a[i][t] * b[t][j] for t in range(n)), GaussianRational()) for j in range(c)] for i in range(r)]


def adjoint(a: Matrix) -> Matrix:
    r, c = shape(a)
    return [[a[i][j].conj() for i in range(r)] for j in range(c)]


def madd(a: Matrix, b: Matrix) -> Matrix:
    if shape(a) != shape(b):
        raise ShapeError(f"cannot add {shape(a)} and {shape(b)}")
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def msub(a: Matrix, b: Matrix) -> Matrix:
    return madd(a, [[-x for x in row] for row in b])


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return msub(matmul(a, b), matmul(b, a))


@dataclass(frozen=True)
class ADHMData:
    B1: Matrix
    B2: Matrix
    I: Matrix
    J: Matrix

    def __post_init__(self):
        for name in ("B1", "B2", "I", "J"):
            object.__setattr__(self, name, as_matrix(getattr(self, name)))
        k = len(self.B1)
        if shape(self.B1) != (k, k) or shape(self.B2) != (k, k):
            raise ShapeError(f"B1, B2 must be k x k, got {shape(self.B1)} and {shape(self.B2)}")
        N = shape(self.I)[1]
        if shape(self.I) != (k, N) or shape(self.J) != (N, k):
            raise ShapeError(f"need I k x N and J N x k, got {shape(self.I)} and {shape(self.J)} for k={k}")

    @property
    def k(self) -> int:
        return len(self.B1)

    @property
    def N(self) -> int:
        return shape(self.I)[1]

    @classmethod
    def from_json(cls, data: dict) -> "ADHMData":
        try:
            return cls(data["B1"], data["B2"], data["I"], data["J"])
        except KeyError as exc:
            raise ShapeError(f"ADHM data missing {exc}") from exc


def adhm_moment_maps(data: ADHMData) -> Tuple[Matrix, Matrix]:
    """(mu_r, mu_c) with mu_r = [B1,B1^+] + [B2,B2^+] + I I^+ - J^+ J and mu_c = [B1,B2] + I J."""
    B1, B2, I, J = data.B1, data.B2, data.I, data.J
    mu_r = madd(commutator(B1, adjoint(B1)), commutator(B2, adjoint(B2)))
    mu_r = msub(madd(mu_r, matmul(I, adjoint(I))), matmul(adjoint(J), J))
    mu_c = madd(commutator(B1, B2), matmul(I, J))
    return mu_r, mu_c


def is_hermitian(m: Matrix) -> bool:
    return m == adjoint(m)
