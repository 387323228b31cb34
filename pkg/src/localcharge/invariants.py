"""Width, height and charge of rank-2 bundles on Z_k.

Height is H^1(Z_k, E) computed on formal neighbourhoods: the Cech complex
of the cover {U, V} restricted to u^(N+1) = 0, for growing N, until the
answer stops moving.

Width is h^0(Q) for Q = (pi_* E)^vv / pi_* E on the contracted surface.
The cone X_k is normal and the singular point has codimension 2, so
sections of the reflexive hull are exactly sections of E on Z_k minus the
curve. The contracted surface is affine and Q is a skyscraper, hence

    width = dim H^0(Z_k - l, E) / H^0(Z_k, E),

computed as the quotient of two kernels on the same monomial window, one
allowing poles of order <= P along the curve and one not.
"""

from __future__ import annotations

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .bundle import (
    BundleSpec,
    ExtensionClass,
    SpecError,
    Term,
    canonical_window,
    format_class,
    restrict_to_neighborhood,
)
from .series import Key, Window, kernel_dim_and_basis, key, quotient_dim

log = logging.getLogger(__name__)


class NonStabilized(RuntimeError):
    """Truncation caps ran out before the windowed answer settled."""


class DomainError(ValueError):
    """Arguments outside the range where a formula is stated."""


@dataclass(frozen=True)
class LocalInvariants:
    width: int
    height: int
    charge: int

    def __post_init__(self):
        if self.charge != self.width + self.height:
            raise ValueError("charge must equal width + height")
        if min(self.width, self.height) < 0:
            raise ValueError("invariants are non-negative")

    @classmethod
    def of(cls, width: int, height: int) -> "LocalInvariants":
        return cls(width, height, width + height)

    def to_json(self) -> dict:
        return {"width": self.width, "height": self.height, "charge": self.charge}


@dataclass(frozen=True)
class TruncationPolicy:
    """Caps for the truncated computations.

    u_cap is the formal-neighbourhood order N, z_halfwidth the z-exponent
    bound M, pole_cap the pole order P allowed along the curve. Each grows
    by ``step`` per round; ``max_cap`` bounds u_cap.
    """

    u_cap: int
    z_halfwidth: int
    pole_cap: int
    step: int = 2
    max_cap: int = 16

    def __post_init__(self):
        for name in ("u_cap", "z_halfwidth", "pole_cap", "step", "max_cap"):
            if getattr(self, name) < 1:
                raise ValueError(f"TruncationPolicy.{name} must be positive")

    @classmethod
    def default(cls, k: int, j: int) -> "TruncationPolicy":
        n0 = max(2 * j, 1)
        step = 2
        # j = 0 and 1 still need room for three rounds
        return cls(
            u_cap=n0,
            z_halfwidth=2 * j + k * n0,
            pole_cap=max(2 * j, 1),
            step=step,
            max_cap=max(8 * j, n0 + 2 * step),
        )

    def round(self, t: int) -> "TruncationPolicy":
        d = t * self.step
        return replace(self, u_cap=self.u_cap + d, z_halfwidth=self.z_halfwidth + d, pole_cap=self.pole_cap + d)

    def grown(self, by: int) -> "TruncationPolicy":
        return replace(
            self,
            u_cap=self.u_cap + by,
            z_halfwidth=self.z_halfwidth + by,
            pole_cap=self.pole_cap + by,
            max_cap=self.max_cap + by,
        )

    def to_json(self) -> dict:
        return {
            "u_cap": self.u_cap,
            "z_halfwidth": self.z_halfwidth,
            "pole_cap": self.pole_cap,
            "step": self.step,
            "max_cap": self.max_cap,
        }


def _policy(spec, policy):
    return policy if policy is not None else TruncationPolicy.default(spec.k, spec.j)


def _stabilize(what: str, spec, policy: TruncationPolicy, evaluate: Callable[[TruncationPolicy], int],
               monotone: bool = False) -> int:
    values: List[int] = []
    t = 0
    while True:
        caps = policy.round(t)
        if caps.u_cap > policy.max_cap:
            raise NonStabilized(
                f"{what} of {spec} did not stabilize before u_cap {policy.max_cap}: values {values}"
            )
        v = evaluate(caps)
        if monotone and values and v < values[-1]:
            raise NonStabilized(f"{what} of {spec} decreased under window growth: {values + [v]}")
        values.append(v)
        log.debug("%s %s at N=%d: %d", what, spec, caps.u_cap, v)
        if len(values) >= 3 and values[-1] == values[-2] == values[-3]:
            return v
        t += 1


# --- height ---------------------------------------------------------------


def height_at(spec: BundleSpec, n: int, z_halfwidth: int) -> int:
    """dim H^1 of E on the n-th formal neighbourhood, with z-exponents clipped.

    Cochains are V-frame pairs on U cap V; coboundaries s_V - T.s_U. Every
    cochain monomial with |z-exponent| > M is a coboundary of a generator
    whose image also lies outside, so clipping images to the window is
    exact once M >= j and M >= -min(i over p).
    """
    k, j = spec.k, spec.j
    trunc = restrict_to_neighborhood(spec, n)
    terms = trunc.p.terms
    lo_i = min((t.i for t in terms), default=0)
    M = max(z_halfwidth, j, -lo_i)
    win = Window(-M, M, 0, n)

    ambient = [{kk: Fraction(1)} for comp in (1, 2) for kk in win.keys(comp)]
    images = []
    one = Fraction(1)
    for b in range(n + 1):
        # V-holomorphic sections: z^a u^b with a <= k b
        for a in range(-M, min(k * b, M) + 1):
            images.append({key(1, a, b): one})
            images.append({key(2, a, b): one})
        # U-holomorphic f1 = z^e u^b maps to -z^(e+j) u^b
        for e in range(0, M - j + 1):
            images.append({key(1, e + j, b): -one})
        # U-holomorphic f2 = z^c u^b maps to (-p z^c u^b, -z^(c-j) u^b)
        for c in range(0, M + max(j, -lo_i) + 1):
            img = {}
            if -M <= c - j <= M:
                img[key(2, c - j, b)] = -one
            for t in terms:
                a2, b2 = c + t.i, b + t.l
                if b2 <= n and -M <= a2 <= M:
                    kk = key(1, a2, b2)
                    img[kk] = img.get(kk, 0) - t.c
            img = {kk: v for kk, v in img.items() if v}
            if img:
                images.append(img)
    return quotient_dim(ambient, images)


def compute_height(spec: BundleSpec, policy: Optional[TruncationPolicy] = None) -> int:
    policy = _policy(spec, policy)
    return _stabilize("height", spec, policy, lambda caps: height_at(spec, caps.u_cap, caps.z_halfwidth))


# --- width ----------------------------------------------------------------


def section_constraints(spec: BundleSpec, window_f1: Window, window_f2: Window) -> Tuple[List[Key], List[dict]]:
    """Variables and linear conditions cutting out sections of E in a window.

    A U-frame section (f1, f2) has V-frame components g1 = z^j f1 + p f2 and
    g2 = z^-j f2. Every V-frame monomial z^a u^b with a > k b (negative
    xi-exponent) must vanish. Outputs of u-degree beyond the window are
    dropped, which is the formal-neighbourhood truncation. Negative u-degree
    is allowed when the windows reach below 0.
    """
    k, j = spec.k, spec.j
    top = window_f2.l_max
    variables = window_f1.keys(1) + window_f2.keys(2)
    eqs: dict = {}

    def hit(out, var, c):
        row = eqs.get(out)
        if row is None:
            row = eqs[out] = {}
        row[var] = row.get(var, 0) + c

    for (_, b, e) in window_f1.keys(1):
        a = e + j
        if a > k * b:
            hit((1, b, a), (1, b, e), 1)
    for (_, d, c) in window_f2.keys(2):
        var = (2, d, c)
        if c - j > k * d:
            hit((2, d, c - j), var, 1)
        for t in spec.p:
            b, a = d + t.l, c + t.i
            if b <= top and a > k * b:
                hit((1, b, a), var, t.c)
    constraints = []
    for row in eqs.values():
        row = {v: Fraction(c) for v, c in row.items() if c}
        if row:
            constraints.append(row)
    return variables, constraints


def section_windows(spec: BundleSpec, n: int, z_cap: int, poles: int):
    """(M-windows, M'-windows) for f1 and f2.

    f1 gets extra room when p has z-degree >= j, so absorbing p f2 never
    needs an f1 monomial outside the window.
    """
    hi_i = max((t.i for t in spec.p), default=0)
    z1 = z_cap + max(0, hi_i - spec.j + 1)
    held = (Window(0, z1, 0, n), Window(0, z_cap, 0, n))
    punctured = (Window(0, z1, -poles, n), Window(0, z_cap, -poles, n))
    return held, punctured


def width_at(spec: BundleSpec, n: int, z_cap: int, poles: int) -> int:
    (w1, w2), (w1p, w2p) = section_windows(spec, n, z_cap, poles)
    v, c = section_constraints(spec, w1, w2)
    _, sections = kernel_dim_and_basis(c, v)
    vp, cp = section_constraints(spec, w1p, w2p)
    _, sections_off = kernel_dim_and_basis(cp, vp)
    return quotient_dim(sections_off, sections)


def compute_width(spec: BundleSpec, policy: Optional[TruncationPolicy] = None) -> int:
    policy = _policy(spec, policy)
    return _stabilize(
        "width", spec, policy,
        lambda caps: width_at(spec, caps.u_cap, caps.z_halfwidth, caps.pole_cap),
        monotone=True,
    )


def compute_charge(spec: BundleSpec, policy: Optional[TruncationPolicy] = None) -> LocalInvariants:
    policy = _policy(spec, policy)
    return LocalInvariants.of(compute_width(spec, policy), compute_height(spec, policy))


# --- closed formulas ------------------------------------------------------


@dataclass(frozen=True)
class ChargeBounds:
    lower: int
    upper: int

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"empty bounds [{self.lower}, {self.upper}]")

    def __contains__(self, c: int) -> bool:
        return self.lower <= c <= self.upper

    def __str__(self) -> str:
        return f"[{self.lower}, {self.upper}]"

    def to_json(self) -> dict:
        return {"lower": self.lower, "upper": self.upper}


def charge_bounds(k: int, j: int) -> ChargeBounds:
    """Sharp local-charge bounds for splitting type j on Z_k."""
    if k < 1 or j < 1:
        raise DomainError(f"bounds need k >= 1 and j >= 1, got k={k}, j={j}")
    if k == 1:
        return ChargeBounds(j, j * j)
    n, r = divmod(j, k)
    upper = n * n * k if r == 0 else n * n * k + r * (2 * n + 1) - 1
    return ChargeBounds(j - 1, upper)


def is_instanton_type(k: int, j: int) -> bool:
    return j % k == 0


def is_generic_stable(spec: BundleSpec) -> bool:
    """True iff E does not split on the first formal neighbourhood."""
    return any(t.l == 1 and t.c != 0 for t in spec.p)


def moduli_dimension(k: int, j: int) -> int:
    if not (j >= k >= 2):
        raise DomainError(f"moduli dimension is stated for j >= k >= 2, got k={k}, j={j}")
    return 2 * j - k - 2


def instanton_moduli_dimension(k: int, n: int) -> int:
    if k < 2 or n < 1 or n * k < 2:
        raise DomainError(f"instanton moduli dimension is stated for k >= 2, nk >= 2, got k={k}, n={n}")
    return 2 * n * k - k - 2


# --- enumeration ----------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    spec: BundleSpec
    invariants: LocalInvariants

    @property
    def label(self) -> str:
        return format_class(self.spec.p)

    def to_json(self) -> dict:
        return {"monomial": self.label, "spec": self.spec.to_json(), **self.invariants.to_json()}


def _row(args) -> TableRow:
    spec, policy = args
    return TableRow(spec, compute_charge(spec, policy))


def table_specs(k: int, j: int, rng: Optional[random.Random] = None) -> List[BundleSpec]:
    """Window monomials in (l, i) order, then the zero class.

    With ``rng`` the coefficients are random nonzero rationals instead of 1.
    """
    specs = []
    for m in canonical_window(k, j):
        c = Fraction(1)
        if rng is not None:
            c = Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 9))
        specs.append(BundleSpec(k, j, ExtensionClass((Term(m.i, m.l, c),))))
    specs.append(BundleSpec(k, j))
    return specs


def enumerate_invariants(k: int, j: int, policy: Optional[TruncationPolicy] = None,
                         rng: Optional[random.Random] = None, jobs: int = 1,
                         compute: Optional[Callable] = None) -> List[TableRow]:
    specs = table_specs(k, j, rng)
    if compute is not None:
        return [TableRow(s, compute(s)) for s in specs]
    work = [(s, policy) for s in specs]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_row, work))
    return [_row(w) for w in work]


@dataclass(frozen=True)
class ExtremalResult:
    k: int
    j: int
    min_charge: int
    max_charge: int
    min_witnesses: Tuple[BundleSpec, ...]
    max_witnesses: Tuple[BundleSpec, ...]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "j": self.j,
            "min_charge": self.min_charge,
            "max_charge": self.max_charge,
            "min_witnesses": [s.to_json() for s in self.min_witnesses],
            "max_witnesses": [s.to_json() for s in self.max_witnesses],
        }


def extremal_search(k: int, j: int, policy: Optional[TruncationPolicy] = None,
                    rows: Optional[Sequence[TableRow]] = None, **kw) -> ExtremalResult:
    """Smallest and largest charge seen over the window monomials and zero.

    This reports what the enumerated family reaches; it makes no claim that
    other classes cannot go beyond it.
    """
    if rows is None:
        rows = enumerate_invariants(k, j, policy, **kw)
    charges = [r.invariants.charge for r in rows]
    lo, hi = min(charges), max(charges)
    return ExtremalResult(
        k, j, lo, hi,
        tuple(r.spec for r in rows if r.invariants.charge == lo),
        tuple(r.spec for r in rows if r.invariants.charge == hi),
    )


__all__ = [
    "ChargeBounds",
    "DomainError",
    "ExtremalResult",
    "LocalInvariants",
    "NonStabilized",
    "SpecError",
    "TableRow",
    "TruncationPolicy",
    "charge_bounds",
    "compute_charge",
    "compute_height",
    "compute_width",
    "enumerate_invariants",
    "extremal_search",
    "height_at",
    "instanton_moduli_dimension",
    "is_generic_stable",
    "is_instanton_type",
    "moduli_dimension",
    "section_constraints",
    "table_specs",
    "width_at",
]
