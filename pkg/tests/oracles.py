"""Independent reference computations, deliberately sharing no code with the engine.

Height from the long exact sequence 0 -> O(-j) -> E -> O(j) -> 0:
H^1(E) = H^1(O(-j)) / image of H^0(O(j)) under f -> [p f]. The
gap monomials z^a u^b with k b < a < j span H^1(O(-j)); sections of O(j)
are z^c u^d, 0 <= c <= k d + j.

Width as the low-degree part of H^0(Z - l, E) / H^0(Z, E): only the O(j)
coordinate f2 matters, f2 at u-degree d lives in z^0..z^(kd+j), and the
conditions are that p f2 has no gap monomials. All ranks via sympy.
"""

from fractions import Fraction

import sympy


def _rank(rows, ncols):
    if not rows or not ncols:
        return 0
    return sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in r] for r in rows]).rank()


def _terms(p):
    return [(t.i, t.l, Fraction(t.c)) for t in p]


def height_oracle(k, j, p):
    gaps = [(b, a) for b in range(0, j + 1) for a in range(k * b + 1, j)]
    if not gaps:
        return 0
    index = {g: n for n, g in enumerate(gaps)}
    top = max(b for b, _ in gaps)
    rows = []
    for d in range(0, top + 1):
        for c in range(0, k * d + j + 1):
            v = [Fraction(0)] * len(gaps)
            for i, l, coef in _terms(p):
                g = (d + l, c + i)
                if g in index:
                    v[index[g]] += coef
            if any(v):
                rows.append(v)
    return len(gaps) - _rank(rows, len(gaps))


def width_oracle(k, j, p):
    terms = _terms(p)
    lowest = -(j // k)
    top = j  # generous: gap degrees stop below j / k

    def kernel_dim(d_min):
        vars_ = [(d, c) for d in range(d_min, top + 1) for c in range(0, k * d + j + 1)]
        index = {v: n for n, v in enumerate(vars_)}
        rows = []
        for b in range(d_min, top + 1):
            for a in range(k * b + 1, j):
                row = [Fraction(0)] * len(vars_)
                for i, l, coef in terms:
                    v = (b - l, a - i)
                    if v in index:
                        row[index[v]] += coef
                if any(row):
                    rows.append(row)
        return len(vars_) - _rank(rows, len(vars_))

    return kernel_dim(lowest) - kernel_dim(0)


def cech_height_bruteforce(k, j, p, z_lo, z_hi, n):
    """Dense H^1 on the n-th neighbourhood, cochains clipped to z in [z_lo, z_hi]."""
    cells = [(comp, b, a) for comp in (1, 2) for b in range(n + 1) for a in range(z_lo, z_hi + 1)]
    index = {c: m for m, c in enumerate(cells)}
    rows = []

    def push(entries):
        v = [Fraction(0)] * len(cells)
        for cell, coef in entries:
            if cell in index:
                v[index[cell]] += coef
        if any(v):
            rows.append(v)

    span = z_hi - z_lo + 2 * j + 2
    for b in range(n + 1):
        for a in range(z_lo - span, z_hi + span):
            if a <= k * b:
                push([((1, b, a), 1)])
                push([((2, b, a), 1)])
            if a >= 0:
                push([((1, b, a + j), -1)])
                ent = [((2, b, a - j), -1)]
                for i, l, coef in _terms(p):
                    if b + l <= n:
                        ent.append(((1, b + l, a + i), -coef))
                push(ent)
    return len(cells) - _rank(rows, len(cells))


def cocycle_window_oracle(k, j, n_max, z_span):
    """Monomials z^i u^l, 1 <= l <= n_max, left in H^1(O(-2j)) after Cech reduction.

    O(-2j) has transition z^(2j); the class z^i u^l of an extension of O(j)
    by O(-j) corresponds to the cocycle z^(i+j) u^l there.
    """
    survivors = []
    cells = list(range(-z_span, z_span + 1))
    for l in range(1, n_max + 1):
        # coboundaries clipped to the row: g with exponent <= k l, and z^(2j) f with f U-holomorphic
        rows = [[1 if c == e else 0 for c in cells] for e in cells if e <= k * l or e >= 2 * j]
        _, pivots = sympy.Matrix(rows).rref()
        survivors += [(cells[n] - j, l) for n in range(len(cells)) if n not in pivots]
    return sorted(survivors, key=lambda m: (m[1], m[0]))


def split_closed_forms(k, n):
    """(width, height) of the split bundle with j = n k, summed level by level."""
    j = n * k
    width = sum(j - k * b + 1 for b in range(1, n + 1))
    height = sum(max(0, j - k * l - 1) for l in range(0, n + 1))
    return width, height
