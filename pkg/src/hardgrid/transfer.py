"""Exact transfer matrices at activity -1 and their spectra.

Square cylinders: column states are the independent sets of an m-path,
T[s][t] = (-1)^|t| when s and t are disjoint, and Z(C_{m,n}) = tr(T^n).
The toroidal variant replaces path states by cycle states.  Hexagonal
families step two columns at a time (the brick-wall column type alternates
with column parity), so the exposed matrix is the two-column period
product; its n-th power trace gives the cylinder or torus value directly.

All arithmetic is exact: matrix products run in int64 numpy under a
conservative overflow bound and fall back to Python integers beyond it.
Characteristic polynomials come from fraction-free determinant evaluation
at integer points followed by exact interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

import numpy as np

_INT64_SAFE = 1 << 62


class TransferError(ValueError):
    pass


# ---------------------------------------------------------------------------
# exact matrix helpers


def _max_abs(M) -> int:
    if isinstance(M, np.ndarray):
        return int(np.abs(M).max(initial=0))
    return max((abs(x) for row in M for x in row), default=0)


def _to_py(M):
    if isinstance(M, np.ndarray):
        return [[int(x) for x in row] for row in M]
    return M


def mat_mul(A, B):
    """Exact product; int64 numpy when provably safe, else Python ints."""
    n = len(B)
    bound = _max_abs(A) * _max_abs(B) * max(n, 1)
    if bound < _INT64_SAFE:
        An = A if isinstance(A, np.ndarray) else np.array(A, dtype=np.int64)
        Bn = B if isinstance(B, np.ndarray) else np.array(B, dtype=np.int64)
        return An @ Bn
    A, B = _to_py(A), _to_py(B)
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


def mat_trace(M) -> int:
    if isinstance(M, np.ndarray):
        return int(np.trace(M))
    return sum(M[i][i] for i in range(len(M)))


def mat_trace_product(A, B) -> int:
    """tr(A @ B) without forming the product."""
    n = len(B) if not isinstance(B, np.ndarray) else B.shape[0]
    bound = _max_abs(A) * _max_abs(B) * max(n * n, 1)
    if bound < _INT64_SAFE:
        An = A if isinstance(A, np.ndarray) else np.array(A, dtype=np.int64)
        Bn = B if isinstance(B, np.ndarray) else np.array(B, dtype=np.int64)
        return int(np.einsum("ij,ji->", An, Bn))
    A, B = _to_py(A), _to_py(B)
    return sum(A[i][k] * B[k][i] for i in range(len(A)) for k in range(len(A)))


def mat_power_traces(M, n_max: int) -> list[int]:
    """[tr(M^1), ..., tr(M^n_max)], exactly.

    Materializes powers only up to ceil(n_max/2) and pairs them for the
    higher traces (tr(M^(a+b)) = tr(M^a M^b))."""
    half = (n_max + 1) // 2
    pows = [None, M]
    for k in range(2, half + 1):
        pows.append(mat_mul(pows[-1], M))
    out = []
    for n in range(1, n_max + 1):
        if n <= half:
            out.append(mat_trace(pows[n]))
        else:
            a = half
            b = n - half
            out.append(mat_trace_product(pows[a], pows[b]))
    return out


def mat_power(M, n: int):
    if n < 1:
        raise TransferError("power must be >= 1")
    P = M
    for _ in range(n - 1):
        P = mat_mul(P, M)
    return P


# ---------------------------------------------------------------------------
# state spaces


def path_states(m: int) -> list[int]:
    """Independent sets of the m-path, as bitmasks; F_{m+2} of them."""
    states = [s for s in range(1 << m) if not (s & (s << 1))]
    return states


def cycle_states(m: int) -> list[int]:
    """Independent sets of the m-cycle (m = 1 is a self-looped vertex: only 0)."""
    if m == 1:
        return [0]
    wrap = 1 | (1 << (m - 1))
    return [s for s in path_states(m)
            if m <= 2 or (s & wrap) != wrap]


def _parity_sign(s: int) -> int:
    return -1 if s.bit_count() & 1 else 1


@dataclass(frozen=True)
class TransferMatrix:
    """Integer transfer matrix with its column-state labels."""

    kind: str
    m: int
    states: tuple[int, ...]
    mat: tuple = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def as_array(self):
        return np.array(self.mat, dtype=np.int64)

    def rows(self):
        return [list(r) for r in self.mat]

    def trace_powers(self, n_max: int) -> list[int]:
        return mat_power_traces(self.as_array(), n_max)

    def __repr__(self):
        return f"TransferMatrix({self.kind}, m={self.m}, dim={self.dim})"


def build_transfer_square(m: int, activity: int = -1,
                          cap: int = 5000) -> TransferMatrix:
    """Transfer matrix for square cylinders C_{m, .} at the given activity."""
    states = path_states(m)
    if len(states) > cap:
        raise TransferError(f"dimension {len(states)} exceeds cap {cap}")
    mat = tuple(tuple((activity ** t.bit_count()) if not (s & t) else 0
                      for t in states) for s in states)
    return TransferMatrix(kind="square_cyl", m=m, states=tuple(states), mat=mat)


def build_transfer_square_torus(m: int, cap: int = 5000) -> TransferMatrix:
    """Cycle-column transfer for square tori T_{m, .}."""
    states = cycle_states(m)
    if len(states) > cap:
        raise TransferError(f"dimension {len(states)} exceeds cap {cap}")
    mat = tuple(tuple(_parity_sign(t) if not (s & t) else 0 for t in states)
                for s in states)
    return TransferMatrix(kind="square_torus", m=m, states=tuple(states), mat=mat)


def z_cylinder(m: int, n: int, cap: int = 5000) -> int:
    """Z(C_{m,n}) = tr(T^n), exact."""
    T = build_transfer_square(m, cap=cap)
    return T.trace_powers(n)[n - 1]


def z_square_torus(m: int, n: int, cap: int = 5000) -> int:
    T = build_transfer_square_torus(m, cap=cap)
    return T.trace_powers(n)[n - 1]


def z_rect(m: int, n: int, cap: int = 5000) -> int:
    """Z(S_{m,n}) by vector iteration over column states of the m-path."""
    states = path_states(m)
    if len(states) > cap:
        raise TransferError(f"dimension {len(states)} exceeds cap {cap}")
    vec = {s: _parity_sign(s) for s in states}
    for _ in range(n - 1):
        new = dict.fromkeys(states, 0)
        for s, w in vec.items():
            if not w:
                continue
            for t in states:
                if not (s & t):
                    new[t] += w * _parity_sign(t)
        vec = new
    return sum(vec.values())


# ---------------------------------------------------------------------------
# hexagonal transfer: two-column period products


def _alt_edge_states(nverts: int, parity: int) -> list[int]:
    """Subsets of a brick column: vertices 0..nverts-1 with edges (i, i+1)
    for i = parity mod 2."""
    return [s for s in range(1 << nverts)
            if not any((s >> i) & 3 == 3 for i in range(parity, nverts - 1, 2))]


def build_transfer_hex(m: int, variant: str, cap: int = 5000) -> TransferMatrix:
    """Period transfer matrix for hexagonal families.

    variant 'cyl': tr(T^n) = Z(C^H_{m,n}) over the (m+1)-row brick tube.
    variant 'torus': tr(T^n) = Z(C^T_{m,n}) over the sheared-lattice fibers.
    """
    if variant == "cyl":
        nv = m + 1
        even = _alt_edge_states(nv, 0)
        odd = _alt_edge_states(nv, 1)
        if max(len(even), len(odd)) > cap:
            raise TransferError("hex cylinder state space exceeds cap")
        Te = [[_parity_sign(t) if not (s & t) else 0 for t in odd] for s in even]
        To = [[_parity_sign(t) if not (s & t) else 0 for t in even] for s in odd]
        P = _to_py(mat_mul(Te, To))
        return TransferMatrix(kind="hex_cyl", m=m, states=tuple(even),
                              mat=tuple(tuple(r) for r in P))
    if variant == "torus":
        if 1 << m > cap:
            raise TransferError("hex torus state space exceeds cap")
        states = list(range(1 << m))

        def shift_up(s):  # positions k+1 mod m
            return ((s << 1) & ((1 << m) - 1)) | (s >> (m - 1)) if m > 1 else s

        Te = [[_parity_sign(t) if not (s & (t | shift_up(t))) else 0
               for t in states] for s in states]
        To = [[_parity_sign(t) if not (s & t) else 0 for t in states]
              for s in states]
        P = _to_py(mat_mul(Te, To))
        return TransferMatrix(kind="hex_torus", m=m, states=tuple(states),
                              mat=tuple(tuple(r) for r in P))
    raise TransferError(f"unknown hex variant {variant!r}")


def z_hex_cyl(m: int, n: int, cap: int = 5000) -> int:
    return build_transfer_hex(m, "cyl", cap=cap).trace_powers(n)[n - 1]


def z_hex_torus(m: int, n: int, cap: int = 5000) -> int:
    return build_transfer_hex(m, "torus", cap=cap).trace_powers(n)[n - 1]


# ---------------------------------------------------------------------------
# integer polynomials (ascending coefficient lists, trailing zeros trimmed)


def poly_trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_mul(p, q):
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return poly_trim(out)


def poly_divmod(p, q):
    """Division over Q restricted to exact integer steps; raises on
    non-integer quotients (sufficient for monic/unit-leading divisors)."""
    p, q = poly_trim(p), poly_trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(p)
    quot = [0] * max(0, len(p) - len(q) + 1)
    lead = q[-1]
    while len(rem) >= len(q):
        c = rem[-1]
        if c % lead:
            raise TransferError("non-exact polynomial division")
        k = c // lead
        d = len(rem) - len(q)
        quot[d] = k
        for i, b in enumerate(q):
            rem[d + i] -= k * b
        rem = poly_trim(rem)
        if not rem:
            break
    return poly_trim(quot), poly_trim(rem)


def poly_strip_tpow(p):
    """(k, p / t^k) with p(0) != 0; zero polynomial maps to (0, [])."""
    p = poly_trim(p)
    k = 0
    while p and p[0] == 0:
        p = p[1:]
        k += 1
    return k, p


def poly_reverse(p):
    """Reciprocal polynomial t^deg * p(1/t) (after stripping t powers)."""
    _, p = poly_strip_tpow(p)
    return poly_trim(p[::-1])


_CYCLO_CACHE: dict[int, list[int]] = {}


def cyclotomic_poly(d: int) -> list[int]:
    """Coefficients of the d-th cyclotomic polynomial."""
    if d in _CYCLO_CACHE:
        return _CYCLO_CACHE[d]
    p = [-1] + [0] * (d - 1) + [1]  # t^d - 1
    for e in range(1, d):
        if d % e == 0:
            p, rem = poly_divmod(p, cyclotomic_poly(e))
            assert not rem
    _CYCLO_CACHE[d] = p
    return p


def bareiss_det(rows) -> int:
    """Fraction-free determinant of an integer matrix (destructive on a copy)."""
    a = [list(r) for r in rows]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (pk * row_i[j] - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = pk
    return sign * a[-1][-1] if n else 1


def char_poly(T, cap: int = 64) -> list[int]:
    """Exact characteristic polynomial det(tI - M), ascending coefficients.

    Evaluates the determinant at dim+1 integer points by fraction-free
    elimination, then interpolates exactly.
    """
    M = T.rows() if isinstance(T, TransferMatrix) else _to_py(T)
    d = len(M)
    if d > cap:
        raise TransferError(f"dimension {d} exceeds charpoly cap {cap}")
    xs = list(range(d + 1))
    ys = []
    for x in xs:
        A = [[(x if i == j else 0) - M[i][j] for j in range(d)] for i in range(d)]
        ys.append(bareiss_det(A))
    coeffs = _interpolate_int(xs, ys)
    assert len(coeffs) <= d + 1
    coeffs += [0] * (d + 1 - len(coeffs))
    assert coeffs[-1] == 1, "characteristic polynomial must be monic"
    return coeffs


def _interpolate_int(xs, ys) -> list[int]:
    """Exact Lagrange interpolation with integer result."""
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        num = [Fraction(1)]
        den = Fraction(1)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            num = [Fraction(0)] + num
            for k in range(len(num) - 1):
                num[k] -= num[k + 1] * xj
            den *= xi - xj
        w = Fraction(yi) / den
        for k, c in enumerate(num):
            coeffs[k] += w * c
    out = []
    for c in coeffs:
        assert c.denominator == 1, "interpolation did not land on integers"
        out.append(int(c))
    return poly_trim(out)


@dataclass(frozen=True)
class CyclotomicReport:
    is_cyclotomic: bool
    t_power: int
    factors: dict          # d -> multiplicity of the d-th cyclotomic factor
    remainder: list        # non-cyclotomic part (ascending, unit-normalized)
    order: int | None      # N with p | t^N - 1, when cyclotomic

    def __repr__(self):
        if self.is_cyclotomic:
            fac = " * ".join(f"Phi_{d}^{e}" if e > 1 else f"Phi_{d}"
                             for d, e in sorted(self.factors.items()))
            return f"CyclotomicReport(t^{self.t_power} * {fac or '1'}, N={self.order})"
        return f"CyclotomicReport(non-cyclotomic remainder degree {len(self.remainder) - 1})"


def cyclotomic_test(p, order_bound: int | None = None) -> CyclotomicReport:
    """Decide whether p is (up to sign and a power of t) a product of
    cyclotomic polynomials, by peeling cyclotomic factors exactly.

    order_bound caps the order d of factors tried; default 2 * deg(p)^2.
    The verdict is certified by checking divisibility of t^N - 1, N the lcm
    of the orders found.
    """
    p = poly_trim(p)
    if not p:
        raise TransferError("zero polynomial")
    tpow, p = poly_strip_tpow(p)
    if p[-1] < 0:
        p = [-c for c in p]
    deg = len(p) - 1
    if order_bound is None:
        order_bound = max(2 * deg * deg, 16)
    factors: dict[int, int] = {}
    if abs(p[-1]) == 1 and abs(p[0]) == 1:
        d = 1
        while len(p) > 1 and d <= order_bound:
            phi = cyclotomic_poly(d)
            if len(phi) <= len(p):
                try:
                    q, rem = poly_divmod(p, phi)
                except TransferError:
                    rem = [1]
                while not rem:
                    factors[d] = factors.get(d, 0) + 1
                    p = q
                    if len(phi) > len(p):
                        break
                    try:
                        q, rem = poly_divmod(p, phi)
                    except TransferError:
                        rem = [1]
            d += 1
    ok = p == [1]
    order = None
    if ok and factors:
        order = lcm(*factors.keys())
    elif ok:
        order = 1
    return CyclotomicReport(is_cyclotomic=ok, t_power=tpow,
                            factors=factors, remainder=p if not ok else [1],
                            order=order)
