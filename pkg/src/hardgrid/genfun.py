"""Gaussian-integer transfer matrices and boundary generating functions.

For the skew region the transfer matrix T(m) is indexed by all subsets of
[m]; the rectangle variant T'(m) is indexed by independent sets on an
m-path.  Entries are (-i)^(|A|+|B|) on compatible pairs.  (The symmetric
weight splitting makes the matrices complex; both are diagonally similar
to integer matrices, which is how characteristic polynomials are computed
exactly.)

The boundary generating function

    G_{A,B}(t) = [(1 - t T(m))^{-1}]_{A,B}
               = delta_{A,B} + (-i)^(|A|+|B|) * sum_{n>=1} Z(P_{m,n+1}(A,B)) t^n

is computed two independent ways: entries of T(m) powers, and direct
partition functions of boundary-fixed parallelograms (forced boundary
particles carry no sign).  The two must agree coefficient by coefficient;
g_series asserts this.  Rational reconstruction is exact linear algebra
over Q(i).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import grid as _grid
from .complexes import alternating_sum
from .transfer import bareiss_det, _interpolate_int, poly_trim, poly_strip_tpow


class GenfunError(ValueError):
    pass


# ---------------------------------------------------------------------------
# exact Gaussian integers and rationals


@dataclass(frozen=True)
class GaussInt:
    re: int = 0
    im: int = 0

    def __add__(self, o):
        return GaussInt(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return GaussInt(self.re - o.re, self.im - o.im)

    def __mul__(self, o):
        if isinstance(o, int):
            return GaussInt(self.re * o, self.im * o)
        return GaussInt(self.re * o.re - self.im * o.im,
                        self.re * o.im + self.im * o.re)

    def __neg__(self):
        return GaussInt(-self.re, -self.im)

    def conj(self):
        return GaussInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def __bool__(self):
        return bool(self.re or self.im)

    def exact_div(self, o: "GaussInt") -> "GaussInt":
        num = self * o.conj()
        d = o.norm()
        if d == 0 or num.re % d or num.im % d:
            raise GenfunError(f"non-exact Gaussian division {self}/{o}")
        return GaussInt(num.re // d, num.im // d)

    def __repr__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        return f"({self.re}{self.im:+}i)"


GZERO = GaussInt(0, 0)
GONE = GaussInt(1, 0)


def i_power(k: int) -> GaussInt:
    return (GaussInt(1, 0), GaussInt(0, 1),
            GaussInt(-1, 0), GaussInt(0, -1))[k % 4]


def neg_i_power(k: int) -> GaussInt:
    return i_power(-k)


@dataclass(frozen=True)
class GaussRational:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(x) -> "GaussRational":
        if isinstance(x, GaussRational):
            return x
        if isinstance(x, GaussInt):
            return GaussRational(Fraction(x.re), Fraction(x.im))
        return GaussRational(Fraction(x), Fraction(0))

    def __add__(self, o):
        return GaussRational(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return GaussRational(self.re - o.re, self.im - o.im)

    def __mul__(self, o):
        return GaussRational(self.re * o.re - self.im * o.im,
                             self.re * o.im + self.im * o.re)

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __truediv__(self, o):
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError
        return GaussRational((self.re * o.re + self.im * o.im) / n,
                             (self.im * o.re - self.re * o.im) / n)

    def __bool__(self):
        return bool(self.re or self.im)

    def as_gauss_int(self) -> GaussInt:
        if self.re.denominator != 1 or self.im.denominator != 1:
            raise GenfunError(f"{self} is not a Gaussian integer")
        return GaussInt(int(self.re), int(self.im))

    def __repr__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


GR_ZERO = GaussRational()
GR_ONE = GaussRational(Fraction(1), Fraction(0))


# ---------------------------------------------------------------------------
# the matrices


def subset_index(m: int) -> list[frozenset]:
    """All subsets of [m] = {1..m}, ordered by (size, elements)."""
    out = []
    for k in range(m + 1):
        out.extend(frozenset(c) for c in itertools.combinations(range(1, m + 1), k))
    return out


def path_subset_index(m: int) -> list[frozenset]:
    """Independent sets on the path 1-2-...-m, same ordering."""
    return [s for s in subset_index(m)
            if not any(j + 1 in s for j in s)]


def _compatible_skew(A: frozenset, B: frozenset, m: int) -> bool:
    Bshift = {j + 1 for j in B if j <= m - 1}
    return not (A & B) and not (A & Bshift)


def build_Tm(m: int, cap: int = 8) -> tuple[list[frozenset], list[list[GaussInt]]]:
    """T(m): 2^m x 2^m over subsets of [m]; entries (-i)^(|A|+|B|) when
    A cap B = A cap B' = empty (B' the downward shift of B)."""
    if m > cap:
        raise GenfunError(f"m={m} exceeds cap {cap}")
    idx = subset_index(m)
    mat = [[neg_i_power(len(A) + len(B)) if _compatible_skew(A, B, m) else GZERO
            for B in idx] for A in idx]
    return idx, mat


def build_Tpm(m: int, cap: int = 8) -> tuple[list[frozenset], list[list[GaussInt]]]:
    """T'(m): indexed by path-independent subsets; entries (-i)^(|A|+|B|)
    when A and B are disjoint."""
    if m > cap:
        raise GenfunError(f"m={m} exceeds cap {cap}")
    idx = path_subset_index(m)
    mat = [[neg_i_power(len(A) + len(B)) if not A & B else GZERO
            for B in idx] for A in idx]
    return idx, mat


def _real_similar(kind: str, m: int) -> list[list[int]]:
    """Integer matrix diagonally similar to T(m) or T'(m): conjugating by
    diag((-i)^|A|) leaves (-1)^|A| times the 0/1 compatibility matrix."""
    if kind == "skew":
        idx = subset_index(m)
        compat = lambda A, B: _compatible_skew(A, B, m)
    elif kind == "rect":
        idx = path_subset_index(m)
        compat = lambda A, B: not (A & B)
    else:
        raise GenfunError(kind)
    return [[(-1) ** len(A) if compat(A, B) else 0 for B in idx] for A in idx]


def _charpoly_int(M: list[list[int]]) -> list[int]:
    d = len(M)
    xs = list(range(d + 1))
    ys = []
    for x in xs:
        A = [[(x if i == j else 0) - M[i][j] for j in range(d)] for i in range(d)]
        ys.append(bareiss_det(A))
    coeffs = _interpolate_int(xs, ys)
    coeffs += [0] * (d + 1 - len(coeffs))
    return coeffs


@lru_cache(maxsize=None)
def tm_charpoly(m: int) -> tuple[int, ...]:
    """Characteristic polynomial of T(m), ascending (exact; real)."""
    return tuple(_charpoly_int(_real_similar("skew", m)))


@lru_cache(maxsize=None)
def tpm_charpoly(m: int) -> tuple[int, ...]:
    """Characteristic polynomial of T'(m), ascending (exact; real)."""
    return tuple(_charpoly_int(_real_similar("rect", m)))


@dataclass(frozen=True)
class SpectraReport:
    m: int
    match: bool
    extra_zeros: int           # zero eigenvalues of T(m) beyond T'(m)
    stripped: tuple[int, ...]  # the common t-stripped polynomial


def spectra_match(m: int) -> SpectraReport:
    """The spectra of T(m) and T'(m) agree apart from zero eigenvalues."""
    p = list(tm_charpoly(m))
    q = list(tpm_charpoly(m))
    kp, ps = poly_strip_tpow(p)
    kq, qs = poly_strip_tpow(q)
    if ps != qs:
        raise GenfunError(f"spectra differ for m={m}: {ps} vs {qs}")
    return SpectraReport(m=m, match=True, extra_zeros=kp - kq,
                         stripped=tuple(ps))


# ---------------------------------------------------------------------------
# series


@lru_cache(maxsize=None)
def _tm_row_series(m: int, A: frozenset, N: int) -> dict:
    """{B: [coefficients of G_{A,B}, matrix-power path]} for all B."""
    idx, mat = build_Tm(m)
    pos = {B: j for j, B in enumerate(idx)}
    if A not in pos:
        raise GenfunError(f"{set(A)} is not a subset of [{m}]")
    vec = [GZERO] * len(idx)
    vec[pos[A]] = GONE
    series = {B: [GONE if B == A else GZERO] for B in idx}
    for _ in range(N):
        new = [GZERO] * len(idx)
        for i, w in enumerate(vec):
            if w:
                row = mat[i]
                for j, e in enumerate(row):
                    if e:
                        new[j] = new[j] + w * e
        vec = new
        for B, j in pos.items():
            series[B].append(vec[j])
    return series


def z_parallelogram(m: int, j: int, A, B) -> int:
    """Z(P_{m,j}(A,B)): boundary-fixed skew region, forced particles
    unweighted; conflicting prescriptions give 0.

    A prescribes the boundary the transfer leaves from and B the one it
    arrives at; with the row-major region layout these are the last and
    first cells per row respectively (the skew makes the printed matrix
    the transpose of the geometric column step, so the sides mirror)."""
    g = _grid.build_parallelogram(m, j)
    fixed, _ = _grid.fix_boundary(g, B, A)
    return alternating_sum(fixed)


def g_series(m: int, A, B, N: int, method: str = "both") -> list[GaussInt]:
    """First N+1 coefficients of G_{A,B}(t).

    method 'matrix' uses powers of T(m); 'region' uses boundary-fixed
    partition functions; 'both' computes the two independently and fails
    loudly on any mismatch."""
    A, B = frozenset(A), frozenset(B)
    out_m = out_r = None
    if method in ("matrix", "both"):
        out_m = list(_tm_row_series(m, A, N)[B])
    if method in ("region", "both"):
        w = neg_i_power(len(A) + len(B))
        out_r = [GONE if A == B else GZERO]
        for n in range(1, N + 1):
            out_r.append(w * z_parallelogram(m, n + 1, A, B))
    if method == "both" and out_m != out_r:
        k = next(i for i, (a, b) in enumerate(zip(out_m, out_r)) if a != b)
        raise GenfunError(
            f"G series paths disagree for m={m}, A={set(A)}, B={set(B)} "
            f"at t^{k}: matrix {out_m[k]} vs region {out_r[k]}")
    return out_m if out_m is not None else out_r


def trace_series(m: int, N: int) -> list[GaussInt]:
    """Series of tr(1 - t T(m))^{-1} = sum_A G_{A,A}(t)."""
    idx, _ = build_Tm(m)
    total = [GZERO] * (N + 1)
    for A in idx:
        s = _tm_row_series(m, A, N)[A]
        total = [a + b for a, b in zip(total, s)]
    return total


# ---------------------------------------------------------------------------
# rational functions over Q(i)


def gr_poly_trim(p):
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def gr_poly_mul(p, q):
    if not p or not q:
        return []
    out = [GR_ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] = out[i + j] + a * b
    return gr_poly_trim(out)


def gr_poly_divmod(p, q):
    p, q = gr_poly_trim(p), gr_poly_trim(q)
    if not q:
        raise ZeroDivisionError
    rem = list(p)
    quot = [GR_ZERO] * max(0, len(p) - len(q) + 1)
    while len(rem) >= len(q):
        k = rem[-1] / q[-1]
        d = len(rem) - len(q)
        quot[d] = k
        for i, b in enumerate(q):
            rem[d + i] = rem[d + i] - k * b
        rem = gr_poly_trim(rem)
    return gr_poly_trim(quot), gr_poly_trim(rem)


def gr_poly_gcd(p, q):
    p, q = gr_poly_trim(p), gr_poly_trim(q)
    while q:
        _, r = gr_poly_divmod(p, q)
        p, q = q, r
    if p:
        lead = p[-1]
        p = [c / lead for c in p]
    return p


@dataclass(frozen=True)
class RationalQi:
    """Reduced rational function in t over Q(i); the denominator is
    normalized so its lowest nonzero coefficient is 1."""

    num: tuple
    den: tuple

    @staticmethod
    def make(num, den) -> "RationalQi":
        num = [GaussRational.of(c) for c in num]
        den = [GaussRational.of(c) for c in den]
        num, den = gr_poly_trim(num), gr_poly_trim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        g = gr_poly_gcd(num, den)
        if len(g) > 1:
            num, _ = gr_poly_divmod(num, g)
            den, _ = gr_poly_divmod(den, g)
        low = next(c for c in den if c)
        num = [c / low for c in num]
        den = [c / low for c in den]
        return RationalQi(num=tuple(num), den=tuple(den))

    def series(self, N: int) -> list[GaussRational]:
        if not self.den or not self.den[0]:
            raise GenfunError("denominator vanishes at 0; no power series")
        out = []
        num = list(self.num) + [GR_ZERO] * (N + 1)
        d0 = self.den[0]
        for n in range(N + 1):
            acc = num[n]
            for k in range(1, min(n, len(self.den) - 1) + 1):
                acc = acc - self.den[k] * out[n - k]
            out.append(acc / d0)
        return out

    def series_gauss(self, N: int) -> list[GaussInt]:
        return [c.as_gauss_int() for c in self.series(N)]

    def __eq__(self, other):
        if not isinstance(other, RationalQi):
            return NotImplemented
        return (gr_poly_mul(list(self.num), list(other.den))
                == gr_poly_mul(list(other.num), list(self.den)))

    def __hash__(self):
        return hash((len(self.num), len(self.den)))

    def __repr__(self):
        fmt = lambda p: " + ".join(f"{c}*t^{k}" if k else f"{c}"
                                   for k, c in enumerate(p) if c) or "0"
        return f"({fmt(self.num)}) / ({fmt(self.den)})"


def rational_from_int_polys(num, den) -> RationalQi:
    return RationalQi.make([GaussRational.of(c) for c in num],
                           [GaussRational.of(c) for c in den])


def _solve_gr(Amat, bvec):
    """Gaussian elimination over Q(i); returns solution or None."""
    rows = len(Amat)
    cols = len(Amat[0]) if rows else 0
    M = [list(r) + [bvec[i]] for i, r in enumerate(Amat)]
    piv_cols = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if M[i][c]), None)
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        inv = M[r][c]
        M[r] = [x / inv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        piv_cols.append(c)
        r += 1
        if r == rows:
            break
    # consistency
    for i in range(r, rows):
        if M[i][cols]:
            return None
    sol = [GR_ZERO] * cols
    for i, c in enumerate(piv_cols):
        sol[c] = M[i][cols]
    return sol


def rational_fit(series, max_num_deg: int, max_den_deg: int,
                 guard: int = 2) -> RationalQi | None:
    """Minimal rational function matching the series.

    Scans candidate degrees by total degree; a candidate must reproduce
    every provided coefficient, leaving at least `guard` coefficients
    beyond the fitted window as verification.  Returns None if nothing
    fits within the bounds."""
    c = [GaussRational.of(x) for x in series]
    L = len(c)
    if L < max_num_deg + max_den_deg + 2:
        raise GenfunError("series too short for the requested degrees "
                          f"({L} < {max_num_deg + max_den_deg + 2})")
    for total in range(0, max_num_deg + max_den_deg + 1):
        for dq in range(0, min(total, max_den_deg) + 1):
            dp = total - dq
            if dp > max_num_deg:
                continue
            window = dp + dq + 1
            if window + guard > L:
                continue
            # q0 = 1; unknowns q_1..q_dq from the linear window, then p
            rows_idx = range(dp + 1, dp + dq + 1)
            A = [[c[j - k] if 0 <= j - k < L else GR_ZERO
                  for k in range(1, dq + 1)] for j in rows_idx]
            b = [-c[j] for j in rows_idx]
            q = _solve_gr(A, b)
            if q is None:
                continue
            den = [GR_ONE] + q
            num = []
            for j in range(dp + 1):
                acc = GR_ZERO
                for k in range(0, min(j, dq) + 1):
                    acc = acc + den[k] * c[j - k]
                num.append(acc)
            cand = RationalQi.make(num, den)
            if cand.series(L - 1) == c:
                return cand
    return None


# ---------------------------------------------------------------------------
# the published identities


@dataclass(frozen=True)
class CheckReport:
    name: str
    ok: bool
    details: tuple = ()

    def __repr__(self):
        return f"CheckReport({self.name}: {'ok' if self.ok else self.details})"


def lemma11_check(m: int, N: int = 24) -> CheckReport:
    """G_{A,A} + G_{B,B} = 2 whenever A contains a consecutive triple
    j-1, j, j+1 and B = A - {j}."""
    details = []
    for A in subset_index(m):
        for j in sorted(A):
            if j - 1 in A and j + 1 in A:
                B = A - {j}
                sa = g_series(m, A, B=A, N=N, method="matrix")
                sb = g_series(m, B, B=B, N=N, method="matrix")
                tot = [x + y for x, y in zip(sa, sb)]
                want = [GaussInt(2, 0)] + [GZERO] * N
                if tot != want:
                    details.append((tuple(sorted(A)), j))
    return CheckReport(name=f"lemma11 m={m}", ok=not details,
                       details=tuple(details))


def recursion_checks(m: int, horizon: int = 24) -> list[CheckReport]:
    """Term-by-term verification of the published Z(P) recursions."""
    out = []
    if m == 4:
        # Z(P_{4,j}(0,beta)) = -Z(P_{4,j-3}(0,beta)) for j >= 5
        ok = all(z_parallelogram(4, j, (), beta) ==
                 -z_parallelogram(4, j - 3, (), beta)
                 for beta in subset_index(4)
                 for j in range(5, horizon))
        out.append(CheckReport("m=4 empty-left recursion (period 3)", ok))
        # Z(P_{4,j}({4},{4})) = Z(P_{4,j-4}({4},{4})) + Z(P_{4,j-4}(0,{4}))
        ok = all(z_parallelogram(4, j, {4}, {4}) ==
                 z_parallelogram(4, j - 4, {4}, {4})
                 + z_parallelogram(4, j - 4, (), {4})
                 for j in range(6, horizon))
        out.append(CheckReport("m=4 corner recursion (period 4)", ok))
        # Z(P_{4,j}(A,A)) = Z(P_{4,j-1}(0,A)) + Z(P_{4,j-4}(A,A)), A = {1,4}
        A = {1, 4}
        ok = all(z_parallelogram(4, j, A, A) ==
                 z_parallelogram(4, j - 1, (), A)
                 + z_parallelogram(4, j - 4, A, A)
                 for j in range(6, horizon))
        out.append(CheckReport("m=4 diagonal-pair recursion", ok))
        # quoted truncations
        t1 = g_series(4, (), {4}, 3, method="region")
        ok = t1 == [GZERO, GaussInt(0, -1), GZERO, GZERO]
        out.append(CheckReport("m=4 empty-corner window = -i t", ok))
        t2 = g_series(4, {4}, {4}, 4, method="region")
        ok = t2 == [GONE, GZERO, GZERO, GZERO, GONE]
        out.append(CheckReport("m=4 corner window = 1 + t^4", ok))
        t3 = g_series(4, {1, 4}, {1, 4}, 4, method="region")
        ok = t3 == [GONE, GZERO, GONE, GZERO, GONE]
        out.append(CheckReport("m=4 pair window = 1 + t^2 + t^4", ok))
    elif m == 6:
        # Z(P_{6,j}(0,beta)) = Z(P_{6,j-14}(0,beta)) for j >= 16
        ok = all(z_parallelogram(6, j, (), beta) ==
                 z_parallelogram(6, j - 14, (), beta)
                 for beta in ((), {2, 3, 6}, {1}, {2}, {4, 6})
                 for j in range(16, horizon))
        out.append(CheckReport("m=6 empty-left recursion (period 14)", ok))
        # Z(P_{6,j}({2},A)) = -Z(P_{6,j-6}(0,A)), A = {2,3,6}
        A = {2, 3, 6}
        ok = all(z_parallelogram(6, j, {2}, A) ==
                 -z_parallelogram(6, j - 6, (), A)
                 for j in range(8, horizon))
        out.append(CheckReport("m=6 shifted recursion (period 6)", ok))
        # Z(P_{6,j}(A,A)) = Z(P_{6,j-4}(A,A)) - Z(P_{6,j-1}(0,A))
        #                   - Z(P_{6,j-4}({2},A))
        ok = all(z_parallelogram(6, j, A, A) ==
                 z_parallelogram(6, j - 4, A, A)
                 - z_parallelogram(6, j - 1, (), A)
                 - z_parallelogram(6, j - 4, {2}, A)
                 for j in range(6, horizon))
        out.append(CheckReport("m=6 main recursion", ok))
        # quoted windows
        t1 = g_series(6, (), A, 14, method="region")
        want = [GZERO] * 15
        want[1] = want[4] = want[12] = GaussInt(0, -1)
        out.append(CheckReport("m=6 window = -i(t + t^4 + t^12)",
                               t1 == want))
        t2 = g_series(6, A, A, 4, method="region")
        out.append(CheckReport("m=6 window = 1 - t^2 + t^4",
                               t2 == [GONE, GZERO, -GONE, GZERO, GONE]))
    else:
        raise GenfunError("recursion checks cover m = 4 and m = 6")
    return out
