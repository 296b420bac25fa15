"""Grid graphs for hard-particle models.

Families: square grid patches with open (``S``), cylindrical (``C``) and
toroidal (``T``) boundaries, their hexagonal (brick-wall) counterparts, and
the skew parallelogram region ``P`` used for boundary-prescribed transfer
calculations.

Vertices carry dense integer ids in row-major order over an internal
``rows x cols`` vertex grid; all downstream modules operate on ids only.
A vertex may be *removed* (absent from the graph) or *blocked* (present but
never occupiable; used for degenerate wrap identifications such as the
n = 1 cylinder, where every site is adjacent to itself).

Hexagonal conventions.  The brick-wall representation of the hexagonal
cylinder ``hex_cyl(m, n)`` is a tube of m+1 vertex rows, each a cyclic row
of 2n vertices, with vertical edges between rows i and i+1 in columns of
parity i.  The hexagonal torus ``hex_torus(m, n)`` is the quotient of the
infinite brick wall by the symmetric translation lattice generated by
m*(1,1) and n*(1,-1).  Both conventions are pinned behaviourally: they
reproduce the reference partition-function tables exactly (see
tests/test_grid.py and the acceptance suite), which is the only normative
definition available for these families.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

SQUARE_RECT = "square_rect"
SQUARE_CYL = "square_cyl"
SQUARE_TORUS = "square_torus"
HEX_RECT = "hex_rect"
HEX_CYL = "hex_cyl"
HEX_TORUS = "hex_torus"
PARALLELOGRAM = "parallelogram"

FAMILIES = (SQUARE_RECT, SQUARE_CYL, SQUARE_TORUS,
            HEX_RECT, HEX_CYL, HEX_TORUS, PARALLELOGRAM)


class GridError(ValueError):
    """Invalid graph construction or operation."""


@dataclass(frozen=True)
class Graph:
    """A finite simple undirected graph over dense vertex ids.

    ``adj`` is indexed by id and symmetric; removed vertices have empty
    adjacency and never appear as endpoints.  ``feasible`` is False only
    for boundary-fixed parallelograms whose prescribed particles conflict
    (such a region admits no configuration at all).
    """

    family: str
    m: int
    n: int
    rows: int
    cols: int
    adj: tuple[frozenset, ...]
    removed: frozenset = frozenset()
    blocked: frozenset = frozenset()
    feasible: bool = True
    # parallelogram only: coords[v] = (a, b) cell labels
    coords: tuple = field(default=(), compare=False)

    @property
    def size(self) -> int:
        return self.rows * self.cols

    def live(self) -> list[int]:
        """Ids present in the graph (blocked vertices included)."""
        return [v for v in range(self.size) if v not in self.removed]

    def occupiable(self) -> list[int]:
        """Ids that may belong to an independent set."""
        return [v for v in range(self.size)
                if v not in self.removed and v not in self.blocked]

    def neighbors(self, v: int) -> frozenset:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.size) for v in self.adj[u] if u < v]

    def is_independent(self, vertices) -> bool:
        vs = set(vertices)
        if vs & set(self.removed) or vs & set(self.blocked):
            return False
        return all(not (self.adj[v] & vs) for v in vs)

    def vertex_id(self, i: int, j: int) -> int:
        """Dense id of the 1-based (row, col) vertex of the internal grid."""
        if not (1 <= i <= self.rows and 1 <= j <= self.cols):
            raise GridError(f"vertex ({i},{j}) outside {self.rows}x{self.cols} grid")
        return (i - 1) * self.cols + (j - 1)

    def vertex_rc(self, v: int) -> tuple[int, int]:
        return v // self.cols + 1, v % self.cols + 1

    def neighbor_masks(self) -> list[int]:
        """adjacency as bitmasks, indexed by id (removed -> 0)."""
        return [sum(1 << u for u in a) for a in self.adj]

    def to_json(self) -> str:
        return json.dumps({
            "family": self.family, "m": self.m, "n": self.n,
            "edges": sorted(self.edges()),
            "removed": sorted(self.removed),
            "blocked": sorted(self.blocked),
        })

    def __repr__(self):
        return (f"Graph({self.family}, m={self.m}, n={self.n}, "
                f"|V|={len(self.live())}, |E|={self.edge_count()})")


def _build(family, m, n, rows, cols, edge_pairs, blocked=(), coords=()):
    size = rows * cols
    adj = [set() for _ in range(size)]
    for a, b in edge_pairs:
        if a == b:
            raise GridError("self-loop passed to _build; block the vertex instead")
        adj[a].add(b)
        adj[b].add(a)
    return Graph(family=family, m=m, n=n, rows=rows, cols=cols,
                 adj=tuple(frozenset(a) for a in adj),
                 blocked=frozenset(blocked), coords=tuple(coords))


def _check_size(m, n):
    if m < 1 or n < 1:
        raise GridError(f"grid sizes must be positive, got m={m}, n={n}")


def build_square_rect(m: int, n: int) -> Graph:
    """m x n patch of the square grid, open boundary."""
    _check_size(m, n)
    edges = []
    for i in range(m):
        for j in range(n):
            v = i * n + j
            if j + 1 < n:
                edges.append((v, v + 1))
            if i + 1 < m:
                edges.append((v, v + n))
    return _build(SQUARE_RECT, m, n, m, n, edges)


def _wrap_pairs(m, n, horizontal):
    """Extra edge pairs identifying opposite sides; None entry means self-loop."""
    out = []
    if horizontal:
        for i in range(m):
            a, b = i * n, i * n + (n - 1)
            out.append((a, b) if a != b else None)
    else:
        for j in range(n):
            a, b = j, (m - 1) * n + j
            out.append((a, b) if a != b else None)
    return out


def build_square_cyl(m: int, n: int) -> Graph:
    """Square cylinder: columns 1 and n identified (wrap in the n direction).

    n = 1 makes every vertex self-adjacent: all vertices are blocked and only
    the empty configuration survives.  n = 2 wrap edges duplicate existing
    ones and are dropped.
    """
    _check_size(m, n)
    base = build_square_rect(m, n)
    blocked = set()
    edges = base.edges()
    for p in _wrap_pairs(m, n, horizontal=True):
        if p is None:
            blocked.update(range(m * n))
        else:
            edges.append(p)
    return _build(SQUARE_CYL, m, n, m, n, set(map(lambda e: tuple(sorted(e)), edges)),
                  blocked=blocked)


def build_square_torus(m: int, n: int) -> Graph:
    """Square torus: both wrap directions, degenerate sizes as in the cylinder."""
    _check_size(m, n)
    base = build_square_rect(m, n)
    blocked = set()
    edges = base.edges()
    for horizontal, k in ((True, n), (False, m)):
        for p in _wrap_pairs(m, n, horizontal):
            if p is None:
                blocked.update(range(m * n))
            else:
                edges.append(p)
    return _build(SQUARE_TORUS, m, n, m, n, set(map(lambda e: tuple(sorted(e)), edges)),
                  blocked=blocked)


def _hex_edges(rows, cols, wrap):
    """Brick-wall edges on a rows x cols vertex grid.

    Each row is a path (cycle if wrap); vertical edges join rows i, i+1 in
    columns j with i + j even.
    """
    edges = set()
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.add((v, v + 1))
            elif wrap and cols > 2:
                edges.add((i * cols, v))
            elif wrap and cols == 2:
                pass  # wrap duplicates the single row edge
        if cols == 2 and wrap:
            edges.add((i * cols, i * cols + 1))
    for i in range(rows - 1):
        for j in range(cols):
            if (i + j) % 2 == 0:
                edges.add((i * cols + j, (i + 1) * cols + j))
    return edges


def build_hex_rect(m: int, n: int) -> Graph:
    """Brick-wall rectangle: m+1 vertex rows of 2n columns, open boundary."""
    _check_size(m, n)
    rows, cols = m + 1, 2 * n
    return _build(HEX_RECT, m, n, rows, cols, _hex_edges(rows, cols, wrap=False))


def build_hex_cyl(m: int, n: int) -> Graph:
    """Hexagonal cylinder: the brick-wall tube (m+1 rows, 2n columns, row wrap)."""
    _check_size(m, n)
    rows, cols = m + 1, 2 * n
    return _build(HEX_CYL, m, n, rows, cols, _hex_edges(rows, cols, wrap=True))


def build_hex_torus(m: int, n: int) -> Graph:
    """Hexagonal torus: brick wall modulo the lattice <m*(1,1), n*(1,-1)>.

    In sheared coordinates the vertex set is {(p, q): p in Z_2m, q in Z_2n,
    p = q mod 2} with edges (p,q)-(p+1,q-1) always and (p,q)-(p+1,q+1) for
    even p.  Internal grid: row p holds the n vertices q = (p mod 2) + 2k.
    """
    _check_size(m, n)
    rows, cols = 2 * m, n
    P, Q = 2 * m, 2 * n

    def vid(p, q):
        p %= P
        q %= Q
        assert (p - q) % 2 == 0
        return p * cols + (q - (p % 2)) // 2 % cols

    edges = set()
    for p in range(P):
        for q in range(p % 2, Q, 2):
            for dq in (-1, 1):
                if dq == 1 and p % 2 == 1:
                    continue
                a, b = vid(p, q), vid(p + 1, q + dq)
                if a != b:
                    edges.add(tuple(sorted((a, b))))
    return _build(HEX_TORUS, m, n, rows, cols, edges)


def build_parallelogram(m: int, n: int) -> Graph:
    """Skew parallelogram region: cells (a, b) with 1 <= a <= m and
    1-a < b <= 1-a+n, square-grid adjacency restricted to the region."""
    _check_size(m, n)
    coords = []
    for a in range(1, m + 1):
        for b in range(2 - a, 2 - a + n):
            coords.append((a, b))
    index = {c: k for k, c in enumerate(coords)}
    edges = set()
    for (a, b), v in index.items():
        for da, db in ((0, 1), (1, 0)):
            w = index.get((a + da, b + db))
            if w is not None:
                edges.add((v, w))
    return _build(PARALLELOGRAM, m, n, m, n, edges, coords=coords)


def parallelogram_boundary(g: Graph, side: str) -> dict[int, int]:
    """Map row a -> id of the first ('left') or last ('right') cell of row a."""
    if g.family != PARALLELOGRAM:
        raise GridError("boundary cells are defined for parallelograms only")
    out = {}
    for a in range(1, g.m + 1):
        b = (2 - a) if side == "left" else (1 - a + g.n)
        out[a] = g.coords.index((a, b))
    return out


def fix_boundary(g: Graph, A, B) -> tuple[Graph, int]:
    """Prescribe boundary particles on a parallelogram.

    Rows in A (resp. B) get a particle on the leftmost (resp. rightmost)
    cell; the remaining boundary cells are forced empty.  Forced particles
    and their neighbours are deleted (they carry no sign); forced-empty
    cells are deleted alone.  Returns the reduced graph and |A| + |B|.

    Any subsets of [m] are accepted: boundary cells within one side are
    pairwise non-adjacent on the skew region.  Conflicting prescriptions
    (two forced particles adjacent, or contradictory demands on a shared
    cell when n = 1) yield an infeasible graph, whose partition function
    is 0 by convention.
    """
    if g.family != PARALLELOGRAM:
        raise GridError("fix_boundary expects a parallelogram")
    A, B = set(A), set(B)
    if not A <= set(range(1, g.m + 1)) or not B <= set(range(1, g.m + 1)):
        raise GridError("boundary sets must be subsets of 1..m")
    left = parallelogram_boundary(g, "left")
    right = parallelogram_boundary(g, "right")
    occupied, empty = set(), set()
    for rows_set, cells in ((A, left), (B, right)):
        for a in range(1, g.m + 1):
            (occupied if a in rows_set else empty).add(cells[a])
    feasible = not (occupied & empty)
    for v in occupied:
        if g.adj[v] & occupied:
            feasible = False
    kill = set(occupied) | set(empty)
    for v in occupied:
        kill |= g.adj[v]
    adj = [frozenset(a - kill) if v not in kill else frozenset()
           for v, a in enumerate(g.adj)]
    out = Graph(family=g.family, m=g.m, n=g.n, rows=g.rows, cols=g.cols,
                adj=tuple(adj), removed=g.removed | frozenset(kill),
                blocked=g.blocked - kill, feasible=feasible, coords=g.coords)
    return out, len(A) + len(B)


def induced_delete(g: Graph, vertices) -> Graph:
    """Graph with the given vertices removed and incident edges dropped."""
    vs = set(vertices)
    bad = vs & set(g.removed)
    if bad:
        raise GridError(f"vertices already removed: {sorted(bad)}")
    if not vs <= set(range(g.size)):
        raise GridError("vertex id out of range")
    adj = [frozenset(a - vs) if v not in vs else frozenset()
           for v, a in enumerate(g.adj)]
    return replace(g, adj=tuple(adj), removed=g.removed | frozenset(vs),
                   blocked=g.blocked - vs)


_BUILDERS = {
    SQUARE_RECT: build_square_rect,
    SQUARE_CYL: build_square_cyl,
    SQUARE_TORUS: build_square_torus,
    HEX_RECT: build_hex_rect,
    HEX_CYL: build_hex_cyl,
    HEX_TORUS: build_hex_torus,
    PARALLELOGRAM: build_parallelogram,
}


def build(family: str, m: int, n: int) -> Graph:
    """Dispatch on family name."""
    try:
        builder = _BUILDERS[family]
    except KeyError:
        raise GridError(f"unknown family {family!r}; expected one of {FAMILIES}")
    return builder(m, n)


def graph_from_json(text: str) -> Graph:
    d = json.loads(text)
    g = build(d["family"], d["m"], d["n"])
    if set(d.get("removed", ())):
        g = induced_delete(g, d["removed"])
    want = {tuple(sorted(e)) for e in d["edges"]}
    if {tuple(sorted(e)) for e in g.edges()} != want:
        raise GridError("serialized edge set does not match the family builder")
    return g
