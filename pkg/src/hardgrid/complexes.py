"""Independence complexes and alternating sums.

Faces are int bitmasks over the dense vertex ids of the host graph (or over
positions of an explicit ground tuple for derived complexes).  The empty
face is the mask 0 and is always present in a nonvoid complex.

The partition function at activity -1,

    Z(G) = sum over independent sets sigma of (-1)^|sigma|,

equals minus the reduced Euler characteristic of the independence complex.
``alternating_sum`` streams the enumeration for small graphs and switches
to an exact frontier dynamic program for graphs too large to enumerate.
"""

from __future__ import annotations

from dataclasses import dataclass

DENSE_VERTEX_CAP = 64          # beyond this, enumeration still works (big ints)
DEFAULT_FACE_BUDGET = 2_000_000
DEFAULT_BRUTE_CAP = 26         # vertices; above this alternating_sum uses the DP


class BudgetError(RuntimeError):
    """A configured enumeration or materialization budget was exceeded."""


def popcount(x: int) -> int:
    return x.bit_count()


def face_vertices(mask: int) -> tuple[int, ...]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return tuple(out)


def face_of(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def enumerate_independent_sets(g, cap: int | None = None):
    """Yield every independent set of g exactly once as a bitmask, starting
    with the empty set.  Blocked vertices never appear.

    cap bounds the number of occupiable vertices for callers that intend to
    materialize; pass None to stream regardless of size.
    """
    if not g.feasible:
        return
    verts = g.occupiable()
    if cap is not None and len(verts) > cap:
        raise BudgetError(f"{len(verts)} occupiable vertices exceed cap {cap}")
    nbr = g.neighbor_masks()
    order = sorted(verts)
    k = len(order)

    # iterative backtracking in id order; state = (index, current mask, forbidden mask)
    stack = [(0, 0, 0)]
    while stack:
        i, mask, forb = stack.pop()
        if i == 0 and mask == 0:
            yield 0
        while i < k:
            v = order[i]
            bit = 1 << v
            i += 1
            if forb & bit:
                continue
            # branch: take v now, or continue without it
            stack.append((i, mask | bit, forb | nbr[v]))
            yield mask | bit
    return


def _frontier_z(g) -> int:
    """Exact alternating sum by dynamic programming over a sliding frontier.

    Processes occupiable vertices in id order; state keys are the occupied
    subsets of the frontier (vertices with unprocessed neighbours).
    """
    if not g.feasible:
        return 0
    verts = sorted(g.occupiable())
    vset = set(verts)
    last = {}
    for v in verts:
        future = [u for u in g.adj[v] if u in vset]
        last[v] = max([v] + future)
    states = {0: 1}
    active: list[int] = []
    for v in verts:
        nbr = g.adj[v]
        new = {}
        for occ, w in states.items():
            new[occ] = new.get(occ, 0) + w
            if not any((occ >> i) & 1 for i, u in enumerate(active) if u in nbr):
                key = occ | (1 << len(active))
                new[key] = new.get(key, 0) - w
        active = active + [v]
        retire = [i for i, u in enumerate(active) if last[u] <= v]
        if retire:
            keep = [i for i in range(len(active)) if i not in retire]
            proj = {}
            for occ, w in new.items():
                key = 0
                for pos, i in enumerate(keep):
                    if (occ >> i) & 1:
                        key |= 1 << pos
                proj[key] = proj.get(key, 0) + w
            new = proj
            active = [active[i] for i in keep]
        states = new
    return sum(states.values())


def alternating_sum(g, brute_cap: int = DEFAULT_BRUTE_CAP) -> int:
    """Z(G) at activity -1.  Streams the enumerator for small graphs, else
    uses the frontier DP (identical results, O(1) face memory)."""
    if not g.feasible:
        return 0
    if len(g.occupiable()) <= brute_cap:
        total = 0
        for mask in enumerate_independent_sets(g):
            total += -1 if popcount(mask) & 1 else 1
        return total
    return _frontier_z(g)


@dataclass(frozen=True)
class SimplicialComplex:
    """Explicit simplicial complex, graded by dimension.

    ``ground`` holds the vertex labels; faces are bitmasks over positions
    0..len(ground)-1.  ``faces[k]`` lists the k-dimensional faces (k >= -1);
    the empty face sits at dimension -1.
    """

    ground: tuple
    faces: dict[int, tuple[int, ...]]

    @property
    def dim(self) -> int:
        return max((k for k, fs in self.faces.items() if fs), default=-1)

    @property
    def ground_size(self) -> int:
        return len(self.ground)

    def face_count(self) -> int:
        return sum(len(fs) for fs in self.faces.values())

    def all_faces(self):
        for k in sorted(self.faces):
            yield from self.faces[k]

    def face_set(self) -> set[int]:
        return {f for fs in self.faces.values() for f in fs}

    def has_face(self, mask: int) -> bool:
        return mask in set(self.faces.get(popcount(mask) - 1, ()))

    def f_vector(self) -> dict[int, int]:
        return {k: len(fs) for k, fs in sorted(self.faces.items()) if fs}

    def reduced_euler_characteristic(self) -> int:
        return sum((-1 if k % 2 else 1) * len(fs) for k, fs in self.faces.items())

    def is_downward_closed(self) -> bool:
        fs = self.face_set()
        for f in fs:
            m = f
            while m:
                low = m & -m
                if f ^ low not in fs:
                    return False
                m ^= low
        return bool(fs) == (0 in fs) or not fs

    def is_simplex(self) -> bool:
        """Full simplex on the union of its faces' vertices."""
        top = 0
        for f in self.face_set():
            top |= f
        return self.face_count() == (1 << popcount(top))

    def to_text(self) -> str:
        lines = ["# one face per line, space-separated ground labels; () is the empty face"]
        for f in self.all_faces():
            lines.append(" ".join(str(self.ground[i]) for i in face_vertices(f)))
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {"ground": list(self.ground),
                "faces": {str(k): [list(face_vertices(f)) for f in fs]
                          for k, fs in sorted(self.faces.items())}}

    def __repr__(self):
        return f"SimplicialComplex(|ground|={self.ground_size}, f={self.f_vector()})"


def complex_from_faces(ground, masks) -> SimplicialComplex:
    """Build a graded complex from an iterable of face masks (must contain 0
    when nonempty; downward closure is the caller's responsibility)."""
    graded: dict[int, list[int]] = {}
    for f in set(masks):
        graded.setdefault(popcount(f) - 1, []).append(f)
    return SimplicialComplex(ground=tuple(ground),
                             faces={k: tuple(sorted(fs)) for k, fs in sorted(graded.items())})


def complex_from_text(text: str) -> SimplicialComplex:
    labels: set[int] = set()
    rows = []
    for raw in text.splitlines():
        if raw.lstrip().startswith("#"):
            continue
        line = raw.split("#", 1)[0].strip()
        vs = tuple(int(t) for t in line.split())
        rows.append(vs)
        labels.update(vs)
    ground = tuple(sorted(labels))
    pos = {v: i for i, v in enumerate(ground)}
    masks = [face_of(pos[v] for v in vs) for vs in rows]
    return complex_from_faces(ground, masks)


def independence_complex(g, max_faces: int = DEFAULT_FACE_BUDGET) -> SimplicialComplex:
    """Materialize I(G), graded by dimension."""
    masks = []
    for f in enumerate_independent_sets(g):
        masks.append(f)
        if len(masks) > max_faces:
            raise BudgetError(f"face budget {max_faces} exceeded")
    if not g.feasible:
        masks = []
    ground = tuple(range(g.size))
    return complex_from_faces(ground, masks)


def downward_closure(ground, masks) -> SimplicialComplex:
    seen = set()
    stack = list(set(masks))
    while stack:
        f = stack.pop()
        if f in seen:
            continue
        seen.add(f)
        m = f
        while m:
            low = m & -m
            sub = f ^ low
            if sub not in seen:
                stack.append(sub)
            m ^= low
    if masks:
        seen.add(0)
    return complex_from_faces(ground, seen)


def cone(c: SimplicialComplex) -> SimplicialComplex:
    """Cone: one new apex vertex joined to every face."""
    apex = len(c.ground)
    bit = 1 << apex
    masks = []
    for f in c.all_faces():
        masks.append(f)
        masks.append(f | bit)
    return complex_from_faces(tuple(c.ground) + (f"c{apex}",), masks)


def susp(c: SimplicialComplex) -> SimplicialComplex:
    """Suspension: two new apexes, never together in a face."""
    s0 = 1 << len(c.ground)
    s1 = s0 << 1
    masks = []
    for f in c.all_faces():
        masks.extend((f, f | s0, f | s1))
    ground = tuple(c.ground) + ("s0", "s1")
    return complex_from_faces(ground, masks)


def mo_unmatched(g, O) -> list[int]:
    """The unmatched faces X of the element matching induced by the
    independent set O: faces meeting the neighbourhood of every o in O."""
    O = sorted(set(O))
    if not g.is_independent(O):
        raise ValueError("O must be independent")
    nbr = g.neighbor_masks()
    X = []
    for f in enumerate_independent_sets(g):
        if all(f & nbr[o] for o in O):
            X.append(f)
    return X


def gamma_delta_O(g, O):
    """(Delta_O, Gamma_O, X) for the odd-set matching on I(G).

    X is computed directly from its order-free characterization; Delta_O is
    the downward closure of X and Gamma_O = Delta_O minus X.
    """
    X = mo_unmatched(g, O)
    ground = tuple(range(g.size))
    delta = downward_closure(ground, X)
    xset = set(X)
    gamma = complex_from_faces(ground, [f for f in delta.face_set() if f not in xset])
    return delta, gamma, X


def checkerboard_odd_class(g) -> list[int]:
    """The odd vertex class used to reduce I(G) via the element matching.

    Square cylinders: vertices (i, j) with i + j odd, restricted to columns
    j < n when n is odd.  Hexagonal graphs: the bipartition class of odd
    brick parity.  Returned as a list of dense ids.
    """
    from . import grid as _grid
    out = []
    if g.family in (_grid.SQUARE_CYL, _grid.SQUARE_RECT, _grid.SQUARE_TORUS):
        for v in g.occupiable():
            i, j = g.vertex_rc(v)
            if (i + j) % 2 == 1 and (g.n % 2 == 0 or j != g.n):
                out.append(v)
    elif g.family in (_grid.HEX_RECT, _grid.HEX_CYL):
        for v in g.occupiable():
            i, j = g.vertex_rc(v)
            if (i + j) % 2 == 1:
                out.append(v)
    elif g.family == _grid.HEX_TORUS:
        # brick parity in sheared coordinates: rows alternate classes
        for v in g.occupiable():
            p = (v // g.cols)
            if p % 2 == 1:
                out.append(v)
    else:
        raise ValueError(f"no canonical odd class for family {g.family}")
    if not g.is_independent(out):
        raise AssertionError("odd class is not independent; wrap parity broken")
    return out
