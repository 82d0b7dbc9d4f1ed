"""Module layouts, factory placement and per-rotation routing cost.

Line topology: module slots sit at coordinates ``1..M``.  A factory at
coordinate ``0`` or ``M + 1`` hangs off the corresponding end of the line; a
factory at an interior coordinate ``c`` is attached beside slot ``c``.

Grid topology: slots are ``(row, col)`` cells of a ``rows x cols`` grid,
row-major.  Factories line the short edge: above row 0 on a tall grid, left
of column 0 on a wide one.  A cell ``d`` steps from that edge is ``d + 1``
edges from the factory directly opposite it.

The routing cost of a rotation is the number of edges of a tree joining one
factory and every target slot; each edge is one inter-module measurement.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

STEINER_LIMIT = 20
BRANCHING_WIDTH_LIMIT = 6


@dataclass(frozen=True)
class RoutePlan:
    edge_count: int
    edges: tuple = ()
    factory: int | None = None


@dataclass(frozen=True)
class LineTopology:
    n_slots: int
    factories: tuple[int, ...] = (0,)
    kind: str = field(default="line", init=False)

    def __post_init__(self):
        object.__setattr__(self, "factories", tuple(sorted(set(self.factories))))
        if self.n_slots < 1:
            raise ValueError("a line needs at least one slot")
        if not self.factories:
            raise ValueError("at least one factory is required")
        for f in self.factories:
            if not 0 <= f <= self.n_slots + 1:
                raise ValueError(f"factory coordinate {f} outside [0, {self.n_slots + 1}]")

    @property
    def slots(self) -> list[int]:
        return list(range(1, self.n_slots + 1))

    @property
    def descriptor(self) -> str:
        base = f"line:{self.n_slots}"
        return base if self.factories == (0,) else base + ":factories=" + ",".join(map(str, self.factories))

    def factory_slot(self, f: int) -> int:
        if f == 0:
            return 1
        if f == self.n_slots + 1:
            return self.n_slots
        return f

    def distance_to_nearest_factory(self, slot: int) -> int:
        self._check_slot(slot)
        return min(self._factory_distance(f, slot) for f in self.factories)

    def _factory_distance(self, f: int, slot: int) -> int:
        if f in (0, self.n_slots + 1):
            return abs(slot - f)
        return abs(slot - f) + 1

    def _check_slot(self, slot) -> None:
        if not (isinstance(slot, int) and 1 <= slot <= self.n_slots):
            raise ValueError(f"slot {slot!r} not in line of {self.n_slots}")

    def route(self, targets) -> RoutePlan:
        return line_route(targets, self)

    def with_factories(self, factories) -> "LineTopology":
        return LineTopology(self.n_slots, tuple(factories))

    @cached_property
    def graph(self) -> dict:
        return _build_graph(self)


@dataclass(frozen=True)
class GridTopology:
    """``rows x cols`` grid with factories along one edge.

    ``edge="auto"`` puts the factories on the short edge: above row 0 when
    ``cols <= rows``, left of column 0 otherwise.  Factory positions index
    the cells of that edge (columns for ``top``, rows for ``left``).
    """

    rows: int
    cols: int
    factories: tuple[int, ...] | None = None
    edge: str = "auto"
    kind: str = field(default="grid", init=False)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid dimensions must be positive")
        if self.edge not in ("auto", "top", "left"):
            raise ValueError(f"factory edge must be auto, top or left, got {self.edge!r}")
        side = self.edge if self.edge != "auto" else ("top" if self.cols <= self.rows else "left")
        object.__setattr__(self, "side", side)
        width = self.width
        facs = tuple(range(width)) if self.factories is None else tuple(sorted(set(self.factories)))
        if not facs:
            raise ValueError("at least one factory is required")
        for f in facs:
            if not 0 <= f < width:
                raise ValueError(f"factory position {f} outside [0, {width})")
        object.__setattr__(self, "factories", facs)

    @property
    def n_slots(self) -> int:
        return self.rows * self.cols

    @property
    def depth(self) -> int:
        """Extent away from the factory edge."""
        return self.rows if self.side == "top" else self.cols

    @property
    def width(self) -> int:
        """Extent along the factory edge."""
        return self.cols if self.side == "top" else self.rows

    def to_local(self, cell) -> tuple[int, int]:
        """``(depth, lateral)`` coordinates of a cell relative to the factory edge."""
        r, c = cell
        return (r, c) if self.side == "top" else (c, r)

    def from_local(self, d: int, lat: int) -> tuple[int, int]:
        return (d, lat) if self.side == "top" else (lat, d)

    @property
    def slots(self) -> list[tuple[int, int]]:
        return [(r, c) for r in range(self.rows) for c in range(self.cols)]

    @property
    def descriptor(self) -> str:
        base = f"grid:{self.rows}x{self.cols}"
        if self.factories != tuple(range(self.width)):
            base += ":factories=" + ",".join(map(str, self.factories))
        if self.edge != "auto":
            base += f":edge={self.edge}"
        return base

    def factory_slot(self, f: int) -> tuple[int, int]:
        return self.from_local(0, f)

    def distance_to_nearest_factory(self, slot) -> int:
        self._check_slot(slot)
        d, lat = self.to_local(slot)
        return min(d + 1 + abs(lat - f) for f in self.factories)

    def _check_slot(self, slot) -> None:
        if not (isinstance(slot, tuple) and len(slot) == 2
                and 0 <= slot[0] < self.rows and 0 <= slot[1] < self.cols):
            raise ValueError(f"cell {slot!r} not in {self.rows}x{self.cols} grid")

    def route(self, targets) -> RoutePlan:
        return grid_route(targets, self)

    def with_factories(self, factories) -> "GridTopology":
        return GridTopology(self.rows, self.cols, tuple(factories), self.edge)

    @cached_property
    def graph(self) -> dict:
        return _build_graph(self)


Topology = LineTopology | GridTopology


def auto_grid(n_modules: int, n_factories: int) -> GridTopology:
    """Long grid ``ceil(M/f) x f`` with one factory per column."""
    rows = -(-n_modules // n_factories)
    return GridTopology(rows, n_factories, edge="top")


def parse_topology(text: str, n_modules: int | None = None) -> Topology:
    """Parse ``line:M[:factories=a,b]`` or ``grid:RxC[:factories=c1,c2]``.

    ``M`` may be ``auto`` (``line:auto``) and a grid may be ``grid:autoxW``;
    both need ``n_modules``.
    """
    parts = text.strip().split(":")
    kind = parts[0].lower()
    opts = {}
    for extra in parts[2:]:
        key, _, val = extra.partition("=")
        opts[key.strip()] = val.strip()
    unknown = set(opts) - {"factories", "edge"}
    if unknown:
        raise ValueError(f"unknown topology option(s) {sorted(unknown)}")
    facs = tuple(int(v) for v in opts["factories"].split(",")) if opts.get("factories") else None
    shape = parts[1] if len(parts) > 1 else "auto"
    if kind == "line":
        if "edge" in opts:
            raise ValueError("edge applies to grid topologies only")
        if shape == "auto":
            if n_modules is None:
                raise ValueError("line:auto needs a module count")
            m = n_modules
        else:
            m = int(shape)
        return LineTopology(m, facs if facs is not None else (0,))
    if kind == "grid":
        match = re.fullmatch(r"(auto|\d+)x(\d+)", shape)
        if not match:
            raise ValueError(f"bad grid shape {shape!r}, expected RxC")
        cols = int(match.group(2))
        if match.group(1) == "auto":
            if n_modules is None:
                raise ValueError("grid:autoxW needs a module count")
            rows = -(-n_modules // cols)
        else:
            rows = int(match.group(1))
        edge = opts.get("edge", "auto")
        if match.group(1) == "auto" and "edge" not in opts:
            edge = "top"
        return GridTopology(rows, cols, facs, edge)
    raise ValueError(f"unknown topology kind {kind!r}")


def _factory_node(i: int) -> tuple[str, int]:
    return ("factory", i)


def _build_graph(topo: Topology) -> dict:
    adj: dict = {s: [] for s in topo.slots}
    if isinstance(topo, LineTopology):
        for s in range(1, topo.n_slots):
            adj[s].append(s + 1)
            adj[s + 1].append(s)
    else:
        for r, c in topo.slots:
            if r + 1 < topo.rows:
                adj[(r, c)].append((r + 1, c))
                adj[(r + 1, c)].append((r, c))
            if c + 1 < topo.cols:
                adj[(r, c)].append((r, c + 1))
                adj[(r, c + 1)].append((r, c))
    for i, f in enumerate(topo.factories):
        node = _factory_node(i)
        slot = topo.factory_slot(f)
        adj[node] = [slot]
        adj[slot].append(node)
    return adj


def _normalize_targets(targets, topo: Topology) -> list:
    targets = sorted(set(targets))
    for t in targets:
        topo._check_slot(t)
    return targets


def line_route(targets, topo: LineTopology) -> RoutePlan:
    """Smallest interval holding the targets and one factory.

    With a single factory at coordinate 0 this is the furthest target.
    """
    targets = _normalize_targets(targets, topo)
    if not targets:
        return RoutePlan(0)
    best = None
    for i, f in enumerate(topo.factories):
        lo, hi = min(targets[0], f), max(targets[-1], f)
        node = _factory_node(i)
        if f == 0:
            edges = [(node, 1)] + [(s, s + 1) for s in range(1, hi)]
        elif f == topo.n_slots + 1:
            edges = [(node, topo.n_slots)] + [(s, s + 1) for s in range(lo, topo.n_slots)]
        else:
            edges = [(node, f)] + [(s, s + 1) for s in range(lo, hi)]
        if best is None or len(edges) < best.edge_count:
            best = RoutePlan(len(edges), tuple(edges), f)
    return best


def _row_profile(targets, topo: GridTopology) -> dict[int, tuple[int, ...]]:
    rows: dict[int, set] = {}
    for cell in targets:
        d, lat = topo.to_local(cell)
        rows.setdefault(d, set()).add(lat)
    return {d: tuple(sorted(v)) for d, v in rows.items()}


def _row_cover(drops: tuple[int, ...], width: int, need: int) -> list:
    """Ways to cover one row with disjoint intervals, one per incoming trunk.

    Returns ``(covered_mask, span_edges, intervals)`` for every choice where
    interval ``i`` contains ``drops[i]`` and the union contains ``need``.
    """
    out = []

    def rec(i, lo_min, mask, cost, spans):
        if i == len(drops):
            if need & ~mask == 0:
                out.append((mask, cost, tuple(spans)))
            return
        s = drops[i]
        hi_max = drops[i + 1] if i + 1 < len(drops) else width
        for lo in range(lo_min, s + 1):
            for hi in range(s, hi_max):
                m = mask | (((1 << (hi - lo + 1)) - 1) << lo)
                rec(i + 1, hi + 1, m, cost + hi - lo, spans + [(lo, hi)])

    rec(0, 0, 0, 0, [])
    return out


def _branching_cost(rows, deepest: int, width: int, f: int):
    """Cheapest downward-branching tree fed by the factory at lateral ``f``.

    Rows are processed away from the factory edge.  The state is the set of
    columns (bitmask) whose vertical edge enters the current row; each of
    them feeds its own horizontal interval, and any covered cell may send a
    vertical edge on to the next row.  Returns the cost and the per-row
    choices needed to rebuild the tree.
    """
    inf = float("inf")
    full = 1 << width
    cur = {1 << f: (1, None)}
    trail = []
    for d in range(deepest + 1):
        need = 0
        for lat in rows.get(d, ()):
            need |= 1 << lat
        best_u = [inf] * full
        arg_u: list = [None] * full
        for state in sorted(cur):
            base = cur[state][0]
            drops = tuple(i for i in range(width) if state >> i & 1)
            for mask, cost, spans in _row_cover(drops, width, need):
                if base + cost < best_u[mask]:
                    best_u[mask] = base + cost
                    arg_u[mask] = (state, spans)
        if d == deepest:
            end = min(range(full), key=lambda m: best_u[m])
            trail.append({0: (best_u[end], arg_u[end])})
            return best_u[end], trail
        # cheapest covered superset for each candidate set of downward edges
        sup = best_u[:]
        sup_arg = list(range(full))
        for i in range(width):
            bit = 1 << i
            for m in range(full):
                if not m & bit and sup[m | bit] < sup[m]:
                    sup[m], sup_arg[m] = sup[m | bit], sup_arg[m | bit]
        nxt = {}
        layer = {}
        for m in range(1, full):
            if sup[m] < inf:
                nxt[m] = (sup[m] + bin(m).count("1"), None)
                layer[m] = (sup[m] + bin(m).count("1"), arg_u[sup_arg[m]])
        trail.append(layer)
        cur = nxt
    raise AssertionError("unreachable")


def _staircase_cost(rows, deepest: int, width: int, f: int):
    """Cheapest single trunk that may shift sideways once per row."""
    cost = {f: 1}
    trail = []
    for d in range(deepest + 1):
        step = 1 if d < deepest else 0
        span = (min(rows[d]), max(rows[d])) if d in rows else None
        nxt: dict = {}
        for a, base in sorted(cost.items()):
            for b in range(width):
                lo, hi = min(a, b), max(a, b)
                if span:
                    lo, hi = min(lo, span[0]), max(hi, span[1])
                val = base + hi - lo + step
                if val < nxt.get(b, (val + 1,))[0]:
                    nxt[b] = (val, (1 << a, ((lo, hi),)))
        if d == deepest:
            end = min(nxt, key=lambda b: nxt[b][0])
            trail.append({0: nxt[end]})
            return nxt[end][0], trail
        trail.append({1 << b: v for b, v in nxt.items()})
        cost = {b: v[0] for b, v in nxt.items()}
    raise AssertionError("unreachable")


def grid_route(targets, topo: GridTopology) -> RoutePlan:
    """Trunk-and-branch route, minimized over factories.

    The tree leaves a factory and grows away from the factory edge one row
    at a time down to the deepest target row.  Inside a row, every trunk
    arriving from above spreads into its own horizontal interval, and any
    cell of those intervals may continue downward, so trunks can shift
    sideways or fork but never climb back up.  The cheapest such tree is
    found exactly by dynamic programming over the set of columns that carry
    a trunk into each row.  A straight trunk with one branch per row is one
    member of the family, and since any fixed tree only gets costlier as
    targets are added, the result is monotone in the target set.

    Edges wider than ``BRANCHING_WIDTH_LIMIT`` fall back to a single trunk
    that may shift sideways in each row.
    """
    targets = _normalize_targets(targets, topo)
    if not targets:
        return RoutePlan(0)
    rows = _row_profile(targets, topo)
    deepest = max(rows)
    width = topo.width
    solve = _branching_cost if width <= BRANCHING_WIDTH_LIMIT else _staircase_cost
    best = None
    for i, f in enumerate(topo.factories):
        cost, trail = solve(rows, deepest, width, f)
        if best is None or cost < best[0]:
            best = (cost, i, f, trail)
    total, i, f, trail = best
    cell = topo.from_local
    edges = [(_factory_node(i), cell(0, f))]
    state = 0
    for d in range(deepest, -1, -1):
        _, (prev, spans) = trail[d][state]
        for lo, hi in spans:
            edges += [(cell(d, c), cell(d, c + 1)) for c in range(lo, hi)]
        if d > 0:
            edges += [(cell(d - 1, c), cell(d, c)) for c in range(width) if prev >> c & 1]
        state = prev
    assert len(edges) == total
    return RoutePlan(total, tuple(edges), f)


def route(targets, topo: Topology) -> RoutePlan:
    return topo.route(targets)


def distance_to_nearest_factory(slot, topo: Topology) -> int:
    return topo.distance_to_nearest_factory(slot)


# ---------------------------------------------------------------- exact oracle

def _bfs_tree(adj: dict, src) -> tuple[dict, dict]:
    dist = {src: 0}
    parent = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                parent[v] = u
                queue.append(v)
    return dist, parent


def steiner_oracle(targets, topo: Topology) -> RoutePlan:
    """Exact minimum tree joining one factory and all targets (Dreyfus-Wagner).

    Refuses topologies with more than ``STEINER_LIMIT`` slots.
    """
    if topo.n_slots > STEINER_LIMIT:
        raise ValueError(f"steiner_oracle supports at most {STEINER_LIMIT} slots, got {topo.n_slots}")
    targets = _normalize_targets(targets, topo)
    if not targets:
        return RoutePlan(0)
    adj = topo.graph
    nodes = list(adj)
    bfs = {v: _bfs_tree(adj, v) for v in nodes}

    def path_edges(a, b) -> list:
        parent = bfs[a][1]
        out = []
        while b != a:
            out.append((parent[b], b))
            b = parent[b]
        return out

    k = len(targets)
    full = (1 << k) - 1
    inf = float("inf")
    dp: dict[int, dict] = {}
    via: dict[int, dict] = {}
    split: dict[int, dict] = {}
    for i, t in enumerate(targets):
        dp[1 << i] = {v: bfs[t][0][v] for v in nodes}
    for mask in range(1, full + 1):
        if mask & (mask - 1) == 0:
            continue
        g, gs = {}, {}
        for u in nodes:
            best, arg = inf, None
            sub = (mask - 1) & mask
            while sub:
                val = dp[sub][u] + dp[mask ^ sub][u]
                if val < best:
                    best, arg = val, sub
                sub = (sub - 1) & mask
            g[u], gs[u] = best, arg
        row, vrow = {}, {}
        for v in nodes:
            u = min(nodes, key=lambda x: g[x] + bfs[x][0][v])
            row[v], vrow[v] = g[u] + bfs[u][0][v], u
        dp[mask], via[mask], split[mask] = row, vrow, gs

    def collect(mask, v, acc: set) -> None:
        if mask & (mask - 1) == 0:
            acc.update(path_edges(targets[mask.bit_length() - 1], v))
            return
        u = via[mask][v]
        acc.update(path_edges(u, v))
        sub = split[mask][u]
        collect(sub, u, acc)
        collect(mask ^ sub, u, acc)

    best = None
    for i, f in enumerate(topo.factories):
        root = _factory_node(i)
        cost = dp[full][root]
        if best is None or cost < best[0]:
            best = (cost, root, f)
    cost, root, f = best
    edges: set = set()
    collect(full, root, edges)
    canon = tuple(sorted({tuple(sorted(e, key=repr)) for e in edges}, key=repr))
    return RoutePlan(int(cost), canon, f)
