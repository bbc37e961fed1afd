"""Zero-velocity curves 2*Omega(x, y) = C as polylines.

Marching squares with linear interpolation along cell edges.  Saddle cells
are resolved by evaluating 2*Omega - C at the cell centre; cells containing
a primary (or any corner inside a singularity guard) are skipped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .equilibria import all_equilibria
from .model import effective_potential, omega_grid

# Corner order: 0 = (i, j), 1 = (i+1, j), 2 = (i+1, j+1), 3 = (i, j+1).
# Edge e joins corners _EDGE_CORNERS[e]: 0 bottom, 1 right, 2 top, 3 left.
_EDGE_CORNERS = ((0, 1), (1, 2), (2, 3), (3, 0))


@dataclass(frozen=True, eq=False)
class ContourSet:
    level: float
    polylines: list
    closed_flags: list
    grid_spec: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.polylines)

    def closed(self):
        return [pl for pl, c in zip(self.polylines, self.closed_flags) if c]


def _edge_key(i, j, e):
    # globally unique id of edge e of cell (i, j)
    if e == 0:
        return ("h", i, j)
    if e == 2:
        return ("h", i, j + 1)
    if e == 3:
        return ("v", i, j)
    return ("v", i + 1, j)


def _cell_segments(vals, center):
    """Pairs of crossed edges for one cell; ``vals`` are the four corner values."""
    above = [v >= 0 for v in vals]
    crossed = [e for e, (a, b) in enumerate(_EDGE_CORNERS) if above[a] != above[b]]
    if len(crossed) == 2:
        return [tuple(crossed)]
    if len(crossed) != 4:
        return []
    # saddle: corners 0 and 2 share a side, 1 and 3 the other
    if (center >= 0) == above[0]:
        return [(0, 1), (2, 3)]  # 0 and 2 connected through the centre; cut off corners 1 and 3
    return [(3, 0), (1, 2)]


def _stitch(segments):
    """Join segments sharing edge keys into chains. Returns (points, closed) pairs."""
    adj = {}
    for sid, (ka, kb, _, _) in enumerate(segments):
        adj.setdefault(ka, []).append(sid)
        adj.setdefault(kb, []).append(sid)
    used = [False] * len(segments)

    def walk(sid, start_key):
        keys, pts = [start_key], []
        pos = {}
        ka, kb, pa, pb = segments[sid]
        pos[ka], pos[kb] = pa, pb
        pts.append(pos[start_key])
        cur_key = kb if start_key == ka else ka
        cur = sid
        while True:
            used[cur] = True
            ka, kb, pa, pb = segments[cur]
            pts.append(pb if cur_key == kb else pa)
            keys.append(cur_key)
            nxt = [s for s in adj[cur_key] if not used[s]]
            if not nxt:
                break
            cur = nxt[0]
            ka, kb, _, _ = segments[cur]
            cur_key = kb if cur_key == ka else ka
        closed = keys[-1] == keys[0] and len(keys) > 2
        return np.array(pts), closed

    chains = []
    # open chains start at edges touched by a single segment
    for key in sorted(k for k, s in adj.items() if len(s) == 1):
        sid = adj[key][0]
        if not used[sid]:
            chains.append(walk(sid, key))
    for sid in range(len(segments)):
        if not used[sid]:
            chains.append(walk(sid, segments[sid][0]))
    return chains


def _canonical(points, closed):
    if not closed:
        if tuple(points[-1]) < tuple(points[0]):
            points = points[::-1]
        return points
    ring = points[:-1]
    if polygon_area(np.vstack([ring, ring[:1]])) < 0:
        ring = ring[::-1]
    start = min(range(len(ring)), key=lambda k: (ring[k, 0], ring[k, 1]))
    ring = np.roll(ring, -start, axis=0)
    return np.vstack([ring, ring[:1]])


def zvc_contours(C, bounds, resolution, p):
    """Polylines of 2*Omega = C on a regular grid over ``bounds`` = (xmin, xmax, ymin, ymax)."""
    nx, ny = (resolution, resolution) if np.isscalar(resolution) else resolution
    if nx < 16 or ny < 16:
        raise ValueError("resolution must be at least 16 per axis")
    xmin, xmax, ymin, ymax = bounds
    xs = np.linspace(xmin, xmax, nx)
    ys = np.linspace(ymin, ymax, ny)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    Fv = 2.0 * omega_grid(X, Y, p) - C

    c0, c1, c2, c3 = Fv[:-1, :-1], Fv[1:, :-1], Fv[1:, 1:], Fv[:-1, 1:]
    masked = ~(np.isfinite(c0) & np.isfinite(c1) & np.isfinite(c2) & np.isfinite(c3))
    for px, py in p.primaries:
        in_x = (xs[:-1] <= px) & (px <= xs[1:])
        in_y = (ys[:-1] <= py) & (py <= ys[1:])
        masked |= in_x[:, None] & in_y[None, :]
    with np.errstate(invalid="ignore"):
        code = (c0 >= 0).astype(int) + 2 * (c1 >= 0) + 4 * (c2 >= 0) + 8 * (c3 >= 0)
    active = np.argwhere((code != 0) & (code != 15) & ~masked)

    segments = []
    for i, j in active:
        vals = (Fv[i, j], Fv[i + 1, j], Fv[i + 1, j + 1], Fv[i, j + 1])
        corners = ((xs[i], ys[j]), (xs[i + 1], ys[j]), (xs[i + 1], ys[j + 1]), (xs[i], ys[j + 1]))
        center = 0.0
        if code[i, j] in (5, 10):
            cx, cy = 0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])
            center = 2.0 * effective_potential(cx, cy, p) - C
        for ea, eb in _cell_segments(vals, center):
            pts = []
            for e in (ea, eb):
                a, b = _EDGE_CORNERS[e]
                t = vals[a] / (vals[a] - vals[b])
                pts.append(
                    (
                        corners[a][0] + t * (corners[b][0] - corners[a][0]),
                        corners[a][1] + t * (corners[b][1] - corners[a][1]),
                    )
                )
            segments.append((_edge_key(i, j, ea), _edge_key(i, j, eb), pts[0], pts[1]))

    chains = [(_canonical(pts, closed), closed) for pts, closed in _stitch(segments)]
    chains.sort(key=lambda pc: (pc[0][0, 0], pc[0][0, 1]))
    grid_spec = {"bounds": tuple(map(float, bounds)), "resolution": (int(nx), int(ny))}
    return ContourSet(float(C), [c for c, _ in chains], [f for _, f in chains], grid_spec)


def region_classify(x, y, C, p):
    """'allowed' where 2*Omega >= C (real velocity), else 'forbidden'."""
    return "allowed" if 2.0 * effective_potential(x, y, p) >= C else "forbidden"


def critical_levels(p):
    """Jacobi constant of each equilibrium, {label: 2*Omega(L_i)}."""
    return {pt.label: 2.0 * effective_potential(pt.x, pt.y, p) for pt in all_equilibria(p)}


def polygon_area(points):
    """Signed shoelace area of a closed polyline (first point repeated at the end)."""
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.dot(x[:-1], y[1:]) - np.dot(x[1:], y[:-1]))


def encloses(points, x, y):
    """Even-odd ray test for a closed polyline."""
    px, py = points[:-1, 0], points[:-1, 1]
    qx, qy = points[1:, 0], points[1:, 1]
    crosses = (py > y) != (qy > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = px + (y - py) * (qx - px) / (qy - py)
    return bool(np.count_nonzero(crosses & (x < xint)) % 2)


def loops_around(cs: ContourSet, x, y):
    return [pl for pl in cs.closed() if encloses(pl, x, y)]


def write_contours_csv(cs: ContourSet, stream, metadata=None):
    """``# level=<C>`` header, optional ``# key=value`` metadata, then x,y rows; blank line between polylines."""
    stream.write(f"# level={cs.level:.17g}\n")
    for key, value in (metadata or {}).items():
        stream.write(f"# {key}={value}\n")
    stream.write("x,y\n")
    for k, pl in enumerate(cs.polylines):
        if k:
            stream.write("\n")
        for x, y in pl:
            stream.write(f"{x:.17g},{y:.17g}\n")
