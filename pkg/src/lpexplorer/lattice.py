"""Rectangle domain, medial-lattice path state, boundary labels, and side
classification for completed paths.

Coordinates
-----------
All geometry uses *doubled* integer coordinates so that every object is an
exact lattice point:

* primal vertex (i, j)      -> (2i, 2j), 0 <= i <= width, 0 <= j <= height
* edge midpoint / medial vertex -> one odd coordinate (odd sum)
* face center               -> both coordinates odd

The exploration path lives on the medial vertices: each step enters the
face ahead of the tip through the tip's edge midpoint and leaves through
the left, straight, or right edge midpoint of that face.  The two face
corners not on the entry edge are the frontier pair (w_L ahead-left,
w_R ahead-right).  Per-turn labels (Left -> both 1, Straight -> w_L 0 /
w_R 1, Right -> both 0) record on which side of the directed path each
frontier vertex ends up, and make the per-step label expectations equal
the hitting probabilities under the one-coin turn rule.

Physical units: primal vertex (i, j) sits at (i*spacing - width*spacing/2,
j*spacing).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ClassificationError, ConfigError, ConsistencyError, StuckError

Vec = tuple[int, int]

UNLABELED = -1

TURN_LEFT = "L"
TURN_STRAIGHT = "S"
TURN_RIGHT = "R"

#: label assigned to (w_L, w_R) per turn
_TURN_LABELS = {
    TURN_LEFT: (1, 1),
    TURN_STRAIGHT: (0, 1),
    TURN_RIGHT: (0, 0),
}


def rot_left(h: Vec) -> Vec:
    return (-h[1], h[0])


def rot_right(h: Vec) -> Vec:
    return (h[1], -h[0])


@dataclass(frozen=True)
class DomainConfig:
    """Rectangle on the scaled lattice with marked start/end medial vertices.

    ``v0`` and ``v_end`` are medial boundary vertices in doubled
    coordinates; None selects the defaults (bottom-center, top-center).
    """

    width: int
    height: int
    spacing: float = 1.0
    v0: Vec | None = None
    v_end: Vec | None = None

    def __post_init__(self):
        if self.width < 4 or self.width % 2 != 0:
            raise ConfigError(f"width must be an even integer >= 4, got {self.width}")
        if self.height < 4:
            raise ConfigError(f"height must be >= 4, got {self.height}")
        if self.spacing <= 0.0:
            raise ConfigError(f"spacing must be positive, got {self.spacing}")
        if self.v0 is None:
            object.__setattr__(self, "v0", (self.width + 1, 0))
        if self.v_end is None:
            object.__setattr__(self, "v_end", (self.width + 1, 2 * self.height))
        for name in ("v0", "v_end"):
            v = getattr(self, name)
            if not self._is_boundary_medial(v):
                raise ConfigError(f"{name}={v} is not a boundary medial vertex")
        if self.v0 == self.v_end:
            raise ConfigError("v0 and v_end must differ")

    def _is_boundary_medial(self, v: Vec) -> bool:
        x, y = v
        w2, h2 = 2 * self.width, 2 * self.height
        if (x + y) % 2 != 1:
            return False
        if y in (0, h2) and x % 2 == 1 and 0 < x < w2:
            return True
        if x in (0, w2) and y % 2 == 1 and 0 < y < h2:
            return True
        return False

    def inward_heading(self, v: Vec) -> Vec:
        x, y = v
        if y == 0:
            return (0, 1)
        if y == 2 * self.height:
            return (0, -1)
        if x == 0:
            return (1, 0)
        return (-1, 0)

    # -- physical coordinates --------------------------------------------

    def phys(self, i: float, j: float) -> tuple[float, float]:
        d = self.spacing
        return (i * d - self.width * d / 2.0, j * d)

    def snap(self, x: float, y: float) -> Vec:
        """Nearest primal vertex (i, j) to a physical point."""
        d = self.spacing
        i = int(round(x / d + self.width / 2.0))
        j = int(round(y / d))
        return (min(max(i, 0), self.width), min(max(j, 0), self.height))

    def perimeter(self) -> list[Vec]:
        """Primal boundary vertices in counterclockwise cycle order."""
        w, h = self.width, self.height
        cyc = [(i, 0) for i in range(w + 1)]
        cyc += [(w, j) for j in range(1, h + 1)]
        cyc += [(i, h) for i in range(w - 1, -1, -1)]
        cyc += [(0, j) for j in range(h - 1, 0, -1)]
        return cyc


@dataclass
class PathRecord:
    """The exploration path with its turn sequence and label events."""

    medial_vertices: list[Vec] = field(default_factory=list)
    turns: list[str] = field(default_factory=list)
    label_events: list[list[tuple[Vec, int]]] = field(default_factory=list)
    frontier_probs: list[tuple[float, float]] = field(default_factory=list)
    terminated: str | None = None  # "reached_v_end" | "max_steps" | "stuck"

    def __len__(self) -> int:
        return len(self.turns)


@dataclass
class DomainState:
    """Labels, path, and tip state of a (possibly partial) exploration."""

    config: DomainConfig
    labels: np.ndarray  # (width+1, height+1) int8; -1 unlabeled
    path: PathRecord
    tip: Vec
    heading: Vec
    step_count: int = 0
    counters: dict = field(default_factory=lambda: {"label_anomaly": 0})

    def label_of(self, v: Vec) -> int:
        return int(self.labels[v[0], v[1]])

    def unlabeled_mask(self) -> np.ndarray:
        return self.labels == UNLABELED


def build_domain(config: DomainConfig) -> DomainState:
    """Fresh state: boundary arcs labeled 0 (left of v0->v_end) / 1 (right)."""
    labels = np.full((config.width + 1, config.height + 1), UNLABELED, dtype=np.int8)
    cyc = config.perimeter()
    n = len(cyc)

    def edge_index(v: Vec) -> int:
        for k in range(n):
            a, b = cyc[k], cyc[(k + 1) % n]
            if (a[0] + b[0], a[1] + b[1]) == v:
                return k
        raise ConfigError(f"medial vertex {v} not found on the perimeter")

    k0 = edge_index(config.v0)
    k1 = edge_index(config.v_end)
    # Counterclockwise from the edge under v0 to the edge under v_end is the
    # right-hand arc A+ (label 1); the rest is A- (label 0).
    k = (k0 + 1) % n
    while True:
        i, j = cyc[k]
        labels[i, j] = 1
        if k == k1:
            break
        k = (k + 1) % n
    k = (k1 + 1) % n
    while True:
        i, j = cyc[k]
        labels[i, j] = 0
        if k == k0:
            break
        k = (k + 1) % n
    return DomainState(
        config=config,
        labels=labels,
        path=PathRecord(medial_vertices=[config.v0]),
        tip=config.v0,
        heading=config.inward_heading(config.v0),
    )


def _face_ahead(state: DomainState) -> Vec:
    fx = state.tip[0] + state.heading[0]
    fy = state.tip[1] + state.heading[1]
    c = state.config
    if not (1 <= fx <= 2 * c.width - 1 and 1 <= fy <= 2 * c.height - 1):
        raise StuckError(f"tip {state.tip} heading {state.heading} leaves the domain")
    return (fx, fy)


def frontier(state: DomainState) -> tuple[Vec, Vec]:
    """The primal frontier pair (w_L, w_R) ahead of the tip, in primal coords."""
    if state.path.terminated is not None:
        raise StuckError("path already terminated")
    f = _face_ahead(state)
    h = state.heading
    hl, hr = rot_left(h), rot_right(h)
    wl = ((f[0] + h[0] + hl[0]) // 2, (f[1] + h[1] + hl[1]) // 2)
    wr = ((f[0] + h[0] + hr[0]) // 2, (f[1] + h[1] + hr[1]) // 2)
    return wl, wr


def apply_turn(state: DomainState, turn: str, strict: bool = True) -> DomainState:
    """Advance the tip through the face ahead and assign frontier labels.

    Already-labeled vertices keep their labels; a disagreeing assignment
    raises ConsistencyError under ``strict`` and is counted as an anomaly
    otherwise (the forced-turn escape hatch used by the explorer).
    """
    if turn not in _TURN_LABELS:
        raise ConfigError(f"unknown turn {turn!r}")
    f = _face_ahead(state)
    wl, wr = frontier(state)
    events: list[tuple[Vec, int]] = []
    for v, lab in zip((wl, wr), _TURN_LABELS[turn]):
        cur = state.label_of(v)
        if cur == UNLABELED:
            state.labels[v[0], v[1]] = lab
            events.append((v, lab))
        elif cur != lab:
            if strict:
                raise ConsistencyError(
                    f"turn {turn} would relabel {v} from {cur} to {lab}"
                )
            state.counters["label_anomaly"] += 1
    h = state.heading
    d = {TURN_LEFT: rot_left(h), TURN_STRAIGHT: h, TURN_RIGHT: rot_right(h)}[turn]
    state.tip = (f[0] + d[0], f[1] + d[1])
    state.heading = d
    state.path.medial_vertices.append(state.tip)
    state.path.turns.append(turn)
    state.path.label_events.append(events)
    state.step_count += 1
    return state


# -- side classification -------------------------------------------------


def side_components(state: DomainState) -> np.ndarray:
    """Flood-fill side of every primal vertex for a completed path.

    Returns an int8 array over primal vertices with 0 = Left (component of
    the 0-labeled arc A-) and 1 = Right.  A primal edge is blocked iff the
    path crosses it, i.e. iff its midpoint is a visited medial vertex.
    """
    if state.path.terminated != "reached_v_end":
        raise ClassificationError(
            "side classification requires a path terminated at v_end "
            f"(got {state.path.terminated!r})"
        )
    c = state.config
    blocked = set(state.path.medial_vertices)
    side = np.full((c.width + 1, c.height + 1), UNLABELED, dtype=np.int8)
    cyc = c.perimeter()

    def fill(mark: int, seeds: list[Vec]):
        q = deque()
        for v in seeds:
            if side[v] == UNLABELED:
                side[v] = mark
                q.append(v)
        while q:
            i, j = q.popleft()
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                ni, nj = i + di, j + dj
                if not (0 <= ni <= c.width and 0 <= nj <= c.height):
                    continue
                if (2 * i + di, 2 * j + dj) in blocked:
                    continue  # path crosses this edge
                if side[ni, nj] == UNLABELED:
                    side[ni, nj] = mark
                    q.append((ni, nj))

    a_minus = [v for v in cyc if state.labels[v] == 0]
    a_plus = [v for v in cyc if state.labels[v] == 1]
    fill(0, a_minus)
    for v in a_plus:
        if side[v] == 0:
            raise ClassificationError(
                f"boundary vertex {v} of A+ is connected to A- across the path"
            )
    fill(1, a_plus)
    if np.any(side == UNLABELED):
        missing = np.argwhere(side == UNLABELED)[:4]
        raise ClassificationError(
            f"vertices in neither side component, e.g. {missing.tolist()}"
        )
    return side


def classify_side(state: DomainState, z) -> str:
    """Side ("Left"/"Right") of a primal vertex or physical point ``z``."""
    if isinstance(z, tuple) and all(isinstance(t, int) for t in z):
        v = z
    else:
        v = state.config.snap(float(z[0]), float(z[1]))
    side = side_components(state)
    return "Left" if side[v] == 0 else "Right"


# -- exports -------------------------------------------------------------


def path_to_text(state: DomainState) -> str:
    """Line-oriented path export: step, medial vertex (lattice units), turn,
    labels assigned that step."""
    lines = [
        "# step mx my turn labels",
        f"# terminated={state.path.terminated}",
    ]
    verts = state.path.medial_vertices
    for n, turn in enumerate(state.path.turns):
        mx, my = verts[n + 1]
        events = ";".join(
            f"({v[0]},{v[1]})={lab}" for v, lab in state.path.label_events[n]
        )
        lines.append(f"{n} {mx / 2:g} {my / 2:g} {turn} {events}")
    return "\n".join(lines) + "\n"


def domain_to_json(state: DomainState) -> str:
    """Domain export: config plus the current label map."""
    c = state.config
    payload = {
        "config": {
            "width": c.width,
            "height": c.height,
            "spacing": c.spacing,
            "v0": list(c.v0),
            "v_end": list(c.v_end),
        },
        "step_count": state.step_count,
        "labels": {
            f"{i},{j}": int(state.labels[i, j])
            for i in range(c.width + 1)
            for j in range(c.height + 1)
            if state.labels[i, j] != UNLABELED
        },
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
