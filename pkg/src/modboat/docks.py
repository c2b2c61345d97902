"""Dock-port identities, magnet polarity, and the boat connection graph.

Every boat carries four dock ports at the cardinal body angles.  A boat has a
single magnetic polarity, so any two boats can mate on any port pair as long
as their polarities differ.  The connection graph tracks which ports are
currently latched; each port participates in at most one connection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .geometry import Pose2, dock_world_pose, wrap_angle

HALF_PI = math.pi / 2.0

# Admissible port angles, in canonical order used for deterministic event
# resolution: right (-pi/2), front (0), left (+pi/2), rear (pi).
CARDINAL_PSIS: tuple[float, ...] = (-HALF_PI, 0.0, HALF_PI, math.pi)

_PORT_NAMES = {-HALF_PI: "right", 0.0: "front", HALF_PI: "left", math.pi: "rear"}


def cardinal_psi(value: float, tol: float = 1e-6) -> float:
    """Snap ``value`` to the nearest cardinal port angle or raise ValueError."""
    w = wrap_angle(float(value))
    for psi in CARDINAL_PSIS:
        if abs(wrap_angle(w - psi)) <= tol:
            return psi
    raise ValueError(f"{value!r} is not a cardinal dock angle")


def port_name(psi: float) -> str:
    return _PORT_NAMES[cardinal_psi(psi)]


class Polarity(Enum):
    N = "N"
    S = "S"

    @property
    def opposite(self) -> "Polarity":
        return Polarity.S if self is Polarity.N else Polarity.N


@dataclass(frozen=True, order=True)
class DockId:
    """One dock port: the owning boat id plus the port's body angle."""

    boat: int
    psi: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "psi", cardinal_psi(self.psi))

    def world_pose(self, boat_pose: Pose2, radius: float) -> Pose2:
        return dock_world_pose(boat_pose, self.psi, radius)

    def __repr__(self) -> str:  # compact, log friendly
        return f"DockId({self.boat}, {port_name(self.psi)})"


class ConnectionGraph:
    """Set of latched port pairs with at most one partner per port."""

    def __init__(self) -> None:
        self._nodes: set[int] = set()
        self._partner: dict[DockId, DockId] = {}

    # -- nodes ------------------------------------------------------------
    def add_node(self, boat: int) -> None:
        self._nodes.add(boat)

    @property
    def nodes(self) -> frozenset[int]:
        return frozenset(self._nodes)

    # -- edges ------------------------------------------------------------
    def add_edge(self, a: DockId, b: DockId) -> None:
        if a.boat == b.boat:
            raise ValueError("cannot connect a boat to itself")
        if a in self._partner or b in self._partner:
            raise ValueError("port already latched")
        self._nodes.add(a.boat)
        self._nodes.add(b.boat)
        self._partner[a] = b
        self._partner[b] = a

    def remove_edge(self, a: DockId, b: DockId) -> None:
        if self._partner.get(a) != b:
            raise KeyError(f"no edge between {a} and {b}")
        del self._partner[a]
        del self._partner[b]

    def partner(self, port: DockId) -> DockId | None:
        return self._partner.get(port)

    def has_edge(self, a: DockId, b: DockId) -> bool:
        return self._partner.get(a) == b

    def edges(self) -> list[tuple[DockId, DockId]]:
        """All edges, each once, in canonical sorted order."""
        out = []
        for a, b in self._partner.items():
            if (a.boat, a.psi) < (b.boat, b.psi):
                out.append((a, b))
        out.sort()
        return out

    def ports_of(self, boat: int) -> list[DockId]:
        return sorted(p for p in self._partner if p.boat == boat)

    def degree(self, boat: int) -> int:
        return sum(1 for p in self._partner if p.boat == boat)

    def neighbors(self, boat: int) -> list[int]:
        return sorted({self._partner[p].boat for p in self._partner if p.boat == boat})

    # -- components -------------------------------------------------------
    def components(self) -> list[tuple[int, ...]]:
        """Connected components over all registered nodes, sorted."""
        seen: set[int] = set()
        comps: list[tuple[int, ...]] = []
        for root in sorted(self._nodes):
            if root in seen:
                continue
            stack = [root]
            comp = []
            while stack:
                n = stack.pop()
                if n in seen:
                    continue
                seen.add(n)
                comp.append(n)
                stack.extend(m for m in self.neighbors(n) if m not in seen)
            comps.append(tuple(sorted(comp)))
        return comps

    def component_of(self, boat: int) -> tuple[int, ...]:
        for comp in self.components():
            if boat in comp:
                return comp
        raise KeyError(boat)

    def side_of(self, edge: tuple[DockId, DockId]) -> tuple[int, ...] | None:
        """Boats reachable from ``edge[0]``'s boat with the edge removed.

        Returns None when the edge sits on a cycle (both endpoints stay
        connected), in which case no two-sided partition exists.
        """
        a, b = edge
        seen = {a.boat}
        stack = [a.boat]
        while stack:
            n = stack.pop()
            for p in self.ports_of(n):
                q = self._partner[p]
                if {p, q} == {a, b}:
                    continue
                if q.boat not in seen:
                    seen.add(q.boat)
                    stack.append(q.boat)
        if b.boat in seen:
            return None
        return tuple(sorted(seen))

    def copy(self) -> "ConnectionGraph":
        g = ConnectionGraph()
        g._nodes = set(self._nodes)
        g._partner = dict(self._partner)
        return g


def validate_connection_graph(
    graph: ConnectionGraph,
    poses: dict[int, Pose2],
    polarities: dict[int, Polarity],
    radii: dict[int, float],
    gap_tol: float = 1e-3,
    angle_tol: float = math.radians(2.0),
) -> list[str]:
    """Check the physical consistency of every latched pair.

    Latched ports must belong to opposite-polarity boats, be coincident to
    within ``gap_tol`` and face each other to within ``angle_tol``.  Returns a
    list of problem strings; an empty list means the graph is consistent.
    """
    problems = []
    for a, b in graph.edges():
        if polarities[a.boat] == polarities[b.boat]:
            problems.append(f"{a}-{b}: same polarity {polarities[a.boat].value}")
        pa = a.world_pose(poses[a.boat], radii[a.boat])
        pb = b.world_pose(poses[b.boat], radii[b.boat])
        gap = math.hypot(pb.x - pa.x, pb.y - pa.y)
        if gap > gap_tol:
            problems.append(f"{a}-{b}: port gap {gap:.4f} m exceeds {gap_tol} m")
        err = abs(wrap_angle(pb.theta + math.pi - pa.theta))
        if err > angle_tol:
            problems.append(f"{a}-{b}: heading error {err:.4f} rad exceeds {angle_tol:.4f}")
    return problems
