"""Closed-form regime bounds for two-group and multigroup structures.

Three gain factors drive every bound.  For a link into a clique of size s
with one-hop benefit delta:

  clique_link_gain(s)  = delta + (s - 1) * delta**2      (first link in)
  extra_link_gain(s)   = (1 - delta) * clique_link_gain  (parallel link, fresh endpoints)
  shortcut_gain()      = delta - delta**2                (direct link to a 2-hop contact)

They satisfy 0 < shortcut < extra(s) < clique(s) for s >= 3, 0 < delta < 1.
Dividing the link cost by a gain factor turns it into a coordination-weight
bound: below cost/clique_link_gain no cross link pays; above
cost/shortcut_gain every cross link pays.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from .model import CoordinationMatrix, GroupPartition, ModelParams, ValidationError


class RegimeUndefinedError(ValueError):
    """Raised when the link cost is too high for the closed-form regimes."""


def _check_domain(s: int, delta: float) -> None:
    if s < 3:
        raise ValidationError(f"group size must be >= 3, got {s}")
    if not 0.0 < delta < 1.0:
        raise ValidationError(f"delta must be in (0, 1), got {delta}")


def clique_link_gain(s: int, delta: float) -> float:
    """Benefit factor of a direct link into an s-clique reached no other way."""
    _check_domain(s, delta)
    return delta + (s - 1) * delta * delta


def extra_link_gain(s: int, delta: float) -> float:
    """Benefit factor of an additional, fresh-endpoint link into an s-clique."""
    return (1.0 - delta) * clique_link_gain(s, delta)


def shortcut_gain(delta: float) -> float:
    """Benefit of turning one two-hop contact into a direct link."""
    if not 0.0 < delta < 1.0:
        raise ValidationError(f"delta must be in (0, 1), got {delta}")
    return delta - delta * delta


def _require_low_cost(params: ModelParams) -> None:
    if not params.cost < shortcut_gain(params.delta) - params.epsilon:
        raise RegimeUndefinedError(
            f"cost {params.cost} is not below the clique-formation bound "
            f"{shortcut_gain(params.delta)}; regimes are undefined there")


class RegimeKind(enum.Enum):
    DISJOINT = "disjoint"
    BRIDGE = "bridge"
    EXACT_K = "exact_k"
    REDUNDANT = "redundant"
    MAXIMAL = "maximal"
    BOUNDARY_TIE = "boundary_tie"


@dataclass(frozen=True)
class RegimePrediction:
    """Predicted structure class with the bounds of the interval it came from."""

    kind: RegimeKind
    lower: float
    upper: float
    k: Optional[int] = None

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValidationError("regime interval bounds out of order")
        if self.kind is RegimeKind.EXACT_K and (self.k is None or self.k < 2):
            raise ValidationError("exact-k regime needs k >= 2")

    def interconnections(self, s1: int, s2: int) -> Optional[int]:
        """Predicted cross-link count, or None when the kind does not pin one."""
        if self.kind is RegimeKind.DISJOINT:
            return 0
        if self.kind is RegimeKind.BRIDGE:
            return 1
        if self.kind is RegimeKind.EXACT_K:
            return self.k
        if self.kind is RegimeKind.MAXIMAL:
            return s1 * s2
        return None


def stable_boundaries(s1: int, s2: int, params: ModelParams) -> list[float]:
    """Ascending coordination-weight bounds between stable-count regimes.

    Entry 0 separates disjoint from bridged; entry k separates k from k+1
    cross links; the last entry separates exact-k from fully linked.  The
    max over both group sizes in each bound evaluates at min(s1, s2) since
    the gain factors increase with s.
    """
    _require_low_cost(params)
    s = min(s1, s2)
    c, delta = params.cost, params.delta
    drop = delta * shortcut_gain(delta)  # per-existing-link reduction of the extra gain
    bounds = [c / clique_link_gain(s, delta)]
    for k in range(2, s + 1):
        bounds.append(c / (extra_link_gain(s, delta) - (k - 2) * drop))
    bounds.append(c / shortcut_gain(delta))
    return bounds


def efficient_boundaries(s1: int, s2: int, params: ModelParams) -> list[float]:
    """Ascending bounds between efficient-structure regimes (three values)."""
    _require_low_cost(params)
    c, delta = params.cost, params.delta
    y1a = clique_link_gain(s1, delta)
    y1b = clique_link_gain(s2, delta)
    bridge_lb = c * delta / (y1a * y1b)
    redundant_lb = 2.0 * c / (extra_link_gain(s1, delta) + extra_link_gain(s2, delta)
                              + (s1 + s2 - 4) * delta * shortcut_gain(delta))
    maximal_lb = c / shortcut_gain(delta)
    return [bridge_lb, redundant_lb, maximal_lb]


def _near_boundary(value: float, boundaries: list[float], epsilon: float) -> Optional[float]:
    for b in boundaries:
        if abs(value - b) <= epsilon:
            return b
    return None


def classify_two_group_stable(s1: int, s2: int, params: ModelParams,
                              f_cross: float) -> RegimePrediction:
    """Stable-structure regime for two groups as a function of the cross weight.

    Exactly on a regime bound (within epsilon) the stable structure is not
    unique, so a boundary tie is reported instead of picking a side.
    """
    if not 0.0 <= f_cross <= 1.0:
        raise ValidationError(f"cross-group weight must be in [0, 1], got {f_cross}")
    bounds = stable_boundaries(s1, s2, params)
    tie = _near_boundary(f_cross, bounds, params.epsilon)
    if tie is not None:
        return RegimePrediction(RegimeKind.BOUNDARY_TIE, tie, tie)
    if f_cross < bounds[0]:
        return RegimePrediction(RegimeKind.DISJOINT, 0.0, bounds[0])
    if f_cross < bounds[1]:
        return RegimePrediction(RegimeKind.BRIDGE, bounds[0], bounds[1])
    if f_cross > bounds[-1]:
        return RegimePrediction(RegimeKind.MAXIMAL, bounds[-1], 1.0)
    for k in range(2, min(s1, s2) + 1):
        if f_cross < bounds[k]:
            return RegimePrediction(RegimeKind.EXACT_K, bounds[k - 1], bounds[k], k=k)
    raise AssertionError("unreachable: boundary scan exhausted")


def classify_two_group_efficient(s1: int, s2: int, params: ModelParams,
                                 f_cross: float) -> RegimePrediction:
    """Welfare-maximal structure regime for two groups (four closed intervals)."""
    if not 0.0 <= f_cross <= 1.0:
        raise ValidationError(f"cross-group weight must be in [0, 1], got {f_cross}")
    bounds = efficient_boundaries(s1, s2, params)
    tie = _near_boundary(f_cross, bounds, params.epsilon)
    if tie is not None:
        return RegimePrediction(RegimeKind.BOUNDARY_TIE, tie, tie)
    if f_cross < bounds[0]:
        return RegimePrediction(RegimeKind.DISJOINT, 0.0, bounds[0])
    if f_cross < bounds[1]:
        return RegimePrediction(RegimeKind.BRIDGE, bounds[0], bounds[1])
    if f_cross < bounds[2]:
        return RegimePrediction(RegimeKind.REDUNDANT, bounds[1], bounds[2])
    return RegimePrediction(RegimeKind.MAXIMAL, bounds[2], 1.0)


def stability_efficiency_overlap(s1: int, s2: int, params: ModelParams,
                                 f_cross: float) -> bool:
    """True when the efficient structure is also pairwise stable.

    The overlap is a union of closed intervals whose middle piece exists
    only when delta is large relative to the group-size imbalance.
    """
    eff = efficient_boundaries(s1, s2, params)
    stab = stable_boundaries(s1, s2, params)
    eps = params.epsilon
    n = s1 + s2
    intervals = [(0.0, eff[0]), (eff[2], 1.0)]
    if params.delta >= max(s1 - 3, s2 - 3) / (n - 3):
        intervals.append((stab[0], eff[1]))
    return any(lo - eps <= f_cross <= hi + eps for lo, hi in intervals)


def redundancy_bounds(s_a: int, s_b: int, params: ModelParams) -> tuple[float, float]:
    """Cross weights above which redundant, then maximal, links form and persist."""
    _require_low_cost(params)
    s = min(s_a, s_b)
    redundant_lb = params.cost / extra_link_gain(s, params.delta)
    maximal_lb = params.cost / shortcut_gain(params.delta)
    return redundant_lb, maximal_lb


@dataclass(frozen=True)
class GroupGraph:
    """Simple undirected graph on group ids, one node per group."""

    m: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        for a, b in self.edges:
            if not (0 <= a < b < self.m):
                raise ValidationError(f"group edge ({a}, {b}) invalid for m={self.m}")

    @classmethod
    def from_edges(cls, m: int, edges) -> "GroupGraph":
        norm = frozenset((a, b) if a < b else (b, a) for a, b in edges)
        if any(a == b for a, b in norm):
            raise ValidationError("group graph cannot hold self-loops")
        return cls(m=m, edges=norm)

    @classmethod
    def star(cls, m: int, center: int = 0) -> "GroupGraph":
        return cls.from_edges(m, [(center, g) for g in range(m) if g != center])

    @cached_property
    def neighbor_sets(self) -> tuple[frozenset[int], ...]:
        adj = [set() for _ in range(self.m)]
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return tuple(frozenset(s) for s in adj)

    def has_edge(self, a: int, b: int) -> bool:
        return ((a, b) if a < b else (b, a)) in self.edges

    def distances_from(self, source: int,
                       drop: Optional[tuple[int, int]] = None,
                       add: Optional[tuple[int, int]] = None) -> list[float]:
        """Hop distances on the group graph, optionally toggling one edge."""
        adj = [set(s) for s in self.neighbor_sets]
        if drop is not None:
            a, b = drop
            adj[a].discard(b)
            adj[b].discard(a)
        if add is not None:
            a, b = add
            if a != b:
                adj[a].add(b)
                adj[b].add(a)
        dist = [math.inf] * self.m
        dist[source] = 0
        frontier = [source]
        level = 0
        while frontier:
            level += 1
            nxt = []
            for v in frontier:
                for u in adj[v]:
                    if dist[u] == math.inf:
                        dist[u] = level
                        nxt.append(u)
            frontier = nxt
        return dist

    def is_connected(self) -> bool:
        return all(d < math.inf for d in self.distances_from(0)) if self.m else True


def _bridge_toggle_gain(tree: GroupGraph, coordination: CoordinationMatrix,
                        sizes: tuple[int, ...], delta: float,
                        group: int, other: int) -> float:
    """Benefit swing for `group`'s representative when the (group, other) bridge
    toggles between present and absent, summed over every reachable group.

    Distances are group-graph hops with the toggled edge added resp. removed;
    an unreachable group contributes no benefit.
    """
    with_edge = tree.distances_from(group, add=(group, other))
    without_edge = tree.distances_from(group, drop=(group, other))
    total = 0.0
    for lam in range(tree.m):
        if lam == group:
            continue
        d_near = with_edge[lam]
        d_far = without_edge[lam]
        near = delta ** d_near if d_near < math.inf else 0.0
        far = delta ** d_far if d_far < math.inf else 0.0
        total += (coordination[group, lam] * (near - far)
                  * (1.0 + (sizes[lam] - 1) * delta))
    return total


def minimally_connected_sufficient(tree: GroupGraph, coordination: CoordinationMatrix,
                                   partition: GroupPartition, params: ModelParams) -> bool:
    """Sufficiency check for cliques joined by single bridges along a group graph.

    Every bridged pair must gain more than the link cost on both sides when
    its bridge toggles on (and stay below the redundant-link bound); every
    unbridged pair must fall short of the cost on at least one side.
    """
    _require_low_cost(params)
    if coordination.m != partition.m or tree.m != partition.m:
        raise ValidationError("group graph, coordination matrix, and partition disagree")
    if not tree.is_connected():
        raise ValidationError("group graph must be connected")
    sizes = partition.sizes
    c, delta, eps = params.cost, params.delta, params.epsilon
    for a in range(tree.m):
        for b in range(a + 1, tree.m):
            gain_a = _bridge_toggle_gain(tree, coordination, sizes, delta, a, b)
            gain_b = _bridge_toggle_gain(tree, coordination, sizes, delta, b, a)
            if tree.has_edge(a, b):
                redundant_lb = c / extra_link_gain(min(sizes[a], sizes[b]), delta)
                if not (gain_a > c + eps and gain_b > c + eps):
                    return False
                if not coordination[a, b] < redundant_lb - eps:
                    return False
            else:
                if not (gain_a < c - eps or gain_b < c - eps):
                    return False
    return True
