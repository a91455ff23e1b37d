"""Global independent-set semantics over link subsets.

A subset of links is independent when no node is reused across its links
and every receiver can decode its own signal under staged SIC given all
in-range active transmitters.  SIC feasibility is not monotone (a strong
added signal can rescue a weak one), so enumeration is exhaustive by
default rather than pruned.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .phy import ChannelMatrix, NetworkTopology, PhyConfig, sic_decodable

#: Default upper bound on link count for exhaustive enumeration.
ENUMERATION_CAP = 20

#: Feasibility tolerance for the capacity-region linear program.
LP_TOL = 1e-9


class EnumerationCapError(ValueError):
    """Link count exceeds the exhaustive-enumeration cap."""


@dataclass(frozen=True, order=True)
class LinkSet:
    """A subset of links as a fixed-width bit vector."""

    bits: int
    width: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.width):
            raise ValueError("bit pattern exceeds the declared width")

    @classmethod
    def from_ids(cls, ids, width: int) -> "LinkSet":
        bits = 0
        for i in ids:
            if not 0 <= i < width:
                raise ValueError(f"link id {i} out of range for width {width}")
            bits |= 1 << i
        return cls(bits, width)

    def ids(self) -> tuple:
        return tuple(i for i in range(self.width) if self.bits >> i & 1)

    def contains(self, link_id: int) -> bool:
        return bool(self.bits >> link_id & 1)

    def add(self, link_id: int) -> "LinkSet":
        return LinkSet(self.bits | (1 << link_id), self.width)

    def remove(self, link_id: int) -> "LinkSet":
        return LinkSet(self.bits & ~(1 << link_id), self.width)

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __str__(self) -> str:
        return "{" + ",".join(str(i) for i in self.ids()) + "}"


@dataclass(frozen=True)
class FeasibleFamily:
    """All independent sets of a topology, sorted by bit pattern."""

    sets: tuple
    width: int

    def __post_init__(self):
        ordered = tuple(sorted(self.sets))
        object.__setattr__(self, "sets", ordered)
        object.__setattr__(self, "_index", {s.bits: k for k, s in enumerate(ordered)})
        if not ordered or ordered[0].bits != 0:
            raise ValueError("a feasible family must contain the empty set")

    def __len__(self) -> int:
        return len(self.sets)

    def __contains__(self, d) -> bool:
        bits = d.bits if isinstance(d, LinkSet) else int(d)
        return bits in self._index

    def ordinal(self, d) -> int:
        bits = d.bits if isinstance(d, LinkSet) else int(d)
        return self._index[bits]

    def vectors(self) -> np.ndarray:
        """Family as a (m, K) 0/1 matrix, one row per set."""
        v = np.zeros((len(self.sets), self.width))
        for k, s in enumerate(self.sets):
            for i in s.ids():
                v[k, i] = 1.0
        return v


def is_independent(d: LinkSet, topology: NetworkTopology, channel: ChannelMatrix,
                   phy: PhyConfig = None) -> bool:
    """Global feasibility indicator for a set of simultaneously active links."""
    phy = phy or topology.phy
    links = [topology.links[i] for i in d.ids()]
    used = set()
    for l in links:
        if l.tx in used or l.rx in used:
            return False
        used.update((l.tx, l.rx))
    beta_by_tx = {l.tx: phy.beta_for(l.id) for l in links}
    for l in links:
        active = {k.tx for k in links if topology.in_range(k.tx, l.rx)}
        if l.tx not in active:
            return False
        if not sic_decodable(l.tx, l.rx, active, channel, phy, beta_by_tx):
            return False
    return True


def eta(d: LinkSet, family: FeasibleFamily) -> tuple:
    """Links that can be added to ``d`` keeping the result in the family."""
    if d not in family:
        raise ValueError("set is not a member of the family")
    return tuple(
        i for i in range(d.width)
        if not d.contains(i) and d.add(i) in family
    )


def enumerate_feasible(topology: NetworkTopology, channel: ChannelMatrix,
                       phy: PhyConfig = None, mode: str = "exhaustive",
                       cap: int = ENUMERATION_CAP) -> FeasibleFamily:
    """Enumerate all independent sets.

    ``exhaustive`` tests every one of the 2**K subsets (feasibility is not
    hereditary, so no pruning is sound).  ``reachable`` keeps only the sets
    connected to the empty set by single-link additions, which is exactly
    the state space the protocol's Markov chain can visit.
    """
    k = topology.n_links
    if k > cap:
        raise EnumerationCapError(
            f"{k} links exceeds the enumeration cap of {cap}; use the simulator"
        )
    phy = phy or topology.phy
    if mode == "exhaustive":
        sets = [
            LinkSet(bits, k) for bits in range(1 << k)
            if is_independent(LinkSet(bits, k), topology, channel, phy)
        ]
    elif mode == "reachable":
        empty = LinkSet(0, k)
        seen = {0}
        sets = [empty]
        frontier = [empty]
        while frontier:
            nxt = []
            for d in frontier:
                for i in range(k):
                    if d.contains(i):
                        continue
                    cand = d.add(i)
                    if cand.bits in seen:
                        continue
                    if is_independent(cand, topology, channel, phy):
                        seen.add(cand.bits)
                        sets.append(cand)
                        nxt.append(cand)
            frontier = nxt
    else:
        raise ValueError(f"unknown enumeration mode {mode!r}")
    return FeasibleFamily(tuple(sets), k)


def reachable_subfamily(family: FeasibleFamily) -> tuple:
    """Split a family into (reachable-from-empty sets, unreachable sets)."""
    empty = LinkSet(0, family.width)
    seen = {0}
    frontier = [empty]
    order = [empty]
    while frontier:
        nxt = []
        for d in frontier:
            for i in eta(d, family):
                cand = d.add(i)
                if cand.bits not in seen:
                    seen.add(cand.bits)
                    order.append(cand)
                    nxt.append(cand)
        frontier = nxt
    unreachable = tuple(s for s in family.sets if s.bits not in seen)
    return tuple(sorted(order)), unreachable


def capacity_contains(x, family: FeasibleFamily, strict: bool = False):
    """Capacity-region membership of a per-link rate vector.

    Solves the small LP for weights alpha >= 0 with sum(alpha) = 1 whose
    mixture of set vectors dominates ``x`` componentwise (time sharing plus
    idling).  With ``strict=True`` the mixture must equal ``x`` exactly.
    Returns ``(verdict, alpha)`` where ``alpha`` aligns with
    ``family.sets`` on success and is None on rejection.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (family.width,) or np.any(x < 0):
        raise ValueError("rate vector must have one nonnegative entry per link")
    v = family.vectors()  # (m, K)
    m = len(family)
    a_eq = [np.ones((1, m))]
    b_eq = [np.array([1.0])]
    if strict:
        a_eq.append(v.T)
        b_eq.append(x)
        a_ub, b_ub = None, None
    else:
        a_ub = -v.T
        b_ub = -x
    res = linprog(
        c=np.zeros(m),
        A_ub=a_ub, b_ub=b_ub,
        A_eq=np.vstack(a_eq), b_eq=np.concatenate(b_eq),
        bounds=(0, None), method="highs",
    )
    if res.status != 0:
        return False, None
    alpha = res.x
    if abs(alpha.sum() - 1.0) > LP_TOL or np.any(alpha < -1e-12):
        return False, None
    if np.any(v.T @ alpha < x - LP_TOL):
        return False, None
    return True, alpha
