"""Weighted deferred acceptance with acceptor capacities.

Both assignment stages reduce to the same bipartite problem: proposers court
acceptors, every allowed pair carries a real weight, and each acceptor can
hold a bounded number of proposers.  Preferences on both sides are derived
from the weights, with ties broken by id so that identical instances always
produce identical matchings:

* a proposer prefers pairs with higher weight, then lower acceptor id;
* an acceptor prefers pairs with higher weight, then lower proposer id.

Acceptors hold tentative matches and evict their weakest one when a better
proposal arrives while full, which is what makes the result stable.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import isfinite
from typing import Callable, Optional


@dataclass(frozen=True)
class MatchInstance:
    """One matching problem.

    ``weights`` maps allowed (proposer, acceptor) pairs to finite reals; a
    pair absent from the map is forbidden and will never be proposed.
    """

    proposers: tuple[str, ...]
    acceptors: tuple[str, ...]
    weights: dict[tuple[str, str], float]
    capacities: dict[str, int]

    def __post_init__(self):
        pset, aset = set(self.proposers), set(self.acceptors)
        if len(pset) != len(self.proposers) or len(aset) != len(self.acceptors):
            raise ValueError("duplicate proposer or acceptor ids")
        for (p, a), w in self.weights.items():
            if p not in pset or a not in aset:
                raise ValueError(f"weight for unknown pair ({p}, {a})")
            if not isfinite(w):
                raise ValueError(f"non-finite weight for ({p}, {a}): {w}")
        for a in self.acceptors:
            if self.capacities.get(a, 0) < 1:
                raise ValueError(f"acceptor {a} needs capacity >= 1")


@dataclass(frozen=True)
class Matching:
    pairs: frozenset[tuple[str, str]]
    unmatched: frozenset[str]


def _proposer_key(instance: MatchInstance, p: str, a: str):
    # smaller key = more preferred
    return (-instance.weights[(p, a)], a)


def _acceptor_key(instance: MatchInstance, p: str, a: str):
    return (-instance.weights[(p, a)], p)


def deferred_acceptance(instance: MatchInstance,
                        on_step: Optional[Callable[[int, dict[str, list[str]]], None]] = None,
                        ) -> Matching:
    """Proposer-optimal stable matching of ``instance``.

    Each free proposer proposes down its preference list; an acceptor keeps
    up to ``capacity`` tentative matches and, when full, evicts its weakest
    tentative match if the newcomer beats it.  A proposer whose list runs out
    ends unmatched.  The total number of proposals is bounded by the number
    of allowed pairs.

    ``on_step``, if given, is called after every proposal with the running
    proposal count and the tentative acceptor holdings (for instrumentation;
    the mapping is a live view and must not be mutated).
    """
    prefs = {p: sorted((a for a in instance.acceptors if (p, a) in instance.weights),
                       key=lambda a: _proposer_key(instance, p, a))
             for p in instance.proposers}
    next_choice = {p: 0 for p in instance.proposers}
    held: dict[str, list[str]] = {a: [] for a in instance.acceptors}
    free = deque(instance.proposers)
    unmatched: list[str] = []
    proposals = 0
    max_proposals = len(instance.weights)

    while free:
        p = free.popleft()
        choices = prefs[p]
        if next_choice[p] >= len(choices):
            unmatched.append(p)
            continue
        a = choices[next_choice[p]]
        next_choice[p] += 1
        proposals += 1
        assert proposals <= max_proposals, "proposal budget exceeded"
        holding = held[a]
        if len(holding) < instance.capacities[a]:
            holding.append(p)
        else:
            worst = max(holding, key=lambda q: _acceptor_key(instance, q, a))
            if _acceptor_key(instance, p, a) < _acceptor_key(instance, worst, a):
                holding.remove(worst)
                holding.append(p)
                free.append(worst)
            else:
                free.append(p)
        if on_step is not None:
            on_step(proposals, held)

    pairs = frozenset((p, a) for a, ps in held.items() for p in ps)
    matched = {p for p, _ in pairs}
    return Matching(pairs, frozenset(p for p in instance.proposers if p not in matched))


def is_stable(instance: MatchInstance, matching: Matching) -> tuple[bool, list[tuple[str, str]]]:
    """Check a matching for blocking pairs.

    A pair (p, a) with a defined weight blocks when p strictly prefers a to
    its current assignment (or has none) and a either has free capacity or
    strictly prefers p to its weakest current match.  Returns the verdict and
    the full list of blocking pairs, sorted.

    Raises:
        ValueError: if the matching is structurally inconsistent with the
            instance (unknown pairs, capacity overruns, duplicated proposers,
            or a wrong unmatched set).
    """
    match_of: dict[str, str] = {}
    held: dict[str, list[str]] = {a: [] for a in instance.acceptors}
    for p, a in matching.pairs:
        if (p, a) not in instance.weights:
            raise ValueError(f"matched pair ({p}, {a}) has no defined weight")
        if p in match_of:
            raise ValueError(f"proposer {p} matched more than once")
        match_of[p] = a
        held[a].append(p)
    for a, ps in held.items():
        if len(ps) > instance.capacities[a]:
            raise ValueError(f"acceptor {a} over capacity: {len(ps)} > {instance.capacities[a]}")
    expected_unmatched = {p for p in instance.proposers if p not in match_of}
    if set(matching.unmatched) != expected_unmatched:
        raise ValueError("unmatched set disagrees with pairs")

    blocking: list[tuple[str, str]] = []
    for (p, a) in instance.weights:
        current = match_of.get(p)
        if current is not None:
            if _proposer_key(instance, p, a) >= _proposer_key(instance, p, current):
                continue
        if len(held[a]) < instance.capacities[a]:
            blocking.append((p, a))
            continue
        worst = max(held[a], key=lambda q: _acceptor_key(instance, q, a))
        if _acceptor_key(instance, p, a) < _acceptor_key(instance, worst, a):
            blocking.append((p, a))
    blocking.sort()
    return (len(blocking) == 0, blocking)
