"""Systems of distinct representatives by augmenting-path bipartite matching."""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Sequence


def find_sdr(family: Sequence[Iterable[Hashable]]) -> list | None:
    """Pick one distinct element from every set, or return None if impossible.

    Kuhn's algorithm: one augmenting-path search per set.  Representatives are
    returned in family order.
    """
    options = [sorted(s) for s in family]
    if any(not opts for opts in options):
        return None
    owner: dict = {}

    def augment(i: int, seen: set) -> bool:
        for x in options[i]:
            if x in seen:
                continue
            seen.add(x)
            j = owner.get(x)
            if j is None or augment(j, seen):
                owner[x] = i
                return True
        return False

    for i in range(len(options)):
        if not augment(i, set()):
            return None
    chosen = [None] * len(options)
    for x, i in owner.items():
        chosen[i] = x
    return chosen


def has_sdr(family: Sequence[Iterable[Hashable]]) -> bool:
    return find_sdr(family) is not None
