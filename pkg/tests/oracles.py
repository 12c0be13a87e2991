"""Independent oracles used by the test suite.

These deliberately avoid the library's own decode and counting paths so the
checks they back are not self-referential: decodability is judged from the
information available to a user, and mutual information is recomputed from
entropies.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Iterable

from cachepriv.core import SchemeInstance, pack_symbols
from cachepriv.verifier import atom_space


def view_determines_file(s: SchemeInstance, width: int = 1) -> bool:
    """Decoder-independent decodability: over every realization, a user's
    observation (cache, key, broadcast, own demand) must pin down the
    demanded file's content.  If it does, some decoder exists; if it does
    not, no decoder can work."""
    space = atom_space(s, width)
    seen: dict[tuple, tuple[int, ...]] = {}
    for store, demand, keys in space.iter_atoms():
        caches = s.place(keys, store)
        msg = s.deliver(store, demand, keys)
        for u in range(s.n_users):
            view = (
                u,
                demand[u],
                keys.user_keys[u],
                pack_symbols(caches[u].symbols),
                pack_symbols(msg.payload),
                msg.header,
            )
            want = tuple(sym.value for sym in store.file(demand[u]))
            if seen.setdefault(view, want) != want:
                return False
    return True


def entropy_bits(counts: Counter) -> float:
    total = sum(counts.values())
    return -sum(
        (c / total) * math.log2(c / total) for c in counts.values() if c
    )


def mi_from_pairs(pairs: Iterable[tuple[object, object]]) -> float:
    """I(L; R) = H(L) + H(R) - H(L, R), a second route to the verifier's
    plug-in mutual information figure."""
    joint: Counter = Counter()
    left: Counter = Counter()
    right: Counter = Counter()
    for l, r in pairs:
        joint[(l, r)] += 1
        left[l] += 1
        right[r] += 1
    return entropy_bits(left) + entropy_bits(right) - entropy_bits(joint)
