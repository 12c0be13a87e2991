"""Exhaustive scheme verification by exact enumeration.

Correctness and privacy are decided over the full joint space of file
realizations, demands, user keys, and server randomness.  Independence is
judged by an exact integer identity on count tables; the mutual-information
figure attached to a verdict is a float diagnostic only and never decides
pass or fail.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .core import (
    CacheContent,
    DeliveryMessage,
    DemandVector,
    FileStore,
    KeyAssignment,
    ParameterError,
    Privacy,
    SchemeError,
    SchemeInstance,
)

DEFAULT_BUDGET = 1 << 28
BUDGET_ENV_VAR = "CACHEPRIV_BUDGET"


class BudgetExceeded(SchemeError):
    """The requested enumeration is larger than the atom budget."""

    def __init__(self, required: int, budget: int) -> None:
        super().__init__(
            f"enumeration needs {required} atoms, budget is {budget} "
            f"(override with {BUDGET_ENV_VAR})"
        )
        self.required = required
        self.budget = budget


def resolve_budget(budget: int | None = None) -> int:
    if budget is not None:
        return budget
    env = os.environ.get(BUDGET_ENV_VAR)
    if env is not None:
        return int(env)
    return DEFAULT_BUDGET


@dataclass(frozen=True)
class DecodeCounterexample:
    store_index: int
    demand: tuple[int, ...]
    user_keys: tuple[int, ...]
    server_random: int
    user: int
    expected: tuple[int, ...]
    actual: tuple[int, ...]

    def __str__(self) -> str:
        return (
            f"user {self.user} under demand {self.demand} "
            f"(store #{self.store_index}, keys {self.user_keys}, "
            f"server randomness {self.server_random}): "
            f"decoded {self.actual}, wanted {self.expected}"
        )


@dataclass(frozen=True)
class IndependenceCounterexample:
    left: tuple[int, ...]
    joint_count: int
    left_count: int
    right_count: int
    total: int

    def __str__(self) -> str:
        return (
            f"cell with other-user demands {self.left}: "
            f"{self.joint_count}*{self.total} != "
            f"{self.left_count}*{self.right_count}"
        )


@dataclass(frozen=True)
class Verdict:
    """Outcome of one exhaustive check."""

    passed: bool
    cases: int
    counterexample: object | None = None
    mi_bits: float | None = None


def verdict_to_text(name: str, v: Verdict) -> str:
    lines = [f"check: {name}", f"result: {'pass' if v.passed else 'fail'}"]
    lines.append(f"cases: {v.cases}")
    if v.mi_bits is not None:
        lines.append(f"mi_bits: {v.mi_bits:.12g}")
    if v.counterexample is not None:
        lines.append(f"counterexample: {v.counterexample}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# atom space


@dataclass(frozen=True)
class AtomSpace:
    """The joint space (stores x demands x keys x server randomness)."""

    scheme: SchemeInstance
    width: int
    store_count: int
    demands: tuple[tuple[int, ...], ...]
    key_sizes: tuple[int, ...]
    server_count: int

    @property
    def total(self) -> int:
        return (
            self.store_count
            * len(self.demands)
            * math.prod(self.key_sizes)
            * self.server_count
        )

    def atom(self, index: int) -> tuple[FileStore, DemandVector, KeyAssignment]:
        s = self.scheme
        index, p = divmod(index, self.server_count)
        keys = []
        for size in self.key_sizes:
            index, k = divmod(index, size)
            keys.append(k)
        index, d = divmod(index, len(self.demands))
        store = FileStore.from_index(s.n_files, s.subpacketization, self.width, index)
        return (
            store,
            DemandVector(s.n_files, self.demands[d]),
            KeyAssignment(tuple(keys), p),
        )

    def iter_atoms(
        self, order: Iterable[int] | None = None
    ) -> Iterator[tuple[FileStore, DemandVector, KeyAssignment]]:
        indices = range(self.total) if order is None else order
        for i in indices:
            yield self.atom(i)


def atom_space(s: SchemeInstance, width: int) -> AtomSpace:
    demands = s.served_demands().members
    return AtomSpace(
        scheme=s,
        width=width,
        store_count=FileStore.space_size(s.n_files, s.subpacketization, width),
        demands=demands,
        key_sizes=s.key_sizes,
        server_count=s.server_random_size(width),
    )


def _check_budget(s: SchemeInstance, width: int, budget: int | None) -> int:
    """Atom-count arithmetic, done before any demand set is materialized."""
    limit = resolve_budget(budget)
    required = (
        FileStore.space_size(s.n_files, s.subpacketization, width)
        * s.n_served()
        * math.prod(s.key_sizes)
        * s.server_random_size(width)
    )
    if required > limit:
        raise BudgetExceeded(required, limit)
    return required


def _encode_ints(values: Iterable[int]) -> bytes:
    """Canonical byte string for a flat tuple of nonnegative ints."""
    out = bytearray()
    for v in values:
        b = v.to_bytes((v.bit_length() + 7) // 8 or 1, "little")
        out += len(b).to_bytes(4, "little")
        out += b
    return bytes(out)


def _observable(cache: CacheContent, msg: DeliveryMessage, own_demand: int) -> bytes:
    from .core import pack_symbols

    cache_val, cache_len = pack_symbols(cache.symbols)
    pay_val, pay_len = pack_symbols(msg.payload)
    return _encode_ints(
        (cache_val, cache_len, cache.key, pay_val, pay_len)
        + msg.header
        + (own_demand,)
    )


# ---------------------------------------------------------------------------
# joint count tables


@dataclass
class JointDistribution:
    """Exact joint counts of (left, right) observations over an atom space."""

    total: int
    joint: Counter
    left: Counter
    right: Counter

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[object, object]]) -> "JointDistribution":
        joint: Counter = Counter()
        left: Counter = Counter()
        right: Counter = Counter()
        total = 0
        for l, r in pairs:
            joint[(l, r)] += 1
            left[l] += 1
            right[r] += 1
            total += 1
        return cls(total, joint, left, right)

    def merge(self, other: "JointDistribution") -> "JointDistribution":
        return JointDistribution(
            self.total + other.total,
            self.joint + other.joint,
            self.left + other.left,
            self.right + other.right,
        )

    def first_violation(self) -> tuple[object, object, int] | None:
        """First (left, right, count) cell breaking the exact product identity.

        Checks every pair in the product of observed margins, so structurally
        missing cells (count zero with positive margins) are caught too.
        """
        for l in self.left:
            for r in self.right:
                c = self.joint.get((l, r), 0)
                if c * self.total != self.left[l] * self.right[r]:
                    return (l, r, c)
        return None

    def mutual_information_bits(self) -> float:
        total = self.total
        mi = 0.0
        for (l, r), c in self.joint.items():
            if c:
                mi += (c / total) * math.log2(
                    c * total / (self.left[l] * self.right[r])
                )
        return max(mi, 0.0)


# ---------------------------------------------------------------------------
# checks


def check_decodability(
    s: SchemeInstance,
    width: int = 1,
    budget: int | None = None,
    order: Iterable[int] | None = None,
) -> Verdict:
    """Every user recovers its demanded file exactly, over every atom."""
    _check_budget(s, width, budget)
    space = atom_space(s, width)
    expected_cache_bits = s.memory * s.subpacketization * width
    expected_payload_bits = s.rate * s.subpacketization * width
    cases = 0
    for store, demand, keys in space.iter_atoms(order):
        caches = s.place(keys, store)
        msg = s.deliver(store, demand, keys)
        if len(caches) != s.n_users:
            raise SchemeError("placement did not produce one cache per user")
        for cache in caches:
            if cache.bit_length != expected_cache_bits:
                raise SchemeError(
                    f"cache holds {cache.bit_length} bits, "
                    f"declared M*F = {expected_cache_bits}"
                )
        if msg.payload_bits != expected_payload_bits:
            raise SchemeError(
                f"payload holds {msg.payload_bits} bits, "
                f"declared R*F = {expected_payload_bits}"
            )
        cases += 1
        for k in range(s.n_users):
            got = s.decode(k, demand[k], keys.user_keys[k], msg, caches[k])
            want = store.file(demand[k])
            if got != want:
                return Verdict(
                    False,
                    cases,
                    DecodeCounterexample(
                        store.index(),
                        demand.entries,
                        keys.user_keys,
                        keys.server_random,
                        k,
                        tuple(sym.value for sym in want),
                        tuple(sym.value for sym in got),
                    ),
                )
    return Verdict(True, cases)


def privacy_table(
    s: SchemeInstance,
    user: int,
    width: int = 1,
    budget: int | None = None,
    order: Iterable[int] | None = None,
) -> JointDistribution:
    """Joint counts of (other-user demands; this user's full view)."""
    _check_budget(s, width, budget)
    space = atom_space(s, width)

    def pairs() -> Iterator[tuple[object, object]]:
        for store, demand, keys in space.iter_atoms(order):
            caches = s.place(keys, store)
            msg = s.deliver(store, demand, keys)
            yield demand.drop(user), _observable(caches[user], msg, demand[user])

    return JointDistribution.from_pairs(pairs())


def check_privacy(
    s: SchemeInstance,
    user: int,
    width: int = 1,
    budget: int | None = None,
    order: Iterable[int] | None = None,
) -> Verdict:
    """Exact statistical independence of the other users' demands from
    everything user `user` observes (cache, key, broadcast, own demand).
    """
    if s.privacy is not Privacy.PRIVATE:
        raise ParameterError(f"{s.name} is not a private scheme")
    if not 0 <= user < s.n_users:
        raise ParameterError(f"no user {user} in a {s.n_users}-user scheme")
    table = privacy_table(s, user, width, budget, order)
    violation = table.first_violation()
    mi = table.mutual_information_bits()
    if violation is None:
        return Verdict(True, table.total, None, mi)
    left, right, count = violation
    return Verdict(
        False,
        table.total,
        IndependenceCounterexample(
            left,  # type: ignore[arg-type]
            count,
            table.left[left],
            table.right[right],
            table.total,
        ),
        mi,
    )


def check_conditional_invariance(
    s: SchemeInstance, width: int = 1, budget: int | None = None
) -> Verdict:
    """Two-file, two-user sanity law every private scheme must satisfy:

    conditioned on user k demanding file j, the joint distribution of
    (broadcast, user k's cache, file j's content) is the same whether the
    other user demands file 0 or file 1, and matches the unconditioned
    (over the other demand) table.
    """
    if s.privacy is not Privacy.PRIVATE:
        raise ParameterError(f"{s.name} is not a private scheme")
    if s.n_files != 2 or s.n_users != 2:
        raise ParameterError("conditional-invariance check is for N=K=2 schemes")
    from .core import pack_symbols

    _check_budget(s, width, budget)
    space = atom_space(s, width)
    tables: dict[tuple[int, int, int], Counter] = {
        (k, j, v): Counter() for k in (0, 1) for j in (0, 1) for v in (0, 1)
    }
    cases = 0
    for store, demand, keys in space.iter_atoms():
        caches = s.place(keys, store)
        msg = s.deliver(store, demand, keys)
        pay_val, pay_len = pack_symbols(msg.payload)
        cases += 1
        for k in (0, 1):
            j = demand[k]
            v = demand[1 - k]
            cache_val, cache_len = pack_symbols(caches[k].symbols)
            file_val, file_len = pack_symbols(store.file(j))
            obs = _encode_ints(
                (pay_val, pay_len)
                + msg.header
                + (cache_val, cache_len, caches[k].key, file_val, file_len)
            )
            tables[(k, j, v)][obs] += 1
    worst_mi = 0.0
    for k in (0, 1):
        for j in (0, 1):
            t0, t1 = tables[(k, j, 0)], tables[(k, j, 1)]
            both = t0 + t1
            joint: Counter = Counter()
            for v, t in ((0, t0), (1, t1)):
                for obs, c in t.items():
                    joint[(v, obs)] = c
            dist = JointDistribution(
                sum(both.values()),
                joint,
                Counter({0: sum(t0.values()), 1: sum(t1.values())}),
                both,
            )
            worst_mi = max(worst_mi, dist.mutual_information_bits())
            if t0 != t1:
                diff = next(iter(set(t0.items()) ^ set(t1.items())))
                return Verdict(
                    False,
                    cases,
                    f"user {k} demanding {j}: view counts shift with the "
                    f"other demand (first differing cell {diff})",
                    worst_mi,
                )
            for v, t in ((0, t0), (1, t1)):
                for obs in set(both) | set(t):
                    if both[obs] != 2 * t[obs]:
                        return Verdict(
                            False,
                            cases,
                            f"user {k} demanding {j}: conditioned table "
                            f"(other={v}) does not match the pooled table",
                            worst_mi,
                        )
    return Verdict(True, cases, None, worst_mi)


def measure_rates(
    s: SchemeInstance, width: int = 1
) -> tuple[Fraction, Fraction, int]:
    """Measured (memory, rate, header bits) from actual output lengths.

    Memory counts cache payload bits only (the stored key is excluded);
    rate counts broadcast payload bits only (the header is excluded).
    Both are exact fractions of the file size.
    """
    file_bits = s.subpacketization * width
    store = FileStore.zero(s.n_files, s.subpacketization, width)
    keys = KeyAssignment((0,) * s.n_users, 0)
    caches = s.place(keys, store)
    sizes = {c.bit_length for c in caches}
    if len(sizes) != 1:
        raise SchemeError(f"users have unequal cache sizes: {sorted(sizes)}")
    demand = DemandVector(s.n_files, s.served_demands().members[0])
    msg = s.deliver(store, demand, keys)
    return (
        Fraction(sizes.pop(), file_bits),
        Fraction(msg.payload_bits, file_bits),
        s.header_bits,
    )
