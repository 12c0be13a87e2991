"""Core value types and exact bit/demand arithmetic for broadcast caching.

Everything here is exact: subfile symbols are fixed-width bit vectors held in
Python ints, scheme parameters are fractions, and every randomness source
(user keys, server randomness) is an explicit finite alphabet so that the
verifier can enumerate joint distributions exhaustively.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterator, Sequence


class SchemeError(Exception):
    """Base class for scheme construction and execution errors."""


class ParameterError(SchemeError):
    """Scheme parameters are inconsistent or not realizable."""


class UnservedDemand(SchemeError):
    """Delivery or decode requested for a demand outside the served set."""


# ---------------------------------------------------------------------------
# symbols and bit packing


@dataclass(frozen=True, slots=True)
class SubfileSymbol:
    """A fixed-width bit vector, the atomic unit schemes operate on."""

    width: int
    value: int

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ValueError(f"symbol width must be >= 1, got {self.width}")
        if not 0 <= self.value < (1 << self.width):
            raise ValueError(f"value {self.value} out of range for width {self.width}")

    def __xor__(self, other: "SubfileSymbol") -> "SubfileSymbol":
        return xor_symbols(self, other)


def xor_symbols(a: SubfileSymbol, b: SubfileSymbol) -> SubfileSymbol:
    """Bitwise XOR of two symbols of equal width."""
    if a.width != b.width:
        raise ValueError(f"symbol width mismatch: {a.width} != {b.width}")
    return SubfileSymbol(a.width, a.value ^ b.value)


def zero_symbol(width: int) -> SubfileSymbol:
    return SubfileSymbol(width, 0)


def xor_all(symbols: Sequence[SubfileSymbol], width: int) -> SubfileSymbol:
    """XOR-fold a sequence of symbols; the empty fold is the zero symbol."""
    out = zero_symbol(width)
    for s in symbols:
        out = xor_symbols(out, s)
    return out


def pack_symbols(symbols: Sequence[SubfileSymbol]) -> tuple[int, int]:
    """Pack symbols into one int, first symbol in the least significant bits.

    Returns (value, total_bit_length).
    """
    value = 0
    offset = 0
    for s in symbols:
        value |= s.value << offset
        offset += s.width
    return value, offset


def split_bits(value: int, width: int, count: int) -> tuple[SubfileSymbol, ...]:
    """Inverse of pack_symbols for a run of equal-width symbols."""
    mask = (1 << width) - 1
    return tuple(
        SubfileSymbol(width, (value >> (i * width)) & mask) for i in range(count)
    )


def total_width(symbols: Sequence[SubfileSymbol]) -> int:
    return sum(s.width for s in symbols)


# ---------------------------------------------------------------------------
# file store


@dataclass(frozen=True, slots=True)
class FileStore:
    """A library of n_files files, each split into t subfile symbols.

    Symbols are indexed (file, subfile) and flattened row-major wherever a
    linear order is needed, so file i subfile j is flat position i*t + j.
    """

    n_files: int
    subpacketization: int
    symbol_width: int
    symbols: tuple[tuple[SubfileSymbol, ...], ...]

    def __post_init__(self) -> None:
        if len(self.symbols) != self.n_files:
            raise ValueError("file count does not match symbol grid")
        for row in self.symbols:
            if len(row) != self.subpacketization:
                raise ValueError("subfile count does not match symbol grid")
            for s in row:
                if s.width != self.symbol_width:
                    raise ValueError("mixed symbol widths in store")

    @property
    def file_bits(self) -> int:
        return self.subpacketization * self.symbol_width

    def file(self, i: int) -> tuple[SubfileSymbol, ...]:
        return self.symbols[i]

    def flat(self) -> tuple[SubfileSymbol, ...]:
        return tuple(s for row in self.symbols for s in row)

    def index(self) -> int:
        """Rank of this realization in the row-major enumeration of stores."""
        value, _ = pack_symbols(self.flat())
        return value

    @staticmethod
    def space_size(n_files: int, subpacketization: int, width: int) -> int:
        return 1 << (n_files * subpacketization * width)

    @classmethod
    def from_index(
        cls, n_files: int, subpacketization: int, width: int, index: int
    ) -> "FileStore":
        flat = split_bits(index, width, n_files * subpacketization)
        rows = tuple(
            flat[i * subpacketization : (i + 1) * subpacketization]
            for i in range(n_files)
        )
        return cls(n_files, subpacketization, width, rows)

    @classmethod
    def random(
        cls, n_files: int, subpacketization: int, width: int, rng: random.Random
    ) -> "FileStore":
        # one independent draw per symbol, in (file, subfile) order
        rows = tuple(
            tuple(
                SubfileSymbol(width, rng.getrandbits(width))
                for _ in range(subpacketization)
            )
            for _ in range(n_files)
        )
        return cls(n_files, subpacketization, width, rows)

    @classmethod
    def zero(cls, n_files: int, subpacketization: int, width: int) -> "FileStore":
        return cls.from_index(n_files, subpacketization, width, 0)


# ---------------------------------------------------------------------------
# demands


@dataclass(frozen=True, slots=True)
class DemandVector:
    """One file request per user, each in range(n_files)."""

    n_files: int
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        for d in self.entries:
            if not 0 <= d < self.n_files:
                raise ValueError(f"demand {d} out of range for {self.n_files} files")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[int]:
        return iter(self.entries)

    def __getitem__(self, k: int) -> int:
        return self.entries[k]

    def drop(self, k: int) -> tuple[int, ...]:
        """All entries except user k's, in user order."""
        return self.entries[:k] + self.entries[k + 1 :]


def identity_vector(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def cyclic_shift(vector: Sequence[int], times: int) -> tuple[int, ...]:
    """Rotate right `times` positions: position j receives vector[j - times]."""
    n = len(vector)
    t = times % n
    return tuple(vector[(j - t) % n] for j in range(n))


def mod_sub(a: Sequence[int], b: Sequence[int], modulus: int) -> tuple[int, ...]:
    """Componentwise (a - b) mod modulus."""
    if len(a) != len(b):
        raise ValueError("length mismatch")
    return tuple((x - y) % modulus for x, y in zip(a, b))


def expand_demand(demand: DemandVector, keys: Sequence[int]) -> DemandVector:
    """Expand K real demands into N*K virtual demands using per-user keys.

    Block k of the output is the identity request pattern (0, ..., N-1)
    rotated right by (keys[k] - demand[k]) mod N.  Virtual user k*N + keys[k]
    then requests exactly demand[k], which is what makes the expansion usable
    as a one-time-pad cover story for the real demand.
    """
    n = demand.n_files
    if len(keys) != len(demand):
        raise ValueError("one key per user required")
    ident = identity_vector(n)
    shifts = mod_sub(keys, demand.entries, n)
    blocks = [cyclic_shift(ident, c) for c in shifts]
    flat = tuple(itertools.chain.from_iterable(blocks))
    return DemandVector(n, flat)


@dataclass(frozen=True)
class DemandSubset:
    """An explicit set of demand vectors, optionally annotated with shifts."""

    n_files: int
    n_users: int
    members: tuple[tuple[int, ...], ...]
    label: str
    shifts: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self) -> None:
        for m in self.members:
            if len(m) != self.n_users:
                raise ValueError("member length does not match user count")
        if self.shifts is not None and len(self.shifts) != len(self.members):
            raise ValueError("one shift annotation per member required")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.members)

    def __contains__(self, demand: object) -> bool:
        return tuple(demand) in set(self.members)  # type: ignore[arg-type]

    def shift_of(self, demand: Sequence[int]) -> tuple[int, ...]:
        if self.shifts is None:
            raise ValueError(f"demand set {self.label!r} carries no shift annotations")
        table = dict(zip(self.members, self.shifts))
        return table[tuple(demand)]


def full_demand_set(n_files: int, n_users: int) -> DemandSubset:
    members = tuple(itertools.product(range(n_files), repeat=n_users))
    return DemandSubset(n_files, n_users, members, "full")


def cyclic_demand_set(n_files: int, n_blocks: int) -> DemandSubset:
    """Demands over n_blocks*n_files virtual users whose length-n_files blocks
    are each a cyclic rotation of the identity pattern (0, ..., n_files-1).

    Each member is annotated with its per-block right-shift counts.
    """
    ident = identity_vector(n_files)
    members = []
    shifts = []
    for c in itertools.product(range(n_files), repeat=n_blocks):
        blocks = [cyclic_shift(ident, ci) for ci in c]
        members.append(tuple(itertools.chain.from_iterable(blocks)))
        shifts.append(c)
    return DemandSubset(
        n_files, n_blocks * n_files, tuple(members), "cyclic", tuple(shifts)
    )


def demand_histogram(demand: DemandVector) -> tuple[int, ...]:
    """Per-file request counts over all users."""
    counts = [0] * demand.n_files
    for d in demand:
        counts[d] += 1
    return tuple(counts)


# ---------------------------------------------------------------------------
# scheme plumbing


@dataclass(frozen=True, slots=True)
class KeyAssignment:
    """One realization of the shared user keys and the server's randomness."""

    user_keys: tuple[int, ...]
    server_random: int = 0


@dataclass(frozen=True, slots=True)
class CacheContent:
    """One user's cache: coded symbols plus the stored key value."""

    symbols: tuple[SubfileSymbol, ...]
    key: int

    @property
    def bit_length(self) -> int:
        return total_width(self.symbols)


@dataclass(frozen=True, slots=True)
class DeliveryMessage:
    """The broadcast: a symbol payload and a small finite-alphabet header."""

    payload: tuple[SubfileSymbol, ...]
    header: tuple[int, ...]

    @property
    def payload_bits(self) -> int:
        return total_width(self.payload)


class Privacy(Enum):
    PRIVATE = "private"
    NON_PRIVATE = "non-private"


PlaceFn = Callable[[KeyAssignment, FileStore], tuple[CacheContent, ...]]
DeliverFn = Callable[[FileStore, DemandVector, KeyAssignment], DeliveryMessage]
DecodeFn = Callable[
    [int, int, int, DeliveryMessage, CacheContent], tuple[SubfileSymbol, ...]
]


def alphabet_bits(size: int) -> int:
    """Bits needed for one value of a finite alphabet (0 for a singleton)."""
    if size < 1:
        raise ValueError("alphabet size must be positive")
    return (size - 1).bit_length()


@dataclass(frozen=True)
class SchemeInstance:
    """An executable caching scheme with declared exact parameters.

    place(keys, store)           -> one CacheContent per user
    deliver(store, demand, keys) -> DeliveryMessage
    decode(user, demand, key, message, cache) -> the demanded file's symbols

    key_sizes[k] is the alphabet size of user k's key; server_random_size(l)
    is the alphabet size of the server's private randomness when subfile
    symbols are l bits wide.  Non-private schemes must declare an explicit
    served demand set; private schemes serve every demand (served is None).
    """

    name: str
    n_files: int
    n_users: int
    memory: Fraction
    rate: Fraction
    subpacketization: int
    key_sizes: tuple[int, ...]
    header_sizes: tuple[int, ...]
    server_random_size: Callable[[int], int]
    place: PlaceFn
    deliver: DeliverFn
    decode: DecodeFn
    privacy: Privacy
    served: DemandSubset | None

    def __post_init__(self) -> None:
        if len(self.key_sizes) != self.n_users:
            raise ValueError("one key alphabet per user required")
        if self.privacy is Privacy.NON_PRIVATE and self.served is None:
            raise ValueError("non-private schemes must declare a served demand set")

    @property
    def header_bits(self) -> int:
        return sum(alphabet_bits(s) for s in self.header_sizes)

    @property
    def key_space_size(self) -> int:
        return math.prod(self.key_sizes)

    def served_demands(self) -> DemandSubset:
        if self.served is not None:
            return self.served
        return full_demand_set(self.n_files, self.n_users)

    def n_served(self) -> int:
        if self.served is not None:
            return len(self.served)
        return self.n_files**self.n_users

    def describe(self) -> str:
        return (
            f"{self.name} (N={self.n_files} K={self.n_users} "
            f"M={self.memory} R={self.rate} t={self.subpacketization}, "
            f"{self.privacy.value})"
        )
