"""Linear scheme search and rank-based verification over GF(2).

A linear scheme for n_files files split into t subfiles assigns each virtual
user a cache matrix and each served demand a delivery matrix, both acting on
the n_files*t stacked subfile symbols (file i subfile j is column i*t + j).
User u can decode file f from demand d exactly when every unit row of f lies
in the rowspan of user u's cache rows stacked with demand d's delivery rows.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import gf2
from .core import (
    CacheContent,
    DeliveryMessage,
    DemandSubset,
    DemandVector,
    FileStore,
    KeyAssignment,
    ParameterError,
    Privacy,
    SchemeInstance,
    SubfileSymbol,
    UnservedDemand,
    xor_all,
)
from .verifier import Verdict

DEFAULT_TRIAL_BUDGET = 10**6


@dataclass(frozen=True)
class LinearSchemeMatrices:
    """Cache matrices per virtual user and delivery matrices per demand.

    Rows are bit-packed ints over n_files*subpacketization columns.
    deliveries is a tuple of (demand, rows) pairs in a fixed order.
    """

    n_files: int
    n_users: int
    subpacketization: int
    cache_rows: tuple[tuple[int, ...], ...]
    deliveries: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    @property
    def n_cols(self) -> int:
        return self.n_files * self.subpacketization

    @property
    def cache_dim(self) -> int:
        return len(self.cache_rows[0]) if self.cache_rows else 0

    @property
    def tx_dim(self) -> int:
        return len(self.deliveries[0][1]) if self.deliveries else 0

    @property
    def memory(self) -> Fraction:
        return Fraction(self.cache_dim, self.subpacketization)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.tx_dim, self.subpacketization)

    def delivery_for(self, demand: Sequence[int]) -> tuple[int, ...]:
        key = tuple(demand)
        for d, rows in self.deliveries:
            if d == key:
                return rows
        raise UnservedDemand(f"no delivery matrix for demand {key}")

    def validate(self) -> None:
        """Shape and full-row-rank invariants (no wasted rows)."""
        if len(self.cache_rows) != self.n_users:
            raise ParameterError("one cache matrix per virtual user required")
        limit = 1 << self.n_cols
        for u, rows in enumerate(self.cache_rows):
            if len(rows) != self.cache_dim:
                raise ParameterError("ragged cache matrices")
            if any(not 0 <= r < limit for r in rows):
                raise ParameterError("cache row out of column range")
            if gf2.rank(rows) != len(rows):
                raise ParameterError(f"cache matrix of user {u} is rank deficient")
        for d, rows in self.deliveries:
            if len(d) != self.n_users:
                raise ParameterError("demand length does not match user count")
            if len(rows) != self.tx_dim:
                raise ParameterError("ragged delivery matrices")
            if any(not 0 <= r < limit for r in rows):
                raise ParameterError("delivery row out of column range")
            if rows and gf2.rank(rows) != len(rows):
                raise ParameterError(f"delivery matrix for {d} is rank deficient")


def _file_targets(m: LinearSchemeMatrices, file_index: int) -> list[int]:
    t = m.subpacketization
    return [1 << (file_index * t + j) for j in range(t)]


def verify_linear(m: LinearSchemeMatrices, demands: DemandSubset) -> Verdict:
    """Rank-condition decodability of a linear scheme over a demand set."""
    if demands.n_files != m.n_files or demands.n_users != m.n_users:
        raise ParameterError("demand set shape does not match the matrices")
    cases = 0
    for demand in demands:
        rows = m.delivery_for(demand)
        for u in range(m.n_users):
            basis = gf2.reduced_basis(m.cache_rows[u] + rows)
            for j, target in enumerate(_file_targets(m, demand[u])):
                cases += 1
                if not gf2.in_span(target, basis):
                    return Verdict(
                        False,
                        cases,
                        f"user {u} cannot recover subfile {j} of file "
                        f"{demand[u]} under demand {tuple(demand)}",
                    )
    return Verdict(True, cases)


# ---------------------------------------------------------------------------
# compiling matrices into an executable scheme


def _apply_row(row: int, flat: Sequence[SubfileSymbol], width: int) -> SubfileSymbol:
    picked = [flat[i] for i in range(len(flat)) if (row >> i) & 1]
    return xor_all(picked, width)


def compile_linear_scheme(
    m: LinearSchemeMatrices, served: DemandSubset, name: str
) -> SchemeInstance:
    """Executable scheme from matrices, with decode recipes fixed up front.

    The broadcast header carries the full demand vector, which is the usual
    convention for schemes with no privacy requirement.  Decode recipes are
    solved once here; if some (demand, user) pair is not solvable the decoder
    emits zero symbols for it, so a broken matrix set stays runnable and is
    caught by the exhaustive decodability check.
    """
    m.validate()
    if served.n_files != m.n_files or served.n_users != m.n_users:
        raise ParameterError("served demand set shape does not match the matrices")
    t = m.subpacketization
    n_cols = m.n_cols

    recipes: dict[tuple[tuple[int, ...], int], tuple | None] = {}
    for demand in served:
        tx_rows = m.delivery_for(demand)
        for u in range(m.n_users):
            stacked = m.cache_rows[u] + tx_rows
            per_subfile = []
            for target in _file_targets(m, demand[u]):
                per_subfile.append(gf2.solve_combination(stacked, target, n_cols))
            if any(c is None for c in per_subfile):
                recipes[(demand, u)] = None
            else:
                recipes[(demand, u)] = tuple(per_subfile)  # type: ignore[arg-type]

    def place(keys: KeyAssignment, store: FileStore) -> tuple[CacheContent, ...]:
        flat = store.flat()
        w = store.symbol_width
        return tuple(
            CacheContent(
                tuple(_apply_row(r, flat, w) for r in m.cache_rows[u]),
                keys.user_keys[u],
            )
            for u in range(m.n_users)
        )

    def deliver(
        store: FileStore, demand: DemandVector, keys: KeyAssignment
    ) -> DeliveryMessage:
        key = tuple(demand)
        if key not in served:
            raise UnservedDemand(f"{name} does not serve demand {key}")
        flat = store.flat()
        w = store.symbol_width
        rows = m.delivery_for(key)
        payload = tuple(_apply_row(r, flat, w) for r in rows)
        return DeliveryMessage(payload, key)

    def decode(
        user: int, demand: int, key: int, msg: DeliveryMessage, cache: CacheContent
    ) -> tuple[SubfileSymbol, ...]:
        full_demand = msg.header
        recipe = recipes.get((full_demand, user))
        if recipe is None:
            if (full_demand, user) not in recipes:
                raise UnservedDemand(f"{name} has no recipe for demand {full_demand}")
            w = cache.symbols[0].width if cache.symbols else msg.payload[0].width
            return tuple(SubfileSymbol(w, 0) for _ in range(t))
        available = cache.symbols + msg.payload
        w = available[0].width
        out = []
        for coeffs in recipe:
            out.append(
                xor_all([available[i] for i, c in enumerate(coeffs) if c], w)
            )
        return tuple(out)

    return SchemeInstance(
        name=name,
        n_files=m.n_files,
        n_users=m.n_users,
        memory=m.memory,
        rate=m.rate,
        subpacketization=t,
        key_sizes=(1,) * m.n_users,
        header_sizes=(m.n_files,) * m.n_users,
        server_random_size=lambda width: 1,
        place=place,
        deliver=deliver,
        decode=decode,
        privacy=Privacy.NON_PRIVATE,
        served=served,
    )


# ---------------------------------------------------------------------------
# search


def _restart_rng(seed: int, index: int) -> random.Random:
    # string seeding is stable across runs and platforms
    return random.Random(f"{seed}:{index}")


def _complete_demand(
    cache_bases: list[dict[int, int]],
    cache_rows: tuple[tuple[int, ...], ...],
    demand: Sequence[int],
    t: int,
    n_cols: int,
    tx_dim: int,
) -> tuple[int, ...] | None:
    """Delivery rows closing every user's rank gap for one demand, or None."""
    n_users = len(cache_bases)
    targets = [
        [1 << (demand[u] * t + j) for j in range(t)] for u in range(n_users)
    ]

    if tx_dim == 1:
        # each user pins the row to one coset of its cache span; intersect them
        candidates: set[int] | None = None
        for u in range(n_users):
            residuals = {gf2.reduce_vector(x, cache_bases[u]) for x in targets[u]}
            residuals.discard(0)
            if len(residuals) > 1:
                return None
            if not residuals:
                continue
            rho = residuals.pop()
            coset = {rho ^ v for v in gf2.span_elements(cache_rows[u])}
            candidates = coset if candidates is None else candidates & coset
            if not candidates:
                return None
        if candidates is None:
            return (1,)  # nobody needs the broadcast; send a fixed nonzero row
        x = min(candidates)
        return (x,) if x else None

    # small dimensions: scan delivery rowspans in canonical enumeration order
    for rows in gf2.iter_subspaces(n_cols, tx_dim):
        ok = True
        for u in range(n_users):
            basis = gf2.reduced_basis(cache_rows[u] + rows)
            if any(not gf2.in_span(x, basis) for x in targets[u]):
                ok = False
                break
        if ok:
            return rows
    return None


def _user_feasible(
    cache_rows: Sequence[int], files_needed: set[int], t: int, tx_dim: int
) -> bool:
    """Necessary condition: the delivery can add at most tx_dim dimensions,
    so each needed file may stick out of the cache span by at most that much.
    """
    basis = gf2.reduced_basis(cache_rows)
    for f in files_needed:
        residuals = gf2.reduced_basis(
            gf2.reduce_vector(1 << (f * t + j), basis) for j in range(t)
        )
        if len(residuals) > tx_dim:
            return False
    return True


def _try_placements(
    placements: list[tuple[int, ...]],
    demands: DemandSubset,
    t: int,
    n_cols: int,
    tx_dim: int,
) -> list[tuple[tuple[int, ...], tuple[int, ...]]] | None:
    bases = [gf2.reduced_basis(rows) for rows in placements]
    deliveries = []
    for demand in demands:
        rows = _complete_demand(bases, tuple(placements), demand, t, n_cols, tx_dim)
        if rows is None:
            return None
        deliveries.append((demand, rows))
    return deliveries


def search_linear_scheme(
    n_files: int,
    n_users: int,
    subpacketization: int,
    cache_dim: int,
    tx_dim: int,
    demands: DemandSubset,
    strategy: str = "restart",
    seed: int = 0,
    budget: int = DEFAULT_TRIAL_BUDGET,
) -> LinearSchemeMatrices | None:
    """Search for a linear scheme with the given cache/delivery dimensions.

    strategy "restart" draws each user's cache uniformly over the full-rank
    placements that pass the per-user rank filter (rejection sampling; the
    filter is necessary for completion, so no solution is ever excluded) and
    then solves for delivery rows demand by demand.  Trials are deterministic
    in the seed: restart i uses its own generator, so the first success has
    the lowest restart index no matter how trials are scheduled.  strategy
    "exhaustive" scans all placement rowspan combinations that pass the
    per-user rank filter; it is complete but only practical at tiny sizes.
    Returns None when the budget runs out.
    """
    t = subpacketization
    n_cols = n_files * t
    if demands.n_files != n_files or demands.n_users != n_users:
        raise ParameterError("demand set shape does not match the search target")
    if not 0 < cache_dim <= n_cols:
        raise ParameterError("cache dimension out of range")
    if not 0 <= tx_dim <= n_cols:
        raise ParameterError("delivery dimension out of range")

    if cache_dim == n_cols:
        # full caches decode anything locally; no broadcast rows needed
        ident = tuple(1 << i for i in range(n_cols))
        return LinearSchemeMatrices(
            n_files,
            n_users,
            t,
            tuple(ident for _ in range(n_users)),
            tuple((d, ()) for d in demands),
        )

    files_needed = [
        {demand[u] for demand in demands} for u in range(n_users)
    ]

    if strategy == "restart":
        # cap per-user rejection so an infeasible target cannot spin forever
        draw_cap = 4096
        for idx in range(budget):
            rng = _restart_rng(seed, idx)
            placements = []
            for u in range(n_users):
                for _ in range(draw_cap):
                    rows = gf2.rref(gf2.random_full_rank(cache_dim, n_cols, rng))
                    if _user_feasible(rows, files_needed[u], t, tx_dim):
                        placements.append(rows)
                        break
                else:
                    break
            if len(placements) != n_users:
                continue
            deliveries = _try_placements(placements, demands, t, n_cols, tx_dim)
            if deliveries is not None:
                found = LinearSchemeMatrices(
                    n_files, n_users, t, tuple(placements), tuple(deliveries)
                )
                found.validate()
                assert verify_linear(found, demands).passed
                return found
        return None

    if strategy == "exhaustive":
        per_user = []
        for u in range(n_users):
            options = [
                rows
                for rows in gf2.iter_subspaces(n_cols, cache_dim)
                if _user_feasible(rows, files_needed[u], t, tx_dim)
            ]
            if not options:
                return None
            per_user.append(options)
        tried = 0
        import itertools as _it

        for combo in _it.product(*per_user):
            tried += 1
            if tried > budget:
                return None
            deliveries = _try_placements(list(combo), demands, t, n_cols, tx_dim)
            if deliveries is not None:
                found = LinearSchemeMatrices(
                    n_files, n_users, t, tuple(combo), tuple(deliveries)
                )
                found.validate()
                assert verify_linear(found, demands).passed
                return found
        return None

    raise ParameterError(f"unknown search strategy {strategy!r}")


# ---------------------------------------------------------------------------
# descriptor text format


DESCRIPTOR_VERSION = 1


def export_descriptor(m: LinearSchemeMatrices, name: str) -> str:
    """Serialize matrices to the line-based descriptor format.

    Rows are 0/1 strings, leftmost character = column 0 (file 0, subfile 0).
    """
    n_cols = m.n_cols

    def row_str(r: int) -> str:
        return "".join("1" if (r >> i) & 1 else "0" for i in range(n_cols))

    lines = [
        f"version: {DESCRIPTOR_VERSION}",
        f"name: {name}",
        f"files: {m.n_files}",
        f"users: {m.n_users}",
        f"subpacketization: {m.subpacketization}",
        f"cache_dim: {m.cache_dim}",
        f"tx_dim: {m.tx_dim}",
    ]
    for u, rows in enumerate(m.cache_rows):
        lines.append(f"cache {u}: " + " ".join(row_str(r) for r in rows))
    for demand, rows in m.deliveries:
        dstr = ",".join(str(d) for d in demand)
        lines.append(f"delivery {dstr}: " + " ".join(row_str(r) for r in rows))
    return "\n".join(lines) + "\n"


def parse_descriptor(text: str) -> tuple[LinearSchemeMatrices, str]:
    """Parse the descriptor format back into matrices (inverse of export)."""
    fields: dict[str, str] = {}
    caches: dict[int, tuple[int, ...]] = {}
    deliveries: list[tuple[tuple[int, ...], tuple[int, ...]]] = []

    def parse_rows(chunk: str) -> tuple[int, ...]:
        rows = []
        for word in chunk.split():
            if set(word) - {"0", "1"}:
                raise ParameterError(f"bad row string {word!r}")
            rows.append(int(word[::-1], 2) if word else 0)
        return tuple(rows)

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition(":")
        key, value = key.strip(), value.strip()
        if key.startswith("cache "):
            caches[int(key.split()[1])] = parse_rows(value)
        elif key.startswith("delivery "):
            demand = tuple(int(x) for x in key.split(None, 1)[1].split(","))
            deliveries.append((demand, parse_rows(value)))
        else:
            fields[key] = value
    if int(fields.get("version", "0")) != DESCRIPTOR_VERSION:
        raise ParameterError("unsupported descriptor version")
    n_users = int(fields["users"])
    m = LinearSchemeMatrices(
        int(fields["files"]),
        n_users,
        int(fields["subpacketization"]),
        tuple(caches[u] for u in range(n_users)),
        tuple(deliveries),
    )
    m.validate()
    return m, fields.get("name", "descriptor")
