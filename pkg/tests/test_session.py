from __future__ import annotations

import random
from dataclasses import replace

import pytest

from cachepriv.core import (
    DemandVector,
    FileStore,
    KeyAssignment,
    SubfileSymbol,
    UnservedDemand,
)
from cachepriv.lift import basic_private_scheme, low_memory_private_scheme
from cachepriv.schemes import low_memory_2x4_scheme
from cachepriv.session import (
    FRAME_DECODE,
    FRAME_DELIVERY,
    FRAME_PLACEMENT,
    DecodeReport,
    DeliveryFrame,
    PlacementFrame,
    SessionTranscript,
    TranscriptError,
    pack_header,
    parse_transcript,
    run_session,
    simulate_session,
    transcript_to_bytes,
)
from cachepriv.verifier import JointDistribution, atom_space, check_privacy


def tiny_transcript() -> SessionTranscript:
    return SessionTranscript(
        "demo",
        (PlacementFrame(0, 1, 3, 0b101),),
        DeliveryFrame(2, 0b10, 4, 0b0110),
        (DecodeReport(0, 1, True, 3, 0b011),),
    )


def test_frame_bytes_exact():
    buf = transcript_to_bytes(tiny_transcript())
    placement = bytes(
        [FRAME_PLACEMENT, 10, 0, 0, 0]  # type, length
        + [0]  # user
        + [1, 0, 0, 0]  # key
        + [3, 0, 0, 0, 0b101]  # cache bit block
    )
    delivery = bytes(
        [FRAME_DELIVERY, 10, 0, 0, 0]
        + [2, 0, 0, 0, 0b10]  # header bit block
        + [4, 0, 0, 0, 0b0110]  # payload bit block
    )
    decode = bytes(
        [FRAME_DECODE, 8, 0, 0, 0]
        + [0, 1, 1]  # user, file, matched
        + [3, 0, 0, 0, 0b011]
    )
    assert buf == placement + delivery + decode


def test_transcript_round_trip():
    t = tiny_transcript()
    buf = transcript_to_bytes(t)
    parsed = parse_transcript(buf, "demo")
    assert parsed == t
    assert transcript_to_bytes(parsed) == buf


def test_pack_header():
    assert pack_header((1, 0), (2, 2)) == (0b01, 2)
    assert pack_header((1, 2), (2, 3)) == (0b101, 3)
    assert pack_header((0,), (1,)) == (0, 0)
    assert pack_header((), ()) == (0, 0)


def test_parse_rejects_malformed_bytes():
    good = transcript_to_bytes(tiny_transcript())
    with pytest.raises(TranscriptError):
        parse_transcript(good[:-1])
    with pytest.raises(TranscriptError):
        parse_transcript(bytes([0x7F, 0, 0, 0, 0]))
    with pytest.raises(TranscriptError):
        parse_transcript(b"\x01\x02\x00\x00\x00")
    with pytest.raises(TranscriptError):
        parse_transcript(b"")  # no delivery frame
    # nonzero padding above the declared bit count
    bad_block = bytes([FRAME_DELIVERY, 10, 0, 0, 0, 2, 0, 0, 0, 0b111, 1, 0, 0, 0, 1])
    with pytest.raises(TranscriptError):
        parse_transcript(bad_block)


def test_simulation_is_deterministic():
    s = low_memory_private_scheme()
    demand = DemandVector(2, (0, 1))
    a = transcript_to_bytes(simulate_session(s, demand, seed=5))
    b = transcript_to_bytes(simulate_session(s, demand, seed=5))
    c = transcript_to_bytes(simulate_session(s, demand, seed=6))
    assert a == b
    assert a != c


def test_simulated_sizes_match_declared_parameters():
    for s in (
        low_memory_private_scheme(),
        basic_private_scheme(3, 2, 0),
        basic_private_scheme(2, 3, 1),
    ):
        demand = DemandVector(s.n_files, (0,) * s.n_users)
        for width in (1, 2):
            t = simulate_session(s, demand, seed=1, width=width)
            file_bits = s.subpacketization * width
            assert t.all_matched
            assert t.delivery.payload_bits == s.rate * file_bits
            assert t.delivery.header_bits == s.header_bits
            for p in t.placements:
                assert p.cache_bits == s.memory * file_bits


def test_simulate_rejects_unserved_demands():
    with pytest.raises(UnservedDemand):
        simulate_session(low_memory_2x4_scheme(), DemandVector(2, (0, 0, 0, 0)), 0)


def test_run_session_records_mismatches():
    s = low_memory_private_scheme()
    decode = s.decode

    def corrupted(user, demand, key, msg, cache):
        out = decode(user, demand, key, msg, cache)
        return (SubfileSymbol(out[0].width, out[0].value ^ 1),) + out[1:]

    bad = replace(s, decode=corrupted)
    store = FileStore.random(2, 3, 1, random.Random(3))
    t = run_session(bad, store, DemandVector(2, (1, 0)), KeyAssignment((0, 1), 0))
    assert not t.all_matched
    assert [r.matched for r in t.reports] == [False, False]


def test_wire_observations_reproduce_the_privacy_verdict():
    # rebuild the user-0 privacy table from parsed transcript bytes only;
    # it must reach the same verdict as the library's own counting path
    s = low_memory_private_scheme()
    space = atom_space(s, 1)
    pairs = []
    for store, demand, keys in space.iter_atoms():
        parsed = parse_transcript(
            transcript_to_bytes(run_session(s, store, demand, keys))
        )
        me = parsed.placements[0]
        view = (
            me.cache_bits,
            me.cache_value,
            me.key,
            parsed.delivery,
            demand[0],
        )
        pairs.append((demand.drop(0), view))
    table = JointDistribution.from_pairs(pairs)
    assert table.total == space.total
    assert table.first_violation() is None
    assert check_privacy(s, 0).passed
