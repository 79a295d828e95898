"""Simulated network: FIFO order, determinism, transcript, deadlock."""

import pytest

from privsc.transport import (
    Channel,
    ClosedChannelError,
    DeadlockError,
    PartyId,
    Role,
    TransportError,
    run_session,
)

A = PartyId(Role.CONTRACT_PARTY, 0)
B = PartyId(Role.CONTRACT_PARTY, 1)
C = PartyId(Role.NODE, 0)
SEED = b"\x01" * 32


def test_channel_fifo_order():
    ch = Channel(A, B)
    ch.send(b"a")
    ch.send(b"b")
    assert ch.try_recv() == b"a"
    assert ch.try_recv() == b"b"
    assert ch.try_recv() is None
    assert ch.delivered_count == 2
    assert ch.sent_count == 2


def test_send_after_close_raises():
    ch = Channel(A, B)
    ch.close()
    with pytest.raises(ClosedChannelError):
        ch.send(b"x")


def test_recv_on_closed_empty_raises():
    ch = Channel(A, B)
    ch.close()
    with pytest.raises(ClosedChannelError):
        ch.try_recv()


def echo_programs():
    def alice(ctx):
        ctx.send(B, b"ping")
        reply = yield from ctx.recv(B)
        return reply

    def bob(ctx):
        msg = yield from ctx.recv(A)
        ctx.send(A, b"pong:" + msg)
        return None

    return {A: alice, B: bob}


def test_two_party_echo_transcript():
    results, transcript = run_session([A, B], echo_programs(), SEED)
    assert results[A] == b"pong:ping"
    assert len(transcript) == 2
    assert transcript.entries[0].sender == A
    assert transcript.entries[1].sender == B


def test_same_seed_identical_transcripts():
    def noisy(me, peer):
        def prog(ctx):
            ctx.send(peer, ctx.random_bytes(8))
            got = yield from ctx.recv(peer)
            ctx.send(peer, ctx.random_bytes(4) + got)
            got2 = yield from ctx.recv(peer)
            return got2

        return prog

    progs = {A: noisy(A, B), B: noisy(B, A)}
    _, t1 = run_session([A, B], progs, SEED)
    _, t2 = run_session([A, B], progs, SEED)
    assert t1.entries == t2.entries
    assert t1.export_lines() == t2.export_lines()
    _, t3 = run_session([A, B], progs, b"\x02" * 32)
    payloads = lambda t: [e.payload for e in t.entries]
    assert payloads(t3) != payloads(t1)


def test_transcript_records_every_send():
    def chatter(ctx):
        for i in range(5):
            ctx.send(B, bytes([i]))
        return None

    def sink(ctx):
        for _ in range(5):
            yield from ctx.recv(A)
        return None

    _, t = run_session([A, B], {A: chatter, B: sink}, SEED)
    assert len(t) == 5
    assert [e.payload for e in t.messages_from(A)] == [bytes([i]) for i in range(5)]
    assert t.total_bytes() == 5


def test_deadlock_detection_names_blocked_parties():
    def waits_forever(ctx):
        yield from ctx.recv(B)

    def also_waits(ctx):
        yield from ctx.recv(A)

    with pytest.raises(DeadlockError) as err:
        run_session([A, B], {A: waits_forever, B: also_waits}, SEED, idle_budget=50)
    assert set(err.value.blocked) == {A, B}


def test_unknown_party_rejected():
    def prog(ctx):
        ctx.send(C, b"x")
        return None
        yield

    with pytest.raises(TransportError):
        run_session([A, B], {A: prog}, SEED)


def test_export_lines_format():
    _, t = run_session([A, B], echo_programs(), SEED)
    lines = t.export_lines().strip().splitlines()
    assert lines[0].split() == ["0", "E0", "E1", "4"]
    assert lines[1].split()[:3] == ["1", "E1", "E0"]
