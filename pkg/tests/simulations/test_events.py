import pytest

from bobtaillab.core import EventOrderError
from bobtaillab.simulations import EventKind, EventQueue


def test_events_pop_by_time_then_insertion() -> None:
    queue = EventQueue()
    queue.schedule(2.0, EventKind.BLOCK_FOUND, "late", origin=0)
    queue.schedule(1.0, EventKind.PROOF_FOUND, "first", origin=0)
    queue.schedule(1.0, EventKind.PROOF_ARRIVAL, "second", origin=1, destination=2)
    assert [e.payload for e in queue] == ["first", "second", "late"]
    assert queue.now == 2.0
    assert len(queue) == 0


def test_past_events_are_rejected() -> None:
    queue = EventQueue()
    queue.schedule(5.0, EventKind.PROOF_FOUND, None, origin=0)
    queue.pop()
    queue.schedule(5.0, EventKind.PROOF_FOUND, None, origin=0)
    with pytest.raises(EventOrderError):
        queue.schedule(4.999, EventKind.PROOF_FOUND, None, origin=0)


def test_run_stops_at_horizon_or_on_request() -> None:
    queue = EventQueue()
    for t in (1.0, 2.0, 3.0, 4.0):
        queue.schedule(t, EventKind.PROOF_FOUND, t, origin=0)
    seen: list[float] = []
    queue.run(lambda e: seen.append(e.payload), until=2.5)
    assert seen == [1.0, 2.0]
    assert queue.peek_time() == 3.0

    queue.run(lambda e: seen.append(e.payload) or True)
    assert seen == [1.0, 2.0, 3.0]
    assert len(queue) == 1


def test_trace_digest_tracks_the_event_sequence() -> None:
    def replay(payloads: list[str]) -> EventQueue:
        queue = EventQueue(trace=True)
        for i, payload in enumerate(payloads):
            queue.schedule(float(i), EventKind.PROOF_ARRIVAL, payload, origin=i)
        queue.run(lambda e: None)
        return queue

    a, b, c = replay(["x", "y"]), replay(["x", "y"]), replay(["x", "z"])
    assert a.trace == b.trace
    assert len(a.trace or []) == 2
    assert a.trace_digest() == b.trace_digest() != c.trace_digest()
    assert "\t*\t" in (a.trace or [""])[0]


def test_untraced_queue_records_nothing() -> None:
    queue = EventQueue()
    queue.schedule(0.0, EventKind.PROOF_FOUND, None, origin=0)
    queue.pop()
    assert queue.trace is None
