"""Discrete-event engine: a stable priority queue of timestamped events."""

import heapq
import logging
from collections.abc import Callable, Iterator
from enum import Enum
from typing import Any, NamedTuple

from bobtaillab.core import EventOrderError
from bobtaillab.helpers.hashers import Sha256Digest

logger = logging.getLogger(__name__)


class EventKind(str, Enum):
    PROOF_FOUND = "proof-found"
    PROOF_ARRIVAL = "proof-arrival"
    BLOCK_FOUND = "block-found"
    BLOCK_ARRIVAL = "block-arrival"


class SimEvent(NamedTuple):
    """``destination`` None means every node except ``origin``"""

    time: float
    seq: int
    kind: EventKind
    payload: Any
    origin: int
    destination: int | None = None

    def trace_line(self) -> str:
        dest = "*" if self.destination is None else str(self.destination)
        return f"{self.time!r}\t{self.seq}\t{self.kind.value}\t{self.origin}\t{dest}\t{self.payload!r}"


class EventQueue:
    """Events pop in (time, insertion) order; scheduling before the current time is an error"""

    def __init__(self, *, trace: bool = False):
        self._heap: list[SimEvent] = []
        self._seq = 0
        self.now = 0.0
        self.trace: list[str] | None = [] if trace else None

    def __len__(self) -> int:
        return len(self._heap)

    def schedule(
        self,
        time: float,
        kind: EventKind,
        payload: Any,
        origin: int,
        destination: int | None = None,
    ) -> SimEvent:
        if time < self.now:
            raise EventOrderError(f"event {kind.value} scheduled at {time} before current time {self.now}")
        event = SimEvent(time, self._seq, kind, payload, origin, destination)
        self._seq += 1
        heapq.heappush(self._heap, event)
        return event

    def pop(self) -> SimEvent:
        event = heapq.heappop(self._heap)
        self.now = event.time
        if self.trace is not None:
            self.trace.append(event.trace_line())
        return event

    def peek_time(self) -> float | None:
        return self._heap[0].time if self._heap else None

    def __iter__(self) -> Iterator[SimEvent]:
        while self._heap:
            yield self.pop()

    def run(self, handler: Callable[[SimEvent], bool | None], *, until: float | None = None) -> None:
        """Feed events to ``handler`` until the queue drains, ``until`` passes or the handler returns True"""
        while self._heap:
            if until is not None and self._heap[0].time > until:
                return
            if handler(self.pop()):
                return

    def trace_digest(self) -> str:
        """Hex digest of the recorded trace, for determinism checks"""
        lines = "\n".join(self.trace or []).encode("utf-8")
        return Sha256Digest().digest_bytes(lines).hex()
