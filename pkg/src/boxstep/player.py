"""Navigation and animation clock over a reduction trace.

The player owns a current step index and, while animating, a Morph
between two consecutive snapshots.  advance() is driven by an external
clock; in playing mode finished morphs chain into the next step until
the trace reaches its fixpoint.
"""

from __future__ import annotations

from .morph import Morph
from .reducer import ReductionTrace

IDLE = "idle"
ANIMATING_FORWARD = "animating_forward"
ANIMATING_BACKWARD = "animating_backward"
PLAYING = "playing"

STEP_DURATION_MS = 700


class Player:
    def __init__(self, trace: ReductionTrace,
                 step_duration_ms: int = STEP_DURATION_MS):
        self.trace = trace
        self.index = 0
        self.mode = IDLE
        self.active_morph: Morph | None = None
        self.elapsed = 0.0
        self.step_duration = step_duration_ms
        self._delta = 1                 # index change when the morph lands

    # --- state inspection ---

    def current_expr(self):
        return self.trace.snapshots[self.index].expr

    def playing(self) -> bool:
        return self.mode in (PLAYING, ANIMATING_FORWARD)

    def at_fixpoint(self) -> bool:
        """True when the current snapshot has no successor."""
        return self.trace.ensure(self.index + 1) == self.index

    # --- morph construction ---

    def _forward_morph(self) -> Morph | None:
        if self.trace.ensure(self.index + 1) == self.index:
            return None
        snap = self.trace.snapshots[self.index + 1]
        return Morph(self.current_expr(), snap.expr, snap.origin, snap.progeny)

    def _backward_morph(self) -> Morph | None:
        if self.index == 0:
            return None
        snap = self.trace.snapshots[self.index]
        previous = self.trace.snapshots[self.index - 1].expr
        return Morph(snap.expr, previous, snap.progeny, snap.origin)

    def _commit(self) -> None:
        """Finish the active morph: land on its destination index."""
        if self.active_morph is None:
            return
        self.index += self._delta
        self.active_morph = None
        self.elapsed = 0.0

    def _begin(self, morph: Morph, mode: str, delta: int) -> None:
        self.active_morph = morph
        self.active_morph.set_progress(0.0)
        self.elapsed = 0.0
        self.mode = mode
        self._delta = delta

    # --- the Playable operations ---

    def advance(self, timestep_ms: float) -> bool:
        """Feed elapsed wall time; returns True while still animating."""
        if self.mode == IDLE or self.active_morph is None:
            return False
        self.elapsed += timestep_ms
        progress = min(1.0, self.elapsed / self.step_duration)
        self.active_morph.set_progress(progress)
        if self.elapsed < self.step_duration:
            return True
        self._commit()
        if self.mode == PLAYING:
            nxt = self._forward_morph()
            if nxt is not None:
                self._begin(nxt, PLAYING, 1)
                return True
        self.mode = IDLE
        return False

    def next(self) -> None:
        if self.active_morph is not None:
            self.active_morph.set_progress(1.0)
            self._commit()
        morph = self._forward_morph()
        if morph is None:
            self.mode = IDLE
            return
        self._begin(morph, ANIMATING_FORWARD, 1)

    def back(self) -> None:
        if self.active_morph is not None:
            self.active_morph.set_progress(1.0)
            self._commit()
        morph = self._backward_morph()
        if morph is None:
            self.mode = IDLE
            return
        self._begin(morph, ANIMATING_BACKWARD, -1)

    def play(self) -> None:
        if self.active_morph is not None:
            # Resume a paused morph.
            self.mode = PLAYING
            return
        morph = self._forward_morph()
        if morph is None:
            self.mode = IDLE
            return
        self._begin(morph, PLAYING, 1)

    def pause(self) -> None:
        # Freezes at the current progress; the morph stays around so
        # play() can resume it.
        self.mode = IDLE

    def rewind(self) -> None:
        self.index = 0
        self.mode = IDLE
        self.active_morph = None
        self.elapsed = 0.0

    def fast_forward(self) -> bool:
        """Jump to the last snapshot; returns False when the trace was
        cut off by the step budget rather than reaching a fixpoint."""
        self.trace.run()
        self.index = self.trace.last_index
        self.mode = IDLE
        self.active_morph = None
        self.elapsed = 0.0
        return not self.trace.truncated
