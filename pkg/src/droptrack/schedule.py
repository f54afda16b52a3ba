"""Deterministic frame-drop schedules.

A schedule marks which frames of a sequence get a detector pass. Patterns
are "process n out of every m consecutive frames"; within each block of m
the first n indices are processed, so frame 0 is always processed and a
tracker can initialize. Schedules are immutable; the trigger operation
returns a new schedule with one extra processed frame.
"""

from __future__ import annotations

from dataclasses import dataclass

# Named processing targets and the n/m pattern each one stands for.
TARGET_PATTERNS: dict[int, tuple[int, int]] = {
    100: (1, 1),
    90: (9, 10),
    75: (3, 4),
    50: (1, 2),
    25: (1, 4),
    10: (1, 10),
}


@dataclass(frozen=True)
class DropPattern:
    """Process `n` out of every `m` consecutive frames."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or self.n > self.m:
            raise ValueError(f"pattern requires 1 <= n <= m, got {self.n}/{self.m}")

    def __str__(self) -> str:
        return f"{self.n}/{self.m}"


def parse_pattern(text: str) -> DropPattern:
    """Parse "n/m" strings or named targets like "75" into a DropPattern."""
    text = text.strip()
    if "/" in text:
        left, _, right = text.partition("/")
        try:
            return DropPattern(int(left), int(right))
        except ValueError as exc:
            raise ValueError(f"invalid pattern {text!r}: {exc}") from None
    try:
        target = int(text)
    except ValueError:
        raise ValueError(f"invalid pattern {text!r}: expected 'n/m' or a named target") from None
    if target not in TARGET_PATTERNS:
        known = ", ".join(str(t) for t in TARGET_PATTERNS)
        raise ValueError(f"unknown target {target}; named targets are {known}")
    return DropPattern(*TARGET_PATTERNS[target])


@dataclass(frozen=True)
class Schedule:
    """Per-sequence processing flags (True = run the detector)."""

    pattern: DropPattern
    flags: tuple[bool, ...]
    sequence_length: int

    def __post_init__(self):
        if self.sequence_length < 1:
            raise ValueError("sequence_length must be positive")
        if len(self.flags) != self.sequence_length:
            raise ValueError("flags length must equal sequence_length")

    def is_processed(self, frame_index: int) -> bool:
        return self.flags[frame_index]


def build_schedule(pattern: DropPattern, sequence_length: int) -> Schedule:
    """Deterministic schedule: frame i is processed iff (i mod m) < n."""
    if sequence_length < 1:
        raise ValueError("sequence_length must be positive")
    flags = tuple((i % pattern.m) < pattern.n for i in range(sequence_length))
    return Schedule(pattern=pattern, flags=flags, sequence_length=sequence_length)


def processed_count(schedule: Schedule) -> int:
    """Number of processed frames in the schedule."""
    return sum(schedule.flags)


def processed_count_closed_form(pattern: DropPattern, sequence_length: int) -> int:
    """Processed-frame count without materializing flags.

    Each full block of m frames contributes n processed frames; a trailing
    partial block of r frames contributes min(r, n) because the processed
    indices sit at the front of the block.
    """
    if sequence_length < 1:
        raise ValueError("sequence_length must be positive")
    full, rem = divmod(sequence_length, pattern.m)
    return full * pattern.n + min(rem, pattern.n)


def effective_target(schedule: Schedule) -> float:
    """Achieved processing percentage, which block remainders can shift
    away from the nominal target (e.g. 90.48% for 9/10 over 21 frames)."""
    return 100.0 * processed_count(schedule) / schedule.sequence_length


def trigger_next(schedule: Schedule, current_frame: int) -> Schedule:
    """Force processing of the frame after `current_frame`.

    Hook for situation-driven escalation: an external monitor can demand
    that the next available frame gets a detector pass. Idempotent when
    that frame is already processed.
    """
    if current_frame < 0:
        raise ValueError("current_frame must be nonnegative")
    if current_frame >= schedule.sequence_length - 1:
        raise ValueError(
            f"cannot trigger past the end of the sequence "
            f"(frame {current_frame} of {schedule.sequence_length})"
        )
    if schedule.flags[current_frame + 1]:
        return schedule
    flags = list(schedule.flags)
    flags[current_frame + 1] = True
    return Schedule(pattern=schedule.pattern, flags=tuple(flags),
                    sequence_length=schedule.sequence_length)
