"""Rotated pairwise uplink schedule for functional-decode-forward.

Each message tuple ``m`` is sent over ``L - 1`` blocks.  In block ``l`` exactly
two adjacent users (on the cycle 1-2-...-L-1) transmit; which pair is skipped
rotates with ``m``, so the pattern repeats every ``L`` tuples and every user is
active in the same number of blocks per window.  That balance is what lets an
active user spend ``L*P/2`` per block while averaging ``P``.

User ids and the indices ``m`` and ``l`` are 1-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

Pair = tuple[int, int]

ACTIVE = "■"  # filled square
IDLE = "□"  # empty square


def _check_users(L: int) -> None:
    if isinstance(L, bool) or not isinstance(L, int):
        raise TypeError(f"L must be an integer, got {L!r}")
    if L < 2:
        raise ValueError("L must be >= 2")


def pair_for(L: int, m: int, l: int) -> Pair:
    """Users transmitting in block ``l`` of message tuple ``m``."""
    return ((l + m - 2) % L + 1, (l + m - 1) % L + 1)


def omitted_pair(L: int, m: int) -> Pair:
    """The one cycle edge that tuple ``m`` never schedules."""
    _check_users(L)
    if not 1 <= m <= L:
        raise ValueError(f"m must lie in 1..{L}, got {m}")
    return ((m + L - 2) % L + 1, (m + L - 1) % L + 1)


def cycle_edges(L: int) -> list[Pair]:
    return [(i, i % L + 1) for i in range(1, L + 1)]


@dataclass(frozen=True)
class Schedule:
    num_users: int
    # window[m-1][l-1] -> ordered pair
    window: tuple[tuple[Pair, ...], ...]
    # transmit power of an active user, in units of the average power P
    active_power: Fraction

    def entry(self, m: int, l: int) -> Pair:
        """Pair for any tuple index ``m >= 1`` (the window tiles periodically)."""
        if m < 1 or not 1 <= l <= self.num_users - 1:
            raise IndexError(f"(m={m}, l={l}) out of range")
        return self.window[(m - 1) % self.num_users][l - 1]

    def pairs(self, m: int) -> tuple[Pair, ...]:
        if m < 1:
            raise IndexError(f"m must be >= 1, got {m}")
        return self.window[(m - 1) % self.num_users]

    def is_active(self, user: int, m: int, l: int) -> bool:
        return user in self.entry(m, l)

    def active_blocks(self, user: int) -> int:
        return sum(user in pair for row in self.window for pair in row)

    @property
    def num_blocks(self) -> int:
        return self.num_users * (self.num_users - 1)


def build_schedule(L: int) -> Schedule:
    _check_users(L)
    window = tuple(
        tuple(pair_for(L, m, l) for l in range(1, L)) for m in range(1, L + 1)
    )
    return Schedule(num_users=L, window=window, active_power=Fraction(L, 2))


@dataclass(frozen=True)
class PowerLedger:
    num_users: int
    window_blocks: int
    per_user_active_blocks: dict[int, int]
    active_power: Fraction
    per_user_average_power: dict[int, Fraction]
    duty_cycle: Fraction


def power_ledger(L: int, P: Rational | int = 1) -> PowerLedger:
    """Exact per-user power accounting over one schedule window.

    ``P`` must be an exact rational (``int`` or ``Fraction``); floats are
    refused so that the average-power identity stays an identity.
    """
    if isinstance(P, float):
        raise TypeError("P must be an exact rational, not a float")
    P = Fraction(P)
    if P <= 0:
        raise ValueError("P must be positive")
    sched = build_schedule(L)
    blocks = sched.num_blocks
    active = {u: sched.active_blocks(u) for u in range(1, L + 1)}
    p_active = sched.active_power * P
    average = {u: Fraction(n, blocks) * p_active for u, n in active.items()}
    counts = set(active.values())
    if len(counts) != 1:
        raise AssertionError(f"unbalanced schedule: {active}")
    return PowerLedger(
        num_users=L,
        window_blocks=blocks,
        per_user_active_blocks=active,
        active_power=p_active,
        per_user_average_power=average,
        duty_cycle=Fraction(counts.pop(), blocks),
    )


def render_grid(sched: Schedule) -> str:
    """Text table of who transmits when: one row per node, one column per block.

    Columns are grouped by message tuple.  The last line states the duty cycle
    both unreduced (active blocks over window blocks) and reduced.
    """
    L = sched.num_users
    label_w = len("Message tuple (m)")
    cell_w = len(str(L - 1))
    group_w = cell_w * (L - 1) + (L - 2)

    def row(label: str, cells: list[list[str]]) -> str:
        body = " | ".join(" ".join(c.ljust(cell_w) for c in g) for g in cells)
        return f"{label:<{label_w}} | {body} |"

    lines = [
        row("Message tuple (m)", [[f"{m:<{group_w}}"] for m in range(1, L + 1)]),
        row("Block (l)", [[str(l) for l in range(1, L)] for _ in range(L)]),
    ]
    lines.append("-" * len(lines[1]))
    for node in range(1, L + 1):
        cells = [
            [ACTIVE if node in sched.entry(m, l) else IDLE for l in range(1, L)]
            for m in range(1, L + 1)
        ]
        lines.append(row(f"Node {node}", cells))
    n_active = sched.active_blocks(1)
    frac = Fraction(n_active, sched.num_blocks)
    lines.append(
        f"active fraction {n_active}/{sched.num_blocks} = "
        f"{frac.numerator}/{frac.denominator}"
    )
    return "\n".join(lines) + "\n"
