"""Finite-field simulation of functional-decode-forward.

Lattice codewords and their modulo-lattice sums are replaced by symbols of
Z_q and sums mod q.  Relay decoding and the downlink are noiseless: the rate
conditions in :mod:`mwrc.rates` are what license reliable decoding, so this
module only checks the combinatorics, i.e. that the rotated schedule always
hands every user enough independent pairwise sums to solve for everybody
else.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .schedule import Pair, Schedule, build_schedule


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q < 4:
        return True
    if q % 2 == 0:
        return False
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


def check_modulus(q: int) -> None:
    if isinstance(q, bool) or not isinstance(q, (int, np.integer)):
        raise TypeError(f"q must be an integer, got {q!r}")
    if not is_prime(int(q)):
        raise ValueError("q must be prime")


@dataclass(frozen=True)
class MessageTuple:
    field_modulus: int
    messages: tuple[int, ...]

    def __post_init__(self) -> None:
        check_modulus(self.field_modulus)
        msgs = tuple(int(w) for w in self.messages)
        if len(msgs) < 2:
            raise ValueError("need at least two users")
        if any(not 0 <= w < self.field_modulus for w in msgs):
            raise ValueError(f"messages must lie in [0, {self.field_modulus})")
        object.__setattr__(self, "messages", msgs)

    @property
    def num_users(self) -> int:
        return len(self.messages)

    def __getitem__(self, user: int) -> int:
        """Message of 1-based ``user``."""
        return self.messages[user - 1]


@dataclass(frozen=True)
class RelayFunction:
    block: int
    pair: Pair
    value: int


def uplink_round(tup: MessageTuple, sched: Schedule, m: int) -> list[RelayFunction]:
    """Pairwise sums the relay decodes over the L-1 blocks of tuple ``m``."""
    if sched.num_users != tup.num_users:
        raise ValueError("schedule and message tuple disagree on L")
    q = tup.field_modulus
    return [
        RelayFunction(l, (i, j), (tup[i] + tup[j]) % q)
        for l, (i, j) in enumerate(sched.pairs(m), start=1)
    ]


def encode_downlink(values: Iterable[int | RelayFunction], q: int) -> int:
    """Index of the cascade of relay functions: little-endian base-q digits.

    0-based, so the range is ``[0, q**(L-1))``.
    """
    U = 0
    scale = 1
    for v in values:
        s = v.value if isinstance(v, RelayFunction) else int(v)
        if not 0 <= s < q:
            raise ValueError(f"function value {s} outside [0, {q})")
        U += s * scale
        scale *= q
    return U


def decode_downlink(U: int, q: int, count: int) -> list[int]:
    if not 0 <= U < q**count:
        raise ValueError(f"U={U} outside [0, {q}**{count})")
    out = []
    for _ in range(count):
        U, s = divmod(U, q)
        out.append(s)
    return out


def recover_all(
    own_id: int, own_message: int, U: int, sched: Schedule, m: int, q: int
) -> list[int]:
    """Messages of all other users (in id order) from the broadcast index.

    The scheduled pairs of tuple ``m`` form a path through all users, so a
    breadth-first sweep from ``own_id`` fixes each neighbour's message as
    ``sum - known``.  A wrong ``own_message`` shifts every estimate by a
    deterministic alternating offset rather than raising.
    """
    L = sched.num_users
    pairs = sched.pairs(m)
    sums = decode_downlink(U, q, L - 1)
    adj: dict[int, list[tuple[int, int]]] = {u: [] for u in range(1, L + 1)}
    for (i, j), s in zip(pairs, sums):
        adj[i].append((j, s))
        adj[j].append((i, s))

    known = {own_id: own_message % q}
    queue = deque([own_id])
    while queue:
        u = queue.popleft()
        for v, s in adj[u]:
            if v not in known:
                known[v] = (s - known[u]) % q
                queue.append(v)
    assert len(known) == L, f"schedule row {m} does not span all users"
    return [known[j] for j in range(1, L + 1) if j != own_id]


@dataclass(frozen=True)
class SimTranscript:
    tuple_index: int
    field_modulus: int
    messages: tuple[int, ...]
    relay_functions: tuple[RelayFunction, ...]
    downlink_index: int
    # user -> messages of every other user, in id order
    per_user_recovered: dict[int, tuple[int, ...]]
    seed: int | None = None

    @property
    def success(self) -> bool:
        for i, rec in self.per_user_recovered.items():
            truth = tuple(w for j, w in enumerate(self.messages, start=1) if j != i)
            if rec != truth:
                return False
        return True


def run_tuple(tup: MessageTuple, sched: Schedule, m: int, seed: int | None = None) -> SimTranscript:
    q = tup.field_modulus
    funcs = uplink_round(tup, sched, m)
    U = encode_downlink(funcs, q)
    recovered = {
        i: tuple(recover_all(i, tup[i], U, sched, m, q)) for i in range(1, tup.num_users + 1)
    }
    return SimTranscript(
        tuple_index=m,
        field_modulus=q,
        messages=tup.messages,
        relay_functions=tuple(funcs),
        downlink_index=U,
        per_user_recovered=recovered,
        seed=seed,
    )


@dataclass(frozen=True)
class WindowResult:
    transcripts: tuple[SimTranscript, ...]
    seed: int | None = None

    @property
    def success(self) -> bool:
        return all(t.success for t in self.transcripts)


def run_window(
    messages: Sequence[MessageTuple], q: int, seed: int | None = None
) -> WindowResult:
    """Drive one full schedule window: tuple ``m`` of the list uses row ``m``."""
    check_modulus(q)
    if not messages:
        raise ValueError("empty window")
    L = messages[0].num_users
    if len(messages) != L:
        raise ValueError(f"a window holds exactly L={L} tuples, got {len(messages)}")
    for tup in messages:
        if tup.field_modulus != q:
            raise ValueError("all tuples in a window must share the modulus q")
        if tup.num_users != L:
            raise ValueError("all tuples in a window must have L messages")
    sched = build_schedule(L)
    ts = tuple(run_tuple(tup, sched, m, seed) for m, tup in enumerate(messages, start=1))
    return WindowResult(ts, seed)


def random_window(L: int, q: int, seed: int) -> list[MessageTuple]:
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, q, size=(L, L))
    return [MessageTuple(q, tuple(int(x) for x in row)) for row in draws]


# -- linear-algebra witnesses -----------------------------------------------


def coefficient_matrix(sched: Schedule, m: int) -> np.ndarray:
    """(L-1) x L 0/1 matrix: row l has ones at the two users of block l."""
    L = sched.num_users
    A = np.zeros((L - 1, L), dtype=np.int64)
    for r, (i, j) in enumerate(sched.pairs(m)):
        A[r, i - 1] += 1
        A[r, j - 1] += 1
    return A


def rank_mod_q(A: np.ndarray, q: int) -> int:
    """Rank over GF(q) by Gauss-Jordan elimination."""
    M = np.array(A, dtype=np.int64) % q
    rows, cols = M.shape
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if M[r, c] != 0), None)
        if piv is None:
            continue
        M[[rank, piv]] = M[[piv, rank]]
        M[rank] = (M[rank] * pow(int(M[rank, c]), -1, q)) % q
        for r in range(rows):
            if r != rank and M[r, c]:
                M[r] = (M[r] - M[r, c] * M[rank]) % q
        rank += 1
        if rank == rows:
            break
    return rank


def user_system_rank(sched: Schedule, m: int, user: int, q: int, drop: int | None = None) -> int:
    """Rank of the pairwise-sum system plus the user's own unit row.

    ``drop`` removes one block's equation (1-based) before the check.
    """
    A = coefficient_matrix(sched, m)
    if drop is not None:
        A = np.delete(A, drop - 1, axis=0)
    unit = np.zeros((1, sched.num_users), dtype=np.int64)
    unit[0, user - 1] = 1
    return rank_mod_q(np.vstack([A, unit]), q)


# -- batch path (kernels) ---------------------------------------------------


def path_order(sched: Schedule, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Users along the path of tuple ``m`` (0-based) and the linking block per step."""
    L = sched.num_users
    pairs = sched.pairs(m)
    if L == 2:
        return np.array([0, 1]), np.array([0])
    adj: dict[int, list[tuple[int, int]]] = {u: [] for u in range(1, L + 1)}
    for b, (i, j) in enumerate(pairs):
        adj[i].append((j, b))
        adj[j].append((i, b))
    ends = [u for u, nb in adj.items() if len(nb) == 1]
    assert len(ends) == 2, f"schedule row {m} is not a path"
    order, steps = [ends[0]], []
    prev = None
    while len(order) < L:
        u = order[-1]
        v, b = next((v, b) for v, b in adj[u] if v != prev)
        prev = u
        order.append(v)
        steps.append(b)
    return np.array(order) - 1, np.array(steps)


def batch_recover(
    messages: np.ndarray, sched: Schedule, m: int, q: int, backend: str | None = None
) -> np.ndarray:
    """Run tuple ``m`` for many message tuples at once.

    ``messages`` has shape ``(trials, L)``; returns ``(trials, L, L)`` where
    entry ``[t, i, j]`` is user ``i+1``'s estimate of user ``j+1``'s message.
    """
    pairs = np.array(sched.pairs(m), dtype=np.int64) - 1
    sums = _kernels.uplink_sums(messages, pairs, q, backend)
    order, steps = path_order(sched, m)
    return _kernels.recover(sums, messages, order, steps, q, backend)


def all_tuples(L: int, q: int) -> np.ndarray:
    return np.array(list(itertools.product(range(q), repeat=L)), dtype=np.int64).reshape(-1, L)


@dataclass
class DecodabilityReport:
    num_users: int
    field_modulus: int
    exhaustive: bool
    trials: int
    failures: int = 0
    rank_ok: bool = True
    deletion_deficient: bool = True
    details: list[str] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.failures == 0 and self.rank_ok and self.deletion_deficient


def check_decodability(
    L: int,
    q: int,
    max_exhaustive: int = 2**15,
    samples: int = 10_000,
    seed: int = 0,
    backend: str | None = None,
) -> DecodabilityReport:
    """Exact-recovery and rank checks for every tuple index and every user."""
    check_modulus(q)
    sched = build_schedule(L)
    exhaustive = q**L <= max_exhaustive
    if exhaustive:
        msgs = all_tuples(L, q)
    else:
        msgs = np.random.default_rng(seed).integers(0, q, size=(samples, L), dtype=np.int64)
    rep = DecodabilityReport(L, q, exhaustive, trials=msgs.shape[0])
    for m in range(1, L + 1):
        rec = batch_recover(msgs, sched, m, q, backend)
        bad = np.any(rec != msgs[:, None, :], axis=(1, 2))
        rep.failures += int(bad.sum())
        for user in range(1, L + 1):
            if user_system_rank(sched, m, user, q) != L:
                rep.rank_ok = False
                rep.details.append(f"m={m} user={user}: rank < L")
        for drop in range(1, L):
            if all(user_system_rank(sched, m, u, q, drop=drop) == L for u in range(1, L + 1)):
                rep.deletion_deficient = False
                rep.details.append(f"m={m} drop block {drop}: still full rank")
    return rep


# -- transcript text format ---------------------------------------------------


def format_transcripts(transcripts: Iterable[SimTranscript]) -> str:
    """Line-oriented dump.

    ``T m q seed`` opens a tuple, then ``B m l i j sum`` per block, ``U m index``
    and ``R m i w...`` per user (recovered messages of the others, in id order).
    """
    lines = []
    for t in transcripts:
        seed = "-" if t.seed is None else str(t.seed)
        lines.append(f"T {t.tuple_index} {t.field_modulus} {seed} " + " ".join(map(str, t.messages)))
        for f in t.relay_functions:
            lines.append(f"B {t.tuple_index} {f.block} {f.pair[0]} {f.pair[1]} {f.value}")
        lines.append(f"U {t.tuple_index} {t.downlink_index}")
        for i in sorted(t.per_user_recovered):
            vals = " ".join(map(str, t.per_user_recovered[i]))
            lines.append(f"R {t.tuple_index} {i} {vals}")
    return "\n".join(lines) + "\n" if lines else ""


def parse_transcripts(text: str) -> list[SimTranscript]:
    out: list[SimTranscript] = []
    cur: dict | None = None

    def flush():
        if cur is not None:
            out.append(
                SimTranscript(
                    tuple_index=cur["m"],
                    field_modulus=cur["q"],
                    messages=cur["messages"],
                    relay_functions=tuple(cur["funcs"]),
                    downlink_index=cur["U"],
                    per_user_recovered=cur["rec"],
                    seed=cur["seed"],
                )
            )

    for raw in text.splitlines():
        if not raw.strip():
            continue
        tag, *rest = raw.split()
        if tag == "T":
            flush()
            m, q, seed, *msgs = rest
            cur = dict(
                m=int(m),
                q=int(q),
                seed=None if seed == "-" else int(seed),
                messages=tuple(map(int, msgs)),
                funcs=[],
                U=None,
                rec={},
            )
        elif cur is None:
            raise ValueError(f"record before any T line: {raw!r}")
        elif tag == "B":
            _, l, i, j, s = map(int, rest)
            cur["funcs"].append(RelayFunction(l, (i, j), s))
        elif tag == "U":
            cur["U"] = int(rest[1])
        elif tag == "R":
            cur["rec"][int(rest[1])] = tuple(map(int, rest[2:]))
        else:
            raise ValueError(f"unknown record {tag!r}")
    flush()
    return out
