"""Batch kernels for the finite-field FDF simulator.

Two interchangeable implementations are kept:

* ``numba``: explicit loops compiled with ``@njit``,
* ``numpy``: the same recurrences vectorised over the batch axis.

The numba path is used when numba imports and ``MWRC_DISABLE_NUMBA`` is unset
(or ``0``).  Both are always importable for cross-checking and benchmarking.

Conventions: user ids are 0-based here; ``pairs`` is the ``(L-1, 2)`` array of
scheduled pairs for one tuple; ``order`` lists the users along the path formed
by those pairs and ``step_block[k]`` is the block whose sum links
``order[k]`` and ``order[k+1]``.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("MWRC_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None


def _uplink_sums_py(messages, pairs, q):
    n, _ = messages.shape
    k = pairs.shape[0]
    out = np.empty((n, k), dtype=np.int64)
    for t in range(n):
        for b in range(k):
            out[t, b] = (messages[t, pairs[b, 0]] + messages[t, pairs[b, 1]]) % q
    return out


def _recover_py(sums, own, order, step_block, q):
    """Every user's view of every message, by sweeping the path both ways.

    ``own[t, i]`` is user ``i``'s own message in trial ``t``.  Result
    ``rec[t, i, j]`` is user ``i``'s estimate of user ``j``'s message.
    """
    n = sums.shape[0]
    L = order.shape[0]
    rec = np.empty((n, L, L), dtype=np.int64)
    for t in range(n):
        for p in range(L):
            me = order[p]
            rec[t, me, me] = own[t, me]
            for k in range(p, L - 1):
                a = order[k]
                b = order[k + 1]
                rec[t, me, b] = (sums[t, step_block[k]] - rec[t, me, a]) % q
            for k in range(p - 1, -1, -1):
                a = order[k + 1]
                b = order[k]
                rec[t, me, b] = (sums[t, step_block[k]] - rec[t, me, a]) % q
    return rec


def _uplink_sums_np(messages, pairs, q):
    return (messages[:, pairs[:, 0]] + messages[:, pairs[:, 1]]) % q


def _recover_np(sums, own, order, step_block, q):
    n = sums.shape[0]
    L = order.shape[0]
    rec = np.empty((n, L, L), dtype=np.int64)
    for p in range(L):
        me = order[p]
        rec[:, me, me] = own[:, me]
        for k in range(p, L - 1):
            rec[:, me, order[k + 1]] = (sums[:, step_block[k]] - rec[:, me, order[k]]) % q
        for k in range(p - 1, -1, -1):
            rec[:, me, order[k]] = (sums[:, step_block[k]] - rec[:, me, order[k + 1]]) % q
    return rec


if numba is not None:
    _uplink_sums_nb = numba.njit(cache=True)(_uplink_sums_py)
    _recover_nb = numba.njit(cache=True)(_recover_py)
else:  # pragma: no cover
    _uplink_sums_nb = _recover_nb = None

IMPLEMENTATIONS = {"numpy": (_uplink_sums_np, _recover_np)}
if _uplink_sums_nb is not None:
    IMPLEMENTATIONS["numba"] = (_uplink_sums_nb, _recover_nb)

BACKEND = "numba" if ("numba" in IMPLEMENTATIONS and not NUMBA_DISABLED) else "numpy"


def _prep(messages, pairs):
    messages = np.ascontiguousarray(messages, dtype=np.int64)
    pairs = np.ascontiguousarray(pairs, dtype=np.int64)
    if messages.ndim != 2:
        raise ValueError("messages must be a 2-D (trials, users) array")
    return messages, pairs


def uplink_sums(messages, pairs, q: int, backend: str | None = None) -> np.ndarray:
    messages, pairs = _prep(messages, pairs)
    fn = IMPLEMENTATIONS[backend or BACKEND][0]
    return fn(messages, pairs, np.int64(q))


def recover(sums, own, order, step_block, q: int, backend: str | None = None) -> np.ndarray:
    sums = np.ascontiguousarray(sums, dtype=np.int64)
    own = np.ascontiguousarray(own, dtype=np.int64)
    order = np.ascontiguousarray(order, dtype=np.int64)
    step_block = np.ascontiguousarray(step_block, dtype=np.int64)
    fn = IMPLEMENTATIONS[backend or BACKEND][1]
    return fn(sums, own, order, step_block, np.int64(q))
