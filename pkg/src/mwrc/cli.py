"""Command-line front end.

Exit codes: 0 success, 1 simulation recovery failure, 2 usage error, 3 I/O error.
The CLI only converts dB to linear power and formats; every number comes from
:mod:`mwrc.rates`, :mod:`mwrc.regimes`, :mod:`mwrc.schedule` or
:mod:`mwrc.protocol`.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from typing import Sequence

import numpy as np

from . import protocol, regimes
from .rates import ChannelConfig, PowerMode, db_to_linear, rate_bundle, rate_grid
from .schedule import build_schedule, render_grid

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

SWEEP_COLUMNS = ["UB", "UBp", "CDF", "CF", "FDF"]
SWEEP_HEADER = ["snr_db", "P", "P0"] + [f"R_{c}" for c in SWEEP_COLUMNS]


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _config(args) -> ChannelConfig:
    L = args.users
    if L is None:
        raise UsageError("--users is required")
    if L < 2:
        raise UsageError("L must be ≥ 2")
    if args.snr_db is not None and args.power is not None:
        raise UsageError("give either --snr-db or --power, not both")
    if args.snr_db is not None:
        P = float(db_to_linear(args.snr_db))
    elif args.power is not None:
        P = args.power
    else:
        raise UsageError("one of --snr-db or --power is required")
    mode = args.mode
    if mode is None:
        mode = "independent" if args.relay_power is not None else "equal"
    mode = PowerMode(mode)
    if mode is not PowerMode.INDEPENDENT and args.relay_power is not None:
        derived = P if mode is PowerMode.EQUAL else L * P
        if not math.isclose(args.relay_power, derived, rel_tol=1e-12):
            raise UsageError(f"--relay-power {args.relay_power} contradicts --mode {mode.value}")
    try:
        return ChannelConfig.from_mode(L, P, mode, args.relay_power)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


# -- subcommands ---------------------------------------------------------------


def cmd_rates(args) -> int:
    cfg = _config(args)
    b = rate_bundle(cfg)
    print(f"L={cfg.num_users} P={cfg.user_power:g} P0={cfg.relay_power:g} mode={cfg.power_mode.value}")
    for name, value in zip(SWEEP_COLUMNS, b.as_row()):
        print(f"  R_{name:<4}= {_fmt(value)} bits/channel use")
    if args.out:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["L", "P", "P0"] + SWEEP_HEADER[3:])
        w.writerow([cfg.num_users, repr(cfg.user_power), repr(cfg.relay_power)] + [repr(v) for v in b.as_row()])
        _write(buf.getvalue(), args.out)
    return EXIT_OK


def sweep_grid(start: float, stop: float, step: float) -> np.ndarray:
    if not (step > 0 and start < stop) or not all(map(math.isfinite, (start, stop, step))):
        raise UsageError("sweep needs finite start < stop and step > 0")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def sweep_csv(L: int, mode: PowerMode, snr_db: np.ndarray, outputs: Sequence[str] = SWEEP_COLUMNS) -> str:
    P = db_to_linear(snr_db)
    if mode is PowerMode.EQUAL:
        P0 = P
    elif mode is PowerMode.SCALING:
        P0 = L * P
    else:
        raise UsageError("sweep supports --mode equal or scaling")
    g = rate_grid(L, P, P0)
    keep = [i for i, c in enumerate(SWEEP_COLUMNS) if c in outputs]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER[:3] + [SWEEP_HEADER[3 + i] for i in keep])
    for k in range(len(snr_db)):
        row = [repr(float(snr_db[k])), repr(float(P[k])), repr(float(P0[k]))]
        row += [repr(float(g[i, k])) for i in keep]
        w.writerow(row)
    return buf.getvalue()


def cmd_sweep(args) -> int:
    if args.users is None or args.users < 2:
        raise UsageError("L must be ≥ 2")
    outputs = [o.strip() for o in args.outputs.split(",") if o.strip()]
    if not outputs or any(o not in SWEEP_COLUMNS for o in outputs):
        raise UsageError(f"--outputs must be a non-empty subset of {','.join(SWEEP_COLUMNS)}")
    grid = sweep_grid(args.start, args.stop, args.step)
    text = sweep_csv(args.users, PowerMode(args.mode or "scaling"), grid, outputs)
    _write(text, args.out)
    if args.out and args.out != "-":
        print(f"wrote {len(grid)} rows to {args.out}", file=sys.stderr)
    return EXIT_OK


def render_regime(cfg: ChannelConfig) -> str:
    rep = regimes.classify(cfg)
    lines = [f"L={cfg.num_users} P={cfg.user_power:g} P0={cfg.relay_power:g} mode={cfg.power_mode.value}"]
    if rep.capacity_known:
        who = ", ".join(sorted(s.value for s in rep.achievers))
        lines.append(f"capacity known: {_fmt(rep.capacity_value)} bits; achiever(s): {who}")
        lines.append(f"certificate: {rep.certificate.value}")
    else:
        lines.append("capacity unknown")
    for g in rep.gap_bounds:
        lines.append(f"{g.strategy.value} gap ≤ {_fmt(g.bits)} bits ({g.source})")
    return "\n".join(lines) + "\n"


def cmd_regime(args) -> int:
    sys.stdout.write(render_regime(_config(args)))
    return EXIT_OK


def cmd_schedule(args) -> int:
    if args.users is None or args.users < 2:
        raise UsageError("L must be ≥ 2")
    _write(render_grid(build_schedule(args.users)), args.out)
    return EXIT_OK


def _windows(L: int, q: int, count: int | None, seed: int, exhaustive: bool):
    """Yield (seed, tuples) per window.

    Exhaustive mode builds q**L windows by cyclically shifting the ordered
    list of all message tuples, so every tuple occupies every slot m once.
    """
    if exhaustive:
        every = protocol.all_tuples(L, q)
        n = len(every)
        for k in range(n):
            rows = [every[(k + s) % n] for s in range(L)]
            yield None, [protocol.MessageTuple(q, tuple(int(x) for x in r)) for r in rows]
    else:
        for k in range(count):
            s = (seed + k) % 2**64
            yield s, protocol.random_window(L, q, s)


def cmd_simulate(args) -> int:
    L, q = args.users, args.q
    if L is None or L < 2:
        raise UsageError("L must be ≥ 2")
    if not protocol.is_prime(q):
        raise UsageError("q must be prime")
    if not args.exhaustive and args.count < 1:
        raise UsageError("--count must be ≥ 1")
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    total = ok = 0
    dump = [] if args.out else None
    for seed, tuples in _windows(L, q, args.count, args.seed, args.exhaustive):
        res = protocol.run_window(tuples, q, seed)
        total += 1
        ok += res.success
        if dump is not None:
            dump.append(protocol.format_transcripts(res.transcripts))
    if dump is not None:
        _write("".join(dump), args.out)
    print(f"{ok}/{total} windows OK ({100.0 * ok / total:.1f}%)")
    return EXIT_OK if ok == total else EXIT_FAIL


def cmd_conjecture(args) -> int:
    if args.L_max < 2:
        raise UsageError("--L-max must be ≥ 2")
    if args.points < 1 or not (0 < args.p_min <= args.p_max):
        raise UsageError("need --points ≥ 1 and 0 < --p-min ≤ --p-max")
    if args.points == 1:
        grid = np.array([args.p_min])
    else:
        grid = np.logspace(math.log10(args.p_min), math.log10(args.p_max), args.points)
    scan = regimes.conjecture_scan(range(2, args.L_max + 1), grid)
    print(f"scanned {scan.points} points (L=2..{args.L_max}, P0=L*P)")
    print(f"counterexamples to R_CF < max(R_CDF, R_FDF): {len(scan.counterexamples)}")
    for L, P in scan.counterexamples[:20]:
        print(f"  L={L} P={P!r}")
    L, P = scan.argmin
    print(f"minimum margin max(R_CDF,R_FDF) - R_CF = {scan.min_margin:.6e} at L={L} P={P:.6g}")
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def _channel_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--users", "-L", type=int, help="number of users L (>= 2)")
    p.add_argument("--snr-db", type=float, help="user power P in dB")
    p.add_argument("--power", type=float, help="user power P, linear")
    p.add_argument("--relay-power", type=float, help="relay power P0, linear (independent mode)")
    p.add_argument("--mode", choices=[m.value for m in PowerMode])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mwrc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rates", help="all bounds and strategy rates at one point")
    _channel_flags(p)
    p.add_argument("--out", help="also write a one-row CSV here")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("sweep", help="rates over an SNR grid, as CSV")
    p.add_argument("--users", "-L", type=int, required=True)
    p.add_argument("--mode", choices=["equal", "scaling"], default="scaling")
    p.add_argument("--start", type=float, default=-10.0, help="first SNR in dB")
    p.add_argument("--stop", type=float, default=20.0, help="last SNR in dB")
    p.add_argument("--step", type=float, default=0.5, help="SNR step in dB")
    p.add_argument("--outputs", default=",".join(SWEEP_COLUMNS))
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("regime", help="capacity regime and gap certificates")
    _channel_flags(p)
    p.set_defaults(func=cmd_regime)

    p = sub.add_parser("schedule", help="render the rotated transmission table")
    p.add_argument("--users", "-L", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("simulate", help="finite-field FDF protocol runs")
    p.add_argument("--users", "-L", type=int, required=True)
    p.add_argument("--q", type=int, default=2, help="prime field size")
    p.add_argument("--count", type=int, default=100, help="number of random windows")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exhaustive", action="store_true", help="cover every message tuple in every slot")
    p.add_argument("--out", help="transcript file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("conjecture", help="scan for CF beating both decode-forward schemes")
    p.add_argument("--L-max", type=int, default=10)
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--p-min", type=float, default=1e-3)
    p.add_argument("--p-max", type=float, default=1e6)
    p.set_defaults(func=cmd_conjecture)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"mwrc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"mwrc {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
