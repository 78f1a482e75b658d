"""Monte-Carlo sweeps, aggregation, persistence, and the `cranrates` CLI.

A sweep fixes (L, K, seed) and walks one axis (per-relay backhaul C, or
SNR in dB), evaluating the requested schemes on the same channel
realizations at every axis point (paired trials). Raw per-trial records
and per-point aggregates are written as CSV (or JSON for the raw records)
plus a JSON metadata sidecar. Trials are independent work units; records
are emitted in a fixed (axis value, scheme, trial) order so output is
identical for any worker count.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from multiprocessing import Pool

import numpy as np

from . import __version__
from .baselines import cof_from_tables, cof_multi_equation, cof_tables_from_chains, swz_sum_rate
from .channel import RNG_ID, SEARCH_METHODS, SystemConfig, cutset_sum_rate, sample_channel
from .jqcof import _jqcof_product_search, jqcof_evaluate, jqcof_optimize
from .lattice import (
    DEFAULT_CAP,
    BoundTooLarge,
    best_equation_lll,
    enumerate_equations,
    successive_equations,
)
from .qcof import _product_search, _rco_many, qcof_evaluate, qcof_optimize

__all__ = [
    "AggregateRecord",
    "DimensionMismatch",
    "MalformedChannelFile",
    "SWEEP_AXES",
    "SWEEP_SCHEMES",
    "SweepSpec",
    "TrialRecord",
    "aggregate_records",
    "eval_single",
    "load_channel",
    "main",
    "run_sweep",
    "write_aggregates_csv",
    "write_records_csv",
    "write_records_json",
]

SWEEP_AXES = ("backhaul", "snr_db")
SWEEP_SCHEMES = ("qcof", "jqcof", "cof", "swz", "cutset")
_RECORD_COLUMNS = ("scheme", "search", "L", "K", "snr_db", "C", "trial", "sum_rate")
_AGGREGATE_COLUMNS = (
    "scheme",
    "search",
    "L",
    "K",
    "snr_db",
    "C",
    "mean_sum_rate",
    "stderr",
    "trials",
)
_CUTSET_SLACK = 1e-9


class MalformedChannelFile(ValueError):
    """Channel file is unreadable or not of the documented JSON shape."""


class DimensionMismatch(ValueError):
    """Channel dimensions disagree with each other or with the request."""


@dataclass(frozen=True)
class SweepSpec:
    """One Monte-Carlo sweep: base config, axis, points, and schemes.

    For axis "backhaul" every axis value is a capacity applied to all
    relays and cfg.snr is held fixed; snr_db is only the reported dB
    figure (derived from cfg.snr when omitted). For axis "snr_db" the
    values are dB points and cfg.backhaul (which must be uniform) is held
    fixed.
    """

    cfg: SystemConfig
    axis: str
    values: tuple[float, ...]
    schemes: tuple[str, ...] = SWEEP_SCHEMES
    snr_db: float | None = None
    workers: int = 1
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"axis must be one of {SWEEP_AXES}, got {self.axis!r}")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValueError("values must be nonempty")
        if any(not math.isfinite(v) for v in values):
            raise ValueError(f"values must be finite, got {values}")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError(f"values must be strictly increasing, got {values}")
        if self.axis == "backhaul" and values[0] < 0.0:
            raise ValueError(f"backhaul values must be nonnegative, got {values[0]}")
        unknown = [s for s in self.schemes if s not in SWEEP_SCHEMES]
        if unknown:
            raise ValueError(f"unknown schemes {unknown}; valid: {SWEEP_SCHEMES}")
        if not self.schemes:
            raise ValueError("schemes must be nonempty")
        ordered = tuple(s for s in SWEEP_SCHEMES if s in self.schemes)
        if self.axis == "snr_db" and len(set(self.cfg.backhaul)) != 1:
            raise ValueError("snr_db sweeps need a uniform per-relay backhaul")
        if self.snr_db is not None and not math.isfinite(self.snr_db):
            raise ValueError(f"snr_db must be finite, got {self.snr_db}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.cap < 1:
            raise ValueError(f"cap must be >= 1, got {self.cap}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "schemes", ordered)

    @property
    def report_snr_db(self) -> float:
        if self.snr_db is not None:
            return float(self.snr_db)
        return 10.0 * math.log10(self.cfg.snr)


@dataclass(frozen=True)
class TrialRecord:
    """One (scheme, axis point, trial) sum-rate observation."""

    scheme: str
    search: str
    users: int
    relays: int
    snr_db: float
    backhaul: float
    trial: int
    sum_rate: float

    def __post_init__(self):
        object.__setattr__(self, "sum_rate", float(self.sum_rate))
        if not (math.isfinite(self.sum_rate) and self.sum_rate >= 0.0):
            raise ValueError(f"sum_rate must be finite and nonnegative, got {self.sum_rate}")


@dataclass(frozen=True)
class AggregateRecord:
    """Mean and standard error over trials for one (axis point, scheme)."""

    scheme: str
    search: str
    users: int
    relays: int
    snr_db: float
    backhaul: float
    mean_sum_rate: float
    stderr: float
    trials: int


def _axis_point(spec: SweepSpec, value: float) -> tuple[float, tuple[float, ...], float, float]:
    """(snr, backhaul, snr_db column, C column) at one axis value."""
    cfg = spec.cfg
    if spec.axis == "backhaul":
        return cfg.snr, (value,) * cfg.relays, spec.report_snr_db, value
    return 10.0 ** (value / 10.0), cfg.backhaul, value, cfg.backhaul[0]


class _TrialEvaluator:
    """Per-trial scheme evaluation with tables cached per SNR value.

    Candidate enumerations, LLL reductions, and CoF allocation tables
    depend only on (H, snr), so a backhaul sweep builds them once per
    trial and reuses them at every axis point.
    """

    def __init__(self, h: np.ndarray, cfg: SystemConfig, cap: int, trial: int):
        self.h = h
        self.cfg = cfg
        self.cap = cap
        self.trial = trial
        self._cache: dict[tuple[str, float], object] = {}

    def _per_relay(self, kind: str, snr: float, build):
        key = (kind, snr)
        if key not in self._cache:
            out = []
            for k in range(self.cfg.relays):
                try:
                    out.append(build(self.h[k], k))
                except BoundTooLarge as exc:
                    raise BoundTooLarge(
                        f"trial {self.trial}, relay {k}: {exc}"
                    ) from exc
            self._cache[key] = out
        return self._cache[key]

    def _enum(self, snr: float) -> list[np.ndarray]:
        return self._per_relay("enum", snr, lambda hk, _k: enumerate_equations(hk, snr, self.cap))

    def _rcos(self, snr: float) -> list[np.ndarray]:
        key = ("rcos", snr)
        if key not in self._cache:
            cands = self._enum(snr)
            self._cache[key] = [
                _rco_many(self.h[k], cands[k], snr) for k in range(self.cfg.relays)
            ]
        return self._cache[key]

    def _lll_rows(self, snr: float) -> np.ndarray:
        rows = self._per_relay(
            "lll", snr, lambda hk, _k: best_equation_lll(hk, snr, self.cfg.lll_delta)
        )
        return np.stack(rows)

    def _cof_tables(self, snr: float):
        key = ("cof", snr)
        if key not in self._cache:
            chains = self._per_relay(
                "chains",
                snr,
                lambda hk, _k: successive_equations(hk, snr, self.cfg.users, self.cap),
            )
            self._cache[key] = cof_tables_from_chains(self.h, snr, chains)
        return self._cache[key]

    def rate(self, scheme: str, snr: float, backhaul: tuple[float, ...]) -> float:
        h, cfg = self.h, self.cfg
        if scheme == "swz":
            return swz_sum_rate(h, snr, backhaul)
        if scheme == "cof":
            return cof_from_tables(self._cof_tables(snr), backhaul)
        if scheme == "qcof":
            if cfg.search == "lll":
                a = self._lll_rows(snr)
            else:
                a = _product_search(h, snr, backhaul, self._enum(snr), self._rcos(snr))
            return qcof_evaluate(h, a, snr, backhaul).sum_rate
        if scheme == "jqcof":
            if cfg.search == "lll":
                best = jqcof_evaluate(h, self._lll_rows(snr), snr, backhaul, cfg.epsilon)
                zero = np.zeros((cfg.relays, cfg.users), dtype=np.int64)
                fallback = jqcof_evaluate(h, zero, snr, backhaul, cfg.epsilon)
                return max(best.sum_rate, fallback.sum_rate)
            cands = [
                np.vstack([np.zeros((1, cfg.users), dtype=np.int64), c])
                for c in self._enum(snr)
            ]
            rcos = [np.concatenate([[np.inf], r]) for r in self._rcos(snr)]
            a = _jqcof_product_search(h, snr, backhaul, cfg.epsilon, cands, rcos)
            return jqcof_evaluate(h, a, snr, backhaul, cfg.epsilon).sum_rate
        raise ValueError(f"unknown scheme {scheme!r}")


def _run_trial(spec: SweepSpec, trial: int) -> list[tuple[int, str, float]]:
    """All (axis index, scheme, sum_rate) results for one channel draw."""
    h = sample_channel(spec.cfg, trial)
    evaluator = _TrialEvaluator(h, spec.cfg, spec.cap, trial)
    out = []
    for vi, value in enumerate(spec.values):
        snr, backhaul, _, _ = _axis_point(spec, value)
        cut = cutset_sum_rate(h, snr, backhaul)
        for scheme in spec.schemes:
            rate = cut if scheme == "cutset" else evaluator.rate(scheme, snr, backhaul)
            if rate > cut + _CUTSET_SLACK:
                raise RuntimeError(
                    f"{scheme} exceeded the cut-set bound at trial {trial}, "
                    f"axis value {value}: {rate} > {cut}"
                )
            out.append((vi, scheme, rate))
    return out


def _trial_worker(payload: tuple[SweepSpec, int]):
    spec, trial = payload
    return _run_trial(spec, trial)


def run_sweep(spec: SweepSpec) -> tuple[list[TrialRecord], list[AggregateRecord]]:
    """Evaluate the sweep and return (records, aggregates).

    Every trial index draws one channel, reused across all axis values and
    schemes. Each scheme's sum-rate is checked against the cut-set bound
    on the fly. Output order is (axis value, scheme, trial) irrespective
    of the worker count.
    """
    trials = spec.cfg.trials
    if spec.workers > 1:
        with Pool(spec.workers) as pool:
            per_trial = pool.map(_trial_worker, [(spec, t) for t in range(trials)])
    else:
        per_trial = [_run_trial(spec, t) for t in range(trials)]
    table = {}
    for trial, results in enumerate(per_trial):
        for vi, scheme, rate in results:
            table[(vi, scheme, trial)] = rate
    records = []
    for vi, value in enumerate(spec.values):
        _, _, snr_db, c_col = _axis_point(spec, value)
        for scheme in spec.schemes:
            for trial in range(trials):
                records.append(
                    TrialRecord(
                        scheme=scheme,
                        search=spec.cfg.search,
                        users=spec.cfg.users,
                        relays=spec.cfg.relays,
                        snr_db=snr_db,
                        backhaul=c_col,
                        trial=trial,
                        sum_rate=table[(vi, scheme, trial)],
                    )
                )
    return records, aggregate_records(records)


def aggregate_records(records: list[TrialRecord]) -> list[AggregateRecord]:
    """Mean and standard error per (scheme, axis point), in record order."""
    groups: dict[tuple, list[float]] = {}
    for rec in records:
        key = (rec.scheme, rec.search, rec.users, rec.relays, rec.snr_db, rec.backhaul)
        groups.setdefault(key, []).append(rec.sum_rate)
    out = []
    for key, vals in groups.items():
        n = len(vals)
        arr = np.asarray(vals)
        stderr = float(arr.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        out.append(
            AggregateRecord(
                scheme=key[0],
                search=key[1],
                users=key[2],
                relays=key[3],
                snr_db=key[4],
                backhaul=key[5],
                mean_sum_rate=float(arr.mean()),
                stderr=stderr,
                trials=n,
            )
        )
    return out


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _record_row(rec: TrialRecord) -> list:
    return [rec.scheme, rec.search, rec.users, rec.relays, rec.snr_db, rec.backhaul,
            rec.trial, rec.sum_rate]


def write_records_csv(records: list[TrialRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_RECORD_COLUMNS)
        for rec in records:
            writer.writerow([_cell(v) for v in _record_row(rec)])


def write_records_json(records: list[TrialRecord], path) -> None:
    rows = [dict(zip(_RECORD_COLUMNS, _record_row(rec))) for rec in records]
    with open(path, "w") as fh:
        json.dump(rows, fh, indent=2)
        fh.write("\n")


def write_aggregates_csv(aggregates: list[AggregateRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_AGGREGATE_COLUMNS)
        for agg in aggregates:
            row = [agg.scheme, agg.search, agg.users, agg.relays, agg.snr_db,
                   agg.backhaul, agg.mean_sum_rate, agg.stderr, agg.trials]
            writer.writerow([_cell(v) for v in row])


def _sidecar(path: str, suffix: str) -> str:
    base, _ = os.path.splitext(path)
    return base + suffix


def write_metadata(spec: SweepSpec, path) -> None:
    meta = {
        "seed": spec.cfg.seed,
        "rng": RNG_ID,
        "epsilon": spec.cfg.epsilon,
        "allocation": "prop1",
        "version": __version__,
        "numpy": np.__version__,
        "axis": spec.axis,
        "values": list(spec.values),
        "schemes": list(spec.schemes),
        "search": spec.cfg.search,
        "users": spec.cfg.users,
        "relays": spec.cfg.relays,
        "trials": spec.cfg.trials,
        "workers": spec.workers,
        "channel_reuse": "same channel per trial index across axis values and schemes",
    }
    if spec.axis == "backhaul":
        meta["snr_db"] = spec.report_snr_db
    else:
        meta["backhaul"] = spec.cfg.backhaul[0]
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_channel(path) -> np.ndarray:
    """K×L channel matrix from a JSON file {"L": int, "K": int, "H": rows}."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise MalformedChannelFile(f"cannot read channel file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedChannelFile(f"channel file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or not {"L", "K", "H"} <= set(data):
        raise MalformedChannelFile(f"channel file {path} must be an object with L, K, H")
    users, relays, rows = data["L"], data["K"], data["H"]
    if not (isinstance(users, int) and isinstance(relays, int)) or users < 1 or relays < 1:
        raise MalformedChannelFile(f"channel file {path}: L and K must be positive integers")
    if not isinstance(rows, list) or any(not isinstance(row, list) for row in rows):
        raise MalformedChannelFile(f"channel file {path}: H must be a list of rows")
    for row in rows:
        for x in row:
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise MalformedChannelFile(f"channel file {path}: H entries must be numbers")
    if len(rows) != relays or any(len(row) != users for row in rows):
        raise DimensionMismatch(
            f"channel file {path}: H is {len(rows)}x"
            f"{len(rows[0]) if rows else 0}, declared {relays}x{users}"
        )
    h = np.asarray(rows, dtype=float)
    if not np.all(np.isfinite(h)):
        raise MalformedChannelFile(f"channel file {path}: H entries must be finite")
    return h


def _sanitize(obj):
    """JSON-ready copy with non-finite floats as null."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _sanitize(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def eval_single(channel_path, cfg: SystemConfig, schemes) -> dict:
    """Per-scheme diagnostic report for one explicit channel matrix."""
    h = load_channel(channel_path)
    if h.shape != (cfg.relays, cfg.users):
        raise DimensionMismatch(
            f"channel file is {h.shape[0]} relays x {h.shape[1]} users, "
            f"requested {cfg.relays} x {cfg.users}"
        )
    unknown = [s for s in schemes if s not in SWEEP_SCHEMES]
    if unknown:
        raise ValueError(f"unknown schemes {unknown}; valid: {SWEEP_SCHEMES}")
    report = {
        "users": cfg.users,
        "relays": cfg.relays,
        "snr": cfg.snr,
        "snr_db": 10.0 * math.log10(cfg.snr),
        "backhaul": list(cfg.backhaul),
        "search": cfg.search,
        "epsilon": cfg.epsilon,
        "H": h,
        "schemes": {},
    }
    for scheme in (s for s in SWEEP_SCHEMES if s in schemes):
        if scheme == "cutset":
            entry = {"sum_rate": cutset_sum_rate(h, cfg.snr, cfg.backhaul)}
        elif scheme == "swz":
            entry = {"sum_rate": swz_sum_rate(h, cfg.snr, cfg.backhaul)}
        elif scheme == "cof":
            entry = {"sum_rate": cof_multi_equation(h, cfg.snr, cfg.backhaul)}
        elif scheme == "qcof":
            ev = qcof_optimize(h, cfg.snr, cfg.backhaul, method=cfg.search, delta=cfg.lll_delta)
            entry = {
                "sum_rate": ev.sum_rate,
                "A": ev.a,
                "r": ev.r,
                "sigma": ev.sigma,
                "nu": ev.nu,
                "g_diag": ev.g_diag,
                "rco": ev.rco,
            }
        else:
            ev = jqcof_optimize(
                h, cfg.snr, cfg.backhaul, cfg.epsilon, method=cfg.search, delta=cfg.lll_delta
            )
            entry = {
                "sum_rate": ev.sum_rate,
                "A": ev.a,
                "r": ev.r,
                "lambda": ev.lam,
                "eta": ev.eta,
                "U": ev.u,
                "split": ev.split,
                "g_diag": ev.g_diag,
                "mu": ev.mu,
                "rco": ev.rco,
            }
        report["schemes"][scheme] = entry
    return _sanitize(report)


def _parse_values(text: str) -> tuple[float, ...]:
    """Axis points from "0,0.5,1" or an inclusive "start:stop:step"."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range syntax is start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0.0:
            raise ValueError(f"range step must be positive, got {step}")
        if stop < start:
            raise ValueError(f"range stop must be >= start, got {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + i * step for i in range(count))
    values = tuple(float(p) for p in text.split(",") if p.strip())
    if not values:
        raise ValueError("values list is empty")
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cranrates",
        description="Achievable sum-rates for uplink C-RAN with finite backhaul.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    sweep = sub.add_parser("sweep", help="Monte-Carlo sweep over backhaul or SNR")
    sweep.add_argument("--axis", required=True, choices=("backhaul", "snr-db"))
    sweep.add_argument("--values", required=True,
                       help='axis points: "0,0.5,1" or inclusive "0:6:0.5"')
    sweep.add_argument("--users", required=True, type=int, metavar="L")
    sweep.add_argument("--relays", required=True, type=int, metavar="K")
    sweep.add_argument("--snr-db", type=float, help="fixed SNR for backhaul sweeps")
    sweep.add_argument("--backhaul", type=float,
                       help="fixed per-relay capacity for snr-db sweeps")
    sweep.add_argument("--trials", type=int, default=2000)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--schemes", default=",".join(SWEEP_SCHEMES),
                       help="comma list from qcof,jqcof,cof,swz,cutset")
    sweep.add_argument("--search", default="exhaustive", choices=SEARCH_METHODS)
    sweep.add_argument("--epsilon", type=float, default=1e-6)
    sweep.add_argument("--lll-delta", type=float, default=0.75)
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--format", default="csv", choices=("csv", "json"))
    sweep.add_argument("--workers", type=int, default=1)
    sweep.add_argument("--cap", type=int, default=DEFAULT_CAP,
                       help="enumeration size guard per relay")

    ev = sub.add_parser("eval", help="evaluate one explicit channel matrix")
    ev.add_argument("--channel", required=True, help="JSON file {L, K, H}")
    ev.add_argument("--snr-db", required=True, type=float)
    ev.add_argument("--backhaul", required=True, help="comma list C1,...,CK")
    ev.add_argument("--schemes", default=",".join(SWEEP_SCHEMES))
    ev.add_argument("--search", default="exhaustive", choices=SEARCH_METHODS)
    ev.add_argument("--epsilon", type=float, default=1e-6)
    ev.add_argument("--lll-delta", type=float, default=0.75)
    ev.add_argument("--users", type=int, help="expected L, checked against the file")
    ev.add_argument("--relays", type=int, help="expected K, checked against the file")
    ev.add_argument("--out", help="report path (stdout when omitted)")
    return parser


def _cmd_sweep(args) -> int:
    values = _parse_values(args.values)
    axis = args.axis.replace("-", "_")
    schemes = tuple(s for s in args.schemes.split(",") if s)
    if axis == "backhaul":
        if args.snr_db is None:
            raise ValueError("backhaul sweeps need --snr-db")
        if args.backhaul is not None:
            raise ValueError("--backhaul does not apply to a backhaul sweep")
        snr = 10.0 ** (args.snr_db / 10.0)
        base_backhaul = (0.0,) * args.relays
        snr_db = float(args.snr_db)
    else:
        if args.backhaul is None:
            raise ValueError("snr-db sweeps need --backhaul")
        if args.snr_db is not None:
            raise ValueError("--snr-db does not apply to an snr-db sweep")
        snr = 1.0
        base_backhaul = (float(args.backhaul),) * args.relays
        snr_db = None
    cfg = SystemConfig(
        users=args.users,
        relays=args.relays,
        snr=snr,
        backhaul=base_backhaul,
        epsilon=args.epsilon,
        lll_delta=args.lll_delta,
        search=args.search,
        seed=args.seed,
        trials=args.trials,
    )
    spec = SweepSpec(
        cfg=cfg,
        axis=axis,
        values=values,
        schemes=schemes,
        snr_db=snr_db,
        workers=args.workers,
        cap=args.cap,
    )
    records, aggregates = run_sweep(spec)
    if args.format == "json":
        write_records_json(records, args.out)
    else:
        write_records_csv(records, args.out)
    write_aggregates_csv(aggregates, _sidecar(args.out, ".agg.csv"))
    write_metadata(spec, _sidecar(args.out, ".meta.json"))
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    backhaul = tuple(float(p) for p in args.backhaul.split(",") if p)
    schemes = tuple(s for s in args.schemes.split(",") if s)
    h = load_channel(args.channel)
    relays, users = h.shape
    if args.users is not None and args.users != users:
        raise DimensionMismatch(f"channel file has L={users}, requested --users {args.users}")
    if args.relays is not None and args.relays != relays:
        raise DimensionMismatch(f"channel file has K={relays}, requested --relays {args.relays}")
    if len(backhaul) != relays:
        raise DimensionMismatch(
            f"--backhaul lists {len(backhaul)} capacities for {relays} relays"
        )
    cfg = SystemConfig(
        users=users,
        relays=relays,
        snr=10.0 ** (args.snr_db / 10.0),
        backhaul=backhaul,
        epsilon=args.epsilon,
        lll_delta=args.lll_delta,
        search=args.search,
    )
    report = eval_single(args.channel, cfg, schemes)
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.cmd == "sweep":
            return _cmd_sweep(args)
        return _cmd_eval(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
