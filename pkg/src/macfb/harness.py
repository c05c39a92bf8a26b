"""Experiment orchestration behind the command-line front end.

Each ``cmd_*`` function takes a plain JSON-style config dict and returns a
``ResultBundle``. Bundles hold named CSV tables plus aggregates and a provenance
block; everything except ``provenance["timestamp"]`` is a pure function of the
config, so repeated runs give byte-identical CSV files.

CSV tables written by ``ResultBundle.write`` (columns in this order):

* simulate  ``records``:     point, trial, block, E1, E2, E3, msg_error, state1_frac
            ``summary``:     point, codebook_kind, k, n, L, delta, metric, mean, stderr, count
* sumcode   ``records``:     kind, draw, k, n, log2_card_A, log2_card_B, log2_card_sum, gap
            ``summary``:     kind, k, n, metric, mean, stderr, count, min, max
* region    ``constraints``: point, draw, label, a1, a2, a3, bound, alt_bound, abs_diff
            ``terms``:       point, draw, term, value, alt_value, abs_diff
            ``diagonal``:    point, draw, r, R1, R2, R3, min_slack, tightest
            ``summary``:     point, draw, metric, value
* dinfo     ``records``:     point, quantity, value, normalized
            ``summary``:     point, metric, value
* channel-entropy ``records``: delta, q, state_rule, closed_form, numeric, abs_diff
                  ``summary``: metric, value

Floats are written with ``repr`` so they parse back to the identical double;
missing values (e.g. a standard error from a single trial) are empty cells.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from itertools import product
from pathlib import Path

import numpy as np

from . import __version__
from .channel import (ExampleChannel, TableChannel, mixture_entropy_closed_form,
                      mixture_conditional_entropy)
from .errors import ValidationError
from .gf2 import Codebook, LinearCodeSpec, enumerate_codebook, sum_codebook_stats
from .info import CausalPolicy, mutual_info, tag, trajectory_model
from .region import (SUBSETS, InputDistribution, SourceConfig, cl_reduction_region, cl_reduction_terms,
                     example_tracking_policies, iid_policies, mac_region, multiletter_region,
                     quasi_linear_region, quasi_linear_terms)
from .scheme import SchemeConfig, empirical_state_fraction, run_trial
from .seeding import MASK64, trial_rng

SUMMARY_METRICS = ("E1_rate", "E2_rate", "E3_rate", "msg_error_rate", "state1_frac")


# --- tables and bundles ----------------------------------------------------

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def emit_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def _parse_cell(text: str):
    if text == "":
        return None
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def parse_csv(text: str) -> tuple:
    """Inverse of ``emit_csv``: ``(columns, rows)`` with ints, floats and None restored."""
    reader = csv.reader(io.StringIO(text))
    columns = next(reader)
    rows = [dict(zip(columns, map(_parse_cell, line))) for line in reader]
    return columns, rows


@dataclass
class Table:
    columns: tuple
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        return emit_csv(self.columns, self.rows)


@dataclass
class ResultBundle:
    """Named tables, aggregates and provenance of one command run."""

    command: str
    tables: dict
    aggregates: dict
    provenance: dict

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "provenance": self.provenance,
            "aggregates": self.aggregates,
            "tables": {name: {"columns": list(t.columns), "rows": t.rows}
                       for name, t in self.tables.items()},
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=2, sort_keys=True)

    def write(self, out_dir) -> list:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for name, table in self.tables.items():
            path = out / f"{name}.csv"
            path.write_text(table.to_csv())
            written.append(path)
        path = out / "bundle.json"
        path.write_text(self.to_json() + "\n")
        written.append(path)
        return written


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def _provenance(command: str, cfg: dict) -> dict:
    return {
        "command": command,
        "config": _jsonable(cfg),
        "seed": cfg.get("seed"),
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def mean_stderr(values) -> tuple:
    """Sample mean and standard error; the error is None below two samples."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValidationError("no samples to aggregate")
    mean = float(np.sort(v).sum() / v.size)  # sorted sum: independent of arrival order
    if v.size < 2:
        return mean, None
    return mean, float(np.std(v, ddof=1) / math.sqrt(v.size))


# --- config helpers --------------------------------------------------------

def _check_keys(cfg: dict, allowed, where: str) -> None:
    if not isinstance(cfg, dict):
        raise ValidationError(f"{where} must be a JSON object")
    extra = set(cfg) - set(allowed)
    if extra:
        raise ValidationError(f"unknown {where} fields: {sorted(extra)}")


def _seed(cfg: dict) -> int:
    seed = cfg.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed <= MASK64:
        raise ValidationError("seed must be an unsigned 64-bit integer")
    return seed


def _count(cfg: dict, key: str, default: int) -> int:
    value = cfg.get(key, default)
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ValidationError(f"{key} must be an integer >= 1")
    return value


def _threads(cfg: dict) -> int:
    return _count(cfg, "threads", 1)


def _grid_points(grid: dict | None, allowed, points=None) -> list:
    """Override dicts: the explicit ``points`` list, else the Cartesian product of the grid
    axes (sorted axis order), else a single empty override."""
    if grid and points:
        raise ValidationError("give either grid or points, not both")
    if points is not None:
        if not isinstance(points, list) or not points:
            raise ValidationError("points must be a nonempty list")
        for pt in points:
            _check_keys(pt, allowed, "point")
        return [dict(pt) for pt in points]
    if not grid:
        return [{}]
    _check_keys(grid, allowed, "grid")
    axes = sorted(grid)
    for a in axes:
        if not isinstance(grid[a], list) or not grid[a]:
            raise ValidationError(f"grid axis {a!r} must be a nonempty list")
    return [dict(zip(axes, combo)) for combo in product(*(grid[a] for a in axes))]


def load_channel(doc) -> TableChannel:
    """``{"kind": "example", "delta": .., "state_rule": ..}`` or
    ``{"kind": "table", "path": ..}`` or an inline table document."""
    if doc is None:
        doc = {"kind": "example", "delta": 0.1}
    if not isinstance(doc, dict):
        raise ValidationError("channel must be a JSON object")
    kind = doc.get("kind", "table")
    if kind == "example":
        _check_keys(doc, ("kind", "delta", "state_rule"), "channel")
        return ExampleChannel(float(doc.get("delta", 0.1)), doc.get("state_rule", "x32")).table()
    if kind == "table":
        if "path" in doc:
            _check_keys(doc, ("kind", "path"), "channel")
            return TableChannel.load(doc["path"])
        return TableChannel.from_dict(doc)
    raise ValidationError(f"unknown channel kind {kind!r}")


def _with_delta(channel_doc, delta):
    if delta is None:
        return channel_doc
    doc = dict(channel_doc or {"kind": "example"})
    if doc.get("kind", "table") != "example":
        raise ValidationError("a delta grid needs the example channel")
    doc["delta"] = delta
    return doc


# --- simulate --------------------------------------------------------------

SIMULATE_KEYS = ("scheme", "grid", "points", "trials", "seed", "threads", "state_threshold")
SCHEME_KEYS = ("k", "n", "L", "delta", "codebook_kind", "generator", "state_rule")


def _trial_rows(point: int, rep) -> list:
    frac = rep.state1_frac
    return [{"point": point, "trial": rep.trial_index, "block": l + 1,
             "E1": int(rep.e1[l]), "E2": int(rep.e2[l]), "E3": int(rep.e3[l]),
             "msg_error": int(rep.msg_error[l]), "state1_frac": float(frac[l])}
            for l in range(rep.config.L)]


def aggregate_simulation(rows) -> dict:
    """Per-point metric -> (mean, stderr, count) recomputed from raw records.

    Each trial contributes the mean of its block flags; trials are then averaged.
    """
    by_trial: dict = {}
    for r in rows:
        by_trial.setdefault((r["point"], r["trial"]), []).append(r)
    per_point: dict = {}
    for (point, trial), rs in sorted(by_trial.items()):
        vals = per_point.setdefault(point, {m: [] for m in SUMMARY_METRICS})
        vals["E1_rate"].append(np.mean([r["E1"] for r in rs]))
        vals["E2_rate"].append(np.mean([r["E2"] for r in rs]))
        vals["E3_rate"].append(np.mean([r["E3"] for r in rs]))
        vals["msg_error_rate"].append(np.mean([r["msg_error"] for r in rs]))
        vals["state1_frac"].append(np.mean([r["state1_frac"] for r in rs]))
    return {p: {m: (*mean_stderr(v), len(v)) for m, v in vals.items()}
            for p, vals in per_point.items()}


def cmd_simulate(cfg: dict) -> ResultBundle:
    """Monte Carlo trials of the block-Markov scheme, optionally over a k/n/delta grid."""
    _check_keys(cfg, SIMULATE_KEYS, "simulate config")
    seed, trials, threads = _seed(cfg), _count(cfg, "trials", 1), _threads(cfg)
    base = dict(cfg.get("scheme") or {})
    _check_keys(base, SCHEME_KEYS, "scheme")
    threshold = float(cfg.get("state_threshold", 0.25))
    points = [SchemeConfig.from_dict({**base, **over, "master_seed": seed})
              for over in _grid_points(cfg.get("grid"), ("k", "n", "delta", "codebook_kind"),
                                     cfg.get("points"))]

    records, summary, aggregates = [], [], {"points": []}
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for p, sc in enumerate(points):
            reports = list(pool.map(lambda t, sc=sc: run_trial(sc, t), range(trials)))
            reports.sort(key=lambda r: r.trial_index)
            for rep in reports:
                records.extend(_trial_rows(p, rep))
            stats = aggregate_simulation([r for r in records if r["point"] == p])[p]
            point_doc = {"index": p, "scheme": sc.to_dict(), "metrics": {}}
            for metric in SUMMARY_METRICS:
                mean, se, count = stats[metric]
                point_doc["metrics"][metric] = {"mean": mean, "stderr": se, "count": count}
                summary.append({"point": p, "codebook_kind": sc.codebook_kind, "k": sc.k,
                                "n": sc.n, "L": sc.L, "delta": sc.delta, "metric": metric,
                                "mean": mean, "stderr": se, "count": count})
            frac = empirical_state_fraction(reports, threshold)
            point_doc["metrics"]["state2_position_fraction"] = {
                "value": frac, "threshold": threshold}
            summary.append({"point": p, "codebook_kind": sc.codebook_kind, "k": sc.k, "n": sc.n,
                            "L": sc.L, "delta": sc.delta, "metric": "state2_position_fraction",
                            "mean": frac, "stderr": None, "count": trials})
            aggregates["points"].append(point_doc)

    tables = {
        "records": Table(("point", "trial", "block", "E1", "E2", "E3", "msg_error",
                          "state1_frac"), records),
        "summary": Table(("point", "codebook_kind", "k", "n", "L", "delta", "metric", "mean",
                          "stderr", "count"), summary),
    }
    return ResultBundle("simulate", tables, aggregates, _provenance("simulate", cfg))


# --- sumcode ---------------------------------------------------------------

SUMCODE_KEYS = ("kinds", "k", "n", "draws", "seed", "threads")


def _sum_draw(kind: str, k: int, n: int, seed: int, draw: int) -> dict:
    rng = trial_rng(seed, draw)
    if kind == "linear_identical":
        a = b = enumerate_codebook(LinearCodeSpec.random(k, n, rng))
    elif kind == "random_independent":
        a, b = Codebook.random(k, n, rng), Codebook.random(k, n, rng)
    else:
        raise ValidationError(f"unknown codebook kind {kind!r}")
    stats = sum_codebook_stats(a, b)
    return {"kind": kind, "draw": draw, "k": k, "n": n, **stats,
            "gap": stats["log2_card_sum"] - stats["log2_card_A"]}


def cmd_sumcode(cfg: dict) -> ResultBundle:
    """Sum-set size of two codebooks per kind over seeded draws."""
    _check_keys(cfg, SUMCODE_KEYS, "sumcode config")
    seed, draws, threads = _seed(cfg), _count(cfg, "draws", 100), _threads(cfg)
    k, n = int(cfg.get("k", 8)), int(cfg.get("n", 32))
    if not 1 <= k <= n:
        raise ValidationError(f"need 1 <= k <= n, got k={k}, n={n}")
    kinds = cfg.get("kinds", ["linear_identical", "random_independent"])
    if not isinstance(kinds, list) or not kinds:
        raise ValidationError("kinds must be a nonempty list")

    records, summary, aggregates = [], [], {}
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for kind in kinds:
            rows = list(pool.map(lambda d, kind=kind: _sum_draw(kind, k, n, seed, d), range(draws)))
            records.extend(rows)
            gaps = [r["gap"] for r in rows]
            mean, se = mean_stderr(gaps)
            agg = {"mean": mean, "stderr": se, "count": len(gaps),
                   "min": float(min(gaps)), "max": float(max(gaps))}
            aggregates[kind] = {"gap": agg}
            summary.append({"kind": kind, "k": k, "n": n, "metric": "gap", **agg})
    tables = {
        "records": Table(("kind", "draw", "k", "n", "log2_card_A", "log2_card_B",
                          "log2_card_sum", "gap"), records),
        "summary": Table(("kind", "k", "n", "metric", "mean", "stderr", "count", "min", "max"),
                         summary),
    }
    return ResultBundle("sumcode", tables, aggregates, _provenance("sumcode", cfg))


# --- region ----------------------------------------------------------------

REGION_KEYS = ("mode", "channel", "grid", "distribution", "random", "independent_v", "biases",
               "diagonal_points", "policies", "input_pmfs", "L", "seed", "draws", "threads")
REGION_MODES = ("quasi_linear", "cl", "multiletter", "mac")


def load_policies(spec, channel: TableChannel, L: int) -> tuple:
    """``"iid_uniform"``, ``"example_tracking"`` or a list of three policy documents."""
    if spec in (None, "iid_uniform"):
        return iid_policies(channel, [np.full(m, 1.0 / m) for m in channel.input_sizes], L)
    if spec == "example_tracking":
        if channel.input_sizes != (4, 4, 4) or channel.output_size != 8:
            raise ValidationError("example_tracking policies need the example channel alphabets")
        return example_tracking_policies(L)
    if isinstance(spec, list) and len(spec) == 3:
        return tuple(CausalPolicy.from_dict(d) for d in spec)
    raise ValidationError("policies must be 'iid_uniform', 'example_tracking' or three documents")


def _distributions(cfg: dict, channel: TableChannel, seed: int) -> list:
    if "distribution" in cfg:
        doc = cfg["distribution"]
        if isinstance(doc, str):
            doc = json.loads(Path(doc).read_text())
        return [InputDistribution.from_dict(doc, channel)]
    rnd = dict(cfg.get("random") or {})
    _check_keys(rnd, ("u_size", "v_law"), "random")
    draws = _count(cfg, "draws", 1)
    return [InputDistribution.random(channel, trial_rng(seed, d), int(rnd.get("u_size", 2)),
                           rnd.get("v_law", "even")) for d in range(draws)]


def _region_point(cfg: dict, channel: TableChannel, seed: int, pool) -> list:
    """(polytope, alt polytope or None, terms, alt terms or None) per draw."""
    mode = cfg.get("mode", "quasi_linear")
    if mode in ("multiletter", "mac"):
        if mode == "multiletter":
            L = _count(cfg, "L", 1)
            poly = multiletter_region(channel, load_policies(cfg.get("policies"), channel, L), L)
        else:
            pmfs = cfg.get("input_pmfs") or [np.full(m, 1.0 / m).tolist()
                                              for m in channel.input_sizes]
            poly = mac_region(channel, pmfs)
        return [(poly, None, {c.label: next(iter(c.terms.values())) for c in poly.constraints},
                 None)]

    src = SourceConfig(tuple(cfg.get("biases", (0.5, 0.5, 0.5))))
    dists = _distributions(cfg, channel, seed)
    if cfg.get("independent_v", False) or mode == "cl":
        dists = [P.independent_v() for P in dists]

    def one(P):
        if mode == "cl":
            return cl_reduction_region(P, src), None, cl_reduction_terms(P), None
        terms = quasi_linear_terms(P)
        poly = quasi_linear_region(P, src)
        if P.ignores_v():
            return poly, cl_reduction_region(P, src), terms, cl_reduction_terms(P)
        return poly, None, terms, None

    return list(pool.map(one, dists))


def cmd_region(cfg: dict) -> ResultBundle:
    """Constraint lists, term values and diagonal samples of a rate region.

    Modes: ``quasi_linear`` (two-block quasi-linear region; when the inputs ignore V the
    single-block reduction is evaluated alongside and reported in the ``alt_*``
    columns), ``cl`` (single-block reduction only), ``multiletter`` (normalised directed
    information for causal policies), ``mac`` (no-feedback bounds).
    """
    _check_keys(cfg, REGION_KEYS, "region config")
    mode = cfg.get("mode", "quasi_linear")
    if mode not in REGION_MODES:
        raise ValidationError(f"mode must be one of {REGION_MODES}")
    seed, threads = _seed(cfg), _threads(cfg)
    num = _count(cfg, "diagonal_points", 11)
    cons_rows, term_rows, diag_rows, summary = [], [], [], []
    aggregates = {"points": []}
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for p, over in enumerate(_grid_points(cfg.get("grid"), ("delta",))):
            channel = load_channel(_with_delta(cfg.get("channel"), over.get("delta")))
            for d, (poly, alt, terms, alt_terms) in enumerate(_region_point(cfg, channel, seed, pool)):
                max_diff = None
                for c in poly.constraints:
                    alt_b = alt[c.label].bound if alt is not None else None
                    diff = abs(c.bound - alt_b) if alt is not None else None
                    cons_rows.append({"point": p, "draw": d, "label": c.label,
                                      "a1": c.coeffs[0], "a2": c.coeffs[1], "a3": c.coeffs[2],
                                      "bound": c.bound, "alt_bound": alt_b, "abs_diff": diff})
                    if diff is not None:
                        max_diff = max(diff, max_diff or 0.0)
                for name in sorted(terms):
                    alt_v = alt_terms[name] if alt_terms is not None else None
                    term_rows.append({"point": p, "draw": d, "term": name, "value": terms[name],
                                      "alt_value": alt_v,
                                      "abs_diff": abs(terms[name] - alt_v) if alt_v is not None else None})
                for row in poly.diagonal_rows(num):
                    diag_rows.append({"point": p, "draw": d, **row})
                sym = poly.symmetric_max()
                summary.append({"point": p, "draw": d, "metric": "symmetric_max", "value": sym})
                if max_diff is not None:
                    summary.append({"point": p, "draw": d, "metric": "max_abs_diff_alt",
                                    "value": max_diff})
                aggregates["points"].append({"index": p, "draw": d, "grid": over,
                                             "symmetric_max": sym, "max_abs_diff_alt": max_diff,
                                             "polytope": poly.to_dict()})
    tables = {
        "constraints": Table(("point", "draw", "label", "a1", "a2", "a3", "bound", "alt_bound",
                              "abs_diff"), cons_rows),
        "terms": Table(("point", "draw", "term", "value", "alt_value", "abs_diff"), term_rows),
        "diagonal": Table(("point", "draw", "r", "R1", "R2", "R3", "min_slack", "tightest"),
                          diag_rows),
        "summary": Table(("point", "draw", "metric", "value"), summary),
    }
    return ResultBundle("region", tables, aggregates, _provenance("region", cfg))


# --- dinfo -----------------------------------------------------------------

DINFO_KEYS = ("channel", "grid", "policies", "L", "seed", "threads", "cap")


def dinfo_quantities(channel: TableChannel, policies, L: int, cap: int = 2 ** 24) -> dict:
    """Directed information for every user subset, plus mutual information when the
    full trajectory tensor fits under ``cap`` and the single-letter I(X;Y) at t = 1."""
    out = {}
    poly = multiletter_region(channel, policies, L)
    for users, c in zip(SUBSETS, poly.constraints):
        name = "".join(f"X{u}" for u in users)
        rest = "".join(f"X{u}" for u in (1, 2, 3) if u not in users)
        key = f"I({name}->Y||{rest})" if rest else f"I({name}->Y)"
        out[key] = c.terms["directed_info"] * L
    model = trajectory_model(channel, policies, L)
    xs = [tag(f"X{i}", t) for t in range(1, L + 1) for i in (1, 2, 3)]
    ys = [tag("Y", t) for t in range(1, L + 1)]
    full = int(np.prod([model.sizes[v] for v in xs + ys]))
    if full <= cap:
        out["I(X1X2X3;Y)"] = mutual_info(model, xs, ys)
    out["I(X1X2X3;Y)@1"] = mutual_info(model, xs[:3], ys[0]) * L
    return out


def cmd_dinfo(cfg: dict) -> ResultBundle:
    """Directed information of L-step feedback policies on a channel."""
    _check_keys(cfg, DINFO_KEYS, "dinfo config")
    L = _count(cfg, "L", 1)
    cap = _count(cfg, "cap", 2 ** 24)
    records, summary, aggregates = [], [], {"points": []}
    for p, over in enumerate(_grid_points(cfg.get("grid"), ("delta",))):
        channel = load_channel(_with_delta(cfg.get("channel"), over.get("delta")))
        q = dinfo_quantities(channel, load_policies(cfg.get("policies"), channel, L), L, cap)
        for name, value in q.items():
            records.append({"point": p, "quantity": name, "value": value, "normalized": value / L})
        point = {"index": p, "grid": over, "values": q}
        di = q["I(X1X2X3->Y)"]
        if "I(X1X2X3;Y)" in q:
            point["directed_minus_mutual"] = di - q["I(X1X2X3;Y)"]
            summary.append({"point": p, "metric": "directed_minus_mutual",
                            "value": point["directed_minus_mutual"]})
        point["normalized_minus_single_letter"] = (di - q["I(X1X2X3;Y)@1"]) / L
        summary.append({"point": p, "metric": "normalized_minus_single_letter",
                        "value": point["normalized_minus_single_letter"]})
        aggregates["points"].append(point)
    tables = {
        "records": Table(("point", "quantity", "value", "normalized"), records),
        "summary": Table(("point", "metric", "value"), summary),
    }
    return ResultBundle("dinfo", tables, aggregates, _provenance("dinfo", cfg))


# --- channel-entropy -------------------------------------------------------

ENTROPY_KEYS = ("deltas", "qs", "state_rule", "seed", "threads")


def cmd_channel_entropy(cfg: dict) -> ResultBundle:
    """Closed-form H(Y|X) against the value computed from the exact channel pmf."""
    _check_keys(cfg, ENTROPY_KEYS, "channel-entropy config")
    deltas = cfg.get("deltas", [0.05, 0.1, 0.25])
    qs = cfg.get("qs", [0.0, 0.3, 1.0])
    rule = cfg.get("state_rule", "x32")
    for name, grid in (("deltas", deltas), ("qs", qs)):
        if not isinstance(grid, list) or not grid:
            raise ValidationError(f"{name} must be a nonempty list")
    records = []
    for delta, q in product(deltas, qs):
        closed = mixture_entropy_closed_form(delta, q)
        numeric = mixture_conditional_entropy(delta, q, rule)
        records.append({"delta": float(delta), "q": float(q), "state_rule": rule,
                        "closed_form": closed, "numeric": numeric,
                        "abs_diff": abs(closed - numeric)})
    worst = max(r["abs_diff"] for r in records)
    tables = {
        "records": Table(("delta", "q", "state_rule", "closed_form", "numeric", "abs_diff"),
                         records),
        "summary": Table(("metric", "value"), [{"metric": "max_abs_diff", "value": worst}]),
    }
    return ResultBundle("channel-entropy", tables, {"max_abs_diff": worst},
                        _provenance("channel-entropy", cfg))


COMMANDS = {
    "simulate": cmd_simulate,
    "sumcode": cmd_sumcode,
    "region": cmd_region,
    "dinfo": cmd_dinfo,
    "channel-entropy": cmd_channel_entropy,
}
