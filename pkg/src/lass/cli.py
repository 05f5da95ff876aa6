"""Command-line interface: ``lass {simulate,classify,preprocess,report}``.

Every command writes ``manifest.json`` into its output directory before any
result file; if the command fails, result files are removed and the manifest
records the error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .csvio import CsvFormatError, read_rows, read_table, write_rows
from .metrics import evaluate
from .precision import PrecisionMethod
from .preprocess import preprocess
from .scoring import fit, score_batch
from .selection import DecisionVector, FsrLevels, classify_all, select
from .simharness import METHODS, METRICS, REP_COLUMNS, ExperimentConfig, run_experiment, summarize

log = logging.getLogger("lass")

DECISION_COLUMNS = ("id", "s_hat", "t_hat", "decision")
SUMMARY_COLUMNS = ("method", "metric", "mean", "se")
LONG_COLUMNS = ("method", "metric", "mean", "se", "n")


class CommandError(Exception):
    pass


def _now():
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


class _Run:
    """Manifest bookkeeping for one command invocation."""

    def __init__(self, command, args, out_dir, outputs):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.outputs = [self.dir / o for o in outputs]
        self.manifest = {
            "command": command,
            "config": {k: v for k, v in vars(args).items() if k != "func"},
            "seed": getattr(args, "seed", None),
            "version": __version__,
            "started": _now(),
            "outputs": [str(o) for o in self.outputs],
            "status": "running",
        }
        self._write()

    def _write(self):
        with open(self.dir / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(self.manifest, fh, indent=2, default=str)
            fh.write("\n")

    def finish(self, **extra):
        self.manifest.update(extra, status="ok", finished=_now())
        self._write()

    def fail(self, exc):
        for path in self.outputs:
            if path.exists():
                path.unlink()
        self.manifest.update(status="failed", error=str(exc), finished=_now())
        self._write()


def _levels(args):
    if args.conventional:
        return None
    return FsrLevels(args.alpha1, args.alpha2)


def _precision(text):
    try:
        return PrecisionMethod.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_simulate(args):
    n1 = args.n1 if args.n1 is not None else args.n
    n2 = args.n2 if args.n2 is not None else args.n
    config = ExperimentConfig(
        model_id=args.model,
        p=args.p,
        n1=n1,
        n2=n2,
        m=args.m,
        mean_setting=args.mean,
        levels=_levels(args),
        precision=args.precision,
        b=args.b,
        replications=args.reps,
        seed=args.seed,
        methods=tuple(args.methods),
    )
    run = _Run("simulate", args, args.out, ["reps.csv", "summary.csv"])
    try:
        result = run_experiment(config)
        write_rows(run.outputs[0], REP_COLUMNS, result.rows)
        write_rows(run.outputs[1], SUMMARY_COLUMNS, result.summary)
    except BaseException as exc:
        run.fail(exc)
        raise
    run.finish(failures=result.failures)
    for f in result.failures:
        log.warning("replication %s failed: %s", f["rep"], f["error"])
    print(_format_table(result.summary))


def write_decisions(path, ids, scores, decisions: DecisionVector):
    rows = [
        {"id": i, "s_hat": s, "t_hat": t, "decision": int(a)}
        for i, s, t, a in zip(ids, scores.s_hat, scores.t_hat, decisions.actions)
    ]
    write_rows(path, DECISION_COLUMNS, rows)


def decision_meta(decisions: DecisionVector) -> dict:
    return {
        "k1": decisions.k1,
        "k2": decisions.k2,
        "threshold1": decisions.threshold1,
        "threshold2": decisions.threshold2,
    }


def read_decisions(path, manifest=None):
    """Parse a decisions CSV back into ``(ids, s_hat, t_hat, DecisionVector)``.

    Thresholds and cutoffs come from the ``decisions`` entry of the manifest
    written next to it (or the one passed explicitly).
    """
    path = Path(path)
    header, rows = read_rows(path)
    if tuple(header) != DECISION_COLUMNS:
        raise CsvFormatError(f"{path}: expected columns {DECISION_COLUMNS}, got {tuple(header)}")
    ids = [r[0] for r in rows]
    s = np.array([float(r[1]) for r in rows])
    t = np.array([float(r[2]) for r in rows])
    actions = np.array([int(r[3]) for r in rows], dtype=np.int8)
    if manifest is None:
        manifest = json.loads((path.parent / "manifest.json").read_text(encoding="utf-8"))
    meta = manifest.get("decisions", {})
    dv = DecisionVector(actions, meta.get("threshold1"), meta.get("threshold2"), meta.get("k1"), meta.get("k2"))
    return ids, s, t, dv


def cmd_classify(args):
    train = read_table(args.train, require_label=True)
    test = read_table(args.test, features=train.features)
    x, y = train.class_split()
    if x.shape[0] < 2 or y.shape[0] < 2:
        raise CommandError("training data needs at least two rows of each class")
    outputs = ["decisions.csv"] + (["report.csv"] if test.labels is not None else [])
    run = _Run("classify", args, args.out, outputs)
    try:
        trained = fit(x, y, b=args.b, method=args.precision)
        scores = score_batch(trained, test.values)
        levels = _levels(args)
        decisions = classify_all(scores.t_hat) if levels is None else select(scores.t_hat, levels)
        write_decisions(run.outputs[0], test.ids, scores, decisions)
        report = None
        if test.labels is not None:
            report = evaluate(decisions, test.labels).as_dict()
            write_rows(run.outputs[1], ("key", "value"), [{"key": k, "value": v} for k, v in report.items()])
    except BaseException as exc:
        run.fail(exc)
        raise
    run.finish(decisions=decision_meta(decisions))
    counts = np.bincount(decisions.actions, minlength=3)
    print(f"classified {decisions.m} points: class1={counts[1]} class2={counts[2]} indecision={counts[0]}")
    if report is not None:
        print(f"fsr={report['fsr_global']:.4f} fsr1={report['fsr_class1']:.4f} fsr2={report['fsr_class2']:.4f} power={report['power']:.4f}")


def cmd_preprocess(args):
    train = read_table(args.train, require_label=True)
    test = read_table(args.test, features=train.features) if args.test else None
    outputs = ["train_filtered.csv", "kept_features.csv"] + (["test_filtered.csv"] if test else [])
    run = _Run("preprocess", args, args.out, outputs)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            res = preprocess(train.values, train.labels, args.var_low, args.var_high, args.rescale, args.top_k)
        for w in caught:
            log.warning("%s", w.message)
        names = [train.features[i] for i in res.kept]
        _write_projection(run.outputs[0], train, res.kept, names, args.rescale)
        write_rows(
            run.outputs[1],
            ("rank", "feature", "t_stat", "variance"),
            [
                {"rank": r + 1, "feature": train.features[i], "t_stat": res.t_stat[i], "variance": res.variance[i]}
                for r, i in enumerate(res.kept)
            ],
        )
        if test:
            _write_projection(run.outputs[2], test, res.kept, names, args.rescale)
    except BaseException as exc:
        run.fail(exc)
        raise
    run.finish(n_kept=len(names), n_dropped_variance=res.n_dropped_variance)
    print(f"kept {len(names)} of {len(train.features)} features ({res.n_dropped_variance} dropped by the variance filter)")


def _write_projection(path, table, kept, names, rescale):
    cols = ["id"] + (["label"] if table.labels is not None else []) + names
    vals = table.values[:, kept] * rescale
    rows = []
    for r, rid in enumerate(table.ids):
        row = {"id": rid}
        if table.labels is not None:
            row["label"] = int(table.labels[r])
        row.update(zip(names, vals[r]))
        rows.append(row)
    write_rows(path, cols, rows)


def load_reps(path) -> list:
    header, rows = read_rows(path)
    if tuple(header) != REP_COLUMNS:
        raise CsvFormatError(f"{path}: expected columns {REP_COLUMNS}, got {tuple(header)}")
    if not rows:
        raise CommandError(f"{path}: no data")
    out = []
    for lineno, row in enumerate(rows, start=2):
        rec = {"rep": row[0], "method": row[1]}
        for name, cell in zip(REP_COLUMNS[2:], row[2:]):
            try:
                rec[name] = float(cell)
            except ValueError:
                raise CsvFormatError(f"{path}: line {lineno}, column {name!r}: {cell!r} is not a number") from None
        out.append(rec)
    return out


def _format_table(summary) -> str:
    methods = list(dict.fromkeys(r["method"] for r in summary))
    metrics = list(dict.fromkeys(r["metric"] for r in summary))
    cell = {(r["method"], r["metric"]): f"{r['mean']:.4f} ± {r['se']:.4f}" for r in summary}
    head = ["method"] + metrics
    body = [[m] + [cell.get((m, k), "") for k in metrics] for m in methods]
    widths = [max(len(str(row[i])) for row in [head] + body) for i in range(len(head))]
    lines = ["  ".join(str(v).rjust(w) for v, w in zip(row, widths)) for row in [head] + body]
    return "\n".join(lines)


def cmd_report(args):
    rows = load_reps(args.reps)
    methods = list(dict.fromkeys(r["method"] for r in rows))
    order = [m for m in METHODS if m in methods] + [m for m in methods if m not in METHODS]
    summary = summarize(rows, order)
    metrics = args.metrics or list(METRICS)
    summary = [r for r in summary if r["metric"] in metrics]
    print(_format_table(summary))
    if args.long_out:
        counts = {m: sum(r["method"] == m for r in rows) for m in methods}
        out = Path(args.long_out)
        run = _Run("report", args, out.parent if str(out.parent) else ".", [out.name])
        try:
            write_rows(run.outputs[0], LONG_COLUMNS, [dict(r, n=counts[r["method"]]) for r in summary])
        except BaseException as exc:
            run.fail(exc)
            raise
        run.finish()


def _add_selection_flags(p):
    p.add_argument("--alpha1", type=float, default=0.1, help="target class-1 FSR (default 0.1)")
    p.add_argument("--alpha2", type=float, default=0.1, help="target class-2 FSR (default 0.1)")
    p.add_argument("--conventional", action="store_true", help="classify every point by the sign of its score")
    p.add_argument("--b", type=float, default=0.1, help="shrinkage offset constant (default 0.1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lass", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"lass {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a replicated simulation experiment")
    p.add_argument("--model", choices=("band", "ar1", "block"), default="band")
    p.add_argument("--p", type=int, default=500)
    p.add_argument("--n", type=int, default=400, help="training size per class")
    p.add_argument("--n1", type=int)
    p.add_argument("--n2", type=int)
    p.add_argument("--m", type=int, default=2000, help="test points per replication")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--mean", choices=("sparse", "dense"), default="sparse")
    p.add_argument("--precision", type=_precision, default=PrecisionMethod("oracle"),
                   help="oracle|identity|diagonal|pinv|ridge:<lambda> (default oracle)")
    p.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_selection_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("classify", help="fit on a labelled CSV and classify another")
    p.add_argument("train")
    p.add_argument("test")
    p.add_argument("--precision", type=_precision, default=PrecisionMethod("ridge", 1.0),
                   help="identity|diagonal|pinv|ridge:<lambda> (default ridge:1.0)")
    p.add_argument("--out", required=True)
    _add_selection_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("preprocess", help="variance filter and top-K t-statistic screening")
    p.add_argument("train")
    p.add_argument("--test")
    p.add_argument("--var-low", type=float, default=1e-2)
    p.add_argument("--var-high", type=float, default=1e2)
    p.add_argument("--rescale", type=float, default=1.0, help="multiply all feature values by this factor first")
    p.add_argument("--top-k", type=int, default=200)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("report", help="aggregate a reps.csv into a mean ± se table")
    p.add_argument("reps")
    p.add_argument("--metrics", nargs="+", choices=METRICS)
    p.add_argument("--long-out", help="write tidy method/metric/mean/se/n CSV here")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="lass: %(message)s")
    if args.command == "classify" and args.precision.kind == "oracle":
        parser.error("classify cannot use the oracle precision (no true precision for real data)")
    try:
        args.func(args)
    except (ValueError, OSError, CommandError) as exc:
        print(f"lass: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
