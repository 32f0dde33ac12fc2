"""``dds`` command line: train, predict, eval, sample, selftest.

Exit codes: 0 success, 1 runtime failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import asdict

from . import __version__
from .dataset import (DatasetError, Encoder, UniverseMismatch, build_dataset, label_index,
                      read_table, stratified_split)
from .metrics import EvalReport, evaluate
from .predictor import STRATEGIES, RuleSetModel, predict
from .sampler import (PAIR, TRIPLE, SamplerInput, build_weight_index, measure_value,
                      sample_rules)
from .selector import DEFAULT_SEED, SelectorConfig, fit

log = logging.getLogger("dds")


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("DDS_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"DDS_SEED must be an integer, got {raw!r}") from None


def _lambda(value: str):
    if value in ("none", "perm", "strict"):
        return value
    try:
        lam = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError("expected none, perm, strict or a number") from None
    if lam < 0:
        raise argparse.ArgumentTypeError("lambda must be non-negative")
    return lam


def _add_data_args(p: argparse.ArgumentParser, label_required: bool = True) -> None:
    p.add_argument("--data", required=True, help="input CSV (UTF-8, header row)")
    p.add_argument("--label", required=label_required, default=None, help="class column")
    p.add_argument("--bins", type=int, default=5, help="equal-width bins per numeric column")
    p.add_argument("--missing-token", default="", help="cell value treated as missing")


def _add_fit_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda", dest="lam", type=_lambda, default="strict",
                   help="none, perm, strict, or an explicit value (default strict)")
    p.add_argument("--m", type=int, default=200, help="samples per class per iteration")
    p.add_argument("--epsilon", type=float, default=0.01, help="minimum marginal recall")
    p.add_argument("--k-max", type=int, default=None, help="maximum number of rules")
    p.add_argument("--subsample-cap", type=int, default=None,
                   help="cap on records per partition fed to the sampler")
    p.add_argument("--seed", type=int, default=None, help="random seed (env DDS_SEED)")
    p.add_argument("--measure", choices=(PAIR, TRIPLE), default=PAIR)
    p.add_argument("--default-label", choices=("majority", "underrepresented"),
                   default="majority")
    p.add_argument("--conflict", choices=STRATEGIES, default="most_accurate",
                   help="how to resolve records covered by several rules")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dds", description="Learn diverse rule sets.")
    parser.add_argument("--version", action="version", version=f"dds {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="learn a rule set and write it as JSON")
    _add_data_args(p)
    _add_fit_args(p)
    p.add_argument("--out", required=True, help="model JSON path")
    p.add_argument("--trace", default=None, help="write the selection trace as JSON lines")

    p = sub.add_parser("predict", help="append predicted labels to a CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--column", default="predicted", help="name of the appended column")
    p.add_argument("--conflict", choices=STRATEGIES, default=None,
                   help="override the model's conflict strategy")

    p = sub.add_parser("eval", help="report n_rules,n_conds,bacc,auc,div,overlap as CSV")
    _add_data_args(p, label_required=False)
    _add_fit_args(p)
    p.add_argument("--model", default=None,
                   help="evaluate this model on --data instead of train/test splits")
    p.add_argument("--test-fraction", type=float, default=0.3)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--json", default=None, help="also write the reports as JSON")

    p = sub.add_parser("sample", help="dump sampled candidate rules with their measure")
    _add_data_args(p)
    p.add_argument("--class", dest="head", default=None, help="head class (default: first)")
    p.add_argument("--m", type=int, default=20)
    p.add_argument("--measure", choices=(PAIR, TRIPLE), default=PAIR)
    p.add_argument("--seed", type=int, default=None)

    sub.add_parser("selftest", help="check the sampler and greedy against brute force")
    return parser


def _config(args) -> SelectorConfig:
    try:
        return SelectorConfig(
            lambda_mode=args.lam, m=args.m, epsilon=args.epsilon, k_max=args.k_max,
            subsample_cap=args.subsample_cap,
            seed=args.seed if args.seed is not None else _default_seed(),
            measure=args.measure, default_label=args.default_label,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_train(args) -> int:
    cfg = _config(args)
    header, rows = read_table(args.data)
    d = build_dataset(header, rows, args.label, args.bins, args.missing_token)
    model, trace = fit(d, cfg)
    model.conflict_strategy = args.conflict
    model.save(args.out)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as f:
            f.write(trace.to_jsonl(d))
    chosen = trace.objective_second if trace.chosen == "second" else trace.objective_first
    n_conds = sum(len(r.body) for r in model.rules) / len(model.rules) if model.rules else 0.0
    print(f"n_rules={len(model.rules)} n_conds={n_conds:.3f} F={chosen:.6g}")
    return 0


def cmd_predict(args) -> int:
    model = RuleSetModel.load(args.model)
    if args.conflict:
        model.conflict_strategy = args.conflict
    try:
        f = open(args.data, newline="", encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read {args.data}: {exc}") from exc
    with f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise DatasetError(f"{args.data} has no header row")
        encode = Encoder(model.specs, header, model.missing_token)
        out = csv.writer(sys.stdout, lineterminator="\n")
        out.writerow(header + [args.column])
        for row in reader:
            if not row:
                continue
            out.writerow(row + [model.classes[predict(model, encode(row))]])
    return 0


def _eval_splits(args, cfg: SelectorConfig) -> list[EvalReport]:
    header, rows = read_table(args.data)
    if not rows:
        raise DatasetError("dataset has no rows")
    target = label_index(header, args.label)
    reports = []
    for rep in range(args.repeats):
        train, test = stratified_split([r[target] for r in rows], args.test_fraction,
                                       cfg.seed + rep)
        d_train = build_dataset(header, [rows[i] for i in train], args.label, args.bins,
                                args.missing_token)
        d_test = build_dataset(header, [rows[i] for i in test], args.label,
                               specs=d_train.specs, classes=d_train.classes,
                               missing_token=args.missing_token)
        run_cfg = SelectorConfig(**{**asdict(cfg), "seed": cfg.seed + rep})
        model, _ = fit(d_train, run_cfg)
        model.conflict_strategy = args.conflict
        reports.append(evaluate(model, d_test))
    return reports


def cmd_eval(args) -> int:
    if args.repeats < 1:
        raise UsageError("--repeats must be at least 1")
    if args.model:
        model = RuleSetModel.load(args.model)
        header, rows = read_table(args.data)
        d = build_dataset(header, rows, args.label or model.label_column,
                          specs=model.specs, classes=model.classes,
                          missing_token=model.missing_token)
        reports = [evaluate(model, d)]
    else:
        if not args.label:
            raise UsageError("--label is required unless --model is given")
        reports = _eval_splits(args, _config(args))
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(EvalReport.columns())
    for r in reports:
        out.writerow(r.row())
    if len(reports) > 1:
        out.writerow(EvalReport.mean(reports).row())
    if args.json:
        payload = {"runs": [asdict(r) for r in reports]}
        if len(reports) > 1:
            payload["mean"] = asdict(EvalReport.mean(reports))
        with open(args.json, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2)
    return 0


def cmd_sample(args) -> int:
    header, rows = read_table(args.data)
    d = build_dataset(header, rows, args.label, args.bins, args.missing_token)
    if args.head is None:
        head = 0
    elif args.head in d.classes:
        head = d.classes.index(args.head)
    else:
        raise UsageError(f"unknown class {args.head!r}; choose from {list(d.classes)}")
    if args.m < 1:
        raise UsageError("--m must be at least 1")
    pos = [i for i, y in enumerate(d.labels) if y == head]
    neg = [i for i, y in enumerate(d.labels) if y != head]
    inp = SamplerInput(pos, neg, (), args.m)
    if args.measure == TRIPLE:
        raise UsageError("the triple measure needs covered records; nothing is covered here")
    idx = build_weight_index(inp, d, args.measure)
    seed = args.seed if args.seed is not None else _default_seed()
    names = d.item_names
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["body", "head", "measure"])
    for r in sample_rules(idx, inp, d, head, seed):
        out.writerow([" & ".join(names[j] for j in r.body), d.classes[head],
                      measure_value(r.body.bits, inp, d, idx.measure)])
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run

    ok = True
    for name, passed, detail in run():
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        ok &= passed
    return 0 if ok else 1


COMMANDS = {"train": cmd_train, "predict": cmd_predict, "eval": cmd_eval,
            "sample": cmd_sample, "selftest": cmd_selftest}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, DatasetError, UniverseMismatch) as exc:
        print(f"dds {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("failure", exc_info=True)
        print(f"dds {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
