"""Command-line entry points.

Exit codes: 0 success, 1 usage error, 2 data error, 3 model error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path


from .dataset import (
    class_summary,
    downsample_to_ratio,
    load_dataset,
    save_dataset,
    stratified_split,
    write_dataset,
)
from .errors import DataError, ModelError
from .features import Featurizer, prune_features, write_prune_report
from .forest import ForestConfig
from .lexical import LexicalConfig, lexical_names
from .metrics import evaluate_scores, load_scores_file
from .parsing import SuffixList
from .pipeline import Timer, evaluate_dataset, featurizer_for_model, train
from .selector import Selector, make_server, run_stream
from .store import dumps_model, file_digest, load_model, save_model
from .synthetic import CorpusSpec, generate_corpus
from .trigrams import TrigramConfig

log = logging.getLogger("urlsift")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_MODEL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _features_per_split(text: str):
    return text if text in ("sqrt", "all") else _positive_int(text)


def _add_lists(p: argparse.ArgumentParser) -> None:
    p.add_argument("--suffix-list", type=Path, help="public suffix list file (default: bundled snapshot)")
    p.add_argument("--suspicious-tlds", type=Path, help="suspicious TLD list file")
    p.add_argument("--top-domains", type=Path, help="top primary-domain whitelist file")


def _add_featurizer(p: argparse.ArgumentParser) -> None:
    _add_lists(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--trigrams", type=_positive_int, default=1000, help="trigram hash buckets (default 1000)")
    g.add_argument("--lexical-only", action="store_true", help="use only the 23 lexical features")


def _add_forest(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trees", type=_positive_int, default=100)
    p.add_argument("--max-depth", type=_positive_int, default=20)
    p.add_argument("--min-samples-split", type=int, default=2)
    p.add_argument("--min-samples-leaf", type=_positive_int, default=1)
    p.add_argument("--features-per-split", type=_features_per_split, default="sqrt")
    p.add_argument("--no-bootstrap", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="parallel tree fitting; the model does not depend on it")


def _lists(args) -> tuple[LexicalConfig, SuffixList]:
    lex = LexicalConfig.from_files(args.suspicious_tlds, args.top_domains)
    suffixes = SuffixList.from_file(args.suffix_list) if args.suffix_list else SuffixList.default()
    return lex, suffixes


def _featurizer(args, bucket_count=None) -> Featurizer:
    lex, suffixes = _lists(args)
    if bucket_count is None:
        bucket_count = 0 if args.lexical_only else args.trigrams
    tri = TrigramConfig(bucket_count) if bucket_count > 0 else None
    return Featurizer(tri_cfg=tri, lex_cfg=lex, suffix_list=suffixes)


def _forest_config(args, **overrides) -> ForestConfig:
    kw = dict(
        n_trees=args.trees,
        max_depth=args.max_depth,
        min_samples_split=args.min_samples_split,
        min_samples_leaf=args.min_samples_leaf,
        features_per_split=args.features_per_split,
        bootstrap=not args.no_bootstrap,
        seed=args.seed,
    )
    kw.update(overrides)
    try:
        return ForestConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load_for_serving(args):
    try:
        model = load_model(args.model)
    except OSError as exc:
        raise ModelError(f"cannot read model: {exc}") from None
    lex, suffixes = _lists(args)
    fz = featurizer_for_model(model, lex, suffixes)
    return Selector(model, fz, args.threshold, model_digest=file_digest(args.model))


def cmd_featurize(args, out) -> int:
    fz = _featurizer(args)
    if args.url is not None:
        urls, labels = [args.url], None
    else:
        ds = load_dataset(args.dataset)
        urls, labels = ds.urls, ds.labels
    if args.header:
        cols = fz.feature_names()
        out.write(",".join((["label"] if labels is not None else []) + cols) + "\n")
    for i, url in enumerate(urls):
        row = [f"{v:.17g}" for v in fz.values(url)]
        if labels is not None:
            row.insert(0, str(labels[i]))
        out.write(",".join(row) + "\n")
    return EXIT_OK


def cmd_train(args, out) -> int:
    fz = _featurizer(args)
    cfg = _forest_config(args)
    ds = load_dataset(args.dataset)
    if args.downsample_ratio is not None:
        ds = downsample_to_ratio(ds, args.downsample_ratio, seed=args.seed)
    with Timer() as t:
        model = train(ds, cfg, fz, n_jobs=args.jobs)
    size = save_model(model, args.model)
    n_ben, n_mal, frac = class_summary(ds)
    summary = {
        "rows": len(ds),
        "skipped_rows": ds.skipped,
        "duplicate_urls": ds.duplicate_count,
        "benign": n_ben,
        "malicious": n_mal,
        "benign_fraction": frac,
        "feature_count": model.feature_count,
        "node_count": model.metadata["node_count"],
        "train_seconds": round(t.elapsed, 3),
        "model_bytes": size,
        "model": str(args.model),
    }
    out.write(json.dumps(summary, sort_keys=True) + "\n")
    return EXIT_OK


def _parse_values(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--values must be comma-separated integers, got {text!r}") from None
    if len(values) < 2:
        raise UsageError("--values needs at least 2 entries")
    return values


def cmd_sweep(args, out) -> int:
    values = _parse_values(args.values)
    if args.axis == "max_depth" and min(values) < 1:
        raise UsageError("max_depth values must be >= 1")
    if args.axis == "trigram_buckets" and min(values) < 0:
        raise UsageError("bucket values must be >= 0")
    if args.axis == "trigram_buckets" and args.lexical_only:
        raise UsageError("--lexical-only conflicts with a trigram_buckets sweep")
    ds = load_dataset(args.dataset)
    train_ds, test_ds = stratified_split(ds, args.test_fraction, seed=args.seed)
    out.write("value,trigrams,lexical,max_depth,accuracy,fpr,fnr,auc,threshold,model_bytes,train_seconds\n")
    for value in values:
        if args.axis == "max_depth":
            fz = _featurizer(args)
            cfg = _forest_config(args, max_depth=value)
        else:
            fz = _featurizer(args, bucket_count=value)
            cfg = _forest_config(args)
        with Timer() as t:
            model = train(train_ds, cfg, fz, n_jobs=args.jobs)
        report = evaluate_dataset(model, fz, test_ds, args.threshold)
        auc_text = "" if report.auc is None else f"{report.auc:.6f}"
        out.write(
            f"{value},{fz.bucket_count},{len(lexical_names())},{cfg.max_depth},"
            f"{report.accuracy:.6f},{report.fpr:.6f},{report.fnr:.6f},{auc_text},"
            f"{args.threshold},{len(dumps_model(model))},{t.elapsed:.3f}\n"
        )
        out.flush()
    return EXIT_OK


def _render(report, fmt: str, name: str) -> str:
    if fmt == "json":
        doc = json.loads(report.to_json())
        doc["source"] = name
        return json.dumps(doc, sort_keys=True) + "\n"
    if fmt == "csv":
        return report.to_csv()
    return f"[{name}]\n{report.render()}\n"


def cmd_evaluate(args, out) -> int:
    if args.model is None and args.scores_file is None:
        raise UsageError("evaluate needs --model and/or --scores-file")
    reports = []
    if args.model is not None:
        if args.test is None:
            raise UsageError("--model evaluation needs --test")
        selector = _load_for_serving(args)
        test_ds = load_dataset(args.test)
        reports.append((str(args.model), evaluate_dataset(selector.model, selector.featurizer, test_ds, args.threshold)))
    if args.scores_file is not None:
        labels, scores = load_scores_file(args.scores_file)
        if args.test is not None:
            test_labels = load_dataset(args.test).labels
            if test_labels != labels:
                raise DataError("--scores-file labels do not match the --test set row for row")
        reports.append((str(args.scores_file), evaluate_scores(labels, scores, args.threshold)))
    for name, report in reports:
        out.write(_render(report, args.format, name))
    return EXIT_OK


def cmd_select(args, out) -> int:
    selector = _load_for_serving(args)
    inp = open(args.input, "rb") if args.input else sys.stdin.buffer
    try:
        run_stream(selector, inp, out, workers=args.workers)
    finally:
        if args.input:
            inp.close()
    return EXIT_OK


def cmd_serve(args, out) -> int:
    selector = _load_for_serving(args)
    host, _, port = args.bind.rpartition(":")
    try:
        server = make_server(selector, host or "127.0.0.1", int(port))
    except ValueError:
        raise UsageError(f"--bind must be host:port, got {args.bind!r}") from None
    log.info("serving on %s:%d", *server.server_address[:2])
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def cmd_prune(args, out) -> int:
    lex, suffixes = _lists(args)
    fz = Featurizer(tri_cfg=None, lex_cfg=lex, suffix_list=suffixes)
    ds = load_dataset(args.dataset)
    mask = prune_features(fz.matrix(ds.urls), args.threshold)
    write_prune_report(mask, out)
    return EXIT_OK


def cmd_synth(args, out) -> int:
    try:
        ds = generate_corpus(CorpusSpec(args.benign, args.malicious, seed=args.seed))
    except DataError as exc:
        raise UsageError(str(exc)) from None
    if args.output:
        save_dataset(ds, args.output)
    else:
        write_dataset(ds, out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="urlsift", description="Lexical malicious-URL classifier toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("featurize", help="emit feature vectors as CSV rows")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--url")
    src.add_argument("--dataset", type=Path)
    p.add_argument("--header", action="store_true", help="write a header row of feature names")
    _add_featurizer(p)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="train a forest and save it")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--model", type=Path, required=True, help="output model path")
    p.add_argument("--downsample-ratio", type=float, help="downsample to this benign fraction first (e.g. 0.6)")
    _add_featurizer(p)
    _add_forest(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sweep", help="evaluate one model per value of a hyperparameter")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--axis", choices=("max_depth", "trigram_buckets"), required=True)
    p.add_argument("--values", required=True, help="comma-separated, at least 2")
    p.add_argument("--test-fraction", type=float, default=0.25)
    p.add_argument("--threshold", type=float, default=0.5)
    _add_featurizer(p)
    _add_forest(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("evaluate", help="score a labeled test set")
    p.add_argument("--model", type=Path)
    p.add_argument("--test", type=Path)
    p.add_argument("--scores-file", type=Path, help="external score,label rows to evaluate alongside")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    _add_lists(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("select", help="stream verdicts for one URL per input line")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--input", type=Path, help="input file (default stdin)")
    p.add_argument("--workers", type=_positive_int, default=1, help="ordered parallel scoring processes")
    _add_lists(p)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("serve", help="HTTP verdict service")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--bind", default="127.0.0.1:8080")
    p.add_argument("--threshold", type=float, default=0.5)
    _add_lists(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("prune", help="report correlated lexical features")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--threshold", type=float, default=0.75)
    _add_lists(p)
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("synth", help="write a synthetic labeled corpus")
    p.add_argument("--benign", type=_positive_int, default=600)
    p.add_argument("--malicious", type=_positive_int, default=400)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", type=Path)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"urlsift: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModelError as exc:
        print(f"urlsift: model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (DataError, OSError) as exc:
        print(f"urlsift: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
