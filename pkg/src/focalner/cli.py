"""Command-line front end.

Exit status: 0 on success, 1 when the input fails validation, 2 on usage
errors (bad arguments, missing files).
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import corpus as C
from .config import Config, ConfigError, load_config
from .eval import evaluation_report, parse_merge
from .features import corpus_vectors
from .induction import format_rules, induce_rules, read_rules
from .lexicon import LexiconError
from .synth import generate, load_spec
from .tagger import Tagger, baseline_tag
from .util import atomic_write


class UsageError(Exception):
    pass


def _config(args) -> Config:
    return load_config(args.config) if args.config else Config()


def _read_docs(path, schema):
    return C.documents_from_text(Path(path).read_text(encoding="utf-8"), schema,
                                 default_id=Path(path).stem or "doc1")


def _emit(text: str, out) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _ordered_map(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def cmd_train(args, cfg: Config) -> int:
    schema = cfg.load_schema()
    corpus = C.read_corpus(args.corpus, schema)
    vectors = corpus_vectors(corpus, cfg.load_lexicons(), cfg.window, cfg.load_patterns())
    rulesets = induce_rules(vectors, schema, **cfg.induction_params)
    atomic_write(args.output, format_rules(rulesets, cfg.echo()))
    return 0


def cmd_tag(args, cfg: Config) -> int:
    schema = cfg.load_schema()
    rules_path = args.rules or cfg.rules
    if not rules_path:
        raise UsageError("tag needs a rules file (-r or 'rules' in the config)")
    tagger = Tagger(cfg.load_lexicons(), read_rules(rules_path), cfg.window, schema,
                    cfg.load_patterns())
    docs = list(_read_docs(args.input, schema))
    step = tagger.resolve if args.keep_spans else tagger.tag
    results = _ordered_map(step, docs, cfg.n_workers)
    if args.bundles:
        lines = [b.render() for _, bundles in results for b in bundles]
        sys.stdout.write("".join(line + "\n" for line in lines))
    if args.output or not args.bundles:
        _emit(C.format_corpus([d for d, _ in results]), args.output)
    return 0


def cmd_baseline(args, cfg: Config) -> int:
    schema = cfg.load_schema()
    lex = cfg.load_lexicons()
    docs = list(_read_docs(args.input, schema))
    if args.keep_spans:
        out = [d.replace_spans([[C.AnnotatedSpan(s.first_token, s.last_token, s.main_type,
                                                 schema.default_subtype.get(s.main_type))
                                 for s in sent.spans] for sent in d.sentences]) for d in docs]
    else:
        out = _ordered_map(lambda d: baseline_tag(d, lex, schema), docs, cfg.n_workers)
    _emit(C.format_corpus(out), args.output)
    return 0


def cmd_eval(args, cfg: Config) -> int:
    schema = cfg.load_schema()
    ref = C.read_corpus(args.ref, schema)
    hyp = C.read_corpus(args.hyp, schema)
    base = C.read_corpus(args.baseline, schema) if args.baseline else None
    merge = parse_merge(args.merge) if args.merge else None
    report = evaluation_report(ref, hyp, gold_spans=args.gold_spans, merge=merge, baseline=base)
    sys.stdout.write(report.to_tsv() if args.tsv else report.to_text())
    return 0


def cmd_synth(args, cfg: Config) -> int:
    spec, templates = load_spec(args.spec)
    corpus = generate(spec, templates, cfg.load_schema())
    atomic_write(args.output, C.format_corpus(corpus))
    return 0


def cmd_validate(args, cfg: Config) -> int:
    schema = cfg.load_schema()
    try:
        corpus = C.read_corpus(args.corpus, schema)
    except C.CorpusError as exc:
        print(f"{args.corpus}: {exc}", file=sys.stderr)
        return 1
    violations = C.validate_corpus(corpus)
    for v in violations:
        span = v.span.label if v.span else "-"
        print(f"{v.rule}\t{v.doc_id}\t{v.sentence_index}\t{span}\t{v.detail}")
    print(f"{len(corpus.documents)} documents, {len(violations)} violations", file=sys.stderr)
    return 1 if violations else 0


def cmd_inspect(args, cfg: Config) -> int:
    rulesets = read_rules(args.rules)
    for main, rs in rulesets.items():
        print(f"# {main}: {len(rs)} rules (alpha={rs.alpha} min_support={rs.min_support} "
              f"max_order={rs.max_order} min_dp={rs.min_dp})")
        print(f"{'rank':>4}  {'target':<10} {'p_level':>10} {'dp':>6} {'support':>7}  features")
        for i, r in enumerate(rs.rules, 1):
            print(f"{i:>4}  {main + '.' + r.target:<10} {r.p_level:>10.3e} {r.disc_power:>6.3f} "
                  f"{r.support:>7}  {r.text}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="key = value configuration file")

    parser = argparse.ArgumentParser(prog="focalner", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", parents=[common], help="induce subtype rules from a corpus")
    p.add_argument("corpus")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tag", parents=[common], help="tag documents")
    p.add_argument("input")
    p.add_argument("-r", "--rules")
    p.add_argument("-o", "--output")
    p.add_argument("--bundles", action="store_true", help="print entity bundles")
    p.add_argument("--keep-spans", action="store_true",
                   help="resolve subtypes on the input's spans instead of recognizing entities")
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("eval", parents=[common], help="score a hypothesis against a reference")
    p.add_argument("ref")
    p.add_argument("hyp")
    p.add_argument("--gold-spans", action="store_true")
    p.add_argument("--merge", help="e.g. gsp.hum or gsp.hum=gsp.pers,gsp.org")
    p.add_argument("--baseline", help="baseline hypothesis to report alongside")
    p.add_argument("--tsv", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("baseline", parents=[common], help="tag every subtype with its default")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--keep-spans", action="store_true")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic corpus")
    p.add_argument("spec")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("validate", parents=[common], help="check a corpus against the schema")
    p.add_argument("corpus")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("inspect-rules", parents=[common], help="list ranked rules")
    p.add_argument("rules")
    p.set_defaults(func=cmd_inspect)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help or a usage error already reported by argparse
        return exc.code if isinstance(exc.code, int) else 2
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except (UsageError, ConfigError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"focalner {args.command}: {exc}", file=sys.stderr)
        return 2
    except (C.CorpusError, LexiconError, ValueError) as exc:
        print(f"focalner {args.command}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
