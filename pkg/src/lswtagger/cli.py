"""Command-line interface.

Exit status is 0 on success, 1 for file or format errors and 2 for
configuration errors (bad flags, missing paths).
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from pathlib import Path

from . import __version__
from .core import AmbiguityInventory, Lexicon, TaggerError, TagInventory, WindowSpec
from .corpus import AmbiguousText, corpus_stats, read_corpus, read_gold
from .evaluate import (
    TaggerConfig,
    accuracy,
    learning_curve,
    mean_curves,
    parameter_count,
    summarize,
    tag_text,
)
from .hmm import DEFAULT_ITERATIONS as HMM_ITERATIONS
from .report import emit, write_detail_csv
from .rules import read_rules
from .serialize import load_model, save_model
from .sw import DEFAULT_EPSILON, DEFAULT_ITERATIONS
from .synthetic import format_synthetic, generate_synthetic, read_synthetic

log = logging.getLogger("lswtagger")

DEFAULT_TAGGERS = "LSW(-1,+1),LSW(-1,+1)-No-Rules,SW(-1,+1),HMM"
LABEL_RE = re.compile(r"^(SW|LSW|HMM)(?:\(([^)]*)\))?(-No-Rules)?$", re.IGNORECASE)


class ConfigError(Exception):
    pass


def parse_tagger_label(label: str, rules, iterations: int | None, epsilon: float) -> TaggerConfig:
    """Build a config from a label such as ``LSW(-1,+1)-No-Rules`` or ``HMM``."""
    m = LABEL_RE.match(label.replace(" ", ""))
    if not m:
        raise ConfigError(f"cannot parse tagger label {label!r}")
    kind, window, no_rules = m.group(1).lower(), m.group(2), bool(m.group(3))
    if kind == "hmm" and window:
        raise ConfigError("HMM takes no window")
    spec = WindowSpec.parse(window) if window else (WindowSpec(1, 1) if kind != "hmm" else None)
    if kind == "sw":
        use_rules = None
    else:
        if not no_rules and rules is None:
            raise ConfigError(f"{label} needs --rules (or use {label}-No-Rules)")
        use_rules = None if no_rules else rules
    iters = iterations if iterations is not None else (HMM_ITERATIONS if kind == "hmm" else DEFAULT_ITERATIONS)
    return TaggerConfig(kind, spec, use_rules, iters, epsilon)


def _load_inventory(args) -> tuple[TagInventory, AmbiguityInventory, Lexicon]:
    tags = TagInventory.from_file(args.tagset)
    inv = AmbiguityInventory(tags)
    if tags.open_class:
        inv.open_class_id()
    lexicon = Lexicon.from_file(args.lexicon, inv)
    return tags, inv, lexicon


def _split_sentences(text: AmbiguousText, inv: AmbiguityInventory, delim: str | None) -> AmbiguousText:
    if not delim:
        return text
    try:
        tag_id = inv.tagset.id(delim)
    except KeyError as exc:
        raise ConfigError(str(exc)) from None
    cls = inv.lookup.get((tag_id,))
    return text if cls is None else text.split_at(cls)


def _require(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise ConfigError(f"{args.command} requires {', '.join(missing)}")


def cmd_train(args) -> int:
    _require(args, "tagset", "lexicon", "corpus", "model")
    if args.tagger == "hmm" and args.window is not None:
        raise ConfigError("--window applies only to the sw and lsw taggers")
    if args.tagger == "sw" and args.rules is not None:
        raise ConfigError("the SW tagger cannot use --rules")
    spec = None
    if args.tagger != "hmm":
        try:
            spec = WindowSpec.parse(args.window or "-1,+1")
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    tags, inv, lexicon = _load_inventory(args)
    rules = read_rules(args.rules, tags) if args.rules else None
    text = _split_sentences(read_corpus(args.corpus, lexicon), inv, args.sentence_delim)
    if len(text) == 0:
        raise TaggerError(f"{args.corpus}: corpus has no tokens")
    iters = args.iterations
    if iters is None:
        iters = HMM_ITERATIONS if args.tagger == "hmm" else DEFAULT_ITERATIONS
    model = TaggerConfig(args.tagger, spec, rules, iters, args.epsilon).train(text, inv)
    save_model(model, args.model)
    params, bound = parameter_count(model)
    log.info("trained %s on %d tokens: %d parameters (ceiling %d)", args.tagger, len(text), params, bound)
    return 0


def cmd_tag(args) -> int:
    _require(args, "tagset", "lexicon", "model", "corpus")
    tags = TagInventory.from_file(args.tagset)
    model = load_model(args.model, tags)
    lexicon = Lexicon.from_file(args.lexicon, model.inv)
    text = read_corpus(args.corpus, lexicon)
    pred = tag_text(model, _split_sentences(text, model.inv, args.sentence_delim))
    lines = []
    pos = 0
    for i, doc in enumerate(text.documents):
        if i:
            lines.append("")
        for _ in doc:
            lines.append(tags.name(pred[pos]))
            pos += 1
    body = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(body, encoding="utf-8")
    else:
        sys.stdout.write(body)
    return 0


def _print_rows(rows, as_json: bool, raw: dict | None = None) -> None:
    if as_json:
        print(json.dumps(raw, indent=2))
    else:
        for name, value in rows:
            print(f"{name}\t{value}")


def cmd_eval(args) -> int:
    _require(args, "tagset", "lexicon", "model", "gold")
    tags = TagInventory.from_file(args.tagset)
    model = load_model(args.model, tags)
    lexicon = Lexicon.from_file(args.lexicon, model.inv)
    gold = read_gold(args.gold, lexicon)
    pred = tag_text(model, _split_sentences(gold, model.inv, args.sentence_delim))
    rep = accuracy(pred, gold, model.inv)
    raw = dict(total=rep.total, correct=rep.correct, ambiguous_total=rep.ambiguous_total,
               ambiguous_correct=rep.ambiguous_correct, accuracy=rep.accuracy,
               ambiguous_accuracy=rep.ambiguous_accuracy)
    _print_rows(rep.rows(), args.json, raw)
    return 0


def cmd_stats(args) -> int:
    _require(args, "tagset", "lexicon")
    if (args.corpus is None) == (args.gold is None):
        raise ConfigError("stats needs exactly one of --corpus or --gold")
    _, inv, lexicon = _load_inventory(args)
    text = read_corpus(args.corpus, lexicon) if args.corpus else read_gold(args.gold, lexicon)
    st = corpus_stats(text, inv)
    raw = dict(words=st.words, ambiguity_classes=st.ambiguity_classes, ambiguity_rate=st.ambiguity_rate)
    _print_rows(st.rows(), args.json, raw)
    return 0


def _parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(float(s)) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"bad --sizes {text!r}") from None
    if not sizes or sizes != sorted(set(sizes)) or sizes[0] <= 0:
        raise ConfigError("--sizes must be positive and strictly increasing")
    return sizes


def cmd_sweep(args) -> int:
    _require(args, "output")
    sizes = _parse_sizes(args.sizes)
    formats = [f.strip() for f in args.format.split(",") if f.strip()]
    runs = []  # (seed, train, test, inv)
    if args.synth:
        if args.corpus or args.gold:
            raise ConfigError("use either --synth or --corpus/--gold")
        spec = read_synthetic(args.synth)
        inv = spec.inventory()
        rules = read_rules(args.rules, inv.tagset) if args.rules else spec.rules(inv.tagset)
        for i in range(args.seeds):
            seed = spec.seed + i
            _, train = generate_synthetic(spec.with_seed(seed).with_length(sizes[-1]), inv)
            test, _ = generate_synthetic(spec.with_seed(seed + 10_007).with_length(args.test_length), inv)
            runs.append((seed, train, test))
    else:
        _require(args, "tagset", "lexicon", "corpus", "gold")
        tags, inv, lexicon = _load_inventory(args)
        rules = read_rules(args.rules, tags) if args.rules else None
        train = _split_sentences(read_corpus(args.corpus, lexicon), inv, args.sentence_delim)
        test = read_gold(args.gold, lexicon)
        if sizes[-1] > len(train):
            raise ConfigError(f"largest size {sizes[-1]} exceeds the {len(train)}-token corpus")
        runs.append((None, train, test))
    taggers = _taggers_from(args.taggers, rules, args.iterations, args.epsilon)
    curves = []
    for seed, train, test in runs:
        log.info("sweep seed=%s: %d train / %d test tokens", seed, len(train), len(test))
        curves.extend(learning_curve(taggers, train, test, sizes, inv, seed=seed))
    merged = mean_curves(curves)
    prefix = Path(args.output)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    written = []
    for fmt in formats:
        kwargs = {} if fmt == "csv" else {"metric": args.metric}
        written.append(emit(merged, fmt, prefix.with_suffix("." + fmt), **kwargs))
    detail = prefix.with_name(prefix.name + ".detail.csv")
    write_detail_csv(curves, detail)
    written.append(detail)
    print("tagger\ttrain_tokens\taccuracy\tsd\tambiguous_accuracy\tsd\tparameters\tceiling")
    params = {(c.label, p.train_tokens): (p.parameters, p.bound) for c in merged for p in c.points}
    for s in summarize(curves):
        n, bound = params[s.label, s.train_tokens]
        print(f"{s.label}\t{s.train_tokens}\t{s.mean_accuracy:.4f}\t{s.std_accuracy:.4f}\t"
              f"{s.mean_ambiguous:.4f}\t{s.std_ambiguous:.4f}\t{n}\t{bound}")
    for path in written:
        log.info("wrote %s", path)
    return 0


def _taggers_from(text: str, rules, iterations, epsilon) -> list[TaggerConfig]:
    """Split a label list on commas outside parentheses and parse each label."""
    labels, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            labels.append(cur)
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    labels.append(cur)
    labels = [lab.strip() for lab in labels if lab.strip()]
    if not labels:
        raise ConfigError("--taggers is empty")
    try:
        return [parse_tagger_label(lab, rules, iterations, epsilon) for lab in labels]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_synth(args) -> int:
    _require(args, "language", "out_dir")
    spec = read_synthetic(args.language)
    if args.seed is not None:
        spec = spec.with_seed(args.seed)
    if args.length is not None:
        spec = spec.with_length(args.length)
    inv = spec.inventory()
    tags = inv.tagset
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _, train = generate_synthetic(spec, inv)
    test, _ = generate_synthetic(spec.with_seed(spec.seed + 10_007).with_length(args.test_length), inv)
    tags.write(out / "tagset.txt")
    spec.lexicon(inv).write(out / "lexicon.txt")
    spec.rules(tags).write(out / "rules.txt", tags)
    (out / "language.synth").write_text(format_synthetic(spec), encoding="utf-8")
    with open(out / "train.txt", "w", encoding="utf-8") as fh:
        fh.write("\n\n".join("\n".join(t.surface for t in doc) for doc in train.documents) + "\n")
    with open(out / "test.gold.txt", "w", encoding="utf-8") as fh:
        fh.write("\n\n".join("\n".join(f"{t.surface}\t{tags.name(t.gold)}" for t in doc)
                             for doc in test.documents) + "\n")
    log.info("wrote %d training and %d test tokens to %s", len(train), len(test), out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lswtagger", description="Sliding-window and HMM part-of-speech taggers "
                                "with unsupervised training and forbid/enforce rules.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, corpus=True):
        sp.add_argument("--tagset", help="tagset file: one tag per line, 'open:<tag>' for open-class tags")
        sp.add_argument("--lexicon", help="lexicon file: surface<TAB>tag1,tag2,...")
        if corpus:
            sp.add_argument("--corpus", help="corpus file: one token per line, blank line between documents")
        sp.add_argument("--sentence-delim", metavar="TAG",
                        help="also treat tokens whose class is exactly {TAG} as document boundaries")

    def training(sp):
        sp.add_argument("--iterations", type=int, default=None,
                        help=f"re-estimation passes (default {DEFAULT_ITERATIONS}; HMM {HMM_ITERATIONS})")
        sp.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON,
                        help="stop early when the largest relative change falls below this")

    sp = sub.add_parser("train", help="train a model on an untagged corpus")
    common(sp)
    sp.add_argument("--tagger", choices=["sw", "lsw", "hmm"], required=True)
    sp.add_argument("--window", help="context offsets, e.g. -1,+1 or -2,-1 (sw/lsw only; default -1,+1)")
    sp.add_argument("--rules", help="forbid/enforce rules file (lsw/hmm)")
    sp.add_argument("--model", help="output model file")
    training(sp)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("tag", help="tag a corpus with a trained model; prints one tag per token line")
    common(sp)
    sp.add_argument("--model", help="model file")
    sp.add_argument("--output", help="output file (default stdout)")
    sp.set_defaults(func=cmd_tag)

    sp = sub.add_parser("eval", help="score a model against a gold file")
    common(sp, corpus=False)
    sp.add_argument("--model", help="model file")
    sp.add_argument("--gold", help="gold file: surface<TAB>goldtag")
    sp.add_argument("--json", action="store_true", help="print JSON instead of tab-separated rows")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("stats", help="corpus statistics: words, ambiguity classes, ambiguity rate")
    common(sp)
    sp.add_argument("--gold", help="read a gold file instead of a corpus")
    sp.add_argument("--json", action="store_true", help="print JSON with exact values")
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("sweep", help="learning curves over training sizes and tagger settings")
    common(sp)
    sp.add_argument("--gold", help="gold test file (corpus mode)")
    sp.add_argument("--synth", help="synthetic language file (synthetic mode)")
    sp.add_argument("--seeds", type=int, default=5, help="synthetic mode: number of seeds (default 5)")
    sp.add_argument("--test-length", type=int, default=5000, help="synthetic mode: test tokens per seed")
    sp.add_argument("--rules", help="rules file (synthetic mode defaults to the language's own rules)")
    sp.add_argument("--taggers", default=DEFAULT_TAGGERS,
                    help=f"comma-separated tagger labels (default {DEFAULT_TAGGERS})")
    sp.add_argument("--sizes", default="1000,2000,5000,10000,20000,50000",
                    help="comma-separated, strictly increasing training sizes in tokens")
    sp.add_argument("--output", help="output path prefix; writes <prefix>.csv, .svg, .png and .detail.csv")
    sp.add_argument("--format", default="csv,svg,png", help="comma-separated subset of csv,svg,png,pdf")
    sp.add_argument("--metric", choices=["accuracy", "ambiguous_accuracy"], default="accuracy",
                    help="metric plotted in figures")
    training(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("synth", help="write a synthetic corpus, lexicon, tagset and rules")
    sp.add_argument("--language", help="synthetic language file (.synth)")
    sp.add_argument("--out-dir", help="output directory")
    sp.add_argument("--seed", type=int, help="override the language's seed")
    sp.add_argument("--length", type=int, help="override the training length")
    sp.add_argument("--test-length", type=int, default=5000, help="gold test tokens (default 5000)")
    sp.set_defaults(func=cmd_synth)
    return p


def _join_window_values(argv: list[str]) -> list[str]:
    # "--window -1,+1" would otherwise be read as an unknown option
    out = []
    it = iter(argv)
    for a in it:
        if a in ("--window", "--taggers"):
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = _join_window_values(list(sys.argv[1:] if argv is None else argv))
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        parser.error(str(exc))
    except (TaggerError, OSError) as exc:
        print(f"lswtagger: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
