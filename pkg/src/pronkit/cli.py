"""Command-line interface.

Subcommands: gen-errors (synthetic mispronunciation corpora), train-pm,
score, eval, stress, probkit-demo. All outputs are machine readable (JSONL
or JSON plus a CSV curve), are written atomically, and are byte-identical
across runs for the same seed.

Exit codes: 64 for bad flags, 65 for validation failures, 66 for missing
or unreadable files, 2 when an evaluation has no positive labels.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .detector import DecisionMode, DetectorConfig
from .errorgen import PerturbConfig, perturb_sentence
from .errors import PronkitError
from .metrics import NoPositivesError
from .phonemes import PhonemeInventory, StressPattern, parse_phoneme_seq
from .pipeline import (
    SystemConfig,
    SystemVariant,
    WordScore,
    evaluate_scores,
    score_corpus,
    severity_breakdown,
)
from .pronmodel import PronunciationModel, train_pm
from .probkit import (
    DiscreteDistribution,
    GaussianBelief,
    RbfKernel,
    discrete_posterior,
    gaussian_posterior,
    gp_posterior,
)
from .recognizer import load_corpus, noisy_recognizer, oracle_recognizer
from .stress import detect_stress_errors, heuristic_stress_probs, load_syllable_features

EX_USAGE = 64
EX_DATAERR = 65
EX_NOINPUT = 66


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_inventory(args) -> PhonemeInventory:
    if getattr(args, "inventory", None):
        return PhonemeInventory.from_file(args.inventory)
    return PhonemeInventory.default()


def cmd_gen_errors(args) -> int:
    inventory = _load_inventory(args)
    corpus = load_corpus(args.in_path, inventory)
    lines = []
    n_phonemes = 0
    n_perturbed = 0
    n_flagged_words = 0
    n_words = 0
    for i, u in enumerate(corpus):
        cfg = PerturbConfig(
            inventory=inventory,
            p_replace=args.p_replace,
            p_insert=args.p_insert,
            p_delete=args.p_delete,
            seed=args.seed ^ i,
        )
        sp = perturb_sentence(u.sentence, cfg)
        n_phonemes += len(u.sentence.flattened)
        n_perturbed += sum(sp.perturbation.phoneme_labels)
        n_flagged_words += sum(sp.word_flags)
        n_words += len(u.sentence)
        words = []
        for k, (text, seq) in enumerate(u.sentence.words):
            w = {"text": text, "canonical": seq.to_text(), "label": sp.word_flags[k]}
            if u.word_votes is not None:
                w["votes"] = list(u.word_votes[k])
            words.append(w)
        record = {
            "id": u.id,
            "speaker": u.speaker,
            "words": words,
            "realized": sp.perturbation.perturbed.to_text(),
        }
        lines.append(json.dumps(record, sort_keys=True))
    _atomic_write_text(args.out, "".join(line + "\n" for line in lines))
    print(
        f"wrote {len(lines)} utterances: {n_perturbed}/{n_phonemes} phonemes perturbed "
        f"({n_perturbed / n_phonemes:.4f}), {n_flagged_words}/{n_words} words flagged"
        if n_phonemes
        else f"wrote {len(lines)} utterances"
    )
    return 0


def cmd_train_pm(args) -> int:
    inventory = _load_inventory(args)
    pairs = []
    with open(args.pairs, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                pairs.append(
                    (
                        parse_phoneme_seq(record["canonical"], inventory),
                        parse_phoneme_seq(record["realized"], inventory),
                    )
                )
            except (KeyError, ValueError) as exc:
                raise PronkitError(f"{args.pairs}:{lineno}: {exc}") from exc
    pm = train_pm(pairs, alpha=args.alpha, inventory=inventory)
    _atomic_write_text(args.out, json.dumps(pm.to_json_dict(), indent=2, sort_keys=True) + "\n")
    print(f"trained on {len(pairs)} pairs, wrote {args.out}")
    return 0


_PRODUCERS = ("oracle", "noisy")


def cmd_score(args) -> int:
    inventory = _load_inventory(args)
    corpus = load_corpus(args.in_path, inventory)
    if args.producer == "oracle":
        producer = oracle_recognizer()
    else:
        producer = noisy_recognizer(args.epsilon, args.concentration, args.seed)
    variant = SystemVariant(args.system)
    pm = None
    if variant is SystemVariant.PR_PM:
        if not args.pm:
            raise PronkitError("--system pr-pm requires --pm model.json")
        pm = PronunciationModel.load(args.pm, inventory)
    mode = DecisionMode.TOP_HYPOTHESIS if args.mode == "top" else DecisionMode.ALL_HYPOTHESES
    system = SystemConfig(
        variant=variant,
        detector=DetectorConfig(n_best=args.n, decision_mode=mode),
        pm=pm,
    )
    word_scores = score_corpus(corpus, producer, system)
    lines = [
        json.dumps({"id": ws.utterance_id, "word": ws.word_index, "e": round(ws.score, 9)})
        for ws in word_scores
    ]
    _atomic_write_text(args.out, "".join(line + "\n" for line in lines))
    print(f"scored {len(word_scores)} words from {len(corpus)} utterances")
    return 0


def cmd_eval(args) -> int:
    inventory = _load_inventory(args)
    corpus = load_corpus(args.labels, inventory)
    label_of = {}
    votes_of = {}
    for u in corpus:
        for k in range(len(u.sentence)):
            label_of[(u.id, k)] = u.label_of_word(k)
            votes_of[(u.id, k)] = u.word_votes[k] if u.word_votes is not None else None
    scores = []
    labels = []
    keys = []
    with open(args.scores, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            record = json.loads(line)
            key = (record["id"], int(record["word"]))
            if key not in label_of:
                raise PronkitError(f"{args.scores}:{lineno}: no such word in labels: {key}")
            if label_of[key] is None:
                continue
            keys.append(key)
            scores.append(float(record["e"]))
            labels.append(label_of[key])
    if not scores:
        raise PronkitError("no labeled scores to evaluate")
    try:
        report = evaluate_scores(scores, labels, system="scores", anchor_recall=args.recall_anchor)
    except NoPositivesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if any(votes_of[k] is not None for k in keys):
        word_scores = [
            WordScore(k[0], k[1], "", s, y) for k, s, y in zip(keys, scores, labels)
        ]
        report.severity_breakdown = severity_breakdown(
            word_scores,
            [votes_of[k] for k in keys],
            anchor_recall=args.recall_anchor,
            target_prevalence=args.severity_match,
            seed=args.seed,
        )
    _atomic_write_text(args.out, json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n")
    curve_lines = ["recall,precision,threshold"]
    curve_lines += [f"{r:.10g},{p:.10g},{t:.10g}" for r, p, t in report.curve.points]
    _atomic_write_text(args.curve, "".join(line + "\n" for line in curve_lines))
    print(
        f"auc={report.auc:.4f} precision={report.precision:.4f} "
        f"at recall={report.achieved_recall:.4f} (threshold={report.threshold:.6g})"
    )
    return 0


def cmd_stress(args) -> int:
    features = load_syllable_features(args.features)
    canonical_flags = []
    for token in args.canonical.split():
        if token not in ("0", "1"):
            raise PronkitError(f"canonical pattern tokens must be 0 or 1, got {token!r}")
        canonical_flags.append(token == "1")
    canonical = StressPattern(tuple(canonical_flags))
    probs = heuristic_stress_probs(features)
    flags = detect_stress_errors(canonical, probs, args.t)
    print(
        json.dumps(
            {
                "probs": [round(float(p), 9) for p in probs],
                "estimated": [int(i == int(np.argmax(probs))) for i in range(len(probs))],
                "canonical": [int(f) for f in canonical],
                "flags": list(flags),
            }
        )
    )
    return 0


def cmd_probkit_demo(args) -> int:
    if args.demo == "coin":
        prior = DiscreteDistribution(("biased", "fair"), (0.5, 0.5))
        cpt = {
            "biased": DiscreteDistribution(("heads", "tails"), (0.6, 0.4)),
            "fair": DiscreteDistribution(("heads", "tails"), (0.5, 0.5)),
        }
        posterior = discrete_posterior(prior, cpt, "heads")
        out = {
            "evidence": "heads",
            "posterior": dict(zip(posterior.outcomes, posterior.probs)),
        }
    elif args.demo == "gaussian":
        post = gaussian_posterior(GaussianBelief(0.0, 1.0), 1.0, [2.0])
        out = {"prior": {"mean": 0.0, "variance": 1.0}, "observations": [2.0],
               "posterior": {"mean": post.mean, "variance": post.variance}}
    else:
        train_x = [0.0, 1.0, 2.0]
        train_y = [0.5, 1.0, 0.25]
        kernel = RbfKernel(variance=1.0, lengthscale=1.0)
        queries = [0.5, 1.5, 3.0]
        posterior = [
            dict(zip(("mean", "variance"), gp_posterior(train_x, train_y, kernel, 0.1, q)))
            for q in queries
        ]
        out = {"train_x": train_x, "train_y": train_y, "queries": queries,
               "posterior": posterior}
    print(json.dumps(out, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pronkit", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-errors", help="perturb canonical phonemes into a labeled corpus")
    p.add_argument("--in", dest="in_path", required=True, help="input corpus JSONL")
    p.add_argument("--out", required=True, help="output corpus JSONL")
    p.add_argument("--p-replace", type=float, default=0.2)
    p.add_argument("--p-insert", type=float, default=0.0)
    p.add_argument("--p-delete", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inventory", help="phoneme inventory table")
    p.set_defaults(func=cmd_gen_errors)

    p = sub.add_parser("train-pm", help="train the pronunciation model from aligned pairs")
    p.add_argument("--pairs", required=True, help="JSONL with canonical/realized fields")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--out", required=True, help="output model JSON")
    p.add_argument("--inventory")
    p.set_defaults(func=cmd_train_pm)

    p = sub.add_parser("score", help="score per-word mispronunciation probabilities")
    p.add_argument("--in", dest="in_path", required=True, help="corpus JSONL")
    p.add_argument("--producer", choices=_PRODUCERS, default="oracle")
    p.add_argument("--epsilon", type=float, default=0.1, help="noisy producer confusion rate")
    p.add_argument("--concentration", type=float, default=1.0,
                   help="noisy producer posterior sharpness")
    p.add_argument("--system", choices=[v.value for v in SystemVariant], default="pr-pm")
    p.add_argument("--pm", help="pronunciation model JSON (pr-pm only)")
    p.add_argument("--n", type=int, default=4, help="hypotheses per utterance")
    p.add_argument("--mode", choices=["all", "top"], default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output scores JSONL")
    p.add_argument("--inventory")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="evaluate scores against a labeled corpus")
    p.add_argument("--scores", required=True, help="scores JSONL from `score`")
    p.add_argument("--labels", required=True, help="labeled corpus JSONL")
    p.add_argument("--recall-anchor", type=float, default=0.4)
    p.add_argument("--out", required=True, help="report JSON")
    p.add_argument("--curve", required=True, help="PR curve CSV")
    p.add_argument("--severity-match", type=float, default=None,
                   help="down-sample negatives per band to this positive prevalence")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inventory")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stress", help="detect lexical stress errors for one word")
    p.add_argument("--features", required=True, help="per-syllable feature CSV")
    p.add_argument("--canonical", required=True, help="expected pattern, e.g. '1 0'")
    p.add_argument("--t", type=float, default=0.5, help="decision threshold")
    p.set_defaults(func=cmd_stress)

    p = sub.add_parser("probkit-demo", help="run a worked Bayes/GP example")
    p.add_argument("--demo", choices=["coin", "gaussian", "gp"], default="coin")
    p.set_defaults(func=cmd_probkit_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_NOINPUT
    except IsADirectoryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_NOINPUT
    except (PronkitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_DATAERR


if __name__ == "__main__":
    sys.exit(main())
