"""Command-line frontend tying the library together.

Every subcommand emits a single RunReport (JSON or text per ``--format``)
and exits with:

* 0  -- a definite verdict was reached and the independent recomputation
        agreed (a refutation is a verdict too);
* 2  -- a resource or knowledge limit: a capped search, an unknown
        classification, or a mining run that found nothing;
* 1  -- internal error, including any disagreement between a module's
        claim and the recomputation from the primitive predicates;
* 64 -- command-line usage errors;
* 65 -- an input word or morphism file that does not parse.

Verdicts are never trusted from the producing module: each handler
re-derives its exit-code-relevant facts from ``is_squarefree``,
``subsequence`` and the morphism predicates before selecting a code.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from .constructors import (
    ContractionError,
    build_from_circular_morphism,
    build_large_pq_word,
    build_p6_word,
)
from .core_words import (
    check_word,
    is_squarefree,
    lex_least_squarefree,
    satisfies_star,
    subsequence,
)
from .morphisms import (
    apply as apply_morphism,
    bundled_morphism,
    crochemore_test,
    is_circular,
    load_morphism,
    modular_morphism,
)
from .recurrence_lab import LEMMA_FAMILIES, reproduce_lemma_constants
from .search import (
    _BUNDLED_MODULI,
    LIMIT_REACHED,
    TERMINATED,
    backtrack,
    classify_pair,
    count_words,
    mine_pansiot,
    verify_positive_morphism,
)


class UsageError(Exception):
    """Bad flags or argument values; mapped to exit code 64."""


class ParseFailure(Exception):
    """An input file that does not parse as a word or morphism; exit 65."""


@dataclass
class RunReport:
    """One structured record per CLI invocation.

    ``parameters`` echoes the parsed inputs (including the global flags),
    ``details`` carries the recomputed outputs, and ``timings`` maps phase
    names to wall-clock seconds.  The JSON form is the canonical textual
    serialization and round-trips; it is byte-stable for identical inputs
    apart from the timings block.
    """

    command: str
    parameters: dict
    verdict: str
    evidence_path: str | None = None
    timings: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls(**json.loads(text))

    def to_text(self) -> str:
        lines = [f"command: {self.command}"]
        for key in sorted(self.parameters):
            lines.append(f"  {key} = {self.parameters[key]}")
        lines.append(f"verdict: {self.verdict}")
        if self.evidence_path:
            lines.append(f"evidence: {self.evidence_path}")
        for key in sorted(self.details):
            lines.append(f"{key}: {self.details[key]}")
        for key in sorted(self.timings):
            lines.append(f"time[{key}]: {self.timings[key]:.3f}s")
        return "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep argparse from sys.exit()ing
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="sqfree-mod", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--format", choices=("json", "text"), default="text",
                        help="report emission format")
    parser.add_argument("--threads", type=int, default=1, metavar="N",
                        help="worker processes for search and counting")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    s = sub.add_parser("verify-lemma",
                       help="re-derive the bundled recurrence and "
                            "constructibility constants")
    s.add_argument("--all", action="store_true",
                   help="every family, plus the bundled-morphism sweep")
    s.add_argument("--name", action="append", default=[],
                   metavar="ID", help="one verification family (repeatable); "
                   f"known: {', '.join(LEMMA_FAMILIES)}")

    s = sub.add_parser("construct",
                       help="build a word square-free modulo p and q, "
                            "then re-verify it by independent scan")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--length", type=int, required=True)
    s.add_argument("--method", choices=("auto", "large", "circular", "p6"),
                   default="auto")
    s.add_argument("--seed", metavar="WORDFILE",
                   help="square-free prescription word (file, one word)")
    s.add_argument("--out", metavar="FILE", help="write the word here "
                   "instead of inlining it in the report")

    s = sub.add_parser("prove-negative",
                       help="exhaustive backtracking over one pair")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--max-len", type=int, default=10_000)
    s.add_argument("--node-cap", type=int, default=1_000_000_000)
    s.add_argument("--checkpoint", metavar="FILE")

    s = sub.add_parser("verify-morphism",
                       help="certify a morphism file for a pair of moduli")
    s.add_argument("--file", required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--q", type=int, required=True)

    s = sub.add_parser("classify", help="apply the known decision results")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--figures-dir", metavar="DIR",
                   help="also render the reference grid as a figure")

    s = sub.add_parser("mine", help="search for a certifying morphism by "
                       "pruning window codes")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--iterations", type=int, default=24)
    s.add_argument("--budget", type=int, default=400_000)

    s = sub.add_parser("count", help="count qualifying words by length")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--figures-dir", metavar="DIR",
                   help="also render the growth curve as a figure")

    s = sub.add_parser("verify-word",
                       help="independently re-check a word file")
    s.add_argument("--file", required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--q", type=int, required=True)

    return parser


def _parameters(ns: argparse.Namespace) -> dict:
    skip = {"command"}
    return {k: v for k, v in vars(ns).items() if k not in skip}


def _read_word_file(path: str) -> str:
    try:
        with open(path, encoding="ascii") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise ParseFailure(f"cannot read {path}: {exc}") from exc
    if len(lines) != 1:
        raise ParseFailure(f"{path}: expected exactly one word, "
                           f"found {len(lines)} nonempty lines")
    try:
        return check_word(lines[0])
    except ValueError as exc:
        raise ParseFailure(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# subcommand handlers; each returns (exit_code, RunReport)
# ---------------------------------------------------------------------------

def _cmd_verify_lemma(ns, data_dir):
    if not ns.all and not ns.name:
        raise UsageError("choose --all or at least one --name")
    unknown = [n for n in ns.name if n not in LEMMA_FAMILIES]
    if unknown:
        raise UsageError(f"unknown family {', '.join(unknown)}; known: "
                         f"{', '.join(LEMMA_FAMILIES)}")
    families = None if ns.all else ns.name
    t0 = time.perf_counter()
    lab = reproduce_lemma_constants(families)
    timings = dict(lab["timings"])
    details = {
        "checked": lab["checked"],
        "failures": lab["failures"],
    }
    ok = lab["ok"]
    if ns.all:
        t1 = time.perf_counter()
        rows = {}
        for p in _BUNDLED_MODULI:
            g = bundled_morphism(p, data_dir)
            k, alpha = g.meta["k"], g.meta["alpha"]
            row = {
                "uniform": g.uniform_length() == k * p,
                "circular": is_circular(g),
                "squarefree": bool(crochemore_test(g)),
                "slice-squarefree": bool(
                    crochemore_test(modular_morphism(g, alpha, p))),
            }
            rows[str(p)] = row
            ok = ok and all(row.values())
        details["bundled-morphisms"] = rows
        timings["bundled-morphisms"] = round(time.perf_counter() - t1, 3)
    timings["total"] = round(time.perf_counter() - t0, 3)
    verdict = "all-pass" if ok else "FAILED"
    return (0 if ok else 1), RunReport(
        command="verify-lemma", parameters=_parameters(ns), verdict=verdict,
        timings=timings, details=details)


def _pick_method(p: int, q: int, data_dir) -> str:
    lo, hi = min(p, q), max(p, q)
    if lo == 6 and hi >= 341:
        return "p6"
    if lo >= 331 and hi >= 364 and math.gcd(lo, hi) == 1:
        return "large"
    if lo in _BUNDLED_MODULI:
        g = bundled_morphism(lo, data_dir)
        if hi >= max(g.meta["q_min"], 19 * g.meta["k"] * lo):
            return "circular"
    raise UsageError(
        f"no bundled constructive route covers ({p}, {q}); "
        "try `classify` for the known status")


def _cmd_construct(ns, data_dir):
    p, q, length = ns.p, ns.q, ns.length
    if p < 1 or q < 1 or length < 1:
        raise UsageError("moduli and length must be positive")
    seed = _read_word_file(ns.seed) if ns.seed else None
    method = ns.method if ns.method != "auto" else _pick_method(p, q, data_dir)
    lo, hi = min(p, q), max(p, q)

    t0 = time.perf_counter()
    try:
        if method == "large":
            word = build_large_pq_word(p, q, length, s=seed)
        elif method == "p6":
            if lo != 6:
                raise ValueError("the p6 route needs one modulus equal to 6")
            n_targets = (length - 1) // hi + 1
            s = seed or lex_least_squarefree(n_targets + 2)
            t = lex_least_squarefree((length // 6 + 90) // 23 + 6,
                                     first=s[0])
            word = build_p6_word(hi, s, t, length)
        else:  # circular
            if lo not in _BUNDLED_MODULI:
                raise ValueError(f"no bundled morphism for modulus {lo}")
            g = bundled_morphism(lo, data_dir)
            n_targets = (length - 1) // hi + 1
            t = seed or lex_least_squarefree(n_targets + 2)
            word = build_from_circular_morphism(
                g, g.meta["k"], lo, g.meta["alpha"], hi, t, length)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    build_time = round(time.perf_counter() - t0, 3)

    # independent scan, straight from the primitive predicates
    t1 = time.perf_counter()
    scan = {
        "length": len(word) == length,
        "squarefree": is_squarefree(word),
        "mod-p-squarefree": is_squarefree(subsequence(word, p)),
        "mod-q-squarefree": is_squarefree(subsequence(word, q)),
    }
    scan_time = round(time.perf_counter() - t1, 3)
    ok = all(scan.values())

    details = {"method": method, "scan": scan, "word_length": len(word)}
    evidence_path = None
    if ns.out:
        with open(ns.out, "w", encoding="ascii") as fh:
            fh.write(word + "\n")
        evidence_path = ns.out
    else:
        details["word"] = word
    verdict = "constructed-and-verified" if ok else "FAILED independent scan"
    return (0 if ok else 1), RunReport(
        command="construct", parameters=_parameters(ns), verdict=verdict,
        evidence_path=evidence_path,
        timings={"build": build_time, "scan": scan_time}, details=details)


def _cmd_prove_negative(ns, data_dir):
    if ns.p < 1 or ns.q < 1:
        raise UsageError("moduli must be positive")
    t0 = time.perf_counter()
    try:
        out = backtrack(ns.p, ns.q, ns.max_len, ns.node_cap,
                        workers=ns.threads, checkpoint=ns.checkpoint)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    search_time = round(time.perf_counter() - t0, 3)

    w = out.longest
    recheck = (is_squarefree(w) and is_squarefree(subsequence(w, ns.p))
               and is_squarefree(subsequence(w, ns.q)))
    if out.terminated:
        # the recorded maximal word must be inextensible
        recheck = recheck and all(
            not (is_squarefree(w + a)
                 and is_squarefree(subsequence(w + a, ns.p))
                 and is_squarefree(subsequence(w + a, ns.q)))
            for a in "012")
    details = {
        "status": out.status,
        "longest_length": out.longest_length,
        "nodes_expanded": out.nodes_expanded,
        "witness_recheck": recheck,
    }
    if out.terminated:
        details["longest"] = out.longest
    if not recheck:
        return 1, RunReport(
            command="prove-negative", parameters=_parameters(ns),
            verdict="INTERNAL: witness failed the primitive recheck",
            timings={"search": search_time}, details=details)
    if out.terminated:
        verdict = (f"negative: no infinite word exists "
                   f"(tree exhausted after {out.nodes_expanded} nodes, "
                   f"longest word {out.longest_length})")
        code = 0
    else:
        verdict = (f"limit-reached: undecided at length "
                   f"{out.longest_length} after {out.nodes_expanded} nodes")
        code = 2
    return code, RunReport(
        command="prove-negative", parameters=_parameters(ns), verdict=verdict,
        evidence_path=ns.checkpoint, timings={"search": search_time},
        details=details)


def _cmd_verify_morphism(ns, data_dir):
    try:
        g = load_morphism(ns.file)
    except OSError as exc:
        raise ParseFailure(f"cannot read {ns.file}: {exc}") from exc
    except ValueError as exc:
        raise ParseFailure(f"{ns.file}: {exc}") from exc
    alpha = g.meta.get("alpha", 0)
    t0 = time.perf_counter()
    try:
        cert = verify_positive_morphism(g, ns.p, ns.q, alpha=alpha)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    cert_time = round(time.perf_counter() - t0, 3)

    details = {
        "alpha": alpha,
        "base": cert.base.ok,
        "mod-p": cert.mod_p.ok,
        "mod-q": cert.mod_q.ok,
    }
    for label, verdict in (("base", cert.base), ("mod-p", cert.mod_p),
                           ("mod-q", cert.mod_q)):
        if not verdict.ok:
            details[f"{label}-witness"] = verdict.witness

    # re-derive the claim on a concrete image instead of trusting the test
    t1 = time.perf_counter()
    t = lex_least_squarefree(120)
    w = apply_morphism(g, t)[alpha:]
    spot = (is_squarefree(w) and is_squarefree(subsequence(w, ns.p))
            and is_squarefree(subsequence(w, ns.q)))
    details["image_spot_check"] = spot
    spot_time = round(time.perf_counter() - t1, 3)
    timings = {"certificate": cert_time, "spot-check": spot_time}

    if cert.ok and not spot:
        return 1, RunReport(
            command="verify-morphism", parameters=_parameters(ns),
            verdict="INTERNAL: certificate passed but the image scan failed",
            timings=timings, details=details)
    verdict = "certified" if cert.ok else "refuted"
    return 0, RunReport(
        command="verify-morphism", parameters=_parameters(ns),
        verdict=verdict, timings=timings, details=details)


def _recheck_classification(report, data_dir) -> bool:
    """Re-derive the exit-code-relevant facts behind a PairReport."""
    lo, hi = min(report.p, report.q), max(report.p, report.q)
    kind = report.evidence_kind
    if kind == "negative-family":
        return (lo == 2 or hi == 2 or hi == 2 * lo or 3 * lo == 2 * hi)
    if kind == "terminated-search":
        from .search import NEGATIVE_SPORADIC
        return (lo, hi) in NEGATIVE_SPORADIC and report.table_status == "negative"
    if kind == "morphism-certificate":
        g = bundled_morphism(lo if lo > 1 else hi, data_dir)
        if lo == 1 or lo == hi:
            return bool(verify_positive_morphism(g, hi, 1,
                                                 alpha=g.meta["alpha"]))
        return (bool(crochemore_test(g))
                and bool(crochemore_test(modular_morphism(g, g.meta["alpha"],
                                                          lo)))
                and hi >= g.meta["q_min"])
    if kind == "theorem-threshold":
        return (hi == 1
                or (hi == 6 and lo in (1, 6))
                or (lo == 6 and hi >= 341)
                or (lo >= 331 and hi >= 364 and math.gcd(lo, hi) == 1))
    # theorem-citation and none carry no replayable claim to recheck
    return True


def _cmd_classify(ns, data_dir):
    if ns.p < 1 or ns.q < 1:
        raise UsageError("moduli must be positive")
    t0 = time.perf_counter()
    report = classify_pair(ns.p, ns.q, data_dir)
    t1 = time.perf_counter()
    recheck = _recheck_classification(report, data_dir)
    timings = {"classify": round(t1 - t0, 3),
               "recheck": round(time.perf_counter() - t1, 3)}
    details = dataclasses.asdict(report)
    details["recheck"] = recheck

    evidence_path = None
    if ns.figures_dir:
        evidence_path = _render_grid_figure(ns.figures_dir, data_dir,
                                            (ns.p, ns.q))
    if not recheck:
        return 1, RunReport(
            command="classify", parameters=_parameters(ns),
            verdict="INTERNAL: evidence failed the primitive recheck",
            evidence_path=evidence_path, timings=timings, details=details)
    code = 2 if report.verdict == "unknown" else 0
    return code, RunReport(
        command="classify", parameters=_parameters(ns),
        verdict=f"{report.verdict} ({report.evidence_kind})",
        evidence_path=evidence_path, timings=timings, details=details)


def _cmd_mine(ns, data_dir):
    t0 = time.perf_counter()
    try:
        g = mine_pansiot(ns.p, ns.q, iterations=ns.iterations,
                         word_budget=ns.budget)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    mine_time = round(time.perf_counter() - t0, 3)
    if g is None:
        return 2, RunReport(
            command="mine", parameters=_parameters(ns),
            verdict="nothing found within the budget",
            timings={"mine": mine_time})

    alpha = g.meta.get("alpha", 0)
    cert = verify_positive_morphism(g, ns.p, ns.q, alpha=alpha)
    t = lex_least_squarefree(60)
    w = apply_morphism(g, t)[alpha:]
    spot = (is_squarefree(w) and is_squarefree(subsequence(w, ns.p))
            and is_squarefree(subsequence(w, ns.q)))
    from .morphisms import dump_morphism
    details = {"alpha": alpha, "certificate": cert.ok,
               "image_spot_check": spot, "morphism": dump_morphism(g)}
    if not (cert.ok and spot):
        return 1, RunReport(
            command="mine", parameters=_parameters(ns),
            verdict="INTERNAL: mined morphism failed re-verification",
            timings={"mine": mine_time}, details=details)
    return 0, RunReport(
        command="mine", parameters=_parameters(ns),
        verdict=f"found a certified {g.uniform_length()}-uniform morphism",
        timings={"mine": mine_time}, details=details)


def _cmd_count(ns, data_dir):
    t0 = time.perf_counter()
    try:
        rep = count_words(ns.p, ns.q, ns.n, workers=ns.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    count_time = round(time.perf_counter() - t0, 3)

    # recount the short lengths with a direct enumeration
    t1 = time.perf_counter()
    from .core_words import squarefree_words
    agree = True
    for n in range(1, min(ns.n, 8) + 1):
        direct = sum(
            1 for w in squarefree_words(n)
            if is_squarefree(subsequence(w, ns.p))
            and is_squarefree(subsequence(w, ns.q)))
        agree = agree and direct == rep.counts[n - 1]
    recheck_time = round(time.perf_counter() - t1, 3)
    timings = {"count": count_time, "recheck": recheck_time}

    details = {"counts": list(rep.counts),
               "growth": [round(x, 6) for x in rep.growth],
               "recheck": agree}
    evidence_path = None
    if ns.figures_dir:
        evidence_path = _render_count_figure(ns.figures_dir, ns.p, ns.q, rep)
    if not agree:
        return 1, RunReport(
            command="count", parameters=_parameters(ns),
            verdict="INTERNAL: counts disagree with direct enumeration",
            evidence_path=evidence_path, timings=timings, details=details)
    return 0, RunReport(
        command="count", parameters=_parameters(ns),
        verdict=f"counted lengths 1..{ns.n}",
        evidence_path=evidence_path, timings=timings, details=details)


def _cmd_verify_word(ns, data_dir):
    if ns.p < 1 or ns.q < 1:
        raise UsageError("moduli must be positive")
    word = _read_word_file(ns.file)
    t0 = time.perf_counter()
    details = {
        "length": len(word),
        "squarefree": is_squarefree(word),
        "mod-p-squarefree": is_squarefree(subsequence(word, ns.p)),
        "mod-q-squarefree": is_squarefree(subsequence(word, ns.q)),
        "adjacent-multiples-differ": satisfies_star(word, ns.p, ns.q),
    }
    timings = {"scan": round(time.perf_counter() - t0, 3)}
    flags = [k for k in ("squarefree", "mod-p-squarefree", "mod-q-squarefree",
                         "adjacent-multiples-differ") if not details[k]]
    verdict = "all-true" if not flags else "violated: " + ", ".join(flags)
    return 0, RunReport(
        command="verify-word", parameters=_parameters(ns), verdict=verdict,
        timings=timings, details=details)


# ---------------------------------------------------------------------------
# optional figures
# ---------------------------------------------------------------------------

def _figure_axes(figures_dir: str):
    try:
        import matplotlib
    except ImportError as exc:
        raise UsageError(
            "--figures-dir needs matplotlib (install the [figures] extra)"
        ) from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    os.makedirs(figures_dir, exist_ok=True)
    return plt


def _render_grid_figure(figures_dir: str, data_dir, highlight) -> str:
    plt = _figure_axes(figures_dir)
    from .search import _reference_grid
    grid = _reference_grid(data_dir)
    m = grid["max_modulus"]
    level = {"positive": 0, "unknown": 1, "negative": 2}
    cells = [[level[grid["cells"][(p, q)]] for q in range(1, m + 1)]
             for p in range(1, m + 1)]
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.imshow(cells, origin="lower", extent=(0.5, m + 0.5, 0.5, m + 0.5),
              cmap="RdYlGn_r", vmin=0, vmax=2)
    p, q = highlight
    if max(p, q) <= m:
        ax.plot([q], [p], marker="o", markersize=12, mfc="none", mec="black")
    ax.set_xlabel("q")
    ax.set_ylabel("p")
    ax.set_title("reference grid: green positive, yellow unknown, red negative")
    path = os.path.join(figures_dir, "pair_grid.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def _render_count_figure(figures_dir: str, p: int, q: int, rep) -> str:
    plt = _figure_axes(figures_dir)
    lengths = range(1, len(rep.counts) + 1)
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6, 7), sharex=True)
    top.semilogy(lengths, [max(c, 0.5) for c in rep.counts], marker="o")
    top.set_ylabel("words")
    top.set_title(f"qualifying words for moduli ({p}, {q})")
    bottom.plot(lengths, rep.growth, marker=".")
    bottom.set_xlabel("length")
    bottom.set_ylabel("n-th root of the count")
    path = os.path.join(figures_dir, f"count_growth_p{p}_q{q}.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

_HANDLERS = {
    "verify-lemma": _cmd_verify_lemma,
    "construct": _cmd_construct,
    "prove-negative": _cmd_prove_negative,
    "verify-morphism": _cmd_verify_morphism,
    "classify": _cmd_classify,
    "mine": _cmd_mine,
    "count": _cmd_count,
    "verify-word": _cmd_verify_word,
}


def dispatch(argv=None) -> tuple[int, RunReport]:
    """Parse ``argv``, run the subcommand, and return (exit code, report)."""
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except UsageError as exc:
        return 64, RunReport(command="usage", parameters={},
                             verdict=f"usage error: {exc}")
    data_dir = os.environ.get("SQFREE_DATA_DIR") or None
    try:
        return _HANDLERS[ns.command](ns, data_dir)
    except UsageError as exc:
        return 64, RunReport(command=ns.command, parameters=_parameters(ns),
                             verdict=f"usage error: {exc}")
    except ParseFailure as exc:
        return 65, RunReport(command=ns.command, parameters=_parameters(ns),
                             verdict=f"parse failure: {exc}")
    except Exception as exc:  # the CLI must exit 1, not traceback
        return 1, RunReport(command=ns.command, parameters=_parameters(ns),
                            verdict=f"internal error: {exc!r}")


def main(argv=None) -> int:
    code, report = dispatch(argv)
    if report.parameters.get("format", "text") == "json":
        print(report.to_json())
    else:
        print(report.to_text())
    return code


if __name__ == "__main__":
    sys.exit(main())
