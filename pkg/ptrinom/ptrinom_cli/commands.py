"""Subcommands of the ptrinom command line.

Exit codes: 0 on success, 1 when an asserted expectation fails, 2 on usage
errors and 3 when a field is too large for the requested check.
"""

import argparse
import contextlib
import json
import logging
import sys
from typing import Callable, Dict, Iterator, List, Optional, Sequence, TextIO

from ptrinom.criteria import hou_disagreements
from ptrinom.equivalence import classify_inequivalent, frac_equivalent
from ptrinom.families import (
    FRACTIONAL_FAMILIES,
    FamilySpec,
    FracClaim,
    get_family,
    instantiate,
    verify_family,
)
from ptrinom.field import (
    UnsupportedField,
    build_extension,
    build_field,
    trace_identity_failures,
)
from ptrinom.perm import (
    FULL_FIELD_LIMIT,
    EngineDisagreement,
    FieldTooLarge,
    crossvalidate_lemma1,
)
from ptrinom.poly import DegenerateInstance, DenominatorVanishes, parse_frac
from ptrinom.ptrinom_cli import reports
from ptrinom.ptrinom_cli.config import (
    DEFAULT_FORMAT,
    DEFAULT_L_RANGE,
    DEFAULT_MODE,
    DEFAULT_SEED,
    FORMATS,
    MODES,
    WORKERS_ENV,
    RunConfig,
    parse_ids,
    parse_range,
)
from ptrinom.search import SearchSpace, novelty_filter, oracle_hits, search_space
from ptrinom.solvers import (
    cubic_oracle_mismatches,
    quadratic_char2,
    quadratic_oracle_mismatches,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3


@contextlib.contextmanager
def _output(path: Optional[str]) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as stream:
            yield stream
        logger.info("Wrote %s", path)


def _dump(document, path: Optional[str]) -> None:
    with _output(path) as stream:
        json.dump(document, stream, indent=2)
        stream.write("\n")


def run_verify(config: RunConfig) -> int:
    """Verifies each family over the k and l ranges and writes the reports."""
    if not config.families:
        raise ValueError("verify needs at least one --family.")
    specs = [get_family(family_id) for family_id in config.families]
    all_reports = []
    for spec in specs:
        if config.mode in ("full", "both"):
            for k in config.k_range:
                if spec.char ** (2 * k) > FULL_FIELD_LIMIT:
                    raise FieldTooLarge(
                        f"F_{spec.char ** (2 * k)} exceeds {FULL_FIELD_LIMIT} "
                        f"elements; use --mode lemma1."
                    )
        if isinstance(spec, FracClaim):
            mode = "fraction"
        else:
            mode = config.mode
        all_reports.extend(verify_family(
            spec, config.k_range, config.l_range, mode,
            negative=config.negative, workers=config.workers,
            progress=config.progress,
        ))

    with _output(config.out) as stream:
        reports.write_reports(all_reports, stream, config.format)
    failed = [report for report in all_reports if not report.passed]
    degenerate = sum(report.degenerate for report in all_reports)
    logger.info(
        "%d instances checked, %d degenerate, %d failed",
        len(all_reports), degenerate, len(failed)
    )
    return EXIT_FAILED if failed else EXIT_OK


def run_search(config: RunConfig) -> int:
    """Sweeps candidates, partitions hits by novelty and writes them as JSON."""
    if len(config.k_range) != 1:
        raise ValueError("search takes a single --k.")
    k = config.k_range[0]
    space = SearchSpace.default(config.p, k, config.signs)
    if config.r_range is not None:
        space = SearchSpace(config.p, k, config.r_range, space.signs)
    result = search_space(space, workers=config.workers, progress=config.progress)
    ctx = build_field(config.p, k)
    explained, unexplained = novelty_filter(result.hits, None, ctx)

    agrees = None
    if config.oracle:
        if ctx.order > FULL_FIELD_LIMIT:
            raise FieldTooLarge(f"{ctx} is too large for the full-field oracle.")
        agrees = oracle_hits(space, progress=config.progress) == result.hits
        if not agrees:
            logger.error("Search hits differ from the full-field oracle over %s", ctx)

    with _output(config.out) as stream:
        reports.write_hits(result, explained, unexplained, stream, agrees)
    return EXIT_FAILED if agrees is False else EXIT_OK


def run_classify(config: RunConfig) -> int:
    """Groups family instances at one (k, l) into equivalence classes.

    Displayed fractions are compared pointwise on mu_{q+1} as well, so
    coincidences between fractions of inequivalent trinomials show up.
    """
    k, l = config.k_range[0], config.l_range[0]
    ids = config.families or tuple(family.value for family in FRACTIONAL_FAMILIES)
    specs: List[FamilySpec] = [get_family(family_id) for family_id in ids]
    if any(isinstance(spec, FracClaim) for spec in specs):
        raise ValueError("classify takes trinomial families only.")
    chars = {spec.char for spec in specs}
    if len(chars) != 1:
        raise ValueError("classify needs families of one characteristic.")
    ctx = build_field(chars.pop(), k)

    members, labels, skipped = [], [], []
    for spec in specs:
        try:
            members.append(instantiate(spec, k, l))
            labels.append(spec.id.value)
        except DegenerateInstance:
            skipped.append(spec.id.value)
    classes = classify_inequivalent(ctx, members)

    fracs = [(spec.id.value, spec.display_frac) for spec in specs if spec.frac]
    fracs += [(text, parse_frac(text)) for text in config.fracs]
    coincidences = []
    for i, (first_label, first) in enumerate(fracs):
        for second_label, second in fracs[i + 1:]:
            try:
                witness = frac_equivalent(ctx, first, second)
            except DenominatorVanishes:
                continue
            if witness is not None:
                coincidences.append(
                    {"first": first_label, "second": second_label, "d": witness.d}
                )

    document = {
        "p": ctx.p,
        "k": k,
        "l": l,
        "q": ctx.q,
        "classes": [
            {
                "representative": str(cls.representative),
                "members": [
                    {"family": labels[i], "trinomial": str(members[i]), "d": d}
                    for i, d in sorted(cls.witnesses.items())
                ],
            }
            for cls in classes
        ],
        "fraction_coincidences": coincidences,
        "degenerate": skipped,
    }
    _dump(document, config.out)
    logger.info(
        "%d families fall into %d classes over %s", len(members), len(classes), ctx
    )
    return EXIT_OK


def emit_table(config: RunConfig) -> int:
    """Writes the trinomial table as CSV, one row per family in TABLE_ROWS."""
    with _output(config.out) as stream:
        reports.write_table(stream)
    return EXIT_OK


def run_solve(config: RunConfig) -> int:
    """Checks the quadratic and cubic criteria over F_{2^n} for n in --n.

    With --quadratic U,V only that equation is solved, over F_{2^n} for the
    first n.
    """
    if config.quadratics:
        ctx = build_extension(2, config.k_range[0])
        u, v = (int(x) for x in config.quadratics[0].split(","))
        roots = quadratic_char2(ctx, u, v)
        _dump({"n": ctx.n, "u": u, "v": v, "count": roots.count,
               "roots": roots.roots}, config.out)
        return EXIT_OK

    results = []
    for n in config.k_range:
        ctx = build_extension(2, n)
        quadratic = quadratic_oracle_mismatches(ctx)
        cubic = cubic_oracle_mismatches(ctx)
        results.append({
            "n": n,
            "quadratic": [list(pair) for pair in quadratic],
            "cubic_unique": [list(pair) for pair in cubic["unique"]],
            "cubic_dichotomy": [list(pair) for pair in cubic["dichotomy"]],
        })
    _dump({"fields": results}, config.out)
    failed = any(
        item["quadratic"] or item["cubic_unique"] or item["cubic_dichotomy"]
        for item in results
    )
    return EXIT_FAILED if failed else EXIT_OK


def run_crosscheck(config: RunConfig) -> int:
    """Compares the reduction engine with full enumeration on random triples."""
    results = []
    for k in config.k_range:
        ctx = build_field(config.p, k)
        if ctx.order > FULL_FIELD_LIMIT:
            raise FieldTooLarge(f"{ctx} is too large for the full-field check.")
        mismatches = crossvalidate_lemma1(
            ctx, config.samples, config.seed, config.progress
        )
        results.append({
            "field": str(ctx),
            "samples": config.samples,
            "mismatches": [
                {"r": r, "h": str(h), "d": d} for r, h, d in mismatches
            ],
        })
    _dump({"seed": config.seed, "fields": results}, config.out)
    return EXIT_FAILED if any(item["mismatches"] for item in results) else EXIT_OK


def run_hou(config: RunConfig) -> int:
    """Enumerates the (a, b) where the Hou criterion and brute force differ."""
    results = []
    for k in config.k_range:
        ctx = build_field(3, k)
        flagged = hou_disagreements(ctx, config.progress)
        results.append({
            "q": ctx.q,
            "pairs": ctx.order ** 2,
            "flagged": [
                {
                    "a": item.a,
                    "b": item.b,
                    "brute_force": item.brute_force,
                    "condition": item.condition,
                    "discriminant": item.discriminant,
                }
                for item in flagged
            ],
        })
    _dump({"fields": results}, config.out)
    return EXIT_OK


def run_identities(config: RunConfig) -> int:
    """Checks the trace power identities over F_{3^{2k}}."""
    results = []
    for k in config.k_range:
        ctx = build_field(3, k)
        failures = trace_identity_failures(ctx)
        results.append({
            "field": str(ctx),
            "failures": {str(e): count for e, count in failures.items()},
        })
    _dump({"fields": results}, config.out)
    failed = any(any(item["failures"].values()) for item in results)
    return EXIT_FAILED if failed else EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "verify": run_verify,
    "search": run_search,
    "classify": run_classify,
    "table": emit_table,
    "solve": run_solve,
    "crosscheck": run_crosscheck,
    "hou": run_hou,
    "identities": run_identities,
}


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="Output file (default stdout).")
    parser.add_argument(
        "--workers", type=int, default=None,
        help=f"Worker processes (default ${WORKERS_ENV} or 1)."
    )
    parser.add_argument("--progress", action="store_true", help="Show progress bars.")
    parser.add_argument(
        "-v", "--verbose", dest="verbosity", action="count", default=0,
        help="-v for INFO, -vv for DEBUG."
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptrinom",
        description="Verify, classify and search permutation trinomials over F_{q^2}.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    verify = subparsers.add_parser("verify", help="Verify trinomial families.")
    verify.add_argument(
        "--family", dest="families", type=parse_ids, required=True,
        help="Comma separated family ids, e.g. th3,tab1."
    )
    verify.add_argument("--k", dest="k_range", type=parse_range, required=True)
    verify.add_argument(
        "--l", dest="l_range", type=parse_range,
        default=parse_range(DEFAULT_L_RANGE),
        help=f"Range of l (default {DEFAULT_L_RANGE})."
    )
    verify.add_argument(
        "--mode", choices=MODES, default=DEFAULT_MODE,
        help=f"Check to run (default {DEFAULT_MODE})."
    )
    verify.add_argument(
        "--format", choices=FORMATS, default=DEFAULT_FORMAT,
        help=f"Report format (default {DEFAULT_FORMAT})."
    )
    verify.add_argument(
        "--negative", action="store_true",
        help="Also check instances whose conditions fail."
    )
    _common(verify)

    search = subparsers.add_parser("search", help="Search x^r h(x^{q-1}) trinomials.")
    search.add_argument("--p", type=int, default=2)
    search.add_argument("--k", dest="k_range", type=parse_range, required=True)
    search.add_argument(
        "--signs", choices=("plus", "all"), default=None,
        help="Sign choices (default plus for p = 2, all for p = 3)."
    )
    search.add_argument("--r", dest="r_range", type=parse_range, default=None)
    search.add_argument(
        "--oracle", action="store_true",
        help="Confirm the hits by full-field checks."
    )
    _common(search)

    classify = subparsers.add_parser("classify", help="Classify family instances.")
    classify.add_argument("--family", dest="families", type=parse_ids, default=None)
    classify.add_argument("--k", dest="k_range", type=parse_range, default=(4,))
    classify.add_argument("--l", dest="l_range", type=parse_range, default=(0,))
    classify.add_argument(
        "--frac", dest="fracs", action="append", default=[],
        help="Extra fraction such as (x^5+x^4+x)/(x^4+x+1) to compare."
    )
    _common(classify)

    table = subparsers.add_parser("table", help="Emit the trinomial table as CSV.")
    _common(table)

    solve = subparsers.add_parser("solve", help="Check the char 2 solvers.")
    solve.add_argument(
        "--n", dest="k_range", type=parse_range, default=parse_range("1..6"),
        help="Degrees n of F_{2^n} (default 1..6)."
    )
    solve.add_argument(
        "--quadratic", dest="quadratics", action="append", default=[],
        metavar="U,V", help="Solve x^2 + U x + V = 0 for element indices U, V."
    )
    _common(solve)

    crosscheck = subparsers.add_parser(
        "crosscheck", help="Compare the reduction engine with full enumeration."
    )
    crosscheck.add_argument("--p", type=int, default=2)
    crosscheck.add_argument("--k", dest="k_range", type=parse_range, required=True)
    crosscheck.add_argument("--samples", type=int, default=500)
    crosscheck.add_argument(
        "--seed", type=int, default=DEFAULT_SEED,
        help=f"Random seed (default {DEFAULT_SEED})."
    )
    _common(crosscheck)

    hou = subparsers.add_parser("hou", help="Sweep the Hou criterion, q = 3^k.")
    hou.add_argument("--k", dest="k_range", type=parse_range, default=(1, 2))
    _common(hou)

    identities = subparsers.add_parser(
        "identities", help="Check trace power identities, q = 3^k."
    )
    identities.add_argument(
        "--k", dest="k_range", type=parse_range, default=(1, 2, 3)
    )
    _common(identities)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbosity)
    try:
        config = RunConfig.from_args(args)
    except ValueError as error:
        parser.error(str(error))

    try:
        return COMMANDS[config.command](config)
    except (FieldTooLarge, UnsupportedField) as error:
        logger.error("%s", error)
        print(f"ptrinom: {error}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except EngineDisagreement as error:
        logger.error("%s", error)
        return EXIT_FAILED
    except ValueError as error:
        print(f"ptrinom {config.command}: error: {error}", file=sys.stderr)
        return EXIT_USAGE
