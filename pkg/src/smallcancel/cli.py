"""Command-line front end.

Exit codes: 0 clean, 1 findings or counterexamples, 2 input error.  Query
commands (``wicks``, ``power``, ``dehn``) answer and exit 0; check
commands exit 1 when a gate fails, a bound is violated or a scan finds a
counterexample.  ``--report-dir`` on the checking commands writes the raw
rows as CSV next to rendered PNG figures.
"""

from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import report as reporting
from .dehn import dehn_reduce
from .motions import (
    build_bus_motion,
    carcrash_check,
    detect_collisions,
    dump_motion,
    random_motion,
    validate_motion,
)
from .presentations import (
    load_presentation,
    max_piece_ratio,
    symmetrize,
    torsion_free_surrogate,
)
from .surface_maps import (
    SurfaceMap,
    WeightScheme,
    build_one_face_map,
    build_scheme,
    build_wicks_torus,
    parse_map,
    weight_test,
)
from .words import CyclicWord, Word, is_proper_power, wicks_commutator_test
from .workbench import scan_free_group, scan_presentation


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smallcancel",
        description="workbench for small cancellation groups: word algebra, "
        "Dehn reduction, curvature weights, car motions and theorem scans",
    )
    sub = parser.add_subparsers(required=True, metavar="COMMAND")

    p = sub.add_parser(
        "check-presentation",
        help="piece ratio, torsion gate and symmetrized size of a presentation",
    )
    p.add_argument("presentation", help="presentation file")
    p.set_defaults(handler=cmd_check_presentation)

    p = sub.add_parser("wicks", help="graphical commutator test for a cyclic word")
    p.add_argument("word")
    p.set_defaults(handler=cmd_wicks)

    p = sub.add_parser("power", help="write a word as a proper power if possible")
    p.add_argument("word")
    p.set_defaults(handler=cmd_power)

    p = sub.add_parser("dehn", help="reduce a word with Dehn's algorithm")
    p.add_argument("--presentation", required=True, help="presentation file")
    p.add_argument("--trace", action="store_true", help="print each cancellation")
    p.add_argument("word")
    p.set_defaults(handler=cmd_dehn)

    p = sub.add_parser(
        "weight-test",
        help="exercise the curvature identity sum = 2*chi on corpus maps",
    )
    p.add_argument("--map", help="map file (default: a built-in corpus)")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--rule",
        choices=["random", "lemma1", "lemma2"],
        default="random",
        help="random rational weights, or one of the two lemma schemes",
    )
    p.add_argument("--report-dir")
    p.set_defaults(handler=cmd_weight_test)

    p = sub.add_parser(
        "carcrash",
        help="run a periodic motion and check the complete-collision bound",
    )
    p.add_argument("--map", help="map file")
    p.add_argument(
        "--wicks",
        help="build the one-hole torus reading x y z x' y' z' from 'x,y,z'",
    )
    p.add_argument("--cars", type=int, default=1, help="cars per face")
    p.add_argument("--word", help="drive buses reading this word on the hole")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dump", action="store_true", help="print motion breakpoints")
    p.add_argument("--report-dir")
    p.set_defaults(handler=cmd_carcrash)

    p = sub.add_parser("scan-free", help="power-commutator scan in a free group")
    p.add_argument("--gens", type=int, required=True)
    p.add_argument("--maxlen", type=int, required=True)
    p.add_argument("--n", required=True, help="powers, e.g. 2..3 or 2,3")
    p.add_argument("--verbose", action="store_true")
    p.add_argument("--report-dir")
    p.set_defaults(handler=cmd_scan_free)

    p = sub.add_parser("scan", help="power-commutator scan in a presented group")
    p.add_argument("--presentation", required=True, help="presentation file")
    p.add_argument("--maxlen", type=int, required=True)
    p.add_argument("--witness-len", type=int, required=True)
    p.add_argument("--n", required=True, help="powers, e.g. 2..3 or 2,3")
    p.add_argument("--verbose", action="store_true")
    p.add_argument("--report-dir")
    p.set_defaults(handler=cmd_scan)

    return parser


def _parse_powers(text: str) -> list[int]:
    if ".." in text:
        lo, _, hi = text.partition("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",")]


def cmd_check_presentation(args) -> int:
    p = load_presentation(args.presentation)
    s = symmetrize(p)
    ratio = max_piece_ratio(s)
    torsion_free = torsion_free_surrogate(s)
    print(f"generators: {p.generator_count}")
    print(f"relators: {len(p.relators)}")
    print(f"symmetrized size: {len(s)}")
    print(f"piece ratio lambda* = {ratio}")
    print(f"torsion-free surrogate: {'passes' if torsion_free else 'FAILS'}")
    dehn_ok = ratio < Fraction(1, 6)
    print(f"dehn gate (lambda* < 1/6): {'passes' if dehn_ok else 'FAILS'}")
    return 0 if (torsion_free and dehn_ok) else 1


def cmd_wicks(args) -> int:
    w = CyclicWord.parse(args.word)
    dec = wicks_commutator_test(w)
    if dec is None:
        print(f"{w}: no rotation has the commutator shape x y z x' y' z'")
    else:
        print(f"{w}: commutator")
        print(f"  x = {dec.x or '1'}, y = {dec.y or '1'}, z = {dec.z or '1'}")
        print(f"  witness [{dec.u or '1'}, {dec.v or '1'}] reads a rotation of it")
    return 0


def cmd_power(args) -> int:
    w = Word.parse(args.word)
    hit = is_proper_power(w)
    if hit is None:
        print(f"{w or '1'}: not a proper power")
    else:
        root, k = hit
        print(f"{w} = ({root})^{k}")
    return 0


def cmd_dehn(args) -> int:
    s = symmetrize(load_presentation(args.presentation))
    w = Word.parse(args.word)
    terminal, trace = dehn_reduce(w, s, with_trace=True)
    if args.trace:
        for step in trace.steps:
            print(f"cancel {step.relator} conjugated by {step.conjugator or '1'}")
    if len(terminal) == 0:
        print(f"{w or '1'}: trivial")
    else:
        print(f"{w or '1'}: reduces to {terminal} (not trivial)")
    return 0


def _weight_corpus() -> list[tuple[str, SurfaceMap]]:
    return [
        (
            "wicks-torus-abc",
            build_wicks_torus(Word.parse("a"), Word.parse("b"), Word.parse("c")),
        ),
        ("wicks-torus-ab", build_wicks_torus(Word.parse("a"), Word.parse("b"), Word())),
        ("one-face-abAB2", build_one_face_map(CyclicWord.parse("abAB"), 2)),
        ("sphere-wedge", SurfaceMap([(0, 1, 2, 3)], [(0, 1), (2, 3)], holes={0})),
    ]


def cmd_weight_test(args) -> int:
    if args.map:
        maps = [(Path(args.map).name, parse_map(Path(args.map).read_text()))]
    else:
        maps = _weight_corpus()

    trials: list[tuple[str, int, Fraction, int]] = []
    if args.rule == "random":
        rng = random.Random(args.seed)
        for t in range(args.trials):
            name, m = maps[t % len(maps)]
            scheme = WeightScheme(
                {
                    c: Fraction(rng.randrange(-24, 25), rng.randrange(1, 13))
                    for c in m.corners()
                }
            )
            result = weight_test(m, scheme)
            trials.append((name, t, result.total, 2 * m.euler_characteristic()))
    else:
        for t, (name, m) in enumerate(maps):
            result = weight_test(m, build_scheme(m, args.rule))
            trials.append((name, t, result.total, 2 * m.euler_characteristic()))
            curvatures = ", ".join(
                f"face {f}: {k}" for f, k in sorted(result.face_curvatures.items())
            )
            print(f"{name}: {curvatures}")

    bad = [t for t in trials if t[2] != t[3]]
    for name, t, total, expected in bad:
        print(f"{name} trial {t}: total {total} != 2*chi = {expected}")
    print(
        f"curvature identity: {len(trials) - len(bad)}/{len(trials)} trials "
        f"match 2*chi exactly"
    )
    if args.report_dir:
        for path in reporting.weight_report(args.report_dir, trials):
            print(f"wrote {path}")
    return 1 if bad else 0


def _carcrash_map(args) -> SurfaceMap:
    if args.map and args.wicks:
        raise ValueError("give either --map or --wicks, not both")
    if args.map:
        return parse_map(Path(args.map).read_text())
    if args.wicks:
        parts = args.wicks.split(",")
        if len(parts) == 2:
            parts.append("")
        if len(parts) != 3:
            raise ValueError("--wicks needs 'x,y' or 'x,y,z'")
        return build_wicks_torus(*(Word.parse(p) for p in parts))
    raise ValueError("a map is required: --map FILE or --wicks x,y,z")


def cmd_carcrash(args) -> int:
    m = _carcrash_map(args)
    if args.word:
        w = CyclicWord.parse(args.word)
        (hole,) = m.holes
        perimeter = len(m.faces[hole])
        n, rem = divmod(perimeter, len(w))
        if rem:
            raise ValueError(
                f"hole boundary length {perimeter} is no multiple of |w| = {len(w)}"
            )
        motion = build_bus_motion(m, w, n)
        print(f"bus motion: {n} cars reading {w} on the hole, period {len(w)}")
    else:
        motion = random_motion(m, args.cars, random.Random(args.seed))
        print(f"random motion: {args.cars} cars per face, period 1, seed {args.seed}")

    failures = 0
    check = validate_motion(m, motion)
    for finding in check.findings:
        print(f"invalid motion: {finding}")
        failures += 1

    report = detect_collisions(m, motion)
    for p in report.points:
        times = ", ".join(str(t) for t in p.times)
        status = "complete" if p.complete else "incomplete"
        print(
            f"{p.where}: {p.cars_present} of {p.degree} cars at t = {times} "
            f"({status})"
        )
    result = carcrash_check(m, motion)
    verdict = "satisfied" if result.satisfied else "VIOLATED"
    print(
        f"complete collisions: {result.complete_count}, "
        f"bound chi + sum(d-1) = {result.bound}: {verdict}"
    )
    if not result.satisfied:
        failures += 1

    if args.dump:
        sys.stdout.write(dump_motion(m, motion))
    if args.report_dir:
        rows = dump_motion(m, motion)
        for path in reporting.carcrash_report(args.report_dir, motion, report, rows):
            print(f"wrote {path}")
    return 1 if failures else 0


def cmd_scan_free(args) -> int:
    result = scan_free_group(args.gens, args.maxlen, _parse_powers(args.n))
    sys.stdout.write(result.render(verbose=args.verbose))
    if args.report_dir:
        for path in reporting.scan_report_files(args.report_dir, result, args.verbose):
            print(f"wrote {path}")
    return 0 if result.clean else 1


def cmd_scan(args) -> int:
    p = load_presentation(args.presentation)
    result = scan_presentation(
        p, args.maxlen, args.witness_len, _parse_powers(args.n)
    )
    sys.stdout.write(result.render(verbose=args.verbose))
    if args.report_dir:
        for path in reporting.scan_report_files(args.report_dir, result, args.verbose):
            print(f"wrote {path}")
    return 0 if result.clean else 1


if __name__ == "__main__":
    sys.exit(main())
