"""``rmm`` command line.

Exit codes: 0 success, 1 usage or input error, 2 verification mismatch.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .bench import MODES, BenchMismatch, BenchScenario, run_bench
from .decomp import rebuild_decompositions
from .dynamic import apply_arrival, check_after_arrival
from .instance import InstanceError, format_matching, parse_events, parse_instance, vid_name
from .oracle import OracleLimitError, brute_popular, brute_rmm_signature, brute_update_paths
from .popular import NoPopularMatching, format_popular, iter_popular_stream, parse_preference_events, parse_preferences, popular_solve
from .static import RmmState, rmm_solve

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Mismatch(Exception):
    pass


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}") from None


def _dump_phases(state: RmmState, directory: str) -> None:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    width = len(str(state.r))
    for i in range(1, state.r + 1):
        (out / f"phase-{i:0{width}d}.txt").write_text(state.describe_phase(i))


def cmd_solve(args) -> int:
    inst = parse_instance(_read(args.instance))
    state = rmm_solve(inst, reverse=args.reverse)
    sys.stdout.write(format_matching(inst, state.matching))
    if args.dump_phases:
        _dump_phases(state, args.dump_phases)
    return EXIT_OK


def cmd_stream(args) -> int:
    inst = parse_instance(_read(args.instance))
    events = parse_events(_read(args.events))
    state = rmm_solve(inst)
    grown = inst
    for k, ev in enumerate(events):
        grown = grown.with_arrival(ev)
        if args.check_only:
            ok = check_after_arrival(state, ev)
            print(f"event {k} {ev.vertex}: {'unchanged' if ok else 'changed'}")
        n_r, path, trace = apply_arrival(state, ev, inplace=True)
        state = rebuild_decompositions(state, trace, n_r)
        if not args.check_only:
            print(f"event {k} {ev.vertex}: signature {state.signature.padded(grown.max_rank)}")
        if args.emit_paths:
            print(f"  path {path.kind.value} {len(path)}: {path}")
        if args.verify:
            ref = rmm_solve(grown)
            r = grown.max_rank
            if tuple(ref.signature.padded(r)) != tuple(state.signature.padded(r)):
                raise _Mismatch(f"event {k}: signature {state.signature} != recomputed {ref.signature}")
            if ref.label_table() != state.label_table():
                bad = next(v for v, row in ref.label_table().items() if state.label_table().get(v) != row)
                raise _Mismatch(f"event {k}: labels of {vid_name(bad)} differ from the recomputed ones")
    if not args.check_only:
        sys.stdout.write(format_matching(grown, state.matching))
    if args.dump_phases:
        _dump_phases(state, args.dump_phases)
    return EXIT_OK


def cmd_popular(args) -> int:
    pref = parse_preferences(_read(args.prefs))
    sys.stdout.write(format_popular(pref, popular_solve(pref)))
    return EXIT_OK


def cmd_popular_stream(args) -> int:
    pref = parse_preferences(_read(args.prefs))
    events = parse_preference_events(_read(args.events))
    last = None
    for k, (ev, ps) in enumerate(iter_popular_stream(pref, events)):
        verdict = "none" if isinstance(ps.matching, NoPopularMatching) else f"{len(ps.matching)} matched"
        how = "incremental" if ps.incremental else "rebuilt"
        print(f"event {k} {ev.vertex}: {verdict} ({how})")
        last = ps
    if last is not None:
        sys.stdout.write(format_popular(last.reduction.pref, last.matching))
    else:
        sys.stdout.write(format_popular(pref, popular_solve(pref)))
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.what == "signature":
        inst = parse_instance(_read(args.file))
        sig, m = brute_rmm_signature(inst)
        sys.stdout.write(format_matching(inst, m))
    elif args.what == "paths":
        if not args.events:
            raise InstanceError("'oracle paths' needs an events file")
        inst = parse_instance(_read(args.file))
        ev = parse_events(_read(args.events))[0]
        paths = brute_update_paths(inst.with_arrival(ev), rmm_solve(inst).matching, ev.vid)
        for p in sorted(paths, key=lambda p: (len(p), p)):
            print(f"{len(p) - 1}: " + " ".join(vid_name(v) for v in p))
    else:
        pref = parse_preferences(_read(args.file))
        pops = brute_popular(pref, pref.post_count)
        print(f"popular matchings: {len(pops)}")
        for m in pops:
            print(" ".join(f"a{a}-p{p}" for a, p in sorted(m.items())) or "(empty)")
    return EXIT_OK


def _bench_one(sc: BenchScenario):
    rep = run_bench(sc)
    return rep.to_csv(), rep.format_summary()


def cmd_bench(args) -> int:
    scenarios = [
        BenchScenario(args.n, args.posts, args.r, args.density, args.events, seed, args.mode) for seed in args.seed
    ]
    if args.jobs > 1 and len(scenarios) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_bench_one, scenarios))
    else:
        results = [_bench_one(sc) for sc in scenarios]
    out = Path(args.out)
    for sc, (text, summary) in zip(scenarios, results):
        target = out if len(scenarios) == 1 else out.with_name(f"{out.stem}.seed{sc.seed}{out.suffix}")
        target.write_text(text)
        print(f"seed={sc.seed} {summary} -> {target}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rmm", description="Rank-maximal matchings, static and under vertex arrivals.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="compute a rank-maximal matching")
    s.add_argument("instance")
    s.add_argument("--dump-phases", metavar="DIR")
    s.add_argument("--reverse", action="store_true", help="visit vertices in decreasing id order")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("stream", help="process arrival events incrementally")
    s.add_argument("instance")
    s.add_argument("events")
    s.add_argument("--check-only", action="store_true", help="report whether each arrival changes the optimum")
    s.add_argument("--emit-paths", action="store_true")
    s.add_argument("--verify", action="store_true", help="recompute from scratch after each event and compare")
    s.add_argument("--dump-phases", metavar="DIR", help="phase files of the final instance")
    s.set_defaults(func=cmd_stream)

    s = sub.add_parser("popular", help="popular matching of strict preferences")
    s.add_argument("prefs")
    s.set_defaults(func=cmd_popular)

    s = sub.add_parser("popular-stream", help="maintain a popular matching under arrivals")
    s.add_argument("prefs")
    s.add_argument("events")
    s.set_defaults(func=cmd_popular_stream)

    s = sub.add_parser("oracle", help="brute-force answers for small inputs (debugging aid)")
    s.add_argument("what", choices=("signature", "paths", "popular"))
    s.add_argument("file")
    s.add_argument("events", nargs="?")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("bench", help="update versus recompute benchmark")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--posts", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--density", type=float, required=True)
    s.add_argument("--events", type=int, required=True)
    s.add_argument("--seed", type=int, action="append", required=True, help="repeatable; one scenario per seed")
    s.add_argument("--mode", choices=MODES, default="both")
    s.add_argument("--out", required=True)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (_Mismatch, BenchMismatch) as exc:
        print(f"rmm: mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (InstanceError, OracleLimitError) as exc:
        print(f"rmm: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
