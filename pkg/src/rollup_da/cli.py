"""Command-line harness for the experiment tables and the simulator.

Exit codes: 0 on success, 1 on I/O failure, 2 on bad arguments.  All
randomness hangs off --seed (or the ROLLUP_SIM_SEED environment variable),
so repeated invocations with the same flags produce identical bytes.
"""

import argparse
import json
import os
import sys

from . import experiments
from . import sim


def _parse_list(text, cast):
    try:
        return tuple(cast(tok) for tok in text.split(",") if tok != "")
    except ValueError:
        raise argparse.ArgumentTypeError("bad list value: %r" % text)


def _int_list(text):
    return _parse_list(text, int)


def _float_list(text):
    return _parse_list(text, float)


def _default_seed():
    env = os.environ.get("ROLLUP_SIM_SEED")
    return int(env) if env else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rollup-da",
        description="data-availability protocol experiments and simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=_default_seed())
        p.add_argument("--trials", type=int, default=2000)
        p.add_argument("--out", help="write the table here instead of stdout")
        p.add_argument("--json", action="store_true", help="emit JSON, not CSV")

    p = sub.add_parser("detect", help="deletion detection probability table")
    common(p)
    p.add_argument("--s", type=_int_list, default=experiments.DEFAULT_DETECT_S,
                   help="comma-separated challenge counts")
    p.add_argument("--p", type=_float_list, default=experiments.DEFAULT_DETECT_P,
                   help="comma-separated deleted fractions")

    p = sub.add_parser("recover", help="partial-storage recovery table")
    common(p)
    p.add_argument("--n", type=_int_list, default=(20, 50, 100))
    p.add_argument("--k", type=_int_list, default=(2, 5, 10))
    p.add_argument("--f", type=_float_list, default=(0.0, 0.3, 0.5))

    p = sub.add_parser("pol", help="collusion difficulty-ratio table")
    common(p)
    p.add_argument("--a", type=_float_list, default=experiments.DEFAULT_POL_A)
    p.add_argument("--fractions", type=_float_list,
                   default=experiments.DEFAULT_POL_FRACTIONS)
    p.add_argument("--proposers", type=int, default=1000)

    p = sub.add_parser("cost", help="response size: reveal vs constant stub")
    common(p)
    p.add_argument("--sizes", type=_int_list,
                   default=(1, 64, 256, 1024, 4096, 16384, 65536, 262144, 1048576))

    p = sub.add_parser("simulate", help="run the protocol simulator")
    common(p)
    p.add_argument("--config", help="JSON file with simulator settings")
    p.add_argument("--rounds", type=int, default=50)
    p.add_argument("--builders", type=int, default=4)
    p.add_argument("--proposers", type=int, default=8)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--chain-out", help="write the block dump (JSON lines) here")
    p.add_argument("--srs-out",
                   help="write the run's reference string here, so the exact "
                        "commitment parameters travel with the config")
    return parser


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_table(args, table):
    _emit(table.to_json() + "\n" if args.json else table.to_csv(), args.out)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "detect":
            table = experiments.exp_detect(args.s, args.p, trials=args.trials,
                                           seed=args.seed)
            _run_table(args, table)
        elif args.command == "recover":
            table = experiments.exp_recover(args.n, args.k, args.f,
                                            trials=args.trials, seed=args.seed)
            _run_table(args, table)
        elif args.command == "pol":
            table, diagnostics = experiments.exp_pol(
                args.a, args.fractions, n_proposers=args.proposers,
                trials=args.trials, seed=args.seed)
            if args.json:
                payload = json.loads(table.to_json())
                payload["diagnostics"] = {
                    "rows_monotone": {str(k): v for k, v in
                                      diagnostics["rows_monotone"].items()}}
                _emit(json.dumps(payload, sort_keys=True) + "\n", args.out)
            else:
                _emit(table.to_csv(), args.out)
        elif args.command == "cost":
            table, crossover = experiments.exp_cost(args.sizes)
            if args.json:
                payload = json.loads(table.to_json())
                payload["crossover_part_size"] = crossover
                _emit(json.dumps(payload, sort_keys=True) + "\n", args.out)
            else:
                text = table.to_csv()
                text += "# crossover_part_size,%s\n" % (crossover,)
                _emit(text, args.out)
        elif args.command == "simulate":
            if args.config:
                with open(args.config) as fh:
                    config = sim.SimConfig.from_json(fh.read())
            else:
                config = sim.SimConfig(rounds=args.rounds,
                                       n_builders=args.builders,
                                       n_proposers=args.proposers,
                                       k=args.k, seed=args.seed)
            world = sim.make_world(config)
            world.run()
            if args.chain_out:
                with open(args.chain_out, "w") as fh:
                    fh.write(world.chain_dump())
            if args.srs_out:
                from .kzg import serialize_srs
                with open(args.srs_out, "wb") as fh:
                    fh.write(serialize_srs(world.pod_keys.pk))
            _emit(world.metrics.to_json() + "\n", args.out)
    except OSError as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
