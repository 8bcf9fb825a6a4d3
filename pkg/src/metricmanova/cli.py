"""Command-line front end.

Commands: ``test`` runs selected tests on a dataset file, ``simulate``
generates and saves a scenario dataset, ``power`` sweeps a parameter grid and
reports rejection rates, and ``demo-correlation`` contrasts the centered and
non-centered correlation on five illustrative bivariate shapes.

Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 numerical
degeneracy.  All randomness flows from ``--seed``; rerunning a command with
the same arguments produces byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from typing import List, Optional

import numpy as np

from .dataset import load_msd, save_msd
from .errors import DataError, DegenerateDataError
from .estimators import frechet_correlation
from .inference import TEST_NAMES, run_tests
from .rng import derive_rng, spawn_seed
from .samples import GroupedMultiSample, distance_profile
from .simulation import (
    SCENARIO1_STUDIES,
    SCENARIO2_STUDIES,
    Scenario1Params,
    Scenario2Params,
    estimate_rejection_rates,
    gen_scenario1,
    gen_scenario2,
    scenario_generator,
    study_grid,
)
from .spaces import euclidean_space


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 instead of argparse's default 2
        raise _UsageError(message)


def _fmt(x) -> str:
    return repr(float(x))


def build_parser() -> _Parser:
    parser = _Parser(prog="metricmanova", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    test = sub.add_parser("test", help="run tests on a .msd dataset")
    test.add_argument("--input", required=True, help="dataset file (.msd)")
    test.add_argument("--tests", default=",".join(TEST_NAMES),
                      help="comma list of tests (default: all seven)")
    test.add_argument("--alpha", type=float, default=0.05)
    test.add_argument("--B", type=int, default=500, help="permutation count")
    test.add_argument("--seed", type=int, required=True)
    test.add_argument("--ridge", action="store_true",
                      help="ridge-repair near-singular matrices in R statistics")
    test.add_argument("--out", default=None, help="output path (default: stdout)")
    test.add_argument("--format", choices=("json", "csv"), default="json")

    sim = sub.add_parser("simulate", help="generate and save a scenario dataset")
    sim.add_argument("--scenario", type=int, choices=(1, 2), required=True)
    sim.add_argument("--study", type=int, required=True)
    sim.add_argument("--effect", type=float, default=None,
                     help="study parameter value (default: the null value)")
    sim.add_argument("--n1", type=int, default=100)
    sim.add_argument("--n2", type=int, default=100)
    sim.add_argument("--nodes", type=int, default=10, help="scenario-2 node count")
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--out", required=True, help="output dataset path")

    power = sub.add_parser("power", help="rejection-rate sweep over a study grid")
    power.add_argument("--scenario", type=int, choices=(1, 2), required=True)
    power.add_argument("--study", type=int, required=True)
    power.add_argument("--grid", type=int, default=9, help="number of grid points")
    power.add_argument("--nsims", type=int, required=True)
    power.add_argument("--B", type=int, default=500)
    power.add_argument("--alpha", type=float, default=0.05)
    power.add_argument("--tests", default=",".join(TEST_NAMES))
    power.add_argument("--n1", type=int, default=100)
    power.add_argument("--n2", type=int, default=100)
    power.add_argument("--nodes", type=int, default=10)
    power.add_argument("--seed", type=int, required=True)
    power.add_argument("--out", default=None)
    power.add_argument("--format", choices=("json", "csv"), default="csv")

    demo = sub.add_parser("demo-correlation",
                          help="centered vs non-centered correlation demo")
    demo.add_argument("--n", type=int, default=200)
    demo.add_argument("--seed", type=int, required=True)
    demo.add_argument("--out", default=None)
    demo.add_argument("--format", choices=("json", "csv"), default="json")

    return parser


def _parse_tests(arg: str) -> List[str]:
    names = [t.strip() for t in arg.split(",") if t.strip()]
    if not names:
        raise _UsageError("no tests selected")
    for name in names:
        if name not in TEST_NAMES:
            raise _UsageError(f"unknown test {name!r}; choose from {', '.join(TEST_NAMES)}")
    return names


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _json_payload(config: dict, key: str, rows) -> str:
    return json.dumps({"config": config, key: rows}, indent=2, sort_keys=True)


def _csv_text(config: dict, header: List[str], rows: List[List[str]]) -> str:
    lines = [f"# {k}={config[k]}" for k in sorted(config)]
    lines.append(",".join(header))
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def _cmd_test(args) -> int:
    names = _parse_tests(args.tests)
    ms = load_msd(args.input)
    reports = run_tests(names, ms, alpha=args.alpha, B=args.B, seed=args.seed,
                        ridge=args.ridge)
    config = {
        "command": "test", "input": args.input, "tests": ",".join(names),
        "alpha": args.alpha, "B": args.B, "seed": args.seed,
        "ridge": args.ridge, "format": args.format,
    }
    if args.format == "json":
        _emit(_json_payload(config, "reports", [asdict(r) for r in reports]), args.out)
    else:
        rows = []
        for r in reports:
            for c in r.components:
                rows.append([
                    r.test_name, c.name, _fmt(c.statistic),
                    "" if c.p_value is None else _fmt(c.p_value),
                    "" if c.threshold is None else _fmt(c.threshold),
                    _fmt(c.level), str(c.reject), str(r.global_reject),
                ])
        header = ["test", "component", "statistic", "p_value", "threshold",
                  "level", "component_reject", "global_reject"]
        _emit(_csv_text(config, header, rows), args.out)
    return 0


def _null_value(scenario: int, study: int) -> float:
    table = SCENARIO1_STUDIES if scenario == 1 else SCENARIO2_STUDIES
    if study not in table:
        raise _UsageError(f"scenario {scenario} has no study {study}")
    return table[study][3]


def _cmd_simulate(args) -> int:
    effect = args.effect if args.effect is not None else _null_value(args.scenario, args.study)
    if args.scenario == 1:
        params = Scenario1Params.from_effect(args.study, effect, n1=args.n1, n2=args.n2)
        ms = gen_scenario1(params, args.seed)
    else:
        params = Scenario2Params.from_effect(
            args.study, effect, nodes=args.nodes, n1=args.n1, n2=args.n2
        )
        ms = gen_scenario2(params, args.seed)
    save_msd(args.out, ms)
    return 0


def _cmd_power(args) -> int:
    names = _parse_tests(args.tests)
    _null_value(args.scenario, args.study)  # validates the study id
    grid = study_grid(args.scenario, args.study, args.grid)
    estimates = []
    for gi, value in enumerate(grid):
        gen = scenario_generator(
            args.scenario, args.study, float(value),
            n1=args.n1, n2=args.n2, nodes=args.nodes,
        )
        estimates.extend(
            estimate_rejection_rates(
                names, gen, args.nsims, alpha=args.alpha, B=args.B,
                seed=spawn_seed(args.seed, gi), parameter=float(value),
            )
        )
    config = {
        "command": "power", "scenario": args.scenario, "study": args.study,
        "grid": args.grid, "nsims": args.nsims, "B": args.B,
        "alpha": args.alpha, "tests": ",".join(names),
        "n1": args.n1, "n2": args.n2, "nodes": args.nodes,
        "seed": args.seed, "format": args.format,
    }
    if args.format == "json":
        _emit(_json_payload(config, "estimates", [asdict(e) for e in estimates]), args.out)
    else:
        rows = [
            [e.test_name, _fmt(e.parameter), _fmt(e.rate), _fmt(e.mc_se), str(e.nsims)]
            for e in estimates
        ]
        header = ["test", "parameter", "rate", "mc_se", "nsims"]
        _emit(_csv_text(config, header, rows), args.out)
    return 0


def demo_correlation_table(seed: int, n: int = 200) -> List[dict]:
    """Centered vs non-centered correlation on five bivariate shapes.

    X1 is uniform on (0, 1); X2 is a noisy linear, negative-linear, V-shaped,
    or inverted-V function of X1, or independent uniform.  Both variables live
    in one-dimensional Euclidean space under the L1 metric.  Illustrative
    only.
    """
    shapes = {
        1: "linear",
        2: "negative-linear",
        3: "v-shaped",
        4: "inverted-v",
        5: "independent",
    }
    out = []
    for k, shape in shapes.items():
        rng = derive_rng(seed, k)
        x1 = rng.uniform(0.0, 1.0, n)
        noise = rng.uniform(-0.05, 0.05, n)
        if k == 1:
            x2 = x1 + noise
        elif k == 2:
            x2 = 1.0 - x1 + noise
        elif k == 3:
            x2 = 2.0 * np.abs(x1 - 0.5) + noise
        elif k == 4:
            x2 = 1.0 - 2.0 * np.abs(x1 - 0.5) + noise
        else:
            x2 = rng.uniform(0.0, 1.0, n)
        ms = GroupedMultiSample(
            [
                euclidean_space("X1", x1[:, None], norm="L1"),
                euclidean_space("X2", x2[:, None], norm="L1"),
            ],
            np.zeros(n, dtype=int),
        )
        prof = distance_profile(ms, "per-group").values
        out.append(
            {
                "scenario": k,
                "shape": shape,
                "noncentered": frechet_correlation(prof[:, 0], prof[:, 1], "noncentered"),
                "centered": frechet_correlation(prof[:, 0], prof[:, 1], "centered"),
            }
        )
    return out


def _cmd_demo(args) -> int:
    rows = demo_correlation_table(args.seed, args.n)
    config = {"command": "demo-correlation", "n": args.n, "seed": args.seed,
              "format": args.format}
    if args.format == "json":
        _emit(_json_payload(config, "correlations", rows), args.out)
    else:
        table = [
            [str(r["scenario"]), r["shape"], _fmt(r["noncentered"]), _fmt(r["centered"])]
            for r in rows
        ]
        _emit(_csv_text(config, ["scenario", "shape", "noncentered", "centered"], table),
              args.out)
    return 0


_COMMANDS = {
    "test": _cmd_test,
    "simulate": _cmd_simulate,
    "power": _cmd_power,
    "demo-correlation": _cmd_demo,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except DegenerateDataError as exc:
        sys.stderr.write(f"numerical degeneracy: {exc}\n")
        return 3
    except (DataError, ValueError) as exc:
        sys.stderr.write(f"data error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"file error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
