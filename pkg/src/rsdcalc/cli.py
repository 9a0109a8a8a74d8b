"""``rsd`` command line.

Exit status: 0 success, 2 bad input (syntax, validation, unknown identifier,
unreadable file, bad flags), 3 instance too large for the DP, 4 brute force
refused by the enumeration cap.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from rsdcalc import assignment, generate, oracle, voting
from rsdcalc.errors import (
    CapacityError,
    EnumerationCapError,
    ProfileError,
    RSDError,
    UnknownIdentifierError,
)
from rsdcalc.profiles import (
    AssignmentProfile,
    FractionalAssignment,
    Lottery,
    VotingProfile,
    contract_alternative_types,
    parse_assignment_profile,
    parse_voting_profile,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CAPACITY = 3
EXIT_CAP = 4


@dataclass
class RunConfig:
    command: str
    path: Optional[str] = None
    algorithm: str = "dp"
    alternative: Optional[str] = None
    agent: Optional[str] = None
    house: Optional[str] = None
    output: str = "text"
    decimals: Optional[int] = None
    samples: Optional[int] = None
    seed: int = 0
    cap: int = oracle.DEFAULT_CAP
    setting: Optional[str] = None
    algos: tuple[str, ...] = ("dp",)
    repeat: int = 3
    agents: Optional[int] = None
    items: Optional[int] = None
    types: Optional[int] = None

    def __post_init__(self) -> None:
        if self.algorithm == "mc" and self.samples is None:
            raise ValueError("--algo mc requires --samples")
        if self.samples is not None and self.samples < 1:
            raise ValueError("--samples must be at least 1")
        if self.decimals is not None and self.decimals < 1:
            raise ValueError("--decimals must be at least 1")
        if self.repeat < 1:
            raise ValueError("--repeat must be at least 1")


# --------------------------------------------------------------------------
# rendering


def fraction_text(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def decimal_text(x: Fraction, places: int) -> str:
    scaled = round(x * 10**places)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def fraction_json(x: Fraction) -> dict[str, str]:
    return {"num": str(x.numerator), "den": str(x.denominator)}


def fraction_from_json(obj: dict[str, str]) -> Fraction:
    return Fraction(int(obj["num"]), int(obj["den"]))


def _cell(x: Fraction, config: RunConfig) -> str:
    if config.decimals is None:
        return fraction_text(x)
    return f"{fraction_text(x)} {decimal_text(x, config.decimals)}"


def _entry(x: Fraction, config: RunConfig, **labels) -> dict:
    entry = dict(labels, probability=fraction_json(x))
    if config.decimals is not None:
        entry["decimal"] = decimal_text(x, config.decimals)
    return entry


def _envelope(config: RunConfig, setting: str, n: int, m: int, result: list) -> str:
    payload = {"setting": setting, "algorithm": config.algorithm, "n": n, "m": m, "result": result}
    return json.dumps(payload, indent=2)


# --------------------------------------------------------------------------
# commands


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _lottery(profile: VotingProfile, config: RunConfig) -> Lottery:
    if config.algorithm == "brute":
        return oracle.brute_force_lottery(profile, cap=config.cap)
    if config.algorithm == "mc":
        return oracle.monte_carlo_estimate(profile, config.samples, config.seed)
    return voting.rsd_lottery(profile)


def _single_vote(profile: VotingProfile, alternative: str, config: RunConfig) -> Fraction:
    if alternative not in profile.alternatives:
        raise UnknownIdentifierError(f"unknown alternative {alternative!r}")
    if config.algorithm != "dp":
        return _lottery(profile, config)[alternative]
    simplified, mapping = contract_alternative_types(profile)
    for sid, group in mapping.super_alternatives:
        if alternative in group:
            return voting.rsd_probability(simplified, sid) / len(group)
    raise AssertionError("contraction lost an alternative")


def run_vote(config: RunConfig) -> str:
    profile = parse_voting_profile(_read_text(config.path))
    if config.alternative is not None:
        items = [(config.alternative, _single_vote(profile, config.alternative, config))]
    else:
        items = list(_lottery(profile, config).items())
    if config.output == "json":
        result = [_entry(p, config, alternative=a) for a, p in items]
        return _envelope(config, "vote", profile.n, profile.m, result)
    if config.alternative is not None:
        return _cell(items[0][1], config)
    return "\n".join(f"{a} {_cell(p, config)}" for a, p in items)


def _matrix(profile: AssignmentProfile, config: RunConfig) -> FractionalAssignment:
    if config.algorithm == "brute":
        return oracle.brute_force_matrix(profile, cap=config.cap)
    if config.algorithm == "mc":
        return oracle.monte_carlo_estimate(profile, config.samples, config.seed)
    return assignment.rsd_assignment_matrix(profile)


def run_assign(config: RunConfig) -> str:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        profile = parse_assignment_profile(_read_text(config.path))
    for w in caught:
        print(f"rsd: warning: {w.message}", file=sys.stderr)
    agents = list(profile.agent_ids)
    houses = list(profile.houses)
    if config.agent is not None:
        if config.agent not in agents:
            raise UnknownIdentifierError(f"unknown agent {config.agent!r}")
        agents = [config.agent]
    if config.house is not None:
        if config.house not in houses:
            raise UnknownIdentifierError(f"unknown house {config.house!r}")
        houses = [config.house]

    if config.agent is not None and config.house is not None and config.algorithm == "dp":
        value = assignment.rsd_assignment_probability(profile, config.agent, config.house)
        cells = {(config.agent, config.house): value}
    else:
        matrix = _matrix(profile, config)
        cells = {(a, h): matrix[a, h] for a in agents for h in houses}

    if config.output == "json":
        result = [_entry(cells[a, h], config, agent=a, house=h) for a in agents for h in houses]
        return _envelope(config, "assign", profile.n, profile.m, result)
    if config.agent is not None and config.house is not None:
        return _cell(cells[config.agent, config.house], config)
    lines = [" ".join(["agent", *houses])]
    for a in agents:
        lines.append(" ".join([a, *(fraction_text(cells[a, h]) for h in houses)]))
    if config.decimals is not None:
        lines.append("")
        lines.append(" ".join(["agent", *houses]))
        for a in agents:
            lines.append(" ".join([a, *(decimal_text(cells[a, h], config.decimals) for h in houses)]))
    return "\n".join(lines)


def _time(fn, repeat: int):
    timings, result = [], None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        timings.append(time.perf_counter() - start)
    return statistics.median(timings), result


def run_bench(config: RunConfig) -> str:
    text = _read_text(config.path)
    lines = []
    outputs = {}
    if config.setting == "vote":
        profile = parse_voting_profile(text)
        _, stats = voting.rsd_lottery_with_stats(profile)
        lines.append(
            f"setting=vote n={stats.n} m={stats.m} alternative_types={stats.alternative_types} "
            f"max_signatures={stats.max_signatures} memo_entries={stats.memo_entries}"
        )
        runners = {
            "dp": lambda: voting.rsd_lottery(profile),
            "brute": lambda: oracle.brute_force_lottery(profile, cap=config.cap),
            "mc": lambda: oracle.monte_carlo_estimate(profile, config.samples or 1000, config.seed),
        }
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            profile = parse_assignment_profile(text)
        _, stats = assignment.rsd_assignment_matrix_with_stats(profile)
        lines.append(
            f"setting=assign n={stats.n} m={stats.m} types={stats.T} "
            f"memo_entries={stats.memo_entries} memo_bound={stats.memo_bound}"
        )
        runners = {
            "dp": lambda: assignment.rsd_assignment_matrix(profile),
            "brute": lambda: oracle.brute_force_matrix(profile, cap=config.cap),
            "mc": lambda: oracle.monte_carlo_estimate(profile, config.samples or 1000, config.seed),
        }
    lines.append(f"{'algorithm':<10} {'median_s':>12}  status")
    for algo in config.algos:
        if algo == "brute" and profile.n > config.cap:
            lines.append(f"{algo:<10} {'-':>12}  refused: n={profile.n} exceeds cap {config.cap}")
            continue
        seconds, outputs[algo] = _time(runners[algo], config.repeat)
        lines.append(f"{algo:<10} {seconds:>12.6f}  ok")
    if "dp" in outputs and "brute" in outputs:
        verdict = "identical" if outputs["dp"] == outputs["brute"] else "MISMATCH"
        lines.append(f"dp vs brute: {verdict}")
    return "\n".join(lines)


def run_gen(config: RunConfig) -> str:
    if config.setting == "vote":
        return generate.voting_text(config.agents, config.items, config.types, config.seed)
    return generate.assignment_text(config.agents, config.items, config.types, config.seed)


# --------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("path", metavar="file", help="profile file, or - for stdin")
    p.add_argument("--algo", dest="algorithm", choices=["dp", "brute", "mc"], default="dp")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", choices=["text", "json"], default="text")
    p.add_argument("--decimals", type=int)
    p.add_argument("--cap", type=int, default=oracle.DEFAULT_CAP, help="largest n brute force may enumerate")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rsd", description="Exact random serial dictatorship probabilities.")
    sub = parser.add_subparsers(dest="command", required=True)

    vote = sub.add_parser("vote", help="RSD lottery of a voting profile")
    _common(vote)
    vote.add_argument("--alternative")

    assign = sub.add_parser("assign", help="RSD fractional assignment of a house allocation profile")
    _common(assign)
    assign.add_argument("--agent")
    assign.add_argument("--house")

    bench = sub.add_parser("bench", help="time the DP against brute force")
    bench.add_argument("path", metavar="file")
    bench.add_argument("--setting", choices=["vote", "assign"], required=True)
    bench.add_argument("--algos", default="dp,brute")
    bench.add_argument("--repeat", type=int, default=3)
    bench.add_argument("--samples", type=int)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--cap", type=int, default=oracle.DEFAULT_CAP)

    gen = sub.add_parser("gen", help="print a seeded random profile")
    gen.add_argument("setting", choices=["vote", "assign"])
    gen.add_argument("--agents", type=int, required=True)
    size = gen.add_mutually_exclusive_group(required=True)
    size.add_argument("--alternatives", type=int, dest="items")
    size.add_argument("--houses", type=int, dest="items")
    gen.add_argument("--types", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    values = vars(args).copy()
    if "algos" in values:
        algos = tuple(a.strip() for a in values["algos"].split(",") if a.strip())
        unknown = [a for a in algos if a not in ("dp", "brute", "mc")]
        if unknown or not algos:
            raise ValueError(f"--algos takes a comma list of dp, brute, mc (got {values['algos']!r})")
        values["algos"] = algos
    return RunConfig(**values)


COMMANDS = {"vote": run_vote, "assign": run_assign, "bench": run_bench, "gen": run_gen}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config(args)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        out = COMMANDS[config.command](config)
    except (ProfileError, UnknownIdentifierError) as exc:
        return _fail(EXIT_INPUT, "input error", exc)
    except OSError as exc:
        return _fail(EXIT_INPUT, "input error", exc)
    except CapacityError as exc:
        return _fail(EXIT_CAPACITY, "capacity error", exc)
    except EnumerationCapError as exc:
        return _fail(EXIT_CAP, "enumeration refused", exc)
    except (RSDError, ValueError) as exc:
        return _fail(EXIT_INPUT, "input error", exc)
    sys.stdout.write(out if out.endswith("\n") else out + "\n")
    return EXIT_OK


def _fail(code: int, kind: str, exc: BaseException) -> int:
    print(f"rsd: {kind}: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
