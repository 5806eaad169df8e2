"""Batch runner: a matrix of statement x generator x ring cells.

Each cell derives its own seed from the suite seed and its id, so cells can
run in any order or in parallel and the sorted report stream is identical.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Union

from pydantic import ValidationError

from . import verify
from .dimsets import (
    as_fraction,
    certified,
    check_weighted_spacing,
    full_grid,
    full_two_set,
    line_union,
    random_mass_set,
    random_weighted_set,
    separated_lines,
)
from .documents import SuiteConfig, canonical_json, write_atomic
from .errors import ConfigError, NotSeparated, PadicError, SpacingViolated
from .reduce import projective_normalize, reduce_to_prime_field, synthetic_grid
from .ring import RingParams

DEFAULT_EXPONENTS = ("0", "1/2", "1", "3/2", "2")


@dataclass(frozen=True)
class Cell:
    statement: str
    generator: str
    p: int
    k: int
    instance: int
    params: tuple = ()

    @property
    def id(self) -> str:
        return f"{self.statement}/{self.generator}/p{self.p}k{self.k}/{self.instance}"

    def seed(self, suite_seed: int) -> int:
        h = hashlib.sha256(f"{suite_seed}:{self.id}".encode()).digest()
        return int.from_bytes(h[:8], "big")


# statement -> generators it consumes
APPLIES = {
    "lemma21": ("*",),
    "cs": ("separated",),
    "lemma33": ("random-alpha", "full-grid", "line-union", "corrupted"),
    "prop34": ("random-alpha", "full-grid", "line-union", "corrupted"),
    "prop36": ("random-weighted", "full-grid"),
    "prop37": ("random-weighted",),
    "thm13": ("random-weighted", "random-alpha", "full-grid", "corrupted"),
    "reduce": ("grid",),
}


def plan(config: SuiteConfig) -> list[Cell]:
    gens = {g.name: dict(g.params) for g in config.generators}
    cells = []
    for st in config.statements:
        for p, k in config.rings:
            if st == "lemma21":
                if k >= 2 and gens:
                    cells.append(Cell(st, "exhaustive" if k <= 2 else "random", p, k, 0))
                continue
            for g in APPLIES[st]:
                if g not in gens:
                    continue
                if st == "prop36" and k < 2:
                    continue
                n = 1 if g == "full-grid" else config.budgets.instances
                extra = tuple(sorted((key, _freeze(v)) for key, v in gens[g].items()))
                cells.extend(Cell(st, g, p, k, i, extra) for i in range(n))
    return cells


def _freeze(v):
    return tuple(v) if isinstance(v, list) else v


def _exponents(cell: Cell) -> list[Fraction]:
    return [as_fraction(x) for x in dict(cell.params).get("exponents", DEFAULT_EXPONENTS)]


def _smallest_exponent(S, grid) -> Fraction:
    return next(a for a in sorted(grid) if check_weighted_spacing(S, a, 1).holds)


# -- per-statement runners ----------------------------------------------------


def _alpha_pairs(cell: Cell, seed: int):
    """(P, L, alpha, beta) fixtures for the unweighted statements."""
    R = RingParams(cell.p, cell.k)
    grid = _exponents(cell)
    if cell.generator == "full-grid":
        P, L = full_two_set(R)
        yield P, L, Fraction(2), Fraction(2)
    elif cell.generator == "random-alpha":
        for i, a in enumerate(grid):
            for j, b in enumerate(grid):
                P, _ = random_mass_set(R, a, seed + 2 * (5 * i + j), "points")
                L, _ = random_mass_set(R, b, seed + 2 * (5 * i + j) + 1, "lines")
                yield P, L, a, b
    elif cell.generator == "line-union":
        for b in grid:
            L, _ = random_mass_set(R, b, seed, "lines")
            lines = L.lines()[: max(1, len(L) // 4)]
            P = line_union(R, lines)
            yield P, L, _smallest_exponent(P, grid), b
    elif cell.generator == "corrupted":
        P, L = full_grid(R)
        yield P, L, Fraction(1), Fraction(1)


def _lines_for(L, seed, n=3):
    keys = sorted(L.keys())
    if not keys:
        return []
    step = max(1, len(keys) // n)
    start = seed % len(keys)
    return [L.lines()[(start + i * step) % len(keys)] for i in range(min(n, len(keys)))]


def run_lemma33(cell, seed):
    out = []
    for P, L, a, b in _alpha_pairs(cell, seed):
        for l in _lines_for(L, seed):
            for j in range(cell.k + 1):
                out.extend(verify.bound_lemma33(P, L, a, b, l, j))
    return out


def run_prop34(cell, seed):
    out = []
    for P, L, a, b in _alpha_pairs(cell, seed):
        out.extend(verify.bound_prop34(P, L, a, b))
    return out


def _weighted_pair(cell, seed, unit_lines=False):
    R = RingParams(cell.p, cell.k)
    opts = dict(cell.params)
    n, w = int(opts.get("n", 24)), int(opts.get("max_weight", 4))
    P = random_weighted_set(R, seed, "points", n=n, max_weight=w)
    L = random_weighted_set(R, seed + 1, "lines", n=n, max_weight=1 if unit_lines else w)
    return P, L


def run_prop36(cell, seed):
    R = RingParams(cell.p, cell.k)
    if cell.generator == "full-grid":
        P, L = full_grid(R)
    else:
        P, L = _weighted_pair(cell, seed, unit_lines=True)
    out = []
    for j in range(1, cell.k):
        out.extend(verify.bound_prop36(P, L, j))
    return out


def run_prop37(cell, seed):
    return [verify.bound_prop37(*_weighted_pair(cell, seed))]


def run_thm13(cell, seed):
    grid = _exponents(cell)
    eps_list = [as_fraction(e) for e in dict(cell.params).get("eps", ("1/4", "1/2"))]
    out = []
    if cell.generator in ("random-weighted", "full-grid"):
        P, L = full_grid(RingParams(cell.p, cell.k)) if cell.generator == "full-grid" else _weighted_pair(cell, seed)
        for a in grid:
            Ka, _ = certified(P, a)
            for b in grid:
                Kb, _ = certified(L, b)
                for e in eps_list:
                    out.append(verify.bound_thm13(P, L, a, b, Ka, Kb, e))
    else:
        for P, L, a, b in _alpha_pairs(cell, seed):
            for e in eps_list:
                out.append(verify.bound_thm13(P, L, a, b, 1, 1, e))
    return out


def run_cs(cell, seed):
    R = RingParams(cell.p, cell.k)
    n = int(dict(cell.params).get("n", 10))
    L = separated_lines(R, seed, n)
    P = random_weighted_set(R, seed + 1, "points", n=4 * n, max_weight=1)
    return list(verify.bound_cs(P, L))


def run_lemma21(cell, seed):
    R = RingParams(cell.p, cell.k)
    if cell.generator == "exhaustive":
        return [verify.check_lemma21_exhaustive(R)]
    return [verify.check_lemma21_random(R, seed, 2000)]


def run_reduce(cell, seed):
    R = RingParams(cell.p, cell.k)
    out = []
    for case in (1, 2) if cell.k >= 2 else (1,):
        gs = synthetic_grid(R, seed + case, case)
        red = reduce_to_prime_field(gs)
        frame = projective_normalize(red.grid)
        product = {(a, b) for a in frame.A for b in frame.B}
        contained = set(frame.G_image) <= product
        inc_ok = red.trace["incidences_in"] == red.trace["incidences_out"]
        holds = len(red.grid.G) == len(gs.G) and inc_ok and contained
        digest = verify.instance_digest("grid", R.p, R.k, seed, case, [g.key for g in gs.G])
        info = {"p": R.p, "k": R.k, "case": red.trace["case"], "G": len(gs.G),
                "incidences": red.trace["incidences_in"], "A": len(frame.A), "B": len(frame.B)}
        out.append(verify.BoundReport("reduce", len(red.grid.G), float(len(gs.G)), holds, 1.0, digest, info,
                                      rhs_exact=str(len(gs.G)), status="ok" if holds else "fails"))
    return out


RUNNERS = {
    "lemma21": run_lemma21,
    "cs": run_cs,
    "lemma33": run_lemma33,
    "prop34": run_prop34,
    "prop36": run_prop36,
    "prop37": run_prop37,
    "thm13": run_thm13,
    "reduce": run_reduce,
}


def run_cell(cell: Cell, suite_seed: int) -> list[dict]:
    seed = cell.seed(suite_seed) % (2**31)
    try:
        reports = RUNNERS[cell.statement](cell, seed)
    except (SpacingViolated, NotSeparated) as e:
        status = "spacing_violated" if isinstance(e, SpacingViolated) else "not_separated"
        reports = [verify.BoundReport(cell.statement, 0, math.nan, False, math.nan, "", {"p": cell.p, "k": cell.k},
                                      status=status, note=str(e))]
    except PadicError as e:
        reports = [verify.BoundReport(cell.statement, 0, math.nan, False, math.nan, "", {"p": cell.p, "k": cell.k},
                                      status="error", note=f"{type(e).__name__}: {e}")]
    out = []
    for r in reports:
        r.cell = cell.id
        d = r.to_dict()
        for key in ("rhs", "margin"):
            if isinstance(d[key], float) and math.isnan(d[key]):
                d[key] = None
        out.append(d)
    return out


def _job(args):
    return run_cell(*args)


@dataclass
class Bundle:
    reports: list[dict]

    @property
    def failures(self) -> list[dict]:
        return [r for r in self.reports if r["asserted"] and not r["holds"]]

    @property
    def exit_code(self) -> int:
        return 1 if self.failures else 0

    def jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in self.reports)

    def summary_rows(self) -> list[dict]:
        by: dict[str, dict] = {}
        for r in self.reports:
            s = by.setdefault(r["name"], {"statement": r["name"], "instances": 0, "failures": 0,
                                          "borderline": 0, "asserted": r["asserted"], "min_margin": None})
            s["instances"] += 1
            s["asserted"] = s["asserted"] or r["asserted"]
            s["failures"] += not r["holds"]
            s["borderline"] += r["borderline"]
            m = r["margin"]
            if isinstance(m, (int, float)) and (s["min_margin"] is None or m < s["min_margin"]):
                s["min_margin"] = m
        return [by[k] for k in sorted(by)]

    def csv(self) -> str:
        buf = io.StringIO()
        fields = ["statement", "instances", "failures", "borderline", "asserted", "min_margin"]
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for row in self.summary_rows():
            row = dict(row)
            if row["min_margin"] is not None:
                row["min_margin"] = repr(row["min_margin"])
            w.writerow(row)
        return buf.getvalue()

    def write(self, out_dir: Union[str, Path]) -> tuple[Path, Path]:
        out = Path(out_dir)
        write_atomic(out / "reports.jsonl", self.jsonl())
        write_atomic(out / "summary.csv", self.csv())
        return out / "reports.jsonl", out / "summary.csv"


def _sort_key(r: dict):
    return (r["name"], r["cell"], r["instance_digest"], canonical_json(r))


def run_suite(config: Union[SuiteConfig, dict], workers: int = 1) -> Bundle:
    if not isinstance(config, SuiteConfig):
        try:
            config = SuiteConfig.model_validate(config)
        except ValidationError as e:
            raise ConfigError(str(e)) from e
    cells = plan(config)
    jobs = [(c, config.seed) for c in cells]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_job, jobs, chunksize=1))
    else:
        results = [_job(j) for j in jobs]
    reports = [r for chunk in results for r in chunk]
    reports.sort(key=_sort_key)
    return Bundle(reports)
