"""JSON documents for point/line sets, grid structures and suite configs.

Every document is written with sorted keys, two-space indent and a trailing
newline so that equal content gives equal bytes.  Writes go through a
temporary file and an atomic rename.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .dimsets import check_weighted_spacing
from .errors import SchemaError, SpacingViolated
from .geometry import Direction, Line, Point
from .incidence import WeightedLineSet, WeightedPointSet
from .reduce import GridStructure
from .ring import RingParams


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PointEntry(_Strict):
    x: int
    y: int
    w: int = Field(1, ge=1)


class DirEntry(_Strict):
    kind: Literal["slope", "steep"]
    val: int = Field(ge=0)


class LineEntry(_Strict):
    dir: DirEntry
    offset: int = Field(ge=0)
    w: int = Field(1, ge=1)


class Certificate(_Strict):
    target: Literal["points", "lines"]
    alpha: str
    K: str
    holds: bool
    minimal_K: float
    witness: Optional[dict] = None


class SetDocument(_Strict):
    p: int
    k: int
    points: list[PointEntry] = []
    lines: list[LineEntry] = []
    meta: dict[str, Any] = {}
    certificates: list[Certificate] = []

    @model_validator(mode="after")
    def _ranges(self):
        try:
            params = RingParams(self.p, self.k)
        except ValueError as e:
            raise ValueError(str(e)) from None
        m = params.modulus
        for q in self.points:
            if not (0 <= q.x < m and 0 <= q.y < m):
                raise ValueError(f"point ({q.x}, {q.y}) outside [0, {m})")
        for l in self.lines:
            bound = m if l.dir.kind == "slope" else m // self.p
            if l.dir.val >= bound:
                raise ValueError(f"{l.dir.kind} value {l.dir.val} outside [0, {bound})")
            if l.offset >= m:
                raise ValueError(f"offset {l.offset} outside [0, {m})")
        return self

    @property
    def params(self) -> RingParams:
        return RingParams(self.p, self.k)

    def to_sets(self) -> tuple[WeightedPointSet, WeightedLineSet]:
        params = self.params
        pts: dict[int, int] = {}
        for q in self.points:
            key = Point(params, q.x, q.y).key
            pts[key] = pts.get(key, 0) + q.w
        lns: dict[int, int] = {}
        for l in self.lines:
            d = Direction(params, l.dir.kind == "steep", l.dir.val)
            key = Line(d, l.offset).key
            lns[key] = lns.get(key, 0) + l.w
        return WeightedPointSet(params, pts), WeightedLineSet(params, lns)

    @classmethod
    def from_sets(cls, P: WeightedPointSet, L: WeightedLineSet, meta: Optional[dict] = None,
                  certificates=()) -> "SetDocument":
        params = P.params
        points = [PointEntry(x=q.x, y=q.y, w=P.weight(q.key)) for q in P.points()]
        lines = [
            LineEntry(dir=DirEntry(kind=l.direction.kind, val=l.direction.val), offset=l.offset,
                      w=L.weight(l.key))
            for l in L.lines()
        ]
        return cls(p=params.p, k=params.k, points=points, lines=lines, meta=meta or {},
                   certificates=list(certificates))

    def check_certificates(self) -> None:
        """Re-run every embedded spacing certificate; raise if one no longer holds."""
        P, L = self.to_sets()
        for c in self.certificates:
            rep = check_weighted_spacing(P if c.target == "points" else L, c.alpha, c.K)
            if rep.holds != c.holds:
                raise SpacingViolated(
                    f"{c.target} certificate (alpha={c.alpha}, K={c.K}) claims holds={c.holds}, "
                    f"recomputed {rep.holds} at {rep.witness}"
                )


def certificate(target: str, report) -> Certificate:
    return Certificate(target=target, alpha=str(report.alpha), K=str(report.K), holds=report.holds,
                       minimal_K=report.minimal_K,
                       witness=report.witness.to_dict() if report.witness else None)


class PointXY(_Strict):
    x: int
    y: int


class GridDocument(_Strict):
    p: int
    k: int
    q0: PointXY
    q1: PointXY
    L0: list[LineEntry]
    L1: list[LineEntry]
    G: list[PointXY]
    meta: dict[str, Any] = {}

    def to_grid(self) -> GridStructure:
        params = RingParams(self.p, self.k)

        def pt(e):
            return Point(params, e.x, e.y)

        def ln(e):
            return Line(Direction(params, e.dir.kind == "steep", e.dir.val), e.offset)

        return GridStructure(pt(self.q0), pt(self.q1), tuple(map(ln, self.L0)), tuple(map(ln, self.L1)),
                             tuple(map(pt, self.G)))

    @classmethod
    def from_grid(cls, gs: GridStructure, meta: Optional[dict] = None) -> "GridDocument":
        def pt(q):
            return PointXY(x=q.x, y=q.y)

        def ln(l):
            return LineEntry(dir=DirEntry(kind=l.direction.kind, val=l.direction.val), offset=l.offset)

        params = gs.params
        return cls(p=params.p, k=params.k, q0=pt(gs.q0), q1=pt(gs.q1), L0=[ln(l) for l in gs.L0],
                   L1=[ln(l) for l in gs.L1], G=[pt(g) for g in gs.G], meta=meta or {})


# -- suite configuration ------------------------------------------------------

STATEMENTS = (
    "lemma21",
    "cs",
    "lemma33",
    "prop34",
    "prop36",
    "prop37",
    "thm13",
    "reduce",
)

GENERATORS = ("full-grid", "random-alpha", "random-weighted", "line-union", "separated", "grid", "corrupted")


class GeneratorSpec(_Strict):
    name: str
    params: dict[str, Any] = {}

    @model_validator(mode="after")
    def _known(self):
        if self.name not in GENERATORS:
            raise ValueError(f"unknown generator {self.name!r}")
        return self


class Budgets(_Strict):
    instances: int = Field(4, ge=0)
    time_cap_s: float = Field(300.0, gt=0)


class SuiteConfig(_Strict):
    seed: int = Field(0, ge=0, lt=2**64)
    rings: list[tuple[int, int]] = []
    statements: list[str] = []
    generators: list[GeneratorSpec] = []
    budgets: Budgets = Budgets()

    @model_validator(mode="after")
    def _check(self):
        from .ring import guard_max_k

        for s in self.statements:
            if s not in STATEMENTS:
                raise ValueError(f"unknown statement id {s!r}")
        for p, k in self.rings:
            RingParams(p, k)
            if k > guard_max_k():
                raise ValueError(f"ring ({p}, {k}) exceeds the k guard {guard_max_k()}")
        return self


def default_suite(seed: int = 0) -> SuiteConfig:
    return SuiteConfig(
        seed=seed,
        rings=[(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)],
        statements=list(STATEMENTS),
        generators=[
            GeneratorSpec(name="full-grid"),
            GeneratorSpec(name="random-alpha", params={"exponents": ["0", "1/2", "1", "3/2", "2"]}),
            GeneratorSpec(name="random-weighted", params={"n": 24, "max_weight": 4, "eps": ["1/4", "1/2"]}),
            GeneratorSpec(name="line-union"),
            GeneratorSpec(name="separated", params={"n": 10}),
            GeneratorSpec(name="grid"),
        ],
        budgets=Budgets(instances=2),
    )


# -- file helpers -------------------------------------------------------------


def canonical_json(obj: Any) -> str:
    if isinstance(obj, BaseModel):
        obj = obj.model_dump(mode="json")
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_atomic(path: Union[str, Path], text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save(doc: BaseModel, path: Union[str, Path]) -> None:
    write_atomic(path, canonical_json(doc))


def _load(model, path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e}") from e
    try:
        return model.model_validate_json(text)
    except ValidationError as e:
        raise SchemaError(f"{path}: {e}") from e


def load_set(path) -> SetDocument:
    doc = _load(SetDocument, path)
    doc.check_certificates()
    return doc


def load_grid(path) -> GridDocument:
    return _load(GridDocument, path)


def load_suite(path) -> SuiteConfig:
    return _load(SuiteConfig, path)
