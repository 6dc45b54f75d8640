"""Group and character-table files, fixture lookup, and the survey store.

File formats (all JSON):

``*.perm.json``
    {"label": str, "degree": int, "generators": [[int, ...], ...],
     "normal_subgroups": {name: [[int, ...], ...]}}   (last key optional)
    Generators are 0-based one-line images.  ``*.perm.jsonl`` packs hold one
    such object per line.
``*.cayley.json``
    {"label": str, "order": int, "table": [[int, ...], ...]}
``*.ctbl.json``
    {"label", "order", "class_sizes", "class_orders", "power_maps", "degrees",
     "values"}; ``power_maps`` maps a prime (as a string) to the list of
    classes of g^p, and each value is a serialized Cyclotomic
    {"conductor": n, "terms": [[exponent, numerator, denominator], ...]}.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
import threading
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .amenability import AmenabilityReport, ExactOrEnclosed, amza, report
from .chartab import CharacterTable, TableValidationError, character_table, sort_characters, verify_table
from .cyclotomic import Cyclotomic
from .groups import (
    DEFAULT_MAX_ORDER,
    _perm_mul,
    FiniteGroup,
    GroupSpecError,
    from_table,
    make_group,
    normal_closure,
    perm_group,
    quotient,
)

FIXTURE_ENV = "CENTRALAM_FIXTURES"


class FixtureError(GroupSpecError):
    pass


# ---------------------------------------------------------------------------
# fixture lookup
# ---------------------------------------------------------------------------


def builtin_fixture_dir() -> Path:
    return Path(str(resources.files("centralam") / "fixtures"))


def fixture_search_paths(extra: Sequence[str | Path] = ()) -> list[Path]:
    paths = [Path(p) for p in extra]
    env = os.environ.get(FIXTURE_ENV)
    if env:
        paths.extend(Path(p) for p in env.split(os.pathsep) if p)
    paths.append(builtin_fixture_dir())
    return paths


def resolve_fixture(name: str | Path, search_paths: Sequence[str | Path] = ()) -> Path:
    p = Path(name)
    if p.exists():
        return p
    if not p.is_absolute():
        for base in fixture_search_paths(search_paths):
            for cand in (base / p, base / f"{p}.perm.json"):
                if cand.exists():
                    return cand
    raise FixtureError(f"fixture not found: {name}")


# ---------------------------------------------------------------------------
# loading groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PermGroupFile:
    label: str
    degree: int
    generators: tuple[tuple[int, ...], ...]
    normal_subgroups: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, data: dict) -> "PermGroupFile":
        try:
            gens = tuple(tuple(int(x) for x in g) for g in data["generators"])
            degree = int(data.get("degree", len(gens[0]) if gens else 0))
            label = str(data.get("label", ""))
        except (KeyError, TypeError, ValueError) as exc:
            raise FixtureError(f"malformed permutation group record: {exc}") from None
        for g in gens:
            if sorted(g) != list(range(degree)):
                raise FixtureError(f"generator is not a bijection on 0..{degree - 1}")
        subs = {
            k: tuple(tuple(int(x) for x in g) for g in v) for k, v in data.get("normal_subgroups", {}).items()
        }
        return cls(label, degree, gens, subs)

    def group(self, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
        return perm_group(self.generators, self.label, max_order)

    def elements_of(self, g: FiniteGroup, perms: Iterable[Sequence[int]]) -> list[int]:
        """Indices in ``g`` of the given permutations (g must come from this file)."""
        index = _perm_index(self, g)
        out = []
        for p in perms:
            key = tuple(int(x) for x in p)
            if key not in index:
                raise FixtureError("permutation is not an element of the group")
            out.append(index[key])
        return out


def _perm_index(pf: PermGroupFile, g: FiniteGroup) -> dict[tuple[int, ...], int]:
    # rebuild the element list in the same breadth-first order as ``closure``
    ident = tuple(range(pf.degree))
    elems: list[tuple[int, ...]] = [ident]
    seen = {ident: 0}
    i = 0
    while i < len(elems):
        x = elems[i]
        for s in pf.generators:
            y = _perm_mul(x, s)
            if y not in seen:
                seen[y] = len(elems)
                elems.append(y)
        i += 1
    if len(elems) != g.order:
        raise FixtureError("group does not match the permutation file")
    return seen


def _read_json(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FixtureError(f"{path}: JSON parse error: {exc}") from None
    except OSError as exc:
        raise FixtureError(f"{path}: {exc.strerror}") from None


def read_perm_file(path: str | Path) -> PermGroupFile:
    return PermGroupFile.from_json(_read_json(path))


def load_perm_group(path: str | Path, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    return read_perm_file(path).group(max_order)


def iter_perm_pack(path: str | Path) -> Iterator[PermGroupFile]:
    """Records of a ``*.perm.jsonl`` pack, one group per line."""
    with open(path) as fh:
        for line in fh:
            if line.strip():
                yield PermGroupFile.from_json(json.loads(line))


def load_cayley(path: str | Path) -> FiniteGroup:
    data = _read_json(path)
    try:
        table = data["table"]
        label = str(data.get("label", ""))
    except (KeyError, TypeError):
        raise FixtureError(f"{path}: missing 'table'") from None
    if "order" in data and int(data["order"]) != len(table):
        raise FixtureError(f"{path}: 'order' disagrees with the table size")
    return from_table(table, label)


def save_cayley(g: FiniteGroup, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump({"label": g.label, "order": g.order, "table": g.mul.tolist()}, fh, separators=(",", ":"))
        fh.write("\n")


# ---------------------------------------------------------------------------
# character-table files
# ---------------------------------------------------------------------------


def _prime_power_maps(t: CharacterTable) -> dict[str, list[int]]:
    if t.power_maps is None:
        return {}
    e = len(t.power_maps[0])
    primes = [p for p in range(2, e + 1) if e % p == 0 and all(p % q for q in range(2, p))]
    return {str(p): [row[p % e] for row in t.power_maps] for p in primes}


def chartable_to_json(t: CharacterTable) -> dict:
    return {
        "label": t.label,
        "order": t.order,
        "class_sizes": list(t.class_sizes),
        "class_orders": list(t.class_orders),
        "power_maps": _prime_power_maps(t),
        "degrees": list(t.degrees),
        "values": [[z.to_json() for z in row] for row in t.values],
    }


def dumps_chartable(t: CharacterTable) -> str:
    return json.dumps(chartable_to_json(t), sort_keys=True, separators=(",", ":")) + "\n"


def save_chartable(t: CharacterTable, path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_chartable(t))


def chartable_from_json(data: dict) -> CharacterTable:
    try:
        values = tuple(tuple(Cyclotomic.from_json(z) for z in row) for row in data["values"])
        t = CharacterTable(
            order=int(data["order"]),
            class_sizes=tuple(int(x) for x in data["class_sizes"]),
            class_orders=tuple(int(x) for x in data["class_orders"]),
            degrees=tuple(int(x) for x in data["degrees"]),
            values=values,
            label=str(data.get("label", "")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FixtureError(f"malformed character table: {exc}") from None
    verify_table(t)
    maps = _full_power_maps(t, data.get("power_maps") or {})
    if maps is not None:
        t = dataclasses.replace(t, power_maps=maps)
    # reorder rows canonically so that loaded and computed tables agree
    order = sort_characters(t.degrees, t.values)
    if order != list(range(t.class_count)):
        t = CharacterTable(
            order=t.order,
            class_sizes=t.class_sizes,
            class_orders=t.class_orders,
            degrees=tuple(t.degrees[i] for i in order),
            values=tuple(t.values[i] for i in order),
            label=t.label,
            power_maps=t.power_maps,
        )
    return t


def _full_power_maps(t: CharacterTable, prime_maps: dict) -> Optional[tuple[tuple[int, ...], ...]]:
    """Rebuild power_maps[c][j] for 0 <= j < exponent from the stored prime maps.

    j splits as a * u with every prime of a dividing the exponent and u a
    unit; the unit part permutes columns the way Galois acts on values.
    """
    k = t.class_count
    e = 1
    for o in t.class_orders:
        e = e * o // math.gcd(e, o)
    primes = [p for p in range(2, e + 1) if e % p == 0 and all(p % q for q in range(2, p))]
    if not prime_maps:
        return None
    try:
        pmap = {int(p): [int(x) for x in row] for p, row in prime_maps.items()}
    except (TypeError, ValueError) as exc:
        raise FixtureError(f"malformed power maps: {exc}") from None
    if sorted(pmap) != primes or any(len(row) != k or not all(0 <= x < k for x in row) for row in pmap.values()):
        raise FixtureError(f"power maps must be given for exactly the primes {primes} dividing the exponent")
    columns = {tuple(t.values[i][c] for i in range(k)): c for c in range(k)}
    unit_cache: dict[int, list[int]] = {}

    def unit_map(u: int) -> list[int]:
        if u not in unit_cache:
            out = []
            for c in range(k):
                col = tuple(row[c].galois(u % row[c].conductor or 1) for row in t.values)
                if col not in columns:
                    raise FixtureError(f"values are not closed under the Galois action of {u}")
                out.append(columns[col])
            unit_cache[u] = out
        return unit_cache[u]

    rows = [[0] * e for _ in range(k)]
    for j in range(e):
        u, steps = j, []
        for p in primes:
            while u and u % p == 0:
                u //= p
                steps.append(p)
        for c in range(k):
            if j == 0:
                rows[c][j] = 0
                continue
            x = c
            for p in steps:
                x = pmap[p][x]
            rows[c][j] = unit_map(u)[x] if u != 1 else x
    return tuple(tuple(r) for r in rows)


def load_chartable(path: str | Path) -> CharacterTable:
    return chartable_from_json(_read_json(path))


def load_table_for_spec(
    spec: str, max_order: int = DEFAULT_MAX_ORDER, search_paths: Sequence[str | Path] = ()
) -> CharacterTable:
    """A character table for a group spec; ``ctbl:PATH`` bypasses construction."""
    if spec.startswith("ctbl:"):
        return load_chartable(resolve_fixture(spec[5:], search_paths))
    return character_table(make_group(spec, max_order, [str(p) for p in search_paths]))


# ---------------------------------------------------------------------------
# serialization of results
# ---------------------------------------------------------------------------


def frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def decimal_str(q: Fraction, places: int = 12) -> str:
    with localcontext() as ctx:
        ctx.prec = 60
        ctx.rounding = ROUND_HALF_EVEN
        d = Decimal(q.numerator) / Decimal(q.denominator)
        return format(d.quantize(Decimal(1).scaleb(-places)), "f")


def value_to_json(v: ExactOrEnclosed | Fraction) -> dict:
    if isinstance(v, Fraction):
        v = ExactOrEnclosed.of(v)
    out = {
        "exact": frac_str(v.exact) if v.exact is not None else None,
        "decimal": decimal_str(v.midpoint),
        "enclosure": [frac_str(v.lo), frac_str(v.hi)],
    }
    if v.certified_irrational:
        out["certified_irrational"] = True
    if v.reconstructed is not None:
        out["reconstructed"] = frac_str(v.reconstructed)
    return out


def report_to_json(r: AmenabilityReport) -> dict:
    out = {
        "label": r.label,
        "group_order": r.group_order,
        "center_order": r.center_order,
        "amza": value_to_json(r.amza),
        "ass": value_to_json(r.ass),
        "amza_off": value_to_json(r.amza_off),
        "inner_sums_za": [list(row) for row in r.inner_sums_za],
        "divisibility_ok": r.divisibility_ok,
    }
    if r.amzl is not None:
        out["amzl"] = value_to_json(r.amzl)
        out["amzl_inner_sums_integral"] = r.amzl_inner_sums_integral
    return out


# ---------------------------------------------------------------------------
# survey
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurveyRecord:
    label: str
    order: int
    amza: str
    amzl: Optional[str]
    ass: str
    amza_decimal: str
    amzl_decimal: str
    ass_decimal: str
    equal_flag: Optional[bool]
    abelian: bool
    cd_set: tuple[int, ...]
    cc_set: tuple[int, ...]
    quotient_violations: tuple = ()
    error: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "order": self.order,
            "amza": self.amza,
            "amzl": self.amzl,
            "ass": self.ass,
            "amza_decimal": self.amza_decimal,
            "amzl_decimal": self.amzl_decimal,
            "ass_decimal": self.ass_decimal,
            "equal_flag": self.equal_flag,
            "abelian": self.abelian,
            "cd_set": list(self.cd_set),
            "cc_set": list(self.cc_set),
            "quotient_violations": list(self.quotient_violations),
            "error": self.error,
        }

    @classmethod
    def from_json(cls, d: dict) -> "SurveyRecord":
        return cls(
            label=d["label"],
            order=d["order"],
            amza=d["amza"],
            amzl=d["amzl"],
            ass=d["ass"],
            amza_decimal=d["amza_decimal"],
            amzl_decimal=d["amzl_decimal"],
            ass_decimal=d["ass_decimal"],
            equal_flag=d["equal_flag"],
            abelian=d["abelian"],
            cd_set=tuple(d["cd_set"]),
            cc_set=tuple(d["cc_set"]),
            quotient_violations=tuple(d.get("quotient_violations", ())),
            error=d.get("error"),
        )


def survey_record(t: CharacterTable, quotient_violations: Sequence = ()) -> SurveyRecord:
    r = report(t)
    zl = r.amzl
    return SurveyRecord(
        label=t.label,
        order=t.order,
        amza=frac_str(r.amza.exact),
        amzl=frac_str(zl.exact) if zl.exact is not None else None,
        ass=frac_str(r.ass),
        amza_decimal=decimal_str(r.amza.exact),
        amzl_decimal=decimal_str(zl.midpoint),
        ass_decimal=decimal_str(r.ass),
        equal_flag=r.equal_flag,
        abelian=t.is_abelian,
        cd_set=tuple(sorted(t.cd_set)),
        cc_set=tuple(sorted(t.cc_set)),
        quotient_violations=tuple(quotient_violations),
    )


class SurveyStore:
    """Append-only line-delimited JSON; one writer lock, whole lines only."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.touch(exist_ok=True)

    def append(self, rec: SurveyRecord) -> None:
        line = json.dumps(rec.to_json(), sort_keys=True, separators=(",", ":")) + "\n"
        with self._lock, open(self.path, "a") as fh:
            fh.write(line)

    def records(self) -> list[SurveyRecord]:
        out = []
        with open(self.path) as fh:
            for line in fh:
                if line.endswith("\n") and line.strip():
                    out.append(SurveyRecord.from_json(json.loads(line)))
        return out


@dataclass(frozen=True)
class SurveySummary:
    groups: int
    non_abelian: int
    unequal_count: int
    undecided_count: int
    unequal_orders: tuple[int, ...]
    min_nonabelian_amza: Optional[str]
    min_nonabelian_labels: tuple[str, ...]
    quotient_violations: tuple
    failures: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "groups": self.groups,
            "non_abelian": self.non_abelian,
            "unequal_count": self.unequal_count,
            "undecided_count": self.undecided_count,
            "unequal_orders": list(self.unequal_orders),
            "min_nonabelian_amza": self.min_nonabelian_amza,
            "min_nonabelian_labels": list(self.min_nonabelian_labels),
            "quotient_violations": list(self.quotient_violations),
            "failures": list(self.failures),
        }


def summarize(records: Iterable[SurveyRecord]) -> SurveySummary:
    recs = sorted(records, key=lambda r: (r.order, r.label))
    ok = [r for r in recs if r.error is None]
    nonab = [r for r in ok if not r.abelian]
    unequal = [r for r in nonab if r.equal_flag is False]
    undecided = [r for r in nonab if r.equal_flag is None]
    min_val: Optional[Fraction] = None
    labels: list[str] = []
    for r in nonab:
        v = Fraction(r.amza)
        if min_val is None or v < min_val:
            min_val, labels = v, [r.label]
        elif v == min_val:
            labels.append(r.label)
    viol = tuple(v for r in ok for v in r.quotient_violations)
    return SurveySummary(
        groups=len(ok),
        non_abelian=len(nonab),
        unequal_count=len(unequal),
        undecided_count=len(undecided),
        unequal_orders=tuple(sorted({r.order for r in unequal})),
        min_nonabelian_amza=frac_str(min_val) if min_val is not None else None,
        min_nonabelian_labels=tuple(sorted(labels)),
        quotient_violations=viol,
        failures=tuple(f"{r.label}: {r.error}" for r in recs if r.error is not None),
    )


def summary_csv(records: Iterable[SurveyRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "order", "amza", "amzl", "ass", "equal_flag"])
    for r in sorted(records, key=lambda r: (r.order, r.label)):
        if r.error is None:
            w.writerow([r.label, r.order, r.amza, r.amzl if r.amzl is not None else r.amzl_decimal, r.ass, r.equal_flag])
    return buf.getvalue()


def _expand_inputs(
    inputs: Sequence[str], max_order: int, search_paths: Sequence[str | Path]
) -> Iterator[tuple[str, object]]:
    """(label, table-or-exception) for every input; packs expand to many groups."""
    for spec in inputs:
        try:
            if spec.endswith(".jsonl"):
                path = resolve_fixture(spec.split(":", 1)[-1] if spec.startswith("perm:") else spec, search_paths)
                for pf in iter_perm_pack(path):
                    try:
                        yield pf.label, character_table(pf.group(max_order))
                    except Exception as exc:  # recorded, not fatal
                        yield pf.label, exc
                continue
            yield spec, load_table_for_spec(spec, max_order, search_paths)
        except Exception as exc:
            yield spec, exc


def survey(
    inputs: Sequence[str],
    out: str | Path,
    max_order: int = DEFAULT_MAX_ORDER,
    search_paths: Sequence[str | Path] = (),
    quotient_pairs: Sequence[tuple[str, Sequence[int]]] = (),
) -> SurveySummary:
    store = SurveyStore(out)
    recs = []
    for label, item in _expand_inputs(inputs, max_order, search_paths):
        if isinstance(item, Exception):
            rec = SurveyRecord(label, 0, "", None, "", "", "", "", None, False, (), (), (), f"{type(item).__name__}: {item}")
        else:
            try:
                rec = survey_record(item)
            except Exception as exc:
                rec = SurveyRecord(label, item.order, "", None, "", "", "", "", None, False, (), (), (), f"{type(exc).__name__}: {exc}")
        store.append(rec)
        recs.append(rec)
    for spec, gens in quotient_pairs:
        try:
            g = make_group(spec, max_order, [str(p) for p in search_paths])
            cmp = quotient_compare(g, gens)
            viol = [] if cmp.amza_holds else [f"{spec} / <{','.join(map(str, gens))}>"]
            rec = survey_record(cmp.table, viol)
        except Exception as exc:
            rec = SurveyRecord(spec, 0, "", None, "", "", "", "", None, False, (), (), (), f"{type(exc).__name__}: {exc}")
        store.append(rec)
        recs.append(rec)
    return summarize(recs)


# ---------------------------------------------------------------------------
# quotient comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuotientComparison:
    label: str
    normal_order: int
    amza: Fraction
    amza_quotient: Fraction
    ass: Fraction
    ass_quotient: Fraction
    table: CharacterTable
    quotient_table: CharacterTable

    @property
    def amza_holds(self) -> bool:
        return self.amza >= self.amza_quotient

    @property
    def ass_holds(self) -> bool:
        return self.ass >= self.ass_quotient

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "normal_order": self.normal_order,
            "quotient_order": self.quotient_table.order,
            "amza": frac_str(self.amza),
            "amza_quotient": frac_str(self.amza_quotient),
            "amza_holds": self.amza_holds,
            "ass": frac_str(self.ass),
            "ass_quotient": frac_str(self.ass_quotient),
            "ass_holds": self.ass_holds,
        }


class ImproperSubgroupError(ValueError):
    pass


def quotient_compare(g: FiniteGroup, n_gens: Sequence[int]) -> QuotientComparison:
    """AMZA and ass of G against G/N for N the normal closure of ``n_gens``."""
    n = normal_closure(g, n_gens)
    if n.order in (1, g.order):
        raise ImproperSubgroupError(f"normal closure has order {n.order}; it must be proper and nontrivial")
    q = quotient(g, n)
    t = character_table(g)
    tq = character_table(q)
    r, rq = amza(t), amza(tq)
    return QuotientComparison(
        label=g.label,
        normal_order=n.order,
        amza=r.amza.exact,
        amza_quotient=rq.amza.exact,
        ass=r.ass,
        ass_quotient=rq.ass,
        table=t,
        quotient_table=tq,
    )


def table_fingerprint(t: CharacterTable) -> tuple:
    """Order, sorted class sizes, sorted degrees and the exact AMZA/ass values."""
    r = amza(t)
    return (t.order, tuple(sorted(t.class_sizes)), tuple(sorted(t.degrees)), r.amza.exact, r.ass)


def builtin_corpus(max_order: int = 200) -> list[str]:
    """Specs of the constructible families up to ``max_order``."""
    specs: list[str] = []
    for n in range(1, max_order + 1):
        specs.append(f"cyclic:{n}")
    for n in range(6, max_order + 1, 2):
        specs.append(f"dihedral:{n}")
    for n in range(8, max_order + 1, 4):
        specs.append(f"quaternion:{n}")
    for n in range(3, 8):
        if _factorial(n) <= max_order:
            specs.append(f"sym:{n}")
        if n >= 4 and _factorial(n) // 2 <= max_order:
            specs.append(f"alt:{n}")
    for p in (3, 5, 7):
        if p**3 <= max_order:
            specs.append(f"heisenberg:{p}")
    for p in (3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        if p * (p - 1) <= max_order:
            specs.append(f"aff:{p}")
        if p * (p * p - 1) <= max_order:
            specs.append(f"sl2:{p}")
    small = ["cyclic:2", "cyclic:3", "sym:3", "dihedral:8", "quaternion:8", "sl2:3", "alt:4"]
    for a in small:
        for b in small:
            if a <= b:
                specs.append(f"direct({a},{b})")
    return [s for s in specs if _spec_order(s) <= max_order]


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _spec_order(spec: str) -> int:
    if spec.startswith("direct("):
        from .groups import _split_args

        a, b = _split_args(spec[len("direct("):-1])
        return _spec_order(a) * _spec_order(b)
    kind, arg = spec.split(":")
    n = int(arg)
    return {
        "cyclic": n,
        "dihedral": n,
        "quaternion": n,
        "sym": _factorial(n),
        "alt": max(1, _factorial(n) // 2),
        "heisenberg": n**3,
        "aff": n * (n - 1),
        "sl2": n * (n * n - 1),
    }[kind]


__all__ = [
    "FixtureError",
    "PermGroupFile",
    "QuotientComparison",
    "SurveyRecord",
    "SurveyStore",
    "SurveySummary",
    "builtin_corpus",
    "chartable_from_json",
    "dumps_chartable",
    "load_cayley",
    "load_chartable",
    "load_perm_group",
    "quotient_compare",
    "resolve_fixture",
    "save_chartable",
    "summarize",
    "survey",
    "table_fingerprint",
]
