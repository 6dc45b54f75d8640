"""Command-line interface: ``centralam <command> ...``.

Exit status is 0 on success, 1 on domain errors (bad group data, failed
validation, inapplicable requests) and 2 on usage errors.  Every error is a
single line ``error[CODE]: message`` on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .amenability import (
    DEFAULT_TOLERANCE_EXPONENT,
    ExactOrEnclosed,
    HypergroupError,
    IntegralityError,
    conj_hypergroup,
    dual_hypergroup,
    hypergroup_am,
    report,
)
from .catalog_io import (
    FixtureError,
    ImproperSubgroupError,
    chartable_to_json,
    decimal_str,
    frac_str,
    load_table_for_spec,
    quotient_compare,
    read_perm_file,
    report_to_json,
    resolve_fixture,
    summary_csv,
    survey,
    SurveyStore,
    value_to_json,
)
from .chartab import SplittingError, TableValidationError
from .closed_forms import THEOREMS, ProfileMismatch, verify_theorem
from .groups import DEFAULT_MAX_ORDER, GroupSpecError, NotNormalError, OrderTooLarge, make_group

FORMATS = ("text", "json", "csv")
WHICH = ("za", "zl", "ass", "off", "all")


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    max_order: int = DEFAULT_MAX_ORDER
    tolerance_exponent: int = DEFAULT_TOLERANCE_EXPONENT
    format: str = "text"
    fixtures: list[str] = field(default_factory=list)

    def validate(self) -> None:
        if self.max_order < 1:
            raise UsageError("max_order must be at least 1")
        if self.tolerance_exponent < 10:
            raise UsageError("tolerance exponent must be at least 10")
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None)
    common.add_argument("--max-order", type=int, default=None)
    common.add_argument("--tol-exp", type=int, default=None, help="magnitude tolerance is 10^-TOL_EXP relative")
    common.add_argument("--fixtures", action="append", default=None, help="extra fixture directory (repeatable)")
    common.add_argument("--config", default=None, help="JSON file with max_order, tolerance_exponent, format, fixtures")

    parser = _Parser(prog="centralam", description="Exact central amenability constants of finite groups.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("chartab", parents=[common], help="print the character table")
    p.add_argument("spec")

    p = sub.add_parser("am", parents=[common], help="amenability constants")
    p.add_argument("spec")
    p.add_argument("--which", choices=WHICH, default="all")

    p = sub.add_parser("verify", parents=[common], help="check a closed-form theorem against direct values")
    p.add_argument("spec")
    p.add_argument("theorem", choices=THEOREMS)

    p = sub.add_parser("quotient", parents=[common], help="compare AMZA and ass of G and G/N")
    p.add_argument("spec")
    p.add_argument(
        "gens",
        help="comma-separated element indices generating N, or the name of a normal subgroup stored in a perm fixture",
    )

    p = sub.add_parser("hypergroup", parents=[common], help="amenability constant of a derived hypergroup")
    p.add_argument("spec")
    p.add_argument("--construction", choices=("conj", "dual"), default="conj")

    p = sub.add_parser("survey", parents=[common], help="evaluate many groups into a JSONL store")
    p.add_argument("inputs", nargs="*", help="group specs or *.perm.jsonl packs")
    p.add_argument("--out", required=True, help="store path (appended to)")
    p.add_argument("--quotient", action="append", default=[], metavar="SPEC@GENS", help="also test G vs G/N")
    return parser


def load_config(args: argparse.Namespace) -> CliConfig:
    cfg = CliConfig()
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        unknown = set(data) - {"max_order", "tolerance_exponent", "format", "fixtures"}
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg.max_order = int(data.get("max_order", cfg.max_order))
        cfg.tolerance_exponent = int(data.get("tolerance_exponent", cfg.tolerance_exponent))
        cfg.format = data.get("format", cfg.format)
        cfg.fixtures = list(data.get("fixtures", []))
    if args.max_order is not None:
        cfg.max_order = args.max_order
    if args.tol_exp is not None:
        cfg.tolerance_exponent = args.tol_exp
    if args.format is not None:
        cfg.format = args.format
    if args.fixtures:
        cfg.fixtures = list(args.fixtures) + cfg.fixtures
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def render_value(v: ExactOrEnclosed | Fraction) -> str:
    if isinstance(v, Fraction):
        v = ExactOrEnclosed.of(v)
    if v.exact is not None:
        return f"{frac_str(v.exact)} ({decimal_str(v.exact)})"
    note = "irrational" if v.certified_irrational else "enclosed"
    return f"~{decimal_str(v.midpoint)} ({note}; [{decimal_str(v.lo)}, {decimal_str(v.hi)}])"


def _csv(rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _json(obj: object) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _cyc_text(z) -> str:
    q = z.as_rational()
    if q is not None:
        return str(q)
    parts = []
    for j, c in z.coeffs.items():
        term = f"E({z.conductor})^{j}" if j else "1"
        if c == 1:
            parts.append(term)
        elif c == -1:
            parts.append(f"-{term}")
        else:
            parts.append(f"{c}*{term}")
    return "+".join(parts).replace("+-", "-")


def cmd_chartab(args, cfg: CliConfig) -> str:
    t = load_table_for_spec(args.spec, cfg.max_order, cfg.fixtures)
    if cfg.format == "json":
        return _json(chartable_to_json(t))
    header = ["", *(f"C{c}" for c in range(t.class_count))]
    rows = [
        ["|C|", *t.class_sizes],
        ["ord", *t.class_orders],
        *([f"X{i}", *(_cyc_text(z) for z in row)] for i, row in enumerate(t.values)),
    ]
    if cfg.format == "csv":
        return _csv([header, *rows])
    cells = [header] + [[str(x) for x in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = [f"{t.label}  order {t.order}, {t.class_count} classes"]
    lines += ["  ".join(s.rjust(w) for s, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


def cmd_am(args, cfg: CliConfig) -> str:
    t = load_table_for_spec(args.spec, cfg.max_order, cfg.fixtures)
    r = report(t, cfg.tolerance_exponent)
    quantities = {"za": ("AMZA", r.amza), "zl": ("AMZL", r.amzl), "ass": ("ass", r.ass), "off": ("AMZA_off", r.amza_off)}
    keys = ["za", "zl", "ass", "off"] if args.which == "all" else [args.which]
    if cfg.format == "json":
        if args.which == "all":
            return _json(report_to_json(r))
        return _json({"label": r.label, args.which: value_to_json(quantities[args.which][1])})
    if cfg.format == "csv":
        rows = [["quantity", "exact", "decimal"]]
        for key in keys:
            name, v = quantities[key]
            v = ExactOrEnclosed.of(v) if isinstance(v, Fraction) else v
            rows.append([name, frac_str(v.exact) if v.exact is not None else "", decimal_str(v.midpoint)])
        return _csv(rows)
    if len(keys) == 1:
        return render_value(quantities[keys[0]][1]) + "\n"
    lines = [f"{r.label}  |G| = {r.group_order}, |Z(G)| = {r.center_order}"]
    lines += [f"{quantities[k][0]} = {render_value(quantities[k][1])}" for k in keys]
    return "\n".join(lines) + "\n"


def cmd_verify(args, cfg: CliConfig) -> str:
    t = load_table_for_spec(args.spec, cfg.max_order, cfg.fixtures)
    rec = verify_theorem(t, args.theorem, cfg.tolerance_exponent)
    if cfg.format == "json":
        return _json(rec.to_json())
    if cfg.format == "csv":
        d = rec.to_json()
        keys = ["theorem", "applicable", "closed_form", "direct_amza", "direct_amzl", "equal"]
        return _csv([keys, [d[k] for k in keys]])
    return rec.text() + "\n"


def _parse_gens(spec: str, gens: str, g, cfg: CliConfig) -> list[int]:
    try:
        return [int(x) for x in gens.split(",") if x.strip()]
    except ValueError:
        pass
    if not spec.startswith("perm:"):
        raise UsageError(f"generators must be comma-separated element indices, got {gens!r}")
    pf = read_perm_file(resolve_fixture(spec[5:], cfg.fixtures))
    if gens not in pf.normal_subgroups:
        raise FixtureError(f"fixture has no normal subgroup named {gens!r}")
    return pf.elements_of(g, pf.normal_subgroups[gens])


def cmd_quotient(args, cfg: CliConfig) -> str:
    g = make_group(args.spec, cfg.max_order, cfg.fixtures)
    idx = _parse_gens(args.spec, args.gens, g, cfg)
    if not idx or any(not 0 <= i < g.order for i in idx):
        raise UsageError(f"generator indices must lie in 0..{g.order - 1}")
    cmp = quotient_compare(g, idx)
    if cfg.format == "json":
        return _json(cmp.to_json())
    d = cmp.to_json()
    if cfg.format == "csv":
        keys = list(d)
        return _csv([keys, [d[k] for k in keys]])
    yn = {True: "yes", False: "no"}
    return (
        f"|N| = {cmp.normal_order}, |G/N| = {cmp.quotient_table.order}\n"
        f"AMZA(G) = {render_value(cmp.amza)}\n"
        f"AMZA(G/N) = {render_value(cmp.amza_quotient)}\n"
        f"ass(G) = {render_value(cmp.ass)}\n"
        f"ass(G/N) = {render_value(cmp.ass_quotient)}\n"
        f"AMZA(G) >= AMZA(G/N): {yn[cmp.amza_holds]}\n"
        f"ass(G) >= ass(G/N): {yn[cmp.ass_holds]}\n"
    )


def cmd_hypergroup(args, cfg: CliConfig) -> str:
    t = load_table_for_spec(args.spec, cfg.max_order, cfg.fixtures)
    h = conj_hypergroup(t) if args.construction == "conj" else dual_hypergroup(t)
    v = hypergroup_am(h, cfg.tolerance_exponent)
    if cfg.format == "json":
        return _json(
            {
                "label": h.label,
                "size": h.size,
                "haar": [frac_str(x) for x in h.haar],
                "hyperdimensions": [frac_str(x) for x in h.hyperdimensions],
                "am": value_to_json(v),
            }
        )
    if cfg.format == "csv":
        return _csv([["label", "size", "am"], [h.label, h.size, frac_str(v.exact) if v.exact is not None else decimal_str(v.midpoint)]])
    return f"{h.label}: {h.size} points, AM = {render_value(v)}\n"


def cmd_survey(args, cfg: CliConfig) -> str:
    pairs = []
    for q in args.quotient:
        spec, _, gens = q.rpartition("@")
        if not spec:
            raise UsageError(f"--quotient expects SPEC@GENS, got {q!r}")
        try:
            pairs.append((spec, [int(x) for x in gens.split(",")]))
        except ValueError:
            raise UsageError(f"--quotient generators must be integers, got {gens!r}") from None
    summary = survey(args.inputs, args.out, cfg.max_order, cfg.fixtures, pairs)
    if cfg.format == "json":
        return _json(summary.to_json())
    if cfg.format == "csv":
        return summary_csv(SurveyStore(args.out).records())
    d = summary.to_json()
    lines = [
        f"groups: {d['groups']} ({d['non_abelian']} non-abelian)",
        f"AMZA != AMZL: {d['unequal_count']} (undecided: {d['undecided_count']})",
        f"orders with AMZA != AMZL: {', '.join(map(str, d['unequal_orders'])) or '-'}",
        f"minimum non-abelian AMZA: {d['min_nonabelian_amza'] or '-'}",
        f"quotient violations: {len(d['quotient_violations'])}",
        f"failures: {len(d['failures'])}",
    ]
    lines += [f"  {f}" for f in d["failures"]]
    return "\n".join(lines) + "\n"


COMMANDS = {
    "chartab": cmd_chartab,
    "am": cmd_am,
    "verify": cmd_verify,
    "quotient": cmd_quotient,
    "hypergroup": cmd_hypergroup,
    "survey": cmd_survey,
}

# domain errors and their codes; order matters for subclasses
DOMAIN_ERRORS: tuple[tuple[type, str], ...] = (
    (OrderTooLarge, "order_too_large"),
    (FixtureError, "fixture"),
    (GroupSpecError, "group_spec"),
    (NotNormalError, "not_normal"),
    (ImproperSubgroupError, "improper_subgroup"),
    (TableValidationError, "table_validation"),
    (SplittingError, "splitting"),
    (IntegralityError, "integrality"),
    (HypergroupError, "hypergroup"),
    (ProfileMismatch, "profile"),
)


def _one_line(msg: object) -> str:
    return " ".join(str(msg).split())


def main(argv: Optional[Sequence[str]] = None) -> int:
    out, err = sys.stdout, sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args)
        text = COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"error[usage]: {_one_line(exc)}", file=err)
        return 2
    except Exception as exc:
        for cls, code in DOMAIN_ERRORS:
            if isinstance(exc, cls):
                print(f"error[{code}]: {_one_line(exc)}", file=err)
                return 1
        if isinstance(exc, OSError):
            print(f"error[io]: {_one_line(exc)}", file=err)
            return 1
        raise
    out.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
