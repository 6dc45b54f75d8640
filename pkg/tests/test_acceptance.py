"""Acceptance checks.  Each test prints exactly one PASS/FAIL line."""

import time
from fractions import Fraction

import pytest

from centralam.amenability import (
    center_sum_check,
    conj_hypergroup,
    dual_hypergroup,
    hypergroup_am,
    lemma_blocks_ok,
    report,
)
from centralam.catalog_io import builtin_corpus, iter_perm_pack, quotient_compare, read_perm_file, resolve_fixture
from centralam.chartab import character_table, verify_table
from centralam.closed_forms import GroupProfile, extraspecial_formula, frobenius_formula, verify_theorem
from centralam.groups import make_group

from conftest import PACK_DIR

FIXTURES = ["perm:sg_32_43", "perm:sg_96_204", "perm:sg_192_1022", "perm:sg_256_10070", "perm:sg_567_16"]

_corpus: dict = {}


def verdict(capsys, n: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
    assert ok, detail


def corpus():
    """Tables and reports of every built-in group of order <= 200, computed once."""
    if not _corpus:
        for spec in builtin_corpus(200):
            t = character_table(make_group(spec))
            _corpus[spec] = (t, report(t))
    return _corpus


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_1_published_values(capsys):
    d16, s1 = timed(lambda: report(character_table(make_group("dihedral:16"))))
    sl, s2 = timed(lambda: report(character_table(make_group("sl2:3"))))
    ok = (
        d16.amza.exact == Fraction(43, 16)
        and sl.amza.exact == Fraction(39, 8)
        and sl.amzl.exact == 5
        and s1 < 1
        and s2 < 1
    )
    verdict(capsys, 1, ok, f"AMZA(D16)={d16.amza.exact} ({s1:.2f}s); SL(2,3): AMZA={sl.amza.exact} "
                           f"AMZL={sl.amzl.exact} ({s2:.2f}s)")


def test_criterion_2_fixture_values(capsys):
    t0 = time.perf_counter()
    za32 = report(character_table(make_group("perm:sg_32_43"))).amza.exact
    g = make_group("perm:sg_192_1022")
    pf = read_perm_file(resolve_fixture("sg_192_1022"))
    cmp = quotient_compare(g, pf.elements_of(g, pf.normal_subgroups["N"]))
    t96 = character_table(make_group("perm:sg_96_204"))
    r96 = report(t96)
    # G/N has the order-96 fixture's table invariants and values
    q = cmp.quotient_table
    same = (
        q.order == 96
        and sorted(q.class_sizes) == sorted(t96.class_sizes)
        and sorted(q.degrees) == sorted(t96.degrees)
        and sorted(q.class_orders) == sorted(t96.class_orders)
        and cmp.amza_quotient == r96.amza.exact
        and cmp.ass_quotient == r96.ass
    )
    secs = time.perf_counter() - t0
    ok = (
        za32 == Fraction(259375, 100000)
        and cmp.amza == Fraction(134921875, 10**7)
        and r96.amza.exact == Fraction(1553125, 10**5)
        and cmp.ass == Fraction(72109375, 10**7)
        and r96.ass == Fraction(8265625, 10**6)
        and same
        and not cmp.amza_holds
        and secs < 30
    )
    verdict(capsys, 2, ok, f"AMZA(32,43)={float(za32)}, AMZA(192,1022)={float(cmp.amza)}, "
                           f"AMZA(96,204)={float(r96.amza.exact)}, ass={float(cmp.ass)}/{float(r96.ass)}, "
                           f"G/N matches (96,204): {same}, {secs:.1f}s")


def test_criterion_3_frobenius(capsys):
    t0 = time.perf_counter()
    bad = []
    specs = [f"dihedral:{2 * p}" for p in (3, 5, 7, 11, 13, 31)] + [f"aff:{p}" for p in (3, 5, 7, 13)]
    for spec in specs:
        t = character_table(make_group(spec))
        r = report(t)
        hk = GroupProfile.of(t).frobenius_abelian
        if hk is None or not (r.amza.exact == r.amzl.exact == frobenius_formula(*hk)):
            bad.append(spec)
    secs = time.perf_counter() - t0
    verdict(capsys, 3, not bad and secs < 10, f"{len(specs) - len(bad)}/{len(specs)} Frobenius instances exact, "
                                              f"{secs:.1f}s{'; failed ' + ', '.join(bad) if bad else ''}")


def test_criterion_4_two_sizes(capsys):
    bad = []
    values = {}
    for spec, (p, n) in [("dihedral:8", (2, 1)), ("quaternion:8", (2, 1)), ("heisenberg:3", (3, 1)),
                         ("heisenberg:5", (5, 1))]:
        t = character_table(make_group(spec))
        r = report(t)
        want = extraspecial_formula(p, n)
        recs = [verify_theorem(t, th) for th in ("thm-4.2", "thm-4.4", "thm-4.6")]
        ok = (
            GroupProfile.of(t).extraspecial == (p, n)
            and r.amza.exact == r.amzl.exact == want
            and all(x.applicable and x.equal is True and x.closed_form == want for x in recs)
        )
        values[spec] = r.amza.exact
        if not ok:
            bad.append(spec)
    shown = ", ".join(f"{k}={v}" for k, v in values.items())
    verdict(capsys, 4, not bad, f"closed forms equal direct values: {shown}")


def test_criterion_5_structural_invariants(capsys):
    bad = []
    data = corpus()
    for spec, (t, r) in data.items():
        try:
            verify_table(t)
            checks = [
                lemma_blocks_ok(t),
                r.divisibility_ok,
                center_sum_check(t) == 1,
                r.ass <= r.amza.exact and r.ass <= r.amzl.hi,
                t.is_abelian == (r.amza.exact == 1),
            ]
        except Exception as exc:  # a raised check is a failed check
            checks = [False]
            bad.append(f"{spec} ({exc})")
            continue
        if not all(checks):
            bad.append(spec)
    verdict(capsys, 5, not bad, f"{len(data) - len(bad)}/{len(data)} corpus groups of order <= 200 satisfy all "
                                f"invariants{'; failed ' + ', '.join(bad[:5]) if bad else ''}")


def test_criterion_6_hypergroup_duality(capsys):
    bad = []
    count = 0
    for spec, (t, r) in corpus().items():
        if t.order > 100:
            continue
        count += 1
        zl = hypergroup_am(conj_hypergroup(t))
        za = hypergroup_am(dual_hypergroup(t))
        if zl.exact is None or zl.exact != r.amzl.exact or za.exact != r.amza.exact:
            bad.append(spec)
    verdict(capsys, 6, not bad, f"{count - len(bad)}/{count} corpus groups of order <= 100 match both hypergroup "
                                f"constants{'; failed ' + ', '.join(bad[:5]) if bad else ''}")


def test_criterion_7_gap_probe(capsys):
    values = {spec: r.amza.exact for spec, (t, r) in corpus().items() if not t.is_abelian}
    for spec in FIXTURES:
        t = character_table(make_group(spec))
        values[spec] = report(t).amza.exact
    low = min(values.values())
    minimizers = sorted(s for s, v in values.items() if v == low)
    between = sorted(s for s, v in values.items() if 1 < v < Fraction(7, 4))
    ok = low == Fraction(7, 4) and {"dihedral:8", "quaternion:8"} <= set(minimizers) and not between
    verdict(capsys, 7, ok, f"min non-abelian AMZA over {len(values)} groups = {low}, attained by "
                           f"{', '.join(minimizers)}; none in (1, 7/4): {not between}")


@pytest.mark.skipif(not (PACK_DIR / "order_lt_100.perm.jsonl").exists(), reason="external fixture pack absent")
def test_criterion_8_full_survey(capsys):
    t0 = time.perf_counter()
    nonab = 0
    unequal_orders = set()
    unequal = 0
    undecided = 0
    for pf in iter_perm_pack(PACK_DIR / "order_lt_100.perm.jsonl"):
        t = character_table(pf.group())
        if t.is_abelian:
            continue
        nonab += 1
        flag = report(t).equal_flag
        undecided += flag is None
        if flag is False:
            unequal += 1
            unequal_orders.add(t.order)
    odd_unequal = []
    odd_path = PACK_DIR / "odd_order.perm.jsonl"
    if odd_path.exists():
        for pf in iter_perm_pack(odd_path):
            t = character_table(pf.group())
            if not t.is_abelian and report(t).equal_flag is False:
                odd_unequal.append((t.order, pf.label))
    secs = time.perf_counter() - t0
    smallest_odd = min(odd_unequal)[0] if odd_unequal else None
    odd_ok = smallest_odd == 567 and ("567", "SmallGroup(567,16)") in {(str(o), l) for o, l in odd_unequal}
    ok = (
        nonab == 851
        and unequal == 173
        and undecided == 0
        and unequal_orders == {24, 48, 60, 64, 72, 80, 96}
        and odd_ok
        and secs < 600
    )
    verdict(capsys, 8, ok, f"{unequal} of {nonab} non-abelian groups of order < 100 have AMZA != AMZL at orders "
                           f"{sorted(unequal_orders)}; smallest odd-order example has order {smallest_odd}; "
                           f"{secs:.0f}s")
