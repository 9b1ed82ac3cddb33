"""Acceptance criteria 1-13.

Each test records one line in the acceptance summary printed at the end of
the pytest run (and echoes it immediately with -s).  Criteria 7 (r=2 tier),
8 and 9 are the slow tier; together the module takes several minutes.
"""

import json
import time

import pytest

from conftest import ACCEPTANCE
from hamlie.cli import parse_poly
from hamlie.gf import field_create
from hamlie.ham import HamCtx, d_H, ham_basis
from hamlie.lab import ExperimentConfig, density, diff_rank, escan, torus_restrict, verify_suite
from hamlie.pinv import xi, xi_charpoly, xi_phi


def record(k: int, name: str, ok: bool, detail: str = ""):
    ACCEPTANCE[k] = (name, bool(ok), detail)
    print(f"criterion {k:2d} {name}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def failures(rep):
    return {c.name: c.failures for c in rep.checks if c.failures}


def test_01_dimensions():
    t = time.monotonic()
    sizes = {(p, r): len(ham_basis(HamCtx(field_create(p), r))) for p, r in [(5, 1), (5, 2), (7, 1)]}
    rep = verify_suite(["dims"], ExperimentConfig(p=5, r=1))
    dt = time.monotonic() - t
    ok = sizes == {(5, 1): 23, (5, 2): 623, (7, 1): 47} and rep.passed and dt < 60
    record(1, "dimensions", ok, f"{sizes} in {dt:.1f}s")


def test_02_chi_shape():
    rep = verify_suite(["chi_shape"], ExperimentConfig(p=5, r=1, m=2, samples=200))
    c = rep.checks[0]
    record(2, "chi shape", rep.passed and c.population == 200, f"{c.population} derivations in W_2(F_25)")


def test_03_lemma31():
    parts = []
    ok = True
    for p, r in [(5, 1), (5, 2), (7, 1)]:
        rep = verify_suite(["lemma31"], ExperimentConfig(p=p, r=r, samples=200))
        low, cross = rep.checks
        ok &= rep.passed and low.population == 200
        parts.append(f"(p={p},r={r}) cross-checked {cross.population}")
    record(3, "psi vanishing and cross route", ok, "; ".join(parts))


def test_04_spot_value():
    f = parse_poly("x1*x2", 5, 2)
    D = d_H(f)
    a, b = xi_charpoly(D), xi_phi(D, f)
    record(4, "xi_0(D_H(x1 x2)) = 4", a == (4,) and b == (4,) and xi(D) == (4,), f"charpoly {a}, phi {b}")


def test_05_invariance():
    reps = [verify_suite(["invariance"], ExperimentConfig(p=5, r=1, m=m, samples=100)) for m in (1, 2)]
    ok = all(r.passed and r.checks[0].population == 100 for r in reps)
    record(5, "xi invariance under G_H", ok, "100 pairs over F_5 and 100 over F_25")


def test_06_lemma32():
    reps = [verify_suite(["lemma32"], ExperimentConfig(p=5, r=1, m=m, samples=500, seed=1)) for m in (1, 2)]
    nil = [r.checks[0].stats["nilpotent"] for r in reps]
    ok = all(r.passed and r.checks[0].population == 500 for r in reps)
    record(6, "nilpotent biconditional", ok, f"nilpotent counts q=5: {nil[0]}, q=25: {nil[1]}")


def test_07_escan():
    out = []
    ok = True
    for p, r, m, pop in [(5, 1, 1, 125), (5, 1, 2, 15625), (5, 2, 1, 625)]:
        t0 = time.monotonic()
        rep = escan(ExperimentConfig(p=p, r=r, m=m))
        nil = rep.checks[0]
        ok &= rep.passed and nil.population == pop and not nil.stats["partial"]
        ok &= nil.stats["dim_E"] == r + 2
        out.append(f"q={p ** m},r={r}: {nil.population} scanned, {nil.stats['nilpotent']} nilpotent, "
                   f"{time.monotonic() - t0:.0f}s")
        if r == 2:
            ok &= time.monotonic() - t0 < 600
    record(7, "E-scan", ok, "; ".join(out))


@pytest.mark.slow
def test_08_diff_rank():
    a = diff_rank(ExperimentConfig(p=5, r=1, m=2, samples=100))
    b = diff_rank(ExperimentConfig(p=5, r=2, m=3, samples=25))
    ok = a.passed and b.passed and a.checks[0].population == 100 and b.checks[0].population == 25
    record(8, "differential rank on V", ok,
           f"r=1: {a.checks[0].population} points; r=2: {b.checks[0].population} points, "
           f"max columns {b.checks[0].stats['columns_max']}")


@pytest.mark.slow
def test_09_density():
    runs = [
        (ExperimentConfig(p=5, r=1, m=1, samples=20000, seed=7), True),
        (ExperimentConfig(p=5, r=1, m=2, samples=20000, seed=7), True),
        (ExperimentConfig(p=5, r=2, m=1, samples=2000, seed=7), False),
    ]
    ok = True
    parts = []
    for cfg, ci_rule in runs:
        rep = density(cfg)
        s = rep.checks[0].stats
        ok &= rep.passed
        if ci_rule:
            ok &= s["ci_width_over_window"] <= 0.2
        parts.append(f"q={cfg.p ** cfg.m},r={cfg.r}: {s['fraction']:.4f} in {s['window']} ci {s['ci95']}")
    record(9, "density", ok, "; ".join(parts))


def test_10_beta():
    reps = [verify_suite(["beta"], ExperimentConfig(p=5, r=r, samples=100)) for r in (1, 2)]
    ok = all(r.passed for r in reps) and reps[0].checks[0].population == 100
    ranks = [r.checks[1].stats["rank"] for r in reps]
    record(10, "beta battery", ok, f"W_r ranks {ranks}")


def test_11_lift():
    rep = verify_suite(["lift"], ExperimentConfig(p=5, r=1, samples=100))
    comp = rep.checks[-1].stats["reversed_order"]
    ok = rep.passed and all(c.population == 100 for c in rep.checks[:5])
    record(11, "lift battery", ok, f"composition order reversed in {comp}/20 probes; failures {failures(rep)}")


def test_12_torus():
    a = torus_restrict(ExperimentConfig(p=5, r=1, m=2))
    table = a.checks[0].table
    ok1 = a.passed and table == [{"i": 0, "exponents": "4", "coefficient": "4"}]
    b = torus_restrict(ExperimentConfig(p=5, r=2, m=3))
    inv = b.checks[2]
    ok2 = b.passed and b.checks[3].stats["degrees"] == [24, 20] and inv.population == 100
    record(12, "torus restriction and Dickson", ok1 and ok2,
           f"r=1: 4c^4; r=2 Dickson scalars {b.checks[3].stats['scalars']}")


def _strip(text):
    d = json.loads(text)
    d.pop("elapsed_ms")
    return json.dumps(d)


def test_13_determinism():
    cfgs = [
        ("escan", lambda: escan(ExperimentConfig(p=5, r=1))),
        ("density", lambda: density(ExperimentConfig(p=5, r=1, samples=300, seed=11))),
        ("diffrank", lambda: diff_rank(ExperimentConfig(p=5, r=1, m=2, samples=3, seed=2))),
        ("torus", lambda: torus_restrict(ExperimentConfig(p=5, r=1, m=2))),
        ("verify", lambda: verify_suite(["lemma31", "lift"], ExperimentConfig(samples=5, seed=4))),
    ]
    ok = True
    for _, fn in cfgs:
        a, b = fn(), fn()
        ok &= _strip(a.to_json()) == _strip(b.to_json())
        ok &= a.to_text() == b.to_text() and a.to_csv() == b.to_csv()
        lines_a = [ln for ln in a.to_json().splitlines() if '"elapsed_ms"' not in ln]
        lines_b = [ln for ln in b.to_json().splitlines() if '"elapsed_ms"' not in ln]
        ok &= lines_a == lines_b
    record(13, "determinism", ok, f"{len(cfgs)} report kinds re-run byte-identical")
