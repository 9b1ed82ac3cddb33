"""Seeded experiments: E-scans, point densities, differential ranks, torus restrictions.

Every experiment returns a ``Report``.  Per-sample randomness comes from
``np.random.default_rng([seed, index, ...])`` so results do not depend on
evaluation order.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .aut import (
    AlgebraMap,
    ad_action,
    ad_orientation,
    ad_oriented,
    adh_formula_check,
    bracket_characterization,
    diagram_check,
    gh_test,
    glr_act,
    lift_composition,
    lift_mu,
    orientation_probe,
    pullback_eval,
    random_aut,
    scaling,
)
from .bn import TruncPoly, form_apply_algmap, form_apply_derivation, layout
from .errors import BudgetExceeded, Inconsistent, PreconditionError
from .gf import EchelonBasis, FieldCtx, Scalar, field_create, rank, solve_linear
from .ham import (
    HamCtx,
    d_H,
    delta,
    derived_span_dim,
    dims_report,
    ham_basis,
    pair_potentials,
    random_element,
    simplicity_probe,
    special_u_v,
    torus_element,
    torus_TH,
    torus_TW,
)
from .pinv import (
    directional_derivatives,
    in_U,
    in_V,
    phi_solve,
    pmap,
    relation_check,
    xi,
    xi_charpoly,
    xi_phi,
)
from .wn import (
    Derivation,
    basis as wn_basis,
    bracket,
    char_poly_of,
    is_p_semisimple,
    p_power,
    p_power_iter,
    psi,
    psi_from_charpoly,
)

SCHEMA_VERSION = "1"


def rng_for(seed: int, *idx: int) -> np.random.Generator:
    return np.random.default_rng([seed, *idx])


@dataclass
class ExperimentConfig:
    p: int = 5
    r: int = 1
    m: int = 1
    seed: int = 0
    samples: int = 100
    method: str = "auto"
    max_elements: int | None = None
    max_seconds: float | None = None
    fault: str | None = None
    window: tuple[float, float] = (0.5, 1.5)

    def __post_init__(self):
        field_create(self.p, self.m)
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def ctx(self) -> FieldCtx:
        return field_create(self.p, self.m)

    @property
    def hctx(self) -> HamCtx:
        return HamCtx(self.ctx, self.r)

    def params(self) -> dict:
        d = asdict(self)
        for k in ("p", "r", "m", "seed", "samples"):
            d.pop(k)
        d["window"] = list(d["window"])
        return d


@dataclass
class Check:
    name: str
    population: int = 0
    failures: int = 0
    witness: str | None = None
    stats: dict = field(default_factory=dict)
    table: list[dict] | None = None

    def fail(self, witness: str):
        if self.failures == 0:
            self.witness = witness
        self.failures += 1

    def to_dict(self) -> dict:
        d = {"name": self.name, "population": self.population, "failures": self.failures}
        if self.failures:
            d["witness"] = self.witness
        if self.stats:
            d["stats"] = self.stats
        return d


@dataclass
class Report:
    command: str
    cfg: ExperimentConfig
    checks: list[Check] = field(default_factory=list)
    elapsed_ms: int = 0
    header: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.failures == 0 for c in self.checks)

    def to_dict(self) -> dict:
        c = self.cfg
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "p": c.p,
            "r": c.r,
            "m": c.m,
            "seed": c.seed,
            "samples": c.samples,
            "code_version": __version__,
            "params": {**c.params(), **self.header},
            "checks": [ch.to_dict() for ch in self.checks],
            "pass": self.passed,
            "elapsed_ms": self.elapsed_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        c = self.cfg
        lines = [f"{self.command}: p={c.p} r={c.r} m={c.m} seed={c.seed} samples={c.samples}"]
        for ch in self.checks:
            status = "ok" if ch.failures == 0 else "FAIL"
            lines.append(f"  [{status}] {ch.name}: {ch.failures}/{ch.population} failures")
            if ch.failures:
                lines.append(f"      witness: {ch.witness}")
            for k, v in ch.stats.items():
                lines.append(f"      {k}: {v}")
        lines.append("pass" if self.passed else "FAILED")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        tables = [ch for ch in self.checks if ch.table]
        if tables:
            keys = ["check"] + sorted({k for ch in tables for row in ch.table for k in row})
            w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
            w.writeheader()
            for ch in tables:
                for row in ch.table:
                    w.writerow({"check": ch.name, **row})
        else:
            scalar_keys = sorted({k for ch in self.checks for k, v in ch.stats.items()
                                  if isinstance(v, (int, float, str, bool)) or v is None})
            keys = ["name", "population", "failures"] + scalar_keys
            w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n", extrasaction="ignore")
            w.writeheader()
            for ch in self.checks:
                w.writerow({"name": ch.name, "population": ch.population, "failures": ch.failures,
                            **{k: v for k, v in ch.stats.items() if k in scalar_keys}})
        return buf.getvalue()


class _Clock:
    def __init__(self, cfg: ExperimentConfig):
        self.t0 = time.monotonic()
        self.cfg = cfg

    def over(self, count: int) -> bool:
        c = self.cfg
        if c.max_elements is not None and count >= c.max_elements:
            return True
        return c.max_seconds is not None and time.monotonic() - self.t0 > c.max_seconds

    def ms(self) -> int:
        return int(round((time.monotonic() - self.t0) * 1000))


def _fmt_codes(ctx: FieldCtx, codes) -> str:
    return "(" + ", ".join(ctx.format(int(c)) for c in codes) + ")"


def _fmt_xi(v) -> list[str]:
    return [repr(s) for s in v]


# -- E-scan -------------------------------------------------------------------


def escan(cfg: ExperimentConfig) -> Report:
    """Walk all of E = <D_H(u), D_H(v), D_H(x_i x_{r+i})> over F_q.

    Checks that nilpotent members are 0 or lie in V, and the two branches:
    (lambda, mu) != 0 gives a potential in U, (lambda, mu) = 0 gives a
    [p]-semisimple element.
    """
    clock = _Clock(cfg)
    hctx, ctx = cfg.hctx, cfg.ctx
    u, v = special_u_v(hctx)
    gens = [u, v] + pair_potentials(hctx)
    total = ctx.q ** len(gens)
    nil = Check("nilpotent_in_V")
    branch_u = Check("branch_U")
    branch_ss = Check("branch_semisimple")
    count = nil_count = 0
    partial = False
    for coeffs in itertools.product(range(ctx.q), repeat=len(gens)):
        if clock.over(count):
            partial = True
            break
        count += 1
        f = TruncPoly.zero(ctx, hctx.n)
        for c, g in zip(coeffs, gens):
            if c:
                f = f + g * Scalar(ctx, c)
        D = d_H(f)
        tag = _fmt_codes(ctx, coeffs)
        if coeffs[0] or coeffs[1]:
            branch_u.population += 1
            if not in_U(f):
                branch_u.fail(f"coefficients {tag}")
        else:
            branch_ss.population += 1
            if not is_p_semisimple(D):
                branch_ss.fail(f"coefficients {tag}")
        is_nil = all(x == 0 for x in xi(D, cfg.method))
        nil.population += 1
        if is_nil:
            nil_count += 1
            if not D.is_zero() and not in_V(D):
                nil.fail(f"coefficients {tag}")
    nil.stats = {"scanned": count, "expected_population": total, "nilpotent": nil_count,
                 "dim_E": rank(np.stack([d_H(g).vector for g in gens]), ctx), "partial": partial}
    rep = Report("escan", cfg, [nil, branch_u, branch_ss])
    rep.elapsed_ms = clock.ms()
    return rep


# -- density ---------------------------------------------------------------------


def wilson_interval(hits: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if n == 0:
        return (0.0, 1.0)
    ph = hits / n
    den = 1 + z * z / n
    centre = (ph + z * z / (2 * n)) / den
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / den
    return (centre - half, centre + half)


def density(cfg: ExperimentConfig) -> Report:
    """Fraction of uniform samples of H_n(F_q) on which every xi_i vanishes."""
    clock = _Clock(cfg)
    hctx, ctx = cfg.hctx, cfg.ctx
    hits = done = 0
    partial = False
    for i in range(cfg.samples):
        if clock.over(done):
            partial = True
            break
        e = random_element(hctx, rng_for(cfg.seed, i))
        if all(x == 0 for x in xi(e.D, cfg.method)):
            hits += 1
        done += 1
    target = ctx.q ** (-cfg.r)
    lo, hi = cfg.window[0] * target, cfg.window[1] * target
    frac = hits / done if done else float("nan")
    ci = wilson_interval(hits, done)
    chk = Check("density", population=done)
    if not lo <= frac <= hi:
        chk.fail(f"fraction {frac:.6f} outside [{lo:.6f}, {hi:.6f}]")
    chk.stats = {
        "hits": hits,
        "fraction": round(frac, 9),
        "target": round(target, 9),
        "window": [round(lo, 9), round(hi, 9)],
        "ci95": [round(ci[0], 9), round(ci[1], 9)],
        "ci_width_over_window": round((ci[1] - ci[0]) / (hi - lo), 6),
        "partial": partial,
    }
    rep = Report("density", cfg, [chk])
    rep.elapsed_ms = clock.ms()
    return rep


# -- differential rank on V ---------------------------------------------------------


def sample_V(hctx: HamCtx, rng: np.random.Generator, cap: int = 100_000):
    for attempt in range(cap):
        e = random_element(hctx, rng)
        if in_V(e.D):
            return e, attempt
    raise BudgetExceeded(f"no element of V found in {cap} draws")


def diff_rank(cfg: ExperimentConfig) -> Report:
    """Rank of [(d xi_i)_x (b_j)] over the H_n basis at sampled x in V.

    For r = 1 the full row is computed.  For r >= 2 columns are added in a
    seeded random order until the rank reaches r; a nonzero r x r minor is
    already an exact certificate.
    """
    clock = _Clock(cfg)
    hctx, ctx = cfg.hctx, cfg.ctx
    basis = [b.D for b in ham_basis(hctx)]
    chk = Check("rank_r")
    cols_used = []
    rejections = 0
    partial = False
    for i in range(cfg.samples):
        if clock.over(i):
            partial = True
            break
        x, rej = sample_V(hctx, rng_for(cfg.seed, i))
        rejections += rej
        order = rng_for(cfg.seed, i, 1).permutation(len(basis)) if cfg.r > 1 else range(len(basis))
        span = EchelonBasis(ctx, cfg.r)
        used = 0
        for j in order:
            col = directional_derivatives(x.D, basis[j], cfg.method)
            used += 1
            span.add([s.code for s in col])
            if cfg.r > 1 and len(span) == cfg.r:
                break
        cols_used.append(used)
        chk.population += 1
        if len(span) != cfg.r:
            chk.fail(f"sample {i}: rank {len(span)}")
    chk.stats = {
        "rejections": rejections,
        "columns_max": max(cols_used) if cols_used else 0,
        "columns_mean": round(sum(cols_used) / len(cols_used), 6) if cols_used else 0,
        "partial": partial,
    }
    rep = Report("diffrank", cfg, [chk])
    rep.elapsed_ms = clock.ms()
    return rep


# -- torus restriction and Dickson invariants ------------------------------------------


def _upoly_mul(a: list[int], b: list[int], ctx: FieldCtx) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = int(ctx.add_t[out[i + j], ctx.mul_t[x, y]])
    return out


def dickson_oracle(p: int, r: int, point, ctx: FieldCtx) -> list[Scalar]:
    """Coefficients at X^(p^i), i < r, of prod_{w in F_p^r} (X - w . c)."""
    c = [int(x) for x in point]
    prod = [1]
    for w in itertools.product(range(p), repeat=r):
        lin = 0
        for wj, cj in zip(w, c):
            lin = int(ctx.add_t[lin, ctx.mul_t[wj, cj]])
        prod = _upoly_mul(prod, [int(ctx.neg_t[lin]), 1], ctx)
    return [Scalar(ctx, prod[p**i]) for i in range(r)]


def homogeneous_monomials(r: int, d: int) -> list[tuple[int, ...]]:
    return [e for e in itertools.product(range(d + 1), repeat=r) if sum(e) == d]


def eval_monomials(monos, pts: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """(len(pts), len(monos)) matrix of monomial values."""
    out = np.ones((len(pts), len(monos)), dtype=np.int64)
    for k, e in enumerate(monos):
        col = np.ones(len(pts), dtype=np.int64)
        for j, ej in enumerate(e):
            if ej:
                col = ctx.mul_t[col, ctx.pow_array(pts[:, j].copy(), ej)]
        out[:, k] = col
    return out


def eval_poly(monos, coeffs, pts: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    V = eval_monomials(monos, pts, ctx)
    acc = np.zeros(len(pts), dtype=np.int64)
    for k, c in enumerate(coeffs):
        if c:
            acc = ctx.add_t[acc, ctx.mul_t[c][V[:, k]]]
    return acc


def fit_homogeneous(monos, pts: np.ndarray, vals: np.ndarray, ctx: FieldCtx) -> np.ndarray | None:
    """Exact coefficients of the homogeneous polynomial through (pts, vals), or None if not unique."""
    sol = solve_linear(eval_monomials(monos, pts, ctx), vals, ctx)
    return sol.x if sol.unique else None


def random_glr(p: int, r: int, rng: np.random.Generator, ctx: FieldCtx) -> np.ndarray:
    while True:
        g = rng.integers(0, p, size=(r, r))
        if rank(g, ctx):
            if rank(g, ctx) == r:
                return g


def torus_restrict(cfg: ExperimentConfig, n_glr: int = 50, extra_points: int = 4,
                   fresh_points: int = 8, diagram_points: int = 3) -> Report:
    """Interpolate xi_i on T_H and compare with GL_r(F_p)-invariants."""
    clock = _Clock(cfg)
    hctx, ctx = cfg.hctx, cfg.ctx
    p, r = cfg.p, cfg.r
    if ctx.q <= p**r:
        from .errors import FieldTooSmall

        raise FieldTooSmall(f"torus interpolation needs q > p^r = {p ** r}")
    degs = [p**r - p**i for i in range(r)]
    monos = [homogeneous_monomials(r, d) for d in degs]
    need = max(len(mo) for mo in monos) + extra_points
    rng = rng_for(cfg.seed, 0)
    pts = ctx.random(rng, (need + fresh_points, r))

    def xi_at(c) -> list[int]:
        return [s.code for s in xi_charpoly(torus_element(hctx, [Scalar(ctx, int(x)) for x in c]))]

    vals = np.array([xi_at(c) for c in pts], dtype=np.int64)
    fit_pts, fresh = pts[:need], pts[need:]
    interp = Check("interpolation")
    residual = Check("fresh_residual")
    invariance = Check("glr_invariance")
    dickson = Check("dickson_multiple")
    diagram = Check("diagram_pullback")
    coeffs = []
    table = []
    for i in range(r):
        interp.population += 1
        co = fit_homogeneous(monos[i], fit_pts, vals[:need, i], ctx)
        if co is None:
            interp.fail(f"xi_{i}: interpolation not unique")
            coeffs.append(None)
            continue
        coeffs.append(co)
        for e, c in zip(monos[i], co):
            if c:
                table.append({"i": i, "exponents": " ".join(map(str, e)), "coefficient": ctx.format(int(c))})
        residual.population += len(fresh)
        pred = eval_poly(monos[i], co, fresh, ctx)
        bad = np.flatnonzero(pred != vals[need:, i])
        for k in bad:
            residual.fail(f"xi_{i} at {_fmt_codes(ctx, fresh[k])}")
    interp.table = table
    # GL_r(F_p): zero test of P(g c) - P(c) on a grid S^r with |S| > degree
    grid_side = max(degs) + 1
    S = np.arange(grid_side, dtype=np.int64)
    grid = np.array(list(itertools.product(S, repeat=r)), dtype=np.int64)
    glr_rng = rng_for(cfg.seed, 1)
    for _ in range(n_glr):
        g = random_glr(p, r, glr_rng, ctx)
        moved = glr_act(g, grid.T, ctx).T
        for i, co in enumerate(coeffs):
            if co is None:
                continue
            invariance.population += 1
            if not np.array_equal(eval_poly(monos[i], co, moved, ctx), eval_poly(monos[i], co, grid, ctx)):
                invariance.fail(f"xi_{i} under g = {g.tolist()}")
    # Dickson oracle: P_i must be a nonzero multiple of the Dickson coefficient
    dvals = np.array([[s.code for s in dickson_oracle(p, r, c, ctx)] for c in fit_pts], dtype=np.int64)
    scalars = []
    for i, co in enumerate(coeffs):
        if co is None:
            continue
        dickson.population += 1
        dco = fit_homogeneous(monos[i], fit_pts, dvals[:, i], ctx)
        lam = _proportionality(co, dco, ctx) if dco is not None else None
        if lam is None:
            dickson.fail(f"xi_{i} is not a nonzero multiple of the Dickson generator")
            scalars.append(None)
        else:
            scalars.append(ctx.format(lam))
    dickson.stats = {"scalars": scalars, "degrees": degs}
    # diagram: xi(beta(t)) on T_W agrees with the interpolated restriction
    wgens = torus_TW(r, ctx)
    d_rng = rng_for(cfg.seed, 2)
    for _ in range(diagram_points):
        c = ctx.random(d_rng, r)
        t = Derivation.zero(ctx, r)
        for cj, w in zip(c, wgens):
            t = t + w * Scalar(ctx, int(cj))
        got = pullback_eval(t)
        diagram.population += 1
        for i, co in enumerate(coeffs):
            if co is None:
                continue
            want = int(eval_poly(monos[i], co, c[None, :], ctx)[0])
            if got[i].code != want:
                diagram.fail(f"xi_{i} at {_fmt_codes(ctx, c)}")
    rep = Report("torus", cfg, [interp, residual, invariance, dickson, diagram])
    rep.elapsed_ms = clock.ms()
    return rep


def _proportionality(a: np.ndarray, b: np.ndarray, ctx: FieldCtx) -> int | None:
    """lambda != 0 with a = lambda b, or None."""
    nz = np.flatnonzero(b)
    if not len(nz) or not np.array_equal(np.flatnonzero(a), nz):
        return None
    lam = int(ctx.mul_t[a[nz[0]], ctx.inv_t[b[nz[0]]]])
    return lam if np.array_equal(ctx.mul_t[lam][b], a) else None


# -- invariant batteries -------------------------------------------------------------------


def _random_gh(hctx: HamCtx, rng: np.random.Generator, k: int) -> tuple[AlgebraMap, Scalar]:
    """Alternate between lifts, scalings and their composites."""
    ctx = hctx.ctx
    kind = k % 3
    if kind == 0:
        return lift_mu(random_aut(ctx, hctx.r, rng))
    a = Scalar(ctx, int(rng.integers(1, ctx.q)))
    sc = scaling(hctx, a)
    if kind == 1:
        return sc, a
    mt, alpha = lift_mu(random_aut(ctx, hctx.r, rng))
    from .aut import make_aut

    comp = make_aut(sc.compose(mt).images)
    return comp, alpha * a


def battery_dims(cfg: ExperimentConfig) -> list[Check]:
    hctx = cfg.hctx
    out = Check("dims", population=1)
    size = len(ham_basis(hctx))
    rep = dims_report(hctx)
    if size != hctx.N - 2 or rep["dim_H"] != hctx.N - 2:
        out.fail(f"basis size {size}, rank {rep['dim_H']}")
    if rep["dim_H_prime"] != hctx.N - 1 or rep["kernel_dim"] != 1:
        out.fail(f"dim H' {rep['dim_H_prime']}, kernel {rep['kernel_dim']}")
    out.stats = {"basis_size": size, **rep}
    if hctx.N <= 49:
        dspan, inside = derived_span_dim(hctx)
        out.stats["derived_span"] = dspan
        if dspan != hctx.N - 2 or not inside:
            out.fail(f"derived span {dspan}, inside H {inside}")
    return [out]


def battery_chi_shape(cfg: ExperimentConfig) -> list[Check]:
    from .errors import ShapeViolation

    ctx, n = cfg.ctx, 2 * cfg.r
    out = Check("chi_shape")
    for k in range(cfg.samples):
        D = Derivation.random(ctx, n, rng_for(cfg.seed, k))
        out.population += 1
        try:
            psi(D)
        except ShapeViolation as e:
            out.fail(f"sample {k}: {e}")
    return [out]


def battery_lemma31(cfg: ExperimentConfig) -> list[Check]:
    hctx, ctx = cfg.hctx, cfg.ctx
    r, p = cfg.r, cfg.p
    low = Check("psi_low_vanish")
    cross = Check("psi_phi_cross")
    undetermined = 0
    for k in range(cfg.samples):
        f = TruncPoly.random(ctx, hctx.n, rng_for(cfg.seed, k))
        ps = psi(d_H(f))
        low.population += 1
        if any(ps[i] != 0 for i in range(r)):
            low.fail(f"sample {k}: psi = {list(ps)}")
        sol = phi_solve(f, r, "tilde")
        for i in range(r):
            val = sol.value(p**r - p**i)
            if val is None:
                undetermined += 1
                continue
            cross.population += 1
            if val ** (p**r) != ps[r + i]:
                cross.fail(f"sample {k}, i = {i}")
    cross.stats = {"undetermined": undetermined}
    return [low, cross]


def battery_lemma32(cfg: ExperimentConfig) -> list[Check]:
    """All xi zero <=> chi = t^(p^n) <=> D^[p^n] = 0."""
    hctx = cfg.hctx
    out = Check("nilpotent_biconditional")
    nil = 0
    for k in range(cfg.samples):
        e = random_element(hctx, rng_for(cfg.seed, k))
        chi = char_poly_of(e.D)
        ps = psi_from_charpoly(chi, hctx.n)
        from .gf import proot

        xi_zero = all(proot(ps[hctx.r + i], hctx.r) == 0 for i in range(hctx.r))
        op_nil = chi.support() == [hctx.N]
        iter_nil = p_power_iter(e.D, hctx.n).is_zero()
        out.population += 1
        nil += xi_zero
        if not (xi_zero == op_nil == iter_nil):
            out.fail(f"sample {k}: xi {xi_zero}, chi {op_nil}, iterate {iter_nil}")
        vals = xi_phi(e.D, e.f)
        for i, v in enumerate(vals):
            if v is not None and v != proot(ps[hctx.r + i], hctx.r):
                out.fail(f"sample {k}: phi route disagrees at xi_{i}")
    out.stats = {"nilpotent": nil}
    return [out]


def battery_invariance(cfg: ExperimentConfig) -> list[Check]:
    hctx = cfg.hctx
    out = Check("xi_invariance")
    for k in range(cfg.samples):
        rng = rng_for(cfg.seed, k)
        mu, _ = _random_gh(hctx, rng, k)
        e = random_element(hctx, rng)
        out.population += 1
        a, b = xi(ad_action(mu, e.D), cfg.method), xi(e.D, cfg.method)
        if a != b:
            out.fail(f"sample {k}: {_fmt_xi(a)} != {_fmt_xi(b)}")
    return [out]


def battery_pmap(cfg: ExperimentConfig) -> list[Check]:
    hctx, ctx = cfg.hctx, cfg.ctx
    out = Check("pmap_compatible")
    for k in range(cfg.samples):
        f = TruncPoly.random(ctx, hctx.n, rng_for(cfg.seed, k))
        g = pmap(f)
        out.population += 1
        if d_H(g) != p_power(d_H(f)) or g.coeffs[0]:
            out.fail(f"sample {k}")
    return [out]


def battery_delta(cfg: ExperimentConfig) -> list[Check]:
    hctx = cfg.hctx
    out = Check("delta_section")
    for k in range(cfg.samples):
        e = random_element(hctx, rng_for(cfg.seed, k))
        out.population += 1
        f = delta(e.D)
        if d_H(f) != e.D or f != e.f:
            out.fail(f"sample {k}")
    return [out]


def battery_beta(cfg: ExperimentConfig) -> list[Check]:
    ctx, r = cfg.ctx, cfg.r
    from .aut import beta

    hom = Check("beta_bracket_pmap")
    for k in range(cfg.samples):
        rng = rng_for(cfg.seed, k)
        D, E = Derivation.random(ctx, r, rng), Derivation.random(ctx, r, rng)
        hom.population += 1
        if beta(bracket(D, E)) != bracket(beta(D), beta(E)):
            hom.fail(f"sample {k}: bracket")
        elif beta(p_power(D)) != p_power(beta(D)):
            hom.fail(f"sample {k}: p-map")
    inj = Check("beta_injective", population=1)
    wb = wn_basis(ctx, r)
    rk = rank(np.stack([beta(D).vector for D in wb]), ctx)
    inj.stats = {"rank": rk, "dim_W": len(wb)}
    if rk != len(wb):
        inj.fail(f"rank {rk} < {len(wb)}")
    tor = Check("beta_torus", population=r)
    for i, (w, t) in enumerate(zip(torus_TW(r, ctx), torus_TH(cfg.hctx))):
        if beta(w) != t:
            tor.fail(f"generator {i + 1}")
    return [hom, inj, tor]


def battery_lift(cfg: ExperimentConfig) -> list[Check]:
    hctx, ctx, r = cfg.hctx, cfg.ctx, cfg.r
    form = Check("lift_form")
    pair = Check("lift_pairing")
    inv = Check("lift_inverse")
    cor = Check("lift_adh")
    diag = Check("lift_diagram")
    comp = Check("lift_composition")
    reversed_count = 0
    om = hctx.omega
    for k in range(cfg.samples):
        rng = rng_for(cfg.seed, k)
        mu = random_aut(ctx, r, rng)
        mt, alpha = lift_mu(mu)
        form.population += 1
        if form_apply_algmap(mt, om) != om * alpha:
            form.fail(f"sample {k}")
        pair.population += 1
        from .ham import poisson

        for i in range(r):
            if poisson(mt.images[r + i], mt.images[i]) != TruncPoly.const(ctx, hctx.n, -alpha):
                pair.fail(f"sample {k}, i = {i + 1}")
                break
        inv.population += 1
        if lift_mu(mu.inverse)[0] != mt.inverse:
            inv.fail(f"sample {k}")
        f = TruncPoly.random(ctx, hctx.n, rng)
        cor.population += 1
        if not adh_formula_check(mt, f, alpha):
            cor.fail(f"sample {k}")
        D = Derivation.random(ctx, r, rng)
        diag.population += 1
        if not diagram_check(mu, D):
            diag.fail(f"sample {k}")
        if k < 20:
            nu = random_aut(ctx, r, rng)
            res = lift_composition(mu, nu)
            comp.population += 1
            reversed_count += res["reversed"]
            if not (res["reversed"] or res["same_order"]):
                comp.fail(f"sample {k}")
    comp.stats = {"reversed_order": reversed_count}
    return [form, pair, inv, cor, diag, comp]


def _corrupt(mu: AlgebraMap, rng: np.random.Generator) -> AlgebraMap:
    """Bump one higher-order coefficient of one image."""
    ctx, n = mu.ctx, mu.n
    _, deg = layout(ctx.p, n)
    i = int(rng.integers(n))
    pos = int(rng.choice(np.flatnonzero(deg == 2)))
    c = mu.images[i].coeffs.copy()
    c[pos] = ctx.add_t[c[pos], 1]
    imgs = list(mu.images)
    imgs[i] = TruncPoly(ctx, n, c)
    return AlgebraMap(imgs)


def battery_thm43(cfg: ExperimentConfig) -> list[Check]:
    hctx, ctx = cfg.hctx, cfg.ctx
    agree = Check("gh_bracket_agree")
    adh = Check("adh_formula")
    reject = Check("generic_rejected")
    for k in range(cfg.samples):
        rng = rng_for(cfg.seed, k)
        mu, alpha = _random_gh(hctx, rng, k)
        if cfg.fault:
            mu = _corrupt(mu, rng)
        a1, a2 = gh_test(mu), bracket_characterization(mu, seed=cfg.seed + k)
        agree.population += 1
        if a1 is None or a1 != a2 or a1 != alpha:
            agree.fail(f"sample {k}: form {a1!r}, bracket {a2!r}, expected {alpha!r}")
        f = TruncPoly.random(ctx, hctx.n, rng)
        adh.population += 1
        try:
            ok = adh_formula_check(mu, f, alpha)
        except Exception as exc:  # corrupted maps may fail to invert
            ok = False
            adh.stats.setdefault("errors", 0)
            adh.stats["errors"] += 1
            del exc
        if not ok:
            adh.fail(f"sample {k}")
        g = random_aut(ctx, hctx.n, rng_for(cfg.seed, k, 1))
        reject.population += 1
        if gh_test(g) is not None or bracket_characterization(g, samples=5) is not None:
            reject.fail(f"sample {k}: generic map accepted")
    return [agree, adh, reject]


def battery_homogeneity(cfg: ExperimentConfig) -> list[Check]:
    hctx, ctx = cfg.hctx, cfg.ctx
    p, r, n = cfg.p, cfg.r, hctx.n
    out = Check("homogeneity")
    for k in range(cfg.samples):
        rng = rng_for(cfg.seed, k)
        e = random_element(hctx, rng)
        c = Scalar(ctx, int(rng.integers(1, ctx.q)))
        out.population += 1
        ps, ps_c = psi(e.D), psi(e.D * c)
        if any(ps_c[i] != ps[i] * c ** (p**n - p**i) for i in range(n)):
            out.fail(f"sample {k}: psi")
            continue
        x, x_c = xi(e.D, cfg.method), xi(e.D * c, cfg.method)
        if any(x_c[i] != x[i] * c ** (p**r - p**i) for i in range(r)):
            out.fail(f"sample {k}: xi")
    return [out]


def battery_relation(cfg: ExperimentConfig) -> list[Check]:
    """The phi~ / phi relation on f in m; general f only reports how often the plain solve is inconsistent."""
    hctx, ctx = cfg.hctx, cfg.ctx
    out = Check("phi_relation")
    skipped = inconsistent = 0
    for k in range(cfg.samples):
        f = TruncPoly.random(ctx, hctx.n, rng_for(cfg.seed, k))
        try:
            relation_check(f, cfg.r)
        except Inconsistent:
            inconsistent += 1
        except PreconditionError:
            pass
        f = f - f.kappa()
        try:
            ok = relation_check(f, cfg.r)
        except PreconditionError:
            skipped += 1
            continue
        out.population += 1
        if not ok:
            out.fail(f"sample {k}")
    out.stats = {"skipped_undetermined": skipped, "plain_inconsistent_with_constant": inconsistent}
    return [out]


def battery_orientation(cfg: ExperimentConfig) -> list[Check]:
    out = Check("ad_orientation", population=1)
    o = orientation_probe(cfg.ctx, 2 * cfg.r if cfg.ctx.p ** (2 * cfg.r) <= 49 else 2, cfg.seed)
    out.stats = {"orientation": "Ad_mu = mu^-1 o D o mu" if o == "inverse" else "Ad_mu = mu o D o mu^-1"}
    return [out]


def battery_simplicity(cfg: ExperimentConfig) -> list[Check]:
    res = simplicity_probe(cfg.hctx, cfg.samples, cfg.seed)
    out = Check("simplicity", population=res["population"], stats={"expected": res["expected"]})
    for k, d in enumerate(res["dims"]):
        if d != res["expected"]:
            out.fail(f"sample {k}: closure dimension {d}")
    return [out]


BATTERIES: dict[str, Callable[[ExperimentConfig], list[Check]]] = {
    "dims": battery_dims,
    "chi_shape": battery_chi_shape,
    "lemma31": battery_lemma31,
    "lemma32": battery_lemma32,
    "invariance": battery_invariance,
    "pmap": battery_pmap,
    "delta": battery_delta,
    "beta": battery_beta,
    "lift": battery_lift,
    "thm43": battery_thm43,
    "homogeneity": battery_homogeneity,
    "relation": battery_relation,
    "orientation": battery_orientation,
    "simplicity": battery_simplicity,
}


def verify_suite(names, cfg: ExperimentConfig) -> Report:
    clock = _Clock(cfg)
    checks: list[Check] = []
    # orientation is fixed once per run and stated in the header
    header = {"ad_orientation": ad_orientation(cfg.p)} if names else {}
    for name in names:
        if name not in BATTERIES:
            raise KeyError(f"unknown battery {name!r}; known: {', '.join(BATTERIES)}")
        for ch in BATTERIES[name](cfg):
            ch.name = f"{name}.{ch.name}"
            checks.append(ch)
    rep = Report("verify", cfg, checks, header=header)
    rep.elapsed_ms = clock.ms()
    return rep
