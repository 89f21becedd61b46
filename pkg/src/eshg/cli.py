"""Batch verification harness.

Runs identity suites, limit-convergence experiments, polytope scans, and
regime classification from the command line, emitting machine-readable
JSON-lines reports (schema ``eshg-report/1``).
"""

from __future__ import annotations

import argparse
import cmath
import hashlib
import json
import math
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .bilateral import BilateralParams, GeometricProgression, bilateral_p51, bilateral_p52
from .bounds import ZetaVector, c_hat_PII, c_IV, c_V, nonpositivity_scan
from .classifier import (
    AlphaVector,
    a_of_alpha,
    b_of_alpha,
    classify_continuous,
    reduce_fd_general,
    reduce_fd_m0,
)
from .csymbols import CSymbolContext, c_ell
from .discrete import (
    DiscreteParams,
    HigherMParams,
    discrete_weight,
    higher_m_weight,
    limit_weight,
    shift_alpha_params,
)
from .errors import BalancingError, EshgError
from .integrals import (
    ContinuousParams,
    QuadratureSpec,
    constant_handle,
    ii_m,
    monomial_handle,
    limit_IP2,
    limit_IP3,
    limit_PI,
    limit_sum_with_tail,
    selberg_form,
)
from .partitions import subpartitions
from .qsymbols import (
    Nome,
    elliptic_gamma,
    qpoch_fin,
    theta,
    theta_poch,
)

SCHEMA = "eshg-report/1"
SUITE_NAMES = (
    "symbols", "shifts", "discrete", "discrete-limits", "higher-m",
    "integrals", "integral-limits", "bilateral", "bounds", "classify",
)


class ConfigError(Exception):
    """Invalid configuration file or command-line parameters."""


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def _jsonable(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, float) and (math.isnan(value) or math.isinf(value)):
        return str(value)
    return value


@dataclass
class VerificationReport:
    check_id: str
    params: dict
    lhs: complex
    rhs: complex
    abs_err: float
    rel_err: float
    passed: bool
    runtime_ms: int

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "check_id": self.check_id,
            "params": _jsonable(self.params),
            "lhs": _jsonable(complex(self.lhs)),
            "rhs": _jsonable(complex(self.rhs)),
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "pass": self.passed,
            "runtime_ms": self.runtime_ms,
        }


def make_report(check_id, params, lhs, rhs, tol, t0):
    lhs = complex(lhs)
    rhs = complex(rhs)
    abs_err = abs(lhs - rhs)
    rel_err = abs_err / abs(rhs) if abs(rhs) >= 1e-30 else abs_err
    return VerificationReport(
        check_id=check_id,
        params=dict(params, tolerance=tol),
        lhs=lhs,
        rhs=rhs,
        abs_err=abs_err,
        rel_err=rel_err,
        passed=rel_err <= tol,
        runtime_ms=int((time.monotonic() - t0) * 1000),
    )


def error_report(check_id, params, exc, t0):
    return VerificationReport(
        check_id=check_id,
        params=dict(params, error=f"{type(exc).__name__}: {exc}"),
        lhs=complex("nan"),
        rhs=complex("nan"),
        abs_err=math.inf,
        rel_err=math.inf,
        passed=False,
        runtime_ms=int((time.monotonic() - t0) * 1000),
    )


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def _as_complex(value, what):
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(value[0], value[1])
    raise ConfigError(f"{what} must be a number or an [re, im] pair")


def _as_real(value, what):
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"{what}: cannot parse {value!r}") from exc
    raise ConfigError(f"{what} must be a number or a 'num/den' string")


def load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config file must contain a JSON object")
    return cfg


def parse_alpha_list(values):
    return tuple(_as_real(v, "alpha entry") for v in values)


def parse_alpha_arg(text):
    return parse_alpha_list([v.strip() for v in text.split(",")])


@dataclass
class RunContext:
    seed: int
    tol: float | None
    config: dict
    reports: list = field(default_factory=list)

    def rng(self, salt=0):
        # stable across processes (hash() of strings is randomized)
        digest = hashlib.sha256(repr((self.seed, salt)).encode()).digest()
        return random.Random(int.from_bytes(digest[:8], "big"))

    def tolerance(self, default):
        return self.tol if self.tol is not None else default

    def check(self, check_id, params, fn, rhs, default_tol):
        """Run one check; a numerical error becomes a failed report
        rather than an abort."""
        tol = self.tolerance(default_tol)
        t0 = time.monotonic()
        params = dict(params, seed=self.seed)
        try:
            lhs = fn()
        except EshgError as exc:
            self.reports.append(error_report(check_id, params, exc, t0))
            return
        self.reports.append(make_report(check_id, params, lhs, rhs, tol, t0))


def _jit(rng, lo=0.7, hi=1.3, ph=0.2):
    return rng.uniform(lo, hi) * cmath.exp(1j * rng.uniform(-ph, ph))


def _unit(rng, lo, hi):
    return rng.uniform(lo, hi) * cmath.exp(2j * math.pi * rng.random())


def _discrete_params(rng, n, N, p_free=False):
    nome = Nome(rng.uniform(0.05, 0.1), rng.uniform(0.1, 0.2),
                rng.uniform(0.1, 0.2))
    return DiscreteParams.solve(
        n, N, nome, _jit(rng), _jit(rng), _jit(rng), _jit(rng), p_free=p_free
    )


def _limit_continuous_params(rng, n, m=0, last_range=(0.3, 0.88)):
    nome = Nome(0.0, 0.15 + 0.05j, 0.2 + 0.03j)
    for _ in range(2000):
        lead = [_unit(rng, 0.55, 0.9) for _ in range(2 * m + 5)]
        pr = ContinuousParams.solve(n, m, nome, lead, p_free=True)
        if last_range[0] < abs(pr.t_params[-1]) < last_range[1]:
            return pr
    raise ConfigError("could not draw admissible limit parameters")


def _shifted_elliptic(prq, alpha, p):
    nom = Nome(p=p, q=prq.nome.q, t=prq.nome.t)
    tt = tuple(
        prq.t_params[r] * p ** alpha[r] for r in range(len(prq.t_params))
    )
    return ContinuousParams(prq.n, prq.m, nom, tt)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def suite_symbols(ctx: RunContext):
    rng = ctx.rng(1)
    nome = Nome(0.08, 0.15 + 0.02j, 0.2 + 0.01j)
    cx = CSymbolContext(nome, 3)
    for i in range(5):
        lam = tuple(sorted((rng.randrange(4) for _ in range(3)), reverse=True))
        x = _jit(rng)
        for kind in ("0", "-", "+"):
            ctx.check(
                f"symbols/dual-path-C{kind}/{i}",
                {"lam": lam, "x": x, "kind": kind},
                lambda k=kind: c_ell(k, lam, x, cx, method="box"),
                c_ell(kind, lam, x, cx, method="closed"),
                1e-11,
            )
    p = 0.1 + 0.03j
    for i in range(3):
        x = _jit(rng)
        ctx.check(
            f"symbols/theta-inversion/{i}", {"x": x, "p": p},
            lambda x=x: theta(1.0 / x, p), -theta(x, p) / x, 1e-13,
        )
        ctx.check(
            f"symbols/gamma-reflection/{i}", {"x": x},
            lambda x=x: elliptic_gamma(x, nome)
            * elliptic_gamma(nome.p * nome.q / x, nome),
            1.0, 1e-12,
        )


def suite_shifts(ctx: RunContext):
    rng = ctx.rng(2)
    q = 0.2 + 0.04j
    p = 0.08 + 0.02j
    for i in range(5):
        x = _jit(rng)
        m, k = rng.randrange(-3, 4), rng.randrange(0, 4)
        ctx.check(
            f"shifts/qpoch-split/{i}", {"x": x, "m": m, "k": k},
            lambda x=x, m=m, k=k: qpoch_fin(x, q, m + k),
            qpoch_fin(x, q, m) * qpoch_fin(x * q**m, q, k),
            1e-12,
        )
        ctx.check(
            f"shifts/theta-poch-step/{i}", {"x": x, "m": m},
            lambda x=x, m=m: theta_poch(x, q, p, m + 1),
            theta_poch(x, q, p, m) * theta(x * q**m, p),
            1e-12,
        )
        ctx.check(
            f"shifts/theta-quasiperiod/{i}", {"x": x},
            lambda x=x: theta(p * x, p), -theta(x, p) / x, 1e-13,
        )


def suite_discrete(ctx: RunContext):
    for n, N in ((1, 3), (2, 2), (3, 1)):
        rng = ctx.rng((3, n, N))
        pars = _discrete_params(rng, n, N)
        ctx.check(
            f"discrete/weight-normalization/n{n}N{N}",
            {"n": n, "N": N, "nome": [pars.nome.p, pars.nome.q, pars.nome.t]},
            lambda pars=pars, N=N, n=n: sum(
                discrete_weight(mu, pars) for mu in subpartitions(N, n)
            ),
            1.0, 1e-9,
        )


def suite_discrete_limits(ctx: RunContext):
    alphas = {
        "q-racah": (0, 0, 0, 0, 0.5, 0.5),
        "mid-branch": (-0.25, 0.25, -0.25, 0.25, 0.45, 0.55),
        "deep-branch": (-0.5, 0.5, 0, 0, 0.5, 0.5),
    }
    for name, alpha in alphas.items():
        for n, N in ((1, 2), (2, 1)):
            rng = ctx.rng((4, name, n, N))
            pars = _discrete_params(rng, n, N, p_free=True)
            ctx.check(
                f"discrete-limits/normalization/{name}/n{n}N{N}",
                {"alpha": alpha, "n": n, "N": N},
                lambda pars=pars, alpha=alpha, N=N, n=n: sum(
                    limit_weight(mu, alpha, pars)
                    for mu in subpartitions(N, n)
                ),
                1.0, 1e-9,
            )
    rng = ctx.rng((4, "deep"))
    pars = _discrete_params(rng, 1, 2, p_free=True)
    alpha = alphas["q-racah"]
    ell = shift_alpha_params(pars, alpha, 1e-20)
    for mu in ((1,), (2,)):
        ctx.check(
            f"discrete-limits/elliptic-match/mu{mu[0]}",
            {"alpha": alpha, "mu": mu, "p": 1e-20},
            lambda mu=mu: discrete_weight(mu, ell),
            limit_weight(mu, alpha, pars),
            1e-5,
        )


def suite_higher_m(ctx: RunContext):
    rng = ctx.rng(5)
    nome = Nome(rng.uniform(0.05, 0.1), rng.uniform(0.1, 0.2),
                rng.uniform(0.1, 0.2))
    pars = HigherMParams.solve(
        2, 2, 1, nome, _jit(rng), [_jit(rng) for _ in range(5)]
    )
    ctx.check(
        "higher-m/empty-partition", {"n": 2, "N": 2, "m": 1},
        lambda: higher_m_weight((0, 0), pars), 1.0, 1e-12,
    )
    dpars = _discrete_params(rng, 2, 2)
    hpars = HigherMParams(2, 2, 0, dpars.nome, dpars.ts)
    # at m = 0 the series weight reduces to the box weight up to a
    # mu-independent normalizing constant
    ref = higher_m_weight((1, 1), hpars) / discrete_weight((1, 1), dpars)
    for mu in ((1, 0), (2, 1)):
        ctx.check(
            f"higher-m/m0-reduction/mu{mu}",
            {"mu": mu},
            lambda mu=mu: higher_m_weight(mu, hpars)
            / discrete_weight(mu, dpars),
            ref,
            1e-10,
        )


def suite_integrals(ctx: RunContext):
    rng = ctx.rng(6)
    nome = Nome(0.05 + 0.02j, 0.15 + 0.05j, 0.2 + 0.03j)
    one = constant_handle(1)
    for i in range(2):
        while True:
            lead = [_unit(rng, 0.55, 0.85) for _ in range(5)]
            pr = ContinuousParams.solve(1, 0, nome, lead)
            if all(0.05 < abs(x) < 0.85 for x in pr.t_params):
                break
        ctx.check(
            f"integrals/normalization/n1/{i}",
            {"t_params": list(pr.t_params), "points": 4096},
            lambda pr=pr: selberg_form(one, one, pr, QuadratureSpec(4096)),
            1.0, 1e-8,
        )
        ctx.check(
            f"integrals/unnormalized-consistency/{i}",
            {"points": 1024},
            lambda pr=pr: ii_m(pr, QuadratureSpec(1024))
            / selberg_form(one, one, pr, QuadratureSpec(1024)),
            _selberg_prefactor(pr),
            1e-9,
        )


def _selberg_prefactor(pr):
    from .qsymbols import double_poch

    nome = pr.nome
    pred = elliptic_gamma(nome.t, nome)
    for r in range(6):
        for s in range(r + 1, 6):
            x = pr.t_params[r] * pr.t_params[s]
            pred *= double_poch(x, nome) * elliptic_gamma(x, nome)
    return pred


def suite_integral_limits(ctx: RunContext):
    rng = ctx.rng(7)
    one = constant_handle(1)
    # principal regime vertex: the limit form is exactly 1
    pr = _limit_continuous_params(rng, 1)
    ctx.check(
        "integral-limits/principal-unit", {"alpha": (0, 0, 0, 0, 0, 1)},
        lambda: limit_PI((0, 0, 0, 0, 0, 1), pr, QuadratureSpec(1024)),
        1.0, 1e-6,
    )
    # negative-pair regime: value independent of the free parameter v
    alpha2 = (-0.5, -0.5, 0.5, 0.5, 0.5, 0.5)
    v1 = limit_IP2(alpha2, pr, 0.8 + 0.1j, QuadratureSpec(1024))
    ctx.check(
        "integral-limits/pair-v-independence", {"alpha": alpha2},
        lambda: limit_IP2(alpha2, pr, 0.6 - 0.2j, QuadratureSpec(1024)),
        v1, 1e-8,
    )
    ctx.check(
        "integral-limits/triple-vs-pair", {"alpha": alpha2},
        lambda: limit_IP3(alpha2, pr, QuadratureSpec(1024)),
        limit_IP2(alpha2, pr, pr.t_params[2], QuadratureSpec(1024)),
        1e-8,
    )
    # sum regime: unit value, certified tail, elliptic agreement
    alpha_sum = (-0.5, 1 / 6, 1 / 6, 1 / 6, 0.5, 0.5)
    val, tail = limit_sum_with_tail(alpha_sum, pr)
    ctx.check(
        "integral-limits/sum-unit", {"alpha": alpha_sum, "tail": tail},
        lambda: val, 1.0, 1e-9,
    )
    ctx.check(
        "integral-limits/sum-tail-certificate", {"alpha": alpha_sum},
        lambda: tail, 0.0, 1e-8,
    )
    ctx.check(
        "integral-limits/sum-vs-elliptic",
        {"alpha": alpha_sum, "p": 1e-4},
        lambda: selberg_form(
            one, one, _shifted_elliptic(pr, alpha_sum, 1e-4),
            QuadratureSpec(1024), residue_correction=True, conv_tol=None,
        ),
        val, 1e-3,
    )


def suite_bilateral(ctx: RunContext):
    rng = ctx.rng(8)
    nome = Nome(0.0, 0.15 + 0.05j, 0.2 + 0.03j)
    pr = _limit_continuous_params(rng, 1)
    x = cmath.exp(0.3j)
    alpha_triple = (-0.4, 0.0, 0.0, 0.2, 0.6, 0.6)
    alpha_deep = (-2 / 3, 1 / 3, 1 / 3, 1 / 3, 1 / 3, 1 / 3)
    ctx.check(
        "bilateral/triple-unit", {"alpha": alpha_triple, "d": 10},
        lambda: bilateral_p51(
            alpha_triple, pr, GeometricProgression(x, 10, 3), cap=150
        ),
        1.0, 1e-11,
    )
    ctx.check(
        "bilateral/deep-unit", {"alpha": alpha_deep, "d": 6},
        lambda: bilateral_p52(
            alpha_deep, pr, GeometricProgression(x, 6, 3), cap=150
        ),
        1.0, 1e-11,
    )
    s = cmath.exp(2j * math.pi * rng.random())
    rotated = list(pr.t_params)
    rotated[0] *= s**2
    ctx.check(
        "bilateral/combination-invariance", {"alpha": alpha_triple},
        lambda: bilateral_p51(
            alpha_triple,
            BilateralParams(1, nome, tuple(rotated)),
            GeometricProgression(x * s, 10, 3), cap=150,
        ),
        bilateral_p51(alpha_triple, pr, GeometricProgression(x, 10, 3),
                      cap=150),
        1e-9,
    )


def suite_bounds(ctx: RunContext):
    samples = int(ctx.config.get("samples", 20000))
    for which, fn in (("PII", c_hat_PII), ("PIV", c_IV), ("PV", c_V)):
        ctx.check(
            f"bounds/nonpositivity/{which}",
            {"samples": samples},
            lambda which=which: max(
                nonpositivity_scan(which, samples)[0], 0.0
            ),
            0.0, 1e-12,
        )
    loci = (
        ("PII", c_hat_PII, (-0.3, -0.2, 0.2, 0.4, 0.4, 0.5), (0.15,)),
        ("PIV", c_IV, (-0.4, 0.06, 0.05, 0.09, 0.6, 0.6), (0.2,)),
        ("PV", c_V, (-0.7, 0.5, 0.5, 0.4, 0.2, 0.1), (0.5,)),
    )
    for which, fn, alpha, zeta in loci:
        ctx.check(
            f"bounds/equality-locus/{which}",
            {"alpha": alpha, "zeta": zeta},
            lambda fn=fn, alpha=alpha, zeta=zeta: fn(
                ZetaVector(zeta), alpha
            ),
            0.0, 1e-12,
        )


def suite_classify(ctx: RunContext):
    alpha = AlphaVector((0, 0, 0, 0, 0.5, 0.5), kind="discrete")
    red, _ = reduce_fd_m0(alpha)
    ctx.check(
        "classify/q-racah-ab", {"alpha": alpha.entries},
        lambda: complex(a_of_alpha(red), b_of_alpha(red)), 0.0, 1e-12,
    )
    cases = (
        ((-0.5, 1 / 6, 1 / 6, 1 / 6, 0.5, 0.5), "SUM"),
        ((0, 0, 0, 0, 0, 1), "PI"),
        ((-0.5, -0.5, 0.5, 0.5, 0.5, 0.5), "IP2"),
        ((-1, 0, 0, 0, 1, 1), "BILATERAL_IV"),
    )
    for entries, want in cases:
        av = AlphaVector(entries, kind="continuous")
        ctx.check(
            f"classify/continuous-{want}", {"alpha": entries},
            lambda av=av, want=want: 1.0
            if classify_continuous(av).tag == want else 0.0,
            1.0, 0.0,
        )


SUITES = {
    "symbols": suite_symbols,
    "shifts": suite_shifts,
    "discrete": suite_discrete,
    "discrete-limits": suite_discrete_limits,
    "higher-m": suite_higher_m,
    "integrals": suite_integrals,
    "integral-limits": suite_integral_limits,
    "bilateral": suite_bilateral,
    "bounds": suite_bounds,
    "classify": suite_classify,
}


def run_suite(suite_name, ctx: RunContext):
    if suite_name not in SUITES:
        raise ConfigError(
            f"unknown suite {suite_name!r}; choose from {', '.join(SUITE_NAMES)}"
        )
    t0 = time.monotonic()
    try:
        SUITES[suite_name](ctx)
    except EshgError as exc:
        # keep going: a failed shared computation becomes a failing report
        ctx.reports.append(error_report(
            f"{suite_name}/suite-error", {"seed": ctx.seed}, exc, t0
        ))
    return ctx.reports


# ---------------------------------------------------------------------------
# classification command
# ---------------------------------------------------------------------------

def classify_structured(entries, kind, m=0, solve_last=False):
    entries = list(entries)
    if solve_last:
        if kind == "discrete":
            entries[-1] = (m + 1) - sum(entries[2:-1])
        else:
            entries[-1] = (m + 1) - sum(entries[:-1])
    try:
        alpha = AlphaVector(tuple(entries), m=m, kind=kind)
    except BalancingError as exc:
        raise ConfigError(
            f"balancing violated: {exc} "
            "(hint: pass --solve-last to fill in the final entry, or check "
            "that the entries sum to m+1)"
        ) from exc
    out = {"kind": kind, "m": m, "alpha": list(alpha.entries)}
    if kind == "discrete":
        if m == 0:
            red, word = reduce_fd_m0(alpha)
            out["a"] = a_of_alpha(red) + 0.0
            out["b"] = b_of_alpha(red) + 0.0
        else:
            red, word = reduce_fd_general(alpha)
        out["reduced"] = list(red.entries)
        out["group_word"] = [list(move) for move in word]
        a0 = red.entries[0]
        if abs(a0) <= 1e-9:
            out["branch"] = "alpha_0 = 0"
        elif abs(a0 + 0.5) <= 1e-9:
            out["branch"] = "alpha_0 = -1/2"
        else:
            out["branch"] = "-1/2 < alpha_0 < 0"
        if (
            m == 0
            and abs(out.get("a", 1)) <= 1e-12
            and abs(out.get("b", 1)) <= 1e-12
            and out["branch"] == "alpha_0 = 0"
        ):
            out["regime"] = "q-Racah regime"
        else:
            out["regime"] = f"{out['branch']} branch"
    else:
        label = classify_continuous(alpha)
        out["reduced"] = list(alpha.entries)
        out["group_word"] = []
        out["regime"] = label.tag
        out["zeta"] = label.zeta
        out["witnesses"] = list(label.witnesses)
        if label.detail:
            out["detail"] = label.detail
    return out


def _print_classification(out, stream):
    print(f"kind:    {out['kind']} (m = {out['m']})", file=stream)
    print(f"alpha:   {out['alpha']}", file=stream)
    print(f"reduced: {out['reduced']}", file=stream)
    print(f"word:    {out['group_word']}", file=stream)
    if "a" in out:
        print(f"a = {out['a']:.12g}   b = {out['b']:.12g}", file=stream)
    if "zeta" in out:
        print(f"zeta = {out['zeta']:.12g}  witnesses = {out['witnesses']}",
              file=stream)
    print(f"regime:  {out['regime']}", file=stream)
    if "detail" in out:
        print(f"detail:  {out['detail']}", file=stream)


# ---------------------------------------------------------------------------
# limit experiment command
# ---------------------------------------------------------------------------

def limit_experiment(ctx: RunContext, kind, alpha, n, N, k_range):
    if kind == "discrete":
        # the normalized weight sums agree identically in the nome, so
        # the informative error is the largest per-weight distance over
        # the whole support box
        pars = DiscreteParams.solve(
            n, N, Nome(0.0, 0.75, 0.3), 0.9, 0.5, 0.4, 0.7, p_free=True,
        )
        limits = {
            mu: limit_weight(mu, alpha, pars)
            for mu in subpartitions(N, n)
        }
        rhs = 0.0

        def lhs_at(k):
            shifted = shift_alpha_params(pars, alpha, 10.0 ** -k)
            return max(
                abs(discrete_weight(mu, shifted) - lim)
                for mu, lim in limits.items()
            )
    else:
        rng = ctx.rng(("limit", n))
        pr = _limit_continuous_params(rng, n)
        av = AlphaVector(tuple(alpha), kind="continuous")
        tag = classify_continuous(av).tag
        # nontrivial test functions keep the comparison away from the
        # exactly normalized constant case
        f = monomial_handle((1,) + (0,) * (n - 1))
        if tag == "PI":
            rhs = limit_PI(alpha, pr, QuadratureSpec(1024), f=f, g=f)
        elif tag == "IP2":
            rhs = limit_IP2(alpha, pr, pr.t_params[2], QuadratureSpec(1024),
                            f=f, g=f)
        elif tag == "IP3":
            rhs = limit_IP3(alpha, pr, QuadratureSpec(1024), f=f, g=f)
        elif tag == "SUM":
            f = constant_handle(n)
            rhs, _ = limit_sum_with_tail(alpha, pr)
        else:
            raise ConfigError(f"no limit evaluator for regime {tag}")

        def lhs_at(k):
            return selberg_form(
                f, f, _shifted_elliptic(pr, alpha, 10.0 ** -k),
                QuadratureSpec(1024), residue_correction=True, conv_tol=None,
            )

    errs = []
    for k in k_range:
        t0 = time.monotonic()
        params = {"alpha": list(alpha), "k": k, "p": 10.0 ** -k,
                  "seed": ctx.seed}
        try:
            lhs = lhs_at(k)
        except EshgError as exc:
            ctx.reports.append(
                error_report(f"limit/{kind}/k{k}", params, exc, t0)
            )
            continue
        # per-k rows record the raw errors; the pass verdict for the
        # experiment is the summary's monotone-decrease criterion
        rep = make_report(
            f"limit/{kind}/k{k}", params, lhs, rhs,
            ctx.tolerance(math.inf), t0,
        )
        errs.append((k, max(rep.rel_err, 1e-300)))
        ctx.reports.append(rep)

    # fitted convergence order: slope of log10(err) against k
    t0 = time.monotonic()
    if len(errs) >= 2:
        ks = [k for k, _ in errs]
        ys = [math.log10(e) for _, e in errs]
        kbar = sum(ks) / len(ks)
        ybar = sum(ys) / len(ys)
        denom = sum((k - kbar) ** 2 for k in ks)
        order = -sum((k - kbar) * (y - ybar) for k, y in zip(ks, ys)) / denom
        decreasing = all(a > b for (_, a), (_, b) in zip(errs, errs[1:]))
    else:
        order = 0.0
        decreasing = False
    # at the noise floor monotonicity is meaningless: accept when every
    # error is already below the tolerance
    tol = ctx.tolerance(1e-3)
    converged = decreasing or (
        bool(errs) and all(e <= tol for _, e in errs)
    )
    summary = make_report(
        f"limit/{kind}/summary",
        {"alpha": list(alpha), "fitted_order": order, "seed": ctx.seed},
        1.0 if converged else 0.0, 1.0, 0.0, t0,
    )
    ctx.reports.append(summary)
    return ctx.reports


# ---------------------------------------------------------------------------
# output and entry point
# ---------------------------------------------------------------------------

def _emit(reports, args):
    lines = [json.dumps(r.to_dict()) for r in reports]
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + ("\n" if lines else ""))
    if args.json:
        for line in lines:
            print(line)
    else:
        for r in reports:
            status = "PASS" if r.passed else "FAIL"
            err = r.rel_err
            print(f"[{status}] {r.check_id}  rel_err={err:.3e}  "
                  f"({r.runtime_ms} ms)")
        npass = sum(1 for r in reports if r.passed)
        print(f"{npass}/{len(reports)} checks passed")


def _exit_code(reports):
    if all(r.passed for r in reports):
        return 0
    if any("error" in r.params for r in reports):
        return 3
    return 1


def _global_flags():
    shared = argparse.ArgumentParser(add_help=False)
    g = shared.add_argument_group("global options")
    g.add_argument("--config", default=argparse.SUPPRESS,
                   help="JSON parameter file")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    g.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                   help="override every check's tolerance")
    g.add_argument("--out", default=argparse.SUPPRESS,
                   help="write JSON-lines report file")
    g.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                   help="print JSON lines instead of text")
    return shared


def build_parser():
    shared = _global_flags()
    parser = argparse.ArgumentParser(
        prog="eshg",
        description="Numerical verification harness for elliptic "
        "Selberg-type integrals, their discrete companions, and their "
        "q-level degenerations.",
        parents=[shared],
    )
    parser.set_defaults(config=None, seed=20260823, tol=None, out=None,
                        json=False)
    sub = parser.add_subparsers(dest="command")

    p_suite = sub.add_parser("suite", parents=[shared],
                             help="run a named verification suite")
    p_suite.add_argument("name", nargs="*", help=f"one of: {', '.join(SUITE_NAMES)}")

    p_cls = sub.add_parser("classify", parents=[shared], help="classify an exponent vector")
    p_cls.add_argument("--alpha", help="comma-separated entries "
                       "(fractions like 1/2 allowed)")
    p_cls.add_argument("--kind", choices=("discrete", "continuous"),
                       default="discrete")
    p_cls.add_argument("--m", type=int, default=0)
    p_cls.add_argument("--solve-last", action="store_true",
                       help="solve the balancing for the final entry")

    p_lim = sub.add_parser("limit", parents=[shared], help="limit-convergence experiment")
    p_lim.add_argument("--alpha", required=True)
    p_lim.add_argument("--kind", choices=("discrete", "continuous"),
                       default="discrete")
    p_lim.add_argument("--n", type=int, default=1)
    p_lim.add_argument("--N", type=int, default=2)
    p_lim.add_argument("--kmin", type=int, default=2)
    p_lim.add_argument("--kmax", type=int, default=4)

    p_int = sub.add_parser("integrate", parents=[shared], help="quadrature normalization check")
    p_int.add_argument("--n", type=int, default=1)
    p_int.add_argument("--points", type=int, default=4096)

    p_scan = sub.add_parser("scan-bounds", parents=[shared], help="polytope nonpositivity scans")
    p_scan.add_argument("--samples", type=int, default=100_000)
    p_scan.add_argument("--which", default="PII,PIV,PV")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = load_config(args.config)
        ctx = RunContext(seed=args.seed, tol=args.tol, config=cfg)

        if args.command == "suite":
            names = args.name or []
            if not names:
                print("error: no suite selected", file=sys.stderr)
                return 2
            for name in names:
                run_suite(name, ctx)
            _emit(ctx.reports, args)
            return _exit_code(ctx.reports)

        if args.command == "classify":
            if args.alpha:
                entries = parse_alpha_arg(args.alpha)
            elif "alpha" in cfg:
                entries = parse_alpha_list(cfg["alpha"])
            else:
                print("error: no alpha given", file=sys.stderr)
                return 2
            out = classify_structured(
                entries, args.kind, m=args.m, solve_last=args.solve_last
            )
            if args.json:
                print(json.dumps(_jsonable(out)))
            else:
                _print_classification(out, sys.stdout)
            if args.out:
                with open(args.out, "w") as fh:
                    fh.write(json.dumps(_jsonable(out)) + "\n")
            return 0

        if args.command == "limit":
            alpha = parse_alpha_arg(args.alpha)
            limit_experiment(
                ctx, args.kind, alpha, args.n, args.N,
                range(args.kmin, args.kmax + 1),
            )
            _emit(ctx.reports, args)
            return _exit_code(ctx.reports)

        if args.command == "integrate":
            rng = ctx.rng(("integrate", args.n))
            nome = Nome(0.05 + 0.02j, 0.15 + 0.05j, 0.2 + 0.03j)
            if "nome" in cfg:
                nm = cfg["nome"]
                nome = Nome(
                    _as_complex(nm.get("p", nome.p), "nome.p"),
                    _as_complex(nm.get("q", nome.q), "nome.q"),
                    _as_complex(nm.get("t", nome.t), "nome.t"),
                )
            if "params" in cfg:
                tt = [_as_complex(v, "params entry") for v in cfg["params"]]
                pr = ContinuousParams(args.n, 0, nome, tuple(tt))
            else:
                while True:
                    lead = [_unit(rng, 0.55, 0.85)
                            for _ in range(5)]
                    pr = ContinuousParams.solve(args.n, 0, nome, lead)
                    if all(0.05 < abs(x) < 0.85 for x in pr.t_params):
                        break
            pts = int(cfg.get("quadrature", {}).get("points", args.points))
            one = constant_handle(1)
            ctx.check(
                f"integrate/normalization/n{args.n}",
                {"n": args.n, "points": pts,
                 "t_params": list(pr.t_params)},
                lambda: selberg_form(one, one, pr, QuadratureSpec(pts)),
                1.0,
                1e-8 if args.n == 1 else 1e-5,
            )
            _emit(ctx.reports, args)
            return _exit_code(ctx.reports)

        if args.command == "scan-bounds":
            for which in [w.strip() for w in args.which.split(",") if w.strip()]:
                t0 = time.monotonic()
                params = {"samples": args.samples, "seed": args.seed}
                try:
                    best, _ = nonpositivity_scan(which, args.samples)
                except EshgError as exc:
                    ctx.reports.append(error_report(
                        f"scan-bounds/{which}", params, exc, t0))
                    continue
                ctx.reports.append(make_report(
                    f"scan-bounds/{which}",
                    dict(params, max_value=best),
                    max(best, 0.0), 0.0, ctx.tolerance(1e-12), t0,
                ))
            _emit(ctx.reports, args)
            return _exit_code(ctx.reports)

        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BalancingError as exc:
        print(f"error: balancing violated: {exc}", file=sys.stderr)
        return 2
    except EshgError as exc:
        print(f"error: numerical evaluation failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
