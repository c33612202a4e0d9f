"""Randomized oracle suites shared by the test-suite and `gprover selftest`."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .nabs import NabsProblem, csnas, is_solution
from .nominal import (
    Perm, Subst, UndecidableHere, apply_perm, equiv, less_general, nca_apply, nca_compose,
    support,
)
from .oracle import A, F, G, I, brute_force_csnas, random_problem
from .syntax import App, Lam, Nom, Term, Var, normalize


@dataclass
class SuiteConfig:
    seed: int = 42
    csnas_cases: int = 500
    algebra_cases: int = 1000


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures and self.cases > 0

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: {self.cases} cases, {len(self.failures)} failures, {self.seconds:.2f}s"


# ---------------------------------------------------------------- csnas vs brute force

def covered(sol: Subst, others: list[Subst], flex: list[Var]) -> bool:
    return any(less_general(sol, o, flex) for o in others)


def compare_csnas(flex: list[Var], s: Term, t: Term) -> str | None:
    """None when csnas and the oracle agree on this problem, else a description."""
    pb = NabsProblem(s, t, tuple(flex))
    ours = list(csnas(flex, s, t))
    ref = list(brute_force_csnas(flex, s, t))
    for th in ours:
        if not is_solution(th, pb):
            return f"unsound {th}"
    try:
        for r in ref:
            if not covered(r, ours, flex):
                return f"oracle solution {r} not covered by csnas"
        for th in ours:
            if not covered(th, ref, flex):
                return f"csnas solution {th} not covered by oracle"
    except UndecidableHere as e:
        return f"generality check left the pattern fragment: {e}"
    return None


def csnas_suite(cfg: SuiteConfig) -> SuiteResult:
    rng = random.Random(cfg.seed)
    res = SuiteResult("csnas vs brute force")
    t0 = time.perf_counter()
    for k in range(cfg.csnas_cases):
        flex, s, t = random_problem(rng)
        msg = compare_csnas(flex, s, t)
        res.cases += 1
        if msg:
            res.failures.append(f"case {k}: {msg}")
    res.seconds = time.perf_counter() - t0
    return res


# ---------------------------------------------------------------- substitution algebra

X, Y = Var("X", I), Var("Y", I)


def random_term(rng: random.Random, d: int = 3, vars_: tuple[Var, ...] = (X, Y),
                noms: int = 3, bound: int = 0) -> Term:
    from .syntax import Bound
    leaves: list[Term] = [A, *vars_, *(Nom(j, I) for j in range(noms))]
    leaves += [Bound(j, I) for j in range(bound)]
    r = rng.random()
    if d == 0 or r < 0.25:
        return rng.choice(leaves)
    if r < 0.55:
        return App(F, (random_term(rng, d - 1, vars_, noms, bound),))
    return App(G, (random_term(rng, d - 1, vars_, noms, bound),
                   random_term(rng, d - 1, vars_, noms, bound)))


def random_body(rng: random.Random) -> Term:
    """A term of type i, or an abstraction of type i -> i over one."""
    if rng.random() < 0.4:
        return normalize(Lam(I, random_term(rng, bound=1), "w"))
    return normalize(random_term(rng))


def random_perm(rng: random.Random, n: int = 5) -> Perm:
    src = [Nom(j, I) for j in range(n)]
    dst = list(src)
    rng.shuffle(dst)
    return Perm(dict(zip(src, dst)))


def random_subst(rng: random.Random, ground: bool = False) -> Subst:
    vs = () if ground else (X, Y)
    m = {}
    for v in (X, Y):
        if rng.random() < 0.8:
            m[v] = normalize(random_term(rng, 2, vs, noms=4))
    return Subst(m)


def algebra_suites(cfg: SuiteConfig) -> list[SuiteResult]:
    rng = random.Random(cfg.seed + 1)
    out = []

    eq = SuiteResult("permutation equivalence is an equivalence relation")
    t0 = time.perf_counter()
    for _ in range(cfg.algebra_cases):
        t = random_body(rng)
        u = apply_perm(random_perm(rng), t)
        w = apply_perm(random_perm(rng), u)
        eq.cases += 1
        if not equiv(t, t):
            eq.failures.append(f"reflexivity {t}")
        if equiv(t, u) != equiv(u, t) or not equiv(t, u):
            eq.failures.append(f"symmetry {t} {u}")
        if not equiv(t, w):
            eq.failures.append(f"transitivity {t} {w}")
        other = random_body(rng)
        if equiv(t, other) != equiv(other, t):
            eq.failures.append(f"symmetry on unrelated terms {t} {other}")
    eq.seconds = time.perf_counter() - t0
    out.append(eq)

    comp = SuiteResult("B{theta.rho} ~ B{theta}{rho}")
    t0 = time.perf_counter()
    for _ in range(cfg.algebra_cases):
        b = random_body(rng)
        theta, rho = random_subst(rng), random_subst(rng)
        lhs = nca_apply(nca_compose(theta, rho), b)
        rhs = nca_apply(rho, nca_apply(theta, b))
        comp.cases += 1
        if not equiv(lhs, rhs):
            comp.failures.append(f"{b} {theta} {rho}")
    comp.seconds = time.perf_counter() - t0
    out.append(comp)

    clo = SuiteResult("t ~ t' implies t{theta} ~ t'{theta}")
    t0 = time.perf_counter()
    for _ in range(cfg.algebra_cases):
        t = random_body(rng)
        u = apply_perm(random_perm(rng), t)
        theta = random_subst(rng)
        clo.cases += 1
        if not equiv(nca_apply(theta, t), nca_apply(theta, u)):
            clo.failures.append(f"{t} {u} {theta}")
    clo.seconds = time.perf_counter() - t0
    out.append(clo)
    return out


def run_all(cfg: SuiteConfig | None = None) -> list[SuiteResult]:
    cfg = cfg or SuiteConfig()
    return [csnas_suite(cfg), *algebra_suites(cfg)]


__all__ = ["SuiteConfig", "SuiteResult", "compare_csnas", "csnas_suite", "algebra_suites",
           "run_all", "random_term", "random_perm", "random_subst", "support"]
