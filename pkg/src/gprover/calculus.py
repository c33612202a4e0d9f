"""The trusted kernel: sequents and premise generation for every rule."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .defs import (
    Clause, DefTable, PredDef, goal_as_term, head_as_term, replace_pred,
)
from .formulas import (
    BOT, QUANTIFIERS, TOP, mk_quant, open_quant, view,
)
from .nabs import csnas, holds, signature_after
from .nominal import (
    Subst, apply_perm, equiv, fresh_name, fresh_noms, nca_apply, ordinary_apply, perm_equiv,
    sorted_noms, support,
)
from .printer import show
from .syntax import (
    PROP, App, Lam, Nom, Term, Type, Var, abstract, arrows, eta_long, eta_var, free_vars,
    head_args, mentions_prop, normalize, split_type, strip_lams, type_of, typecheck,
)
from .unify import NonPattern


class RuleError(Exception):
    def __init__(self, tag: str, msg: str) -> None:
        super().__init__(f"{tag}: {msg}")
        self.tag = tag


@dataclass(frozen=True)
class Sequent:
    sig: tuple[Var, ...]
    hyps: tuple[Term, ...]
    goal: Term

    def check(self) -> None:
        names = {v.name for v in self.sig}
        if len(names) != len(self.sig):
            raise ValueError("duplicate eigenvariable names")
        for v in self.sig:
            if mentions_prop(v.ty):
                raise ValueError(f"eigenvariable {v.name} has a type mentioning prop")
        for f in self.hyps + (self.goal,):
            if not free_vars(f) <= set(self.sig):
                extra = ", ".join(sorted(v.name for v in free_vars(f) - set(self.sig)))
                raise ValueError(f"free variables {extra} missing from the signature")
            if __debug__ and normalize(f) != f:
                raise ValueError("formula is not canonical")

    def show(self) -> str:
        sig = ", ".join(v.name for v in self.sig)
        hyps = ", ".join(show(h) for h in self.hyps)
        return f"{sig} : {hyps} |- {show(self.goal)}"


@dataclass(frozen=True)
class RuleInstance:
    tag: str
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {}
        for k, v in self.params.items():
            if isinstance(v, (Var, App, Lam, Nom)) or hasattr(v, "ty"):
                out[k] = show(v)
            elif isinstance(v, dict):
                out[k] = {a: show(b) for a, b in v.items()}
            else:
                out[k] = v
        return {"tag": self.tag, "params": out}


@dataclass
class Context:
    defs: DefTable = field(default_factory=DefTable)
    lemmas: dict[str, Term] = field(default_factory=dict)


CORE = {"id", "cut", "lemma", "cL", "botL", "topR", "orL", "orR", "andL", "andR", "impL",
        "impR", "allL", "allR", "exL", "exR", "nablaL", "nablaR"}
NABS = {"nabsL", "nabsR"}
DEF = {"defL", "defR", "defLp", "defRp"}
IND = {"IL", "ILp"}
COIND = {"CIR"}


def apply_rule(seq: Sequent, inst: RuleInstance, ctx: Context) -> list[Sequent]:
    if inst.tag in CORE:
        out = apply_core(seq, inst, ctx)
    elif inst.tag in NABS:
        out = apply_nabs(seq, inst, ctx)
    elif inst.tag in DEF:
        out = apply_def(seq, inst, ctx)
    elif inst.tag in IND:
        out = apply_induction(seq, inst, ctx)
    elif inst.tag in COIND:
        out = apply_coinduction(seq, inst, ctx)
    else:
        raise RuleError(inst.tag, "unknown rule")
    for s in out:
        s.check()
    return out


# ---------------------------------------------------------------- helpers

def _hyp(seq: Sequent, inst: RuleInstance, kind: str | tuple | None = None) -> tuple[int, Term]:
    i = inst.params.get("hyp")
    if not isinstance(i, int) or not 0 <= i < len(seq.hyps):
        raise RuleError(inst.tag, f"no hypothesis at position {i}")
    f = seq.hyps[i]
    if kind is not None:
        kinds = (kind,) if isinstance(kind, str) else kind
        if view(f).kind not in kinds:
            raise RuleError(inst.tag, f"hypothesis {show(f)} has the wrong shape")
    return i, f


def _without(seq: Sequent, i: int) -> tuple[Term, ...]:
    return seq.hyps[:i] + seq.hyps[i + 1:]


def _goal(seq: Sequent, inst: RuleInstance, kind: str | tuple) -> Term:
    kinds = (kind,) if isinstance(kind, str) else kind
    if view(seq.goal).kind not in kinds:
        raise RuleError(inst.tag, f"goal {show(seq.goal)} has the wrong shape")
    return seq.goal


def fresh_var(base: str, ty: Type, taken: set[str]) -> Var:
    base = (base[:1].upper() + base[1:]) if base else "H"
    return Var(fresh_name(base, taken), ty)


def _check_witness(tag: str, t: Term, ty: Type, seq: Sequent) -> Term:
    t = normalize(t)
    try:
        got = typecheck(t)
    except Exception as e:
        raise RuleError(tag, f"ill-typed witness: {e}")
    if got != ty:
        raise RuleError(tag, f"witness has type {got}, expected {ty}")
    if not free_vars(t) <= set(seq.sig):
        raise RuleError(tag, "witness mentions variables outside the signature")
    return t


def _raise(seq: Sequent, lam: Lam, name: str | None, extra: list[Nom] = ()) -> tuple[Var, Term]:
    """Fresh h over supp(B) (plus any extra constants, which are then dropped)."""
    cs = sorted_noms(support(lam))
    taken = {v.name for v in seq.sig}
    h = fresh_var(name or lam.name, arrows([c.ty for c in cs], lam.ty), taken)
    inst = eta_long(App(h, tuple(eta_long(c) for c in cs)) if cs else h)
    return h, inst


# ---------------------------------------------------------------- core rules

def apply_core(seq: Sequent, inst: RuleInstance, ctx: Context) -> list[Sequent]:
    tag, p = inst.tag, inst.params
    S, G, C = seq.sig, seq.hyps, seq.goal
    if tag == "id":
        _, f = _hyp(seq, inst)
        if perm_equiv(C, f) is None:
            raise RuleError(tag, f"{show(f)} is not a permutation variant of {show(C)}")
        return []
    if tag == "cut":
        b = normalize(p["formula"])
        if typecheck(b) != PROP or not free_vars(b) <= set(S):
            raise RuleError(tag, "cut formula must be a formula over the signature")
        return [Sequent(S, G, b), Sequent(S, G + (b,), C)]
    if tag == "lemma":
        name = p["name"]
        if name not in ctx.lemmas:
            raise RuleError(tag, f"unknown lemma {name}")
        if perm_equiv(C, ctx.lemmas[name]) is None:
            raise RuleError(tag, f"goal is not the statement of {name}")
        return []
    if tag == "cL":
        i, f = _hyp(seq, inst)
        return [Sequent(S, G + (f,), C)]
    if tag == "botL":
        _hyp(seq, inst, "bot")
        return []
    if tag == "topR":
        _goal(seq, inst, "top")
        return []
    if tag == "orL":
        i, f = _hyp(seq, inst, "or")
        a, b = view(f).parts
        rest = _without(seq, i)
        return [Sequent(S, rest + (a,), C), Sequent(S, rest + (b,), C)]
    if tag == "orR":
        a, b = view(_goal(seq, inst, "or")).parts
        side = p.get("side")
        if side not in (1, 2):
            raise RuleError(tag, "side must be 1 or 2")
        return [Sequent(S, G, a if side == 1 else b)]
    if tag == "andL":
        i, f = _hyp(seq, inst, "and")
        side = p.get("side")
        if side not in (1, 2):
            raise RuleError(tag, "side must be 1 or 2")
        part = view(f).parts[side - 1]
        return [Sequent(S, _without(seq, i) + (part,), C)]
    if tag == "andR":
        a, b = view(_goal(seq, inst, "and")).parts
        return [Sequent(S, G, a), Sequent(S, G, b)]
    if tag == "impL":
        i, f = _hyp(seq, inst, "imp")
        a, b = view(f).parts
        rest = _without(seq, i)
        return [Sequent(S, rest, a), Sequent(S, rest + (b,), C)]
    if tag == "impR":
        a, b = view(_goal(seq, inst, "imp")).parts
        return [Sequent(S, G + (a,), b)]
    if tag == "allL":
        i, f = _hyp(seq, inst, "forall")
        lam = view(f).parts[0]
        t = _check_witness(tag, p["witness"], lam.ty, seq)
        return [Sequent(S, _without(seq, i) + (open_quant(f, t),), C)]
    if tag == "exR":
        lam = view(_goal(seq, inst, "exists")).parts[0]
        t = _check_witness(tag, p["witness"], lam.ty, seq)
        return [Sequent(S, G, open_quant(C, t))]
    if tag == "allR":
        lam = view(_goal(seq, inst, "forall")).parts[0]
        h, hc = _raise(seq, lam, p.get("name"))
        return [Sequent(S + (h,), G, open_quant(C, hc))]
    if tag == "exL":
        i, f = _hyp(seq, inst, "exists")
        lam = view(f).parts[0]
        h, hc = _raise(seq, lam, p.get("name"))
        return [Sequent(S + (h,), _without(seq, i) + (open_quant(f, hc),), C)]
    if tag == "nablaL":
        i, f = _hyp(seq, inst, "nabla")
        a = _fresh_nominal(tag, f, p.get("nom"))
        return [Sequent(S, _without(seq, i) + (open_quant(f, eta_long(a)),), C)]
    if tag == "nablaR":
        _goal(seq, inst, "nabla")
        a = _fresh_nominal(tag, C, p.get("nom"))
        return [Sequent(S, G, open_quant(C, eta_long(a)))]
    raise RuleError(tag, "not a core rule")


def _fresh_nominal(tag: str, f: Term, requested: Nom | None) -> Nom:
    lam = view(f).parts[0]
    supp = support(f)
    if requested is not None:
        if requested.ty != lam.ty or requested in supp:
            raise RuleError(tag, f"n{requested.idx} is not fresh for the formula")
        return requested
    return fresh_noms([lam.ty], supp)[0]


# ---------------------------------------------------------------- nominal abstraction

def apply_nabs(seq: Sequent, inst: RuleInstance, ctx: Context) -> list[Sequent]:
    tag = inst.tag
    if tag == "nabsR":
        s, t = view(_goal(seq, inst, "nabs")).parts
        if not holds(s, t):
            raise RuleError(tag, f"{show(seq.goal)} does not hold")
        return []
    i, f = _hyp(seq, inst, "nabs")
    s, t = view(f).parts
    try:
        sols = csnas(seq.sig, s, t, avoid_names={v.name for v in seq.sig})
    except NonPattern as e:
        raise RuleError(tag, f"outside the pattern fragment: {e}")
    rest = _without(seq, i)
    return [_instance(seq.sig, rest, seq.goal, theta) for theta in sols]


def _instance(sig, hyps, goal, theta: Subst, extra_vars=()) -> Sequent:
    theta = _keep_names(sig, theta)
    new_sig = signature_after(list(sig) + list(extra_vars), theta)
    hyps = tuple(nca_apply(theta, h) for h in hyps)
    goal = nca_apply(theta, goal)
    used = set()
    for f in hyps + (goal,):
        used |= free_vars(f)
    keep = tuple(v for v in new_sig if v in sig or v in used)
    return Sequent(keep, hyps, goal)


def _eta_free_var(t: Term | None) -> Var | None:
    if t is None:
        return None
    k = 0
    while isinstance(t, Lam):
        k, t = k + 1, t.body
    h, args = head_args(t)
    if not isinstance(h, Var) or len(args) != k:
        return None
    if any(eta_var(a) != k - 1 - j for j, a in enumerate(args)):
        return None
    return h


def _keep_names(sig, theta: Subst) -> Subst:
    """When theta merely renames an eigenvariable, reuse the old name."""
    in_range = set(theta.range_vars())
    ren: dict[Var, Term] = {}
    for v in sig:
        w = _eta_free_var(theta.map.get(v))
        if w is not None and w.ty == v.ty and w not in sig and w not in ren and v not in in_range:
            ren[w] = v
    if ren:
        theta = Subst({x: ordinary_apply(ren, t) for x, t in theta.map.items()})
    # between two eigenvariables, keep the one a user could have named
    changed = True
    while changed:
        changed = False
        for v, t in theta.map.items():
            w = _eta_free_var(t)
            if (w is not None and w in sig and w.ty == v.ty and w.name.startswith("_")
                    and not v.name.startswith("_") and w not in theta.map):
                m = {x: ordinary_apply({w: v}, u) for x, u in theta.map.items() if x != v}
                m[w] = eta_long(v)
                theta, changed = Subst(m), True
                break
    return theta


# ---------------------------------------------------------------- definitions

def _pred_def(tag: str, atom: Term, ctx: Context) -> PredDef:
    v = view(atom)
    pd = ctx.defs.get(v.const) if v.kind == "atom" else None
    if pd is None:
        raise RuleError(tag, f"{show(atom)} is not an instance of a defined predicate")
    return pd


def rename_clause(cl: Clause, taken: set[str], over: list[Nom] = ()) -> tuple[Clause, list[Var]]:
    """Rename the clause variables apart from taken, raising them over `over`."""
    taken = set(taken)
    m: dict[Var, Term] = {}
    xs = []
    for x in cl.xs:
        y = Var(fresh_name(x.name, taken), arrows([c.ty for c in over], x.ty))
        taken.add(y.name)
        m[x] = eta_long(App(y, tuple(eta_long(c) for c in over))) if over else y
        xs.append(y)
    head = ordinary_apply(m, cl.head)
    body = ordinary_apply(m, cl.body)
    return Clause(cl.pred, tuple(xs), cl.nabla, head, body, cl.flavor, cl.nabla_names), xs


def clause_solutions(cl: Clause, atom: Term, flex: list[Var], taken: set[str]) -> list[Subst]:
    return list(csnas(flex, head_as_term(cl), goal_as_term(atom), avoid_names=taken))


def match_clause(cl0: Clause, atom: Term, taken: set[str]) -> list[tuple[Clause, dict[Var, Term]]]:
    """Every csnas instance of cl0 matching atom, with the clause variables
    raised over supp(atom).  Each entry carries the instantiated clause and
    the term chosen for every original clause variable.  Raises NonPattern."""
    over = sorted_noms(support(atom))
    cl, xs = rename_clause(cl0, taken, over)
    sols = clause_solutions(cl, atom, xs, taken | {x.name for x in xs})
    args = tuple(eta_long(c) for c in over)
    out = []
    for theta in sols:
        terms = {x: normalize(ordinary_apply(theta, eta_long(App(y, args)) if args else y))
                 for x, y in zip(cl0.xs, xs)}
        inst = Clause(cl.pred, cl.xs, cl.nabla, normalize(ordinary_apply(theta, cl.head)),
                      normalize(ordinary_apply(theta, cl.body)), cl.flavor, cl.nabla_names)
        out.append((inst, terms))
    return out


def apply_def(seq: Sequent, inst: RuleInstance, ctx: Context) -> list[Sequent]:
    tag, p = inst.tag, inst.params
    taken = {v.name for v in seq.sig}
    if tag in ("defR", "defL"):
        if tag == "defR":
            atom = _goal(seq, inst, "atom")
        else:
            i, atom = _hyp(seq, inst, "atom")
        pd = _pred_def(tag, atom, ctx)
        cl = pd.translated
        _, args = head_args(atom)
        body = normalize(ordinary_apply(dict(zip(cl.xs, args)), cl.body))
        if tag == "defR":
            return [Sequent(seq.sig, seq.hyps, body)]
        return [Sequent(seq.sig, _without(seq, i) + (body,), seq.goal)]
    if tag == "defRp":
        atom = _goal(seq, inst, "atom")
        pd = _pred_def(tag, atom, ctx)
        k = p.get("clause", 0)
        if not 0 <= k < len(pd.clauses):
            raise RuleError(tag, f"{pd.pred.name} has no clause {k + 1}")
        try:
            sols = match_clause(pd.clauses[k], atom, taken)
        except NonPattern as e:
            raise RuleError(tag, f"outside the pattern fragment: {e}")
        j = p.get("solution", 0)
        if not 0 <= j < len(sols):
            raise RuleError(tag, f"clause {k + 1} of {pd.pred.name} does not match {show(atom)}")
        body = sols[j][0].body
        loose = free_vars(body) - set(seq.sig)
        if loose:
            names = ", ".join(sorted(v.name for v in loose))
            raise RuleError(tag, f"clause variables {names} are not determined by the head")
        return [Sequent(seq.sig, seq.hyps, body)]
    if tag == "defLp":
        i, atom = _hyp(seq, inst, "atom")
        pd = _pred_def(tag, atom, ctx)
        rest = _without(seq, i)
        out = []
        for cl0 in pd.clauses:
            # clause variables may mention the constants of the atom
            cl, xs = rename_clause(cl0, taken, sorted_noms(support(atom)))
            try:
                sols = clause_solutions(cl, atom, list(seq.sig) + xs, taken | {x.name for x in xs})
            except NonPattern as e:
                raise RuleError(tag, f"outside the pattern fragment: {e}")
            extra = () if view(cl.body).kind == "top" else (cl.body,)
            for theta in sols:
                out.append(_instance(seq.sig, rest + extra, seq.goal, theta, xs))
        return out
    raise RuleError(tag, "not a definition rule")


# ---------------------------------------------------------------- induction

def _invariant(tag: str, s_term: Term, pred, ) -> Term:
    s_term = normalize(s_term)
    if support(s_term):
        raise RuleError(tag, "the invariant may not contain nominal constants")
    if free_vars(s_term):
        raise RuleError(tag, "the invariant must be closed")
    if typecheck(s_term) != pred.ty:
        raise RuleError(tag, f"the invariant must have type {pred.ty}")
    return s_term


def _clause_vars(cl: Clause, taken: set[str]) -> tuple[Clause, list[Var]]:
    return rename_clause(cl, taken)


def apply_induction(seq: Sequent, inst: RuleInstance, ctx: Context) -> list[Sequent]:
    tag, p = inst.tag, inst.params
    i, atom = _hyp(seq, inst, "atom")
    pd = _pred_def(tag, atom, ctx)
    if pd.flavor != "inductive":
        raise RuleError(tag, f"{pd.pred.name} is not inductive")
    S = _invariant(tag, p["S"], pd.pred)
    _, args = head_args(atom)
    s_app = normalize(App(S, args) if args else S)
    main = Sequent(seq.sig, _without(seq, i) + (s_app,), seq.goal)
    if tag == "IL":
        cl, xs = _clause_vars(pd.translated, set())
        body = normalize(replace_pred(cl.body, pd.pred, S))
        concl = normalize(App(S, tuple(xs)) if xs else S)
        return [Sequent(tuple(xs), (body,), concl), main]
    out = []
    for cl0 in pd.clauses:
        cl, xs = _clause_vars(cl0, set())
        body = normalize(replace_pred(cl.body, pd.pred, S))
        head = normalize(replace_pred(cl.head, pd.pred, S))
        concl = _nablas(head)
        hyps = () if view(body).kind == "top" else (body,)
        out.append(Sequent(tuple(xs), hyps, concl))
    return out + [main]


def _nablas(head: Term) -> Term:
    """lambda z1..zn. F  |->  nabla z1 .. zn. F."""
    if isinstance(head, Lam):
        return mk_quant("nabla", Lam(head.ty, _nablas_body(head.body), head.name))
    return head


def _nablas_body(t: Term) -> Term:
    if isinstance(t, Lam):
        return mk_quant("nabla", Lam(t.ty, _nablas_body(t.body), t.name))
    return t


def apply_coinduction(seq: Sequent, inst: RuleInstance, ctx: Context) -> list[Sequent]:
    tag, p = inst.tag, inst.params
    atom = _goal(seq, inst, "atom")
    pd = _pred_def(tag, atom, ctx)
    if pd.flavor != "coinductive":
        raise RuleError(tag, f"{pd.pred.name} is not co-inductive")
    S = _invariant(tag, p["S"], pd.pred)
    _, args = head_args(atom)
    cl, xs = _clause_vars(pd.translated, set())
    s_goal = normalize(App(S, args) if args else S)
    s_x = normalize(App(S, tuple(xs)) if xs else S)
    body = normalize(replace_pred(cl.body, pd.pred, S))
    return [Sequent(seq.sig, seq.hyps, s_goal), Sequent(tuple(xs), (s_x,), body)]
