"""Clauses, definition tables, levels, stratification and the single-clause translation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .formulas import (
    BOT, QUANTIFIERS, TOP, View, check_nabs_shape, disj, mk_and, mk_nabs, mk_quant, view,
)
from .nominal import support
from .syntax import (
    PROP, App, Base, Bound, Const, Lam, Term, Type, Var, abstract, arrows, consts,
    free_vars, head_args, lams, mentions_prop, normalize, reduce_app, split_type,
    strip_lams, type_of,
)

FLAVORS = ("plain", "inductive", "coinductive")


class DefinitionError(Exception):
    pass


class MutualRecursion(DefinitionError):
    def __init__(self, p: str, q: str) -> None:
        super().__init__(f"{p} and {q} are mutually recursive; "
                         "merge mutually recursive clauses into a single clause")
        self.p, self.q = p, q


class NominalInClause(DefinitionError):
    pass


class FlavorMismatch(DefinitionError):
    pass


class StratificationError(DefinitionError):
    pass


@dataclass(frozen=True)
class Clause:
    """forall xs. (nabla zs. pred args) := body, with pred occurring in body as itself."""
    pred: Const
    xs: tuple[Var, ...]
    nabla: tuple[Type, ...]
    head: Term                  # lambda zs. pred args
    body: Term
    flavor: str = "plain"
    nabla_names: tuple[str, ...] = ()

    @property
    def args_abs(self) -> list[Term]:
        """Each head argument abstracted over the nabla binders."""
        tys, body = strip_lams(self.head)
        _, args = head_args(body)
        return [_wrap(tys, a) for a in args]


def _wrap(tys: list[Type], t: Term) -> Term:
    return lams(list(tys), t)


def make_clause(pred: Const, xs: list[Var], znames: list[str], zs: list[Var], args: list[Term],
                body: Term, flavor: str) -> Clause:
    """Build a clause; zs are placeholder variables for the nabla binders."""
    head = App(pred, tuple(args)) if args else pred
    head = abstract(head, list(zs), list(znames)) if zs else head
    return Clause(pred, tuple(xs), tuple(z.ty for z in zs), normalize(head), normalize(body),
                  flavor, tuple(znames))


def tuple_const(pred: Const) -> Const:
    args, _ = split_type(pred.ty)
    return Const(pred.name + "'", arrows(args, Base("tup'" + pred.name)))


def head_as_term(cl: Clause) -> Term:
    """lambda zs. p' ts, a non-propositional stand-in for the clause head."""
    tys, body = strip_lams(cl.head)
    _, args = head_args(body)
    core = App(tuple_const(cl.pred), args) if args else tuple_const(cl.pred)
    return lams(list(tys), core)


def goal_as_term(atom: Term) -> Term:
    h, args = head_args(atom)
    return App(tuple_const(h), args) if args else tuple_const(h)


def replace_pred(t: Term, p: Const, s: Term) -> Term:
    """t with every occurrence of the constant p replaced by s, beta-reduced."""
    if isinstance(t, Const):
        return s if t == p else t
    if isinstance(t, Lam):
        return Lam(t.ty, replace_pred(t.body, p, s), t.name)
    if isinstance(t, App):
        return reduce_app(replace_pred(t.head, p, s), tuple(replace_pred(a, p, s) for a in t.args))
    return t


def top_pred(p: Const) -> Term:
    args, _ = split_type(p.ty)
    return lams(args, TOP)


@dataclass
class PredDef:
    pred: Const
    clauses: list[Clause]
    flavor: str
    level: int = 0
    translated: "Clause | None" = None


@dataclass
class DefTable:
    preds: dict[str, PredDef] = field(default_factory=dict)

    def get(self, p: Const | str | None) -> PredDef | None:
        if p is None:
            return None
        return self.preds.get(p if isinstance(p, str) else p.name)

    def levels(self) -> dict[str, int]:
        return {k: v.level for k, v in self.preds.items()}


# ---------------------------------------------------------------- levels

def lvl(f: Term, levels: dict[str, int]) -> int:
    v = view(f)
    if v.kind in ("top", "bot", "nabs"):
        return 0
    if v.kind in ("and", "or"):
        return max(lvl(v.parts[0], levels), lvl(v.parts[1], levels))
    if v.kind == "imp":
        return max(lvl(v.parts[0], levels) + 1, lvl(v.parts[1], levels))
    if v.kind in QUANTIFIERS:
        return lvl(v.parts[0].body, levels)
    if v.const is not None:
        return levels.get(v.const.name, 0)
    return 0


def _preds_in(t: Term, table: set[str]) -> set[str]:
    return {c.name for c in consts(t) if c.name in table}


def stratify(clauses: Iterable[Clause]) -> DefTable:
    clauses = list(clauses)
    by_pred: dict[str, list[Clause]] = {}
    for cl in clauses:
        by_pred.setdefault(cl.pred.name, []).append(cl)
    names = set(by_pred)
    table = DefTable()
    for p, cls in by_pred.items():
        flavors = {c.flavor for c in cls}
        if len(flavors) != 1:
            raise FlavorMismatch(f"clauses for {p} mix flavors {sorted(flavors)}")
        for c in cls:
            if support(c.head) or support(c.body):
                raise NominalInClause(f"a clause for {p} mentions a nominal constant")
            if c.flavor == "coinductive" and c.nabla:
                raise DefinitionError(f"co-inductive pattern clause for {p} may not use nabla in its head")
        table.preds[p] = PredDef(cls[0].pred, cls, cls[0].flavor)

    deps = {p: set().union(*(_preds_in(c.body, names) for c in cls)) - {p}
            for p, cls in by_pred.items()}
    order = _topo(deps)
    levels: dict[str, int] = {}
    for p in order:
        pd = table.preds[p]
        need = 0
        for c in pd.clauses:
            plugged = normalize(replace_pred(c.body, pd.pred, top_pred(pd.pred)))
            need = max(need, lvl(plugged, levels) + 1)
        levels[p] = need
        pd.level = need
        for c in pd.clauses:
            full = lvl(c.body, levels)
            if full > need:
                raise StratificationError(
                    f"clause for {p} is not stratified: lvl(body) = {full} exceeds lvl({p}) = {need}")
    for p in order:
        table.preds[p].translated = translate(table.preds[p])
    return table


def _topo(deps: dict[str, set[str]]) -> list[str]:
    order: list[str] = []
    state: dict[str, int] = {}

    def visit(p: str, stack: list[str]) -> None:
        if state.get(p) == 2:
            return
        if state.get(p) == 1:
            q = stack[stack.index(p) + 1] if stack.index(p) + 1 < len(stack) else p
            raise MutualRecursion(p, q)
        state[p] = 1
        for q in sorted(deps[p]):
            visit(q, stack + [p])
        state[p] = 2
        order.append(p)

    for p in sorted(deps):
        visit(p, [])
    return order


# ---------------------------------------------------------------- translation

def translate(pd: PredDef) -> Clause:
    """forall ys. p ys := \\/_i exists xs_i. ((lambda zs_i. p' ts_i) |> p' ys) /\\ B_i."""
    p = pd.pred
    arg_tys, _ = split_type(p.ty)
    ys = []
    for k, ty in enumerate(arg_tys):
        # not a surface identifier, so it never clashes with user names
        name = f"_y{k + 1}"
        ys.append(Var(name, ty))
    target = goal_as_term(App(p, tuple(ys)) if ys else p)
    disjuncts = []
    for c in pd.clauses:
        core = mk_nabs(head_as_term(c), target)
        if view(c.body).kind != "top":
            core = mk_and(core, c.body)
        for x in reversed(c.xs):
            core = mk_quant("exists", abstract(core, [x], [x.name.lower()]))
        disjuncts.append(core)
    body = normalize(disj(disjuncts))
    head = App(p, tuple(ys)) if ys else p
    return Clause(p, tuple(ys), (), head, body, pd.flavor)


# ---------------------------------------------------------------- well-formedness

def wellformed_formula(f: Term, sig=None) -> None:
    """Raise TypeError on prop quantification or badly shaped nominal abstractions."""
    from .syntax import typecheck
    if typecheck(f, (), sig) != PROP:
        raise TypeError("formula does not have type prop")
    _wf(f)


def _wf(f: Term) -> None:
    v = view(f)
    if v.kind in ("and", "or", "imp"):
        _wf(v.parts[0])
        _wf(v.parts[1])
    elif v.kind in QUANTIFIERS:
        lam = v.parts[0]
        if mentions_prop(lam.ty):
            raise TypeError(f"quantification over type {lam.ty} mentions prop")
        _wf(lam.body)
    elif v.kind == "nabs":
        s, t = v.parts
        check_nabs_shape(type_of(s), type_of(t))
        for u in (s, t):
            if mentions_prop(type_of(u)):
                raise TypeError("nominal abstraction operands may not mention prop")
