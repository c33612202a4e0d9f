"""Proof states, tactics and certificates.

Tactics are untrusted: each one only ever asks the kernel for premises.  A
certificate is the resulting tree of rule instances, and check_certificate
replays it through the kernel from the theorem statement.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .calculus import (
    Context, RuleError, RuleInstance, Sequent, apply_rule, match_clause, rename_clause,
)
from .defs import DefTable, head_as_term
from .formulas import QUANTIFIERS, mk_quant, open_quant, view
from .nabs import csnas
from .nominal import Subst, fresh_noms, ordinary_apply, perm_equiv, sorted_noms, support, support_all
from .parser import ParseError, Tactic, elaborate
from .printer import show
from .syntax import (
    PROP, App, Lam, Nom, Signature, Term, Type, Var, abstract, arrows, eta_long, free_vars,
    head_args, normalize, split_type, strip_lams,
)
from .unify import NonPattern, pattern_unify_eqs


class TacticError(Exception):
    pass


# ---------------------------------------------------------------- certificates

@dataclass(eq=False)
class Node:
    seq: Sequent
    rule: RuleInstance | None = None
    children: list["Node"] = field(default_factory=list)

    def reset(self) -> None:
        self.rule = None
        self.children = []

    def closed(self) -> bool:
        return self.rule is not None and all(c.closed() for c in self.children)

    def skeleton(self) -> tuple:
        return (self.rule.tag if self.rule else None, tuple(c.skeleton() for c in self.children))

    def flat(self) -> list[dict]:
        out = []
        stack = [self]
        while stack:
            n = stack.pop()
            d = n.rule.to_json() if n.rule else {"tag": None, "params": {}}
            d["children"] = len(n.children)
            out.append(d)
            stack.extend(reversed(n.children))
        return out

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def tags(self) -> set[str]:
        out = {self.rule.tag} if self.rule else set()
        for c in self.children:
            out |= c.tags()
        return out


@dataclass
class Certificate:
    theorem: str
    formula: Term
    root: Node

    def to_json(self) -> dict:
        return {"theorem": self.theorem, "rules": self.root.flat()}


def check_node(node: Node, ctx: Context) -> None:
    """Re-derive every premise with the kernel and compare it to the recorded child."""
    stack = [node]
    while stack:
        n = stack.pop()
        if n.rule is None:
            raise RuleError("open", f"unproved sequent {n.seq.show()}")
        prems = apply_rule(n.seq, n.rule, ctx)
        if len(prems) != len(n.children) or any(p != c.seq for p, c in zip(prems, n.children)):
            raise RuleError(n.rule.tag, "recorded premises differ from the kernel's")
        stack.extend(n.children)


def check_certificate(cert: Certificate, ctx: Context) -> bool:
    if cert.root.seq != Sequent((), (), cert.formula):
        raise RuleError("root", "certificate does not prove the stated formula")
    check_node(cert.root, ctx)
    return True


# ---------------------------------------------------------------- goals and labels

@dataclass(eq=False)
class Goal:
    node: Node
    labels: tuple[str, ...]
    fresh: bool = False     # inside a premise whose context starts over

    @property
    def seq(self) -> Sequent:
        return self.node.seq

    def index(self, label: str) -> int:
        if label not in self.labels:
            raise TacticError(f"no hypothesis named {label}")
        return self.labels.index(label)


CONSUMING = {"orL", "andL", "impL", "allL", "exL", "nablaL", "nabsL", "defL", "defLp", "IL", "ILp"}
_temp = [0]


def _temp_label() -> str:
    _temp[0] += 1
    return f"?{_temp[0]}"


def own_context(inst: RuleInstance, k: int, n: int) -> bool:
    return (inst.tag in ("IL", "ILp") and k < n - 1) or (inst.tag == "CIR" and k == 1)


def premise_labels(inst: RuleInstance, labels: tuple[str, ...], k: int, n: int, seq: Sequent) -> tuple:
    if own_context(inst, k, n):
        return tuple(_temp_label() for _ in seq.hyps)
    elif inst.tag in CONSUMING:
        i = inst.params["hyp"]
        base = labels[:i] + labels[i + 1:]
    else:
        base = labels
    extra = len(seq.hyps) - len(base)
    assert extra >= 0
    return base + tuple(_temp_label() for _ in range(extra))


def finalize_labels(g: Goal, reserved: tuple[str, ...]) -> None:
    used = {l for l in g.labels if not l.startswith("?")}
    if not g.fresh:
        used |= set(reserved)
    g.fresh = False
    nums = [int(l[1:]) for l in used if l.startswith("H") and l[1:].isdigit()]
    nxt = max(nums, default=0) + 1
    out = []
    for l in g.labels:
        if l.startswith("?"):
            l = f"H{nxt}"
            nxt += 1
        out.append(l)
    g.labels = tuple(out)


class Builder:
    """Kernel-mediated construction of proof trees, with rule macros."""

    def __init__(self, ctx: Context, pattern_rules: bool = True) -> None:
        self.ctx = ctx
        self.pattern_rules = pattern_rules

    def step(self, g: Goal, tag: str, **params) -> list[Goal]:
        inst = RuleInstance(tag, params)
        prems = apply_rule(g.seq, inst, self.ctx)
        g.node.rule = inst
        g.node.children = [Node(p) for p in prems]
        n = len(prems)
        return [Goal(c, premise_labels(inst, g.labels, k, n, c.seq), g.fresh or own_context(inst, k, n))
                for k, c in enumerate(g.node.children)]

    # -- left decomposition of a defined atom, per clause and solution
    def case_atom(self, g: Goal, i: int) -> list[Goal]:
        if self.pattern_rules:
            return self.step(g, "defLp", hyp=i)
        pd = self.ctx.defs.get(view(g.seq.hyps[i]).const)
        [g1] = self.step(g, "defL", hyp=i)
        return self._cascade(g1, pd)

    def _cascade(self, g: Goal, pd) -> list[Goal]:
        """Split the translated body (last hypothesis) into its clause cases."""
        n = len(pd.clauses)
        out: list[Goal] = []

        def split(h: Goal, k: int) -> None:
            if k < n - 1:
                left, right = self.step(h, "orL", hyp=len(h.seq.hyps) - 1)
                one(left, k)
                split(right, k + 1)
            else:
                one(h, k)

        def one(h: Goal, k: int) -> None:
            for x in pd.clauses[k].xs:
                [h] = self.step(h, "exL", hyp=len(h.seq.hyps) - 1, name=x.name)
            last = len(h.seq.hyps) - 1
            if view(h.seq.hyps[last]).kind == "nabs":
                out.extend(self.step(h, "nabsL", hyp=last))
                return
            [h] = self.step(h, "cL", hyp=last)
            [h] = self.step(h, "andL", hyp=last, side=1)
            [h] = self.step(h, "andL", hyp=len(h.seq.hyps) - 2, side=2)
            out.extend(self.step(h, "nabsL", hyp=len(h.seq.hyps) - 2))

        split(g, 0)
        return out

    # -- right unfolding by a chosen clause and solution
    def unfold_options(self, g: Goal) -> list[tuple[int, int]]:
        atom = g.seq.goal
        pd = self.ctx.defs.get(view(atom).const) if view(atom).kind == "atom" else None
        if pd is None:
            return []
        out = []
        taken = {v.name for v in g.seq.sig}
        for k, cl0 in enumerate(pd.clauses):
            try:
                sols = match_clause(cl0, atom, taken)
            except NonPattern:
                continue
            out += [(k, j) for j in range(len(sols))]
        return out

    def unfold(self, g: Goal, k: int, j: int) -> list[Goal]:
        if self.pattern_rules:
            [h] = self.step(g, "defRp", clause=k, solution=j)
            if view(h.seq.goal).kind == "top":
                self.step(h, "topR")
                return []
            return [h]
        atom = g.seq.goal
        pd = self.ctx.defs.get(view(atom).const)
        taken = {v.name for v in g.seq.sig}
        cl0 = pd.clauses[k]
        terms = match_clause(cl0, atom, taken)[j][1]
        [h] = self.step(g, "defR")
        n = len(pd.clauses)
        for _ in range(k):
            [h] = self.step(h, "orR", side=2)
        if k < n - 1:
            [h] = self.step(h, "orR", side=1)
        for x in cl0.xs:
            [h] = self.step(h, "exR", witness=terms[x])
        if view(h.seq.goal).kind == "nabs":
            self.step(h, "nabsR")
            return []
        left, right = self.step(h, "andR")
        self.step(left, "nabsR")
        return [right]

    def induction(self, g: Goal, i: int, S: Term) -> list[Goal]:
        if self.pattern_rules:
            return self.step(g, "ILp", hyp=i, S=S)
        pd = self.ctx.defs.get(view(g.seq.hyps[i]).const)
        *prem, main = self.step(g, "IL", hyp=i, S=S)
        out = []
        for p in prem:
            out += self._cascade(p, pd)
        return out + [main]


# ---------------------------------------------------------------- apply / backchain spines

@dataclass
class Spine:
    steps: list            # ("forall", meta-or-term) | ("nabla", placeholder Nom) | ("imp", premise)
    concl: Term
    metas: list[Var]
    placeholders: list[Nom]


_PH = 10_000


def build_spine(f: Term, witnesses: list[Term | None], stop_at_atoms: bool = True) -> Spine:
    steps: list = []
    metas: list[Var] = []
    phs: list[Nom] = []
    ws = list(witnesses)
    while True:
        v = view(f)
        if v.kind == "forall":
            lam = v.parts[0]
            w = ws.pop(0) if ws else None
            if w is None:
                m = Var(f"?{len(metas)}", arrows([c.ty for c in phs], lam.ty))
                metas.append(m)
                w = eta_long(App(m, tuple(eta_long(c) for c in phs))) if phs else m
            steps.append(("forall", w))
            f = open_quant(f, w)
        elif v.kind == "nabla":
            lam = v.parts[0]
            c = Nom(_PH + len(phs), lam.ty)
            phs.append(c)
            steps.append(("nabla", c))
            f = open_quant(f, eta_long(c))
        elif v.kind == "imp":
            steps.append(("imp", v.parts[0]))
            f = v.parts[1]
        else:
            break
    if ws:
        raise TacticError("more witnesses than quantifiers")
    return Spine(steps, f, metas, phs)


def _rename_noms(t: Term, m: dict) -> Term:
    from .nominal import _rename_noms as rn
    return rn(t, m)


def solve_spine(sp: Spine, pairs: list[tuple[Term, Term]], sig_names: set[str], avoid: set[Nom]):
    """Yield (mapping of placeholders, substitution on metas) making each pair equal.

    Each placeholder becomes a constant of the targets or a constant fresh for
    avoid."""
    targets = sorted_noms(support_all([b for _, b in pairs]))
    targets += [d for d in sorted_noms(avoid) if d not in targets]
    spare = fresh_noms([c.ty for c in sp.placeholders], set(avoid) | set(targets))
    opts = [[d for d in targets if d.ty == c.ty] + [spare[k]]
            for k, c in enumerate(sp.placeholders)]
    for choice in product(*opts) if sp.placeholders else [()]:
        if len(set(choice)) != len(choice):
            continue
        m = dict(zip(sp.placeholders, choice))
        imgs = list(choice)
        eqs = [(abstract(_rename_noms(a, m), imgs), abstract(b, imgs)) for a, b in pairs]
        try:
            rho = pattern_unify_eqs(eqs, sp.metas, avoid_names=sig_names)
        except NonPattern:
            continue
        if rho is not None:
            yield m, rho


def instantiate_steps(sp: Spine, m: dict, rho: Subst) -> list:
    out = []
    for kind, x in sp.steps:
        if kind == "nabla":
            out.append((kind, m[x]))
        else:
            t = normalize(_rename_noms(ordinary_apply(rho, x), m))
            out.append((kind, t))
    return out


# ---------------------------------------------------------------- proof state

@dataclass
class ProofState:
    name: str
    formula: Term
    root: Node
    goals: list[Goal]
    ctx: Context
    sig: Signature
    builder: Builder
    search_depth: int = 5

    @property
    def done(self) -> bool:
        return not self.goals

    def certificate(self) -> Certificate:
        if self.goals:
            raise TacticError("proof is not complete")
        return Certificate(self.name, self.formula, self.root)

    def show_goal(self) -> str:
        if not self.goals:
            return "No more subgoals."
        g = self.goals[0]
        lines = []
        if g.seq.sig:
            lines.append("  " + ", ".join(f"{v.name}:{v.ty}" for v in g.seq.sig))
        for l, h in zip(g.labels, g.seq.hyps):
            lines.append(f"  {l} : {show(h)}")
        lines.append("  " + "=" * 30)
        lines.append("  " + show(g.seq.goal))
        more = f"\n({len(self.goals) - 1} other subgoal(s))" if len(self.goals) > 1 else ""
        return "\n".join(lines) + more


def start(name: str, formula: Term, ctx: Context, sig: Signature, pattern_rules: bool = True,
          search_depth: int = 5) -> ProofState:
    root = Node(Sequent((), (), formula))
    root.seq.check()
    return ProofState(name, formula, root, [Goal(root, ())], ctx, sig,
                      Builder(ctx, pattern_rules), search_depth)


def step(state: ProofState, tac: Tactic) -> ProofState:
    if not state.goals:
        raise TacticError("no subgoals remain")
    g = state.goals[0]
    try:
        new = _run(state, g, tac)
    except (RuleError, TacticError, ParseError, NonPattern) as e:
        g.node.reset()
        raise TacticError(f"{tac.kind}: {e}") from e
    for h in new:
        finalize_labels(h, g.labels)
    state.goals = new + state.goals[1:]
    return state


def _elab(state: ProofState, g: Goal, s, expected: Type, allow_holes=False) -> Term:
    env = {v.name: v for v in g.seq.sig}
    return elaborate(s, state.sig, expected, env, allow_holes=allow_holes)


def _run(state: ProofState, g: Goal, tac: Tactic) -> list[Goal]:
    b = state.builder
    k = tac.kind
    if k == "intros":
        return [intros(b, g)]
    if k == "case":
        return case(b, g, g.index(tac.args["hyp"]))
    if k == "induction":
        i = g.index(tac.args["hyp"])
        pd = state.ctx.defs.get(view(g.seq.hyps[i]).const)
        if pd is None:
            raise TacticError(f"{tac.args['hyp']} is not an atom of a defined predicate")
        S = elaborate(tac.args["S"], state.sig, pd.pred.ty)
        return b.induction(g, i, S)
    if k == "coinduction":
        v = view(g.seq.goal)
        pd = state.ctx.defs.get(v.const) if v.kind == "atom" else None
        if pd is None:
            raise TacticError("the goal is not an atom of a defined predicate")
        S = elaborate(tac.args["S"], state.sig, pd.pred.ty)
        return b.step(g, "CIR", S=S)
    if k == "exists":
        v = view(g.seq.goal)
        if v.kind != "exists":
            raise TacticError("the goal is not existential")
        return b.step(g, "exR", witness=_elab(state, g, tac.args["witness"], v.parts[0].ty))
    if k == "split":
        return b.step(g, "andR")
    if k == "left":
        return b.step(g, "orR", side=1)
    if k == "right":
        return b.step(g, "orR", side=2)
    if k == "unfold":
        opts = b.unfold_options(g)
        want = tac.args.get("n")
        if want is not None:
            opts = [o for o in opts if o[0] == want - 1]
        errors = []
        for kk, j in opts:
            try:
                return b.unfold(g, kk, j)
            except RuleError as e:
                g.node.reset()
                errors.append(str(e))
        raise TacticError("no clause applies" + (f" ({errors[0]})" if errors else ""))
    if k == "assert":
        f = _elab(state, g, tac.args["formula"], PROP)
        return b.step(g, "cut", formula=f)
    if k == "search":
        depth = tac.args.get("n", state.search_depth)
        if not Search(b, state.ctx).prove(g, depth):
            raise TacticError(f"search failed at depth {depth}")
        return []
    if k == "apply":
        return apply_tac(state, g, tac)
    raise TacticError(f"unknown tactic {k}")


def intros(b: Builder, g: Goal) -> Goal:
    while True:
        kind = view(g.seq.goal).kind
        if kind == "imp":
            [g] = b.step(g, "impR")
        elif kind == "forall":
            [g] = b.step(g, "allR")
        elif kind == "nabla":
            [g] = b.step(g, "nablaR")
        else:
            return g


def case(b: Builder, g: Goal, i: int) -> list[Goal]:
    f = g.seq.hyps[i]
    v = view(f)
    if v.kind == "or":
        return b.step(g, "orL", hyp=i)
    if v.kind == "and":
        [h] = b.step(g, "cL", hyp=i)
        [h] = b.step(h, "andL", hyp=i, side=1)
        return b.step(h, "andL", hyp=len(h.seq.hyps) - 2, side=2)
    if v.kind == "exists":
        return b.step(g, "exL", hyp=i)
    if v.kind == "nabla":
        return b.step(g, "nablaL", hyp=i)
    if v.kind == "nabs":
        return b.step(g, "nabsL", hyp=i)
    if v.kind == "bot":
        return b.step(g, "botL", hyp=i)
    if v.kind == "atom" and b.ctx.defs.get(v.const) is not None:
        return b.case_atom(g, i)
    raise TacticError(f"no left rule applies to {show(f)}")


def apply_tac(state: ProofState, g: Goal, tac: Tactic) -> list[Goal]:
    b = state.builder
    name = tac.args["lemma"]
    if name in g.labels:
        f = g.seq.hyps[g.index(name)]
        from_hyp = True
    elif name in state.ctx.lemmas:
        f = state.ctx.lemmas[name]
        from_hyp = False
    else:
        raise TacticError(f"unknown lemma or hypothesis {name}")
    to = tac.args.get("to", [])
    hyp_idx = [g.index(l) for l in to]
    raw = tac.args.get("with", [])
    binder_tys = [view_binder_ty(f, n) for n in range(len(raw))]
    ws = []
    for s, ty in zip(raw, binder_tys):
        from .parser import SHole
        ws.append(None if isinstance(s, SHole) else _elab(state, g, s, ty))
    sp = build_spine(f, ws)
    prem_pos = [n for n, (kind, _) in enumerate(sp.steps) if kind == "imp"]
    plan: dict[int, list[int]] = {}
    pairs = []
    k = 0
    for n in prem_pos:
        if k >= len(hyp_idx):
            break
        p = sp.steps[n][1]
        h = g.seq.hyps[hyp_idx[k]]
        if view(p).kind == "and" and view(h).kind != "and":
            cs = conjuncts(p)
            take = hyp_idx[k:k + len(cs)]
            if len(take) < len(cs):
                raise TacticError(f"premise {show(p)} needs {len(cs)} hypotheses")
            pairs += [(c, g.seq.hyps[i]) for c, i in zip(cs, take)]
        else:
            take = [hyp_idx[k]]
            pairs.append((p, h))
        plan[n] = take
        k += len(take)
    if k < len(hyp_idx):
        raise TacticError(f"{name} has fewer premises than given hypotheses")
    sig_names = {v.name for v in g.seq.sig}
    last_matched = max(plan, default=-1)
    errors = []
    avoid = support_all(list(g.seq.hyps) + [g.seq.goal, f])
    for m, rho in solve_spine(sp, pairs, sig_names, avoid):
        steps = instantiate_steps(sp, m, rho)
        # cut the spine at the first undetermined quantifier after the matched premises
        cut_at = len(steps)
        bad = None
        for n, (kind, t) in enumerate(steps):
            if kind == "forall" and not free_vars(t) <= set(g.seq.sig):
                if n < last_matched:
                    bad = n
                    break
                cut_at = n
                break
        if bad is not None:
            errors.append("cannot infer a witness; supply it with 'with'")
            continue
        steps = steps[:cut_at]
        try:
            return _run_spine(b, g, f, from_hyp, name, steps, plan, state)
        except (RuleError, TacticError) as e:
            g.node.reset()
            errors.append(str(e))
    raise TacticError(errors[0] if errors else f"{name} does not match the given hypotheses")


def conjuncts(f: Term) -> list[Term]:
    v = view(f)
    if v.kind == "and":
        return conjuncts(v.parts[0]) + conjuncts(v.parts[1])
    return [f]


def close_by_hyps(b: Builder, g: Goal, idxs: list[int]) -> None:
    """Close a (conjunctive) goal with the listed hypotheses, one per conjunct."""
    v = view(g.seq.goal)
    if len(idxs) > 1 and v.kind == "and":
        left, right = b.step(g, "andR")
        nl = len(conjuncts(v.parts[0]))
        close_by_hyps(b, left, idxs[:nl])
        close_by_hyps(b, right, idxs[nl:])
    else:
        b.step(g, "id", hyp=idxs[0])


def view_binder_ty(f: Term, n: int) -> Type:
    """Type of the n-th universal binder along the spine of f."""
    count = 0
    while True:
        v = view(f)
        if v.kind in ("forall", "nabla"):
            lam = v.parts[0]
            if v.kind == "forall":
                if count == n:
                    return lam.ty
                count += 1
            f = lam.body
        elif v.kind == "imp":
            f = v.parts[1]
        else:
            raise TacticError("more witnesses than quantifiers")


def _run_spine(b: Builder, g: Goal, f: Term, from_hyp: bool, name: str, steps: list,
               plan: dict[int, list[int]], state: ProofState) -> list[Goal]:
    side: list[Goal] = []
    if from_hyp:
        [h] = b.step(g, "cL", hyp=g.index(name))
    else:
        left, h = b.step(g, "cut", formula=f)
        b.step(left, "lemma", name=name)
    for n, (kind, t) in enumerate(steps):
        last = len(h.seq.hyps) - 1
        if kind == "forall":
            [h] = b.step(h, "allL", hyp=last, witness=t)
        elif kind == "nabla":
            [h] = b.step(h, "nablaL", hyp=last, nom=t)
        else:
            left, h = b.step(h, "impL", hyp=last)
            if n in plan:
                close_by_hyps(b, left, plan[n])
            elif not Search(b, state.ctx).prove(left, 0):
                side.append(left)
    return [h] + side


# ---------------------------------------------------------------- search

class Search:
    """Bounded depth-first proof search.  Depth counts non-invertible steps only."""

    def __init__(self, b: Builder, ctx: Context, max_candidates: int = 12) -> None:
        self.b = b
        self.ctx = ctx
        self.max_candidates = max_candidates

    def prove(self, g: Goal, depth: int) -> bool:
        if self.close(g):
            return True
        inv = self.invertible(g)
        if inv is not None:
            if all(self.prove(s, depth) for s in inv):
                return True
            g.node.reset()
            return False
        if depth <= 0:
            return False
        for opt in self.options(g):
            try:
                subs = opt()
            except (RuleError, NonPattern, TacticError):
                g.node.reset()
                continue
            if all(self.prove(s, depth - 1) for s in subs):
                return True
            g.node.reset()
        return False

    def _try(self, g: Goal, tag: str, **params) -> list[Goal] | None:
        try:
            return self.b.step(g, tag, **params)
        except (RuleError, NonPattern):
            g.node.reset()
            return None

    def close(self, g: Goal) -> bool:
        seq = g.seq
        kind = view(seq.goal).kind
        if kind == "top":
            return self._try(g, "topR") is not None
        for i, h in enumerate(seq.hyps):
            if view(h).kind == "bot":
                return self._try(g, "botL", hyp=i) is not None
        for i, h in enumerate(seq.hyps):
            if perm_equiv(seq.goal, h) is not None:
                return self._try(g, "id", hyp=i) is not None
        if kind == "nabs":
            return self._try(g, "nabsR") is not None
        return False

    def invertible(self, g: Goal) -> list[Goal] | None:
        seq = g.seq
        kind = view(seq.goal).kind
        right = {"imp": "impR", "forall": "allR", "nabla": "nablaR", "and": "andR"}
        if kind in right:
            return self._try(g, right[kind])
        for i, h in enumerate(seq.hyps):
            k = view(h).kind
            if k in ("or", "exists", "nabla"):
                return self._try(g, {"or": "orL", "exists": "exL", "nabla": "nablaL"}[k], hyp=i)
            if k == "and":
                return case(self.b, g, i)
            if k == "nabs":
                r = self._try(g, "nabsL", hyp=i)
                if r is not None:
                    return r
        return None

    def options(self, g: Goal):
        seq = g.seq
        v = view(seq.goal)
        if v.kind == "atom":
            for k, j in self.b.unfold_options(g):
                yield lambda k=k, j=j: self.b.unfold(g, k, j)
        if v.kind == "or":
            yield lambda: self.b.step(g, "orR", side=1)
            yield lambda: self.b.step(g, "orR", side=2)
        if v.kind == "exists":
            for ws in self.exists_candidates(g):
                yield lambda ws=ws: self._exists(g, ws)
        for i, h in enumerate(seq.hyps):
            if view(h).kind in ("forall", "imp"):
                for steps in self.backchain_candidates(g, h):
                    yield lambda i=i, steps=steps: self._backchain(g, i, steps)
        for i, h in enumerate(seq.hyps):
            hv = view(h)
            if hv.kind == "atom" and self.ctx.defs.get(hv.const) is not None:
                yield lambda i=i: self.b.case_atom(g, i)

    # -- existential witnesses
    def _exists(self, g: Goal, ws: list[Term]) -> list[Goal]:
        for w in ws:
            [g] = self.b.step(g, "exR", witness=w)
        return [g]

    def exists_candidates(self, g: Goal) -> list[list[Term]]:
        f = g.seq.goal
        metas: list[Var] = []
        while view(f).kind == "exists":
            lam = view(f).parts[0]
            m = Var(f"?{len(metas)}", lam.ty)
            metas.append(m)
            f = open_quant(f, m)
        return [[th[m] for m in metas] for th in self.complete(g, metas, _conjuncts(f), {})]

    def complete(self, g: Goal, metas: list[Var], atoms: list[Term], theta0: dict) -> list[dict]:
        """Assignments for metas, guided by atoms that should become provable."""
        sig = set(g.seq.sig)
        sig_names = {v.name for v in sig}
        found: list[dict] = []

        def extend(k: int, theta: dict) -> None:
            if len(found) >= self.max_candidates:
                return
            if k == len(atoms):
                for full in self._fill(g, metas, theta):
                    if full not in found:
                        found.append(full)
                return
            a = normalize(ordinary_apply(theta, atoms[k]))
            for sol in self._atom_solutions(g, a, [m for m in metas if m not in theta], sig_names):
                new = dict(theta)
                new.update(sol)
                new = {m: normalize(ordinary_apply(new, t)) for m, t in new.items()}
                if all(free_vars(t) <= sig for t in new.values()):
                    extend(k + 1, new)
            extend(k + 1, theta)

        extend(0, dict(theta0))
        return found[: self.max_candidates]

    def _fill(self, g: Goal, metas: list[Var], theta: dict):
        rest = [m for m in metas if m not in theta]
        pools = [self._defaults(g, m.ty, k + 1) for k, m in enumerate(rest)]
        # assignments using more distinct values first
        combos = sorted(product(*pools), key=lambda vals: -len(set(vals)))
        for vals in combos[:8]:
            full = dict(theta)
            full.update(zip(rest, vals))
            yield full

    def _defaults(self, g: Goal, ty: Type, nfresh: int = 1) -> list[Term]:
        seq = g.seq
        supp = support_all(list(seq.hyps) + [seq.goal])
        out: list[Term] = [eta_long(Nom(c.idx, c.ty)) for c in sorted_noms(supp) if c.ty == ty]
        if not mentions_arrow(ty):
            out += fresh_noms([ty] * nfresh, supp)
        out += [eta_long(v) for v in seq.sig if v.ty == ty]
        return out

    def _atom_solutions(self, g: Goal, a: Term, metas: list[Var], sig_names: set[str]) -> list[dict]:
        if not metas or not (free_vars(a) & set(metas)):
            return []
        out = []
        v = view(a)
        if v.kind == "nabs":
            try:
                for th in csnas(metas, v.parts[0], v.parts[1], avoid_names=sig_names):
                    out.append(dict(th.map))
            except NonPattern:
                pass
            return out
        if v.kind != "atom":
            return out
        for h in g.seq.hyps:
            if view(h).kind == "atom" and view(h).const == v.const:
                try:
                    th = pattern_unify_eqs([(a, h)], metas, avoid_names=sig_names)
                except NonPattern:
                    th = None
                if th is not None:
                    out.append(dict(th.map))
        pd = self.ctx.defs.get(v.const)
        if pd is not None:
            for cl0 in pd.clauses:
                cl, xs = rename_clause(cl0, sig_names | {m.name for m in metas},
                                       sorted_noms(support(a)))
                try:
                    from .defs import goal_as_term
                    sols = csnas(xs + metas, head_as_term(cl), goal_as_term(a),
                                 avoid_names=sig_names)
                except NonPattern:
                    continue
                for th in sols:
                    out.append({m: th.get(m) for m in metas if th.get(m) != m})
        return out

    # -- backchaining on universally quantified hypotheses
    def backchain_candidates(self, g: Goal, h: Term) -> list[list]:
        sp = build_spine(h, [])
        if not any(kind == "imp" for kind, _ in sp.steps) and not sp.metas:
            return []
        concl_bot = view(sp.concl).kind == "bot"
        sig = set(g.seq.sig)
        sig_names = {v.name for v in sig}
        out = []
        pairs = [] if concl_bot else [(sp.concl, g.seq.goal)]
        avoid = support_all(list(g.seq.hyps) + [g.seq.goal])
        for m, rho in solve_spine(sp, pairs, sig_names, avoid):
            steps = instantiate_steps(sp, m, rho)
            open_metas = [x for x in sp.metas if x not in rho.map]
            if open_metas and not sp.placeholders:
                prems = [c for kind, t in steps if kind == "imp" for c in conjuncts(t)]
                for th in self.complete(g, open_metas, prems, {})[:3]:
                    out.append([(kind, normalize(ordinary_apply(th, t)) if kind != "nabla" else t)
                                for kind, t in steps])
            elif all(free_vars(t) <= sig for kind, t in steps if kind == "forall"):
                out.append(steps)
            if len(out) >= 3:
                break
        return out

    def _backchain(self, g: Goal, i: int, steps: list) -> list[Goal]:
        [h] = self.b.step(g, "cL", hyp=i)
        subs = []
        for kind, t in steps:
            last = len(h.seq.hyps) - 1
            if kind == "forall":
                [h] = self.b.step(h, "allL", hyp=last, witness=t)
            elif kind == "nabla":
                [h] = self.b.step(h, "nablaL", hyp=last, nom=t)
            else:
                left, h = self.b.step(h, "impL", hyp=last)
                subs.append(left)
        return subs + [h]


def mentions_arrow(ty: Type) -> bool:
    from .syntax import Arrow
    return isinstance(ty, Arrow)


def _conjuncts(f: Term) -> list[Term]:
    v = view(f)
    if v.kind == "and":
        return _conjuncts(v.parts[0]) + _conjuncts(v.parts[1])
    if v.kind in ("atom", "nabs"):
        return [f]
    return []


# ---------------------------------------------------------------- whole theorems

@dataclass
class CheckResult:
    name: str
    ok: bool
    certificate: Certificate | None = None
    error: str = ""
    line: int = 0
    col: int = 0
    goal: str = ""


def check_theorem(name: str, formula: Term, script: list[Tactic], ctx: Context, sig: Signature,
                  pattern_rules: bool = True, search_depth: int = 5) -> CheckResult:
    st = start(name, formula, ctx, sig, pattern_rules, search_depth)
    for tac in script:
        if st.done:
            return CheckResult(name, False, error="extra tactics after the proof is complete",
                               line=tac.line, col=tac.col)
        live = st.show_goal()
        try:
            step(st, tac)
        except TacticError as e:
            return CheckResult(name, False, error=str(e), line=tac.line, col=tac.col, goal=live)
    if not st.done:
        return CheckResult(name, False, error=f"{len(st.goals)} subgoal(s) remain", goal=st.show_goal())
    cert = st.certificate()
    check_certificate(cert, ctx)
    return CheckResult(name, True, cert)
