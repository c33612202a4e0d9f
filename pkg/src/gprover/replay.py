"""Replaying a certificate on a perturbed copy of one of its sequents.

The new sequent may differ from the recorded one by a permutation of nominal
constants per formula, by a ground substitution for eigenvariables, and by
extra hypotheses.  Replay keeps every rule tag and premise count; rule
parameters are carried over through a correspondence between the recorded and
the new sequents (eigenvariables by matching, hypotheses by position).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import permutations, product

from .calculus import Context, RuleError, RuleInstance, Sequent, apply_rule
from .formulas import BOT, TOP, mk_imp, mk_nabs, mk_quant
from .nominal import (
    Perm, apply_perm, fresh_name, fresh_noms, ordinary_apply, perm_equiv, sorted_noms, support,
    support_all,
)
from .syntax import (
    App, Arrow, Base, Bound, Const, Lam, Nom, Signature, Term, Type, Var, abstract, eta_long,
    free_vars, lams, normalize, split_type,
)
from .tactics import CONSUMING, Node, own_context
from .unify import NonPattern, pattern_unify_eqs


class ReplayError(Exception):
    pass


@dataclass
class Transport:
    ren: dict[Var, Term]      # recorded eigenvariable -> term over the new signature
    hyps: list[int]           # recorded hypothesis index -> new index


# ---------------------------------------------------------------- matching

def _nom_choices(src: list[Nom], tgt: list[Nom]) -> list[tuple[Nom, ...]]:
    spare = fresh_noms([c.ty for c in src], set(src) | set(tgt))
    opts = []
    for i, c in enumerate(src):
        o = [d for d in tgt if d.ty == c.ty] + [spare[i]]
        o.sort(key=lambda d: d != c)
        opts.append(o)
    return [ch for ch in product(*opts) if len(set(ch)) == len(ch)]


def match_sequents(old: Sequent, new: Sequent, hyps: list[int],
                   hints: dict[Var, Term] | None = None) -> dict[Var, Term] | None:
    """A nominal-free substitution for old's eigenvariables under which every
    recorded formula is a permutation variant of its new counterpart.

    hints (typically the parent's correspondence) seed variables that occur only
    outside the pattern fragment."""
    hints = hints or {}
    rigid = set(new.sig)
    used = {v.name for v in new.sig} | {v.name for v in old.sig}
    rn: dict[Var, Var] = {}
    for v in old.sig:
        w = Var(fresh_name(v.name + "_", used), v.ty)
        used.add(w.name)
        rn[v] = w
    pairs = [(ordinary_apply(rn, old.goal), new.goal)]
    pairs += [(ordinary_apply(rn, h), new.hyps[hyps[j]]) for j, h in enumerate(old.hyps)]

    def solve(queue: list[int], sigma: dict[Var, Term], stalled: int) -> dict[Var, Term] | None:
        if not queue:
            return sigma
        k, rest = queue[0], queue[1:]
        o = ordinary_apply(sigma, pairs[k][0]) if sigma else pairs[k][0]
        n = pairs[k][1]
        flex = sorted(free_vars(o) - rigid, key=lambda v: v.name)
        src, tgt = sorted_noms(support(o)), sorted_noms(support(n))
        outside = False
        for choice in _nom_choices(src, tgt) if src else [()]:
            pool = tgt + [d for d in choice if d not in tgt]
            o2 = _rename_noms(o, dict(zip(src, choice)))
            try:
                rho = pattern_unify_eqs([(abstract(o2, pool), abstract(n, pool))], flex, used)
            except NonPattern:
                outside = True
                continue
            if rho is None:
                continue
            nxt = {x: ordinary_apply(rho, t) for x, t in sigma.items()}
            nxt.update(rho.map)
            used.update(v.name for t in rho.map.values() for v in free_vars(t))
            out = solve(rest, nxt, 0)
            if out is not None:
                return out
        if outside and stalled < len(queue):
            # retry once the other formulas have fixed more variables
            return solve(rest + [k], sigma, stalled + 1)
        if outside:
            # every remaining formula is outside the pattern fragment: guess one variable
            for w in flex:
                for t in _guesses(w):
                    out = solve(queue, {**{x: ordinary_apply({w: t}, u) for x, u in sigma.items()},
                                        w: t}, 0)
                    if out is not None:
                        return out
        return None

    back = {w: v for v, w in rn.items()}

    def _guesses(w: Var) -> list[Term]:
        v = back.get(w)
        out = []
        if v is not None and v in hints and free_vars(hints[v]) <= rigid:
            out.append(hints[v])
        out += [eta_long(u) for u in new.sig if v is not None and u.name == v.name and u.ty == w.ty]
        return list(dict.fromkeys(out))

    sigma = solve(list(range(len(pairs))), {}, 0)
    if sigma is None:
        return None
    ren = {}
    for v, w in rn.items():
        t = sigma.get(w, w)
        if t == eta_long(w):
            # unconstrained: keep a same-named new eigenvariable if there is one
            same = [u for u in new.sig if u.name == v.name and u.ty == v.ty]
            if not same:
                continue
            t = eta_long(same[0])
        ren[v] = t
    return ren


def _rename_noms(t: Term, m: dict[Nom, Nom]) -> Term:
    if isinstance(t, Nom):
        return m.get(t, t)
    if isinstance(t, Lam):
        return Lam(t.ty, _rename_noms(t.body, m), t.name)
    if isinstance(t, App):
        return App(_rename_noms(t.head, m), tuple(_rename_noms(a, m) for a in t.args))
    return t


# ---------------------------------------------------------------- parameters

def _perm_for(old_f: Term, new_f: Term, ren: dict[Var, Term]) -> Perm:
    pi = perm_equiv(new_f, normalize(ordinary_apply(ren, old_f)))
    if pi is None:
        raise ReplayError("recorded formula is not a variant of the new one")
    return pi


def _carry(t: Term, pi: Perm, ren: dict[Var, Term]) -> Term:
    return apply_perm(pi, normalize(ordinary_apply(ren, t)))


def candidates(old: Node, new: Sequent, tr: Transport) -> list[RuleInstance]:
    inst = old.rule
    p = dict(inst.params)
    if "hyp" in p:
        p["hyp"] = tr.hyps[p["hyp"]]
    target_old = old.seq.hyps[inst.params["hyp"]] if "hyp" in inst.params else old.seq.goal
    target_new = new.hyps[p["hyp"]] if "hyp" in p else new.goal
    if "witness" in p:
        pi = _perm_for(target_old, target_new, tr.ren)
        p["witness"] = _carry(p["witness"], pi, tr.ren)
    if p.get("nom") is not None:
        pi = _perm_for(target_old, target_new, tr.ren)
        p["nom"] = pi(p["nom"])
    for key in ("formula", "S"):
        if key in p:
            p[key] = normalize(ordinary_apply(tr.ren, p[key]))
    out = [RuleInstance(inst.tag, p)]
    if inst.tag in ("defRp",):
        # clause and solution numbering can move under renaming
        for k, j in product(range(8), range(8)):
            if (k, j) != (p.get("clause", 0), p.get("solution", 0)):
                out.append(RuleInstance(inst.tag, {**p, "clause": k, "solution": j}))
    return out


def premise_hyps(inst_old: RuleInstance, inst_new: RuleInstance, old_parent: Sequent,
                 new_parent: Sequent, old_prem: Sequent, new_prem: Sequent, k: int, n: int,
                 hyps: list[int]) -> list[int] | None:
    """Positions in new_prem of old_prem's hypotheses."""
    if own_context(inst_old, k, n):
        return list(range(len(old_prem.hyps))) if len(old_prem.hyps) == len(new_prem.hyps) else None
    consuming = inst_old.tag in CONSUMING
    out = []
    for j in range(len(old_parent.hyps)):
        if consuming and j == inst_old.params["hyp"]:
            continue
        pos = hyps[j]
        if consuming and pos > inst_new.params["hyp"]:
            pos -= 1
        out.append(pos)
    base_old = len(old_parent.hyps) - (1 if consuming else 0)
    base_new = len(new_parent.hyps) - (1 if consuming else 0)
    extra = len(old_prem.hyps) - base_old
    if len(new_prem.hyps) - base_new != extra:
        return None
    out += [base_new + e for e in range(extra)]
    return out


# ---------------------------------------------------------------- replay

def replay(old: Node, new: Sequent, tr: Transport, ctx: Context) -> Node:
    if old.rule is None:
        raise ReplayError("the recorded proof is open")
    errors = []
    for inst in candidates(old, new, tr):
        try:
            prems = apply_rule(new, inst, ctx)
        except RuleError as e:
            errors.append(str(e))
            continue
        if len(prems) != len(old.children):
            errors.append(f"{inst.tag}: {len(prems)} premises instead of {len(old.children)}")
            continue
        try:
            children = _replay_children(old, inst, new, prems, tr, ctx)
        except ReplayError as e:
            errors.append(str(e))
            continue
        return Node(new, inst, children)
    raise ReplayError(errors[0] if errors else f"{old.rule.tag}: no applicable instance")


def _replay_children(old: Node, inst: RuleInstance, new: Sequent, prems: list[Sequent],
                     tr: Transport, ctx: Context) -> list[Node]:
    n = len(prems)
    orders = [tuple(range(n))]
    if inst.tag in ("nabsL", "defLp", "defL") and n > 1:
        orders += [o for o in permutations(range(n)) if o != orders[0]][:120]
    last = "no premise correspondence"
    for order in orders:
        out = []
        try:
            for k, c in enumerate(old.children):
                prem = prems[order[k]]
                hyps = premise_hyps(old.rule, inst, old.seq, new, c.seq, prem, k, n, tr.hyps)
                if hyps is None:
                    raise ReplayError(f"{inst.tag}: premise {k} has a different shape")
                ren = match_sequents(c.seq, prem, hyps, tr.ren)
                if ren is None:
                    raise ReplayError(f"{inst.tag}: premise {k} does not match the recorded one")
                out.append(replay(c, prem, Transport(ren, hyps), ctx))
            return out
        except ReplayError as e:
            last = str(e)
    raise ReplayError(last)


def replay_on(node: Node, new: Sequent, tr: Transport, ctx: Context) -> Node:
    """Replay node's proof on new and confirm that the rule skeleton is unchanged."""
    out = replay(node, new, tr, ctx)
    if out.skeleton() != node.skeleton():
        raise ReplayError("rule skeleton changed")
    return out


# ---------------------------------------------------------------- perturbations

def nodes(root: Node):
    stack = [root]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(n.children))


def pick_node(root: Node, need_noms: bool = False, need_vars: bool = False) -> Node:
    """The first sequent (pre-order) with hypotheses and, if asked, nominal constants
    or eigenvariables; the root when none qualifies."""
    for n in nodes(root):
        s = n.seq
        if not s.hyps:
            continue
        if need_noms and not support_all(s.hyps + (s.goal,)):
            continue
        if need_vars and not s.sig:
            continue
        return n
    return root


def permute_formulas(seq: Sequent, rng: random.Random) -> tuple[Sequent, Transport]:
    """Rename nominal constants with an independent random permutation per formula."""
    def one(f: Term) -> Term:
        cs = sorted_noms(support(f))
        if not cs:
            return f
        pool = cs + fresh_noms([c.ty for c in cs], set(cs))
        for _ in range(10):
            img = list(pool)
            rng.shuffle(img)
            m = {a: b for a, b in zip(pool, img) if a.ty == b.ty}
            try:
                pi = Perm(m)
            except ValueError:
                continue
            g = apply_perm(pi, f)
            if g != f:
                return g
        return apply_perm(Perm.complete({cs[0]: pool[len(cs)]}), f)

    new = Sequent(seq.sig, tuple(one(h) for h in seq.hyps), one(seq.goal))
    return new, Transport({v: eta_long(v) for v in seq.sig}, list(range(len(seq.hyps))))


def ground_terms(sig: Signature, ty: Type, depth: int = 2) -> list[Term]:
    """Small closed terms of type ty built from declared constants (no nominals)."""
    args, res = split_type(ty)
    if args:
        inner = ground_terms(sig, res, depth)
        out = [lams(list(args), t) for t in inner]
        # also projections onto an argument of the result type
        for j, a in enumerate(args):
            if a == res:
                out.append(lams(list(args), Bound(len(args) - 1 - j, a)))
        return [normalize(t) for t in out]
    out: list[Term] = []
    consts = [c for c in sig.consts.values() if split_type(c.ty)[1] == ty
              and not any(isinstance(x, Arrow) for x in split_type(c.ty)[0])]
    for c in consts:
        cargs = split_type(c.ty)[0]
        if not cargs:
            out.append(c)
        elif depth > 0:
            subs = [ground_terms(sig, a, depth - 1) for a in cargs]
            if all(subs):
                out.append(App(c, tuple(s[0] for s in subs)))
    return out


def substitute_ground(seq: Sequent, sig: Signature, rng: random.Random,
                      size: int = 2) -> tuple[Sequent, Transport, dict[Var, Term]]:
    """Apply a small random ground substitution to some eigenvariables."""
    choices = [(v, ground_terms(sig, v.ty)) for v in seq.sig]
    choices = [(v, ts) for v, ts in choices if ts]
    rng.shuffle(choices)
    theta = {v: rng.choice(ts) for v, ts in choices[:size]}
    new_sig = tuple(v for v in seq.sig if v not in theta)
    # nominal-free ground terms: capture-avoiding application is ordinary application
    hyps = tuple(normalize(ordinary_apply(theta, h)) for h in seq.hyps)
    goal = normalize(ordinary_apply(theta, seq.goal))
    ren = {v: theta.get(v, eta_long(v)) for v in seq.sig}
    return Sequent(new_sig, hyps, goal), Transport(ren, list(range(len(seq.hyps)))), theta


def junk_formulas(seq: Sequent, sig: Signature, rng: random.Random, k: int = 3) -> list[Term]:
    sorts = sorted(s for s in sig.sorts if s != "prop")
    pool: list[Term] = [TOP, mk_imp(BOT, BOT)]
    for s in sorts:
        pool.append(mk_quant("forall", Lam(Base(s), TOP, "x")))
        pool.append(mk_quant("nabla", Lam(Base(s), mk_nabs(Bound(0, Base(s)), Bound(0, Base(s))), "x")))
    for v in seq.sig:
        pool.append(mk_nabs(eta_long(v), eta_long(v)))
    return [normalize(rng.choice(pool)) for _ in range(k)]


def weaken(seq: Sequent, sig: Signature, rng: random.Random, k: int = 3) -> tuple[Sequent, Transport]:
    """Insert k unused hypotheses at random positions."""
    hyps = list(seq.hyps)
    pos = list(range(len(hyps)))
    for junk in junk_formulas(seq, sig, rng, k):
        at = rng.randint(0, len(hyps))
        hyps.insert(at, junk)
        pos = [p + 1 if p >= at else p for p in pos]
    return Sequent(seq.sig, tuple(hyps), seq.goal), Transport({v: eta_long(v) for v in seq.sig}, pos)


__all__ = ["ReplayError", "Transport", "replay", "replay_on", "pick_node", "permute_formulas",
           "substitute_ground", "weaken", "match_sequents", "nodes", "Const"]
