"""Proof replay under permutation, ground instantiation and weakening."""
import random

import pytest

from gprover.calculus import Sequent
from gprover.replay import (
    ReplayError, Transport, junk_formulas, nodes, permute_formulas, replay_on, substitute_ground,
)
from gprover.nominal import equiv, support
from gprover.syntax import free_vars
from support import PERTURBATIONS, REPLAY_PROOFS, certified, perturb_and_replay

CASES = [(f, n) for f, names in REPLAY_PROOFS.items() for n in names]
_cache = {}


def load(name):
    if name not in _cache:
        _cache[name] = certified(name)
    return _cache[name]


@pytest.mark.parametrize("seed", [1, 2, 3])
@pytest.mark.parametrize("kind", PERTURBATIONS)
@pytest.mark.parametrize("file,proof", CASES)
def test_replay_preserves_skeleton(file, proof, kind, seed):
    sf, ctx, certs = load(file)
    changed, out = perturb_and_replay(sf, ctx, certs[proof], kind, seed)
    assert changed


def test_permutation_is_per_formula():
    sf, _, certs = load("stlc_uniq.thm")
    rng = random.Random(0)
    for node in nodes(certs["member_uniq"].root):
        seq = node.seq
        new, _ = permute_formulas(seq, rng)
        assert len(new.hyps) == len(seq.hyps)
        for a, b in zip(seq.hyps + (seq.goal,), new.hyps + (new.goal,)):
            assert equiv(a, b)


def test_ground_substitution_removes_variables():
    sf, _, certs = load("subst.thm")
    node = next(n for n in nodes(certs["subst_app"].root) if n.seq.sig and n.seq.hyps)
    new, tr, theta = substitute_ground(node.seq, sf.sig, random.Random(5))
    for f in new.hyps + (new.goal,):
        assert free_vars(f) <= set(new.sig)
    for t in theta.values():
        assert not support(t) and not free_vars(t)


def test_junk_formulas_are_closed():
    sf, _, certs = load("spec.thm")
    seq = certs["spec_unique"].root.seq
    for f in junk_formulas(seq, sf.sig, random.Random(1), k=6):
        assert not free_vars(f) - set(seq.sig)


def test_skeleton_change_is_detected():
    """A projection for X turns freshi n0 (X n0) into a case with no clause instance."""
    sf, ctx, certs = load("fresh.thm")
    root = certs["all_nabla_in"].root
    failures = 0
    for seed in range(1, 6):
        try:
            perturb_and_replay(sf, ctx, certs["all_nabla_in"], "subst", seed)
        except ReplayError as e:
            failures += 1
            assert "premises" in str(e) or "skeleton" in str(e)
    assert failures > 0
    assert root.seq.hyps == ()


def test_replay_rejects_unrelated_sequent():
    sf, ctx, certs = load("spec.thm")
    node = certs["spec_unique"].root
    other = certs["spec_swapped"].root.seq
    with pytest.raises(ReplayError):
        replay_on(node, Sequent((), (), other.goal), Transport({}, []), ctx)
