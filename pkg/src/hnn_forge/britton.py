"""Classical HNN-extension word oracle over a finite base group.

For a finite group H, a subgroup S < H and an injective homomorphism
theta: S -> H, the HNN extension is

    Gamma = < H, t : theta(s) = t s t^{-1}  for all s in S >.

Words are  h_0 t^{e_1} h_1 ... t^{e_n} h_n  with h_i in H and e_i = +/-1.
Britton's lemma: a word with no pinch (t s t^{-1} with s in S, or
t^{-1} s' t with s' in theta(S)) and nonempty tail represents an element
outside H.  ``normal_form`` removes pinches and normalizes letters to
fixed coset-transversal representatives, giving a unique normal form.

This module is pure bookkeeping on group labels; it exists to
cross-validate the operator-algebra word rewriting independently.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence


class GroupError(ValueError):
    """Input data does not describe a group / subgroup / homomorphism."""


@dataclass(frozen=True)
class FiniteGroupData:
    """A finite group as labels plus a Cayley table, verified at load."""

    elements: tuple
    table: dict          # (a, b) -> ab
    identity: str
    inverse: dict = field(default=None)

    @staticmethod
    def from_table(elements: Sequence[str], rows: Sequence[Sequence[str]],
                   identity: str) -> "FiniteGroupData":
        elements = tuple(elements)
        eset = set(elements)
        if len(eset) != len(elements):
            raise GroupError("duplicate element labels")
        if identity not in eset:
            raise GroupError("identity label not among elements")
        if len(rows) != len(elements) or any(len(r) != len(elements) for r in rows):
            raise GroupError("Cayley table has wrong shape")
        table = {}
        for a, row in zip(elements, rows):
            for b, c in zip(elements, row):
                if c not in eset:
                    raise GroupError(f"table entry {c!r} is not an element")
                table[(a, b)] = c
        for a in elements:
            if table[(identity, a)] != a or table[(a, identity)] != a:
                raise GroupError("identity axiom fails")
        inverse = {}
        for a in elements:
            invs = [b for b in elements if table[(a, b)] == identity]
            if len(invs) != 1 or table[(invs[0], a)] != identity:
                raise GroupError(f"no unique inverse for {a!r}")
            inverse[a] = invs[0]
        for a in elements:
            for b in elements:
                for c in elements:
                    if table[(table[(a, b)], c)] != table[(a, table[(b, c)])]:
                        raise GroupError("associativity fails")
        return FiniteGroupData(elements, table, identity, inverse)

    @staticmethod
    def from_json(path: str) -> "FiniteGroupData":
        with open(path) as fh:
            data = json.load(fh)
        return FiniteGroupData.from_table(data["elements"], data["table"], data["identity"])

    def mult(self, a: str, b: str) -> str:
        return self.table[(a, b)]

    def inv(self, a: str) -> str:
        return self.inverse[a]

    def __len__(self) -> int:
        return len(self.elements)


def cyclic_group(n: int) -> FiniteGroupData:
    labels = [f"g{k}" for k in range(n)]
    rows = [[labels[(i + j) % n] for j in range(n)] for i in range(n)]
    return FiniteGroupData.from_table(labels, rows, "g0")


def symmetric_group_3() -> FiniteGroupData:
    """S3 as permutations of {0,1,2}, labelled by one-line notation."""
    import itertools

    perms = sorted(itertools.permutations(range(3)))
    label = {p: "".join(map(str, p)) for p in perms}
    elements = [label[p] for p in perms]
    rows = []
    for p in perms:
        rows.append([label[tuple(p[q[i]] for i in range(3))] for q in perms])
    return FiniteGroupData.from_table(elements, rows, label[(0, 1, 2)])


def _right_transversal(group: FiniteGroupData, subgroup: Sequence[str]) -> list:
    """Representatives r of the cosets S r, identity coset first.

    Chosen by first occurrence in element order so normal forms are
    deterministic across runs.
    """
    seen, reps = set(), []
    for g in [group.identity] + list(group.elements):
        if g in seen:
            continue
        reps.append(g)
        for s in subgroup:
            seen.add(group.mult(s, g))
    return reps


@dataclass(frozen=True)
class HNNGroupData:
    """The full oracle datum (H, Sigma, theta) plus coset bookkeeping."""

    group: FiniteGroupData
    sigma: tuple
    theta: dict
    theta_inv: dict = field(default=None)
    reps_plus: tuple = field(default=None)    # transversal of Sigma\H
    reps_minus: tuple = field(default=None)   # transversal of theta(Sigma)\H
    coset_plus: dict = field(default=None)    # h -> (s, r) with h = s r, s in Sigma
    coset_minus: dict = field(default=None)   # h -> (s', r) with h = s' r, s' in theta(Sigma)

    @staticmethod
    def build(group: FiniteGroupData, sigma: Sequence[str], theta: dict) -> "HNNGroupData":
        sigma = tuple(sigma)
        sset = set(sigma)
        if group.identity not in sset:
            raise GroupError("subgroup must contain the identity")
        for a in sigma:
            for b in sigma:
                if group.mult(a, b) not in sset:
                    raise GroupError("subgroup set is not closed under products")
        if set(theta) != sset:
            raise GroupError("theta must be defined exactly on the subgroup")
        if len(set(theta.values())) != len(sigma):
            raise GroupError("theta is not injective")
        for a in sigma:
            for b in sigma:
                if theta[group.mult(a, b)] != group.mult(theta[a], theta[b]):
                    raise GroupError("theta is not a homomorphism")
        theta_sigma = tuple(theta[s] for s in sigma)
        theta_inv = {theta[s]: s for s in sigma}

        def coset_split(sub):
            reps = _right_transversal(group, sub)
            split = {}
            for h in group.elements:
                for r in reps:
                    s = group.mult(h, group.inv(r))
                    if s in sub:
                        split[h] = (s, r)
                        break
            return tuple(reps), split

        reps_plus, coset_plus = coset_split(sset)
        reps_minus, coset_minus = coset_split(set(theta_sigma))
        return HNNGroupData(group, sigma, dict(theta), theta_inv,
                            reps_plus, reps_minus, coset_plus, coset_minus)

    @staticmethod
    def from_json(group_path: str, subgroup_path: str) -> "HNNGroupData":
        group = FiniteGroupData.from_json(group_path)
        with open(subgroup_path) as fh:
            data = json.load(fh)
        return HNNGroupData.build(group, data["subgroup"], dict(data["theta"]))

    def in_subgroup(self, h: str, eps: int) -> bool:
        """Membership in Sigma (eps=+1) or theta(Sigma) (eps=-1)."""
        return h in self.theta if eps == 1 else h in self.theta_inv

    def conjugate(self, h: str, eps: int) -> str:
        """t^eps h t^{-eps} for h in the matching subgroup."""
        return self.theta[h] if eps == 1 else self.theta_inv[h]


@dataclass(frozen=True)
class GroupWord:
    """h_0 t^{e_1} h_1 ... t^{e_n} h_n; ``normal`` marks Britton-reduced
    words with transversal letters."""

    h0: str
    tail: tuple = ()
    normal: bool = False

    @property
    def length(self) -> int:
        return len(self.tail)

    def inverse(self, data: HNNGroupData) -> "GroupWord":
        g = data.group
        if not self.tail:
            return GroupWord(g.inv(self.h0))
        letters = [self.h0] + [h for _, h in self.tail]
        signs = [e for e, _ in self.tail]
        new_tail = []
        for i in range(len(signs) - 1, -1, -1):
            new_tail.append((-signs[i], g.inv(letters[i])))
        return GroupWord(g.inv(letters[-1]), tuple(new_tail))

    def pretty(self) -> str:
        parts = [self.h0]
        for e, h in self.tail:
            parts.append("t" if e == 1 else "t^-1")
            parts.append(h)
        return ".".join(parts)


def normal_form(w: GroupWord, data: HNNGroupData) -> GroupWord:
    """Britton-reduce, then normalize letters to transversal representatives.

    A pinch  t s t^{-1}  (s in Sigma) collapses to theta(s); a pinch
    t^{-1} s' t  (s' in theta(Sigma)) collapses to theta^{-1}(s').  After
    reduction, every letter with a t-power to its left is replaced by its
    coset representative, pushing subgroup parts leftward through the
    relation.  Idempotent; never increases the length.
    """
    g = data.group
    letters = [w.h0] + [h for _, h in w.tail]
    signs = [e for e, _ in w.tail]

    changed = True
    while changed:
        changed = False
        for i in range(len(signs) - 1):
            if signs[i] == -signs[i + 1] and data.in_subgroup(letters[i + 1], signs[i]):
                mid = data.conjugate(letters[i + 1], signs[i])
                merged = g.mult(g.mult(letters[i], mid), letters[i + 2])
                letters[i:i + 3] = [merged]
                signs[i:i + 2] = []
                changed = True
                break

    # push subgroup parts left through t^e: h = s r  =>  t^e h = theta^e(s) t^e r
    for i in range(len(signs), 0, -1):
        split = data.coset_plus if signs[i - 1] == 1 else data.coset_minus
        s, r = split[letters[i]]
        letters[i] = r
        letters[i - 1] = g.mult(letters[i - 1], data.conjugate(s, signs[i - 1]))

    return GroupWord(letters[0], tuple(zip(signs, letters[1:])), normal=True)


def multiply(w1: GroupWord, w2: GroupWord, data: HNNGroupData) -> GroupWord:
    """Concatenate and reduce to normal form."""
    g = data.group
    if not w1.tail:
        merged = GroupWord(g.mult(w1.h0, w2.h0), w2.tail)
    else:
        head = list(w1.tail[:-1])
        e, h = w1.tail[-1]
        head.append((e, g.mult(h, w2.h0)))
        merged = GroupWord(w1.h0, tuple(head) + w2.tail)
    return normal_form(merged, data)


def oracle_values(w: GroupWord, data: HNNGroupData) -> dict:
    """Base-group membership and triviality of the element of Gamma.

    ``in_base`` iff the normal form has no t-letters; ``is_identity`` iff
    additionally the remaining group letter is the identity.  These mirror
    nonvanishing of the expectation onto the base algebra and the value of
    the Haar-type state on the matching group-algebra word.
    """
    nf = normal_form(w, data)
    in_base = nf.length == 0
    return {"in_base": in_base,
            "is_identity": in_base and nf.h0 == data.group.identity}


def random_word(data: HNNGroupData, rng, max_len: int = 6) -> GroupWord:
    g = data.group
    n = int(rng.integers(0, max_len + 1))
    h0 = g.elements[rng.integers(0, len(g))]
    tail = tuple((int(rng.choice((-1, 1))), g.elements[rng.integers(0, len(g))])
                 for _ in range(n))
    return GroupWord(h0, tail)
