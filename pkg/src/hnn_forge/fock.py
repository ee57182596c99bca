"""Truncated Fock space of an HNN extension, scalarified through phi_B.

The building blocks are the two Hilbert-module completions of A: for the
sign +1 the B-valued form is E_+(x* y); for -1 it is theta^{-1}(E_-(x* y))
with the right action twisted by theta.  Each splits as the embedded copy
of B plus the kernel of the expectation (the reduced part).  A sign word
(e_1, ..., e_n) selects leg spaces

    K_0 = H_{-e_1},   K_n = H_1,
    K_i = H_{-e_i} if e_i = e_{i+1}  else  the reduced part of H_{e_i},

glued by internal tensor products over B, with b acting on leg i through
left multiplication by iota(b) (e_i = +1) or theta(b) (e_i = -1).  The
full space is the vacuum sector H_1 plus one summand per sign word of
length at most L.  Everything is scalarified by composing B-valued forms
with the Haar state of B, which is faithful, so kernels are unchanged.

Truncation semantics: the shift operators annihilate components that
would exceed length L, and every certified identity is checked on an
explicit interior mask of summands where the truncated operator agrees
with the untruncated one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iter_product

import numpy as np

from .qgroup import HNNInput
from .starcore import (AlgebraError, AlgElement, FHilbert, gram_quotient)


class SizeLimitError(AlgebraError):
    """Estimated truncated dimension exceeds the configured cap."""


DEFAULT_DIM_CAP = 20000

VACUUM = ("vac",)


def sign_words(L: int):
    for n in range(1, L + 1):
        yield from iter_product((1, -1), repeat=n)


@dataclass
class LegSpace:
    """One tensor leg: a subspace of A with a B-valued form.

    ``kind`` is ("full", eps), ("reduced", eps) or ("vacuum",); ``span``
    lists the carrier spanning elements (reference basis of A for full and
    vacuum legs, a kernel basis for reduced legs); ``form_eps`` names the
    B-valued pairing and ``rho_eps`` the sign of the left B-action used
    when gluing to the previous leg (None for leg 0).
    """

    kind: tuple
    span: list
    form_eps: int
    rho_eps: int | None

    @property
    def dim(self) -> int:
        return len(self.span)


def _legs_for_word(inp: HNNInput, word) -> list:
    n = len(word)
    full = lambda eps: inp.adapted_onb[1]
    reduced = lambda eps: inp.adapted_onb[eps][inp.dimB:]
    legs = [LegSpace(("full", -word[0]), list(full(-word[0])), -word[0], None)]
    for i in range(1, n):
        if word[i - 1] == word[i]:
            legs.append(LegSpace(("full", -word[i - 1]), list(full(-word[i - 1])),
                                 -word[i - 1], word[i - 1]))
        else:
            legs.append(LegSpace(("reduced", word[i - 1]), list(reduced(word[i - 1])),
                                 word[i - 1], word[i - 1]))
    legs.append(LegSpace(("vacuum",), list(inp.adapted_onb[1]), 1, word[n - 1]))
    return legs


@dataclass
class TensorSummand:
    """One sign-word summand: legs, simple-tensor index set, Gram, basis."""

    word: tuple
    legs: list
    space: FHilbert
    offset: int = 0

    @property
    def simple_dim(self) -> int:
        out = 1
        for leg in self.legs:
            out *= leg.dim
        return out

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def length(self) -> int:
        return 0 if self.word == VACUUM else len(self.word)


def _summand_gram(inp: HNNInput, legs: list) -> np.ndarray:
    """Gram of simple tensors by nested B-valued contraction.

    <xi_0 (x) r, eta_0 (x) s> = <r, rho(<xi_0, eta_0>_B) s>, evaluated leg
    by leg and finally paired with the Haar state of B.
    """
    phi_B = inp.B.haar
    index_sets = [range(leg.dim) for leg in legs]
    idx = list(iter_product(*index_sets))
    m = len(idx)
    gram = np.empty((m, m), dtype=complex)
    for a, ia in enumerate(idx):
        for b, ib in enumerate(idx):
            bval = inp.bvalued_form(legs[0].form_eps, legs[0].span[ia[0]], legs[0].span[ib[0]])
            for t in range(1, len(legs)):
                leg = legs[t]
                y = inp.rho_mult(leg.rho_eps, bval, leg.span[ib[t]])
                bval = inp.bvalued_form(leg.form_eps, leg.span[ia[t]], y)
            gram[a, b] = phi_B(bval)
    return gram


@dataclass
class FockOperator:
    """A matrix on the truncated space plus its exactness mask.

    ``interior_depth`` d means the matrix agrees with the untruncated
    operator on every summand of length at most L - d.
    """

    fock: "TruncatedFock"
    matrix: np.ndarray
    interior_depth: int = 0

    @property
    def domain_mask(self) -> list:
        return [s.word for s in self.fock.summands
                if s.length <= self.fock.L - self.interior_depth]

    def masked(self) -> np.ndarray:
        return self.matrix @ self.fock.interior_projector(self.interior_depth)

    def norm_on_mask(self) -> float:
        return float(np.linalg.norm(self.masked(), 2))

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.fock, self.matrix @ other.matrix,
                            max(self.interior_depth, other.interior_depth))


class TruncatedFock:
    """The vacuum sector plus all sign-word summands of length <= L."""

    def __init__(self, inp: HNNInput, L: int, dim_cap: int = DEFAULT_DIM_CAP):
        if L < 1:
            raise AlgebraError("truncation length must be >= 1")
        self.inp = inp
        self.L = L
        est = inp.dimA
        for word in sign_words(L):
            est += self._estimate(inp, word)
        if est > dim_cap:
            raise SizeLimitError(f"estimated simple-tensor total {est} exceeds cap {dim_cap}")

        self.summands = []
        vac_legs = [LegSpace(("vacuum",), list(inp.adapted_onb[1]), 1, None)]
        gram = _summand_gram(inp, vac_legs)
        self.summands.append(TensorSummand(VACUUM, vac_legs, gram_quotient(gram)))
        for word in sign_words(L):
            legs = _legs_for_word(inp, word)
            gram = _summand_gram(inp, legs)
            self.summands.append(TensorSummand(word, legs, gram_quotient(gram)))
        offset = 0
        self.index = {}
        for s in self.summands:
            s.offset = offset
            offset += s.dim
            self.index[s.word] = s
        self.total_dim = offset
        self._pi_cache = {}
        self._u_cache = {}

        vac = self.index[VACUUM]
        ambient = self._expand_in_leg(vac.legs[0], inp.A.algebra.unit())
        self.vacuum = np.zeros(self.total_dim, dtype=complex)
        self.vacuum[:vac.dim] = vac.space.to_coords(ambient)
        self._pi_letter = {}

    @staticmethod
    def _estimate(inp: HNNInput, word) -> int:
        dims = [inp.dimA]
        for i in range(1, len(word)):
            dims.append(inp.dimA if word[i - 1] == word[i] else inp.dimA - inp.dimB)
        dims.append(inp.dimA)
        out = 1
        for d in dims:
            out *= d
        return out

    # -- coordinates ---------------------------------------------------------

    def _expand_in_leg(self, leg: LegSpace, a: AlgElement) -> np.ndarray:
        inp = self.inp
        if leg.kind[0] == "reduced":
            return inp.expand(leg.kind[1], a)[inp.dimB:]
        return inp.expand(1, a)

    def summand_coords(self, word, simple: np.ndarray) -> np.ndarray:
        """Total coordinates of a vector given on a summand's simple tensors."""
        s = self.index[word]
        out = np.zeros(self.total_dim, dtype=complex)
        out[s.offset:s.offset + s.dim] = s.space.to_coords(simple)
        return out

    def interior_projector(self, depth: int) -> np.ndarray:
        p = np.zeros((self.total_dim, self.total_dim))
        for s in self.summands:
            if s.length <= self.L - depth:
                p[s.offset:s.offset + s.dim, s.offset:s.offset + s.dim] = np.eye(s.dim)
        return p

    def operator(self, matrix: np.ndarray, interior_depth: int = 0) -> FockOperator:
        return FockOperator(self, matrix, interior_depth)

    def vacuum_projector(self) -> FockOperator:
        """The projection onto the vacuum sector (the sub-module of length 0)."""
        p = np.zeros((self.total_dim, self.total_dim))
        vac = self.index[VACUUM]
        p[vac.offset:vac.offset + vac.dim, vac.offset:vac.offset + vac.dim] = np.eye(vac.dim)
        return self.operator(p, interior_depth=0)

    # -- operators -----------------------------------------------------------

    def pi(self, a: AlgElement) -> FockOperator:
        """Left action of A: multiplication on leg 0 of every summand."""
        self.inp.A.algebra._check(a)
        mat = np.zeros((self.total_dim, self.total_dim), dtype=complex)
        for s in self.summands:
            leg0 = s.legs[0]
            cols = []
            for x in leg0.span:
                cols.append(self._expand_in_leg(leg0, a * x))
            m0 = np.column_stack(cols)
            rest = s.simple_dim // leg0.dim
            block = np.kron(m0, np.eye(rest))
            quot = s.space.onb.conj().T @ s.space.gram @ block @ s.space.onb
            mat[s.offset:s.offset + s.dim, s.offset:s.offset + s.dim] = quot
        return self.operator(mat, interior_depth=0)

    def u(self, eps: int) -> FockOperator:
        """The truncated HNN shift u^eps; exact on lengths <= L - 1."""
        if eps in self._u_cache:
            return self._u_cache[eps]
        inp = self.inp
        unit_coords = inp.expand(1, inp.A.algebra.unit())
        mat = np.zeros((self.total_dim, self.total_dim), dtype=complex)

        for s in self.summands:
            if s.word == VACUUM:
                target = self.index[(eps,)]
                block = np.kron(unit_coords[:, None], s.space.onb)
                conv = target.space.onb.conj().T @ target.space.gram @ block
                mat[target.offset:target.offset + target.dim,
                    s.offset:s.offset + s.dim] = conv
                continue
            word = s.word
            if word[0] == eps:
                # prepend 1 (x) .
                if s.length + 1 <= self.L:
                    target = self.index[(eps,) + word]
                    lift = s.space.onb
                    block = np.kron(unit_coords[:, None], lift)
                    conv = target.space.onb.conj().T @ target.space.gram @ block
                    mat[target.offset:target.offset + target.dim,
                        s.offset:s.offset + s.dim] = conv
            else:
                # split leg 0 into expectation part (collapse) and kernel part
                leg0 = s.legs[0]
                rest_dim = s.simple_dim // leg0.dim
                lift = s.space.onb.reshape(leg0.dim, rest_dim, s.dim)

                # collapse: theta^eps(E_eps(x0)) acting on the next leg
                target_word = VACUUM if s.length == 1 else word[1:]
                target = self.index[target_word]
                leg1 = s.legs[1]
                tleg0 = target.legs[0]
                cols = []
                for x in leg0.span:
                    sub = inp.expectation(eps)(x)
                    shifted = inp.theta_eps(eps, sub)
                    act = [self._expand_in_leg(tleg0, shifted * y) for y in leg1.span]
                    cols.append(np.column_stack(act))
                coll = np.stack(cols, axis=0)  # (leg0, tleg0, leg1)
                rest2 = rest_dim // leg1.dim
                lift_r = lift.reshape(leg0.dim, leg1.dim, rest2, s.dim)
                simple_map = np.einsum("abc,acrq->brq", coll, lift_r)
                simple_map = simple_map.reshape(target.simple_dim, s.dim)
                conv = target.space.onb.conj().T @ target.space.gram @ simple_map
                mat[target.offset:target.offset + target.dim,
                    s.offset:s.offset + s.dim] += conv

                # kernel part: prepend 1 (x) reduced(x0) (x) rest
                if s.length + 1 <= self.L:
                    target = self.index[(eps,) + word]
                    ker_leg = target.legs[1]
                    red = []
                    for x in leg0.span:
                        red.append(self._expand_in_leg(ker_leg, x
                                                       - inp.expectation(eps)(x)))
                    red_m = np.column_stack(red)  # (ker_dim, leg0_dim)
                    pre = np.einsum("i,ka,ars->ikrs", unit_coords, red_m,
                                    lift.reshape(leg0.dim, rest_dim, s.dim))
                    pre = pre.reshape(target.simple_dim, s.dim)
                    conv = target.space.onb.conj().T @ target.space.gram @ pre
                    mat[target.offset:target.offset + target.dim,
                        s.offset:s.offset + s.dim] += conv

        op = self.operator(mat, interior_depth=1)
        self._u_cache[eps] = op
        return op

    def summand_dims(self) -> dict:
        return {"".join("+" if e == 1 else "-" for e in s.word) if s.word != VACUUM
                else "vac": s.dim for s in self.summands}

    # -- fast vacuum images ----------------------------------------------------

    def _pi_cached(self, letter: AlgElement) -> np.ndarray:
        tag = letter._adapted_tag
        if tag is None:
            return self.pi(letter).matrix
        hit = self._pi_letter.get(tag)
        if hit is None:
            hit = self._pi_letter[tag] = self.pi(letter).matrix
        return hit

    def apply_letter(self, a: AlgElement, v: np.ndarray) -> np.ndarray:
        """pi(a) v without materializing pi(a) for untagged a."""
        if a._adapted_tag is not None:
            return self._pi_cached(a) @ v
        out = np.zeros_like(v)
        for t, c in enumerate(self.inp.expand(1, a)):
            if abs(c) > 1e-15:
                out += c * (self._pi_cached(self.inp.adapted_onb[1][t]) @ v)
        return out

    def vacuum_class(self, sym) -> np.ndarray:
        """Coordinates of (symbolic element).vacuum, the GNS embedding.

        Exact whenever every word is no longer than the truncation; the
        squared norm of the result is the canonical state of x* x.
        """
        if sym.max_length() > self.L:
            from .wordalg import TruncationError
            raise TruncationError("word exceeds the truncation")
        vac = self.index[VACUUM]
        total = np.zeros(self.total_dim, dtype=complex)
        total[:vac.dim] = vac.space.to_coords(
            self._expand_in_leg(vac.legs[0], sym.a_part))
        u_mat = {1: self.u(1).matrix, -1: self.u(-1).matrix}
        for key, x0 in sym.words.items():
            signs, _ = key
            tail = sym.tail_elements(key)
            v = np.zeros(self.total_dim, dtype=complex)
            v[:vac.dim] = vac.space.to_coords(
                self._expand_in_leg(vac.legs[0], tail[-1][1]))
            for i in range(len(tail) - 1, -1, -1):
                v = u_mat[signs[i]] @ v
                if i > 0:
                    v = self._pi_cached(tail[i - 1][1]) @ v
            total += self.apply_letter(x0, v)
        return total


def build_truncated_fock(inp: HNNInput, L: int, dim_cap: int = DEFAULT_DIM_CAP) -> TruncatedFock:
    return TruncatedFock(inp, L, dim_cap)


def simple_tensor_coords(fock: TruncatedFock, word, letters: list) -> np.ndarray:
    """Total coordinates of the simple tensor of the given leg elements."""
    s = fock.index[word]
    if len(letters) != len(s.legs):
        raise AlgebraError("wrong number of tensor legs")
    coords = [fock._expand_in_leg(leg, a) for leg, a in zip(s.legs, letters)]
    simple = coords[0]
    for c in coords[1:]:
        simple = np.kron(simple, c)
    return fock.summand_coords(word, simple)
