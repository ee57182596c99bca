"""Finite-dimensional compact quantum groups and HNN input data.

A ``FiniteCQG`` is a multimatrix algebra together with a distinguished
linear basis and a comultiplication tensor on that basis.  Construction
certifies the axioms numerically: coassociativity, the comultiplication
being a unital *-homomorphism, and the density (spanning) conditions.
The Haar state and the counit are always obtained by solving their
defining linear systems, never from closed-form formulas, so the same
code path validates user-supplied comultiplications; the Haar solver
additionally asserts that the solution space is one-dimensional.

Two builtin constructors cover the classical input families:

* ``function_algebra_qg``: functions on a finite group G, with
  Delta(d_g) = sum_{hk=g} d_h (x) d_k,
* ``group_algebra_qg``: the group algebra of G realized through the
  block-diagonalized regular representation, with Delta(l_g) = l_g (x) l_g.

An ``HNNInput`` packages the full datum (A, B, iota, theta, E_+, E_-)
needed by the word algebra and the Fock construction, together with the
derived adapted bases of A (a basis of the embedded copy of B completed
by a basis of the kernel of the conditional expectation, orthonormal for
the Haar form).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import britton
from .britton import FiniteGroupData, GroupError, cyclic_group, symmetric_group_3
from .starcore import (TOL_ALG, AlgebraError, AlgElement, CondExpectation,
                       MultiMatrixAlgebra, State, StarMorphism,
                       conditional_expectation, make_multimatrix,
                       star_algebra_blocks, state_from_vec_functional)


class NotCQGError(AlgebraError):
    """The comultiplication data does not define a compact quantum group."""


class EmbeddingError(AlgebraError):
    """A morphism fails one of the quantum-group embedding axioms."""


class HaarCompatError(AlgebraError):
    """Conditional expectations are not compatible with the Haar states."""


class FiniteCQG:
    """A finite compact quantum group (algebra, basis, comultiplication).

    ``comul[i, j, k]`` is the coefficient of ``basis[i] (x) basis[j]`` in
    the comultiplication of ``basis[k]``.  ``haar`` and ``counit`` are
    solved for (and certified) during construction.
    """

    def __init__(self, algebra: MultiMatrixAlgebra, basis: Sequence[AlgElement],
                 comul: np.ndarray, labels: Sequence[str] | None = None,
                 name: str = "cqg", tol: float = TOL_ALG):
        self.algebra = algebra
        self.basis = list(basis)
        self.dim = len(self.basis)
        if self.dim != algebra.linear_dim:
            raise NotCQGError("basis must be a linear basis of the algebra")
        self.basis_mat = np.column_stack([b.vec for b in self.basis])
        if np.linalg.cond(self.basis_mat) > 1e8:
            raise NotCQGError("distinguished basis is numerically singular")
        self.coords_mat = np.linalg.inv(self.basis_mat)
        self.comul = np.asarray(comul, dtype=complex)
        if self.comul.shape != (self.dim, self.dim, self.dim):
            raise NotCQGError("comultiplication tensor has wrong shape")
        self.labels = list(labels) if labels is not None else [f"b{k}" for k in range(self.dim)]
        self.name = name
        self.tol = tol

        # structure constants: mm[:, i, k] = coords(basis_i * basis_k)
        self.mm = np.empty((self.dim, self.dim, self.dim), dtype=complex)
        for i in range(self.dim):
            for k in range(self.dim):
                self.mm[:, i, k] = self.coords(self.basis[i] * self.basis[k])
        self.star_mat = np.column_stack([self.coords(b.star()) for b in self.basis])
        self.unit_coords = self.coords(algebra.unit())

        self._validate_comultiplication()
        self.haar = self._solve_haar()
        self.counit = self._solve_counit()
        # counit on vec coordinates: eps(a) = counit_vec . vec(a)
        self.counit_vec = np.linalg.solve(self.basis_mat.T, np.asarray(self.counit))

    # -- elementary coordinate helpers -------------------------------------

    def coords(self, a: AlgElement) -> np.ndarray:
        self.algebra._check(a)
        return self.coords_mat @ a.vec

    def from_coords(self, c: np.ndarray) -> AlgElement:
        return self.algebra.from_vec(self.basis_mat @ np.asarray(c, dtype=complex))

    def basis_by_label(self, label: str) -> AlgElement:
        return self.basis[self.labels.index(label)]

    def counit_of(self, a: AlgElement) -> complex:
        return complex(self.counit_vec @ a.vec)

    def comul_of(self, a: AlgElement) -> np.ndarray:
        """Coefficient matrix of Delta(a) over basis (x) basis."""
        return np.einsum("ijk,k->ij", self.comul, self.coords(a))

    def pair_product(self, t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
        """Product of two elements of A (x) A given over basis pairs."""
        return np.einsum("ij,kl,pik,qjl->pq", t1, t2, self.mm, self.mm, optimize=True)

    def pair_star(self, t: np.ndarray) -> np.ndarray:
        return np.einsum("ij,pi,qj->pq", np.conj(t), self.star_mat, self.star_mat)

    # -- axioms -------------------------------------------------------------

    def _validate_comultiplication(self) -> None:
        n, tol = self.dim, self.tol
        # coassociativity
        lhs = np.einsum("pqi,ijk->pqjk", self.comul, self.comul)
        rhs = np.einsum("qrj,pjk->pqrk", self.comul, self.comul)
        res = np.abs(lhs - rhs).max()
        if res > tol:
            raise NotCQGError(f"comultiplication is not coassociative (residual {res:.3g})")
        # unital
        du = np.einsum("ijk,k->ij", self.comul, self.unit_coords)
        if np.abs(du - np.outer(self.unit_coords, self.unit_coords)).max() > tol:
            raise NotCQGError("comultiplication is not unital")
        # multiplicative and *-preserving on all basis pairs
        for i in range(n):
            for j in range(n):
                prod_c = self.mm[:, i, j]
                lhs = np.einsum("pqk,k->pq", self.comul, prod_c)
                rhs = self.pair_product(self.comul[:, :, i], self.comul[:, :, j])
                if np.abs(lhs - rhs).max() > tol * 10:
                    raise NotCQGError("comultiplication is not multiplicative")
        for k in range(n):
            lhs = np.einsum("pqk,k->pq", self.comul, self.star_mat[:, k])
            rhs = self.pair_star(self.comul[:, :, k])
            if np.abs(lhs - rhs).max() > tol * 10:
                raise NotCQGError("comultiplication does not preserve the involution")
        # density: Delta(A)(A (x) 1) and Delta(A)(1 (x) A) span A (x) A
        for right_leg in (True, False):
            cols = []
            for k in range(n):
                for l in range(n):
                    other = np.outer(self.coords(self.basis[l]), self.unit_coords)
                    if right_leg:
                        other = other.T
                    cols.append(self.pair_product(self.comul[:, :, k], other).reshape(-1))
            rank = np.linalg.matrix_rank(np.column_stack(cols), tol=1e-8)
            if rank < n * n:
                raise NotCQGError("density condition fails; the span is too small")

    def _invariance_rows(self) -> np.ndarray:
        n, u = self.dim, self.unit_coords
        rows = []
        for k in range(n):
            for p in range(n):
                r = self.comul[p, :, k].copy()
                r[k] -= u[p]
                rows.append(r)
                r2 = self.comul[:, p, k].copy()
                r2[k] -= u[p]
                rows.append(r2)
        return np.array(rows)

    def _solve_haar(self) -> State:
        m = self._invariance_rows()
        _, sv, vh = np.linalg.svd(m)
        sv = np.concatenate([sv, np.zeros(vh.shape[0] - len(sv))])
        null = [j for j in range(vh.shape[0]) if sv[j] <= 1e-9 * max(1.0, sv[0])]
        if len(null) != 1:
            raise NotCQGError(f"Haar solution space has dimension {len(null)}, expected 1")
        phi = vh[null[0]].conj()
        phi = phi / (phi @ self.unit_coords)
        if np.linalg.norm(m @ phi) > self.tol * 10:
            raise NotCQGError("Haar state residual too large")
        w_vec = np.linalg.solve(self.basis_mat.T, phi)
        state = state_from_vec_functional(self.algebra, w_vec).validate()
        self.haar_basis_values = phi
        return state

    def _solve_counit(self) -> np.ndarray:
        n = self.dim
        rows, target = [], []
        for k in range(n):
            for p in range(n):
                rows.append(self.comul[p, :, k])
                target.append(1.0 if p == k else 0.0)
                rows.append(self.comul[:, p, k])
                target.append(1.0 if p == k else 0.0)
        eps, *_ = np.linalg.lstsq(np.array(rows), np.array(target), rcond=None)
        if np.linalg.norm(np.array(rows) @ eps - np.array(target)) > self.tol * 10:
            raise NotCQGError("no counit: defining system is inconsistent")
        # certified *-character
        for i in range(n):
            for j in range(n):
                val = self.mm[:, i, j] @ eps
                if abs(val - eps[i] * eps[j]) > self.tol * 10:
                    raise NotCQGError("counit is not multiplicative")
        for k in range(n):
            if abs(self.star_mat[:, k] @ eps - np.conj(eps[k])) > self.tol * 10:
                raise NotCQGError("counit is not hermitian")
        if abs(eps @ self.unit_coords - 1.0) > self.tol:
            raise NotCQGError("counit is not unital")
        return eps


def haar_state(qg: FiniteCQG) -> State:
    """The unique bi-invariant state, solved from the invariance system."""
    return qg.haar


def counit(qg: FiniteCQG) -> np.ndarray:
    """The counit as a value vector on the distinguished basis."""
    return qg.counit


# -- input families ----------------------------------------------------------


def function_algebra_qg(group: FiniteGroupData) -> FiniteCQG:
    """Functions on a finite group; one 1x1 block per group element."""
    n = len(group)
    algebra = make_multimatrix([1] * n)
    basis = []
    for k in range(n):
        v = np.zeros(n, dtype=complex)
        v[k] = 1.0
        basis.append(algebra.from_vec(v))
    idx = {g: i for i, g in enumerate(group.elements)}
    comul = np.zeros((n, n, n), dtype=complex)
    for h in group.elements:
        for k in group.elements:
            comul[idx[h], idx[k], idx[group.mult(h, k)]] = 1.0
    return FiniteCQG(algebra, basis, comul, labels=list(group.elements),
                     name=f"C({len(group)} points)")


def group_algebra_qg(group: FiniteGroupData) -> FiniteCQG:
    """Group algebra via the block-diagonalized regular representation."""
    n = len(group)
    idx = {g: i for i, g in enumerate(group.elements)}
    mats = []
    for g in group.elements:
        m = np.zeros((n, n), dtype=complex)
        for h in group.elements:
            m[idx[group.mult(g, h)], idx[h]] = 1.0
        mats.append(m)
    dims, to_blocks = star_algebra_blocks(mats)
    algebra = make_multimatrix(dims)
    basis = [algebra.element(to_blocks(m)) for m in mats]
    comul = np.zeros((n, n, n), dtype=complex)
    for k in range(n):
        comul[k, k, k] = 1.0
    return FiniteCQG(algebra, basis, comul, labels=list(group.elements),
                     name=f"C*[{n}-element group]")


def quotient_group(group: FiniteGroupData, normal: Sequence[str]):
    """The quotient by a normal subgroup, plus the coset label of each element."""
    nset = set(normal)
    if group.identity not in nset:
        raise GroupError("normal subgroup must contain the identity")
    for n1 in normal:
        for n2 in normal:
            if group.mult(n1, n2) not in nset:
                raise GroupError("subgroup is not closed")
    for g in group.elements:
        for n1 in normal:
            conj = group.mult(group.mult(g, n1), group.inv(g))
            if conj not in nset:
                raise GroupError("subgroup is not normal")
    coset_of, cosets = {}, []
    for g in group.elements:
        members = frozenset(group.mult(g, n1) for n1 in normal)
        if members not in cosets:
            cosets.append(members)
        coset_of[g] = cosets.index(members)
    labels = [f"c{k}" for k in range(len(cosets))]
    rows = []
    reps = [sorted(c)[0] for c in cosets]
    for r1 in reps:
        rows.append([labels[coset_of[group.mult(r1, r2)]] for r2 in reps])
    quotient = FiniteGroupData.from_table(labels, rows, labels[coset_of[group.identity]])
    return quotient, {g: labels[coset_of[g]] for g in group.elements}


@dataclass
class QGEmbedding:
    """A certified quantum-group embedding B -> A."""

    src: FiniteCQG
    dst: FiniteCQG
    morphism: StarMorphism
    intertwines: bool = False

    def __call__(self, b: AlgElement) -> AlgElement:
        return self.morphism(b)

    def inverse(self, a: AlgElement) -> AlgElement:
        return self.morphism.inverse_on_range(a)


def validate_embedding(src: FiniteCQG, dst: FiniteCQG, morphism: StarMorphism,
                       tol: float = TOL_ALG) -> QGEmbedding:
    """Certify unitality, injectivity, *-morphism and comultiplication
    intertwining; raises ``EmbeddingError`` naming the failed axiom."""
    try:
        morphism.validate(tol)
    except AlgebraError as exc:
        raise EmbeddingError(str(exc)) from exc
    img = np.column_stack([dst.coords(morphism(b)) for b in src.basis])
    for k in range(src.dim):
        lhs = np.einsum("ijk,k->ij", dst.comul, img[:, k])
        rhs = img @ src.comul[:, :, k] @ img.T
        if np.abs(lhs - rhs).max() > tol * 10:
            raise EmbeddingError("morphism does not intertwine the comultiplications")
    for k in range(src.dim):
        if abs(dst.counit_vec @ morphism(src.basis[k]).vec - src.counit[k]) > tol * 10:
            raise EmbeddingError("morphism does not intertwine the counits")
    return QGEmbedding(src, dst, morphism, intertwines=True)


def embedding_from_basis_images(src: FiniteCQG, dst: FiniteCQG,
                                images: Sequence[AlgElement]) -> StarMorphism:
    img_mat = np.column_stack([a.vec for a in images])
    return StarMorphism(src.algebra, dst.algebra, img_mat @ src.coords_mat)


@dataclass
class HNNInput:
    """The HNN datum (A, B, iota, theta, E_+, E_-) with derived bases.

    ``adapted_onb[eps]`` is an orthonormal basis of A for the Haar form,
    listing first a basis of the embedded subalgebra (iota(B) for eps=+1,
    theta(B) for eps=-1) and then a basis of the kernel of the matching
    conditional expectation.  ``ref_onb`` is the +1 basis, used as the
    reference basis of A everywhere downstream.
    """

    A: FiniteCQG
    B: FiniteCQG
    iota: QGEmbedding
    theta: QGEmbedding
    E_plus: CondExpectation
    E_minus: CondExpectation
    name: str = "hnn"
    adapted_onb: dict = field(default_factory=dict, repr=False)
    adapted_mat: dict = field(default_factory=dict, repr=False)
    adapted_dual: dict = field(default_factory=dict, repr=False)

    @property
    def dimA(self) -> int:
        return self.A.algebra.linear_dim

    @property
    def dimB(self) -> int:
        return self.B.algebra.linear_dim

    @property
    def ref_onb(self) -> list:
        return self.adapted_onb[1]

    def expectation(self, eps: int) -> CondExpectation:
        return self.E_plus if eps == 1 else self.E_minus

    def embed(self, eps: int, b: AlgElement) -> AlgElement:
        """iota(b) for eps=+1, theta(b) for eps=-1."""
        return (self.iota if eps == 1 else self.theta)(b)

    def unembed(self, eps: int, a: AlgElement) -> AlgElement:
        return (self.iota if eps == 1 else self.theta).inverse(a)

    def theta_eps(self, eps: int, a: AlgElement) -> AlgElement:
        """The shift B_eps -> B_{-eps} inside A: theta o iota^{-1} for
        eps=+1 and iota o theta^{-1} for eps=-1, on embedded elements."""
        if eps == 1:
            return self.theta(self.iota.inverse(a))
        return self.iota(self.theta.inverse(a))

    def bvalued_form(self, eps: int, x: AlgElement, y: AlgElement) -> AlgElement:
        """The B-valued pairing of the eps leg: unembed(E_eps(x* y))."""
        return self.unembed(eps, self.expectation(eps)(x.star() * y))

    def rho_mult(self, eps: int, b: AlgElement, y: AlgElement) -> AlgElement:
        """Left action of b in B on a leg carrier: multiply by embed(eps, b)."""
        return self.embed(eps, b) * y

    def expand(self, eps: int, a: AlgElement) -> np.ndarray:
        """Coefficients of ``a`` over adapted_onb[eps] (orthonormal expansion)."""
        return self.adapted_dual[eps] @ a.vec

    def counit_A(self, a: AlgElement) -> complex:
        return self.A.counit_of(a)

    def phi_A(self, a: AlgElement) -> complex:
        return self.A.haar(a)


def build_hnn_input(A: FiniteCQG, B: FiniteCQG, iota: QGEmbedding,
                    theta: QGEmbedding, name: str = "hnn",
                    tol: float = TOL_ALG) -> HNNInput:
    """Assemble and certify the full HNN datum.

    Builds the Haar-state-preserving conditional expectations onto
    iota(B) and theta(B), verifies phi_A o theta = phi_B, the counit
    compatibility, and the comultiplication invariance property of each
    expectation; any failure raises ``HaarCompatError``.
    """
    if not (iota.intertwines and theta.intertwines):
        raise EmbeddingError("both embeddings must be certified first")
    phi_A, phi_B = A.haar, B.haar
    for emb in (iota, theta):
        for k, b in enumerate(B.basis):
            if abs(phi_A(emb(b)) - phi_B(b)) > tol * 10:
                raise HaarCompatError("Haar state of A does not restrict to the Haar state of B")
            if abs(A.counit_of(emb(b)) - B.counit[k]) > tol * 10:
                raise HaarCompatError("counit of A does not restrict to the counit of B")

    E_plus = conditional_expectation(A.algebra, [iota(b) for b in B.basis], phi_A)
    E_minus = conditional_expectation(A.algebra, [theta(b) for b in B.basis], phi_A)

    for exp in (E_plus, E_minus):
        e_coords = np.column_stack([A.coords(exp(b)) for b in A.basis])
        for k in range(A.dim):
            dk = A.comul[:, :, k]
            lhs1 = np.einsum("ij,qj->iq", dk, e_coords)
            lhs2 = np.einsum("ij,pi->pj", dk, e_coords)
            rhs = np.einsum("pqj,j->pq", A.comul, e_coords[:, k])
            if np.abs(lhs1 - rhs).max() > tol * 100 or np.abs(lhs2 - rhs).max() > tol * 100:
                raise HaarCompatError("expectation does not satisfy the "
                                      "comultiplication invariance property")

    inp = HNNInput(A, B, iota, theta, E_plus, E_minus, name=name)
    gram_vec = phi_A.gram_matrix()
    from .starcore import gram_quotient, orthonormalize
    for eps, exp in ((1, E_plus), (-1, E_minus)):
        sub = exp.image_basis
        proj = exp.projection
        units = [A.algebra.from_vec(v - proj @ v)
                 for v in np.eye(A.algebra.linear_dim, dtype=complex)]
        ker = orthonormalize(A.algebra, units, gram_vec)
        onb = list(sub) + ker
        if len(onb) != A.algebra.linear_dim:
            raise HaarCompatError("adapted basis has wrong size")
        mat = np.column_stack([e.vec for e in onb])
        inp.adapted_onb[eps] = onb
        inp.adapted_mat[eps] = mat
        inp.adapted_dual[eps] = mat.conj().T @ gram_vec
        resid = np.abs(inp.adapted_dual[eps] @ mat - np.eye(len(onb))).max()
        if resid > 1e-8:
            raise HaarCompatError(f"adapted basis is not orthonormal (residual {resid:.3g})")
    return inp


# -- builtin families --------------------------------------------------------


@dataclass
class BuiltinFamily:
    name: str
    description: str
    hnn: HNNInput
    oracle: britton.HNNGroupData | None
    default_L: int
    lemma_len: int          # word length for the isometry-lemma sweep
    homotopy: bool          # run the homotopy suite by default


def _group_algebra_family(name, group, sigma, theta_map, default_L=2, lemma_len=3):
    sub_rows = [[group.mult(a, b) for b in sigma] for a in sigma]
    subgroup = FiniteGroupData.from_table(sigma, sub_rows, group.identity)
    A = group_algebra_qg(group)
    B = group_algebra_qg(subgroup)
    iota_m = embedding_from_basis_images(B, A, [A.basis_by_label(s) for s in sigma])
    theta_m = embedding_from_basis_images(B, A, [A.basis_by_label(theta_map[s]) for s in sigma])
    iota = validate_embedding(B, A, iota_m)
    theta = validate_embedding(B, A, theta_m)
    hnn = build_hnn_input(A, B, iota, theta, name=name)
    oracle = britton.HNNGroupData.build(group, sigma, theta_map)
    return BuiltinFamily(name, f"group algebra of |G|={len(group)} with |Sigma|={len(sigma)}",
                         hnn, oracle, default_L, lemma_len, homotopy=True)


def _function_algebra_family(name, group, normal, default_L=1, lemma_len=2):
    A = function_algebra_qg(group)
    quotient, coset_label = quotient_group(group, normal)
    B = function_algebra_qg(quotient)
    images = []
    for c in quotient.elements:
        v = np.zeros(A.algebra.linear_dim, dtype=complex)
        for i, g in enumerate(group.elements):
            if coset_label[g] == c:
                v[i] = 1.0
        images.append(A.algebra.from_vec(v))
    pullback = embedding_from_basis_images(B, A, images)
    iota = validate_embedding(B, A, pullback)
    theta = validate_embedding(B, A, pullback)
    hnn = build_hnn_input(A, B, iota, theta, name=name)
    return BuiltinFamily(name, f"functions on |G|={len(group)} over the quotient by "
                               f"a normal subgroup of order {len(normal)}",
                         hnn, None, default_L, lemma_len, homotopy=False)


def make_builtin(name: str) -> BuiltinFamily:
    if name == "trivial-z":
        g = cyclic_group(1)
        return _group_algebra_family(name, g, ["g0"], {"g0": "g0"})
    if name == "z2-free":
        g = cyclic_group(2)
        return _group_algebra_family(name, g, ["g0"], {"g0": "g0"})
    if name == "z4-sigma2":
        g = cyclic_group(4)
        return _group_algebra_family(name, g, ["g0", "g2"], {"g0": "g0", "g2": "g2"})
    if name == "s3-quotient":
        g = symmetric_group_3()
        alternating = ["012", "120", "201"]
        return _function_algebra_family(name, g, alternating)
    raise KeyError(f"unknown builtin family {name!r}")


def builtin_names() -> list:
    return ["z2-free", "z4-sigma2", "s3-quotient", "trivial-z"]


def load_family_from_files(kind: str, group_path: str, subgroup_path: str,
                           name: str = "explicit") -> BuiltinFamily:
    """Build a family from JSON files (see the group/subgroup schema)."""
    group = FiniteGroupData.from_json(group_path)
    with open(subgroup_path) as fh:
        data = json.load(fh)
    if kind == "group_algebra_subgroup":
        return _group_algebra_family(name, group, data["subgroup"], dict(data["theta"]))
    if kind == "function_algebra_quotient":
        return _function_algebra_family(name, group, data["subgroup"])
    raise KeyError(f"unknown family kind {kind!r}")
