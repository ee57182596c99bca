"""Finite-dimensional C*-algebras as direct sums of matrix blocks.

Everything downstream (quantum groups, Fock spaces, the reduced word
algebra) works over a ``MultiMatrixAlgebra``: a concrete realization of a
finite-dimensional C*-algebra as  M_{d_1}(C) (+) ... (+) M_{d_m}(C).
Elements carry an explicit reference to their algebra; mixing elements of
different algebras is an error, never a coercion.

The module also provides the basic analysis tools used everywhere else:

* states as weight matrices, with the GNS sesquilinear form on the
  canonical matrix-unit coordinates,
* ``gram_quotient``: separation of a positive semidefinite Gram matrix
  into an orthonormal basis of the quotient plus a kernel dimension,
* state-preserving conditional expectations onto *-subalgebras,
* numerical block-diagonalization of a *-closed matrix algebra
  (used to realize group algebras as multimatrix algebras).

Scalars are complex double precision.  Default tolerances: ``TOL_ALG``
(1e-9, absolute on unit-normalized data) for algebraic identities and
``TOL_GRAM`` (1e-8, relative to the top Gram eigenvalue) for rank and
orthonormality decisions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

TOL_ALG = 1e-9
TOL_GRAM = 1e-8


class AlgebraError(ValueError):
    """Invalid algebraic input (bad dimensions, mixed algebras, ...)."""


class NotPositiveError(AlgebraError):
    """A matrix or functional that must be positive semidefinite is not."""


class NotSubalgebraError(AlgebraError):
    """A spanning set is not closed under products and involution."""


class InvalidStateError(AlgebraError):
    """A linear functional fails the state axioms."""


class DecompositionError(AlgebraError):
    """Numerical block-diagonalization failed to certify itself."""


def dump_matrix(m: np.ndarray) -> list:
    """JSON-friendly dump of a complex matrix as [re, im] pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


class MultiMatrixAlgebra:
    """The concrete C*-algebra  (+)_k M_{d_k}(C).

    Identity of the Python object is identity of the algebra: elements of
    two distinct instances never mix, even for equal block dimensions.
    """

    def __init__(self, block_dims: Sequence[int]):
        dims = [int(d) for d in block_dims]
        if not dims or any(d < 1 for d in dims):
            raise AlgebraError(f"block dimensions must be positive, got {block_dims}")
        self.block_dims = tuple(dims)
        self.linear_dim = sum(d * d for d in dims)
        self._offsets = np.cumsum([0] + [d * d for d in dims])
        # all-1x1 algebras are commutative and get a pointwise fast path
        self._diag = all(d == 1 for d in dims)

    def __repr__(self) -> str:
        return f"MultiMatrixAlgebra{self.block_dims}"

    def element(self, blocks: Sequence[np.ndarray]) -> "AlgElement":
        if len(blocks) != len(self.block_dims):
            raise AlgebraError("wrong number of blocks")
        mats = []
        for d, b in zip(self.block_dims, blocks):
            b = np.asarray(b, dtype=complex)
            if b.shape != (d, d):
                raise AlgebraError(f"block shape {b.shape} != ({d},{d})")
            mats.append(b)
        return AlgElement(self, blocks=mats)

    def zero(self) -> "AlgElement":
        return AlgElement(self, vec=np.zeros(self.linear_dim, dtype=complex))

    def unit(self) -> "AlgElement":
        return AlgElement(self, blocks=[np.eye(d, dtype=complex) for d in self.block_dims])

    def from_vec(self, v: np.ndarray) -> "AlgElement":
        v = np.asarray(v, dtype=complex).reshape(self.linear_dim)
        return AlgElement(self, vec=v)

    def split_blocks(self, v: np.ndarray) -> list:
        return [v[self._offsets[k]:self._offsets[k + 1]].reshape(d, d)
                for k, d in enumerate(self.block_dims)]

    def random(self, rng: np.random.Generator, hermitian: bool = False) -> "AlgElement":
        blocks = []
        for d in self.block_dims:
            b = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            if hermitian:
                b = (b + b.conj().T) / 2.0
            blocks.append(b)
        return AlgElement(self, blocks)

    def left_mult_matrix(self, a: "AlgElement") -> np.ndarray:
        """Matrix of x -> a.x on vec coordinates (row-major per block)."""
        self._check(a)
        if self._diag:
            return np.diag(a.vec)
        parts = [np.kron(b, np.eye(d)) for d, b in zip(self.block_dims, a.blocks)]
        return _block_diag(parts)

    def right_mult_matrix(self, a: "AlgElement") -> np.ndarray:
        """Matrix of x -> x.a on vec coordinates."""
        self._check(a)
        if self._diag:
            return np.diag(a.vec)
        parts = [np.kron(np.eye(d), b.T) for d, b in zip(self.block_dims, a.blocks)]
        return _block_diag(parts)

    def _check(self, a: "AlgElement") -> None:
        if a.algebra is not self:
            raise AlgebraError("element belongs to a different algebra")


def _block_diag(parts: list) -> np.ndarray:
    n = sum(p.shape[0] for p in parts)
    out = np.zeros((n, n), dtype=complex)
    i = 0
    for p in parts:
        out[i:i + p.shape[0], i:i + p.shape[1]] = p
        i += p.shape[0]
    return out


class AlgElement:
    """One element of a MultiMatrixAlgebra: one square matrix per block.

    Stored as the flat vec of block entries; the block view is lazy.  For
    all-diagonal algebras every operation works pointwise on the vec.
    """

    __slots__ = ("algebra", "_blocks", "_vec", "_adapted_tag")

    def __init__(self, algebra: MultiMatrixAlgebra, blocks: list = None,
                 vec: np.ndarray = None):
        self.algebra = algebra
        self._blocks = blocks
        self._vec = vec
        self._adapted_tag = None

    @property
    def vec(self) -> np.ndarray:
        if self._vec is None:
            self._vec = np.concatenate([b.reshape(-1) for b in self._blocks])
        return self._vec

    @property
    def blocks(self) -> list:
        if self._blocks is None:
            self._blocks = self.algebra.split_blocks(self._vec)
        return self._blocks

    def _same(self, other: "AlgElement") -> None:
        if not isinstance(other, AlgElement) or other.algebra is not self.algebra:
            raise AlgebraError("arithmetic across different algebras")

    def __add__(self, other: "AlgElement") -> "AlgElement":
        self._same(other)
        return AlgElement(self.algebra, vec=self.vec + other.vec)

    def __sub__(self, other: "AlgElement") -> "AlgElement":
        self._same(other)
        return AlgElement(self.algebra, vec=self.vec - other.vec)

    def __neg__(self) -> "AlgElement":
        return AlgElement(self.algebra, vec=-self.vec)

    def __mul__(self, other):
        if isinstance(other, AlgElement):
            self._same(other)
            if self.algebra._diag:
                return AlgElement(self.algebra, vec=self.vec * other.vec)
            return AlgElement(self.algebra,
                              blocks=[a @ b for a, b in zip(self.blocks, other.blocks)])
        return AlgElement(self.algebra, vec=complex(other) * self.vec)

    def __rmul__(self, scalar) -> "AlgElement":
        return AlgElement(self.algebra, vec=complex(scalar) * self.vec)

    def star(self) -> "AlgElement":
        if self.algebra._diag:
            return AlgElement(self.algebra, vec=np.conj(self.vec))
        return AlgElement(self.algebra, blocks=[a.conj().T for a in self.blocks])

    def hs_norm(self) -> float:
        v = self.vec
        return float(np.sqrt(np.vdot(v, v).real))

    def max_abs(self) -> float:
        return float(np.abs(self.vec).max())

    def is_zero(self, tol: float = 1e-12) -> bool:
        return self.max_abs() <= tol

    def __repr__(self) -> str:
        return f"AlgElement({self.algebra.block_dims}, |a|={operator_norm(self):.3g})"


def make_multimatrix(block_dims: Sequence[int]) -> MultiMatrixAlgebra:
    """Build the algebra (+)_k M_{d_k}(C); rejects empty or nonpositive dims."""
    return MultiMatrixAlgebra(block_dims)


def operator_norm(a: AlgElement) -> float:
    """C*-norm: the largest singular value over all blocks."""
    if a.algebra._diag:
        return a.max_abs()
    return max(float(np.linalg.norm(b, 2)) for b in a.blocks)


@dataclass
class State:
    """A positive unital functional phi(a) = sum_k <W_k, a_k> (entrywise).

    ``weights`` holds one d_k x d_k matrix per block; positivity of phi is
    positive semidefiniteness of every weight block.
    """

    algebra: MultiMatrixAlgebra
    weights: list
    faithful: bool = False

    def __post_init__(self):
        ws = []
        for d, w in zip(self.algebra.block_dims, self.weights):
            w = np.asarray(w, dtype=complex)
            if w.shape != (d, d):
                raise InvalidStateError(f"weight block shape {w.shape} != ({d},{d})")
            ws.append(w)
        self.weights = ws
        self._wvec = np.concatenate([w.reshape(-1) for w in ws])

    def __call__(self, a: AlgElement) -> complex:
        self.algebra._check(a)
        return complex(self._wvec @ a.vec)

    def gram_matrix(self) -> np.ndarray:
        """Matrix G of the GNS form <x,y> = phi(x* y) on vec coordinates."""
        parts = [np.kron(np.eye(d), w) for d, w in zip(self.algebra.block_dims, self.weights)]
        return _block_diag(parts)

    def inner(self, x: AlgElement, y: AlgElement) -> complex:
        return self(x.star() * y)

    def validate(self, tol: float = TOL_ALG) -> "State":
        if abs(self(self.algebra.unit()) - 1.0) > tol:
            raise InvalidStateError("state is not unital")
        evs = np.concatenate([np.linalg.eigvalsh((w + w.conj().T) / 2) for w in self.weights])
        herm = max(float(np.linalg.norm(w - w.conj().T)) for w in self.weights)
        if herm > tol:
            raise InvalidStateError("state is not hermitian")
        if evs.min() < -tol:
            raise InvalidStateError(f"state is not positive (min eigenvalue {evs.min():.3g})")
        self.faithful = bool(evs.min() > tol)
        return self


def state_from_vec_functional(algebra: MultiMatrixAlgebra, w_vec: np.ndarray) -> State:
    """State from the row vector of values on matrix-unit coordinates."""
    w_vec = np.asarray(w_vec, dtype=complex).reshape(algebra.linear_dim)
    blocks = []
    for k, d in enumerate(algebra.block_dims):
        blocks.append(w_vec[algebra._offsets[k]:algebra._offsets[k + 1]].reshape(d, d))
    return State(algebra, blocks)


@dataclass
class FHilbert:
    """A finite Hilbert space presented over an ambient index set.

    ``onb`` columns are coordinates (over the ambient index set) of an
    orthonormal basis of the separated quotient; ``gram`` is the original
    form.  ``ambient_dim = rank + kernel_dim``.
    """

    ambient_dim: int
    onb: np.ndarray
    kernel_dim: int
    gram: np.ndarray

    @property
    def dim(self) -> int:
        return self.onb.shape[1]

    def to_coords(self, ambient: np.ndarray) -> np.ndarray:
        """Coordinates of the class of an ambient vector on the onb."""
        return self.onb.conj().T @ (self.gram @ ambient)

    def lift(self, coords: np.ndarray) -> np.ndarray:
        return self.onb @ coords


def gram_quotient(gram: np.ndarray, tol_rel: float = TOL_GRAM) -> FHilbert:
    """Separate a Hermitian PSD Gram matrix: orthonormal basis + kernel.

    Eigenvalues below ``tol_rel * max_eigenvalue`` are declared kernel;
    an eigenvalue below ``-tol_rel * max_eigenvalue`` raises.
    """
    gram = np.asarray(gram, dtype=complex)
    n = gram.shape[0]
    if n == 0:
        return FHilbert(0, np.zeros((0, 0)), 0, gram)
    if np.linalg.norm(gram - gram.conj().T) > tol_rel * max(1.0, np.linalg.norm(gram)):
        raise NotPositiveError("Gram matrix is not hermitian")
    gram = (gram + gram.conj().T) / 2.0
    w, v = np.linalg.eigh(gram)
    scale = max(float(w[-1]), 0.0)
    cut = tol_rel * scale
    if w[0] < -max(cut, 1e-300):
        raise NotPositiveError(f"Gram matrix has negative eigenvalue {w[0]:.3g}")
    keep = w > cut
    onb = v[:, keep] / np.sqrt(w[keep])
    return FHilbert(n, onb, int(n - keep.sum()), gram)


def gns_space(algebra: MultiMatrixAlgebra, phi: State):
    """Scalar GNS construction for a state on a multimatrix algebra.

    Returns the separated Hilbert space over matrix-unit coordinates and
    the left-multiplication representation  a -> matrix on that space.
    """
    phi.validate()
    gram = phi.gram_matrix()
    space = gram_quotient(gram)

    def represent(a: AlgElement) -> np.ndarray:
        algebra._check(a)
        return space.onb.conj().T @ gram @ algebra.left_mult_matrix(a) @ space.onb

    return space, represent


def orthonormalize(algebra: MultiMatrixAlgebra, elements: Sequence[AlgElement],
                   gram_vec: np.ndarray, tol_rel: float = TOL_GRAM) -> list:
    """Orthonormal basis of span(elements) under a vec-coordinate form."""
    if not elements:
        return []
    basis_mat = np.column_stack([e.vec for e in elements])
    small = basis_mat.conj().T @ gram_vec @ basis_mat
    space = gram_quotient(small, tol_rel)
    cols = basis_mat @ space.onb
    return [algebra.from_vec(cols[:, j]) for j in range(cols.shape[1])]


@dataclass
class CondExpectation:
    """State-preserving conditional expectation onto a *-subalgebra.

    Built as the orthogonal projection for the form phi(x* y); the
    conditional-expectation axioms (idempotence, unitality, positivity,
    bimodule property over the subalgebra) are certified numerically at
    construction and a failure raises.
    """

    algebra: MultiMatrixAlgebra
    image_basis: list
    projection: np.ndarray
    state: State

    def __call__(self, a: AlgElement) -> AlgElement:
        self.algebra._check(a)
        return self.algebra.from_vec(self.projection @ a.vec)


def _span_residual(mat_basis: np.ndarray, v: np.ndarray) -> float:
    coeff, *_ = np.linalg.lstsq(mat_basis, v, rcond=None)
    return float(np.linalg.norm(mat_basis @ coeff - v))


def conditional_expectation(algebra: MultiMatrixAlgebra, image_basis: Sequence[AlgElement],
                            phi: State, tol: float = TOL_ALG) -> CondExpectation:
    """Orthogonal projection onto span(image_basis) for the phi-form.

    ``image_basis`` must span a unital *-subalgebra and ``phi`` must be a
    faithful state whose projection is a genuine conditional expectation
    (automatic for tracial states); every axiom is verified.
    """
    phi.validate()
    if not phi.faithful:
        raise InvalidStateError("conditional expectation needs a faithful state")
    for e in image_basis:
        algebra._check(e)
    span = np.column_stack([e.vec for e in image_basis])
    scale = max(np.linalg.norm(span, axis=0).max(), 1.0)
    # closure under involution and products, and unitality of the span
    unit = algebra.unit()
    if _span_residual(span, unit.vec) > tol * scale:
        raise NotSubalgebraError("spanning set does not contain the unit")
    for e in image_basis:
        if _span_residual(span, e.star().vec) > tol * scale:
            raise NotSubalgebraError("spanning set not closed under involution")
    for e in image_basis:
        for f in image_basis:
            if _span_residual(span, (e * f).vec) > tol * scale * scale:
                raise NotSubalgebraError("spanning set not closed under products")

    gram_vec = phi.gram_matrix()
    onb = orthonormalize(algebra, list(image_basis), gram_vec)
    onb_mat = np.column_stack([e.vec for e in onb])
    proj = onb_mat @ (onb_mat.conj().T @ gram_vec)

    exp = CondExpectation(algebra, onb, proj, phi)
    _certify_expectation(exp, tol)
    return exp


def _certify_expectation(exp: CondExpectation, tol: float) -> None:
    algebra, proj = exp.algebra, exp.projection
    unit = algebra.unit()
    if np.linalg.norm(proj @ proj - proj) > tol * max(1.0, np.linalg.norm(proj)):
        raise AlgebraError("projection is not idempotent")
    if (exp(unit) - unit).hs_norm() > tol:
        raise AlgebraError("expectation is not unital")
    # state preservation and positivity on a deterministic sample
    rng = np.random.default_rng(7)
    for _ in range(20):
        a = algebra.random(rng)
        if abs(exp.state(exp(a)) - exp.state(a)) > tol * max(1.0, a.hs_norm()):
            raise AlgebraError("expectation does not preserve the state")
        ea = exp(a.star() * a)
        evs = np.concatenate([np.linalg.eigvalsh((b + b.conj().T) / 2) for b in ea.blocks])
        if evs.min() < -tol * max(1.0, a.hs_norm()) ** 2:
            raise NotPositiveError("expectation is not positive")
    # bimodule property over the full subalgebra basis
    for b1 in exp.image_basis:
        for b2 in exp.image_basis:
            a = algebra.random(rng)
            lhs = exp(b1 * a * b2)
            rhs = b1 * exp(a) * b2
            if (lhs - rhs).hs_norm() > tol * max(1.0, a.hs_norm()):
                raise AlgebraError("bimodule property fails; projection is not "
                                   "a conditional expectation for this state")


@dataclass
class StarMorphism:
    """A linear map between multimatrix algebras, given on vec coordinates.

    ``validate`` certifies multiplicativity, *-preservation, unitality and
    (if requested) injectivity to tolerance.
    """

    domain: MultiMatrixAlgebra
    codomain: MultiMatrixAlgebra
    matrix: np.ndarray
    unital: bool = True
    injective: bool = True
    _pinv: np.ndarray = field(default=None, repr=False)

    def __call__(self, a: AlgElement) -> AlgElement:
        self.domain._check(a)
        return self.codomain.from_vec(self.matrix @ a.vec)

    def inverse_on_range(self, b: AlgElement) -> AlgElement:
        """Preimage of an element of the range (least squares on the image)."""
        self.codomain._check(b)
        if self._pinv is None:
            self._pinv = np.linalg.pinv(self.matrix)
        return self.domain.from_vec(self._pinv @ b.vec)

    def validate(self, tol: float = TOL_ALG, rng: np.random.Generator | None = None) -> "StarMorphism":
        rng = rng or np.random.default_rng(11)
        unit_res = (self(self.domain.unit()) - self.codomain.unit()).hs_norm()
        if self.unital and unit_res > tol:
            raise AlgebraError(f"morphism is not unital (residual {unit_res:.3g})")
        for _ in range(20):
            x, y = self.domain.random(rng), self.domain.random(rng)
            scale = max(1.0, x.hs_norm() * y.hs_norm())
            if (self(x * y) - self(x) * self(y)).hs_norm() > tol * scale:
                raise AlgebraError("morphism is not multiplicative")
            if (self(x.star()) - self(x).star()).hs_norm() > tol * max(1.0, x.hs_norm()):
                raise AlgebraError("morphism does not preserve the involution")
        if self.injective:
            rank = np.linalg.matrix_rank(self.matrix, tol=1e-10 * max(1.0, np.linalg.norm(self.matrix)))
            if rank < self.domain.linear_dim:
                raise AlgebraError("morphism is not injective")
        return self


def star_algebra_blocks(mats: Sequence[np.ndarray], rng_seed: int = 20260810,
                        tol: float = 1e-9):
    """Block-diagonalize the *-algebra spanned by ``mats``.

    Input: matrices spanning a subalgebra of M_n(C) closed under products
    and conjugate transpose (e.g. a regular representation).  Output:
    ``(block_dims, to_blocks)`` where ``to_blocks(X)`` carries a matrix of
    the algebra to its list of irreducible blocks; the induced map is a
    certified *-isomorphism onto the multimatrix algebra of shape
    ``block_dims``.

    The algorithm separates isotypic components with a random hermitian
    element of the center, then splits each component with a random
    hermitian element of the algebra and intertwiners from a second random
    element.  Deterministic for fixed ``rng_seed``.
    """
    mats = [np.asarray(m, dtype=complex) for m in mats]
    n = mats[0].shape[0]
    rng = np.random.default_rng(rng_seed)

    span = np.column_stack([m.reshape(-1) for m in mats])
    u, s, _ = np.linalg.svd(span, full_matrices=False)
    span_dim = int((s > 1e-10 * max(1.0, s[0])).sum())
    basis = [u[:, j].reshape(n, n) for j in range(span_dim)]

    # center: elements of the span commuting with every generator
    rows = []
    for b in basis:
        rows.append(np.column_stack([(g @ b - b @ g).reshape(-1) for g in basis]))
    comm = np.vstack(rows)
    _, sv, vh = np.linalg.svd(comm)
    sv = np.concatenate([sv, np.zeros(vh.shape[0] - len(sv))])
    center = [sum(c * b for c, b in zip(vh[j].conj(), basis))
              for j in range(vh.shape[0]) if sv[j] <= 1e-9 * max(1.0, sv[0])]
    if not center:
        raise DecompositionError("empty center; input does not span an algebra")

    def random_hermitian(family):
        coeffs = rng.standard_normal(len(family)) + 1j * rng.standard_normal(len(family))
        z = sum(c * f for c, f in zip(coeffs, family))
        return (z + z.conj().T) / 2.0

    def cluster(w, rel=1e-6):
        spread = max(float(w[-1] - w[0]), 1.0)
        groups, start = [], 0
        for i in range(1, len(w)):
            if w[i] - w[i - 1] > rel * spread:
                groups.append(range(start, i))
                start = i
        groups.append(range(start, len(w)))
        return groups

    z = random_hermitian(center)
    w, v = np.linalg.eigh(z)
    components = [v[:, list(g)] for g in cluster(w)]
    if len(components) != len(center):
        # a random central element separates all minimal central projections
        # with probability 1; retry once with fresh coefficients
        z = random_hermitian(center)
        w, v = np.linalg.eigh(z)
        components = [v[:, list(g)] for g in cluster(w)]
        if len(components) != len(center):
            raise DecompositionError("could not separate isotypic components")

    frames = []
    for vk in components:
        dim_vk = vk.shape[1]
        compressed = [vk.conj().T @ b @ vk for b in basis]
        comp_span = np.column_stack([c.reshape(-1) for c in compressed])
        d2 = np.linalg.matrix_rank(comp_span, tol=1e-9 * max(1.0, np.linalg.norm(comp_span)))
        d = int(round(np.sqrt(d2)))
        if d * d != d2 or dim_vk % d != 0:
            raise DecompositionError("component dimensions are inconsistent")
        m = dim_vk // d
        h = random_hermitian(compressed)
        hw, hv = np.linalg.eigh(h)
        groups = cluster(hw)
        if len(groups) != d or any(len(g) != m for g in groups):
            raise DecompositionError("could not split a simple component")
        w1 = hv[:, list(groups[0])]
        y = sum((rng.standard_normal() + 1j * rng.standard_normal()) * c for c in compressed)
        frame = [vk @ w1]
        for gi in groups[1:]:
            qi = hv[:, list(gi)]
            mi = qi @ (qi.conj().T @ (y @ w1))
            s = np.linalg.norm(mi[:, 0])
            if s < 1e-10 * max(1.0, np.linalg.norm(y)):
                raise DecompositionError("degenerate intertwiner; retry with another seed")
            frame.append(vk @ (mi / s))
        frames.append(frame)

    # deterministic block order: by dimension, then by center eigenvalue order
    order = sorted(range(len(frames)), key=lambda k: (len(frames[k]), k))
    frames = [frames[k] for k in order]
    block_dims = [len(f) for f in frames]

    def to_blocks(x: np.ndarray) -> list:
        blocks = []
        for frame in frames:
            d, m = len(frame), frame[0].shape[1]
            blk = np.empty((d, d), dtype=complex)
            for i in range(d):
                for j in range(d):
                    blk[i, j] = np.trace(frame[i].conj().T @ x @ frame[j]) / m
            blocks.append(blk)
        return blocks

    if sum(d * d for d in block_dims) != span_dim:
        raise DecompositionError("block dimensions do not account for the algebra")
    for _ in range(8):
        i, j = rng.integers(0, len(mats), size=2)
        bx, by = to_blocks(mats[i]), to_blocks(mats[j])
        bxy = to_blocks(mats[i] @ mats[j])
        res = max(np.linalg.norm(p @ q - r) for p, q, r in zip(bx, by, bxy))
        star_res = max(np.linalg.norm(p.conj().T - r)
                       for p, r in zip(bx, to_blocks(mats[i].conj().T)))
        if res > tol * 10 * max(1.0, np.linalg.norm(mats[i]) * np.linalg.norm(mats[j])) or \
           star_res > tol * 10 * max(1.0, np.linalg.norm(mats[i])):
            raise DecompositionError("decomposition failed its own certification")
    return block_dims, to_blocks
