"""Julg-Valette data and the operator homotopy, verified at a truncation.

Two GNS spaces are built over the symbolic word algebra:

* the H side, for the state  counit o E_A:  spanned by the class of 1
  and classes of reduced words with no trailing letter, graded by the
  final sign into H_0 (+) H_{-1} (+) H_{+1};
* the K side, for  counit o E_B:  spanned by base-algebra classes and
  word classes whose trailing letter is 1 or lies in ker E_B, graded into
  K_{-1} (+) K_{+1} (words ending in u with no trailing letter).

Distinct sign patterns give exactly orthogonal classes (the expectation
onto A kills any product that cannot fully collapse), so Gram matrices
are assembled and separated block by block.

The Julg-Valette operator F maps the class of x to the class of x.u when
the last sign is -1 and to the class of x when it is +1; the isometry
identities for the expectation of x* x make it unitary between the
matched truncations, which are chosen here so that F hits every K-side
basis class (base classes, word classes up to length L-1, plus length-L
classes ending in u with no trailing letter).

Truncation masks: every certified identity is checked on an explicit
interior subspace where the truncated operators agree with the
untruncated ones; mask sizes are part of the report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product as iter_product

import numpy as np

from .starcore import AlgebraError, gram_quotient
from .wordalg import (SymbolicElement, WordContext, counit_m, expect_A,
                      expect_B, phi_m, reduce_product, sign_patterns, star,
                      interior_ranges)
from .fock import SizeLimitError

UNIT = "1"


@dataclass
class CheckItem:
    name: str
    residual: float
    threshold: float
    mask: str
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.residual <= self.threshold)

    def as_dict(self) -> dict:
        return {"name": self.name, "residual": float(self.residual),
                "threshold": float(self.threshold), "mask": self.mask,
                "pass": self.passed}


@dataclass
class CheckReport:
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add(self, name, residual, threshold, mask="full") -> CheckItem:
        item = CheckItem(name, float(residual), float(threshold), mask)
        self.checks.append(item)
        return item

    def extend(self, other: "CheckReport") -> None:
        self.checks.extend(other.checks)
        self.notes.extend(other.notes)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> str:
        return json.dumps({"checks": [c.as_dict() for c in self.checks],
                           "notes": self.notes, "pass": self.passed}, indent=2)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]


class GNSTrunc:
    """A truncated GNS space over the word algebra, with sector blocks.

    ``blocks`` maps a block key to (entry_index, symbols, space); entries
    are class labels, symbols the spanning symbolic elements, space the
    separated quotient of the block Gram.  Blocks are mutually orthogonal
    by the sign-pattern argument, which is also verified on samples.
    """

    def __init__(self, ctx: WordContext, side: str, L: int, span_cap: int = 4000):
        if L < 1:
            raise AlgebraError("truncation length must be >= 1")
        if side not in ("H", "K"):
            raise AlgebraError("side must be 'H' or 'K'")
        self.ctx = ctx
        self.side = side
        self.L = L
        inp = ctx.inp
        self.dimB = ctx.dimB
        self.ker_count = ctx.dimA - ctx.dimB

        self.block_keys = []
        self.entries = {}      # block key -> {entry label -> column}
        self.symbols = {}      # block key -> [SymbolicElement]
        if side == "H":
            self._enumerate_h()
        else:
            self._enumerate_k()
        total_span = sum(len(v) for v in self.symbols.values())
        if total_span > span_cap:
            raise SizeLimitError(f"GNS spanning size {total_span} exceeds cap {span_cap}")

        self.spaces = {}
        self.offsets = {}
        offset = 0
        for key in self.block_keys:
            syms = self.symbols[key]
            stars = [star(s) for s in syms]
            gram = np.empty((len(syms), len(syms)), dtype=complex)
            for i in range(len(syms)):
                for j in range(len(syms)):
                    gram[i, j] = self._state(stars[i] * syms[j])
            space = gram_quotient(gram)
            self.spaces[key] = space
            self.offsets[key] = offset
            offset += space.dim
        self.dim = offset

        self.cyclic = self.to_quotient(*self.expand_classes(ctx.one()))

    # -- enumeration ----------------------------------------------------------

    def _pattern_blocks(self, pattern):
        """Block keys and entry labels for one sign pattern."""
        n = len(pattern)
        ctx = self.ctx
        interiors = list(iter_product(*interior_ranges(ctx, pattern)))
        x0s = range(ctx.dimA)
        if self.side == "H":
            if n <= self.L:
                key = ("H", pattern)
                self._add_block(key, [(i0, ints) for i0 in x0s for ints in interiors])
            return
        if pattern[-1] == 1:
            if n <= self.L:
                self._add_block(("K1", pattern),
                                [(i0, ints, UNIT) for i0 in x0s for ints in interiors])
            if n <= self.L - 1:
                self._add_block(("Km1", pattern),
                                [(i0, ints, k) for i0 in x0s for ints in interiors
                                 for k in range(self.ker_count)])
        else:
            if n <= self.L - 1:
                trail = [UNIT] + list(range(self.ker_count))
                self._add_block(("Kneg", pattern),
                                [(i0, ints, t) for i0 in x0s for ints in interiors
                                 for t in trail])

    def _add_block(self, key, labels):
        ctx = self.ctx
        unit = ctx.inp.A.algebra.unit()
        syms = []
        for label in labels:
            if key[0] in ("A", "xi"):
                if label == UNIT:
                    syms.append(ctx.one())
                else:
                    syms.append(ctx.from_algebra(ctx.letter(1, self.dimB + label)))
                continue
            pattern = key[1]
            i0, ints = label[0], label[1]
            trail_label = label[2] if len(label) > 2 else UNIT
            tail = [(pattern[i], ctx.letter(pattern[i], ints[i]))
                    for i in range(len(pattern) - 1)]
            trail = unit if trail_label == UNIT else ctx.letter(1, self.dimB + trail_label)
            tail.append((pattern[-1], trail))
            syms.append(ctx.word(ctx.ref(i0), tail))
        self.block_keys.append(key)
        self.entries[key] = {label: col for col, label in enumerate(labels)}
        self.symbols[key] = syms

    def _enumerate_h(self):
        self._add_block(("xi",), [UNIT])
        for pattern in sign_patterns(self.L):
            self._pattern_blocks(pattern)

    def _enumerate_k(self):
        self._add_block(("A",), [UNIT] + list(range(self.ker_count)))
        for pattern in sign_patterns(self.L):
            self._pattern_blocks(pattern)

    # -- states and coordinates -------------------------------------------------

    def _state(self, x: SymbolicElement) -> complex:
        inp = self.ctx.inp
        if self.side == "H":
            return inp.counit_A(expect_A(x))
        return inp.counit_A(inp.E_plus(expect_A(x)))

    def sector_of(self, key) -> str:
        if key[0] == "xi":
            return "H0"
        if key[0] == "H":
            return "H-1" if key[1][-1] == -1 else "H+1"
        if key[0] == "K1":
            return "K+1"
        return "K-1"

    def expand_classes(self, x: SymbolicElement):
        """Spanning coordinates of the class of x; exact=False when a word
        exceeds the enumerated truncation (its class is dropped)."""
        ctx = self.ctx
        inp = ctx.inp
        vec = np.zeros(sum(len(s) for s in self.symbols.values()), dtype=complex)
        exact = True
        span_offsets = {}
        off = 0
        for key in self.block_keys:
            span_offsets[key] = off
            off += len(self.symbols[key])

        def put(key, label, coeff):
            cols = self.entries.get(key)
            if cols is None or label not in cols:
                return False
            vec[span_offsets[key] + cols[label]] += coeff
            return True

        if self.side == "H":
            val = inp.counit_A(x.a_part)
            if abs(val) > 1e-16:
                put(("xi",), UNIT, val)
        else:
            sub = inp.E_plus(x.a_part)
            val = inp.counit_A(sub)
            if abs(val) > 1e-16:
                put(("A",), UNIT, val)
            rest = inp.expand(1, x.a_part - sub)[self.dimB:]
            for k, c in enumerate(rest):
                if abs(c) > 1e-16:
                    put(("A",), k, c)

        for (signs, letters), x0 in x.words.items():
            coeffs = inp.expand(1, x0)
            trail_id = letters[-1]
            ints = letters[:-1]
            if self.side == "H":
                eps_val = inp.counit_A(ctx.ref(trail_id))
                if abs(eps_val) <= 1e-16:
                    continue
                for i0, c in enumerate(coeffs):
                    if abs(c) <= 1e-16:
                        continue
                    if not put(("H", signs), (i0, ints), c * eps_val):
                        exact = False
            else:
                if trail_id < self.dimB:
                    eps_val = inp.counit_A(ctx.ref(trail_id))
                    if abs(eps_val) <= 1e-16:
                        continue
                    key = ("K1", signs) if signs[-1] == 1 else ("Kneg", signs)
                    label_trail = UNIT
                    factor = eps_val
                else:
                    key = ("Km1", signs) if signs[-1] == 1 else ("Kneg", signs)
                    label_trail = trail_id - self.dimB
                    factor = 1.0
                for i0, c in enumerate(coeffs):
                    if abs(c) <= 1e-16:
                        continue
                    if not put(key, (i0, ints, label_trail), c * factor):
                        exact = False
        return vec, exact

    def to_quotient(self, span_vec: np.ndarray, exact: bool = True) -> np.ndarray:
        out = np.zeros(self.dim, dtype=complex)
        off = 0
        for key in self.block_keys:
            n = len(self.symbols[key])
            space = self.spaces[key]
            seg = span_vec[off:off + n]
            out[self.offsets[key]:self.offsets[key] + space.dim] = \
                space.onb.conj().T @ space.gram @ seg
            off += n
        return out

    def class_coords(self, x: SymbolicElement):
        vec, exact = self.expand_classes(x)
        return self.to_quotient(vec), exact

    def represent(self, g: SymbolicElement):
        """Matrix of left multiplication by g, with per-block exactness."""
        mat = np.zeros((self.dim, self.dim), dtype=complex)
        exact_blocks = {}
        for key in self.block_keys:
            space = self.spaces[key]
            cols = []
            ok = True
            for s in self.symbols[key]:
                coords, exact = self.class_coords(reduce_product(g, s))
                ok = ok and exact
                cols.append(coords)
            span_mat = np.column_stack(cols) if cols else np.zeros((self.dim, 0))
            mat[:, self.offsets[key]:self.offsets[key] + space.dim] = span_mat @ space.onb
            exact_blocks[key] = ok
        return mat, exact_blocks

    def block_projector(self, predicate) -> np.ndarray:
        p = np.zeros((self.dim, self.dim))
        for key in self.block_keys:
            if predicate(key):
                o, d = self.offsets[key], self.spaces[key].dim
                p[o:o + d, o:o + d] = np.eye(d)
        return p

    def sector_projector(self, sector: str) -> np.ndarray:
        return self.block_projector(lambda k: self.sector_of(k) == sector)

    def word_length(self, key) -> int:
        return 0 if key[0] in ("xi", "A") else len(key[1])

    def interior_projector(self, depth: int) -> np.ndarray:
        """Sub-span where products by depth-many u letters stay exact."""
        if self.side == "H":
            return self.block_projector(lambda k: self.word_length(k) <= self.L - depth)

        def keep(key):
            n = self.word_length(key)
            if key[0] in ("A",):
                return True
            if key[0] == "K1":
                return n <= self.L - depth
            return n <= self.L - depth - 1
        return self.block_projector(keep)

    def sector_dims(self) -> dict:
        dims = {}
        for key in self.block_keys:
            s = self.sector_of(key)
            dims[s] = dims.get(s, 0) + self.spaces[key].dim
        return dims

    def cross_block_residual(self, rng, samples: int = 40) -> float:
        """Orthogonality of distinct blocks, verified on random entries."""
        worst = 0.0
        keys = self.block_keys
        for _ in range(samples):
            k1, k2 = keys[rng.integers(0, len(keys))], keys[rng.integers(0, len(keys))]
            if k1 == k2:
                continue
            s1 = self.symbols[k1][rng.integers(0, len(self.symbols[k1]))]
            s2 = self.symbols[k2][rng.integers(0, len(self.symbols[k2]))]
            worst = max(worst, abs(self._state(star(s1) * s2)))
        return worst


def build_gns_trunc(ctx: WordContext, side: str, L: int) -> GNSTrunc:
    return GNSTrunc(ctx, side, L)


@dataclass
class JVData:
    """The Julg-Valette operator and its augmented companions."""

    ctx: WordContext
    H: GNSTrunc
    K: GNSTrunc
    F: np.ndarray                 # H -> K, zero column on the cyclic class
    script_F: np.ndarray          # the partial isometry (same matrix, named per use)
    p: np.ndarray                 # rank-one projection onto the H cyclic class
    F_aug: np.ndarray             # H -> K (+) C omega~
    v: np.ndarray                 # the eta <-> omega~ swap on K~
    eta: np.ndarray               # K coordinates of the class of 1
    xi: np.ndarray                # H coordinates of the class of 1
    pi_rep: dict = field(default_factory=dict)    # generator label -> H matrix
    rho_rep: dict = field(default_factory=dict)   # generator label -> K matrix
    rho_aug: dict = field(default_factory=dict)   # generator label -> K~ matrix
    generators: dict = field(default_factory=dict)

    @property
    def dim_K_aug(self) -> int:
        return self.K.dim + 1

    def aug_vector(self) -> np.ndarray:
        out = np.zeros(self.dim_K_aug, dtype=complex)
        out[-1] = 1.0
        return out

    def interior_H(self, depth: int) -> np.ndarray:
        return self.H.interior_projector(depth)

    def interior_K_aug(self, depth: int) -> np.ndarray:
        p = np.zeros((self.dim_K_aug, self.dim_K_aug))
        p[:-1, :-1] = self.K.interior_projector(depth)
        p[-1, -1] = 1.0
        return p


def _generators(ctx: WordContext) -> dict:
    gens = {}
    for i, b in enumerate(ctx.inp.A.basis):
        gens[f"a[{i}]"] = ctx.from_algebra(b)
    gens["u"] = ctx.u_power(1)
    gens["u*"] = ctx.u_power(-1)
    return gens


def build_jv(H: GNSTrunc, K: GNSTrunc) -> JVData:
    """Assemble F from the defining word maps and certify unitarity.

    Unitarity failing beyond tolerance is a build bug (the isometry
    identities hold exactly), so it raises rather than reports.
    """
    ctx = H.ctx
    if K.ctx is not ctx or H.L != K.L:
        raise AlgebraError("sides must share the context and truncation")
    u = ctx.u_power(1)

    F = np.zeros((K.dim, H.dim), dtype=complex)
    for key in H.block_keys:
        if key[0] == "xi":
            continue
        space = H.spaces[key]
        cols = []
        for s in H.symbols[key]:
            target = reduce_product(s, u) if key[1][-1] == -1 else s
            coords, exact = K.class_coords(target)
            if not exact:
                raise AlgebraError("Julg-Valette image left the matched truncation")
            cols.append(coords)
        span_mat = np.column_stack(cols)
        F[:, H.offsets[key]:H.offsets[key] + space.dim] = span_mat @ space.onb

    xi = H.cyclic
    eta = K.cyclic
    non_xi = np.eye(H.dim) - np.outer(xi, xi.conj())
    res1 = np.linalg.norm(F.conj().T @ F - non_xi, 2)
    res2 = np.linalg.norm(F @ F.conj().T - np.eye(K.dim), 2)
    if max(res1, res2) > 1e-7:
        raise AlgebraError(f"Julg-Valette operator failed unitarity "
                           f"({res1:.3g}, {res2:.3g}); this is a build bug")

    p = np.outer(xi, xi.conj())
    F_aug = np.zeros((K.dim + 1, H.dim), dtype=complex)
    F_aug[:-1, :] = F
    F_aug[-1, :] = xi.conj()

    v = np.eye(K.dim + 1, dtype=complex)
    v -= np.outer(np.append(eta, 0.0), np.append(eta, 0.0).conj())
    v[-1, -1] = 0.0
    v[:-1, -1] = eta
    v[-1, :-1] = eta.conj()

    jv = JVData(ctx, H, K, F, F.copy(), p, F_aug, v, eta, xi)
    jv.generators = _generators(ctx)
    for label, g in jv.generators.items():
        jv.pi_rep[label], _ = H.represent(g)
        jv.rho_rep[label], _ = K.represent(g)
        aug = np.zeros((K.dim + 1, K.dim + 1), dtype=complex)
        aug[:-1, :-1] = jv.rho_rep[label]
        aug[-1, -1] = counit_m(g)
        jv.rho_aug[label] = aug
    return jv


def verify_commutators(jv: JVData, tol_comm: float = 1e-9,
                       svd_hi: float = 1e-6, svd_lo: float = 1e-8,
                       tol_vec: float = 1e-8) -> CheckReport:
    """The finite-rank commutator certificates for the Julg-Valette operator.

    On the interior mask: commutators with the base algebra vanish; the
    commutators with the two shifts are rank one, with image vectors the
    shifted cyclic class and the cyclic class respectively.
    """
    report = CheckReport()
    H, K = jv.H, jv.K
    mask = jv.interior_H(1)
    mask_name = f"H words length <= {H.L - 1}"
    interior_dim = int(round(np.trace(mask).real))

    worst = 0.0
    for i in range(len(jv.ctx.inp.A.basis)):
        label = f"a[{i}]"
        c = jv.script_F @ jv.pi_rep[label] - jv.rho_rep[label] @ jv.script_F
        worst = max(worst, np.linalg.norm(c @ mask, 2))
    report.add("commutator with base algebra vanishes", worst, tol_comm, mask_name)

    rho_u_eta = jv.rho_rep["u"] @ jv.eta
    for label, image, sign_vec in (("u", rho_u_eta, None), ("u*", jv.eta, None)):
        c = (jv.script_F @ jv.pi_rep[label] - jv.rho_rep[label] @ jv.script_F) @ mask
        sv = np.linalg.svd(c, compute_uv=False)
        scale = max(sv[0], 1.0)
        report.add(f"commutator with {label}: exactly one singular value",
                   sv[1] if len(sv) > 1 else 0.0, svd_lo * scale,
                   f"{mask_name} (dim {interior_dim})")
        report.add(f"commutator with {label}: top singular value present",
                   0.0 if sv[0] >= svd_hi * scale else svd_hi * scale - sv[0],
                   0.0, mask_name)
        left, _, _ = np.linalg.svd(c)
        top = left[:, 0]
        target = image / np.linalg.norm(image)
        phase = np.vdot(top, target)
        phase = phase / abs(phase) if abs(phase) > 0 else 1.0
        report.add(f"commutator with {label}: image vector matches",
                   np.linalg.norm(top * phase - target), tol_vec, mask_name)

    # the defining vector identities
    cu = jv.script_F @ jv.pi_rep["u"] - jv.rho_rep["u"] @ jv.script_F
    report.add("commutator with u on cyclic class",
               np.linalg.norm(cu @ jv.xi - rho_u_eta), tol_vec, "cyclic class")
    u_star_xi = jv.pi_rep["u*"] @ jv.xi
    report.add("commutator with u on u*-shifted cyclic class",
               np.linalg.norm(cu @ u_star_xi + rho_u_eta), tol_vec, "cyclic class")
    return report


def verify_augmented(jv: JVData, tol: float = 1e-8) -> CheckReport:
    """The augmented conjugation identities behind the homotopy."""
    report = CheckReport()
    inp = jv.ctx.inp
    K_dim = jv.K.dim

    unitary_res = max(
        np.linalg.norm(jv.F_aug.conj().T @ jv.F_aug - np.eye(jv.H.dim), 2),
        np.linalg.norm(jv.F_aug @ jv.F_aug.conj().T - np.eye(K_dim + 1), 2))
    report.add("augmented F is unitary", unitary_res, 1e-8)

    v = jv.v
    report.add("v is unitary", np.linalg.norm(v @ v.conj().T - np.eye(K_dim + 1), 2), 1e-8)
    omega = jv.aug_vector()
    eta_aug = np.append(jv.eta, 0.0)
    report.add("v swaps the two distinguished vectors",
               max(np.linalg.norm(v @ eta_aug - omega),
                   np.linalg.norm(v @ omega - eta_aug)), tol)

    mask = jv.interior_H(1)
    mask_name = f"H words length <= {jv.H.L - 1}"
    worst = 0.0
    for i in range(len(inp.A.basis)):
        label = f"a[{i}]"
        worst = max(worst, np.linalg.norm(
            (jv.F_aug @ jv.pi_rep[label] - jv.rho_aug[label] @ jv.F_aug) @ mask, 2))
    report.add("augmented F intertwines the base algebra", worst, tol, mask_name)

    lhs = jv.F_aug @ jv.pi_rep["u"]
    rhs = jv.rho_aug["u"] @ v @ jv.F_aug
    report.add("augmented F conjugates u to (shift . v)",
               np.linalg.norm((lhs - rhs) @ mask, 2), tol, mask_name)

    worst = 0.0
    for b in inp.B.basis:
        g = jv.ctx.from_algebra(inp.iota(b))
        rho_b = _aug_of(jv, g)
        worst = max(worst, np.linalg.norm(v @ rho_b @ v.conj().T - rho_b, 2))
    report.add("v commutes with the subalgebra action", worst, tol)

    # pointwise values on the augmenting vector
    worst = 0.0
    for i, a in enumerate(inp.A.basis):
        label = f"a[{i}]"
        got = jv.F_aug @ jv.pi_rep[label] @ jv.F_aug.conj().T @ omega
        worst = max(worst, np.linalg.norm(got - inp.counit_A(a) * omega))
    report.add("augmented conjugation is the counit on the new vector", worst, tol)
    report.add("augmented F conjugates u: value on the K cyclic class",
               np.linalg.norm(jv.F_aug @ jv.pi_rep["u"] @ jv.F_aug.conj().T @ eta_aug
                              - omega), tol)
    return report


def _aug_of(jv: JVData, g: SymbolicElement) -> np.ndarray:
    mat, _ = jv.K.represent(g)
    aug = np.zeros((jv.K.dim + 1, jv.K.dim + 1), dtype=complex)
    aug[:-1, :-1] = mat
    aug[-1, -1] = counit_m(g)
    return aug


@dataclass
class HomotopyPath:
    generator_a: np.ndarray
    samples: list
    v_s: dict
    w_s: dict
    branch_note: str | None = None


def homotopy(jv: JVData, samples=(0.0, 0.25, 0.5, 0.75, 1.0),
             tol: float = 1e-8, tol_end: float = 1e-10,
             n_random_words: int = 50, seed: int = 20260809) -> tuple:
    """The path of representations deforming the augmented pair.

    ``a`` is the principal logarithm of v divided by i (self-adjoint,
    spectrum in [-pi, pi]); v_s = exp(i s a); w_s = (augmented shift) v_s.
    Certifies: endpoint equalities, the Lipschitz bound, unitarity and the
    one-parameter group law at the samples, the conjugation identity
    w_s rho(b) w_s* = rho(theta(b)) on the interior mask, and at s = 1 the
    exact intertwining by the augmented F on generators and random words.
    """
    report = CheckReport()
    v = jv.v
    herm = np.linalg.norm(v - v.conj().T, 2)
    if herm < 1e-10:
        w, vecs = np.linalg.eigh(v)
        angles = np.where(w.real < 0, np.pi, 0.0)
    else:  # pragma: no cover - v is hermitian for every family built here
        w, vecs = np.linalg.eig(v)
        angles = np.angle(w)
    note = None
    if np.any(np.abs(w.real + 1.0) < 1e-12):
        note = ("v has an eigenvalue at -1: the principal logarithm sits on "
                "the branch boundary; the angle pi was chosen")
        report.notes.append(note)
    gen_a = vecs @ np.diag(angles) @ vecs.conj().T
    spec = np.linalg.eigvalsh((gen_a + gen_a.conj().T) / 2)
    report.add("homotopy generator is self-adjoint",
               np.linalg.norm(gen_a - gen_a.conj().T, 2), 1e-10)
    report.add("homotopy generator spectrum within [-pi, pi]",
               max(0.0, float(np.abs(spec).max()) - np.pi), 1e-10)

    def v_at(s: float) -> np.ndarray:
        return vecs @ np.diag(np.exp(1j * s * angles)) @ vecs.conj().T

    v_s = {s: v_at(s) for s in samples}
    w_s = {s: jv.rho_aug["u"] @ v_s[s] for s in samples}

    report.add("path start is the identity",
               np.linalg.norm(v_s.get(0.0, v_at(0.0)) - np.eye(v.shape[0]), 2), tol_end)
    report.add("path end is v", np.linalg.norm(v_at(1.0) - v, 2), tol_end)

    worst = 0.0
    for s in samples:
        worst = max(worst, np.linalg.norm(v_s[s] @ v_s[s].conj().T
                                          - np.eye(v.shape[0]), 2))
    report.add("path unitarity at samples", worst, tol)

    worst = 0.0
    for s in samples:
        for t in samples:
            if s + t <= 1.0 + 1e-12:
                worst = max(worst, np.linalg.norm(v_s[s] @ v_s[t] - v_at(s + t), 2))
    report.add("one-parameter group law at samples", worst, tol)

    worst = 0.0
    for s in samples:
        for t in samples:
            lip = np.linalg.norm(v_s[s] - v_s[t], 2) - np.pi * abs(s - t)
            worst = max(worst, lip)
    report.add("Lipschitz bound from the functional calculus", max(worst, 0.0), 1e-12)

    inp = jv.ctx.inp
    # conjugation by (u . v_s) keeps the ender type of every class and first
    # lengthens by one, then the subalgebra letter collapses back, so word
    # classes ending in u are exact one step further out than the others
    K = jv.K

    def keep(key):
        n = K.word_length(key)
        if key[0] == "A":
            return True
        if key[0] == "K1":
            return n <= K.L - 1
        return n <= K.L - 2
    mask2 = np.zeros((jv.dim_K_aug, jv.dim_K_aug))
    mask2[:-1, :-1] = K.block_projector(keep)
    mask2[-1, -1] = 1.0
    mask2_name = f"K~ conjugation interior (dim {int(round(np.trace(mask2).real))})"
    rho_bs = [(_aug_of(jv, jv.ctx.from_algebra(inp.iota(b))),
               _aug_of(jv, jv.ctx.from_algebra(inp.theta(b)))) for b in inp.B.basis]
    worst = 0.0
    for s in samples:
        ws = w_s[s]
        for rho_b, rho_tb in rho_bs:
            worst = max(worst, np.linalg.norm(
                (ws @ rho_b @ ws.conj().T - rho_tb) @ mask2, 2))
    report.add("path conjugates the subalgebra through theta", worst, tol, mask2_name)

    # s = 1: the augmented F exactly intertwines
    rho1 = {label: (jv.rho_aug[label] if label != "u" else jv.rho_aug["u"] @ v)
            for label in jv.rho_aug}
    rho1["u*"] = rho1["u"].conj().T
    worst = 0.0
    maskg = jv.interior_H(1)
    for label in jv.generators:
        worst = max(worst, np.linalg.norm(
            (jv.F_aug @ jv.pi_rep[label] - rho1[label] @ jv.F_aug) @ maskg, 2))
    report.add("endpoint intertwines on generators", worst, tol,
               f"H words length <= {jv.H.L - 1}")

    rng = np.random.default_rng(seed)
    labels = list(jv.generators)
    worst = 0.0
    for _ in range(n_random_words):
        depth_budget = jv.H.L
        n = int(rng.integers(1, 4))
        picks = []
        depth = 0
        for _ in range(n):
            label = labels[rng.integers(0, len(labels))]
            if label in ("u", "u*"):
                if depth + 1 > depth_budget:
                    continue
                depth += 1
            picks.append(label)
        lhs = jv.F_aug.copy()
        rhs = jv.F_aug.copy()
        for label in reversed(picks):
            lhs = lhs @ jv.pi_rep[label]
        for label in picks:
            rhs = rho1[label] @ rhs
        mask = jv.interior_H(depth)
        worst = max(worst, np.linalg.norm((lhs - rhs) @ mask, 2))
    report.add("endpoint intertwines on random words", worst, tol,
               "H interior by word depth")

    path = HomotopyPath(gen_a, list(samples), v_s, w_s, note)
    return path, report
