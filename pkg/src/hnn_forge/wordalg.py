"""Exact symbolic model of the dense *-algebra of an HNN extension.

Elements are finite combinations

    a  +  sum of words  x_0 u^{s_1} x_1 ... u^{s_n} x_n,   s_i in {-1,+1},

where a and the x_i live in the base algebra A and u is the HNN unitary
with  u b u* = theta(b)  for b in the distinguished subalgebra.  A word is
*reduced* when every letter at a sign change lies in the kernel of the
matching conditional expectation; Britton-style rewriting splits a letter
x at a junction  u^s x u^{-s}  into its expectation part (which collapses,
shortening the word by two) and its kernel part (which stays), and
terminates because collapses strictly shorten words.

Canonical form: interior letters are expanded over the adapted
orthonormal bases (subalgebra part followed by kernel part), the final
letter over the reference basis of A, and coefficients are absorbed into
x_0; two words never share both the sign pattern and the letter indices.
This makes reducedness a structural property of the stored data rather
than a runtime check, and all expectations, the state and the counit read
off the canonical form exactly.

The stored form is a reduced *spanning* representation, not a linear
basis: the relation u b = theta(b) u lets subalgebra parts of letters
migrate leftward, so equal elements can carry different coefficient
dictionaries.  Equality and distances are therefore always measured
intrinsically, through the canonical faithful state:  |z|^2 = phi_m(z* z).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iter_product

import numpy as np

from .qgroup import HNNInput
from .starcore import AlgebraError, AlgElement

DROP_TOL = 1e-13


class TruncationError(AlgebraError):
    """A word is longer than the truncation of the target Fock space."""


def _cancellable(signs) -> bool:
    """Necessary condition for a sign pattern to collapse to the base
    algebra: adjacent opposite pairs must cancel the whole pattern."""
    stack = []
    for s in signs:
        if stack and stack[-1] == -s:
            stack.pop()
        else:
            stack.append(s)
    return not stack


class WordContext:
    """Rewriting context: the HNN datum plus letter caches.

    All symbolic elements produced by one context share its adapted bases;
    mixing contexts raises.
    """

    def __init__(self, inp: HNNInput):
        self.inp = inp
        self.dimA = inp.dimA
        self.dimB = inp.dimB
        self._zero = inp.A.algebra.zero()
        self._shift_cache = {}
        # tag the adapted letters so rewriting can recognize them; shared
        # objects are never mutated by element arithmetic
        for eps in (1, -1):
            onb = inp.adapted_onb[eps]
            for idx, elt in enumerate(onb):
                if elt._adapted_tag is not None and elt._adapted_tag != (eps, idx):
                    elt = AlgElement(elt.algebra, vec=elt.vec.copy())
                    onb[idx] = elt
                elt._adapted_tag = (eps, idx)

    # -- letters ------------------------------------------------------------

    def letter(self, eps: int, idx: int) -> AlgElement:
        return self.inp.adapted_onb[eps][idx]

    def ref(self, idx: int) -> AlgElement:
        return self.inp.adapted_onb[1][idx]

    def letter_of(self, signs, letters, i) -> AlgElement:
        """The stored element of letter slot i of a canonical word."""
        eps = signs[i] if i < len(signs) - 1 else 1
        return self.letter(eps, letters[i])

    def sub_part(self, eps: int, x: AlgElement) -> AlgElement:
        tag = x._adapted_tag
        if tag is not None and tag[0] == eps:
            return x if tag[1] < self.dimB else self._zero
        return self.inp.expectation(eps)(x)

    def shift(self, eps: int, x: AlgElement) -> AlgElement:
        """theta^eps on an element of B_eps."""
        tag = x._adapted_tag
        if tag is not None and tag[0] == eps and tag[1] < self.dimB:
            key = (eps, tag[1])
            hit = self._shift_cache.get(key)
            if hit is None:
                hit = self._shift_cache[key] = self.inp.theta_eps(eps, x)
            return hit
        return self.inp.theta_eps(eps, x)

    # -- constructors ---------------------------------------------------------

    def zero(self) -> "SymbolicElement":
        return SymbolicElement(self, self.inp.A.algebra.zero(), {})

    def one(self) -> "SymbolicElement":
        return SymbolicElement(self, self.inp.A.algebra.unit(), {})

    def from_algebra(self, a: AlgElement) -> "SymbolicElement":
        self.inp.A.algebra._check(a)
        return SymbolicElement(self, a, {})

    def u_power(self, eps: int) -> "SymbolicElement":
        unit = self.inp.A.algebra.unit()
        return self.word(unit, [(eps, unit)])

    def word(self, x0: AlgElement, tail) -> "SymbolicElement":
        """Canonicalize the raw word x0 u^{s_1} x_1 ... u^{s_n} x_n."""
        out = self.zero()
        self._reduce_raw(x0, list(tail), out)
        return out._pruned()

    def group_word(self, labels_word) -> "SymbolicElement":
        """Word from group labels: (h0, ((e1, h1), ...)) over the A basis."""
        h0, tail = labels_word
        A = self.inp.A
        return self.word(A.basis_by_label(h0),
                         [(e, A.basis_by_label(h)) for e, h in tail])

    def random_element(self, rng, max_len: int = 2, n_words: int = 2) -> "SymbolicElement":
        A = self.inp.A.algebra
        out = self.from_algebra(A.random(rng))
        for _ in range(int(rng.integers(1, n_words + 1))):
            n = int(rng.integers(1, max_len + 1))
            signs = [int(rng.choice((-1, 1))) for _ in range(n)]
            tail = [(s, A.random(rng)) for s in signs]
            out = out + self.word(A.random(rng), tail)
        scale = out.coeff_norm()
        return out * (1.0 / scale) if scale > 1.0 else out

    # -- rewriting ------------------------------------------------------------

    def _reduce_raw(self, x0: AlgElement, tail: list, out: "SymbolicElement",
                    start: int = 0, budget: int | None = None) -> None:
        # every collapse shortens the word by two, so the number of nested
        # collapses is bounded by the starting length
        if budget is None:
            budget = len(tail) + 1
        if budget < 0:
            raise AlgebraError("rewriting did not terminate")  # pragma: no cover
        if not tail:
            out.a_part = out.a_part + x0
            return
        i = start
        while i < len(tail) - 1:
            si, xi = tail[i]
            sj, _ = tail[i + 1]
            if sj == -si:
                sub = self.sub_part(si, xi)
                if sub.max_abs() > DROP_TOL:
                    shifted = self.shift(si, sub)
                    if i == 0:
                        new_x0 = x0 * shifted * tail[1][1]
                        self._reduce_raw(new_x0, tail[2:], out, 0, budget - 1)
                    else:
                        merged = tail[i - 1][1] * shifted * tail[i + 1][1]
                        new_tail = tail[:i - 1] + [(tail[i - 1][0], merged)] + tail[i + 2:]
                        self._reduce_raw(x0, new_tail, out, 0, budget - 1)
                    ker = xi - sub
                    if ker.max_abs() <= DROP_TOL:
                        return
                    tail = tail[:i] + [(si, ker)] + tail[i + 1:]
            i += 1
        self._expand_letters(x0, tail, out)

    def _expand_letters(self, x0: AlgElement, tail: list, out: "SymbolicElement") -> None:
        n = len(tail)
        signs = tuple(s for s, _ in tail)
        options = []
        for i, (s, x) in enumerate(tail):
            eps = s if i < n - 1 else 1
            mixed = i < n - 1 and tail[i + 1][0] == -s
            tag = x._adapted_tag
            if tag is not None and tag[0] == eps:
                if mixed and tag[1] < self.dimB:
                    raise AlgebraError("rewriting leak: subalgebra letter at a "
                                       "sign change")  # pragma: no cover
                options.append([(tag[1], 1.0 + 0.0j)])
                continue
            coeffs = self.inp.expand(eps, x)
            entries = []
            for idx, c in enumerate(coeffs):
                if abs(c) <= DROP_TOL:
                    continue
                if mixed and idx < self.dimB:
                    if abs(c) > 1e-8:
                        raise AlgebraError("rewriting leak: subalgebra part at a "
                                           "sign change exceeded tolerance")
                    continue
                entries.append((idx, c))
            if not entries:
                return
            options.append(entries)
        for combo in iter_product(*options):
            letters = tuple(idx for idx, _ in combo)
            coeff = 1.0 + 0.0j
            for _, c in combo:
                coeff *= c
            key = (signs, letters)
            prev = out.words.get(key)
            out.words[key] = (prev + coeff * x0) if prev is not None else coeff * x0

    def a_part_of_raw(self, x0: AlgElement, tail: list, start: int = 0) -> AlgElement:
        """Expectation onto A of a raw word, skipping letter expansion.

        Follows only the branches whose sign pattern can still cancel;
        exact for the canonical state evaluation of long products.
        """
        if not tail:
            return x0
        if not _cancellable([s for s, _ in tail]):
            return self.inp.A.algebra.zero()
        for i in range(start, len(tail) - 1):
            si, xi = tail[i]
            sj, _ = tail[i + 1]
            if sj == -si:
                sub = self.sub_part(si, xi)
                total = self.inp.A.algebra.zero()
                if sub.max_abs() > DROP_TOL:
                    shifted = self.shift(si, sub)
                    if i == 0:
                        total = total + self.a_part_of_raw(x0 * shifted * tail[1][1], tail[2:])
                    else:
                        merged = tail[i - 1][1] * shifted * tail[i + 1][1]
                        new_tail = tail[:i - 1] + [(tail[i - 1][0], merged)] + tail[i + 2:]
                        total = total + self.a_part_of_raw(x0, new_tail)
                ker = xi - sub
                if ker.max_abs() > DROP_TOL:
                    new_tail = tail[:i] + [(si, ker)] + tail[i + 1:]
                    total = total + self.a_part_of_raw(x0, new_tail, i + 1)
                return total
        return self.inp.A.algebra.zero()


@dataclass
class SymbolicElement:
    """a_part + canonical reduced words with coefficients absorbed in x_0."""

    ctx: WordContext
    a_part: AlgElement
    words: dict

    def _pruned(self) -> "SymbolicElement":
        self.words = {k: v for k, v in self.words.items() if v.max_abs() > DROP_TOL}
        return self

    def _same(self, other: "SymbolicElement") -> None:
        if self.ctx is not other.ctx:
            raise AlgebraError("symbolic elements from different contexts")

    def __add__(self, other: "SymbolicElement") -> "SymbolicElement":
        self._same(other)
        words = dict(self.words)
        for k, v in other.words.items():
            words[k] = words[k] + v if k in words else v
        return SymbolicElement(self.ctx, self.a_part + other.a_part, words)._pruned()

    def __sub__(self, other: "SymbolicElement") -> "SymbolicElement":
        return self + (-1.0) * other

    def __mul__(self, other):
        if isinstance(other, SymbolicElement):
            return reduce_product(self, other)
        return SymbolicElement(self.ctx, complex(other) * self.a_part,
                               {k: complex(other) * v for k, v in self.words.items()})._pruned()

    def __rmul__(self, scalar) -> "SymbolicElement":
        return self * scalar

    def max_length(self) -> int:
        return max((len(k[0]) for k in self.words), default=0)

    def tail_elements(self, key) -> list:
        signs, letters = key
        return [(signs[i], self.ctx.letter_of(signs, letters, i)) for i in range(len(signs))]

    def full_expand(self) -> dict:
        """Scalar coefficients of the stored representation (spanning
        coordinates; not unique across equal elements)."""
        ctx = self.ctx
        out = {}
        for idx, c in enumerate(ctx.inp.expand(1, self.a_part)):
            if abs(c) > DROP_TOL:
                out[("A", idx)] = out.get(("A", idx), 0.0) + c
        for (signs, letters), x0 in self.words.items():
            for idx, c in enumerate(ctx.inp.expand(1, x0)):
                if abs(c) > DROP_TOL:
                    key = ("W", idx, signs, letters)
                    out[key] = out.get(key, 0.0) + c
        return out

    def coeff_norm(self) -> float:
        """l2 size of the stored coefficients (a scale proxy, not a norm)."""
        return float(np.sqrt(sum(abs(c) ** 2 for c in self.full_expand().values())))

    def norm(self) -> float:
        """Intrinsic GNS norm sqrt(phi_m(z* z)); zero exactly on zero."""
        val = phi_m(star(self) * self)
        return float(np.sqrt(max(val.real, 0.0)))

    def distance(self, other: "SymbolicElement") -> float:
        self._same(other)
        return (self - other).norm()

    def __repr__(self) -> str:
        return f"SymbolicElement({len(self.words)} words, |a|={self.a_part.hs_norm():.3g})"

    def pretty(self) -> str:
        """Report grammar: a[i] for base letters, u / u*, joined by dots."""
        parts = []
        if self.a_part.hs_norm() > DROP_TOL:
            parts.append("a")
        for signs, letters in sorted(self.words, key=lambda k: (len(k[0]), k)):
            bits = ["a[0]"]
            for i, s in enumerate(signs):
                bits.append("u" if s == 1 else "u*")
                bits.append(f"a[{letters[i]}]")
            parts.append(".".join(bits))
        return " + ".join(parts) if parts else "0"


def reduce_product(x: SymbolicElement, y: SymbolicElement) -> SymbolicElement:
    """Bilinear product with Britton rewriting at every junction."""
    x._same(y)
    ctx = x.ctx
    out = ctx.zero()
    out.a_part = x.a_part * y.a_part
    x_a = x.a_part.max_abs() > DROP_TOL
    y_a = y.a_part.max_abs() > DROP_TOL
    if x_a:
        for key, y0 in y.words.items():
            tail = y.tail_elements(key)
            ctx._reduce_raw(x.a_part * y0, tail, out)
    if y_a:
        for key, x0 in x.words.items():
            tail = x.tail_elements(key)
            s_last, last = tail[-1]
            ctx._reduce_raw(x0, tail[:-1] + [(s_last, last * y.a_part)], out)
    for key1, x0 in x.words.items():
        t1 = x.tail_elements(key1)
        for key2, y0 in y.words.items():
            t2 = y.tail_elements(key2)
            s_last, last = t1[-1]
            merged = t1[:-1] + [(s_last, last * y0)] + t2
            ctx._reduce_raw(x0, merged, out)
    return out._pruned()


def star(x: SymbolicElement) -> SymbolicElement:
    """Involution: reverse each word with conjugated letters, negated signs."""
    ctx = x.ctx
    out = ctx.zero()
    out.a_part = x.a_part.star()
    for key, x0 in x.words.items():
        tail = x.tail_elements(key)
        letters = [x0] + [elt for _, elt in tail]
        signs = [s for s, _ in tail]
        new_tail = []
        for i in range(len(signs) - 1, -1, -1):
            new_tail.append((-signs[i], letters[i].star()))
        ctx._reduce_raw(letters[-1].star(), new_tail, out)
    return out._pruned()


def expect_A(x: SymbolicElement) -> AlgElement:
    """Conditional expectation onto A: reduced words vanish."""
    return x.a_part


def expect_B(x: SymbolicElement) -> AlgElement:
    """Expectation onto B, returned as an element of the B algebra."""
    inp = x.ctx.inp
    return inp.unembed(1, inp.E_plus(x.a_part))


def expect_thetaB(x: SymbolicElement) -> AlgElement:
    """Expectation onto theta(B), returned inside A."""
    return x.ctx.inp.E_minus(x.a_part)


def phi_m(x: SymbolicElement) -> complex:
    """The canonical (Haar) state: phi_A of the A part."""
    return x.ctx.inp.phi_A(x.a_part)


def counit_m(x: SymbolicElement) -> complex:
    """The counit character: 1 on the HNN unitary, counit of A on letters."""
    ctx = x.ctx
    total = ctx.inp.counit_A(x.a_part)
    for key, x0 in x.words.items():
        val = ctx.inp.counit_A(x0)
        for _, elt in x.tail_elements(key):
            val *= ctx.inp.counit_A(elt)
        total += val
    return total


@dataclass
class SymbolicTensor:
    """An element of the algebraic tensor square, as raw word pairs.

    ``pairs`` canonicalizes lazily; the functional contractions use the
    raw data with a sign-pattern shortcut so that state evaluations on
    one leg stay cheap.
    """

    ctx: WordContext
    raw_pairs: list = field(default_factory=list)   # (x0L, tailL, x0R, tailR)
    _pairs: list = field(default=None, repr=False)

    @property
    def pairs(self) -> list:
        if self._pairs is None:
            self._pairs = [(self.ctx.word(x0l, tl) if tl else self.ctx.from_algebra(x0l),
                            self.ctx.word(x0r, tr) if tr else self.ctx.from_algebra(x0r))
                           for x0l, tl, x0r, tr in self.raw_pairs]
        return self._pairs

    def apply_phi_right(self) -> SymbolicElement:
        """(id (x) phi_m) of the tensor."""
        ctx = self.ctx
        out = ctx.zero()
        for x0l, tl, x0r, tr in self.raw_pairs:
            val = ctx.inp.phi_A(ctx.a_part_of_raw(x0r, list(tr)))
            if abs(val) <= DROP_TOL:
                continue
            if tl:
                ctx._reduce_raw(val * x0l, list(tl), out)
            else:
                out.a_part = out.a_part + val * x0l
        return out._pruned()

    def apply_phi_left(self) -> SymbolicElement:
        """(phi_m (x) id) of the tensor."""
        ctx = self.ctx
        out = ctx.zero()
        for x0l, tl, x0r, tr in self.raw_pairs:
            val = ctx.inp.phi_A(ctx.a_part_of_raw(x0l, list(tl)))
            if abs(val) <= DROP_TOL:
                continue
            if tr:
                ctx._reduce_raw(val * x0r, list(tr), out)
            else:
                out.a_part = out.a_part + val * x0r
        return out._pruned()

    def contract_left(self, func) -> SymbolicElement:
        """(func (x) id) for a raw-word functional func(x0, tail) -> scalar."""
        ctx = self.ctx
        out = ctx.zero()
        for x0l, tl, x0r, tr in self.raw_pairs:
            val = func(x0l, list(tl))
            if abs(val) <= DROP_TOL:
                continue
            if tr:
                ctx._reduce_raw(val * x0r, list(tr), out)
            else:
                out.a_part = out.a_part + val * x0r
        return out._pruned()

    def contract_right(self, func) -> SymbolicElement:
        ctx = self.ctx
        out = ctx.zero()
        for x0l, tl, x0r, tr in self.raw_pairs:
            val = func(x0r, list(tr))
            if abs(val) <= DROP_TOL:
                continue
            if tl:
                ctx._reduce_raw(val * x0l, list(tl), out)
            else:
                out.a_part = out.a_part + val * x0l
        return out._pruned()

    def distance(self, other: "SymbolicTensor") -> float:
        """Intrinsic distance through the faithful product state.

        <x1 (x) y1, x2 (x) y2> = phi_m(x1* x2) phi_m(y1* y2) extends the
        GNS form to the algebraic tensor square.
        """
        lefts, rights, coeffs = [], [], []
        for t, sgn in ((self, 1.0), (other, -1.0)):
            for left, right in t.pairs:
                lefts.append(left)
                rights.append(right)
                coeffs.append(sgn)
        total = 0.0j
        star_lefts = [star(x) for x in lefts]
        star_rights = [star(y) for y in rights]
        for i in range(len(lefts)):
            for j in range(len(lefts)):
                total += (coeffs[i] * coeffs[j]
                          * phi_m(star_lefts[i] * lefts[j])
                          * phi_m(star_rights[i] * rights[j]))
        return float(np.sqrt(max(total.real, 0.0)))


def _letter_comul_terms(ctx: WordContext, elt: AlgElement) -> list:
    A = ctx.inp.A
    t = A.comul_of(elt)
    idx = np.argwhere(np.abs(t) > DROP_TOL)
    return [(A.basis[i], A.basis[j], t[i, j]) for i, j in idx]


def comultiply_raw(ctx: WordContext, x0: AlgElement, tail) -> SymbolicTensor:
    """Comultiplication of a raw word, without canonicalizing first.

    The coproduct is multiplicative and letterwise (diagonal on the
    shift), so it can be expanded over any word presentation; raw words
    over the distinguished basis keep the expansion sparse.
    """
    out = SymbolicTensor(ctx)
    tail = list(tail)
    signs = [s for s, _ in tail]
    slots = [_letter_comul_terms(ctx, x0)] + \
        [_letter_comul_terms(ctx, elt) for _, elt in tail]
    for combo in iter_product(*slots):
        coeff = 1.0 + 0.0j
        for _, _, c in combo:
            coeff *= c
        tl = tuple((signs[i - 1], combo[i][0]) for i in range(1, len(combo)))
        tr = tuple((signs[i - 1], combo[i][1]) for i in range(1, len(combo)))
        out.raw_pairs.append((coeff * combo[0][0], tl, combo[0][1], tr))
    return out


def comultiply(x: SymbolicElement) -> SymbolicTensor:
    """Letterwise comultiplication: Delta_A on base letters, u -> u (x) u."""
    ctx = x.ctx
    out = SymbolicTensor(ctx)
    if x.a_part.max_abs() > DROP_TOL:
        for bl, br, c in _letter_comul_terms(ctx, x.a_part):
            out.raw_pairs.append((c * bl, (), br, ()))
    for key, x0 in x.words.items():
        tail = x.tail_elements(key)
        out.raw_pairs.extend(comultiply_raw(ctx, x0, tail).raw_pairs)
    return out


def fock_evaluate(x: SymbolicElement, fock) -> "FockOperator":
    """Represent a symbolic element on a truncated Fock space.

    Substitutes the Fock matrices for base letters and u powers; raises if
    any word is longer than the truncation.
    """
    depth = x.max_length()
    if depth > fock.L:
        raise TruncationError(f"word length {depth} exceeds truncation {fock.L}")
    total = fock.pi(x.a_part).matrix
    for key, x0 in x.words.items():
        m = fock.pi(x0).matrix
        for s, elt in x.tail_elements(key):
            m = m @ fock.u(s).matrix @ fock.pi(elt).matrix
        total = total + m
    return fock.operator(total, interior_depth=depth)


# -- enumeration helpers ------------------------------------------------------


def sign_patterns(max_len: int):
    for n in range(1, max_len + 1):
        for bits in iter_product((1, -1), repeat=n):
            yield bits


def interior_ranges(ctx: WordContext, pattern) -> list:
    """Valid adapted-basis index ranges for the interior letters."""
    rng = []
    for i in range(len(pattern) - 1):
        if pattern[i + 1] == -pattern[i]:
            rng.append(range(ctx.dimB, ctx.dimA))
        else:
            rng.append(range(ctx.dimA))
    return rng


def reduced_basis_words(ctx: WordContext, max_len: int, end_sign: int | None = None):
    """All reduced basis words with trailing letter 1, as symbolic elements.

    Yields (pattern, element) with x_0 over the reference basis and
    interior letters over the adapted bases.
    """
    unit = ctx.inp.A.algebra.unit()
    for pattern in sign_patterns(max_len):
        if end_sign is not None and pattern[-1] != end_sign:
            continue
        for i0 in range(ctx.dimA):
            for interiors in iter_product(*interior_ranges(ctx, pattern)):
                tail = [(pattern[i], ctx.letter(pattern[i], interiors[i]))
                        for i in range(len(pattern) - 1)]
                tail.append((pattern[-1], unit))
                yield pattern, ctx.word(ctx.ref(i0), tail)
