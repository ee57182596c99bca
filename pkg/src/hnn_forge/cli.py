"""hnn-forge: build HNN-extension data and run the verification suites.

Usage:
    hnn-forge run --builtin z4-sigma2 [--L 2] [--suite fock --suite jv]
                  [--seed 7] [--out report.json] [--dim-cap N]
    hnn-forge run --config run.toml
    hnn-forge list

Suites (dependency order): construction, wordalg, oracle, haar, fock, jv,
homotopy.  The report is JSON; identical config and seed reproduce it
byte for byte once the volatile "timing" section is dropped.  Exit code 0
when every enabled check passes, 1 on check failures, 2 on config errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import britton, fock, jvkk, qgroup, wordalg
from .jvkk import CheckReport
from .starcore import TOL_ALG, TOL_GRAM, operator_norm
from .wordalg import (WordContext, comultiply, expect_A, expect_B, phi_m,
                      reduce_product, reduced_basis_words, star)

SUITES = ("construction", "wordalg", "oracle", "haar", "fock", "jv", "homotopy")


class ConfigError(ValueError):
    pass


class RunConfig:
    """Validated run configuration (builtin or explicit family)."""

    def __init__(self, family, L=None, suites=None, seed=1, dim_cap=fock.DEFAULT_DIM_CAP,
                 kind=None, group_file=None, subgroup_file=None,
                 tol_alg=TOL_ALG, tol_gram=TOL_GRAM, out=None):
        self.family = family
        self.L = L
        self.suites = list(suites) if suites else None
        self.seed = int(seed)
        self.dim_cap = int(os.environ.get("HNN_FORGE_DIM_CAP", dim_cap))
        self.kind = kind
        self.group_file = group_file
        self.subgroup_file = subgroup_file
        self.tol_alg = float(tol_alg)
        self.tol_gram = float(tol_gram)
        self.out = out
        if self.L is not None and int(self.L) < 1:
            raise ConfigError("L must be >= 1")
        if self.suites is not None:
            bad = set(self.suites) - set(SUITES)
            if bad:
                raise ConfigError(f"unknown suites: {sorted(bad)}")
            if not self.suites:
                raise ConfigError("suite list must be nonempty")
        for path in (self.group_file, self.subgroup_file):
            if path is not None and not os.path.exists(path):
                raise ConfigError(f"missing file: {path}")

    @staticmethod
    def from_toml(path) -> "RunConfig":
        if not os.path.exists(path):
            raise ConfigError(f"missing config file: {path}")
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
        tols = data.pop("tolerances", {})
        known = {"family", "L", "suites", "seed", "dim_cap", "kind",
                 "group_file", "subgroup_file", "out"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "family" not in data:
            raise ConfigError("config needs a 'family'")
        return RunConfig(tol_alg=tols.get("tol_alg", TOL_ALG),
                         tol_gram=tols.get("tol_gram", TOL_GRAM), **data)

    def resolve_family(self) -> qgroup.BuiltinFamily:
        if self.family == "explicit":
            if not (self.kind and self.group_file and self.subgroup_file):
                raise ConfigError("explicit family needs kind, group_file, subgroup_file")
            return qgroup.load_family_from_files(self.kind, self.group_file,
                                                 self.subgroup_file)
        try:
            return qgroup.make_builtin(self.family)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc

    def echo(self) -> dict:
        return {"family": self.family, "L": self.L, "suites": self.suites,
                "seed": self.seed, "dim_cap": self.dim_cap, "kind": self.kind,
                "group_file": self.group_file, "subgroup_file": self.subgroup_file,
                "tol_alg": self.tol_alg, "tol_gram": self.tol_gram}


# -- suites -------------------------------------------------------------------


def _suite_construction(fam, cfg, rng) -> CheckReport:
    rep = CheckReport()
    tol = cfg.tol_alg
    inp = fam.hnn
    for tag, qg in (("A", inp.A), ("B", inp.B)):
        rows = qg._invariance_rows()
        rep.add(f"{tag}: Haar state bi-invariance", np.linalg.norm(rows @ qg.haar_basis_values),
                tol)
        worst = max(abs(qg.mm[:, i, j] @ qg.counit - qg.counit[i] * qg.counit[j])
                    for i in range(qg.dim) for j in range(qg.dim))
        rep.add(f"{tag}: counit multiplicative", worst, tol)
    worst = 0.0
    for _ in range(200):
        a = inp.A.algebra.random(rng)
        worst = max(worst, abs(operator_norm(a.star() * a) - operator_norm(a) ** 2)
                    / max(operator_norm(a) ** 2, 1.0))
    rep.add("C*-identity on 200 random elements", worst, tol)

    for tag, exp in (("E+", inp.E_plus), ("E-", inp.E_minus)):
        proj = exp.projection
        rep.add(f"{tag}: idempotent", np.linalg.norm(proj @ proj - proj, 2), tol)
        unit = inp.A.algebra.unit()
        rep.add(f"{tag}: unital", (exp(unit) - unit).hs_norm(), tol)
        worst = 0.0
        for _ in range(20):
            a = inp.A.algebra.random(rng)
            worst = max(worst, abs(inp.A.haar(exp(a)) - inp.A.haar(a))
                        / max(1.0, a.hs_norm()))
        rep.add(f"{tag}: preserves the Haar state", worst, tol)
        worst = 0.0
        for b1 in exp.image_basis:
            for b2 in exp.image_basis:
                a = inp.A.algebra.random(rng)
                worst = max(worst, (exp(b1 * a * b2) - b1 * exp(a) * b2).hs_norm()
                            / max(a.hs_norm(), 1.0))
        rep.add(f"{tag}: bimodule property", worst, tol)
        worst = max((exp(e) - e).hs_norm() for e in exp.image_basis)
        rep.add(f"{tag}: identity on its range", worst, tol)

    for tag, emb in (("iota", inp.iota), ("theta", inp.theta)):
        img = np.column_stack([inp.A.coords(emb(b)) for b in inp.B.basis])
        worst = 0.0
        for k in range(inp.B.dim):
            lhs = np.einsum("ijk,k->ij", inp.A.comul, img[:, k])
            rhs = img @ inp.B.comul[:, :, k] @ img.T
            worst = max(worst, np.abs(lhs - rhs).max())
        rep.add(f"{tag}: intertwines comultiplications", worst, tol)
        worst = max(abs(inp.A.haar(emb(b)) - inp.B.haar(b)) for b in inp.B.basis)
        rep.add(f"{tag}: carries Haar to Haar", worst, tol)
    return rep


def _suite_wordalg(fam, cfg, rng) -> CheckReport:
    rep = CheckReport()
    tol = cfg.tol_alg
    inp = fam.hnn
    ctx = WordContext(inp)
    heavy = inp.dimA >= 6
    n_assoc = 25 if heavy else 100
    n_star = 50 if heavy else 100
    n_pos = 100 if heavy else 200
    rand_len = 1 if heavy else 2

    u, us = ctx.u_power(1), ctx.u_power(-1)
    one = ctx.one()
    rep.add("u u* = 1", (u * us).distance(one), tol)
    rep.add("u* u = 1", (us * u).distance(one), tol)
    worst = 0.0
    for b in inp.B.basis:
        lhs = u * ctx.from_algebra(inp.iota(b)) * us
        worst = max(worst, lhs.distance(ctx.from_algebra(inp.theta(b))))
    rep.add("symbolic u b u* = theta(b)", worst, tol)
    worst = max(abs(phi_m(_power(ctx, u, n))) for n in range(1, 5))
    rep.add("state vanishes on shift powers", worst, tol)

    # residuals of product laws are relative to the product's coefficient
    # scale; tolerances are calibrated for unit-normalized data
    worst = 0.0
    for _ in range(n_assoc):
        x, y, z = (ctx.random_element(rng, rand_len) for _ in range(3))
        lhs = (x * y) * z
        worst = max(worst, lhs.distance(x * (y * z)) / max(1.0, lhs.coeff_norm()))
    rep.add(f"associativity on {n_assoc} random triples", worst, tol)
    worst = 0.0
    for _ in range(n_star):
        x, y = ctx.random_element(rng, rand_len), ctx.random_element(rng, rand_len)
        lhs = star(x * y)
        worst = max(worst, lhs.distance(star(y) * star(x)) / max(1.0, lhs.coeff_norm()))
    rep.add(f"involution antihomomorphism on {n_star} pairs", worst, tol)
    worst = 0.0
    for _ in range(100):
        x = ctx.random_element(rng, rand_len)
        worst = max(worst, star(star(x)).distance(x))
    rep.add("involution is involutive on 100 elements", worst, tol)
    worst = 0.0
    for _ in range(n_pos):
        x = ctx.random_element(rng, rand_len)
        val = phi_m(star(x) * x)
        worst = max(worst, max(-val.real, abs(val.imag)))
    rep.add(f"state positivity on {n_pos} elements", worst, tol)

    worst1 = worst2 = 0.0
    count = 0
    for pattern, x in reduced_basis_words(ctx, fam.lemma_len):
        xs = star(x)
        ea = expect_A(xs * x)
        if pattern[-1] == -1:
            xu = x * u
            rhs = inp.theta(expect_B(star(xu) * xu))
            worst1 = max(worst1, (ea - rhs).hs_norm())
        else:
            rhs = inp.iota(expect_B(xs * x))
            worst2 = max(worst2, (ea - rhs).hs_norm())
        count += 1
    rep.add(f"isometry lemma, words ending in u* (of {count} length <= {fam.lemma_len})",
            worst1, tol)
    rep.add("isometry lemma, words ending in u", worst2, tol)
    return rep


def _power(ctx, x, n):
    out = ctx.one()
    for _ in range(n):
        out = out * x
    return out


def _suite_oracle(fam, cfg, rng) -> CheckReport:
    rep = CheckReport()
    if fam.oracle is None:
        rep.notes.append("oracle suite skipped: no classical group datum "
                         "for a function-algebra family")
        return rep
    ctx = WordContext(fam.hnn)
    data = fam.oracle
    worst = 0.0
    for _ in range(1000):
        gw = britton.random_word(data, rng, max_len=6)
        val = phi_m(ctx.group_word((gw.h0, gw.tail)))
        want = 1.0 if britton.oracle_values(gw, data)["is_identity"] else 0.0
        worst = max(worst, abs(val - want))
    rep.add("state agrees with the normal-form oracle on 1000 words", worst, 1e-9)

    worst = 0.0
    for _ in range(300):
        gw = britton.random_word(data, rng, max_len=5)
        sym = ctx.group_word((gw.h0, gw.tail))
        ov = britton.oracle_values(gw, data)
        ea = expect_A(sym)
        if ov["in_base"]:
            nf = britton.normal_form(gw, data)
            worst = max(worst, (ea - fam.hnn.A.basis_by_label(nf.h0)).hs_norm())
        else:
            worst = max(worst, ea.hs_norm())
    rep.add("base expectation matches oracle membership on 300 words", worst, 1e-9)

    bad = 0
    for _ in range(200):
        w = britton.random_word(data, rng)
        p = britton.multiply(w, w.inverse(data), data)
        bad += not (p.length == 0 and p.h0 == data.group.identity)
    rep.add("oracle group inverses on 200 words", float(bad), 0.0)
    bad = 0
    for _ in range(100):
        a, b, c = (britton.random_word(data, rng, 4) for _ in range(3))
        bad += britton.multiply(britton.multiply(a, b, data), c, data) != \
            britton.multiply(a, britton.multiply(b, c, data), data)
    rep.add("oracle associativity on 100 triples", float(bad), 0.0)
    return rep


def _raw_basis_words(ctx, max_len):
    """Raw words with every letter from the distinguished basis of A.

    These span every element of word length <= max_len, and their
    comultiplication expands sparsely.
    """
    from itertools import product as iter_product
    basis = ctx.inp.A.basis
    n = len(basis)
    for pattern in wordalg.sign_patterns(max_len):
        slots = [range(n)] * (len(pattern) + 1)
        for picks in iter_product(*slots):
            tail = [(pattern[i], basis[picks[i + 1]]) for i in range(len(pattern))]
            yield basis[picks[0]], tail


def _suite_haar(fam, cfg, rng) -> CheckReport:
    rep = CheckReport()
    tol = cfg.tol_alg
    ctx = WordContext(fam.hnn)
    one = ctx.one()

    u = ctx.u_power(1)
    unit = fam.hnn.A.algebra.unit()
    t = comultiply(u)
    expected = wordalg.SymbolicTensor(ctx, [(unit, ((1, unit),), unit, ((1, unit),))])
    rep.add("comultiplication is diagonal on the shift", t.distance(expected), tol)

    # residuals are measured through the vacuum embedding of a truncated
    # Fock space: the squared norm of z.vacuum is the canonical state of
    # z* z, and the words here have length <= 2
    f = fock.build_truncated_fock(fam.hnn, 2, cfg.dim_cap)

    def residual(z):
        return float(np.linalg.norm(f.vacuum_class(z)))

    worst = 0.0
    count = 0
    for a in fam.hnn.A.basis:
        x = ctx.from_algebra(a)
        t = comultiply(x)
        val = phi_m(x)
        worst = max(worst, residual(t.apply_phi_right() - val * one),
                    residual(t.apply_phi_left() - val * one))
        count += 1
    for x0, tail in _raw_basis_words(ctx, 2):
        t = wordalg.comultiply_raw(ctx, x0, tail)
        x = ctx.word(x0, tail)
        val = phi_m(x)
        worst = max(worst, residual(t.apply_phi_right() - val * one),
                    residual(t.apply_phi_left() - val * one))
        count += 1
    rep.add(f"state bi-invariance under comultiplication on {count} basis words",
            worst, tol)
    return rep


def _suite_fock(fam, cfg, rng) -> CheckReport:
    rep = CheckReport()
    tol, tolg = cfg.tol_alg, cfg.tol_gram
    inp = fam.hnn
    L = cfg.L or fam.default_L
    ctx = WordContext(inp)
    f = fock.build_truncated_fock(inp, L, cfg.dim_cap)
    rep.notes.append(f"fock dims at L={L}: {f.summand_dims()} (total {f.total_dim})")

    rep.add("vacuum vector has norm one", abs(np.linalg.norm(f.vacuum) - 1.0), tolg)
    rep.add("left action is unital",
            np.abs(f.pi(inp.A.algebra.unit()).matrix - np.eye(f.total_dim)).max(), tol)
    worst_m = worst_s = worst_n = 0.0
    for _ in range(50):
        a, b = inp.A.algebra.random(rng), inp.A.algebra.random(rng)
        scale = max(1.0, a.hs_norm() * b.hs_norm())
        worst_m = max(worst_m, np.linalg.norm(
            f.pi(a * b).matrix - f.pi(a).matrix @ f.pi(b).matrix, 2) / scale)
        worst_s = max(worst_s, np.linalg.norm(
            f.pi(a.star()).matrix - f.pi(a).matrix.conj().T, 2) / max(1.0, a.hs_norm()))
        worst_n = max(worst_n, np.linalg.norm(f.pi(a).matrix, 2) - operator_norm(a))
    rep.add("left action is multiplicative (50 pairs)", worst_m, tol)
    rep.add("left action preserves the involution", worst_s, tol)
    rep.add("left action is contractive", max(worst_n, 0.0), tol)

    u, us = f.u(1), f.u(-1)
    P1 = f.interior_projector(1)
    mask_name = f"summands of length <= {L - 1}"
    eye = np.eye(f.total_dim)
    rep.add("shift adjoint pairing on the interior",
            np.linalg.norm(P1 @ (u.matrix.conj().T - us.matrix), 2), tolg, mask_name)
    rep.add("shift is isometric on the interior",
            np.linalg.norm((us.matrix @ u.matrix - eye) @ P1, 2), tolg, mask_name)
    worst_p = worst_n = 0.0
    for b in inp.B.basis:
        lhs = u.matrix @ f.pi(inp.iota(b)).matrix @ us.matrix
        worst_p = max(worst_p, np.linalg.norm((lhs - f.pi(inp.theta(b)).matrix) @ P1, 2))
        lhs = us.matrix @ f.pi(inp.theta(b)).matrix @ u.matrix
        worst_n = max(worst_n, np.linalg.norm((lhs - f.pi(inp.iota(b)).matrix) @ P1, 2))
    rep.add("HNN relation for the shift", worst_p, 1e-9, mask_name)
    rep.add("HNN relation for the inverse shift", worst_n, 1e-9, mask_name)

    # the class of a reduced word is the matching simple tensor
    from itertools import product as iter_product
    unit = inp.A.algebra.unit()
    worst = 0.0
    count = 0
    for pattern in wordalg.sign_patterns(L):
        ranges = wordalg.interior_ranges(ctx, pattern)
        for i0 in range(ctx.dimA):
            for ints in iter_product(*ranges):
                legs = [ctx.ref(i0)] + [ctx.letter(pattern[i], ints[i])
                                        for i in range(len(pattern) - 1)] + [unit]
                tail = [(pattern[i], legs[1 + i]) for i in range(len(pattern) - 1)]
                tail.append((pattern[-1], unit))
                x = ctx.word(legs[0], tail)
                want = fock.simple_tensor_coords(f, pattern, legs)
                worst = max(worst, np.linalg.norm(f.vacuum_class(x) - want))
                count += 1
        if count >= 60:
            break
    rep.add(f"reduced words act on the vacuum as simple tensors ({count} words)",
            worst, tolg)

    worst = 0.0
    for _ in range(200):
        x = ctx.random_element(rng, L)
        v = f.vacuum_class(x)
        worst = max(worst, abs(np.linalg.norm(v) ** 2 - phi_m(star(x) * x).real))
    rep.add("vacuum expectation matches the canonical state (200 random)", worst, 1e-8)

    Q = f.vacuum_projector().matrix
    vac = f.index[fock.VACUUM]
    sl = slice(vac.offset, vac.offset + vac.dim)
    worst = 0.0
    for pattern, x in reduced_basis_words(ctx, L):
        m = (Q @ wordalg.fock_evaluate(x, f).matrix @ Q)[sl, sl]
        worst = max(worst, np.linalg.norm(m, 2))
    rep.add("vacuum compression kills reduced words", worst, tolg)
    worst = 0.0
    for _ in range(20):
        a = inp.A.algebra.random(rng)
        m = (Q @ f.pi(a).matrix @ Q)[sl, sl]
        want = vac.space.onb.conj().T @ vac.space.gram @ \
            np.column_stack([f._expand_in_leg(vac.legs[0], a * x) for x in vac.legs[0].span]) \
            @ vac.space.onb
        worst = max(worst, np.linalg.norm(m - want, 2) / max(1.0, a.hs_norm()))
    rep.add("vacuum compression of the left action is the GNS action", worst, tolg)
    return rep


def _suite_jv(fam, cfg, rng) -> CheckReport:
    rep = CheckReport()
    inp = fam.hnn
    L = cfg.L or fam.default_L
    ctx = WordContext(inp)
    H = jvkk.build_gns_trunc(ctx, "H", L)
    K = jvkk.build_gns_trunc(ctx, "K", L)
    rep.notes.append(f"H sectors at L={L}: {H.sector_dims()}; K sectors: {K.sector_dims()}")
    rep.add("H sectors are mutually orthogonal", H.cross_block_residual(rng), cfg.tol_gram)
    rep.add("K sectors are mutually orthogonal", K.cross_block_residual(rng), cfg.tol_gram)

    worst = 0.0
    for a in inp.A.basis:
        m, _ = H.represent(ctx.from_algebra(a))
        worst = max(worst, np.linalg.norm(m @ H.cyclic - inp.counit_A(a) * H.cyclic))
    rep.add("base algebra acts by the counit on the H cyclic class", worst, cfg.tol_gram)
    worst = 0.0
    for b in inp.B.basis:
        m, _ = K.represent(ctx.from_algebra(inp.iota(b)))
        worst = max(worst, np.linalg.norm(
            m @ K.cyclic - inp.counit_A(inp.iota(b)) * K.cyclic))
    rep.add("subalgebra acts by the counit on the K cyclic class", worst, cfg.tol_gram)

    jv = jvkk.build_jv(H, K)
    rep.add("Julg-Valette partial isometry: F F* = 1",
            np.linalg.norm(jv.script_F @ jv.script_F.conj().T - np.eye(K.dim), 2), 1e-8)
    rep.add("Julg-Valette partial isometry: F* F = 1 - p",
            np.linalg.norm(jv.script_F.conj().T @ jv.script_F
                           - (np.eye(H.dim) - jv.p), 2), 1e-8)
    cross = np.linalg.norm(K.sector_projector("K+1") @ jv.F @ H.sector_projector("H-1"), 2) \
        + np.linalg.norm(K.sector_projector("K-1") @ jv.F @ H.sector_projector("H+1"), 2)
    rep.add("F respects the sector grading", cross, cfg.tol_gram)

    rep.extend(jvkk.verify_commutators(jv, tol_comm=1e-9))
    rep.extend(jvkk.verify_augmented(jv, tol=cfg.tol_gram))
    return rep


def _suite_homotopy(fam, cfg, rng) -> CheckReport:
    inp = fam.hnn
    L = cfg.L or fam.default_L
    ctx = WordContext(inp)
    H = jvkk.build_gns_trunc(ctx, "H", L)
    K = jvkk.build_gns_trunc(ctx, "K", L)
    jv = jvkk.build_jv(H, K)
    _, rep = jvkk.homotopy(jv, samples=(0.0, 0.25, 0.5, 0.75, 1.0),
                           tol=1e-8, tol_end=1e-10, seed=cfg.seed)
    return rep


_SUITE_FUNCS = {"construction": _suite_construction, "wordalg": _suite_wordalg,
                "oracle": _suite_oracle, "haar": _suite_haar, "fock": _suite_fock,
                "jv": _suite_jv, "homotopy": _suite_homotopy}


def run(cfg: RunConfig) -> dict:
    """Run the enabled suites in dependency order and build the report."""
    fam = cfg.resolve_family()
    suites = cfg.suites
    if suites is None:
        suites = [s for s in SUITES if s != "homotopy" or fam.homotopy]
    suites = [s for s in SUITES if s in suites]

    report = {"config": cfg.echo(), "family_description": fam.description,
              "suites": {}, "timing": {}}
    overall = True
    for name in suites:
        rng = np.random.default_rng(cfg.seed + 1000 * SUITES.index(name))
        t0 = time.time()
        suite_rep = _SUITE_FUNCS[name](fam, cfg, rng)
        report["timing"][name] = round(time.time() - t0, 3)
        report["suites"][name] = {"checks": [c.as_dict() for c in suite_rep.checks],
                                  "notes": suite_rep.notes,
                                  "pass": suite_rep.passed}
        overall = overall and suite_rep.passed
    report["overall_pass"] = overall
    return report


def canonical_report_bytes(report: dict) -> bytes:
    """The deterministic part of a report (timing stripped), serialized."""
    trimmed = {k: v for k, v in report.items() if k != "timing"}
    return json.dumps(trimmed, indent=2, sort_keys=True).encode()


def list_builtins() -> list:
    out = []
    for name in qgroup.builtin_names():
        fam = qgroup.make_builtin(name)
        inp = fam.hnn
        da, db = inp.dimA, inp.dimB
        fock_l1 = da + 2 * (da * da) // db
        out.append({"name": name, "description": fam.description,
                    "dim_A": da, "dim_B": db, "fock_dim_L1": fock_l1,
                    "default_L": fam.default_L,
                    "default_suites": [s for s in SUITES
                                       if s != "homotopy" or fam.homotopy]})
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="hnn-forge", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run verification suites")
    runp.add_argument("--config", help="TOML config file")
    runp.add_argument("--builtin", help="builtin family name")
    runp.add_argument("--L", type=int, default=None)
    runp.add_argument("--suite", action="append", dest="suites",
                      help="suite name (repeatable); default: all applicable")
    runp.add_argument("--seed", type=int, default=1)
    runp.add_argument("--out", help="write the JSON report here")
    runp.add_argument("--dim-cap", type=int, default=fock.DEFAULT_DIM_CAP)
    sub.add_parser("list", help="list builtin families")
    args = parser.parse_args(argv)

    if args.command == "list":
        for item in list_builtins():
            print(f"{item['name']:12s} dim A = {item['dim_A']:2d}  dim B = {item['dim_B']:2d}  "
                  f"fock dim at L=1 = {item['fock_dim_L1']:3d}  "
                  f"default L = {item['default_L']}  ({item['description']})")
        return 0

    try:
        if args.config:
            cfg = RunConfig.from_toml(args.config)
        elif args.builtin:
            cfg = RunConfig(args.builtin, L=args.L, suites=args.suites,
                            seed=args.seed, dim_cap=args.dim_cap, out=args.out)
        else:
            raise ConfigError("run needs --config or --builtin")
        if args.out:
            cfg.out = args.out
        report = run(cfg)
    except (ConfigError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    for name, suite in report["suites"].items():
        status = "PASS" if suite["pass"] else "FAIL"
        print(f"[{status}] suite {name} ({len(suite['checks'])} checks, "
              f"{report['timing'][name]}s)")
        for c in suite["checks"]:
            if not c["pass"]:
                print(f"    FAIL {c['name']}: residual {c['residual']:.3g} "
                      f"> {c['threshold']:.3g} on {c['mask']}")
    print(f"overall: {'PASS' if report['overall_pass'] else 'FAIL'}")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(json.dumps(report, indent=2, sort_keys=True))
        print(f"report written to {cfg.out}")
    return 0 if report["overall_pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
