"""Registry of property checks.

Each check draws its random symbols and points from a generator seeded by
the global seed and the check id, evaluates a limit statement or an exact
identity, and records the numbers it compared.  A check that fails always
leaves the offending values in ``failures``.
"""

from __future__ import annotations

import math
import os
import time
import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .. import berezin as bz
from .. import gallery as gal
from ..boxes import TruncationBox
from ..fourier_symbols import (FourierSymbol, SignPattern, project_block, random_symbol, symbol_conj,
                               symbol_eval, symbol_mul)
from ..hardy_operators import (adjoint, compose, semicommutator, semicommutator_via_hankel, toeplitz)
from ..polydisc_kernels import PolydiscPoint, TorusPoint, poisson_extend
from .config import HarnessConfig


class CheckTimeout(RuntimeError):
    pass


@dataclass(frozen=True)
class CheckSpec:
    id: str
    topic: str
    statement: str
    func: Callable = field(repr=False)
    tags: tuple[str, ...] = ()
    params: dict = field(default_factory=dict)


class CheckContext:
    def __init__(self, spec: CheckSpec, config: HarnessConfig, deadline: float | None = None):
        self.spec = spec
        self.config = config
        self.params = dict(spec.params)
        self.rng = np.random.default_rng([int(config.seed), zlib.crc32(spec.id.encode())])
        self.deadline = deadline if deadline is not None else time.monotonic() + config.wall_time
        self.measured: dict = {}
        self.tolerances: dict = {}
        self.failures: list[dict] = []
        self.artifacts: list[str] = []
        self.counts = {"checked": 0}

    # -------------------------------------------------------------- bookkeeping
    def tol(self, name: str) -> float:
        v = self.config.tolerance(name, self.spec.id)
        self.tolerances[name] = v
        return v

    def expect(self, ok: bool, what: str, **numbers) -> bool:
        self.counts["checked"] += 1
        if not ok:
            self.failures.append({"what": what, **numbers})
        return bool(ok)

    def record(self, key: str, value):
        self.measured[key] = value

    def record_max(self, key: str, value: float):
        self.measured[key] = max(float(value), float(self.measured.get(key, -math.inf)))

    def checkpoint(self):
        if time.monotonic() > self.deadline:
            raise CheckTimeout(f"wall-time ceiling {self.config.wall_time}s exceeded")

    # -------------------------------------------------------------- random draws
    def zeta(self, n: int) -> TorusPoint:
        return TorusPoint(tuple(self.rng.uniform(0, 2 * math.pi, n)))

    def point(self, n: int, rmax: float) -> PolydiscPoint:
        r = rmax * np.sqrt(self.rng.uniform(0, 1, n))
        th = self.rng.uniform(0, 2 * math.pi, n)
        return PolydiscPoint(tuple(r * np.exp(1j * th)))

    def symbol(self, n: int, degree: int, nterms: int = 4, analytic: bool = False) -> FourierSymbol:
        return random_symbol(self.rng, n, degree, nterms=nterms, analytic=analytic)

    @property
    def radii(self):
        return self.config.radii

    @property
    def eps(self) -> float:
        return self.config.eps

    def profile(self, f, zeta, label="", model="poly2"):
        self.checkpoint()
        prof = bz.radial_profile(f, zeta, self.radii, label=label)
        if prof.notes:
            self.failures.append({"what": "profile evaluation failed", "label": label, "notes": prof.notes[:3]})
        return prof, bz.extrapolate_boundary(prof, model)

    def save_profile(self, name: str, prof, est):
        out = self.config.out_dir
        if not out:
            return
        d = os.path.join(out, self.spec.id)
        os.makedirs(d, exist_ok=True)
        base = os.path.join(d, name)
        bz.write_profile_csv(prof, base + ".csv")
        bz.write_profile_json(prof, base + ".json", est)
        bz.write_profile_svg(prof, base + ".svg", est)
        self.artifacts += [base + ".csv", base + ".json", base + ".svg"]


def _c(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _dims(ctx: CheckContext, i: int) -> int:
    return 1 + i % ctx.params.get("max_n", 2)


# ------------------------------------------------------------------ checks
def check_poisson_radial_limit(ctx: CheckContext):
    tol = ctx.tol("limit")
    for i in range(ctx.params["symbols"]):
        n = _dims(ctx, i)
        phi = ctx.symbol(n, ctx.params["degree"])
        rate = sum(abs(c) * sum(abs(kj) for kj in k) for k, c in phi.terms)
        for _ in range(ctx.params["zetas"]):
            z = ctx.zeta(n)
            target = symbol_eval(phi, z)
            prof, est = ctx.profile(lambda xi: poisson_extend(phi, xi), z, "poisson extension")
            gaps = np.abs(prof.values - target)
            bound = rate * (1 - prof.radii) + 1e-13
            ctx.expect(bool(np.all(gaps <= bound)), "O(1-r) boundary approach violated",
                       gaps=gaps.tolist(), bounds=bound.tolist())
            err = abs(est.limit - target)
            ctx.record_max("max_limit_error", err)
            ctx.expect(err <= tol, "extrapolated Poisson extension misses boundary value",
                       limit=_c(est.limit), target=_c(target), error=err)
    ctx.save_profile("poisson", prof, est)


def check_pairing_poisson(ctx: CheckContext):
    tol = ctx.tol("limit")
    for i in range(ctx.params["pairs"]):
        n = _dims(ctx, i)
        f, g = ctx.symbol(n, 2), ctx.symbol(n, 2)
        fg = symbol_mul(f, symbol_conj(g))
        for _ in range(ctx.params["points"]):
            xi = ctx.point(n, 0.95)
            val, bound = bz.pairing(f, g, xi, ctx.eps)
            gap = abs(val - poisson_extend(fg, xi))
            ctx.record_max("max_gap_over_bound", gap / bound if bound else gap)
            ctx.expect(gap <= bound, "pairing differs from Poisson extension beyond its bound",
                       gap=gap, bound=bound)
        z = ctx.zeta(n)
        prof, est = ctx.profile(lambda xi: bz.pairing(f, g, xi, ctx.eps), z, "<f k, g k>")
        target = symbol_eval(f, z) * np.conj(symbol_eval(g, z))
        err = abs(est.limit - target)
        ctx.record_max("max_limit_error", err)
        ctx.expect(err <= tol, "pairing limit misses f(zeta) conj g(zeta)",
                   limit=_c(est.limit), target=_c(target), error=err)
    ctx.save_profile("pairing", prof, est)


def check_berezin_toeplitz(ctx: CheckContext):
    tol = ctx.tol("limit")
    worst = 0.0
    for i in range(ctx.params["pairs"]):
        ctx.checkpoint()
        n = _dims(ctx, i)
        phi = ctx.symbol(n, ctx.params["degree"])
        xi = ctx.point(n, 0.999)
        op = toeplitz(phi, TruncationBox.cube(2, n))
        val, bound = bz.berezin_matrix(op, xi, ctx.eps)
        gap = abs(val - bz.berezin_toeplitz_closed(phi, xi))
        worst = max(worst, gap / bound)
        ctx.expect(gap <= bound, "matrix Berezin outside its own error bound",
                   gap=gap, bound=bound, point=[_c(c) for c in xi.coords])
    ctx.record("max_gap_over_bound", worst)
    for _ in range(ctx.params["zetas"]):
        n = 2
        phi = ctx.symbol(n, ctx.params["degree"])
        z = ctx.zeta(n)
        op = toeplitz(phi, TruncationBox.cube(2, n))
        prof, est = ctx.profile(lambda xi: bz.berezin_matrix(op, xi, ctx.eps), z, op.label)
        _, est_closed = ctx.profile(lambda xi: bz.berezin_toeplitz_closed(phi, xi), z, "closed")
        target = symbol_eval(phi, z)
        err = max(abs(est.limit - target), abs(est.limit - est_closed.limit))
        ctx.record_max("max_limit_error", err)
        ctx.expect(err <= tol, "Berezin limit differs from symbol value",
                   limit=_c(est.limit), closed=_c(est_closed.limit), target=_c(target))
    ctx.save_profile("berezin_toeplitz", prof, est)


def check_disk_projection(ctx: CheckContext):
    tol = ctx.tol("exact")
    # truncate finely enough that sqrt(tail) sits well below the tolerance
    eps = min(ctx.eps, (tol / 100) ** 2)
    for _ in range(ctx.params["symbols"]):
        x = FourierSymbol.from_dict({(-int(k),): complex(*ctx.rng.normal(size=2)) / 2
                                     for k in ctx.rng.choice(np.arange(1, 4), size=2, replace=False)}, 1)
        for _ in range(ctx.params["points"]):
            xi = ctx.point(1, 0.999)
            res, bound = bz.disk_projection_residual(x, xi, eps)
            ctx.record_max("max_residual", res)
            ctx.expect(res <= bound and res <= tol, "P(x k) differs from x~ k beyond the truncation bound",
                       residual=res, bound=bound)


def _orthant_monomial(ctx: CheckContext, n: int, alpha: SignPattern) -> FourierSymbol:
    k = []
    for a in alpha.entries:
        m = int(ctx.rng.integers(0, 3))
        k.append(m if a > 0 else -1 - m)
    c = complex(*ctx.rng.normal(size=2))
    return FourierSymbol.monomial(tuple(k), c / abs(c))


def check_projected_pairing(ctx: CheckContext):
    tol = ctx.tol("limit")
    for i in range(ctx.params["pairs"]):
        n = _dims(ctx, i)
        pats = SignPattern.all_patterns(n)
        alpha = pats[int(ctx.rng.integers(len(pats)))]
        beta = pats[int(ctx.rng.integers(len(pats)))]
        f, g = _orthant_monomial(ctx, n, alpha), _orthant_monomial(ctx, n, beta)
        z = ctx.zeta(n)
        prof, est = ctx.profile(lambda xi: bz.projected_pairing(f, g, xi, ctx.eps), z, "<P f k, P g k>")
        target = symbol_eval(f, z) * np.conj(symbol_eval(g, z))
        err = abs(est.limit - target)
        ctx.record_max("max_limit_error", err)
        ctx.expect(err <= tol, "projected pairing limit misses f conj g",
                   alpha=list(alpha.entries), beta=list(beta.entries), limit=_c(est.limit),
                   target=_c(target), uncertainty=est.uncertainty)
    ctx.save_profile("projected_pairing", prof, est)


def check_l2_pairing(ctx: CheckContext):
    tol = ctx.tol("limit")
    for i in range(ctx.params["pairs"]):
        n = _dims(ctx, i)
        f, g = ctx.symbol(n, 2, nterms=6), ctx.symbol(n, 2, nterms=6)
        blocks = sum(1 for a in SignPattern.all_patterns(n) if not project_block(f, a).is_zero())
        ctx.record_max("max_blocks_used", blocks)
        z = ctx.zeta(n)
        prof, est = ctx.profile(lambda xi: bz.projected_pairing(f, g, xi, ctx.eps), z, "<P f k, P g k>")
        target = symbol_eval(f, z) * np.conj(symbol_eval(g, z))
        err = abs(est.limit - target)
        ctx.record_max("max_limit_error", err)
        ctx.expect(err <= tol, "L2 projected pairing limit misses f conj g",
                   limit=_c(est.limit), target=_c(target), uncertainty=est.uncertainty)
    ctx.save_profile("l2_pairing", prof, est)


def check_hankel_decay(ctx: CheckContext):
    tol = ctx.tol("exact")
    analytic = ctx.symbol(2, 2, analytic=True)
    d, v = bz.hankel_kernel_norm(analytic, ctx.point(2, 0.9))
    ctx.expect(d == 0 and v == 0, "Hankel of analytic symbol does not vanish", direct=d, identity=v)
    for i in range(ctx.params["symbols"]):
        n = _dims(ctx, i)
        phi = ctx.symbol(n, 2)
        for _ in range(ctx.params["points"]):
            ctx.checkpoint()
            xi = ctx.point(n, 0.95)
            d, v = bz.hankel_kernel_norm(phi, xi)
            ctx.record_max("max_route_gap", abs(d - v))
            ctx.expect(abs(d - v) <= tol, "direct and identity Hankel norms disagree", direct=d, identity=v)
        z = ctx.zeta(n)
        prof, est = ctx.profile(lambda xi: bz.hankel_kernel_norm(phi, xi)[0], z, "||H k||", model="auto")
        ctx.record_max("max_abs_limit", abs(est.limit))
        ctx.expect(abs(est.limit) <= est.uncertainty, "||H_phi k_xi|| does not extrapolate to 0",
                   limit=_c(est.limit), uncertainty=est.uncertainty, model=est.model)
    ctx.save_profile("hankel", prof, est)


def _decays(ctx: CheckContext, est, what: str, cap: float | None = None, **extra) -> bool:
    ok = abs(est.limit) <= est.uncertainty and (cap is None or est.uncertainty <= cap)
    ctx.record_max("max_abs_limit", abs(est.limit))
    ctx.record_max("max_uncertainty", est.uncertainty)
    return ctx.expect(ok, what, limit=_c(est.limit), uncertainty=est.uncertainty, cap=cap, **extra)


def check_semicommutator_ideal(ctx: CheckContext):
    cap = ctx.tol("limit")
    for i in range(ctx.params["pairs"]):
        n = _dims(ctx, i)
        phi, psi = ctx.symbol(n, 2), ctx.symbol(n, 2)
        op = semicommutator(phi, psi, TruncationBox.cube(4, n))
        prof, est = ctx.profile(lambda xi: bz.berezin_matrix(op, xi, ctx.eps), ctx.zeta(n), op.label)
        _decays(ctx, est, "semicommutator Berezin does not vanish radially", cap)
    for i in range(ctx.params["triples"]):
        n = _dims(ctx, i)
        w, u, v = ctx.symbol(n, 2), ctx.symbol(n, 2), ctx.symbol(n, 2)
        box = TruncationBox.cube(4, n)
        op = compose(toeplitz(w, box), semicommutator(u, v, box))
        prof, est = ctx.profile(lambda xi: bz.berezin_matrix(op, xi, ctx.eps), ctx.zeta(n), op.label)
        _decays(ctx, est, "T_w [T_u, T_v) Berezin does not vanish radially", cap)
    ctx.save_profile("semicommutator", prof, est)
    algebra = ctx.tol("algebra")
    for n in (1, 2, 3):
        phi, psi = ctx.symbol(n, 2), ctx.symbol(n, 2)
        box = TruncationBox.cube(ctx.params["route_M"], n)
        gap = _exact_window_gap(phi, psi, box)
        ctx.record_max("max_two_route_gap", gap)
        ctx.expect(gap <= algebra, "semicommutator differs from H*H on the exact window", n=n, gap=gap)


def _exact_window_gap(phi, psi, box) -> float:
    s = semicommutator(phi, psi, box)
    w = s.window_dims()
    cols = [box.flat_index(k) for k in box if all(kj <= m for kj, m in zip(k, w))]
    if not cols:
        return 0.0
    return float(np.abs(s.matrix[:, cols] - semicommutator_via_hankel(phi, psi, box)[:, cols]).max())


def check_symbol_map(ctx: CheckContext):
    tol = ctx.tol("limit")
    for i in range(ctx.params["symbols"]):
        n = _dims(ctx, i)
        phi = ctx.symbol(n, ctx.params["degree"])
        op = toeplitz(phi, TruncationBox.cube(3, n))
        zetas = [ctx.zeta(n) for _ in range(ctx.params["zetas"])]
        ctx.checkpoint()
        for z, est in bz.recover_symbol(op, zetas, ctx.radii, ctx.eps):
            err = abs(est.limit - symbol_eval(phi, z))
            ctx.record_max("max_recovery_error", err)
            ctx.expect(err <= tol, "recovered symbol differs from phi(zeta)",
                       limit=_c(est.limit), target=_c(symbol_eval(phi, z)), error=err)
    for _ in range(ctx.params["products"]):
        n = 2
        p, q = ctx.symbol(n, 2), ctx.symbol(n, 2)
        box = TruncationBox.cube(3, n)
        tp, tq = toeplitz(p, box), toeplitz(q, box)
        zetas = [ctx.zeta(n) for _ in range(2)]
        ctx.checkpoint()
        sp_ = bz.recover_symbol(tp, zetas, ctx.radii, ctx.eps)
        sq = bz.recover_symbol(tq, zetas, ctx.radii, ctx.eps)
        spq = bz.recover_symbol(compose(tp, tq), zetas, ctx.radii, ctx.eps)
        for (z, a), (_, b), (_, c) in zip(sp_, sq, spq):
            err = abs(c.limit - a.limit * b.limit)
            ctx.record_max("max_multiplicativity_error", err)
            ctx.expect(err <= tol, "Sigma(T1 T2) != Sigma(T1) Sigma(T2)",
                       product=_c(c.limit), factors=[_c(a.limit), _c(b.limit)])


def check_self_commutator(ctx: CheckContext):
    cap = ctx.tol("limit")
    for i in range(ctx.params["symbols"]):
        n = _dims(ctx, i)
        phi = ctx.symbol(n, 2)
        t = toeplitz(phi, TruncationBox.cube(3, n))
        op = gal.self_commutator(t)
        prof, est = ctx.profile(lambda xi: bz.berezin_matrix(op, xi, ctx.eps), ctx.zeta(n), op.label)
        _decays(ctx, est, "Toeplitz self-commutator Berezin does not vanish", cap)
    ctx.save_profile("toeplitz_self_commutator", prof, est)


def check_lacunary_commutator(ctx: CheckContext):
    tol = ctx.tol("limit")
    box = TruncationBox((15,))
    t = gal.lacunary_isometry(box)
    w = t.window_dims()[0]
    m = t.matrix
    ctx.expect(np.allclose((m.conj().T @ m)[: w + 1, : w + 1], np.eye(w + 1)), "T*T != I on the window")
    odd = np.diag([float(k % 2 == 1) for k in range(16)])
    ctx.expect(np.allclose(m @ m.conj().T, odd), "TT* is not the odd-index projection")
    op = gal.lacunary_commutator(box)
    for z in (TorusPoint((0.0,)), ctx.zeta(1)):
        prof, est = ctx.profile(lambda xi: bz.berezin_matrix(op, xi, ctx.eps), z, "[T*,T]")
        closed = np.array([gal.lacunary_commutator_berezin(r) for r in prof.radii])
        gaps = np.abs(prof.values - closed)
        ctx.record_max("max_gap_over_bound", float(np.max(gaps / prof.error_bounds)))
        ctx.expect(bool(np.all(gaps <= prof.error_bounds)), "matrix route misses 1/(1+r^2)",
                   gaps=gaps.tolist(), bounds=prof.error_bounds.tolist())
        err = abs(est.limit - 0.5)
        ctx.record("limit", _c(est.limit))
        ctx.record("uncertainty", est.uncertainty)
        ctx.expect(err <= tol, "lacunary commutator limit is not 1/2", limit=_c(est.limit), error=err)
    ctx.save_profile("lacunary_commutator", prof, est)


def check_tensor_commutator(ctx: CheckContext):
    tol = ctx.tol("exact")
    for n in (2, 3):
        op = gal.tensor_commutator(TruncationBox.cube(3, n))
        lower = gal.tensor_commutator_lower_bound(n)
        vmin = math.inf
        for _ in range(ctx.params["points"]):
            ctx.checkpoint()
            xi = ctx.point(n, 0.99)
            val, bound = bz.berezin_matrix(op, xi, ctx.eps)
            vmin = min(vmin, val.real)
            ctx.expect(val.real + bound >= lower, "Berezin of [S*,S] below 2^-n", n=n, value=_c(val), bound=bound)
            gap = abs(val - gal.tensor_commutator_berezin(xi))
            ctx.expect(gap <= bound, "closed form outside matrix error bound", n=n, gap=gap, bound=bound)
        ctx.record(f"min_value_n{n}", vmin)
        proj = gal.some_even_projection(TruncationBox.cube(3, n))
        for _ in range(ctx.params["oracle_points"]):
            ctx.checkpoint()
            xi = ctx.point(n, 0.9)
            oracle, _ = bz.berezin_matrix(proj, xi, 1e-9)
            gap = abs(oracle - gal.tensor_commutator_berezin(xi))
            ctx.record_max(f"max_oracle_gap_n{n}", gap)
            ctx.expect(gap <= tol, "closed form differs from projection oracle", n=n, gap=gap)


def check_approximate_eigenfunction(ctx: CheckContext):
    for i in range(ctx.params["symbols"]):
        n = _dims(ctx, i)
        phi = ctx.symbol(n, 2)
        for _ in range(ctx.params["zetas"]):
            prof, est = ctx.profile(lambda xi: bz.eigen_residual(phi, xi, ctx.eps), ctx.zeta(n),
                                    "||T k - phi~ k||", model="auto")
            _decays(ctx, est, "||T_phi k - phi~ k|| does not extrapolate to 0", model=est.model)
    ctx.save_profile("eigen_residual", prof, est)


def _verdict(ctx, op, psi, n, zetas):
    ctx.checkpoint()
    return bz.membership_diagnostic(op, psi, [ctx.zeta(n) for _ in range(zetas)], ctx.radii, ctx.eps)


def check_toeplitz_stability(ctx: CheckContext):
    one = FourierSymbol.constant(1.0, 1)
    P = gal.dyadic_projection(TruncationBox((8,)))
    for _ in range(ctx.params["symbols"]):
        phi = ctx.symbol(1, 2)
        tp = toeplitz(phi, P.box)
        for name, op in (("T_phi P", compose(tp, P)), ("P T_phi", compose(P, tp))):
            rep = _verdict(ctx, op, one, 1, ctx.params["zetas"])
            ests = [e.forward_estimate for e in rep.entries] + [e.backward_estimate for e in rep.entries]
            ctx.record_max("max_abs_limit", max(abs(e.limit) for e in ests))
            ctx.expect(rep.consistent, f"{name} fails the membership diagnostic",
                       limits=[_c(e.limit) for e in ests], uncertainties=[e.uncertainty for e in ests])
    ctx.expect(not _verdict(ctx, toeplitz(one, P.box), one, 1, 1).consistent,
               "identity passes the membership diagnostic")


def check_zero_symbol_toeplitz(ctx: CheckContext):
    one = FourierSymbol.constant(1.0, 1)
    box = TruncationBox((4,))
    zero = FourierSymbol.from_dict({}, 1)
    ctx.expect(_verdict(ctx, toeplitz(zero, box), one, 1, 1).consistent, "T_0 fails the diagnostic")
    for _ in range(ctx.params["symbols"]):
        phi = ctx.symbol(1, 2)
        rep = _verdict(ctx, toeplitz(phi, box), one, 1, ctx.params["zetas"])
        limits = [abs(e.forward_estimate.limit) for e in rep.entries]
        ctx.record_max("min_nonzero_limit", -min(limits))
        ctx.expect(not rep.consistent, "nonzero-symbol Toeplitz passes the diagnostic", limits=limits)
    if "min_nonzero_limit" in ctx.measured:
        ctx.measured["min_nonzero_limit"] = -ctx.measured["min_nonzero_limit"]


def check_dyadic_decay(ctx: CheckContext):
    tol = ctx.tol("dyadic_limit")
    exact = ctx.tol("exact")
    P = gal.dyadic_projection(TruncationBox((8,)))
    for _ in range(ctx.params["points"]):
        xi = ctx.point(1, 0.999)
        op = P.fitted(xi, 1e-12)
        val, bound = bz.berezin_matrix(op, xi, 1e-12)
        partial, tail = gal.dyadic_kernel_norm_sq(xi, op.box.dims[0])
        gap = abs(val - partial)
        ctx.record_max("max_partial_sum_gap", gap)
        ctx.expect(gap <= max(bound, exact) and tail <= 1e-12, "partial-sum formula mismatch", gap=gap)
    # T_z P - P T_z sends z^{2^m} to a unit vector
    box = TruncationBox((64,))
    Pm = gal.dyadic_projection(box)
    tz = toeplitz(FourierSymbol.monomial((1,)), box)
    comm = (compose(tz, Pm) - compose(Pm, tz)).matrix
    norms = [float(np.linalg.norm(comm[:, 2 ** m])) for m in range(1, 6)]
    ctx.record("commutator_column_norms", norms)
    ctx.expect(np.allclose(norms, 1.0), "(T_z P - P T_z) z^(2^m) is not a unit vector", norms=norms)
    z = ctx.zeta(1)
    prof, est = ctx.profile(lambda xi: bz.kernel_image_norm(P, xi, ctx.eps), z, "||P k||", model="sqrt-tlog")
    ctx.record("limit", _c(est.limit))
    ctx.record("uncertainty", est.uncertainty)
    ctx.expect(abs(est.limit) <= tol, "||P k|| does not extrapolate to 0", limit=_c(est.limit), tol=tol)
    ctx.save_profile("dyadic", prof, est)
    A = gal.tensor_with_identity(P, 2, 1, TruncationBox((8, 3)))
    for _ in range(3):
        xi = ctx.point(2, 0.99)
        a, _ = bz.kernel_image_norm(A, xi, 1e-12)
        b, _ = bz.kernel_image_norm(P, PolydiscPoint((xi.coords[0],)), 1e-12)
        ctx.expect(abs(a - b) <= 1e-6, "||A k_xi|| != ||P k_xi1||", tensor=a, single=b)
    rep = bz.membership_diagnostic(A, FourierSymbol.constant(1.0, 2), [ctx.zeta(2)], ctx.radii, ctx.eps,
                                   model="sqrt-tlog")
    ctx.expect(rep.consistent, "P (x) I fails the membership diagnostic")


# ------------------------------------------------------------------ registry
_SPECS = [
    CheckSpec("poisson-radial-limit", "poisson radial limit",
              "harmonic extension of a trigonometric symbol converges to its boundary values at rate O(1-r)",
              check_poisson_radial_limit, ("kernels", "limit"), {"symbols": 6, "zetas": 3, "degree": 3}),
    CheckSpec("pairing-poisson", "kernel pairing equals Poisson extension",
              "<f k_xi, g k_xi> equals the Poisson extension of f conj g and tends to f conj g",
              check_pairing_poisson, ("kernels", "limit"), {"pairs": 4, "points": 5}),
    CheckSpec("berezin-toeplitz", "Berezin transform of Toeplitz operator",
              "the Berezin transform of T_phi equals the harmonic extension of phi",
              check_berezin_toeplitz, ("berezin", "limit"), {"pairs": 50, "zetas": 8, "degree": 3}),
    CheckSpec("disk-projection", "disk projection identity",
              "P(x k_xi) = x~(xi) k_xi for co-analytic x on the disc",
              check_disk_projection, ("kernels", "exact"), {"symbols": 6, "points": 5}),
    CheckSpec("projected-pairing", "projected pairing limit on orthant blocks",
              "<P(f k_xi), P(g k_xi)> tends to f conj g for f, g in single sign-pattern blocks",
              check_projected_pairing, ("berezin", "limit"), {"pairs": 8}),
    CheckSpec("l2-pairing", "projected pairing limit for general symbols",
              "<P(f k_xi), P(g k_xi)> tends to f conj g for symbols spread over all blocks",
              check_l2_pairing, ("berezin", "limit"), {"pairs": 4}),
    CheckSpec("hankel-decay", "Hankel kernel decay and identity",
              "||H_phi k_xi||^2 = |y|^2~ - ||P(y k_xi)||^2 and ||H_phi k_xi|| tends to 0",
              check_hankel_decay, ("hankel", "limit", "exact"), {"symbols": 4, "points": 4}),
    CheckSpec("semicommutator-ideal", "semicommutator ideal vanishes radially",
              "Berezin transforms of semicommutators and of T_w [T_u, T_v) tend to 0; "
              "the semicommutator equals H*H on exact windows",
              check_semicommutator_ideal, ("ideal", "limit", "algebra"), {"pairs": 4, "triples": 4, "route_M": 6}),
    CheckSpec("symbol-map", "symbol map round trip",
              "radial Berezin limits recover phi from T_phi and are multiplicative on products",
              check_symbol_map, ("symbol-map", "limit"), {"symbols": 10, "zetas": 8, "degree": 3, "products": 2}),
    CheckSpec("self-commutator", "Toeplitz self-commutator vanishes radially",
              "the Berezin transform of [T_phi*, T_phi] tends to 0",
              check_self_commutator, ("ideal", "limit", "separation"), {"symbols": 4}),
    CheckSpec("lacunary-commutator", "lacunary isometry counterexample",
              "for T z^k = z^(2k+1) the Berezin transform of [T*, T] is 1/(1+|xi|^2), tending to 1/2",
              check_lacunary_commutator, ("gallery", "limit", "separation")),
    CheckSpec("tensor-commutator", "tensor power counterexample",
              "for S = T (x) ... (x) T the Berezin transform of [S*, S] is at least 2^-n",
              check_tensor_commutator, ("gallery", "exact"), {"points": 100, "oracle_points": 20}),
    CheckSpec("approximate-eigenfunction", "kernels as approximate eigenvectors",
              "||T_phi k_xi - phi~(xi) k_xi|| tends to 0",
              check_approximate_eigenfunction, ("berezin", "limit"), {"symbols": 4, "zetas": 2}),
    CheckSpec("toeplitz-stability", "membership stable under Toeplitz multiplication",
              "T_phi A and A T_phi pass the decay diagnostic when A = dyadic projection does",
              check_toeplitz_stability, ("membership",), {"symbols": 2, "zetas": 2}),
    CheckSpec("zero-symbol-toeplitz", "only the zero Toeplitz operator decays",
              "a Toeplitz operator passes the decay diagnostic only for the zero symbol",
              check_zero_symbol_toeplitz, ("membership",), {"symbols": 3, "zetas": 2}),
    CheckSpec("dyadic-decay", "dyadic projection decay",
              "||P k_xi|| tends to 0 for the projection onto span z^(2^m); likewise for P (x) I",
              check_dyadic_decay, ("gallery", "membership", "limit"), {"points": 6}),
]

REGISTRY: dict[str, CheckSpec] = {s.id: s for s in _SPECS}

REQUIRED_TOPICS = (
    "poisson radial limit",
    "kernel pairing equals Poisson extension",
    "Berezin transform of Toeplitz operator",
    "disk projection identity",
    "projected pairing limit on orthant blocks",
    "projected pairing limit for general symbols",
    "Hankel kernel decay and identity",
    "semicommutator ideal vanishes radially",
    "symbol map round trip",
    "Toeplitz self-commutator vanishes radially",
    "lacunary isometry counterexample",
    "tensor power counterexample",
    "kernels as approximate eigenvectors",
    "membership stable under Toeplitz multiplication",
    "only the zero Toeplitz operator decays",
    "dyadic projection decay",
)


class UnknownCheck(KeyError):
    pass


def get_check(check_id: str) -> CheckSpec:
    try:
        return REGISTRY[check_id]
    except KeyError:
        raise UnknownCheck(f"unknown check id {check_id!r}") from None


def select(filter: str | None = None) -> list[CheckSpec]:
    """Checks whose id equals ``filter`` or whose tags contain it; all when None."""
    if filter is None:
        return list(_SPECS)
    return [s for s in _SPECS if s.id == filter or filter in s.tags]
