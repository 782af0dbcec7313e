"""Berezin transforms, kernel pairings, radial profiles and boundary limits.

Every evaluation returns a value together with a rigorous truncation bound.
The kernel tail outside a box is known in closed form, and each operator
knows the window on which its truncation is exact, so the bound needs
only an upper estimate of the operator norm.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .boxes import TruncationBox
from .fourier_symbols import (DimensionMismatch, FourierSymbol, coanalytic_complement, symbol_conj,
                              symbol_eval, symbol_mul)
from .hardy_operators import (HardyOperator, adjoint, compose, hankel, identity, toeplitz,
                              window_kernel)
from .polydisc_kernels import (PolydiscPoint, TorusPoint, as_point, choose_truncation, poisson_extend,
                               szego_coeffs, tail_mass)
from .tucker import TuckerVector

log = logging.getLogger(__name__)

DEFAULT_EPS = 1e-10
DEFAULT_RADII = tuple(1.0 - 2.0 ** -m for m in range(4, 13))
RADICAND_CLIP = 1e-10
_U = np.finfo(float).eps


class NegativeRadicandError(ArithmeticError):
    """The identity route produced a clearly negative squared norm."""


class ExtrapolationError(ValueError):
    pass


def _roundoff(norm_bound: float, length: int, nterms: int = 1) -> float:
    # standard a priori bound for summing/inner products of that length
    return 8 * _U * max(norm_bound, 1.0) * (length + nterms)


# ------------------------------------------------------------------ Berezin
def berezin_matrix(a: HardyOperator, xi, eps: float = DEFAULT_EPS) -> tuple[complex, float]:
    """<A k_xi, k_xi> from the truncated matrix, with a rigorous error bound.

    The kernel is cut to the exact window W of the (possibly rebuilt)
    operator, where A k^W is computed without truncation error; with
    t = tail mass outside W this leaves 2 ||A|| sqrt(t) + ||A|| t.
    """
    xi = as_point(xi)
    if xi.n != a.n:
        raise DimensionMismatch("point and operator dimensions differ")
    op = a.fitted(xi, eps)
    k = szego_coeffs(xi, op.box)
    kw = window_kernel(k, op)
    v = op.apply(kw)
    value = v.inner(kw)
    tw = op.window_tail(xi)
    nb = op.norm_bound
    nterms = len(op.kron.terms) if op.kron is not None else 1
    bound = 2 * nb * math.sqrt(tw) + nb * tw + v.discarded
    bound += _roundoff(nb, max(op.box.shape), nterms)
    return complex(value), float(bound)


def berezin_toeplitz_closed(phi: FourierSymbol, xi) -> complex:
    """Berezin transform of T_phi: the harmonic extension of phi."""
    return poisson_extend(phi, xi)


def kernel_image_norm(a: HardyOperator, xi, eps: float = DEFAULT_EPS) -> tuple[float, float]:
    """||A k_xi|| with bound ||A|| sqrt(tail outside the exact window)."""
    xi = as_point(xi)
    op = a.fitted(xi, eps)
    k = szego_coeffs(xi, op.box)
    v = op.apply(window_kernel(k, op))
    tw = op.window_tail(xi)
    bound = op.norm_bound * math.sqrt(tw) + v.discarded + _roundoff(op.norm_bound, max(op.box.shape))
    return v.norm(), float(bound)


def eigen_residual(phi: FourierSymbol, xi, eps: float = DEFAULT_EPS) -> tuple[float, float]:
    """||T_phi k_xi - phi~(xi) k_xi||, the approximate-eigenvector defect."""
    xi = as_point(xi)
    box = choose_truncation(xi, eps).enlarged(phi.degree())
    t = toeplitz(phi, box)
    k = szego_coeffs(xi, box)
    kw = window_kernel(k, t)
    lam = poisson_extend(phi, xi)
    v = t.apply(kw).combine(kw, 1.0, -lam)
    tw = t.window_tail(xi)
    bound = (phi.l1_norm() + abs(lam)) * math.sqrt(tw) + v.discarded + _roundoff(phi.l1_norm(), max(box.shape))
    return v.norm(), float(bound)


# ------------------------------------------------------------------ products with kernels
def _shift_into(f: np.ndarray, m: int, lo: int, hi: int) -> np.ndarray:
    out = np.zeros(hi - lo + 1, dtype=complex)
    idx = np.arange(len(f)) + m - lo
    ok = (idx >= 0) & (idx < len(out))
    out[idx[ok]] = f[ok]
    return out


def symbol_times_kernel(sym: FourierSymbol, factors: Sequence[np.ndarray], lo: Sequence[int],
                        hi: Sequence[int]) -> TuckerVector:
    """Coefficients of sym * (outer product of factors) on the rectangle prod [lo_j, hi_j].

    With lo = 0 this is the analytic projection P_H2 of the product,
    restricted to indices <= hi.
    """
    n = len(factors)
    uniq: list[dict] = [dict() for _ in range(n)]
    for k, _ in sym.terms:
        for j in range(n):
            uniq[j].setdefault(k[j], len(uniq[j]))
    if not sym.terms:
        return TuckerVector.zeros([h - l + 1 for l, h in zip(lo, hi)], tuple(lo))
    bases = [np.stack([_shift_into(factors[j], m, lo[j], hi[j]) for m in uniq[j]], axis=1) for j in range(n)]
    core = np.zeros(tuple(len(u) for u in uniq), dtype=complex)
    for k, c in sym.terms:
        core[tuple(uniq[j][k[j]] for j in range(n))] += c
    return TuckerVector(core, bases, tuple(lo)).maybe_compress()


def _pair_rectangle(box: TruncationBox, syms: Sequence[FourierSymbol], projected: bool):
    lo = [0 if projected else -max(s.negative_degree()[j] for s in syms) for j in range(box.n)]
    hi = [m + max(s.positive_degree()[j] for s in syms) for j, m in enumerate(box.dims)]
    return lo, hi


def pairing(f: FourierSymbol, g: FourierSymbol, xi, eps: float = DEFAULT_EPS,
            projected: bool = False) -> tuple[complex, float]:
    """<f k_xi, g k_xi> in L^2(T^n), or <P(f k_xi), P(g k_xi)> when ``projected``.

    Computed from truncated coefficient vectors; multiplication by f has
    norm at most its l1 norm and P is a contraction, so the bound is
    2 ||f|| ||g|| sqrt(tail).
    """
    xi = as_point(xi)
    if f.dim != xi.n or g.dim != xi.n:
        raise DimensionMismatch("symbol and point dimensions differ")
    box = choose_truncation(xi, eps)
    k = szego_coeffs(xi, box)
    lo, hi = _pair_rectangle(box, (f, g), projected)
    vf = symbol_times_kernel(f, k.factors, lo, hi)
    vg = symbol_times_kernel(g, k.factors, lo, hi)
    nf, ng = f.l1_norm(), g.l1_norm()
    bound = 2 * nf * ng * math.sqrt(k.tail_mass) + vf.discarded * ng + vg.discarded * nf
    bound += _roundoff(nf * ng, max(box.shape), len(f) * len(g))
    return vf.inner(vg), float(bound)


def projected_pairing(f: FourierSymbol, g: FourierSymbol, xi, eps: float = DEFAULT_EPS) -> tuple[complex, float]:
    return pairing(f, g, xi, eps, projected=True)


def disk_projection_residual(x: FourierSymbol, xi, eps: float = DEFAULT_EPS) -> tuple[float, float]:
    """||P(x k_xi) - x~(xi) k_xi|| for one variable, with its truncation bound.

    For co-analytic x the untruncated residual vanishes, so the returned
    value must sit below the bound.
    """
    xi = as_point(xi)
    if xi.n != 1 or x.dim != 1:
        raise DimensionMismatch("disk projection residual is one-variable")
    box = choose_truncation(xi, eps)
    k = szego_coeffs(xi, box)
    hi = [box.dims[0] + x.positive_degree()[0]]
    v = symbol_times_kernel(x, k.factors, [0], hi)
    lam = poisson_extend(x, xi)
    kv = TuckerVector.rank_one([np.concatenate([k.factors[0], np.zeros(hi[0] - box.dims[0], complex)])])
    r = v.combine(kv, 1.0, -lam)
    bound = (x.l1_norm() + abs(lam)) * math.sqrt(k.tail_mass) + r.discarded + _roundoff(x.l1_norm(), hi[0])
    return r.norm(), float(bound)


def hankel_kernel_norm(phi: FourierSymbol, xi, eps: float = 1e-14) -> tuple[float, float]:
    """||H_phi k_xi|| by two routes: directly, and through the Poisson identity

    ||H_phi k||^2 = |y|^2~(xi) - ||P(y k)||^2 with y = P_perp phi.
    """
    xi = as_point(xi)
    if xi.n != phi.dim:
        raise DimensionMismatch("symbol and point dimensions differ")
    box = choose_truncation(xi, eps)
    k = szego_coeffs(xi, box)
    direct = hankel(phi, box).apply(k.vector).norm()

    y = coanalytic_complement(phi)
    if y.is_zero():
        return float(direct), 0.0
    ysq = symbol_mul(y, symbol_conj(y))
    hi = [m + u for m, u in zip(box.dims, y.positive_degree())]
    proj = symbol_times_kernel(y, k.factors, [0] * box.n, hi)
    radicand = poisson_extend(ysq, xi).real - proj.norm() ** 2
    if radicand < 0:
        if radicand < -RADICAND_CLIP:
            raise NegativeRadicandError(f"identity radicand {radicand:.3e} at {xi.coords}: truncation too coarse")
        log.info("clipped identity radicand %.3e to 0", radicand)
        radicand = 0.0
    return float(direct), math.sqrt(radicand)


# ------------------------------------------------------------------ profiles
@dataclass
class RadialProfile:
    zeta: TorusPoint
    radii: np.ndarray
    values: np.ndarray
    error_bounds: np.ndarray
    label: str = ""
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.radii = np.asarray(self.radii, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        self.error_bounds = np.asarray(self.error_bounds, dtype=float)
        if not (len(self.radii) == len(self.values) == len(self.error_bounds)):
            raise ValueError("radii, values, error_bounds must have equal length")
        _check_radii(self.radii)

    def __len__(self) -> int:
        return len(self.radii)

    @property
    def ok(self) -> np.ndarray:
        return np.isfinite(self.values) & np.isfinite(self.error_bounds)

    def to_rows(self) -> list[list]:
        rows = []
        for r, v, e in zip(self.radii, self.values, self.error_bounds):
            rows.append(list(self.zeta.angles) + [float(r), float(v.real), float(v.imag), float(e)])
        return rows

    def header(self) -> list[str]:
        return [f"theta_{j + 1}" for j in range(self.zeta.n)] + ["r", "value_re", "value_im", "error_bound"]

    def to_json(self, estimate: BoundaryEstimate | None = None) -> dict:
        out = {
            "label": self.label,
            "zeta": list(self.zeta.angles),
            "radii": self.radii.tolist(),
            "values": [[float(v.real), float(v.imag)] for v in self.values],
            "error_bounds": self.error_bounds.tolist(),
            "notes": list(self.notes),
        }
        if estimate is not None:
            out["estimate"] = estimate.to_json()
        return out


def _check_radii(radii: np.ndarray):
    if len(radii) and (np.any(radii <= 0) or np.any(radii >= 1)):
        raise ValueError("radii must lie in (0, 1)")
    if np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be strictly increasing")


def radial_profile(f: Callable[[PolydiscPoint], complex | tuple[complex, float]], zeta: TorusPoint,
                   radii: Sequence[float] = DEFAULT_RADII, label: str = "", workers: int = 1) -> RadialProfile:
    """Sample f(r zeta) along the ray.  Failures become NaN entries with a note."""
    radii = np.asarray(radii, dtype=float)
    _check_radii(radii)

    def one(r):
        try:
            out = f(PolydiscPoint.radial(float(r), zeta))
        except Exception as exc:  # recorded in the profile, never swallowed silently
            return complex(np.nan, np.nan), math.inf, f"r={r}: {type(exc).__name__}: {exc}"
        if isinstance(out, tuple):
            return complex(out[0]), float(out[1]), None
        return complex(out), 0.0, None

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, radii))
    else:
        results = [one(r) for r in radii]
    notes = [note for _, _, note in results if note]
    return RadialProfile(zeta, radii, [v for v, _, _ in results], [e for _, e, _ in results], label, notes)


# ------------------------------------------------------------------ extrapolation
def _sqrt(t):
    return np.sqrt(t)


def _sqrt_tlog(t):
    return np.sqrt(t * np.log(1.0 / t))


MODELS: dict[str, tuple[Callable, ...]] = {
    "poly2": (np.ones_like, lambda t: t, lambda t: t * t),
    "poly2-sqrt": (np.ones_like, _sqrt, lambda t: t),
    "sqrt-tlog": (np.ones_like, _sqrt, _sqrt_tlog),
}
AUTO_MODELS = ("poly2", "poly2-sqrt", "sqrt-tlog")


@dataclass
class BoundaryEstimate:
    limit: complex
    uncertainty: float
    model: str
    residual: float
    last_increment: float = 0.0
    converged: bool = True
    n_samples: int = 0
    coeffs: list = field(default_factory=list)

    def contains(self, target: complex, tol: float | None = None) -> bool:
        return abs(self.limit - target) <= (self.uncertainty if tol is None else tol)

    def to_json(self) -> dict:
        d = asdict(self)
        d["limit"] = [float(self.limit.real), float(self.limit.imag)]
        d["coeffs"] = [[float(c.real), float(c.imag)] for c in self.coeffs]
        return d

    @classmethod
    def from_json(cls, d: dict) -> BoundaryEstimate:
        d = dict(d)
        d["limit"] = complex(*d["limit"])
        d["coeffs"] = [complex(*c) for c in d.get("coeffs", [])]
        return cls(**d)


def _fit(t: np.ndarray, v: np.ndarray, model: str):
    basis = MODELS[model]
    A = np.stack([b(t) for b in basis], axis=1).astype(complex)
    coef, *_ = np.linalg.lstsq(A, v, rcond=None)
    residual = float(np.linalg.norm(A @ coef - v))
    return coef, residual


def extrapolate_boundary(p: RadialProfile, model: str = "poly2", min_samples: int = 4,
                         r_min_required: float = 0.99) -> BoundaryEstimate:
    """Least-squares fit in t = 1 - r; the constant term is the boundary value.

    ``model`` picks the basis: "poly2" (1, t, t^2), "poly2-sqrt" (1, sqrt t, t),
    "sqrt-tlog" (1, sqrt t, sqrt(t log 1/t)), or "auto" for the smallest
    residual among them.
    """
    ok = p.ok
    if ok.sum() < min_samples:
        raise ExtrapolationError(f"need at least {min_samples} finite samples, have {int(ok.sum())}")
    r = p.radii[ok]
    if r.max() < r_min_required:
        raise ExtrapolationError(f"largest radius {r.max()} below {r_min_required}")
    t, v, e = 1.0 - r, p.values[ok], p.error_bounds[ok]
    if model == "auto":
        fits = {m: _fit(t, v, m) for m in AUTO_MODELS}
        model = min(fits, key=lambda m: fits[m][1])
        coef, residual = fits[model]
    elif model in MODELS:
        coef, residual = _fit(t, v, model)
    else:
        raise ExtrapolationError(f"unknown model {model!r}")
    t_min = float(t.min())
    if model == "poly2":
        extra = abs(coef[1]) * t_min
    else:
        extra = abs(sum(c * b(np.array([t_min]))[0] for c, b in zip(coef[1:], MODELS[model][1:])))
    uncertainty = residual + float(e.max()) + float(extra)
    limit = complex(coef[0])
    spread = float(np.ptp(np.abs(v))) if len(v) > 1 else 0.0
    converged = residual <= max(spread, 1e-14)
    last = abs(v[np.argmax(r)] - limit)
    if not converged:
        log.warning("profile %s: residual %.3e exceeds spread %.3e", p.label, residual, spread)
    return BoundaryEstimate(limit, uncertainty, model, residual, float(last), bool(converged),
                            int(ok.sum()), [complex(c) for c in coef])


# ------------------------------------------------------------------ symbol map
def recover_symbol(a: HardyOperator, zetas: Sequence[TorusPoint], radii: Sequence[float] = DEFAULT_RADII,
                   eps: float = DEFAULT_EPS, model: str = "poly2") -> list[tuple[TorusPoint, BoundaryEstimate]]:
    """Radial boundary values of the Berezin transform at each zeta."""
    out = []
    for zeta in zetas:
        prof = radial_profile(lambda xi: berezin_matrix(a, xi, eps), zeta, radii, label=a.label)
        out.append((zeta, extrapolate_boundary(prof, model)))
    return out


@dataclass
class MembershipEntry:
    zeta: TorusPoint
    forward: RadialProfile
    forward_estimate: BoundaryEstimate
    backward: RadialProfile
    backward_estimate: BoundaryEstimate

    @property
    def decays(self) -> bool:
        return all(abs(e.limit) <= e.uncertainty for e in (self.forward_estimate, self.backward_estimate))


@dataclass
class MembershipReport:
    """Finite-sample evidence about ||A T_psi k_xi|| and ||A* T_psi k_xi|| -> 0.

    A diagnostic, not a proof: only finitely many rays are sampled.
    """

    label: str
    entries: list[MembershipEntry]
    kind: str = "diagnostic"

    @property
    def consistent(self) -> bool:
        return all(e.decays for e in self.entries)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "kind": self.kind,
            "consistent_with_membership": self.consistent,
            "entries": [{
                "zeta": list(e.zeta.angles),
                "forward": e.forward.to_json(e.forward_estimate),
                "backward": e.backward.to_json(e.backward_estimate),
            } for e in self.entries],
        }


def membership_diagnostic(a: HardyOperator, psi: FourierSymbol, zetas: Sequence[TorusPoint],
                          radii: Sequence[float] = DEFAULT_RADII, eps: float = DEFAULT_EPS,
                          model: str = "auto") -> MembershipReport:
    tpsi = toeplitz(psi, a.box)
    fwd = compose(a, tpsi)
    bwd = compose(adjoint(a), tpsi)
    entries = []
    for zeta in zetas:
        pf = radial_profile(lambda xi: kernel_image_norm(fwd, xi, eps), zeta, radii, label=fwd.label)
        pb = radial_profile(lambda xi: kernel_image_norm(bwd, xi, eps), zeta, radii, label=bwd.label)
        entries.append(MembershipEntry(zeta, pf, extrapolate_boundary(pf, model),
                                       pb, extrapolate_boundary(pb, model)))
    return MembershipReport(a.label, entries)


# ------------------------------------------------------------------ serialization
def write_profile_csv(p: RadialProfile, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(p.header())
        for row in p.to_rows():
            w.writerow([repr(x) for x in row])


def read_profile_csv(path, label: str = "") -> RadialProfile:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    n = sum(1 for h in header if h.startswith("theta_"))
    data = np.array([[float(x) for x in row] for row in body], dtype=float).reshape(-1, n + 4)
    angles = tuple(data[0, :n]) if len(data) else (0.0,) * n
    return RadialProfile(TorusPoint(angles), data[:, n], data[:, n + 1] + 1j * data[:, n + 2], data[:, n + 3], label)


def write_profile_json(p: RadialProfile, path, estimate: BoundaryEstimate | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(p.to_json(estimate), fh, indent=1)


def write_profile_svg(p: RadialProfile, path, estimate: BoundaryEstimate | None = None) -> None:
    # the Figure API avoids pyplot's global state, so this is safe from worker threads
    from matplotlib.figure import Figure

    fig = Figure(figsize=(5, 3.2))
    ax = fig.subplots()
    ok = p.ok
    ax.plot(p.radii[ok], np.abs(p.values[ok]), "o-", ms=3, label="|value|")
    if estimate is not None:
        ax.axhline(abs(estimate.limit), ls="--", lw=0.8, color="k", label=f"limit ({estimate.model})")
    ax.set_xlabel("r")
    ax.set_ylabel("|value|")
    ax.set_title(p.label[:60], fontsize=8)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="svg")


def boundary_value(phi: FourierSymbol, zeta: TorusPoint) -> complex:
    return symbol_eval(phi, zeta)
