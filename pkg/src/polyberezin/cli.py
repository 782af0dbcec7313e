"""Command-line front end: ``polyberezin verify | berezin | recover | diagnose``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time

import numpy as np

from . import berezin as bz
from .boxes import TruncationBox
from .fourier_symbols import FourierSymbol, symbol_eval
from .gallery import GalleryError, get_gallery
from .hardy_operators import toeplitz
from .harness.config import load_config
from .harness.report import suite_json, write_suite
from .harness.runner import run_suite
from .polydisc_kernels import PolydiscPoint, TorusPoint


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _load_symbol(path: str) -> FourierSymbol:
    with open(path) as fh:
        return FourierSymbol.from_json(json.load(fh))


def _operator(args):
    """(operator, label, closed form or None, n) from --op or --symbol."""
    if args.op:
        entry = get_gallery(args.op)
        return entry.build(), entry.label, entry.closed_berezin, entry.n
    phi = _load_symbol(args.symbol)
    return toeplitz(phi, TruncationBox.cube(2, phi.dim)), f"T[{phi!r}]", None, phi.dim


def _zeta(angles, n) -> TorusPoint:
    if angles is None:
        angles = [0.0] * n
    if len(angles) != n:
        raise SystemExit(f"--zeta needs {n} angle(s), got {len(angles)}")
    return TorusPoint(tuple(angles))


def cmd_verify(args) -> int:
    cfg = load_config(args.config, seed=args.seed, workers=args.workers, out_dir=args.out)
    t0 = time.monotonic()
    reports, code = run_suite(filter=args.tag, config=cfg, only=args.only)
    for r in reports:
        print(r.summary_line())
    data = suite_json(reports, cfg.seed, code, time.monotonic() - t0)
    s = data["summary"]
    print(f"{s['pass']} passed, {s['fail']} failed, {s['error']} errors, {s['skipped']} skipped "
          f"in {s['runtime']:.1f}s (seed {cfg.seed})")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_suite(os.path.join(args.out, "report.json"), data)
    return code


def cmd_berezin(args) -> int:
    op, label, closed, n = _operator(args)
    zeta = _zeta(args.zeta, n)
    radii = args.radii or list(bz.DEFAULT_RADII)
    prof = bz.radial_profile(lambda xi: bz.berezin_matrix(op, xi, args.eps), zeta, radii, label=label)
    est = bz.extrapolate_boundary(prof, args.model)
    print(f"# {label}  zeta angles {list(zeta.angles)}")
    print(f"{'r':>22s} {'re':>14s} {'im':>14s} {'bound':>10s}" + ("  closed" if closed else ""))
    for r, v, e in zip(prof.radii, prof.values, prof.error_bounds):
        extra = f"  {closed(PolydiscPoint.radial(float(r), zeta)):.10f}" if closed else ""
        print(f"{r:22.17f} {v.real:14.10f} {v.imag:14.10f} {e:10.2e}{extra}")
    print(f"limit {est.limit.real:.8f}{est.limit.imag:+.8f}i  +/- {est.uncertainty:.2e}  ({est.model})")
    for note in prof.notes:
        print("note:", note, file=sys.stderr)
    os.makedirs(args.out, exist_ok=True)
    base = os.path.join(args.out, "profile")
    bz.write_profile_csv(prof, base + ".csv")
    bz.write_profile_json(prof, base + ".json", est)
    bz.write_profile_svg(prof, base + ".svg", est)
    print(f"wrote {base}.csv, {base}.json, {base}.svg")
    return 0 if prof.ok.all() else 1


def cmd_recover(args) -> int:
    phi = _load_symbol(args.symbol)
    op = toeplitz(phi, TruncationBox.cube(2, phi.dim))
    k = args.grid
    grid = np.stack(np.meshgrid(*[2 * math.pi * np.arange(k) / k] * phi.dim, indexing="ij"), -1)
    zetas = [TorusPoint(tuple(a)) for a in grid.reshape(-1, phi.dim)]
    rows = bz.recover_symbol(op, zetas, args.radii or bz.DEFAULT_RADII, args.eps, model=args.model)
    print(f"{'angles':>24s} {'recovered':>26s} {'phi(zeta)':>26s} {'error':>9s} {'uncert':>9s}")
    worst = 0.0
    for z, est in rows:
        target = symbol_eval(phi, z)
        err = abs(est.limit - target)
        worst = max(worst, err)
        ang = ",".join(f"{a:.3f}" for a in z.angles)
        print(f"{ang:>24s} {est.limit.real:12.8f}{est.limit.imag:+12.8f}i "
              f"{target.real:12.8f}{target.imag:+12.8f}i {err:9.2e} {est.uncertainty:9.2e}")
    print(f"max error {worst:.3e} over {len(rows)} points")
    return 0


def cmd_diagnose(args) -> int:
    entry = get_gallery(args.op)
    op = entry.build()
    psi = _load_symbol(args.psi) if args.psi else FourierSymbol.constant(1.0, entry.n)
    if psi.dim != entry.n:
        raise SystemExit(f"psi has dimension {psi.dim}, operator has {entry.n}")
    rng = np.random.default_rng(args.seed)
    zetas = [TorusPoint(tuple(rng.uniform(0, 2 * math.pi, entry.n))) for _ in range(args.zetas)]
    rep = bz.membership_diagnostic(op, psi, zetas, args.radii or bz.DEFAULT_RADII, args.eps, model=args.model)
    for e in rep.entries:
        f, b = e.forward_estimate, e.backward_estimate
        ang = ",".join(f"{a:.3f}" for a in e.zeta.angles)
        print(f"zeta {ang}: ||A T k|| -> {abs(f.limit):.2e} (+/- {f.uncertainty:.1e}), "
              f"||A* T k|| -> {abs(b.limit):.2e} (+/- {b.uncertainty:.1e})")
    verdict = "consistent with" if rep.consistent else "inconsistent with"
    print(f"{entry.label}: {verdict} radial decay ({rep.kind}, {len(rep.entries)} rays)")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rep.to_json(), fh, indent=1, default=str)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polyberezin", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the check suite and write reports")
    v.add_argument("--only", action="append", metavar="ID", help="run only this check (repeatable)")
    v.add_argument("--tag", help="run checks carrying this tag")
    v.add_argument("--seed", type=int)
    v.add_argument("--out", metavar="DIR")
    v.add_argument("--config", metavar="FILE")
    v.add_argument("--workers", type=int)
    v.set_defaults(func=cmd_verify)

    def sampling(q, model="poly2"):
        q.add_argument("--radii", type=_floats, metavar="LIST", help="comma-separated radii in (0,1)")
        q.add_argument("--eps", type=float, default=bz.DEFAULT_EPS, help="kernel tail mass")
        q.add_argument("--model", default=model, choices=("auto",) + tuple(bz.MODELS))

    b = sub.add_parser("berezin", help="radial Berezin profile of one operator")
    src = b.add_mutually_exclusive_group(required=True)
    src.add_argument("--op", metavar="GALLERY_ID")
    src.add_argument("--symbol", metavar="FILE", help="JSON symbol; profiles its Toeplitz operator")
    b.add_argument("--zeta", type=_floats, metavar="A1,...,AN", help="boundary angles")
    b.add_argument("--out", default=".", metavar="DIR")
    sampling(b)
    b.set_defaults(func=cmd_berezin)

    r = sub.add_parser("recover", help="recover a symbol from its Toeplitz operator on a grid")
    r.add_argument("--symbol", required=True, metavar="FILE")
    r.add_argument("--grid", type=int, default=4, metavar="K", help="K angles per axis")
    sampling(r)
    r.set_defaults(func=cmd_recover)

    d = sub.add_parser("diagnose", help="radial decay diagnostic for a gallery operator")
    d.add_argument("--op", required=True, metavar="GALLERY_ID")
    d.add_argument("--psi", metavar="FILE", help="JSON symbol psi (default 1)")
    d.add_argument("--zetas", type=int, default=3)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--json", metavar="FILE")
    sampling(d, model="auto")
    d.set_defaults(func=cmd_diagnose)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (GalleryError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
