"""Batch verification front-end.

Each subcommand runs a family of checks, emits a JSON or CSV report and
exits 0 when every residual passes its tolerance, 1 on a failed check and
2 on a usage error.  Default tolerances can be overridden through
environment variables prefixed ELLPOISSON_ (ELLPOISSON_TOL,
ELLPOISSON_TRUNCATION_EPS).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from .cech import QuadratureConfig, ResidueSystem
from .errors import EllPoissonError
from .fo import f_constants, sklyanin_bracket, semiclassical_from_relations
from .fo import single_eta_bracket
from .homology import cone_iso_check, hom_complex, pi_bivector, \
    random_kronecker_complex
from .leaves import classical_cubic_rows, end_dim_sheaf, enumerate_strata
from .poisson import QuadraticBracket, hn_canonical_extract, projective_matrix
from .theta import (
    CurveParams,
    ThetaBasis,
    theta_alpha_deriv,
    theta_alpha_eval,
    verify_automorphy,
)

DEFAULT_TOL = 1e-8
DEFAULT_TRUNCATION_EPS = 1e-12


@dataclass
class RunConfig:
    n: int = 3
    k: int = 1
    tau_re: float = 0.0
    tau_im: float = 1.0
    eta_re: float = 0.0
    eta_im: float = 0.0
    truncation_eps: float = DEFAULT_TRUNCATION_EPS
    tol: float = DEFAULT_TOL
    quad_points: int = 128
    radius: float | None = None
    seed: int = 0
    samples: int = 20
    format: str = "json"
    output_path: str | None = None

    @property
    def tau(self) -> complex:
        return complex(self.tau_re, self.tau_im)

    @property
    def eta(self) -> complex:
        return complex(self.eta_re, self.eta_im)

    def validate(self):
        if self.tau_im <= 0:
            raise UsageError("Im(tau) must be positive")
        if self.quad_points < 32:
            raise UsageError("quad-points must be at least 32")
        if self.radius is not None and not 0 < self.radius < 1 / (2 * self.n):
            raise UsageError("radius must lie strictly inside 1/(2n)")
        if self.seed < 0:
            raise UsageError("seed must be non-negative")


class UsageError(Exception):
    pass


def _env_float(name, default):
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise UsageError(f"bad value for {name}: {raw!r}") from exc


def _check(name, residual, tolerance):
    return {"name": name, "residual": float(residual),
            "tolerance": float(tolerance), "pass": bool(residual <= tolerance)}


def _sample_chart_points(n, count, seed):
    """Seeded points with t_0 = 1 and the rest uniform on the unit disc."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        t = np.ones(n, dtype=complex)
        for i in range(1, n):
            while True:
                u, v = rng.uniform(-1.0, 1.0, size=2)
                if u * u + v * v <= 1.0:
                    t[i] = complex(u, v)
                    break
        out.append(t)
    return out


# -- subcommands -----------------------------------------------------------


def cmd_theta(cfg: RunConfig):
    basis = ThetaBasis(CurveParams(cfg.tau, cfg.n), cfg.truncation_eps)
    n = cfg.n
    tau = cfg.tau
    rng = np.random.default_rng(cfg.seed)
    z = rng.random(100) + rng.random(100) * tau
    omega = basis.omega
    checks = []
    worst = [0.0, 0.0, 0.0]
    for alpha in range(n):
        va = theta_alpha_eval(basis, alpha, z)
        lhs1 = theta_alpha_eval(basis, alpha, z + 1.0 / n)
        rhs1 = omega ** alpha * va
        m2 = np.exp(-2j * math.pi * (z + 1 / (2 * n) - (n - 1) * tau / (2 * n)))
        lhs2 = theta_alpha_eval(basis, alpha, z + tau / n)
        rhs2 = m2 * theta_alpha_eval(basis, alpha + 1, z)
        lhs3 = theta_alpha_eval(basis, -alpha, -z)
        rhs3 = (-np.exp(-2j * math.pi * alpha / n)
                * np.exp(-2j * math.pi * n * z) * va)
        for idx, (lhs, rhs) in enumerate(((lhs1, rhs1), (lhs2, rhs2),
                                          (lhs3, rhs3))):
            scale = max(float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))))
            worst[idx] = max(worst[idx], float(np.max(np.abs(lhs - rhs))) / scale)
    for idx, res in enumerate(worst, start=1):
        checks.append(_check(f"shift_property_{idx}", res, cfg.tol))
    ratio = theta_alpha_deriv(basis, 0, 0.0, 2) / basis.dtheta_at_zero[0]
    checks.append(_check("second_log_derivative_2pi_i_n",
                         abs(ratio - 2j * math.pi * n), cfg.tol))
    dref = basis.dtheta_at_zero[0]
    res = max(abs(theta_alpha_deriv(basis, 0, k / n, 1) - dref) / abs(dref)
              for k in range(n))
    checks.append(_check("dtheta0_constant_on_divisor", res, cfg.tol))
    checks.append(_check(
        "automorphy_character",
        verify_automorphy(basis, (n - 1) / 2,
                          lambda w: theta_alpha_eval(basis, 1, w)),
        cfg.tol))
    tables = {"theta_at_zero": [[float(v.real), float(v.imag)]
                                for v in basis.theta_at_zero],
              "dtheta_at_zero": [[float(v.real), float(v.imag)]
                                 for v in basis.dtheta_at_zero]}
    return checks, tables


def cmd_sklyanin(cfg: RunConfig):
    if math.gcd(cfg.n, cfg.k) != 1:
        raise UsageError("gcd(n,k) must be 1")
    basis = ThetaBasis(CurveParams(cfg.tau, cfg.n), cfg.truncation_eps)
    bracket = sklyanin_bracket(basis, cfg.k)
    from .poisson import jacobi_defect
    checks = [_check("jacobi_defect", jacobi_defect(bracket), cfg.tol)]
    tables = {}
    if cfg.k == 1:
        h = hn_canonical_extract(bracket)
        f = f_constants(basis)
        res = float(np.max(np.abs(h.table - f.table)))
        checks.append(_check("canonical_form_equals_f_table", res, 1e-10))
        tables["f_table"] = [[a, b, float(f.table[a, b].real),
                              float(f.table[a, b].imag)]
                             for a in range(cfg.n) for b in range(cfg.n)]
    etas = [1e-2, 1e-3, 1e-4]
    est = semiclassical_from_relations(basis, cfg.k, etas)
    deviation = est.max_difference(bracket)
    checks.append(_check("semiclassical_deviation", deviation, 1e-4))
    singles = [QuadraticBracket(cfg.n, single_eta_bracket(basis, cfg.k, e))
               .max_difference(bracket) for e in etas]
    slope = float(np.polyfit(np.log(etas), np.log(singles), 1)[0])
    checks.append(_check("semiclassical_slope_shortfall",
                         max(0.0, 1.0 - slope), 1e-2))
    tables["semiclassical_single_eta_deviation"] = [
        [e, d] for e, d in zip(etas, singles)]
    return checks, tables


def cmd_moduli_compare(cfg: RunConfig):
    if cfg.k != 1:
        raise UsageError("k != 1 rejected: the identification with the "
                         "extension-moduli bracket is only established for k = 1")
    basis = ThetaBasis(CurveParams(cfg.tau, cfg.n), cfg.truncation_eps)
    quad = QuadratureConfig(cfg.quad_points, cfg.radius)
    system = ResidueSystem(basis, quad)
    h = hn_canonical_extract(sklyanin_bracket(basis, 1))
    agree = 0.0
    match = 0.0
    for t in _sample_chart_points(cfg.n, cfg.samples, cfg.seed):
        closed = system.bracket_matrix(t, "closed_form")
        traced = system.bracket_matrix(t, "trace_form")
        ref = projective_matrix(h, t)
        agree = max(agree, float(np.max(np.abs(closed - traced))))
        match = max(match, float(np.max(np.abs(closed - ref))))
    checks = [_check("method_agreement", agree, 1e-7),
              _check("matches_projective_bracket", match, 1e-6)]
    return checks, {}


def cmd_leaves(cfg: RunConfig):
    if cfg.n < 1:
        raise UsageError("n must be positive")
    records = enumerate_strata(cfg.n)
    tagged = ({rec.torsion for rec in classical_cubic_rows(records)}
              if cfg.n == 3 else set())
    rows = [[rec.l, rec.torsion.describe(), rec.end_dim_torsion,
             rec.expected_dim, rec.feasible, rec.torsion in tagged]
            for rec in records]
    checks = []
    bound = max(0.0 if end_dim_sheaf(rec.torsion) >= 2 * rec.l + 1 else 1.0
                for rec in records)
    checks.append(_check("end_dim_lower_bound", bound, 0.0))
    if cfg.n == 3:
        values = sorted((rec.l, rec.expected_dim)
                        for rec in classical_cubic_rows(records))
        ok = values == [(0, 6), (1, 4), (2, 0), (2, 2), (3, 0)]
        checks.append(_check("classical_rows_reproduced",
                             0.0 if ok else 1.0, 0.0))
    return checks, {"strata": rows}


def cmd_homology(cfg: RunConfig, inject_sign_flip=False, rank: int = 1):
    checks = []
    tables = {}
    if cfg.samples == 0:
        tables["warning"] = "no instances sampled; vacuous pass"
    for idx in range(cfg.samples):
        E = random_kronecker_complex(rank, cfg.n, seed=cfg.seed + idx)
        H = hom_complex(E)
        ok, failures = cone_iso_check(H, sign_flip=inject_sign_flip)
        pi = pi_bivector(H)
        all_ok = ok and pi.antisymmetry_ok() and pi.chain_map_ok(H)
        checks.append(_check(f"cone_iso_instance_{idx}",
                             0.0 if all_ok else 1.0, 0.0))
        if failures:
            tables.setdefault("failures", []).append([idx, failures[0]])
    return checks, tables


# -- report plumbing -------------------------------------------------------


def _emit(report: dict, cfg: RunConfig) -> str:
    if cfg.format == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    lines = ["name,residual,tolerance,pass"]
    for c in report["checks"]:
        lines.append(f"{c['name']},{c['residual']!r},{c['tolerance']!r},"
                     f"{str(c['pass']).lower()}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ellpoisson",
        description="numerical verification of elliptic quadratic Poisson "
                    "brackets, residue calculus and leaf combinatorics")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, with_k=False, with_quad=False, with_samples=False):
        p.add_argument("--n", type=int, default=3)
        if with_k:
            p.add_argument("--k", type=int, default=1)
        p.add_argument("--tau", type=float, nargs=2, default=[0.0, 1.0],
                       metavar=("RE", "IM"))
        p.add_argument("--eta", type=float, nargs=2, default=[0.0, 0.0],
                       metavar=("RE", "IM"))
        p.add_argument("--truncation-eps", type=float, default=None)
        p.add_argument("--tol", type=float, default=None)
        if with_quad:
            p.add_argument("--quad-points", type=int, default=128)
            p.add_argument("--radius", type=float, default=None)
        if with_samples:
            p.add_argument("--samples", type=int, default=20)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--output", default=None)

    common(sub.add_parser("theta", help="basis properties and derivatives"))
    common(sub.add_parser("sklyanin", help="bracket, Jacobi, semiclassical"),
           with_k=True)
    common(sub.add_parser("moduli-compare",
                          help="extension-moduli bracket vs projective bracket"),
           with_k=True, with_quad=True, with_samples=True)
    common(sub.add_parser("leaves", help="leaf stratification table"))
    hom = sub.add_parser("homology", help="exact cone-identification checks")
    common(hom, with_samples=True)
    hom.add_argument("--r", type=int, default=1,
                     help="rank parameter of the three-term shape")
    hom.add_argument("--inject-sign-flip", action="store_true",
                     help="flip a sign in the comparison map (power control)")
    return parser


def _config_from(args) -> RunConfig:
    cfg = RunConfig(
        n=args.n,
        k=getattr(args, "k", 1),
        tau_re=args.tau[0], tau_im=args.tau[1],
        eta_re=args.eta[0], eta_im=args.eta[1],
        truncation_eps=(args.truncation_eps if args.truncation_eps is not None
                        else _env_float("ELLPOISSON_TRUNCATION_EPS",
                                        DEFAULT_TRUNCATION_EPS)),
        tol=(args.tol if args.tol is not None
             else _env_float("ELLPOISSON_TOL", DEFAULT_TOL)),
        quad_points=getattr(args, "quad_points", 128),
        radius=getattr(args, "radius", None),
        seed=args.seed,
        samples=getattr(args, "samples", 20),
        format=args.format,
        output_path=args.output,
    )
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        cfg = _config_from(args)
        if args.command == "theta":
            checks, tables = cmd_theta(cfg)
        elif args.command == "sklyanin":
            checks, tables = cmd_sklyanin(cfg)
        elif args.command == "moduli-compare":
            checks, tables = cmd_moduli_compare(cfg)
        elif args.command == "leaves":
            checks, tables = cmd_leaves(cfg)
        elif args.command == "homology":
            checks, tables = cmd_homology(cfg, args.inject_sign_flip, args.r)
        else:  # pragma: no cover - argparse enforces the choices
            raise UsageError(f"unknown command {args.command}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EllPoissonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    report = {
        "command": args.command,
        "params": asdict(cfg),
        "checks": checks,
        "tables": tables,
        "elapsed_ms": round(elapsed_ms, 3),
    }
    text = _emit(report, cfg)
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(c["pass"] for c in checks) else 1


if __name__ == "__main__":
    sys.exit(main())
