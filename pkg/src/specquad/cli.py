"""Batch verification front end.

Subcommands rebuild the operator data at the requested parameters, run the
named checks and write one machine-readable report (schema version 1).
Exit code 0 means every check passed, 1 flags at least one failure, 2 a
usage or configuration error.  Reports carry no timestamps and all random
draws are seeded from the config, so identical configurations produce
bit-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from typing import Sequence

import numpy as np

from . import desitter, finite, geometry, reconstruct, sl2, spinfields
from .operators import interior_residual
from .quadruple import AxiomReport, verify_quadruple

REPORT_VERSION = 1
DEFAULT_SEED = 20201121


def _build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; flags take precedence")
    common.add_argument("--output", "-o", help="report path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--tol", action="append", default=None, metavar="ID=VALUE",
                        help="tolerance override per check id (repeatable)")

    parser = argparse.ArgumentParser(
        prog="specquad",
        description="verification suite for truncated spectral quadruples")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    subparsers: dict[str, argparse.ArgumentParser] = {}

    def add(name, **kwargs):
        p = sub.add_parser(name, parents=[common], **kwargs)
        subparsers[name] = p
        return p

    p = add("sl2-classify", help="series classification and ladder law")
    p.add_argument("--r2m2", type=float, required=True)
    p.add_argument("--lattice", choices=("integer", "half_integer"),
                   default="half_integer")

    for name in ("quadruple-verify", "reconstruct"):
        p = add(name)
        p.add_argument("--rm", type=float, default=1.0)
        p.add_argument("--theta", type=float, default=0.3)
        p.add_argument("--nmax", type=int, default=32)
        p.add_argument("--margin", type=int, default=4)
        if name == "reconstruct":
            p.add_argument("--orders", type=int, default=3)

    p = add("desitter-crosscheck", help="recursion vs closed-form ladder blocks")
    p.add_argument("--rm", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--nmax", type=int, default=16)

    for name in ("finite-verify", "finite-distance"):
        p = add(name)
        p.add_argument("--m", type=str, default="1",
                       help="Dirac parameter, a Python complex literal")

    p = add("oracle-check", help="independent geometry and spinor-field suite")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = add("all", help="every section at the default parameters")
    p.add_argument("--rm", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=0.3)
    p.add_argument("--nmax", type=int, default=32)
    p.add_argument("--margin", type=int, default=4)
    p.add_argument("--orders", type=int, default=3)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = add("sweep", help="grid of quadruple-verify + reconstruct runs")
    p.add_argument("--rm", type=str, default="0,0.5,1,2",
                   help="comma-separated rm grid")
    p.add_argument("--theta", type=str, default="0,0.3,1.0",
                   help="comma-separated theta grid")
    p.add_argument("--nmax", type=int, default=32)
    p.add_argument("--margin", type=int, default=4)
    return parser, subparsers


class ConfigError(Exception):
    pass


def _load_config(path: str) -> dict[str, str]:
    out = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
                key, value = (part.strip() for part in line.split("=", 1))
                out[key] = value
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return out


def _apply_config(args: argparse.Namespace, parser_defaults: dict, cfg: dict[str, str]):
    tol_overrides = {}
    for key, value in cfg.items():
        if key.startswith("tol."):
            tol_overrides[key[4:]] = value
            continue
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ConfigError(f"unknown config key {key!r}")
        current = getattr(args, attr)
        default = parser_defaults.get(attr)
        if current == default or current is None:
            kind = type(default) if default is not None else str
            try:
                setattr(args, attr, kind(value) if kind is not bool else value == "true")
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {value!r}") from exc
    if tol_overrides:
        existing = list(args.tol or [])
        existing.extend(f"{k}={v}" for k, v in tol_overrides.items())
        args.tol = existing


def _parse_tolerances(pairs: Sequence[str] | None) -> dict[str, float]:
    out = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise ConfigError(f"bad tolerance override {pair!r}, expected ID=VALUE")
        key, value = pair.split("=", 1)
        try:
            out[key.strip()] = float(value)
        except ValueError as exc:
            raise ConfigError(f"bad tolerance value in {pair!r}") from exc
    return out


# -- sections ----------------------------------------------------------------

def _section_sl2(r2m2: float, lattice: str, tol: dict) -> AxiomReport:
    rep = AxiomReport()
    ns = np.arange(-9.5, 10.5) if lattice == "half_integer" else np.arange(-9, 10)
    rep.add("sl2.ladder_recursion", sl2.verify_ladder_recursion(r2m2, ns),
            tol.get("sl2.ladder_recursion", 1e-14))
    closed = max(abs(sl2.ladder_coefficient_sq(n, r2m2)
                     - ((n + 0.5) ** 2 + r2m2)) for n in ns)
    rep.add("sl2.ladder_closed_form", closed, tol.get("sl2.ladder_closed_form", 0.0))
    lat = sl2.Lattice.INTEGER if lattice == "integer" else sl2.Lattice.HALF_INTEGER
    classes = sl2.classify(sl2.RepParams(r2m2=r2m2, lattice=lat))
    rep.add("sl2.classification", 0.0, 0.0,
            notes="; ".join(str(c) for c in classes)
                  + " [complementary bound read as 0 >= r2m2 > -1/4]")
    return rep


def _section_quadruple(rm: float, theta: float, nmax: int, margin: int,
                       tol: dict) -> AxiomReport:
    q = desitter.assemble_quadruple(desitter.DeSitterParams(rm=rm, theta=theta, nmax=nmax))
    return verify_quadruple(q, margin=margin,
                            include_noncommutativity=(rm != 0.0), tolerances=tol)


def _section_crosscheck(rm: float, theta: float, nmax: int, tol: dict) -> AxiomReport:
    rep = AxiomReport()
    params = desitter.DeSitterParams(rm=rm, theta=theta, nmax=max(nmax, 8))
    rep.add("crosscheck.recursion_vs_closed_form",
            desitter.crosscheck_construction_vs_appendix(params),
            tol.get("crosscheck.recursion_vs_closed_form", 1e-12))
    worst = 0.0
    for n in np.arange(-7.5, 8.5):
        blk = desitter.appendix_t_plus(n, rm, theta)
        target = ((n + 0.5) ** 2 + rm ** 2) * np.eye(2)
        worst = max(worst, float(np.abs(blk @ blk.conj().T - target).max()))
    rep.add("crosscheck.norm_law", worst, tol.get("crosscheck.norm_law", 1e-12),
            notes="T+(n) T+(n)* = ((n+1/2)^2 + rm^2) 1")
    return rep


def _section_reconstruct(rm: float, theta: float, nmax: int, margin: int,
                         orders: int, tol: dict) -> AxiomReport:
    rep = AxiomReport()
    q = desitter.assemble_quadruple(desitter.DeSitterParams(rm=rm, theta=theta, nmax=nmax))
    exp = reconstruct.commutator_expansion(q.ih, q.u, q.u, min(orders, margin), margin)
    for k in range(min(3, len(exp.terms))):
        rep.add(f"reconstruct.order_{k}", interior_residual(exp[k], margin),
                tol.get(f"reconstruct.order_{k}", 1e-10))
    if rm == 0.0:
        rep.add("reconstruct.massless_degeneracy",
                reconstruct.massless_degeneracy_check(q, kmax=min(5, margin), margin=margin),
                tol.get("reconstruct.massless_degeneracy", 1e-10),
                notes="all orders vanish for rm = 0")
        rep.add("reconstruct.mass_roundtrip", abs(reconstruct.extract_mass_scale(q, margin)),
                tol.get("reconstruct.mass_roundtrip", 1e-8), notes="recovered rm vs 0")
        return rep
    kappa, fit = reconstruct.third_order_coefficient(q, margin)
    rep.add("reconstruct.third_order_fit", fit,
            tol.get("reconstruct.third_order_fit", 1e-8),
            notes=f"measured coefficient kappa = {kappa:.12g}")
    recovered = reconstruct.extract_mass_scale(q, margin)
    rep.add("reconstruct.mass_roundtrip", abs(recovered - rm),
            tol.get("reconstruct.mass_roundtrip", 1e-8),
            notes=f"recovered rm = {recovered:.12g}")
    q2 = desitter.assemble_quadruple(
        desitter.DeSitterParams(rm=2 * rm, theta=theta, nmax=nmax))
    kappa2, _ = reconstruct.third_order_coefficient(q2, margin)
    rep.add("reconstruct.linearity_in_mass", abs(kappa2 - 2 * kappa),
            tol.get("reconstruct.linearity_in_mass", 1e-8 * abs(kappa)),
            notes="kappa(2 rm) vs 2 kappa(rm)")
    adm = reconstruct.extract_adm(q, margin=margin)
    rep.add("reconstruct.lapse_mass", abs(adm.lapse_mass - rm),
            tol.get("reconstruct.lapse_mass", 1e-8), notes="fiber trace of iH e_perp")
    rep.add("reconstruct.shift", adm.shift, tol.get("reconstruct.shift", 1e-10))
    rep.add("reconstruct.adm_shape", adm.shape_residual,
            tol.get("reconstruct.adm_shape", 1e-10))
    return rep


def _section_finite_verify(m: complex, tol: dict) -> AxiomReport:
    rep = finite.validate_finite_triple(finite.two_point_triple(m),
                                        tol.get("finite.validation", 1e-12))
    mism = 0
    for n in range(0, 9):
        table = finite.sign_table(n)
        j2 = (-1) ** (((n - 1) * n * (n + 1) * (n + 2) // 8) % 2)
        jd = (-1) ** ((n * (n + 1) * (n + 2) // 2) % 2)
        jg = (-1) ** ((n // 2) % 2) if n % 2 == 0 else None
        mism += int((table.j_squared, table.d_commutation, table.gamma_commutation)
                    != (j2, jd, jg))
    rep.add("finite.sign_table", float(mism), 0.0,
            notes="mismatches against direct exponent evaluation, n in [0, 8]")
    quad = finite.quadruple_from_triple(
        finite.two_point_triple(m), [(0.0, m), (1.0, m)])
    rep.extend(quad.validate(tol.get("finite.quadruple", 1e-12)))
    return rep


def _section_finite_distance(m: complex, tol: dict) -> AxiomReport:
    rep = AxiomReport()
    d = finite.connes_distance(finite.two_point_triple(m), 0, 1)
    if abs(m) == 0.0:
        rep.add("finite.distance_unbounded", 0.0 if math.isinf(d) else 1.0, 0.0,
                notes="m = 0: distance must be flagged unbounded")
    else:
        rep.add("finite.distance", abs(d - 1.0 / abs(m)),
                tol.get("finite.distance", 1e-6),
                notes=f"d = {d:.9g}, analytic 1/|m| = {1.0 / abs(m):.9g}")
    return rep


def _section_oracle(seed: int, tol: dict) -> AxiomReport:
    rep = AxiomReport()
    rng = np.random.default_rng(seed)

    pts = [geometry.ChartPoint(float(th), float(ph))
           for th, ph in zip(rng.uniform(-1.5, 1.5, 50), rng.uniform(0, 2 * np.pi, 50))]
    emb = max(abs(-g.embedding[0] ** 2 + g.embedding[1] ** 2 + g.embedding[2] ** 2 - 1.0)
              for g in map(geometry.geometry_at, pts))
    rep.add("oracle.embedding", emb, tol.get("oracle.embedding", 1e-12))
    ktrace = max(abs(geometry.geometry_at(p).extrinsic_trace - 2.0 / p.radius)
                 for p in pts)
    rep.add("oracle.extrinsic_trace", ktrace, tol.get("oracle.extrinsic_trace", 1e-9),
            notes="K_A^A = (n-1)/R with n = 3 the embedding dimension")

    sym = geometry.symmetry_checks(geometry.ChartPoint(0.5, 1.0))
    rep.add("oracle.killing_brackets",
            max(sym["bracket_l01_l21"], sym["bracket_l02_l21"], sym["bracket_l01_l02"]),
            tol.get("oracle.killing_brackets", 1e-9))
    rep.add("oracle.casimir", sym["casimir"], tol.get("oracle.casimir", 1e-9))

    cliff = 0.0
    gammas = (geometry.GAMMA0, geometry.GAMMA1, geometry.GAMMA2)
    for p in pts[:20]:
        frames = geometry.frame_vectors(p)
        for i in range(3):
            for j in range(3):
                got = (geometry.slash(frames[i]) @ geometry.slash(frames[j])
                       + geometry.slash(frames[j]) @ geometry.slash(frames[i]))
                cliff = max(cliff, float(np.abs(got - 2 * geometry.ETA[i, j] * np.eye(2)).max()))
                flat = gammas[i] @ gammas[j] + gammas[j] @ gammas[i]
                cliff = max(cliff, float(np.abs(flat - 2 * geometry.ETA[i, j] * np.eye(2)).max()))
    rep.add("oracle.clifford", cliff, tol.get("oracle.clifford", 1e-12))

    btw = max(float(np.abs(g.conj().T @ geometry.B_INTERTWINER
                           + geometry.B_INTERTWINER @ g).max()) for g in gammas)
    rep.add("oracle.b_intertwiner", btw, tol.get("oracle.b_intertwiner", 1e-14))

    dirac_worst = 0.0
    for _ in range(20):
        psi = spinfields.random_spinor_field(rng)
        p = geometry.ChartPoint(float(rng.uniform(-1.2, 1.2)),
                                float(rng.uniform(0.1, 6.1)))
        dirac_worst = max(dirac_worst, spinfields.dirac_agreement_residual(psi, p))
    rep.add("oracle.dirac_pair", dirac_worst, tol.get("oracle.dirac_pair", 1e-9))

    rm, theta = 1.0, 0.4
    basis = desitter.assemble_quadruple(
        desitter.DeSitterParams(rm=rm, theta=theta, nmax=8)).basis
    ham = desitter.hamiltonian_theta(rm, theta, basis)
    worst = 0.0
    for n in np.arange(-5.5, 6.5):
        blk = ham.band_block(n, 0)
        for col, sign in ((0, +1), (1, -1)):
            coefs = spinfields.apply_T_grid("d_theta", n, sign, rm, theta)
            worst = max(worst, abs(coefs[(n, +1)] - blk[0, col]))
            worst = max(worst, abs(coefs[(n, -1)] - blk[1, col]))
    rep.add("oracle.hamiltonian_vs_grid", worst,
            tol.get("oracle.hamiltonian_vs_grid", 1e-9),
            notes="matrix theta-derivative blocks vs grid T-action, |n| <= 11/2")

    sol1 = spinfields.SolutionCoefficients(rm, {0.5: np.array([1.0, 0.2j]),
                                                1.5: np.array([0.1, 0.0])})
    sol2 = spinfields.SolutionCoefficients(rm, {0.5: np.array([0.3, 1.0]),
                                                1.5: np.array([0.0, 0.5j])})
    rep.add("oracle.slice_independence",
            spinfields.slice_independence(sol1, sol2, 0.0, 0.7),
            tol.get("oracle.slice_independence", 1e-8))

    mink = 0.0
    for _ in range(5):
        field = spinfields.random_poly_spinor(rng)
        sample = [rng.uniform(-1.0, 1.0, 3) for _ in range(4)]
        mink = max(mink, spinfields.minkowski_commutation_residual(field, sample))
    rep.add("oracle.minkowski_commutation", mink,
            tol.get("oracle.minkowski_commutation", 1e-8))
    return rep


def _run_subcommand(args: argparse.Namespace, tol: dict) -> tuple[dict, AxiomReport | None, dict | None]:
    """Returns (params echo, flat report or None, extra payload for sweep)."""
    sc = args.subcommand
    if sc == "sl2-classify":
        return ({"r2m2": args.r2m2, "lattice": args.lattice},
                _section_sl2(args.r2m2, args.lattice, tol), None)
    if sc == "quadruple-verify":
        params = {"rm": args.rm, "theta": args.theta, "nmax": args.nmax,
                  "margin": args.margin}
        return params, _section_quadruple(args.rm, args.theta, args.nmax,
                                          args.margin, tol), None
    if sc == "desitter-crosscheck":
        params = {"rm": args.rm, "theta": args.theta, "nmax": args.nmax}
        return params, _section_crosscheck(args.rm, args.theta, args.nmax, tol), None
    if sc == "reconstruct":
        params = {"rm": args.rm, "theta": args.theta, "nmax": args.nmax,
                  "margin": args.margin, "orders": args.orders}
        if args.orders > args.margin:
            raise ConfigError("orders must not exceed margin")
        return params, _section_reconstruct(args.rm, args.theta, args.nmax,
                                            args.margin, args.orders, tol), None
    if sc == "finite-verify":
        m = _parse_complex(args.m)
        return {"m": str(m)}, _section_finite_verify(m, tol), None
    if sc == "finite-distance":
        m = _parse_complex(args.m)
        return {"m": str(m)}, _section_finite_distance(m, tol), None
    if sc == "oracle-check":
        return {"seed": args.seed}, _section_oracle(args.seed, tol), None
    if sc == "all":
        params = {"rm": args.rm, "theta": args.theta, "nmax": args.nmax,
                  "margin": args.margin, "orders": args.orders, "seed": args.seed}
        rep = AxiomReport()
        rep.extend(_section_sl2(args.rm ** 2, "half_integer", tol))
        rep.extend(_section_quadruple(args.rm, args.theta, args.nmax, args.margin, tol))
        rep.extend(_section_crosscheck(args.rm, args.theta, 16, tol))
        rep.extend(_section_reconstruct(args.rm, args.theta, args.nmax,
                                        args.margin, args.orders, tol))
        rep.extend(_section_finite_verify(1 + 2j, tol))
        rep.extend(_section_finite_distance(2.0, tol))
        rep.extend(_section_oracle(args.seed, tol))
        return params, rep, None
    if sc == "sweep":
        return _run_sweep(args, tol)
    raise ConfigError(f"unknown subcommand {sc}")


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise ConfigError(f"bad complex literal {text!r}") from exc


def _parse_grid(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}") from exc
    if not values:
        raise ConfigError("empty grid")
    return values


def _run_sweep(args: argparse.Namespace, tol: dict) -> tuple[dict, None, dict]:
    rms = _parse_grid(args.rm)
    thetas = _parse_grid(args.theta)
    params = {"rm": rms, "theta": thetas, "nmax": args.nmax, "margin": args.margin}
    grid = []
    matrix = []
    for rm in rms:
        row = []
        for theta in thetas:
            point = {"rm": rm, "theta": theta, "nmax": args.nmax,
                     "margin": args.margin}
            try:
                rep = _section_quadruple(rm, theta, args.nmax, args.margin, tol)
                entry = {"params": point, "checks": rep.as_dicts(),
                         "passed": rep.passed, "skipped": False, "notes": ""}
                row.append(rep.passed)
            except ValueError as exc:
                entry = {"params": point, "checks": [], "passed": False,
                         "skipped": True,
                         "notes": f"truncation too small: {exc}"}
                row.append(None)
            grid.append(entry)
        matrix.append(row)
    effective = [cell for row in matrix for cell in row if cell is not None]
    aggregate = {"passed": bool(effective) and all(effective),
                 "pass_matrix": matrix, "rm_values": rms, "theta_values": thetas}
    return params, None, {"grid": grid, "aggregate": aggregate}


def _render_json(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _render_csv(payload: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "residual", "tolerance", "pass", "margin", "notes"])
    if "checks" in payload:
        for row in payload["checks"]:
            writer.writerow([row["id"], repr(row["residual"]), repr(row["tolerance"]),
                             row["pass"], row["margin"], row["notes"]])
    else:
        for entry in payload.get("grid", []):
            prefix = f"rm={entry['params']['rm']},theta={entry['params']['theta']}:"
            if entry["skipped"]:
                writer.writerow([prefix + "skipped", "", "", "", "", entry["notes"]])
            for row in entry["checks"]:
                writer.writerow([prefix + row["id"], repr(row["residual"]),
                                 repr(row["tolerance"]), row["pass"], row["margin"],
                                 row["notes"]])
    return buf.getvalue()


def _write_atomic(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".specquad-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(argv: Sequence[str] | None = None) -> int:
    parser, subparsers = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            defaults = {action.dest: action.default
                        for action in subparsers[args.subcommand]._actions
                        if action.dest != "help"}
            _apply_config(args, defaults, _load_config(args.config))
        tol = _parse_tolerances(args.tol)

        params, rep, extra = _run_subcommand(args, tol)
        payload: dict = {"version": REPORT_VERSION, "subcommand": args.subcommand,
                         "params": params}
        if rep is not None:
            payload["checks"] = rep.as_dicts()
            payload["passed"] = rep.passed
        if extra is not None:
            payload.update(extra)
            payload["passed"] = extra["aggregate"]["passed"]
    except ConfigError as exc:
        print(f"specquad: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"specquad: error: {exc}", file=sys.stderr)
        return 2

    fmt = args.format or "json"
    text = _render_json(payload) if fmt == "json" else _render_csv(payload)
    if args.output:
        _write_atomic(args.output, text)
    else:
        sys.stdout.write(text)
    return 0 if payload["passed"] else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
