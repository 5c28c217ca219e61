"""Command line front end: ``sweep``, ``chi``, ``cycle`` and ``constants``.

Exit status: 0 ok, 2 usage/config error, 3 input parse error, 4 runtime error.
Data go to stdout (CSV or JSON, 17 significant digits); warnings go to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import statistics
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .correlations import (
    concurrence_wootters,
    discord_1norm_closed,
    discord_limit,
    entanglement_of_formation,
    entanglement_temperature,
)
from .cycle import audit_ok, cycle_to_dict, run_cycle
from .ergotropy import ergotropy_closed_form, ergotropy_random_unitary_bound, ergotropy_susceptibility_regime
from .errors import ChiParseError, InvalidArgumentError
from .magnetometry import (
    PER_MOLE_OF,
    bleaney_bowers,
    chi_summary,
    correlations_from_chi,
    format_number,
    ingest_chi_csv,
    magnetization,
)
from .model import DimerParams, crossing_field, self_hamiltonian
from .thermal import gibbs_matrix, populations
from .units import CONSTANTS, N_A, chi_from_molar_moment

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_RUNTIME = 0, 2, 3, 4

SWEEP_COLUMNS = {
    "T_K": "grid temperature (K)",
    "B_T": "grid or fixed field B_z (T)",
    "ergotropy_J_per_mol": "ergotropy_closed_form(p, T).per_mole",
    "ergotropy_norm_E0": "ergotropy_closed_form(p, T).normalized_to_thermal_max",
    "ergotropy_norm_2E0": "ergotropy_closed_form(p, T).normalized_to_2E0",
    "ergotropy_regime_J_per_mol": "ergotropy_susceptibility_regime(p, T).per_mole",
    "discord": "discord_1norm_closed(p, T)",
    "discord_limit": "discord_limit(p, T)",
    "concurrence": "concurrence_wootters(gibbs_state(p, T))",
    "eof": "entanglement_of_formation(concurrence)",
    "chi": "bleaney_bowers(p, T) in the selected unit system",
    "magnetization_J_per_T_per_mol": "magnetization(p, T, per_mole=True)",
    "pop_beta_minus": "populations(p, T).beta_minus",
    "pop_up_up": "populations(p, T).up_up",
    "pop_beta_plus": "populations(p, T).beta_plus",
    "pop_down_down": "populations(p, T).down_down",
    "uu_over_singlet": "1 if populations(p, T).up_up > populations(p, T).beta_minus else 0",
}
PER_MOLE_COLUMNS = {"ergotropy_J_per_mol", "ergotropy_regime_J_per_mol", "chi", "magnetization_J_per_T_per_mol"}

CHI_COLUMNS = {
    "T_K": "input temperature, echoed",
    "chi": "input susceptibility, echoed in the file's unit system",
    "w": "invert_chi(T, chi, g).w",
    "ergotropy_regime_J_per_mol": "ergotropy_from_susceptibility(p, T, chi).per_mole",
    "ergotropy_norm_E0": "ergotropy_from_susceptibility(p, T, chi).normalized_to_thermal_max",
    "ergotropy_norm_2E0": "ergotropy_from_susceptibility(p, T, chi).normalized_to_2E0",
    "discord_limit": "ergotropy / (2 E0)",
    "concurrence": "max(0, (w - 3)/(w + 3))",
    "eof": "entanglement_of_formation(concurrence)",
    "flags": "number of flags raised for the row",
}

CYCLE_FIELDS = {
    "work_extracted": "ergotropy_general(state before discharge, H0), per mole",
    "heat_absorbed": "Tr[H (rho_gibbs - |dd><dd|)], per mole",
    "audit_residual": "(Tr[H |dd><dd|] - Tr[H rho_th]) + heat_absorbed",
    "work_normalized_E0": "work_extracted / (E0 N_A)",
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    params: DimerParams
    axis: str = "T"
    start: float = 2.0
    stop: float = 800.0
    points: int = 200
    scale: str = "linear"
    T_kelvin: float = 293.0
    columns: list = field(default_factory=lambda: list(SWEEP_COLUMNS))
    per_mole_of: str = "dimer"
    unit_system: str = "si"
    fmt: str = "csv"

    def validate(self):
        if self.axis not in ("T", "B"):
            raise UsageError(f"axis must be T or B, got {self.axis!r}")
        if self.scale not in ("linear", "log"):
            raise UsageError(f"scale must be linear or log, got {self.scale!r}")
        if self.points < 2:
            raise UsageError("points must be >= 2")
        if not self.start < self.stop:
            raise UsageError("start must be < stop")
        if self.axis == "T" and self.start <= 0:
            raise UsageError("T sweep start must be > 0")
        if self.scale == "log" and self.start <= 0:
            raise UsageError("log sweep start must be > 0")
        if self.axis == "B" and self.start < 0:
            raise UsageError("B sweep start must be >= 0")
        if not self.T_kelvin > 0:
            raise UsageError("T_kelvin must be > 0")
        if self.per_mole_of not in PER_MOLE_OF:
            raise UsageError(f"per_mole_of must be one of {PER_MOLE_OF}")
        unknown = [c for c in self.columns if c not in SWEEP_COLUMNS]
        if unknown:
            raise UsageError(f"unknown columns: {', '.join(unknown)}")
        return self

    def grid(self):
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


def read_param_file(path):
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected 'key = value'")
                k, v = (s.strip() for s in line.split("=", 1))
                out[k.replace("-", "_")] = v
    except OSError as exc:
        raise UsageError(f"cannot read param file: {exc}") from None
    return out


_FILE_KEYS = {
    "J_kelvin": float, "g": float, "Bz_tesla": float, "unit_system": str, "per_mole_of": str,
    "format": str, "seed": int, "axis": str, "start": float, "stop": float, "points": int,
    "scale": str, "T_kelvin": float, "columns": str, "T_bath": float, "n_cycles": int,
    "unitary_samples": int, "chi0": float, "jobs": int,
}
_DEFAULTS = {
    "J_kelvin": 748.0, "g": 2.0, "Bz_tesla": 1e-4, "unit_system": None, "per_mole_of": "dimer",
    "format": None, "seed": 0, "axis": "T", "start": 2.0, "stop": 800.0, "points": 200,
    "scale": "linear", "T_kelvin": 293.0, "columns": None, "T_bath": 293.0, "n_cycles": 1,
    "unitary_samples": 0, "chi0": 0.0, "jobs": 1,
}


def resolve(args):
    """Merge defaults, param file and flags (flags win)."""
    merged = dict(_DEFAULTS)
    if args.param_file:
        for k, v in read_param_file(args.param_file).items():
            if k not in _FILE_KEYS:
                raise UsageError(f"unknown key {k!r} in param file")
            try:
                merged[k] = _FILE_KEYS[k](v)
            except ValueError:
                raise UsageError(f"bad value for {k}: {v!r}") from None
    for k in _FILE_KEYS:
        v = getattr(args, k, None)
        if v is not None:
            merged[k] = v
    return merged


def params_from(cfg):
    try:
        return DimerParams.from_kelvin(cfg["J_kelvin"], cfg["g"], cfg["Bz_tesla"])
    except InvalidArgumentError as exc:
        raise UsageError(str(exc)) from None


def _mole_scale(per_mole_of):
    return 0.5 if per_mole_of == "cu_ion" else 1.0


def _json_clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    return obj


def _cell(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return format_number(v)


def emit_table(rows, columns, fmt, out, metadata=None, summary=None):
    if fmt == "json":
        doc = {"columns": columns, "rows": [dict(zip(columns, r)) for r in rows]}
        if summary is not None:
            doc["summary"] = summary
        if metadata is not None:
            doc["metadata"] = metadata
        out.write(json.dumps(_json_clean(doc), indent=2) + "\n")
        return
    out.write(",".join(columns) + "\n")
    for r in rows:
        out.write(",".join(_cell(v) for v in r) + "\n")
    if summary:
        for k, v in summary.items():
            out.write(f"# {k} = {_cell(v)}\n")


def sweep_row(p, T, columns, unit_system="si", per_mole_of="dimer"):
    """One sweep row; each value comes from exactly one library call."""
    k = _mole_scale(per_mole_of)
    vals = {"T_K": float(T), "B_T": p.B_z}
    need = set(columns)
    if need & {"ergotropy_J_per_mol", "ergotropy_norm_E0", "ergotropy_norm_2E0"}:
        e = ergotropy_closed_form(p, T)
        vals.update(ergotropy_J_per_mol=e.per_mole * k, ergotropy_norm_E0=e.normalized_to_thermal_max,
                    ergotropy_norm_2E0=e.normalized_to_2E0)
    if "ergotropy_regime_J_per_mol" in need:
        vals["ergotropy_regime_J_per_mol"] = ergotropy_susceptibility_regime(p, T).per_mole * k
    if "discord" in need:
        vals["discord"] = discord_1norm_closed(p, T)
    if "discord_limit" in need:
        vals["discord_limit"] = discord_limit(p, T)
    if need & {"concurrence", "eof"}:
        c = concurrence_wootters(gibbs_matrix(p, T))
        vals.update(concurrence=c, eof=entanglement_of_formation(c))
    if "chi" in need:
        vals["chi"] = chi_from_molar_moment(bleaney_bowers(p, T) * k, unit_system)
    if "magnetization_J_per_T_per_mol" in need:
        vals["magnetization_J_per_T_per_mol"] = magnetization(p, T, per_mole=True) * k
    if need & {"pop_beta_minus", "pop_up_up", "pop_beta_plus", "pop_down_down", "uu_over_singlet"}:
        pop = populations(p, T)
        vals.update(pop_beta_minus=pop.beta_minus, pop_up_up=pop.up_up, pop_beta_plus=pop.beta_plus,
                    pop_down_down=pop.down_down, uu_over_singlet=int(pop.up_up > pop.beta_minus))
    return [vals[c] for c in columns]


def cmd_sweep(config, out=None, jobs=1):
    """Tabulate the requested columns over a T or B grid; returns the rows."""
    config.validate()
    out = sys.stdout if out is None else out
    p = config.params
    grid = config.grid()

    def point(x):
        if config.axis == "T":
            return sweep_row(p, x, config.columns, config.unit_system, config.per_mole_of)
        return sweep_row(p.with_field(float(x)), config.T_kelvin, config.columns, config.unit_system,
                         config.per_mole_of)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(point, grid))
    else:
        rows = [point(x) for x in grid]
    meta = {"command": "sweep", "axis": config.axis, "J_kelvin": p.J_kelvin, "g": p.g, "B_z": p.B_z,
            "per_mole_of": config.per_mole_of, "unit_system": config.unit_system, "version": __version__}
    emit_table(rows, config.columns, config.fmt, out, metadata=meta)
    return rows


def _scale_warning(curve, p):
    """Flag a likely unit-system mix-up: data > 1e3 away from the model scale."""
    ratios = []
    for T, c in zip(curve.T, curve.chi_molar()):
        model = bleaney_bowers(p, T)
        if c > 0 and model > 0:
            ratios.append(c / model)
    if not ratios:
        return None
    r = statistics.median(ratios)
    if r > 1e3 or r < 1e-3:
        return (f"susceptibility magnitudes are {r:.3g}x the model scale; "
                f"check --unit-system (file declared {curve.unit_system!r})")
    return None


def cmd_chi(path, config, out=None, err=None, chi0=0.0):
    """Ergotropy/correlation readout per row of a susceptibility file."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    p = config.params
    curve = ingest_chi_csv(path, config.unit_system, chi0=chi0, per_mole_of=config.per_mole_of)
    rows = correlations_from_chi(curve, p)
    k = _mole_scale(config.per_mole_of)
    warnings_ = []
    w = _scale_warning(curve, p)
    if w:
        warnings_.append(w)
    table = []
    for r in rows:
        e = r.ergotropy
        table.append([
            r.T, r.chi, r.w,
            e.per_mole * k if e else math.nan,
            e.normalized_to_thermal_max if e else math.nan,
            e.normalized_to_2E0 if e else math.nan,
            r.discord, r.concurrence, r.eof, len(r.flags),
        ])
        if r.flags:
            warnings_.append(f"T = {format_number(r.T)} K: " + "; ".join(r.flags))
    summary = chi_summary(rows, p)
    summary["max_ergotropy_J_per_mol"] *= k
    summary["warnings"] = len(warnings_)
    meta = {"command": "chi", "source": curve.source, "unit_system": curve.unit_system,
            "per_mole_of": config.per_mole_of, "chi0": chi0, "J_kelvin": p.J_kelvin, "g": p.g,
            "B_z": p.B_z, "version": __version__}
    emit_table(table, list(CHI_COLUMNS), config.fmt, out, metadata=meta, summary=summary)
    for w in warnings_:
        err.write(f"warning: {w}\n")
    if warnings_:
        err.write(f"warnings: {len(warnings_)}\n")
    return table, summary, warnings_


def cmd_cycle(config, T_bath, n, out=None, unitary_samples=0, seed=0):
    """Run the cycle, serialise the trace, and report the audit per cycle."""
    out = sys.stdout if out is None else out
    p = config.params
    trace = run_cycle(p, T_bath, n)
    k = _mole_scale(config.per_mole_of)
    doc = cycle_to_dict(trace, per_mole=N_A * k, energy_unit="J/mol")
    e0 = p.E0 * N_A * k
    for c in doc["cycles"]:
        c["work_normalized_E0"] = c["work_extracted"] / e0 if e0 > 0 else 0.0
        c["audit_ok"] = abs(c["audit_residual"]) <= 1e-12 * p.J * N_A * k
    if unitary_samples > 0:
        rho = trace.steps[0].state
        b = ergotropy_random_unitary_bound(rho, self_hamiltonian(p), unitary_samples, seed)
        doc["haar_lower_bound_J_per_mol"] = b * N_A * k
        doc["metadata"]["haar_samples"] = unitary_samples
        doc["metadata"]["seed"] = seed
    doc["metadata"].update({"J_kelvin": p.J_kelvin, "g": p.g, "B_z": p.B_z, "per_mole_of": config.per_mole_of,
                            "audit_ok": audit_ok(trace, p.J), "version": __version__})
    if config.fmt == "csv":
        cols = ["cycle", "work_extracted", "heat_absorbed", "audit_residual", "work_normalized_E0", "audit_ok"]
        emit_table([[c[x] if x != "audit_ok" else str(c[x]).lower() for x in cols] for c in doc["cycles"]],
                   cols, "csv", out)
    else:
        out.write(json.dumps(_json_clean(doc), indent=2) + "\n")
    return doc


def cmd_constants(p, fmt, out=None):
    out = sys.stdout if out is None else out
    vals = {
        "k_B_J_per_K": CONSTANTS.k_B,
        "mu_B_J_per_T": CONSTANTS.mu_B,
        "N_A_per_mol": CONSTANTS.N_A,
        "mu_0_N_per_A2": CONSTANTS.mu_0,
        "J_joule": p.J,
        "E0_joule": p.E0,
        "E0_J_per_mol": p.E0 * N_A,
        "crossing_field_T": crossing_field(p),
        "entanglement_temperature_K": entanglement_temperature(p) if p.J > 0 else math.nan,
    }
    emit_table([[k, v] for k, v in vals.items()], ["name", "value"], fmt, out)
    return vals


def _common(parser):
    g = parser.add_argument_group("model and output")
    g.add_argument("--param-file", help="flat 'key = value' config; flags override it")
    g.add_argument("--J-kelvin", dest="J_kelvin", type=float, help="exchange J/k_B in K (default 748)")
    g.add_argument("--g", type=float, help="Lande g factor (default 2)")
    g.add_argument("--Bz-tesla", dest="Bz_tesla", type=float, help="static field in T (default 1e-4)")
    g.add_argument("--unit-system", dest="unit_system", choices=("si", "cgs"),
                   help="susceptibility units: si = m^3/mol, cgs = emu/mol")
    g.add_argument("--per-mole-of", dest="per_mole_of", choices=PER_MOLE_OF)
    g.add_argument("--format", choices=("csv", "json"))
    g.add_argument("--seed", type=int)
    g.add_argument("--explain", action="store_true", help="print the column -> operation map and exit")


def build_parser():
    ap = argparse.ArgumentParser(prog="spinbattery", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sweep", help="tabulate observables over a T or B grid")
    _common(sp)
    sp.add_argument("--axis", choices=("T", "B"))
    sp.add_argument("--start", type=float)
    sp.add_argument("--stop", type=float)
    sp.add_argument("--points", type=int)
    sp.add_argument("--scale", choices=("linear", "log"))
    sp.add_argument("--T-kelvin", dest="T_kelvin", type=float, help="temperature for a B sweep")
    sp.add_argument("--columns", help="comma-separated subset of columns")
    sp.add_argument("--jobs", type=int, help="worker threads (output order is fixed)")

    cp = sub.add_parser("chi", help="reconstruct ergotropy and correlations from chi(T) data")
    _common(cp)
    cp.add_argument("file", nargs="?")
    cp.add_argument("--chi0", type=float, help="constant background subtracted from chi")

    yp = sub.add_parser("cycle", help="run the discharge/recharge cycle")
    _common(yp)
    yp.add_argument("--T-bath", dest="T_bath", type=float)
    yp.add_argument("--n-cycles", dest="n_cycles", type=int)
    yp.add_argument("--unitary-samples", dest="unitary_samples", type=int,
                    help="also report a Haar-sampled lower bound on the initial ergotropy")

    kp = sub.add_parser("constants", help="print constants and derived scales")
    _common(kp)
    return ap


def _explain(command, out):
    table = {"sweep": SWEEP_COLUMNS, "chi": CHI_COLUMNS, "cycle": CYCLE_FIELDS}.get(command, {})
    out.write("column,operation\n")
    for k, v in table.items():
        out.write(f"{k},\"{v}\"\n")


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.explain:
        _explain(args.command, out)
        return EXIT_OK
    try:
        cfg = resolve(args)
        p = params_from(cfg)
        fmt = cfg["format"] or ("json" if args.command == "cycle" else "csv")
        if fmt not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {fmt!r}")
        columns = list(SWEEP_COLUMNS) if not cfg["columns"] else [c.strip() for c in cfg["columns"].split(",")]
        config = RunConfig(params=p, axis=cfg["axis"], start=cfg["start"], stop=cfg["stop"],
                           points=cfg["points"], scale=cfg["scale"], T_kelvin=cfg["T_kelvin"],
                           columns=columns, per_mole_of=cfg["per_mole_of"],
                           unit_system=cfg["unit_system"] or "si", fmt=fmt)
        if args.command == "sweep":
            config.validate()
    except UsageError as exc:
        err.write(f"spinbattery: error: {exc}\n")
        return EXIT_USAGE

    if args.command == "sweep":
        try:
            cmd_sweep(config, out, jobs=max(1, cfg["jobs"]))
        except InvalidArgumentError as exc:
            err.write(f"spinbattery: error: {exc}\n")
            return EXIT_RUNTIME
        return EXIT_OK

    if args.command == "chi":
        if not args.file:
            err.write("spinbattery: error: chi needs an input file\n")
            return EXIT_USAGE
        if cfg["unit_system"] is None:
            err.write("spinbattery: error: chi needs --unit-system (si or cgs); units are never inferred\n")
            return EXIT_USAGE
        try:
            cmd_chi(args.file, config, out, err, chi0=cfg["chi0"])
        except (ChiParseError, InvalidArgumentError, OSError, UnicodeDecodeError) as exc:
            err.write(f"spinbattery: parse error: {exc}\n")
            return EXIT_PARSE
        return EXIT_OK

    if args.command == "cycle":
        try:
            cmd_cycle(config, cfg["T_bath"], cfg["n_cycles"], out, cfg["unitary_samples"], cfg["seed"])
        except (InvalidArgumentError, ValueError, ArithmeticError) as exc:
            err.write(f"spinbattery: runtime error: {exc}\n")
            return EXIT_RUNTIME
        return EXIT_OK

    cmd_constants(p, fmt, out)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
