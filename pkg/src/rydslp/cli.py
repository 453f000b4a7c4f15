"""Command-line front end.

Examples
--------
    rydslp dispersion --preset fig2 --output out/
    rydslp population --preset fig2 --grid -3:3:601
    rydslp scatter --preset rb87 --no-impurity
    rydslp scan-n --preset fig3 --grid 40:100:7
    rydslp scan-ratio --preset fig3 --set omega_s=0.5 --grid 0:20:81
    rydslp verify --output out/
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import checks, scattering, spectrum
from .errors import ConfigParseError, ParameterError, SimulationError
from .params import MICROMETRE, RB87, ModelParams, load_params

log = logging.getLogger("rydslp")

COMMANDS = ("dispersion", "population", "darkstate", "dressed-darkstate",
            "scatter", "scan-n", "scan-ratio", "verify")

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_VERIFY = 0, 2, 3, 4

DEFAULT_GRIDS = {
    "dispersion": "-1:1:401",
    "population": "-3:3:601",
    "scan-n": "40:100:7",
    "scan-ratio": "0:20:81",
}

SCATTER_COLUMNS = ("scan_variable", "T", "R", "A", "T_intensity", "R_intensity",
                   "A_intensity", "converged_flag")


class ComputationError(SimulationError):
    def __init__(self, command: str, cause: Exception):
        self.command = command
        self.cause = cause
        super().__init__(f"{command}: {type(cause).__name__}: {cause}")


@dataclass
class RunConfig:
    command: str
    params: dict[str, Any] = field(default_factory=lambda: {"preset": "fig2"})
    medium: dict[str, Any] | None = None
    output: Path = Path("out")
    grid: str | None = None
    no_impurity: bool = False
    profile: bool = False
    n: int | None = None
    seed: int = checks.DEFAULT_SEED


def _preset_medium(preset: str | None) -> dict[str, Any]:
    if preset in ("fig3", "rb87"):
        return {
            "units": "um",
            "length": RB87.slab_length / MICROMETRE,
            "z0": RB87.slab_length / MICROMETRE / 2,
            "interaction": {"type": "n", "n": RB87.n_ref, "n_ref": RB87.n_ref,
                            "c6_ref": RB87.c6_ref_si / MICROMETRE**6},
        }
    # canonical slab of optical depth 3 without impurity
    return {"units": "l_abs", "length": 3.0}


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _assign(target: dict, dotted: str, value: Any) -> None:
    keys = dotted.split(".")
    for key in keys[:-1]:
        target = target.setdefault(key, {})
        if not isinstance(target, dict):
            raise ConfigParseError(f"cannot set {dotted!r}: {key!r} is not an object")
    target[keys[-1]] = value


def build_config(args: argparse.Namespace) -> RunConfig:
    doc: dict[str, Any] = {}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigParseError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigParseError("config must be a JSON object")
    params = dict(doc.get("params", {}))
    if args.preset:
        params = {"preset": args.preset, **{k: v for k, v in params.items() if k != "preset"}}
    if not params:
        params = {"preset": "fig2"}
    medium = doc.get("medium")
    if medium is None:
        medium = _preset_medium(params.get("preset"))
    tree = {"params": params, "medium": medium}
    for item in args.set or []:
        if "=" not in item:
            raise ConfigParseError(f"--set expects key=value, got {item!r}")
        key, text = item.split("=", 1)
        if not key.startswith(("params.", "medium.")):
            key = "params." + key
        _assign(tree, key, _parse_value(text))
    return RunConfig(
        command=args.command,
        params=tree["params"],
        medium=tree["medium"],
        output=Path(args.output or doc.get("output", "out")),
        grid=args.grid or doc.get("grid"),
        no_impurity=args.no_impurity,
        profile=getattr(args, "profile", False),
        n=getattr(args, "n", None),
        seed=args.seed if args.seed is not None else doc.get("seed", checks.DEFAULT_SEED),
    )


def parse_grid(text: str) -> np.ndarray:
    try:
        start, stop, count = text.split(":")
        values = np.linspace(float(start), float(stop), int(count))
    except ValueError as exc:
        raise ConfigParseError(f"grid must be start:stop:count, got {text!r}") from exc
    if len(values) < 1:
        raise ConfigParseError("grid needs at least one point")
    return values


def resolve_params(cfg: RunConfig) -> ModelParams:
    try:
        return load_params(cfg.params)
    except ParameterError as exc:
        raise ConfigParseError(str(exc)) from exc
    except (TypeError, ValueError) as exc:
        raise ConfigParseError(f"bad parameter record: {exc}") from exc


def _is_si(cfg: RunConfig) -> bool:
    return cfg.params.get("units") == "si" or cfg.params.get("preset") in ("fig3", "rb87")


def resolve_medium(cfg: RunConfig, p: ModelParams) -> scattering.MediumSpec:
    obj = dict(cfg.medium or {})
    units = obj.pop("units", "l_abs")
    if units == "l_abs":
        length_unit, freq_unit = p.l_abs, p.gamma
    elif units == "um":
        if not _is_si(cfg):
            raise ConfigParseError("medium in um needs SI parameters")
        length_unit, freq_unit = MICROMETRE, 1.0
    else:
        raise ConfigParseError(f"unknown medium units {units!r}")
    if cfg.no_impurity:
        obj.pop("interaction", None)
        obj.pop("z0", None)
    try:
        return scattering.medium_from_dict(obj, length_unit, freq_unit)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigParseError(f"bad medium record: {exc}") from exc


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".15g")


def provenance(cfg: RunConfig, p: ModelParams, medium: scattering.MediumSpec | None = None) -> str:
    record = {"command": cfg.command, "params": p.as_dict(), "config_params": cfg.params}
    if medium is not None:
        record["medium"] = cfg.medium
        record["no_impurity"] = cfg.no_impurity
    return "# rydslp " + json.dumps(record, sort_keys=True)


def write_csv(path: Path, header_comment: str, columns, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write(header_comment + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    log.info("wrote %s", path)
    return path


def write_json(path: Path, obj) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    log.info("wrote %s", path)
    return path


def state_record(state: spectrum.PolaritonState) -> dict:
    return {
        "eigenvalue": [state.eigenvalue.real, state.eigenvalue.imag],
        "amplitudes": {name: [a.real, a.imag] for name, a in zip(spectrum.BASIS, state.amplitudes)},
        "dark_overlap": state.dark_overlap,
        "intermediate_population": state.intermediate_population,
    }


def _scatter_row(label, res: scattering.ScatterResult):
    return (label, res.T, res.R, res.A, res.T_intensity, res.R_intensity, res.A_intensity, res.converged)


def _scan_rows(table: scattering.ScanTable, integer: bool = False):
    rows = [_scatter_row(int(r.value) if integer else r.value, r.result) for r in table.rows]
    rows.append(_scatter_row("baseline", table.baseline))
    return rows


PLOT_SCRIPT = '''"""Plot the CSV files written by rydslp in this directory (needs matplotlib)."""
import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = Path(__file__).parent


def load(name):
    with (HERE / name).open() as fh:
        rows = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(rows))


def plot_fig2a():
    rows = load("fig2a.csv")
    k = [float(r["k_labs"]) for r in rows]
    plt.figure()
    plt.plot(k, [float(r["im_omega_over_gammabar"]) for r in rows], "k-", label="numeric")
    plt.plot(k, [float(r["im_omega_analytic_over_gammabar"]) for r in rows], "--", color="gray",
             label="small-k")
    plt.ylim(min(float(r["im_omega_over_gammabar"]) for r in rows) * 1.1, 0.05)
    plt.xlabel("k l_abs"); plt.ylabel("Im w / gamma_bar"); plt.legend()
    plt.savefig(HERE / "fig2a.png", dpi=150)


def plot_fig2b():
    rows = load("fig2b.csv")
    plt.figure()
    plt.plot([float(r["delta_over_omega_s"]) for r in rows], [float(r["pop_e_plus_minus"]) for r in rows])
    plt.xlabel("delta / Omega_s"); plt.ylabel("|P+|^2 + |P-|^2")
    plt.savefig(HERE / "fig2b.png", dpi=150)


def plot_fig3(name, xlabel):
    rows = load(name)
    data = [r for r in rows if r["scan_variable"] != "baseline"]
    base = [r for r in rows if r["scan_variable"] == "baseline"]
    x = [float(r["scan_variable"]) for r in data]
    plt.figure()
    for key, style in (("T", "b-"), ("R", "r-"), ("A", "k-")):
        plt.plot(x, [float(r[key]) for r in data], style, label=key)
        if base:
            plt.axhline(float(base[0][key]), ls=":", color=style[0])
    plt.xlabel(xlabel); plt.legend()
    plt.savefig(HERE / name.replace(".csv", ".png"), dpi=150)


if __name__ == "__main__":
    if (HERE / "fig2a.csv").exists():
        plot_fig2a()
    if (HERE / "fig2b.csv").exists():
        plot_fig2b()
    if (HERE / "fig3-upper.csv").exists():
        plot_fig3("fig3-upper.csv", "n")
    if (HERE / "fig3-lower.csv").exists():
        plot_fig3("fig3-lower.csv", "Omega_c / Omega_s")
'''


def write_plot_script(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "plot_figures.py").write_text(PLOT_SCRIPT, encoding="utf-8")


def cmd_dispersion(cfg: RunConfig, p: ModelParams) -> list[Path]:
    kappa = parse_grid(cfg.grid or DEFAULT_GRIDS["dispersion"])
    branch = spectrum.dispersion_scan(p, kappa / p.l_abs)
    w = branch.omega_over_gamma_bar
    try:
        analytic = spectrum.analytic_dispersion(p, branch.k) / p.gamma_bar
    except SimulationError:
        analytic = np.full(len(branch.k), np.nan, dtype=complex)
    rows = zip(branch.kappa, w.real, w.imag, branch.populations, branch.dark_overlaps, analytic.imag)
    columns = ("k_labs", "re_omega_over_gammabar", "im_omega_over_gammabar", "pop_e_plus_minus",
               "dark_overlap", "im_omega_analytic_over_gammabar")
    write_plot_script(cfg.output)
    return [write_csv(cfg.output / "fig2a.csv", provenance(cfg, p), columns, rows)]


def cmd_population(cfg: RunConfig, p: ModelParams) -> list[Path]:
    ratios = parse_grid(cfg.grid or DEFAULT_GRIDS["population"])
    scan = spectrum.composition_scan(p, ratios)
    rows = [(r, s.intermediate_population, s.eigenvalue.real / p.gamma_bar,
             s.eigenvalue.imag / p.gamma_bar, s.dark_overlap) for r, s in scan]
    columns = ("delta_over_omega_s", "pop_e_plus_minus", "re_omega_over_gammabar",
               "im_omega_over_gammabar", "dark_overlap")
    write_plot_script(cfg.output)
    return [write_csv(cfg.output / "fig2b.csv", provenance(cfg, p), columns, rows)]


def cmd_darkstate(cfg: RunConfig, p: ModelParams) -> list[Path]:
    state = spectrum.dark_state(p)
    record = {"params": p.as_dict(), "state": state_record(state)}
    return [write_json(cfg.output / "darkstate.json", record)]


def cmd_dressed(cfg: RunConfig, p: ModelParams) -> list[Path]:
    state, deficit = spectrum.dressed_dark_state(p)
    record = {"params": p.as_dict(), "state": state_record(state), "overlap_deficit": deficit}
    return [write_json(cfg.output / "dressed_darkstate.json", record)]


def cmd_scatter(cfg: RunConfig, p: ModelParams) -> list[Path]:
    med = resolve_medium(cfg, p)
    rows = []
    result = scattering.scatter(p, med, profile=cfg.profile)
    if med.impurity is not None:
        rows.append(_scatter_row("impurity", result))
        rows.append(_scatter_row("no_impurity", scattering.scatter(p, med.without_impurity())))
    else:
        rows.append(_scatter_row("no_impurity", result))
    paths = [write_csv(cfg.output / "scatter.csv", provenance(cfg, p, med), SCATTER_COLUMNS, rows)]
    if result.profile is not None:
        z, ep, em = result.profile
        prof_rows = zip(z, ep.real, ep.imag, em.real, em.imag)
        paths.append(write_csv(cfg.output / "profile.csv", provenance(cfg, p, med),
                               ("z", "re_e_plus", "im_e_plus", "re_e_minus", "im_e_minus"), prof_rows))
    return paths


def cmd_scan_n(cfg: RunConfig, p: ModelParams) -> list[Path]:
    med = resolve_medium(cfg, p)
    n_grid = [int(round(n)) for n in parse_grid(cfg.grid or DEFAULT_GRIDS["scan-n"])]
    table = scattering.scan_quantum_number(p, med, n_grid)
    write_plot_script(cfg.output)
    return [write_csv(cfg.output / "fig3-upper.csv", provenance(cfg, p, med), SCATTER_COLUMNS,
                      _scan_rows(table, integer=True))]


def cmd_scan_ratio(cfg: RunConfig, p: ModelParams) -> list[Path]:
    med = resolve_medium(cfg, p)
    ratios = parse_grid(cfg.grid or DEFAULT_GRIDS["scan-ratio"])
    table = scattering.scan_ratio(p, med, ratios, n=cfg.n)
    write_plot_script(cfg.output)
    return [write_csv(cfg.output / "fig3-lower.csv", provenance(cfg, p, med), SCATTER_COLUMNS,
                      _scan_rows(table))]


def cmd_verify(cfg: RunConfig, p: ModelParams) -> list[Path]:
    report = checks.summarize(checks.run_all(cfg.seed))
    report["seed"] = cfg.seed
    for r in report["results"]:
        log.info("%s %s observed=%.6g", "PASS" if r["pass"] else "FAIL", r["test_name"], r["observed"])
    return [write_json(cfg.output / "report.json", report)]


HANDLERS = {
    "dispersion": cmd_dispersion,
    "population": cmd_population,
    "darkstate": cmd_darkstate,
    "dressed-darkstate": cmd_dressed,
    "scatter": cmd_scatter,
    "scan-n": cmd_scan_n,
    "scan-ratio": cmd_scan_ratio,
    "verify": cmd_verify,
}


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    p = resolve_params(cfg)
    try:
        HANDLERS[cfg.command](cfg, p)
    except ConfigParseError:
        raise
    except SimulationError as exc:
        raise ComputationError(cfg.command, exc) from exc
    if cfg.command == "verify":
        report = json.loads((cfg.output / "report.json").read_text())
        return EXIT_OK if report["overall_pass"] else EXIT_VERIFY
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rydslp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="JSON file with params/medium/output/grid keys")
        cmd.add_argument("--preset", choices=("fig2", "fig3", "rb87"))
        cmd.add_argument("--set", action="append", metavar="KEY=VALUE",
                         help="override, e.g. omega_c=2 or medium.z0=10 (repeatable)")
        cmd.add_argument("--output", help="output directory (default ./out)")
        cmd.add_argument("--grid", help="start:stop:count")
        cmd.add_argument("--no-impurity", action="store_true")
        cmd.add_argument("--seed", type=int)
        if name == "scatter":
            cmd.add_argument("--profile", action="store_true", help="also write profile.csv")
        if name == "scan-ratio":
            cmd.add_argument("--n", type=int, help="impurity quantum number (default 60)")
    return parser


def _error_record(kind: str, exc: Exception, command: str | None) -> None:
    record = {"error": kind, "type": type(exc).__name__, "message": str(exc), "command": command}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = build_config(args)
        return run(cfg)
    except ConfigParseError as exc:
        _error_record("ConfigParseError", exc, args.command)
        return EXIT_CONFIG
    except ComputationError as exc:
        _error_record("ComputationError", exc.cause, args.command)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
