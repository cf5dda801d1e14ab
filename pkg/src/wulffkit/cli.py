"""Command-line entry point: ``wulffkit {run,study,sweep} CONFIG``.

Exit codes: 0 when every hard invariant holds, 1 for configuration errors,
2 when an invariant is violated.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .anisotropy import anisotropy_from_dict, check_convexity
from .sphere import make_grid
from .surface import sample_surface, surface_from_dict
from .verify import NUMERICAL_FLOOR, TOLERANCES, VerificationReport, full_report, observed_orders, violations

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_VIOLATION = 0, 1, 2
STUDY_FLOOR = NUMERICAL_FLOOR

logger = logging.getLogger("wulffkit")

_FIELDS = {
    "schema_version", "anisotropy", "surface", "p", "q", "r_values", "resolutions",
    "sweep", "output_dir", "seed", "tolerances", "sg_limit",
}


class ConfigError(ValueError):
    """Invalid run configuration; ``problems`` lists ``(field, message)`` pairs."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(f"{f}: {m}" for f, m in self.problems))


@dataclass(frozen=True)
class RunConfig:
    anisotropy: dict
    surface: dict
    p: float = 3.0
    q: float = 4.0
    r_values: tuple = (1.0, 2.0)
    resolutions: tuple = (128,)
    sweep: dict | None = None
    output_dir: str = "wulffkit-out"
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    sg_limit: float | None = None
    schema_version: int = SCHEMA_VERSION

    def with_value(self, path: str, value) -> "RunConfig":
        """Copy with the dotted ``path`` (e.g. ``surface.terms.0.coefficient``) set."""
        data = copy.deepcopy(self.__dict__)
        set_dotted(data, path, value)
        return RunConfig(**data)


def set_dotted(data: dict, path: str, value) -> None:
    keys = path.split(".")
    node = data
    for key in keys[:-1]:
        node = node[int(key)] if isinstance(node, list) else node[key]
    last = keys[-1]
    if isinstance(node, list):
        node[int(last)] = value
    elif last in node:
        node[last] = value
    else:
        raise KeyError(path)


def _number(problems, data, name, default):
    value = data.get(name, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        problems.append((name, f"must be a number, got {value!r}"))
        return default
    return float(value)


def validate(data: dict) -> RunConfig:
    """Check a decoded JSON config; raises :class:`ConfigError` listing every problem."""
    problems = []
    if not isinstance(data, dict):
        raise ConfigError([("<root>", "config must be a JSON object")])
    for name in sorted(set(data) - _FIELDS):
        problems.append((name, "unknown field"))
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        problems.append(("schema_version", f"must be {SCHEMA_VERSION}, got {version!r}"))
    for name in ("anisotropy", "surface"):
        if not isinstance(data.get(name), dict):
            problems.append((name, "required object missing"))

    gamma = None
    if isinstance(data.get("anisotropy"), dict):
        try:
            gamma = anisotropy_from_dict(data["anisotropy"])
        except (TypeError, ValueError) as exc:
            problems.append(("anisotropy", str(exc)))
    n = gamma.n if gamma is not None else None

    p = _number(problems, data, "p", 3.0)
    q = _number(problems, data, "q", 4.0)
    if not p > 2.0:
        problems.append(("p", f"must satisfy p > 2, got {p}"))
    if n is not None and not q > n:
        problems.append(("q", f"must satisfy q > n = {n}, got {q}"))

    r_values = data.get("r_values", [1.0, 2.0])
    if not isinstance(r_values, list) or not r_values:
        problems.append(("r_values", "must be a nonempty list"))
        r_values = []
    for i, r in enumerate(r_values):
        if isinstance(r, bool) or not isinstance(r, (int, float)) or not 1.0 <= r < p:
            problems.append((f"r_values[{i}]", f"must lie in [1, p) = [1, {p}), got {r!r}"))

    resolutions = data.get("resolutions", [128])
    if (not isinstance(resolutions, list) or not resolutions
            or not all(isinstance(r, int) and not isinstance(r, bool) for r in resolutions)):
        problems.append(("resolutions", "must be a nonempty list of integers"))
        resolutions = [128]
    else:
        if any(b <= a for a, b in zip(resolutions, resolutions[1:])):
            problems.append(("resolutions", f"must be strictly increasing, got {resolutions}"))
        if min(resolutions) < 8:
            problems.append(("resolutions", f"each must be >= 8, got {resolutions}"))

    sweep = data.get("sweep")
    if sweep is not None:
        if not isinstance(sweep, dict) or set(sweep) != {"parameter", "values"}:
            problems.append(("sweep", "must be an object with exactly 'parameter' and 'values'"))
        elif not isinstance(sweep["values"], list) or not sweep["values"]:
            problems.append(("sweep.values", "must be a nonempty list"))
        else:
            try:
                probe = copy.deepcopy(data)
                set_dotted(probe, sweep["parameter"], sweep["values"][0])
            except (KeyError, IndexError, ValueError, TypeError):
                problems.append(("sweep.parameter", f"path {sweep['parameter']!r} not found in config"))

    tolerances = data.get("tolerances", {})
    if not isinstance(tolerances, dict):
        problems.append(("tolerances", "must be an object"))
        tolerances = {}
    for name in sorted(set(tolerances) - set(TOLERANCES)):
        problems.append((f"tolerances.{name}", f"unknown tolerance; choose from {sorted(TOLERANCES)}"))

    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        problems.append(("seed", f"must be an integer, got {seed!r}"))
    output_dir = data.get("output_dir", "wulffkit-out")
    if not isinstance(output_dir, str):
        problems.append(("output_dir", "must be a string"))
    sg_limit = data.get("sg_limit")
    if sg_limit is not None and (isinstance(sg_limit, bool) or not isinstance(sg_limit, (int, float))):
        problems.append(("sg_limit", f"must be a number, got {sg_limit!r}"))

    if gamma is not None and isinstance(data.get("surface"), dict):
        problems.extend(_check_pair(gamma, data["surface"]))
    if problems:
        raise ConfigError(problems)
    return RunConfig(
        anisotropy=data["anisotropy"],
        surface=data["surface"],
        p=p,
        q=q,
        r_values=tuple(float(r) for r in r_values),
        resolutions=tuple(resolutions),
        sweep=sweep,
        output_dir=output_dir,
        seed=seed,
        tolerances=dict(tolerances),
        sg_limit=None if sg_limit is None else float(sg_limit),
    )


def _check_pair(gamma, surface_data) -> list:
    """Convexity of gamma and a coarse trial sampling of the surface."""
    problems = []
    cert = check_convexity(gamma)
    if not cert.convex:
        problems.append(("anisotropy", f"A_gamma not positive definite: min eigenvalue "
                                       f"{cert.min_eigenvalue:.3e} at nu={cert.witness.tolist()}"))
        return problems
    try:
        spec = surface_from_dict(surface_data)
        sample_surface(spec, gamma, make_grid(gamma.n, 8))
    except (TypeError, ValueError, KeyError) as exc:
        problems.append(("surface", str(exc)))
    return problems


def _decode(text: str, source: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([(f"{source}:{exc.lineno}:{exc.colno}", exc.msg)]) from None


def load_config(name: str) -> RunConfig:
    """Load a config from a path, or from the bundled set by name."""
    path = Path(name)
    if path.is_file():
        return validate(_decode(path.read_text(), str(path)))
    bundled = resources.files("wulffkit") / "configs" / (name if name.endswith(".json") else name + ".json")
    if bundled.is_file():
        return validate(_decode(bundled.read_text(), bundled.name))
    raise ConfigError([("config", f"no such file or bundled config: {name!r}")])


def bundled_configs() -> list[str]:
    folder = resources.files("wulffkit") / "configs"
    return sorted(p.name for p in folder.iterdir() if p.name.endswith(".json"))


def _cell(config: RunConfig, resolution: int) -> VerificationReport:
    gamma = anisotropy_from_dict(config.anisotropy)
    spec = surface_from_dict(config.surface)
    return full_report(gamma, spec, config.p, config.q, config.r_values, resolution,
                       sg_limit=config.sg_limit)


def _cell_args(args):
    return _cell(*args)


def _compute(cells, jobs: int) -> list[VerificationReport]:
    """Evaluate ``(config, resolution)`` cells, in input order."""
    if jobs <= 1 or len(cells) <= 1:
        return [_cell(c, r) for c, r in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_cell_args, cells))


def _sweep_cells(config: RunConfig):
    if config.sweep is None:
        return [(None, config)]
    return [(v, config.with_value(config.sweep["parameter"], v)) for v in config.sweep["values"]]


def _label(value) -> str:
    return "" if value is None else "_sweep" + json.dumps(value).replace(".", "p").replace("-", "m")


def _diff_summary(failures) -> str:
    lines = ["--- expected", "+++ observed"]
    for where, (name, value, requirement) in failures:
        lines.append(f"- {name} {requirement}  [{where}]")
        lines.append(f"+ {name} = {value!r}  [{where}]")
    return "\n".join(lines)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def cmd_run(config: RunConfig, out: Path, jobs: int, quiet: bool) -> int:
    cells = [(v, c, res) for v, c in _sweep_cells(config) for res in c.resolutions]
    reports = _compute([(c, res) for _, c, res in cells], jobs)
    failures = []
    for (value, _, res), report in zip(cells, reports):
        name = f"report_res{res}{_label(value)}.json"
        _write(out / name, report.to_json())
        for bad in violations(report, config.tolerances):
            failures.append((name, bad))
        if not quiet:
            print(f"{name}: hk_l2={report.hk_product_l2:.12g} hk_inf={report.hk_product_inf:.12g} "
                  f"eps={report.pinching_epsilon:.3e} hm={report.hm_residual:.3e}")
    if failures:
        print(_diff_summary(failures), file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _study_rows(config: RunConfig, reports):
    """Per-resolution errors of the tracked scalars (``None`` where undefined)."""
    rows = []
    for res, rep in zip(config.resolutions, reports):
        equality = rep.wulff_curvature_error is not None
        rows.append({
            "resolution": res,
            "hm_residual": rep.hm_residual,
            "hk_product_l2_minus_1": abs(rep.hk_product_l2 - 1.0) if equality else None,
            "h_gamma_max_error": rep.wulff_curvature_error,
        })
    return rows


STUDY_SCALARS = ("hm_residual", "hk_product_l2_minus_1", "h_gamma_max_error")


def study_table(config: RunConfig, reports) -> dict:
    rows = _study_rows(config, reports)
    orders = {}
    for key in STUDY_SCALARS:
        errors = [row[key] for row in rows]
        orders[key] = None if errors[0] is None else observed_orders(list(config.resolutions), errors, STUDY_FLOOR)
    return {"rows": rows, "orders": orders, "floor": STUDY_FLOOR}


def _fmt(x) -> str:
    return "n/a" if x is None else f"{x:.3g}" if abs(x) < 1e4 else f"{x:.3e}"


def format_study(table: dict) -> str:
    lines = [f"{'resolution':>10} " + " ".join(f"{k:>22}" for k in STUDY_SCALARS)]
    for row in table["rows"]:
        lines.append(f"{row['resolution']:>10} " + " ".join(
            f"{'n/a' if row[k] is None else format(row[k], '.3e'):>22}" for k in STUDY_SCALARS))
    lines.append("observed order between consecutive resolutions:")
    for key in STUDY_SCALARS:
        orders = table["orders"][key]
        lines.append(f"  {key}: " + ("n/a" if orders is None else ", ".join(_fmt(o) for o in orders)))
    return "\n".join(lines)


def cmd_study(config: RunConfig, out: Path, jobs: int, quiet: bool) -> int:
    if len(config.resolutions) < 3:
        raise ConfigError([("resolutions", f"study needs at least 3 resolutions, got {len(config.resolutions)}")])
    reports = _compute([(config, res) for res in config.resolutions], jobs)
    table = study_table(config, reports)
    _write(out / "study.json", json.dumps(table, sort_keys=True, indent=2) + "\n")
    with open(out / "study.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["resolution", *STUDY_SCALARS])
        writer.writeheader()
        writer.writerows(table["rows"])
    if not quiet:
        print(format_study(table))
    return EXIT_OK


SWEEP_COLUMNS = (
    "value", "resolution", "pinching_epsilon", "radius_deviation", "hausdorff", "hausdorff_h",
    "hk_product_l2", "hk_product_inf", "hm_residual", "sg_bound",
)


def sweep_rows(config: RunConfig, reports) -> list[dict]:
    rows = []
    for value, rep in zip(config.sweep["values"], reports):
        row = {"value": value, "resolution": rep.resolution}
        row.update({k: getattr(rep, k) for k in SWEEP_COLUMNS[2:]})
        for r, v in rep.mc_deviation_r.items():
            row[f"mc_deviation_r{r}"] = v
        for r, v in rep.mc_deviation_abs_r.items():
            row[f"mc_deviation_abs_r{r}"] = v
        rows.append(row)
    return rows


def cmd_sweep(config: RunConfig, out: Path, jobs: int, quiet: bool) -> int:
    if config.sweep is None:
        raise ConfigError([("sweep", "sweep command needs a 'sweep' object")])
    res = config.resolutions[-1]
    cells = _sweep_cells(config)
    reports = _compute([(c, res) for _, c in cells], jobs)
    rows = sweep_rows(config, reports)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    failures = []
    for (value, _), rep in zip(cells, reports):
        name = f"report_res{res}{_label(value)}.json"
        _write(out / name, rep.to_json())
        failures.extend((name, bad) for bad in violations(rep, config.tolerances))
    if not quiet:
        for row in rows:
            print(f"{config.sweep['parameter']}={row['value']}: eps={row['pinching_epsilon']:.4e} "
                  f"dev={row['radius_deviation']:.4e} hausdorff={row['hausdorff']:.4e}")
    if failures:
        print(_diff_summary(failures), file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


COMMANDS = {"run": cmd_run, "study": cmd_study, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wulffkit", description=__doc__.splitlines()[0])
    parser.add_argument("--list-configs", action="store_true", help="list bundled configs and exit")
    sub = parser.add_subparsers(dest="command")
    for name, helptext in (
        ("run", "verify one (anisotropy, surface) pair per resolution and sweep value"),
        ("study", "observed convergence orders across >= 3 resolutions"),
        ("sweep", "one report per sweep value at the finest resolution, plus sweep.csv"),
    ):
        cmd = sub.add_parser(name, help=helptext)
        cmd.add_argument("config", help="path to a JSON config, or the name of a bundled config")
        cmd.add_argument("--output-dir", help="overrides output_dir from the config")
        cmd.add_argument("--quiet", action="store_true", help="suppress the console summary")
        cmd.add_argument("--jobs", type=int, default=1, help="worker processes for independent cells")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_configs:
        print("\n".join(bundled_configs()))
        return EXIT_OK
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        config = load_config(args.config)
        out = Path(args.output_dir if args.output_dir else config.output_dir)
        return COMMANDS[args.command](config, out, max(1, args.jobs), args.quiet)
    except ConfigError as exc:
        print(f"configuration error in {args.config}:", file=sys.stderr)
        for where, message in exc.problems:
            print(f"  {where}: {message}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
