"""Command-line front end: ``qabsorb run | list | oracle-check``.

Exit status: 0 success, 2 invalid scenario, 3 numerical failure or non-finite
output, 4 file-system error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import box_modes, checks, packet, scenarios, slit
from .absorption import absorption_current, survival_from_flux
from .core import ConvergenceError, DomainError, PhysicalParams, TimeGrid

EXIT_OK, EXIT_SCHEMA, EXIT_NUMERICS, EXIT_IO = 0, 2, 3, 4

HEADERS = {
    "survival": ("t", "S", "exponent", "current"),
    "pattern": ("coordinate", "density"),
    "concentrated": ("coordinate", "density"),
    "wall_pattern": ("coordinate", "density"),
    "energy_window": ("t", "value"),
    "report": ("check", "value", "tolerance", "passed"),
}


class NonFiniteOutput(ArithmeticError):
    pass


@dataclass
class Result:
    tables: dict[str, dict[str, list]] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def add(self, name: str, *columns):
        header = HEADERS[name]
        self.tables[name] = {h: [_plain(v) for v in np.asarray(c).tolist()] for h, c in zip(header, columns)}


def _plain(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, str):
        return v
    return float(v)


def _physical(cfg: dict) -> PhysicalParams:
    return PhysicalParams(**cfg.get("physical", {}))


def _outputs(cfg: dict, default: list[str]) -> list[str]:
    return cfg.get("outputs", default)


def run_box(cfg: dict) -> Result:
    num = cfg.get("numerics", {})
    conv = num.get("rate_convention", "pi-m")
    b = cfg["box"]
    amps = np.array([complex(*a) if isinstance(a, list) else complex(a) for a in b["amplitudes"]])
    if len(amps) != len(b["modes"]):
        raise DomainError("box: modes and amplitudes differ in length")
    if b.get("normalize", False):
        amps = amps / np.sqrt(np.sum(np.abs(amps) ** 2) * b["width_a"] / 2)
    ex = box_modes.BoxExpansion(b["width_a"], b["modes"], amps, _physical(cfg))
    tg = TimeGrid.spanning(num.get("t_max", 1.0), num.get("dt", 1e-3))
    flux = box_modes.flux_series(ex, tg)
    s = survival_from_flux(flux, ex.params, conv)
    res = Result()
    outputs = _outputs(cfg, ["survival"])
    if "survival" in outputs:
        res.add("survival", tg.times, s.values, s.exponent, absorption_current(flux, s, ex.params, conv))
    if "energy_window" in outputs:
        res.add("energy_window", tg.times, box_modes.energy_window_survival(ex.spectrum(), tg.times, ex.params, ex.width_a))
    res.summary = {"normalized": ex.normalized, "final_survival": float(s.values[-1])}
    if ex.modes.size == 2 and np.all(ex.amplitudes.imag == 0) and ex.params.lambda_right == 0 and conv == "pi-m":
        k, n = (int(m) for m in ex.modes)
        ref = box_modes.two_level_survival(k, n, ex.amplitudes[0].real, ex.amplitudes[1].real, tg.times, ex.params, ex.width_a)
        res.summary["max_rel_gap_two_level_law"] = float(np.max(np.abs(s.values / ref - 1)))
    return res


def run_packet(cfg: dict) -> Result:
    num = cfg.get("numerics", {})
    conv = num.get("rate_convention", "pi-m")
    p = packet.GaussianPacketParams(**cfg["packet"], params=_physical(cfg))
    tol = num.get("tolerance", 1e-10)
    refl = packet.reflection_coefficient(p, conv, tol=tol, full_output=True)
    tg = TimeGrid.spanning(num.get("t_max", 20.0), num.get("dt", 1e-3))
    flux = packet.flux_series(p, tg)
    s = survival_from_flux(flux, p.params, conv)
    res = Result()
    outputs = _outputs(cfg, ["survival"])
    if "survival" in outputs:
        res.add("survival", tg.times, s.values, s.exponent, absorption_current(flux, s, p.params, conv))
    if "energy_window" in outputs:
        t = np.linspace(0.0, tg.t_end, 401)
        res.add("energy_window", t, packet.energy_window_survival(t, p, k_max=num.get("k_max")))
    tail = packet.tail_constant(p, conv) / (2 * tg.t_end**2)
    res.summary = {
        "reflection_coefficient": refl.reflection,
        "reflection_tail_bound": float(refl.tail_bound),
        "final_survival": float(s.values[-1]),
        "survival_tail_bound": float(tail),
        "arrival_time": p.arrival_time,
    }
    return res


def _slit_config(cfg: dict) -> slit.SlitConfig:
    return slit.SlitConfig(**cfg.get("slit", {}), params=_physical(cfg))


def run_slit(cfg: dict) -> Result:
    num = cfg.get("numerics", {})
    conv = num.get("rate_convention", "pi-m")
    sc = _slit_config(cfg)
    pk = sc.x_packet()
    ext = num.get("pattern_extent", 4 * sc.sigma_y * np.sqrt(1 + sc.t_bar**2 / sc.sigma_y**4))
    y = np.linspace(-ext, ext, num.get("n_pattern", 161))
    res = Result()
    outputs = _outputs(cfg, ["pattern"])
    if "pattern" in outputs:
        pat = slit.cumulative_pattern(y, sc, pk, tol=num.get("tolerance", 1e-8), convention=conv)
        res.add("pattern", pat.coordinate, pat.density)
        res.summary["pattern_mass"] = pat.mass()
    if "concentrated" in outputs:
        con = slit.concentrated_velocity_pattern(y, sc, pk, conv)
        res.add("concentrated", con.coordinate, con.density)
    if "survival" in outputs:
        tg = TimeGrid.spanning(num.get("t_max", 4 * sc.t_bar), num.get("dt", 1e-3))
        flux = packet.flux_series(pk, tg)
        s = survival_from_flux(flux, pk.params, conv)
        res.add("survival", tg.times, s.values, s.exponent, absorption_current(flux, s, pk.params, conv))
    res.summary["reflection_coefficient"] = packet.reflection_coefficient(pk, conv)
    res.summary["t_bar"] = sc.t_bar
    return res


def run_lateral(cfg: dict) -> Result:
    num = cfg.get("numerics", {})
    conv = num.get("rate_convention", "pi-m")
    sc = _slit_config(cfg)
    kw = {
        "n_max": num.get("n_modes", 200),
        "tol": num.get("tolerance", 1e-6),
        "convention": conv,
        "basis": num.get("lateral_basis", "dirichlet"),
        "edge_width": num.get("edge_width", 0.1),
        "consistent_energies": num.get("consistent_energies", False),
    }
    n = num.get("n_pattern", 41)
    res = Result()
    outputs = _outputs(cfg, ["wall_pattern"])
    if "wall_pattern" in outputs:
        x = np.linspace(0.0, num.get("pattern_extent", 2 * sc.x0), n)
        wp = slit.lateral_wall_pattern(x, sc, reading=num.get("wall_pattern", "flux"), **kw)
        res.add("wall_pattern", wp.coordinate, wp.density)
        res.summary["wall_pattern_mass_one_wall"] = wp.mass()
    if "pattern" in outputs:
        y = np.linspace(-sc.y0, sc.y0, n)
        sp = slit.lateral_screen_pattern(y, sc, **kw)
        res.add("pattern", sp.coordinate, sp.density)
        res.summary["screen_pattern_mass"] = sp.mass()
    return res


def run_oracle(cfg: dict) -> Result:
    rows = checks.run_oracle_checks(quick=cfg.get("numerics", {}).get("quick", False))
    res = Result()
    res.add("report", [r.check for r in rows], [r.value for r in rows], [r.tolerance for r in rows], [r.passed for r in rows])
    res.summary = {"all_passed": all(r.passed for r in rows), "n_checks": len(rows)}
    return res


RUNNERS = {"box": run_box, "packet": run_packet, "slit": run_slit, "slit-lateral": run_lateral, "oracle-check": run_oracle}


def run_scenario(cfg: dict) -> Result:
    res = RUNNERS[cfg["kind"]](cfg)
    _check_finite(res)
    return res


def _check_finite(res: Result):
    for name, cols in res.tables.items():
        for h, col in cols.items():
            if any(isinstance(v, float) and not np.isfinite(v) for v in col):
                raise NonFiniteOutput(f"non-finite value in {name}.{h}")
    for k, v in res.summary.items():
        if isinstance(v, float) and not np.isfinite(v):
            raise NonFiniteOutput(f"non-finite summary value {k}")


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, shortest round-trip floats, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return v if isinstance(v, str) else repr(float(v))


def result_document(cfg: dict, res: Result, with_tables: bool) -> dict:
    num = cfg.get("numerics", {})
    doc = {
        "scenario": cfg,
        "conventions": {
            "rate_convention": num.get("rate_convention", "pi-m"),
            "wall_pattern": num.get("wall_pattern", "flux"),
            "consistent_energies": num.get("consistent_energies", False),
        },
        "tolerances": {k: num[k] for k in ("tolerance",) if k in num},
        "summary": {k: _plain(v) if not isinstance(v, str) else v for k, v in res.summary.items()},
        "headers": {name: list(HEADERS[name]) for name in res.tables},
    }
    if with_tables:
        doc["tables"] = res.tables
    return doc


def write_outputs(cfg: dict, res: Result, out: Path, fmt: str, runtime: float) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "csv":
        for name, cols in res.tables.items():
            path = out / f"{name}.csv"
            header = HEADERS[name]
            rows = zip(*(cols[h] for h in header))
            path.write_text(",".join(header) + "\n" + "".join(",".join(_cell(v) for v in r) + "\n" for r in rows))
            written.append(path)
        meta = out / "metadata.json"
        meta.write_text(dumps(result_document(cfg, res, with_tables=False)))
    else:
        meta = out / "result.json"
        meta.write_text(dumps(result_document(cfg, res, with_tables=True)))
    written.append(meta)
    timing = out / "timing.json"
    timing.write_text(dumps({"runtime_seconds": round(runtime, 3)}))
    written.append(timing)
    return written


def load_config(ref: str) -> tuple[dict, str]:
    path = Path(ref)
    if path.exists() or ref not in scenarios.bundled_names():
        text = path.read_text()
    else:
        text = scenarios.bundled_text(ref)
    return scenarios.parse(text), text


def _execute(cfg: dict, out: Path | None, fmt: str) -> int:
    t0 = time.perf_counter()
    res = run_scenario(cfg)
    runtime = time.perf_counter() - t0
    if out is not None:
        for path in write_outputs(cfg, res, out, fmt, runtime):
            print(path)
    if "report" in res.tables:
        rep = res.tables["report"]
        for name, val, tol, ok in zip(rep["check"], rep["value"], rep["tolerance"], rep["passed"]):
            print(f"{'PASS' if ok else 'FAIL'}  {name:28s} value={val:.3e}  tol={tol:.1e}")
    return EXIT_OK


def _guard(fn, *args) -> int:
    try:
        return fn(*args)
    except (scenarios.ScenarioError, DomainError, TypeError) as err:
        print(f"qabsorb: invalid scenario: {err}", file=sys.stderr)
        return EXIT_SCHEMA
    except (ConvergenceError, NonFiniteOutput, FloatingPointError, ValueError) as err:
        print(f"qabsorb: numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICS
    except OSError as err:
        print(f"qabsorb: i/o error: {err}", file=sys.stderr)
        return EXIT_IO


def cmd_run(args) -> int:
    def go():
        cfg, _ = load_config(args.config)
        out = Path(args.out) if args.out else Path(cfg["name"])
        return _execute(cfg, out, args.format)

    return _guard(go)


def cmd_list(args) -> int:
    for name in scenarios.bundled_names():
        cfg = scenarios.parse(scenarios.bundled_text(name))
        print(f"{name:20s} {cfg['kind']:14s} {cfg.get('description', '')}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    def go():
        cfg = scenarios.parse(scenarios.bundled_text("oracle-check"))
        cfg.setdefault("numerics", {})["quick"] = args.quick
        return _execute(cfg, Path(args.out) if args.out else None, args.format)

    return _guard(go)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qabsorb", description="Absorbing-boundary survival, current and pattern calculations.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario file or a bundled scenario by name")
    r.add_argument("--config", required=True, help="path to a scenario JSON file, or a bundled scenario name")
    r.add_argument("--out", help="output directory (default: ./<scenario name>)")
    r.add_argument("--format", choices=("csv", "json"), default="csv")
    r.set_defaults(func=cmd_run)
    ls = sub.add_parser("list", help="list bundled scenarios")
    ls.set_defaults(func=cmd_list)
    oc = sub.add_parser("oracle-check", help="run the solver cross-checks and print a pass/fail report")
    oc.add_argument("--quick", action="store_true", help="coarser grids, finishes in seconds")
    oc.add_argument("--out", help="also write the report to this directory")
    oc.add_argument("--format", choices=("csv", "json"), default="csv")
    oc.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
