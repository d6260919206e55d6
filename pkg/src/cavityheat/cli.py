"""Command-line front end: ``solve``, ``sweep-t1`` and ``compare-power``.

Exit status is 0 on success, 1 for configuration or I/O problems and 2 when a
solver fails to converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys

from .circuit import semiclassical_power
from .config import RunConfig, load_config
from .errors import ConfigError, SolverError
from .model import derive
from .quantum import RESISTOR2, cavity_state, solve_equilibrium_t2, two_level_power_for

log = logging.getLogger("cavityheat")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2


def format_value(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return f"{v:.8e}"
    return "" if v is None else str(v)


def render_csv(rows) -> str:
    if not rows:
        raise ValueError("no rows to write")
    header = list(rows[0])
    for r in rows[1:]:
        if list(r) != header:
            raise ValueError("rows do not share the same columns")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_value(r[k]) for k in header])
    return buf.getvalue()


def write_csv(rows, path):
    """Write ``rows`` (list of dicts with identical keys) as CSV with 9 significant digits."""
    text = render_csv(rows)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return text


def read_csv(path):
    """Read a file written by :func:`write_csv`; numeric cells come back as float."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for r in rows:
        conv = {}
        for k, v in r.items():
            try:
                conv[k] = int(v) if v.lstrip("-").isdigit() else float(v)
            except ValueError:
                conv[k] = v if v else None
        out.append(conv)
    return out


def relative_difference(value, reference):
    diff = abs(value - reference)
    if diff == 0.0:
        return 0.0
    if reference == 0.0:
        return math.inf
    return diff / abs(reference)


def solve_point(cfg: RunConfig, t1: float) -> dict:
    """All quantities reported by ``solve`` for one value of T1."""
    params = cfg.system
    num = cfg.numeric
    if cfg.t2_rule == "self_consistent":
        eq = solve_equilibrium_t2(params, t1, tol=num.fixed_point_tol, max_iterations=num.max_iterations)
        t2, state, iterations, residual = eq.t2, eq.state, eq.iterations, eq.residual
    else:
        t2 = cfg.t2_for(t1)
        state = cavity_state(params, t1, t2)
        iterations, residual = 0, 0.0
    row = {
        "t1": t1,
        "t2": t2,
        "t_eff": state.effective_temperature(),
        "p_quantum": state.power_into(RESISTOR2) if cfg.wants("quantum") else None,
        "p_two_level": two_level_power_for(params, t1, t2) if cfg.wants("two_level") else None,
        "p_semiclassical": (
            semiclassical_power(params, t1, t2, num.n_nodes, num.quadrature_tol)
            if cfg.wants("semiclassical") else None
        ),
        "q_eff": derive(params).q_eff,
        "iterations": iterations,
        "residual": residual,
    }
    return row


def cmd_solve(cfg: RunConfig):
    if cfg.sweep is not None:
        raise ConfigError("solve takes a single point; remove the sweep.* keys or use sweep-t1")
    if cfg.t1 is None:
        raise ConfigError("solve requires t1")
    return [solve_point(cfg, cfg.t1)]


def _sweep_rows(cfg, make_row):
    rows = []
    for t1 in cfg.sweep.grid():
        try:
            rows.append(make_row(t1))
        except SolverError as exc:
            exc.args = (f"t1={t1!r}: {exc}",)
            raise
        log.info("t1=%.6g done", t1)
    return rows


def cmd_sweep_t1(cfg: RunConfig):
    if cfg.sweep is None:
        raise ConfigError("sweep-t1 requires sweep.start, sweep.stop and sweep.points")
    if cfg.t2_rule != "self_consistent":
        raise ConfigError("sweep-t1 requires t2_rule = self_consistent")
    num = cfg.numeric

    def row(t1):
        eq = solve_equilibrium_t2(cfg.system, t1, tol=num.fixed_point_tol, max_iterations=num.max_iterations)
        return {
            "t1_K": t1,
            "t2_K": eq.t2,
            "t_eff_K": eq.t_eff,
            "p_cav2_W": eq.powers.into_resistor2,
            "p_elph_W": eq.powers.electron_phonon_power,
        }

    return _sweep_rows(cfg, row)


def cmd_compare_power(cfg: RunConfig):
    if cfg.sweep is None:
        raise ConfigError("compare-power requires sweep.start, sweep.stop and sweep.points")
    if cfg.t2_rule != "offset":
        raise ConfigError("compare-power requires t2_rule = offset")
    num = cfg.numeric

    def row(t1):
        t2 = cfg.t2_for(t1)
        full = cavity_state(cfg.system, t1, t2).power_into(RESISTOR2)
        two = two_level_power_for(cfg.system, t1, t2)
        semi = semiclassical_power(cfg.system, t1, t2, num.n_nodes, num.quadrature_tol)
        return {
            "t1_K": t1,
            "t2_K": t2,
            "p_quantum_full_W": full,
            "p_two_level_W": two,
            "p_semiclassical_W": semi,
            "rel_diff_quantum_semiclassical": relative_difference(semi, full),
            "rel_diff_full_twolevel": relative_difference(two, full),
        }

    return _sweep_rows(cfg, row)


COMMANDS = {
    "solve": cmd_solve,
    "sweep-t1": cmd_sweep_t1,
    "compare-power": cmd_compare_power,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cavityheat",
        description="Photonic heat transport between two resistors in a microwave cavity.",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="log solver iterations")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", help="path to a key = value config file")
        p.add_argument("--output", "-o", help="CSV output path (overrides output_path)")
        p.add_argument("--verbose", "-v", action="store_true", default=argparse.SUPPRESS)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(args.config)
        rows = COMMANDS[args.command](cfg)
        path = args.output or cfg.output_path
        text = write_csv(rows, path) if path else render_csv(rows)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
