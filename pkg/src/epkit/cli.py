"""``epkit`` command line.

Every subcommand takes its parameters either as flags or from a JSON config
(``--config``); flags win over the config, the config over built-in defaults.
Data go to stdout (or ``--out``), diagnostics to stderr.  Exit status is 0 on
success, 2 for invalid input and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from dataclasses import dataclass
from typing import Any, Callable

import jsonschema
import numpy as np

from . import io
from .errors import EPKitError, NumericalError, ValidationError

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3

_COMPLEX_SCHEMA = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_HAMILTONIAN_SCHEMA = {
    "type": "object",
    "properties": {k: _COMPLEX_SCHEMA for k in ("eps1", "eps2", "omega")},
    "additionalProperties": False,
}
_AXIS_SCHEMA = {
    "type": "object",
    "properties": {
        "field": {"type": "string"},
        "start": {"type": "number"},
        "stop": {"type": "number"},
        "n": {"type": "integer", "minimum": 1},
    },
    "required": ["field", "start", "stop", "n"],
    "additionalProperties": False,
}


def parse_complex(text: str) -> complex:
    """Accept ``1.5``, ``1+2j``, ``-1j`` or ``re,im``."""
    text = text.strip().replace(" ", "")
    try:
        if "," in text:
            re_, im_ = text.split(",")
            return complex(float(re_), float(im_))
        return complex(text.replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


@dataclass(frozen=True)
class Option:
    name: str
    kind: str  # real, int, complex, str, bool, range, json
    default: Any = None
    help: str = ""
    choices: tuple | None = None
    minimum: float | None = None
    exclusive_minimum: float | None = None
    schema: dict | None = None

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")

    def json_schema(self) -> dict:
        if self.schema is not None:
            return self.schema
        base = {
            "real": {"type": "number"},
            "int": {"type": "integer"},
            "complex": _COMPLEX_SCHEMA,
            "str": {"type": "string"},
            "bool": {"type": "boolean"},
            "range": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        }[self.kind]
        base = dict(base)
        if self.choices:
            base["enum"] = list(self.choices)
        if self.minimum is not None:
            base["minimum"] = self.minimum
        if self.exclusive_minimum is not None:
            base["exclusiveMinimum"] = self.exclusive_minimum
        return base


def _range(text: str) -> list[float]:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from exc
    return [lo, hi]


_PARSERS: dict[str, Callable] = {
    "real": float,
    "int": int,
    "complex": parse_complex,
    "str": str,
    "range": _range,
}

HAMILTONIAN_OPTS = (
    Option("eps1", "complex", None, "diagonal entry eps1"),
    Option("eps2", "complex", None, "diagonal entry eps2"),
    Option("omega", "complex", None, "coupling omega"),
)

COMMON = (
    Option("tol", "real", None, "tolerance (command specific meaning)", exclusive_minimum=0),
    Option("threads", "int", None, "worker threads (fallback: EPKIT_THREADS)", minimum=1),
    Option("format", "str", None, "output format", choices=("json", "csv")),
)

COMMANDS: dict[str, dict] = {
    "spectrum": {
        "help": "closed-form spectrum, normalized bi-orthogonal pair, projective and rigidity data",
        "options": HAMILTONIAN_OPTS + (
            Option("branch", "int", 1, "sheet of the square root", choices=(1, -1)),
            Option("evolve_time", "real", None, "also evolve Phi_+ for this time", exclusive_minimum=0),
            Option("evolve_steps", "int", 64, "output grid points of the evolution", minimum=1),
        ),
    },
    "ep": {
        "help": "EP detection, Jordan chain, Jordan frame and near-EP normalization asymptotics",
        "options": HAMILTONIAN_OPTS + (
            Option("c0", "complex", 1.0, "right root scale"),
            Option("d0", "complex", 1.0, "left root scale"),
            Option("c1", "complex", 0.0, "right associated-vector admixture"),
            Option("d1", "complex", 0.0, "left associated-vector admixture"),
            Option("eps", "complex", None, "also report instantaneous scales at Z = Z_c + eps"),
        ),
    },
    "puiseux": {
        "help": "Puiseux coefficients, scale matching and convergence-order fit at an EP",
        "options": HAMILTONIAN_OPTS + (
            Option("eps_range", "range", [1e-8, 1e-2], "|eps| range of the fit grid (LO:HI)"),
            Option("n", "int", 12, "grid points", minimum=2),
            Option("direction", "real", 0.0, "arg(eps) of the grid ray"),
            Option("quantity", "str", "eigenvalue", "remainder to fit", choices=("eigenvalue", "eigenvector")),
            Option("mode", "str", "root-primary", "scale matching", choices=("root-primary", "diagonal-primary")),
            Option("c_pm", "complex", None, "diagonal scale c_+ = c_- (diagonal-primary)"),
            Option("d_pm", "complex", None, "diagonal scale d_+ = d_- (diagonal-primary)"),
            Option("eps", "complex", None, "evaluate the expansion at this eps"),
            Option("summary", "bool", False, "coefficients only, no grid table"),
        ),
    },
    "loop-phase": {
        "help": "geometric/dynamical phase along a loop, transport matrices, branch tracking",
        "options": (
            Option("center", "complex", 1j, "loop center in Z"),
            Option("radius", "real", 1e-2, "loop radius", exclusive_minimum=0),
            Option("turns", "real", 1, "number of turns"),
            Option("alpha0", "real", 0.0, "start angle"),
            Option("radial_amplitude", "real", 0.0, "relative radial modulation"),
            Option("radial_harmonic", "int", 1, "harmonic of the radial modulation"),
            Option("e0", "complex", 0.0, "energy offset E0"),
            Option("omega", "complex", 0.5, "coupling omega"),
            Option("branch", "int", 1, "eigenvector branch at t = 0", choices=(1, -1)),
            Option("samples", "int", 512, "samples for tables and tracking", minimum=8),
            Option("monodromy", "bool", False, "add W(alpha), numeric transport and group-law checks"),
            Option("track", "bool", False, "emit tracked branch data instead of the cumulative phase"),
        ),
    },
    "jump": {
        "help": "phase-jump profile theta(s) along a straight segment past the EP",
        "options": (
            Option("rho", "real", 1e-6, "minimal distance to the EP", exclusive_minimum=0),
            Option("alpha0", "real", 0.0, "segment direction"),
            Option("s_range", "range", [-0.1, 0.1], "segment parameter range (LO:HI)"),
            Option("n", "int", 401, "samples", minimum=2),
        ),
    },
    "rigidity-scan": {
        "help": "phase-rigidity landscape over a 2-D parameter grid",
        "options": HAMILTONIAN_OPTS + (
            Option("x", "json", None, "x axis", schema=_AXIS_SCHEMA),
            Option("y", "json", None, "y axis", schema=_AXIS_SCHEMA),
            Option("branch", "int", 1, "branch of the r column", choices=(1, -1)),
            Option("asymptote_grid", "range", None, "instead: check r ~ |2 eps|^(1/2) over |eps| in LO:HI"),
            Option("asymptote_n", "int", 6, "points of the asymptote grid", minimum=2),
        ),
    },
    "pt": {
        "help": "PT-symmetric model: class, spectrum, C operator, Krein/CPT tables, conic",
        "options": (
            Option("r", "real", 1.0, "modulus r"),
            Option("s", "real", 1.0, "coupling s"),
            Option("theta", "real", 0.0, "phase theta"),
            Option("alpha", "real", None, "build C directly from a real alpha"),
        ),
    },
}

CSV_DEFAULT = {"jump", "rigidity-scan"}


def config_schema(command: str) -> dict:
    props = {o.name: o.json_schema() for o in COMMANDS[command]["options"] + COMMON}
    props["hamiltonian"] = _HAMILTONIAN_SCHEMA
    props["command"] = {"const": command}
    props["out"] = {"type": "string"}
    return {"type": "object", "properties": props, "additionalProperties": False}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="epkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, spec in COMMANDS.items():
        p = sub.add_parser(name, help=spec["help"], description=spec["help"])
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output file (default: stdout)")
        for opt in spec["options"] + COMMON:
            if opt.kind == "bool":
                p.add_argument(opt.flag, dest=opt.name, action="store_true", default=None, help=opt.help)
            elif opt.kind == "json":
                p.add_argument(opt.flag, dest=opt.name, type=json.loads, default=None,
                               help=opt.help + " (JSON object)")
            else:
                p.add_argument(opt.flag, dest=opt.name, type=_PARSERS[opt.kind], default=None,
                               choices=opt.choices, help=opt.help)
    return parser


def _from_json_value(opt: Option, value):
    if opt.kind == "complex":
        from .model import complex_from_json

        return complex_from_json(value)
    return value


def resolve_options(command: str, ns: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags; validate the result against the schema."""
    options = COMMANDS[command]["options"] + COMMON
    config: dict = {}
    if ns.config:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except OSError as exc:
            raise ValidationError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config is not valid JSON: {exc}") from exc
    flags = {o.name: getattr(ns, o.name) for o in options if getattr(ns, o.name) is not None}
    # flags are validated with the same schema as the config (after JSON encoding)
    for source in (config, io.encode(flags)):
        try:
            jsonschema.validate(source, config_schema(command))
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ValidationError(f"invalid configuration at {where}: {exc.message}") from exc
    values = {o.name: o.default for o in options}
    for opt in options:
        if opt.name in config:
            values[opt.name] = _from_json_value(opt, config[opt.name])
    values.update(flags)
    ham = dict(config.get("hamiltonian", {}))
    for key in ("eps1", "eps2", "omega"):
        if key in flags or (key in config and key in {o.name for o in options}):
            ham[key] = values[key]
    values["hamiltonian"] = ham
    if values["threads"] is None:
        env = os.environ.get("EPKIT_THREADS")
        try:
            values["threads"] = int(env) if env else 1
        except ValueError as exc:
            raise ValidationError(f"EPKIT_THREADS must be an integer, got {env!r}") from exc
        if values["threads"] < 1:
            raise ValidationError("EPKIT_THREADS must be >= 1")
    values["out"] = ns.out or config.get("out")
    fmt = values["format"] or ("csv" if command in CSV_DEFAULT else "json")
    values["format"] = fmt
    return values


def _hamiltonian(values: dict):
    from .model import Hamiltonian2

    ham = values["hamiltonian"]
    missing = [k for k in ("eps1", "eps2", "omega") if k not in ham]
    if missing:
        raise ValidationError(f"hamiltonian needs {', '.join(missing)}")
    return Hamiltonian2.from_json({k: io.encode(complex(v) if not isinstance(v, list) else v)
                                   for k, v in ham.items()})


def _emit_table(values: dict, header, rows, payload: dict) -> str:
    if values["format"] == "csv":
        return io.csv_text(header, rows)
    return io.dumps(payload)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_spectrum(v: dict) -> str:
    from .model import eigen_decompose, normalize_diagonal_chart
    from .phase import evolve_schrodinger
    from .projective import conic_residual, embed, select_chart
    from .rigidity import phase_rigidity

    h = _hamiltonian(v)
    pair = normalize_diagonal_chart(eigen_decompose(h, v["branch"]))
    out: dict[str, Any] = {
        "hamiltonian": h.to_json(),
        "hermitian": h.is_hermitian,
        "e_plus": pair.e_plus,
        "e_minus": pair.e_minus,
        "chi_plus": pair.chi_plus,
        "chi_minus": pair.chi_minus,
        "c_plus": pair.c_plus,
        "c_minus": pair.c_minus,
        "d_plus": pair.d_plus,
        "d_minus": pair.d_minus,
        "biorthogonal": pair.biorthogonal_table(),
    }
    if not h.is_diagonal:
        out["z"] = h.z
    points = {}
    for tag, phi in (("plus", pair.phi_plus), ("minus", pair.phi_minus)):
        p = embed(phi)
        rig = phase_rigidity(phi)
        points[tag] = {
            "point": p.u,
            "chart": select_chart(p, v["tol"] or 1e-6),
            "conic_residual": conic_residual(p),
            "rigidity": rig.r,
            "norm_sq": rig.norm_sq,
            "beta": rig.beta,
        }
    out["states"] = points
    if v["evolve_time"]:
        grid = np.linspace(0.0, v["evolve_time"], v["evolve_steps"] + 1)
        m = h.matrix
        res = evolve_schrodinger(lambda t: m, pair.phi_plus, pair.xi_plus, grid, tol=v["tol"] or 1e-9)
        out["evolution"] = {
            "time": v["evolve_time"],
            "total": res.phase.total,
            "dynamical": res.phase.dynamical,
            "gamma": res.phase.gamma,
            "invariant_drift": res.invariant_drift,
            "local_error": res.local_error,
            "phi_final": res.phi[-1],
        }
    return io.dumps(out)


def cmd_ep(v: dict) -> str:
    from .jordan import build_jordan_frame, build_root_chain, detect_ep
    from .projective import instantaneous_asymptotics

    h = _hamiltonian(v)
    tol = v["tol"] or 1e-9
    found = detect_ep(h, tol)
    out: dict[str, Any] = {"is_ep": found is not None, "z": h.z}
    if found is None:
        from .errors import NotAtEP

        raise NotAtEP(f"Z = {h.z} is not within {tol:g} of +-i")
    chain = build_root_chain(h, v["c0"], v["d0"], tol)
    frame = build_jordan_frame(h, v["c0"], v["d0"], v["c1"], v["d1"], tol)
    out.update({"z_c": found[0], "mu": found[1], "chain": chain.to_json(),
                "biorthogonal": chain.biorthogonal_table(), "frame": frame.to_json()})
    if v["eps"] is not None:
        a = instantaneous_asymptotics(v["eps"], found[0])
        out["asymptotics"] = {
            "eps": a.eps,
            "c_plus_sq": a.c_plus_sq,
            "c_minus_sq": a.c_minus_sq,
            "exact_c_plus_sq": a.exact_c_plus_sq,
            "exact_c_minus_sq": a.exact_c_minus_sq,
            "exact_ratio": a.exact_ratio,
            "relative_phase": a.relative_phase,
            "norm_sq_plus": a.norm_sq_plus,
            "norm_sq_minus": a.norm_sq_minus,
            "norm_sq_asymptote": a.norm_sq_asymptote,
        }
    return io.dumps(out)


def cmd_puiseux(v: dict) -> str:
    import warnings

    from .errors import LeadingOrderWarning
    from .jordan import build_root_chain
    from .puiseux import (eps_grid, expand_eigenvalues, fit_scale_factors, inner_product_asymptote,
                          verify_convergence_order)

    h = _hamiltonian(v)
    chain = build_root_chain(h, tol=v["tol"] or 1e-9)
    exp = expand_eigenvalues(chain)
    if v["mode"] == "diagonal-primary":
        if v["c_pm"] is None or v["d_pm"] is None:
            raise ValidationError("diagonal-primary mode needs --c-pm and --d-pm")
        fit = fit_scale_factors(chain, "diagonal-primary",
                                c_pm=(v["c_pm"], v["c_pm"]), d_pm=(v["d_pm"], v["d_pm"]))
    else:
        fit = fit_scale_factors(chain)
    out: dict[str, Any] = {
        "z_c": chain.z_c,
        "delta_e": exp.delta_e,
        "b0": exp.b0,
        "b1": exp.b1,
        "scales": {"mode": fit.mode, "c_plus": fit.c_plus, "c_minus": fit.c_minus,
                   "d_plus": fit.d_plus, "d_minus": fit.d_minus,
                   "c0": fit.c0_plus, "d0": fit.d0_plus},
    }
    if v["eps"] is not None:
        e = v["eps"]
        ep, em = exp.eigenvalues(e)
        out["at_eps"] = {
            "eps": e,
            "e_plus": ep,
            "e_minus": em,
            "line_plus": exp.line(e, 1),
            "line_minus": exp.line(e, -1),
            "inner_product_plus": inner_product_asymptote(exp, e, 1),
            "inner_product_minus": inner_product_asymptote(exp, e, -1),
        }
    if v["summary"]:
        return io.dumps(out)
    lo, hi = v["eps_range"]
    grid = eps_grid(lo, hi, v["n"], v["direction"])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LeadingOrderWarning)
        conv = verify_convergence_order(chain, grid, v["quantity"])
    out["fit"] = {"quantity": conv.quantity, "slope": conv.slope, "intercept": conv.intercept,
                  "abs_eps": np.abs(conv.eps), "remainder": conv.errors}
    rows = zip(np.abs(conv.eps), conv.errors)
    return _emit_table(v, ("abs_eps", "remainder"), rows, out)


def _loop(v: dict):
    from .phase import LoopPath

    turns = v["turns"]
    return LoopPath(v["center"], v["radius"], turns, v["alpha0"],
                    duration=2 * math.pi * max(abs(turns), 1e-12),
                    radial_amplitude=v["radial_amplitude"], radial_harmonic=v["radial_harmonic"])


def cmd_loop_phase(v: dict) -> str:
    from .phase import cumulative_loop_phase, integrate_loop_phase

    path = _loop(v)
    if v["track"]:
        return _loop_track(v, path)
    tol = v["tol"] or 1e-6
    out: dict[str, Any] = {"loop": {"center": path.center, "radius": path.radius, "turns": path.turns,
                                    "alpha0": path.alpha0, "radial_amplitude": path.radial_amplitude}}
    if path.closed:
        res = integrate_loop_phase(path, v["e0"], v["omega"], v["branch"], tol)
        out.update({"gamma": res.gamma, "dynamical": res.dynamical, "total": res.total,
                    "gamma_open": res.gamma_open, "cycle_repeats": res.cycle_repeats,
                    "samples_used": res.samples_used})
    if v["monodromy"]:
        out["monodromy"] = _monodromy(path)
    alpha, gamma = cumulative_loop_phase(path, v["samples"], v["branch"])
    rows = zip(alpha, gamma.real, gamma.imag)
    return _emit_table(v, ("alpha", "ReGamma", "ImGamma"), rows, out)


def _monodromy(path) -> dict:
    from .phase import numeric_transport, transport_matrix, verify_group_laws

    alpha = 2 * math.pi * path.turns
    z_c = 1j if path.center.imag > 0 else -1j
    exact = transport_matrix(alpha, z_c)
    info: dict[str, Any] = {"alpha": alpha, "w": exact.w, "det": exact.det}
    if path.center_is_ep:
        num = numeric_transport(path)
        info["numeric_w"] = num.w
        info["numeric_deviation"] = float(np.max(np.abs(num.w - exact.w)))
    rep = verify_group_laws([k * math.pi / 2 for k in range(-4, 9)], z_c)
    info["group_laws"] = {"max_composition": rep.max_composition, "max_commutator": rep.max_commutator,
                          "max_det": rep.max_det, "max_eigen_phase": rep.max_eigen_phase,
                          "max_line": rep.max_line, "violations": rep.violations}
    return info


def _loop_track(v: dict, path) -> str:
    from .model import Hamiltonian2, track_branch

    t, _, alpha = path.samples(v["samples"])
    hs = [Hamiltonian2.from_reduced(v["e0"], complex(z), v["omega"]) for z in path.z(t)]
    tracked = track_branch(hs)
    rows = []
    for a, pair in zip(alpha, tracked):
        rows.append((a, pair.e_plus.real, pair.e_plus.imag, pair.e_minus.real, pair.e_minus.imag,
                     pair.w_plus.real, pair.w_plus.imag))
    header = ("alpha", "ReEp", "ImEp", "ReEm", "ImEm", "ReWp", "ImWp")
    payload = {"alpha": alpha, "e_plus": [p.e_plus for p in tracked],
               "e_minus": [p.e_minus for p in tracked], "w_plus": [p.w_plus for p in tracked]}
    return _emit_table(v, header, rows, payload)


def cmd_jump(v: dict) -> str:
    from .projective import TrajectorySegment, phase_jump_profile

    seg = TrajectorySegment(v["rho"], v["alpha0"], tuple(v["s_range"]))
    prof = phase_jump_profile(seg, v["n"])
    payload = {"rho": seg.rho, "alpha0": seg.alpha0, "swing": prof.swing,
               "s": prof.s, "theta": prof.theta, "abs_eps": prof.abs_eps}
    return _emit_table(v, ("s", "theta", "abs_eps"), prof.rows(), payload)


def cmd_rigidity_scan(v: dict) -> str:
    from .rigidity import Axis, ScanSpec, rigidity_asymptote_check, scan_landscape

    if v["asymptote_grid"] is not None:
        lo, hi = v["asymptote_grid"]
        if lo <= 0 or hi <= 0:
            raise ValidationError("asymptote grid endpoints must be positive")
        grid = np.logspace(math.log10(lo), math.log10(hi), v["asymptote_n"])
        chk = rigidity_asymptote_check(grid)
        payload = {"abs_eps": np.abs(chk.eps), "r": chk.r, "deviation": chk.deviation,
                   "max_deviation": chk.max_deviation, "monotone": chk.monotone}
        return _emit_table(v, ("abs_eps", "r", "deviation"),
                           zip(np.abs(chk.eps), chk.r, chk.deviation), payload)
    if v["x"] is None or v["y"] is None:
        raise ValidationError("rigidity-scan needs x and y axes")
    for ax in (v["x"], v["y"]):
        try:
            jsonschema.validate(ax, _AXIS_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ValidationError(f"invalid axis: {exc.message}") from exc
    h = _hamiltonian(v)
    spec = ScanSpec(h, Axis(**v["x"]), Axis(**v["y"]), v["tol"] or 1e-9)
    grid = scan_landscape(spec, v["threads"])
    if v["format"] == "csv":
        return grid.to_csv(v["branch"])
    r = grid.r_plus if v["branch"] == 1 else grid.r_minus
    return io.dumps({"x": grid.x, "y": grid.y, "fields": list(grid.fields), "r": r,
                     "e_plus": grid.e_plus, "e_minus": grid.e_minus, "ep_flag": grid.ep_flag})


def cmd_pt(v: dict) -> str:
    from .jordan import detect_ep
    from .ptsym import build_c_operator, build_pt, c_operator_from_alpha, product_table, pt_embed, pt_spectrum

    if v["alpha"] is not None:
        c = c_operator_from_alpha(v["alpha"])
        return io.dumps({"alpha": c.alpha, "cos_alpha": c.cos_alpha, "c_matrix": c.matrix,
                         "norm": c.norm, "divergence": c.divergence, "invariants": c.invariants()})
    m = build_pt(v["r"], v["s"], v["theta"], v["tol"] or 1e-12)
    sp = pt_spectrum(m)
    ep = detect_ep(m.hamiltonian, 1e-9)
    out: dict[str, Any] = {
        "model": m.to_json(),
        "pt_commutator": m.pt_residual(),
        "spectrum": {"e_plus": sp.e_plus, "e_minus": sp.e_minus},
        "ep_detected": None if ep is None else ep[0],
    }
    if m.symmetry == "exact":
        c = build_c_operator(m)
        tables = product_table(m)
        out["spectrum"].update({"v_plus": sp.v_plus, "v_minus": sp.v_minus})
        out["c_operator"] = {"matrix": c.matrix, "norm": c.norm, "divergence": c.divergence,
                             "invariants": c.invariants(m)}
        out["krein"] = tables["krein"]
        out["cpt"] = tables["cpt"]
    if m.symmetry != "broken":
        emb = {}
        for tag, b in (("plus", 1), ("minus", -1)):
            e = pt_embed(m, b)
            emb[tag] = {"point": e.point.u, "kappa": e.kappa, "line_product": e.line_product,
                        "conic_residual": e.conic_residual}
        out["embedding"] = emb
    return io.dumps(out)


HANDLERS = {
    "spectrum": cmd_spectrum,
    "ep": cmd_ep,
    "puiseux": cmd_puiseux,
    "loop-phase": cmd_loop_phase,
    "jump": cmd_jump,
    "rigidity-scan": cmd_rigidity_scan,
    "pt": cmd_pt,
}


_NEGATIVE_VALUE = re.compile(r"^-(\.?\d|inf|nan|[ij]$|\d*\.?\d*[ij]$)", re.IGNORECASE)


def _join_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--eps2 -0.5j`` into ``--eps2=-0.5j`` so argparse does not read a flag."""
    out: list[str] = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NEGATIVE_VALUE.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage to stderr
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        values = resolve_options(ns.command, ns)
        text = HANDLERS[ns.command](values)
    except NumericalError as exc:
        print(f"epkit: numerical error ({type(exc).__name__}): {exc}", file=stderr)
        return EXIT_NUMERICAL
    except (ValidationError, EPKitError) as exc:
        print(f"epkit: invalid input ({type(exc).__name__}): {exc}", file=stderr)
        return EXIT_INVALID
    if values["out"]:
        with open(values["out"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
