"""Command-line front end.

Subcommands:
  wigner-grid       W of a phase-operator eigenstate on a square lattice
  negativity-sweep  negativity volume versus order s
  radius-sweep      effective radius versus order s
  herald-sweep      heralded-generation figures over an (eta, r) grid
  phase-sim         simulate interference counts and run the estimators

Every value an option can take may also come from a --config file of
flat key=value lines (# comments allowed, dashes and underscores in
keys interchangeable). Precedence is command line over config file over
built-in defaults. The effective configuration is echoed into the
output as sorted "# key=value" comments (CSV) or a "config" object
(JSON), so a rerun of the same command is byte-identical. Outputs carry
no timestamps and are written atomically.

Exit codes: 0 success, 1 invalid arguments or configuration,
2 numerical failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from .errors import LowInformationError, NumericalError, ValidationError
from .fock import number_state
from .herald import sweep as herald_sweep_rows
from .phase_est import (CountTable, estimate_coefficients, estimate_phase,
                        gauge_fixed, interference_probs, sample_outcomes,
                        superposition_probs)
from .phase_states import pb_eigenstate, phase_state, phase_value
from .wigner import (WignerGrid, effective_radius, negativity_volume,
                     wigner_grid)

_SCHEMAS = {
    "wigner-grid": {
        "s": 4, "m": 0, "phi0": 0.0, "extent": 5.0, "n": 101,
        "format": "csv",
    },
    "negativity-sweep": {
        "s": 6, "ref_one_photon": False, "format": "csv",
    },
    "radius-sweep": {
        "s": 12, "format": "csv",
    },
    "herald-sweep": {
        "s": 4, "r_min": 0.05, "r_max": 0.3, "r_steps": 6,
        "eta": (1.0, 0.8, 0.6), "format": "csv",
    },
    "phase-sim": {
        "s": 1, "mode": "exact", "target": "phase", "phi_j": 0.0,
        "phi_k": 0.7, "r": None, "theta": None, "coeffs": None,
        "trials": 100000, "seed": 0, "format": "json",
    },
}

_INT_KEYS = {"s", "m", "n", "r_steps", "trials", "seed"}
_FLOAT_KEYS = {"phi0", "extent", "r_min", "r_max", "phi_j", "phi_k",
               "r", "theta"}
_BOOL_KEYS = {"ref_one_photon"}


def _parse_eta(text: str) -> tuple:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ValidationError(f"bad eta list {text!r}: {exc}") from None
    if not values:
        raise ValidationError("eta list is empty")
    return values


def _convert(key: str, raw: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _BOOL_KEYS:
            low = raw.lower()
            if low in ("true", "1", "yes"):
                return True
            if low in ("false", "0", "no"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if key == "eta":
            return _parse_eta(raw)
    except ValueError as exc:
        raise ValidationError(f"bad value for {key}: {exc}") from None
    return raw


def _read_config(path: str) -> dict:
    data = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(
                    f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            data[key.strip().replace("-", "_")] = value.strip()
    return data


def _resolve(command: str, args: argparse.Namespace) -> dict:
    """Merge CLI > config file > defaults into the effective settings."""
    defaults = _SCHEMAS[command]
    config_data = {}
    if args.config is not None:
        config_data = _read_config(args.config)
    unknown = set(config_data) - set(defaults)
    if unknown:
        raise ValidationError(
            f"unknown config keys for {command}: {sorted(unknown)}")
    eff = {}
    for key, default in defaults.items():
        cli_value = getattr(args, key)
        if cli_value is not None:
            eff[key] = cli_value
        elif key in config_data:
            eff[key] = _convert(key, config_data[key])
        else:
            eff[key] = default
    return eff


def _fmt_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(repr(float(v)) for v in value)
    if value is None:
        return "none"
    return str(value)


def _config_comments(eff: dict) -> list:
    return [f"# {key}={_fmt_value(eff[key])}" for key in sorted(eff)]


def _config_json(eff: dict) -> dict:
    out = {}
    for key, value in eff.items():
        out[key] = list(value) if isinstance(value, tuple) else value
    return out


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".pbsim-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _require_format(eff: dict, allowed: tuple) -> None:
    if eff["format"] not in allowed:
        raise ValidationError(
            f"format must be one of {allowed}, got {eff['format']!r}")


def _cmd_wigner_grid(eff: dict, out: str | None) -> int:
    _require_format(eff, ("csv", "json"))
    state = pb_eigenstate(eff["s"], eff["m"], eff["phi0"])
    e = eff["extent"]
    if e <= 0:
        raise ValidationError(f"extent must be positive, got {e!r}")
    spec = WignerGrid(q_min=-e, q_max=e, p_min=-e, p_max=e,
                      nq=eff["n"], np=eff["n"])
    grid = wigner_grid(state, spec)
    qs = grid.q_values()
    ps = grid.p_values()
    if eff["format"] == "json":
        doc = {
            "config": _config_json(eff),
            "q": [float(v) for v in qs],
            "p": [float(v) for v in ps],
            "w": [[float(v) for v in row] for row in grid.values],
        }
        _emit(json.dumps(doc, sort_keys=True, indent=2) + "\n", out)
        return 0
    lines = _config_comments(eff)
    lines.append("q,p,W")
    for i, q in enumerate(qs):
        for j, p in enumerate(ps):
            lines.append(f"{float(q)!r},{float(p)!r},{float(grid.values[i, j])!r}")
    _emit("\n".join(lines) + "\n", out)
    return 0


def _monotone_footer(values) -> str:
    increasing = all(b > a for a, b in zip(values, values[1:]))
    return f"# monotonic_increasing={'true' if increasing else 'false'}"


def _cmd_negativity_sweep(eff: dict, out: str | None) -> int:
    _require_format(eff, ("csv",))
    if eff["s"] < 1:
        raise ValidationError(f"s must be >= 1, got {eff['s']}")
    lines = _config_comments(eff)
    lines.append("s,V")
    volumes = []
    for s in range(1, eff["s"] + 1):
        v = float(negativity_volume(pb_eigenstate(s, 0)))
        volumes.append(v)
        lines.append(f"{s},{v!r}")
    lines.append(_monotone_footer(volumes))
    if eff["ref_one_photon"]:
        ref = float(negativity_volume(number_state(1, 2)))
        lines.append(f"# ref_one_photon={ref!r}")
    _emit("\n".join(lines) + "\n", out)
    return 0


def _cmd_radius_sweep(eff: dict, out: str | None) -> int:
    _require_format(eff, ("csv",))
    if eff["s"] < 1:
        raise ValidationError(f"s must be >= 1, got {eff['s']}")
    lines = _config_comments(eff)
    lines.append("s,radius")
    radii = []
    for s in range(1, eff["s"] + 1):
        radius = float(effective_radius(pb_eigenstate(s, 0)))
        radii.append(radius)
        lines.append(f"{s},{radius!r}")
    # the s = 1 state is the outlier; monotonicity is judged from s = 2 on
    lines.append(_monotone_footer(radii[1:]))
    _emit("\n".join(lines) + "\n", out)
    return 0


def _cmd_herald_sweep(eff: dict, out: str | None) -> int:
    _require_format(eff, ("csv",))
    if eff["r_steps"] < 1:
        raise ValidationError(f"r_steps must be >= 1, got {eff['r_steps']}")
    if not eff["r_max"] >= eff["r_min"] >= 0:
        raise ValidationError("need 0 <= r_min <= r_max")
    r_values = np.linspace(eff["r_min"], eff["r_max"], eff["r_steps"])
    rows = herald_sweep_rows(eff["s"], r_values, eff["eta"])
    lines = _config_comments(eff)
    lines.append("s,r,eta,P,F,V,leakage")
    errors = []
    for row in rows:
        lines.append(f"{row.s},{float(row.r)!r},{float(row.eta)!r},"
                     f"{float(row.P)!r},{float(row.F)!r},{float(row.V)!r},"
                     f"{float(row.leakage)!r}")
        if row.error is not None:
            errors.append(
                f"# error[s={row.s},r={float(row.r)!r},"
                f"eta={float(row.eta)!r}]={row.error}")
    for eta in eff["eta"]:
        pts = [(row.r, row.P) for row in rows
               if row.eta == eta and row.error is None and row.P > 0]
        if len(pts) >= 2:
            lr = np.log([r for r, _ in pts])
            lp = np.log([p for _, p in pts])
            slope = float(np.polyfit(lr, lp, 1)[0])
            lines.append(f"# slope[eta={eta!r}]={slope!r}")
    lines.extend(errors)
    _emit("\n".join(lines) + "\n", out)
    return 0


def _parse_coeffs(text: str) -> np.ndarray:
    try:
        vals = [complex(tok.strip().replace(" ", ""))
                for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValidationError(f"bad coefficient list {text!r}: {exc}") from None
    if not vals:
        raise ValidationError("coefficient list is empty")
    return np.asarray(vals, dtype=np.complex128)


def _table_for(dist, mode, trials, seed):
    if mode == "exact":
        return CountTable.from_exact(dist)
    return sample_outcomes(dist, trials, seed)


def _counts_doc(phi_j: float, table: CountTable) -> dict:
    return {
        "phi_j": phi_j,
        "trials": table.trials,
        "seed": table.rng_seed,
        "counts": [[float(v) for v in row] for row in table.counts],
    }


def _cmd_phase_sim(eff: dict, out: str | None) -> int:
    _require_format(eff, ("json",))
    if eff["mode"] not in ("exact", "montecarlo"):
        raise ValidationError(
            f"mode must be exact or montecarlo, got {eff['mode']!r}")
    if eff["target"] not in ("phase", "coefficients"):
        raise ValidationError(
            f"target must be phase or coefficients, got {eff['target']!r}")
    s = eff["s"]
    if s < 1:
        raise ValidationError(f"s must be >= 1, got {s}")
    mode = eff["mode"]
    trials = eff["trials"]
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    seed = eff["seed"]
    doc = {"config": _config_json(eff), "distributions": []}

    if eff["target"] == "phase":
        truth = eff["phi_k"]
        right = phase_state(s, truth)
        settings = [eff["phi_j"], eff["phi_j"] + math.pi / 2.0]
        tables = []
        for idx, phi_j in enumerate(settings):
            dist = interference_probs(phase_state(s, phi_j), right)
            table = _table_for(dist, mode, trials, seed + idx)
            tables.append(table)
            doc["distributions"].append(_counts_doc(phi_j, table))
        est = estimate_phase(tables[0], settings[0], s,
                             aux=(settings[1], tables[1]))
        wrapped = math.remainder(est.phi_k - truth, 2.0 * math.pi)
        doc["estimate"] = {
            "phi_k": est.phi_k,
            "stderr": est.stderr,
            "candidates": list(est.candidates),
            "informative_counts": est.informative_counts,
        }
        doc["truth"] = {"phi_k": truth}
        doc["abs_error"] = abs(wrapped)
    else:
        if eff["coeffs"] is not None:
            if eff["r"] is not None or eff["theta"] is not None:
                raise ValidationError(
                    "give either --coeffs or --r/--theta, not both")
            raw = _parse_coeffs(eff["coeffs"])
            if raw.shape != (s + 1,):
                raise ValidationError(
                    f"need {s + 1} coefficients for s={s}, got {raw.size}")
        elif eff["r"] is not None:
            if s != 1:
                raise ValidationError("--r/--theta parameterize s=1 only")
            r = eff["r"]
            if not 0.0 <= r <= 1.0:
                raise ValidationError(f"r must lie in [0, 1], got {r!r}")
            theta = eff["theta"] if eff["theta"] is not None else 0.0
            raw = np.array([r, math.sqrt(1.0 - r * r) * np.exp(1j * theta)])
        else:
            raise ValidationError(
                "target=coefficients needs --coeffs (or --r/--theta at s=1)")
        truth = gauge_fixed(raw, s)
        settings = [phase_value(s, j) for j in range(s + 1)]
        if s == 1:
            settings.append(math.pi / 2.0)
        tables = []
        for idx, phi_j in enumerate(settings):
            dist = superposition_probs(phi_j, truth)
            table = _table_for(dist, mode, trials, seed + idx)
            tables.append((phi_j, table))
            doc["distributions"].append(_counts_doc(phi_j, table))
        est = estimate_coefficients(tables, s)
        err = np.abs(est.c - truth.c)
        doc["estimate"] = {
            "coefficients_re": [float(v) for v in est.c.real],
            "coefficients_im": [float(v) for v in est.c.imag],
            "note": est.note,
        }
        doc["truth"] = {
            "coefficients_re": [float(v) for v in truth.c.real],
            "coefficients_im": [float(v) for v in truth.c.imag],
        }
        doc["abs_error"] = [float(v) for v in err]

    _emit(json.dumps(doc, sort_keys=True, indent=2) + "\n", out)
    return 0


_COMMANDS = {
    "wigner-grid": _cmd_wigner_grid,
    "negativity-sweep": _cmd_negativity_sweep,
    "radius-sweep": _cmd_radius_sweep,
    "herald-sweep": _cmd_herald_sweep,
    "phase-sim": _cmd_phase_sim,
}


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", default=None, help="output path (default stdout)")
    sub.add_argument("--format", default=None, help="csv or json")
    sub.add_argument("--config", default=None,
                     help="key=value config file; command line wins")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pbsim",
        description="Phase-operator eigenstate simulation toolkit.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("wigner-grid",
                        help="Wigner function on a square lattice")
    p.add_argument("--s", type=int, default=None, help="state order")
    p.add_argument("--m", type=int, default=None, help="eigenstate index")
    p.add_argument("--phi0", type=float, default=None,
                   help="reference phase offset")
    p.add_argument("--extent", type=float, default=None,
                   help="half-width of the square lattice")
    p.add_argument("--n", type=int, default=None, help="points per axis")
    _add_common(p)

    p = subs.add_parser("negativity-sweep",
                        help="negativity volume for s = 1..S")
    p.add_argument("--s", type=int, default=None, help="largest order")
    p.add_argument("--ref-one-photon", dest="ref_one_photon",
                   action="store_const", const=True, default=None,
                   help="append the single-photon reference volume")
    _add_common(p)

    p = subs.add_parser("radius-sweep",
                        help="effective radius for s = 1..S")
    p.add_argument("--s", type=int, default=None, help="largest order")
    _add_common(p)

    p = subs.add_parser("herald-sweep",
                        help="herald probability, fidelity, negativity grid")
    p.add_argument("--s", type=int, default=None, help="target state order")
    p.add_argument("--r-min", dest="r_min", type=float, default=None)
    p.add_argument("--r-max", dest="r_max", type=float, default=None)
    p.add_argument("--r-steps", dest="r_steps", type=int, default=None)
    p.add_argument("--eta", type=_parse_eta, default=None,
                   help="comma-separated detector efficiencies")
    _add_common(p)

    p = subs.add_parser("phase-sim",
                        help="interference counts and estimator report")
    p.add_argument("--s", type=int, default=None, help="state order")
    p.add_argument("--mode", default=None, help="exact or montecarlo")
    p.add_argument("--target", default=None, help="phase or coefficients")
    p.add_argument("--phi-j", dest="phi_j", type=float, default=None,
                   help="reference phase of the first setting")
    p.add_argument("--phi-k", dest="phi_k", type=float, default=None,
                   help="true phase of the unknown state (target=phase)")
    p.add_argument("--r", type=float, default=None,
                   help="s=1 superposition weight (target=coefficients)")
    p.add_argument("--theta", type=float, default=None,
                   help="s=1 relative phase (target=coefficients)")
    p.add_argument("--coeffs", default=None,
                   help="comma-separated complex coefficients")
    p.add_argument("--trials", type=int, default=None,
                   help="samples per setting (mode=montecarlo)")
    p.add_argument("--seed", type=int, default=None, help="base RNG seed")
    _add_common(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 1
        return 0 if code == 0 else 1
    try:
        eff = _resolve(args.command, args)
        return _COMMANDS[args.command](eff, args.out)
    except LowInformationError as exc:
        print(f"pbsim: {exc}", file=sys.stderr)
        print("pbsim: rerun with more trials or a different --phi-j",
              file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"pbsim: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"pbsim: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"pbsim: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
