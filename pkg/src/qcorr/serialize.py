"""JSON/CSV serialization: states, bases, plans, chain configs, manifests.

State matrices are stored row-major as separate real and imaginary parts,
with subsystem 0 the slowest-varying tensor index.  Floats in CSV output
are printed with 17 significant digits so reruns diff cleanly.
"""

import csv
import json
import time
from importlib import metadata

import numpy as np

from .chain import ChainConfig, LinkSpec, FLAG_COPY, OPTIMIZED
from .errors import InvariantError, ParseError
from .premeasure import MeasurementPlan
from .quantumness import OptimizerConfig
from .states import APPARATUS, APPARATUS_PREFIX, LabeledState, LocalBasis, Register

try:
    VERSION = metadata.version("qcorr")
except metadata.PackageNotFoundError:  # running from a source tree
    VERSION = "0.0.0+src"


def _require(obj, key, kind, where):
    if key not in obj:
        raise ParseError(f"{where}: missing field {key!r}")
    val = obj[key]
    if not isinstance(val, kind):
        raise ParseError(f"{where}: field {key!r} has wrong type {type(val).__name__}")
    return val


def _matrix_from_parts(obj, where):
    re = _require(obj, "re", list, where)
    im = _require(obj, "im", list, where)
    try:
        re_arr = np.asarray(re, dtype=float)
        im_arr = np.asarray(im, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: non-numeric matrix entries ({exc})") from None
    if re_arr.shape != im_arr.shape or re_arr.ndim != 2:
        raise ParseError(f"{where}: 're' and 'im' must be equal-shape 2-d arrays")
    return re_arr + 1j * im_arr


def _matrix_to_parts(m):
    m = np.asarray(m)
    return {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}


def state_to_json(state):
    payload = {"labels": list(state.register.labels), "dims": list(state.register.dims)}
    payload.update(_matrix_to_parts(state.rho))
    return payload


def state_from_json(obj, where="state"):
    labels = _require(obj, "labels", list, where)
    dims = _require(obj, "dims", list, where)
    rho = _matrix_from_parts(obj, where)
    try:
        total = int(np.prod([int(d) for d in dims]))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: bad dims ({exc})") from None
    if rho.shape != (total, total):
        raise ParseError(
            f"{where}: matrix shape {rho.shape} does not match dims {dims} "
            f"(expected {total}x{total})"
        )
    kinds = tuple(
        APPARATUS if str(lab).startswith(APPARATUS_PREFIX) else "system" for lab in labels
    )
    try:
        reg = Register(tuple(str(s) for s in labels), tuple(dims), kinds)
        return LabeledState(reg, rho)
    except InvariantError:
        raise
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: {exc}") from None


def basis_to_json(basis):
    payload = {"subsystem": basis.subsystem}
    payload.update(_matrix_to_parts(basis.vectors))
    return payload


def basis_from_json(obj, where="basis"):
    subsystem = _require(obj, "subsystem", str, where)
    vectors = _matrix_from_parts(obj, where)
    return LocalBasis(subsystem, vectors)


def plan_to_json(plan):
    return {
        "measured": list(plan.measured),
        "bases": [basis_to_json(b) for b in plan.bases],
    }


def plan_from_json(obj, where="plan"):
    measured = _require(obj, "measured", list, where)
    bases_raw = _require(obj, "bases", list, where)
    bases = tuple(basis_from_json(b, f"{where}.bases[{i}]") for i, b in enumerate(bases_raw))
    return MeasurementPlan(tuple(str(s) for s in measured), bases)


def optimizer_from_json(obj, seed_default=0):
    obj = obj or {}
    return OptimizerConfig(
        restarts=int(obj.get("restarts", 24)),
        max_iter=int(obj.get("max_iter", 300)),
        tol=float(obj.get("tol", 1e-8)),
        seed=int(obj.get("seed", seed_default)),
    )


def chain_config_from_json(obj, where="chain config", seed=0):
    if "state" in obj:
        state = state_from_json(obj["state"], f"{where}.state")
    elif "state_file" in obj:
        state = load_state(obj["state_file"])
    else:
        raise ParseError(f"{where}: needs 'state' or 'state_file'")
    links_raw = _require(obj, "links", list, where)
    links = []
    for i, link in enumerate(links_raw):
        target = _require(link, "target", str, f"{where}.links[{i}]")
        basis = link.get("basis", FLAG_COPY)
        if isinstance(basis, dict):
            basis = basis_from_json(basis, f"{where}.links[{i}].basis")
        elif basis not in (FLAG_COPY, OPTIMIZED):
            raise ParseError(
                f"{where}.links[{i}]: basis must be {FLAG_COPY!r}, {OPTIMIZED!r}, "
                f"or an explicit basis object"
            )
        links.append(LinkSpec(target, basis))
    track = frozenset(obj.get("track", ["negativity"]))
    q_cfg = optimizer_from_json(obj.get("optimizer"), seed_default=seed)
    return ChainConfig(state, tuple(links), track, q_cfg)


def load_json(path, where=None):
    where = where or str(path)
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"{where}: cannot read file ({exc})") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{where}: invalid JSON at line {exc.lineno}: {exc.msg}") from None


def load_state(path):
    return state_from_json(load_json(path), where=str(path))


def make_manifest(command, config, seed):
    return {
        "command": command,
        "config": config,
        "seed": seed,
        "version": VERSION,
        "wall_time_s": None,  # filled at write time
    }


def write_report(path, payload, manifest, started_at):
    manifest = dict(manifest)
    manifest["wall_time_s"] = time.monotonic() - started_at
    payload = dict(payload)
    payload["manifest"] = manifest
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def fmt_float(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def write_csv(path, header, rows):
    """Fixed column order; floats at 17 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt_float(v) for v in row])
