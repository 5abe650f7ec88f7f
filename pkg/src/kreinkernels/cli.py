"""``kk`` command-line interface.

Every command prints JSON (or CSV where offered) on stdout and exits 0; a
failure prints ``{"error": {"kind": ..., "detail": ...}}`` and exits 1 (2 for
malformed command lines).  ``KK_TOL`` overrides the default tolerance.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .decompositions import cross_validate
from .errors import KernelError, UsageError
from .kernels import KernelSpec, gram, psd_certificate
from .measures import WeightedMeasure, admissible, lebesgue
from .rkhs import atom_gram_check
from .sampling import empirical_covariance, sample_paths
from .series import DEFAULT_TOL, TruncationPolicy
from .special import gamma, generalized_gamma
from .transforms import fbm_bound_constant

METHOD_NAMES = {
    "spectral": "spectral",
    "schoenberg-a": "schoenberg_a",
    "schoenberg-b": "schoenberg_b",
    "bernstein": "bernstein",
    "bifbm": "bifbm_series",
}


@dataclass(frozen=True)
class CliConfig:
    tol: float = DEFAULT_TOL
    n_max: int = 500
    seed: int = 0
    output: str = "json"
    out_path: str | None = None
    acceleration: str | None = None

    def __post_init__(self):
        if not 0.0 < self.tol <= 1e-2:
            raise UsageError("tol must lie in (0, 1e-2]")
        if self.n_max < 2:
            raise UsageError("n_max must be >= 2")
        if self.seed < 0:
            raise UsageError("seed must be nonnegative")

    @property
    def policy(self) -> TruncationPolicy:
        return TruncationPolicy(self.tol, self.n_max, self.acceleration)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_grid(text: str) -> np.ndarray:
    """``a:b:n`` -> n equally spaced points from a to b inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must look like a:b:n, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}: {exc}") from None
    if n < 1:
        raise UsageError("grid needs n >= 1")
    return np.linspace(a, b, n)


def _json_arg(text: str, what: str) -> dict:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise UsageError(f"{what} must be a JSON object")
    return obj


def _spec(text: str) -> KernelSpec:
    obj = _json_arg(text, "--spec")
    try:
        return KernelSpec.from_json(obj)
    except KeyError as exc:
        raise UsageError(f"--spec is missing field {exc}") from None


def _measure(text: str) -> WeightedMeasure:
    obj = _json_arg(text, "--measure")
    try:
        return WeightedMeasure.from_json(obj)
    except KeyError as exc:
        raise UsageError(f"--measure is missing field {exc}") from None


def _default_tol() -> float:
    raw = os.environ.get("KK_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"KK_TOL={raw!r} is not a number") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--n-max", type=int, default=500)
    common.add_argument("--accel", choices=["none", "shanks", "levin"], default="none")
    common.add_argument("--output", choices=["json", "csv"], default="json")
    common.add_argument("--out", dest="out_path", default=None)

    p = _Parser(prog="kk", description="Krein kernels, their decompositions and RKHS checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    kern = sub.add_parser("kernel").add_subparsers(dest="action", required=True, parser_class=_Parser)
    ev = kern.add_parser("eval", parents=[common])
    ev.add_argument("--spec", required=True)
    ev.add_argument("--t", type=float, required=True)
    ev.add_argument("--s", type=float, required=True)
    for name in ("gram", "psd"):
        q = kern.add_parser(name, parents=[common])
        q.add_argument("--spec", required=True)
        q.add_argument("--grid", required=True)

    dec = sub.add_parser("decomp").add_subparsers(dest="action", required=True, parser_class=_Parser)
    cmp_ = dec.add_parser("compare", parents=[common])
    cmp_.add_argument("--spec", required=True)
    cmp_.add_argument("--method", choices=sorted(METHOD_NAMES), required=True)
    cmp_.add_argument("--grid", required=True)

    meas = sub.add_parser("measure").add_subparsers(dest="action", required=True, parser_class=_Parser)
    chk = meas.add_parser("check", parents=[common])
    chk.add_argument("--measure", required=True)
    chk.add_argument("--role", choices=["spectral", "bernstein"], required=True)

    gam = sub.add_parser("gamma", parents=[common])
    gam.add_argument("--z", type=float, required=True)
    gam.add_argument("--mu", type=float, default=None)
    gam.add_argument("--measure", default=None)

    smp = sub.add_parser("sample", parents=[common])
    smp.add_argument("--spec", required=True)
    smp.add_argument("--grid", required=True)
    smp.add_argument("--paths", type=int, required=True)
    smp.add_argument("--seed", type=int, default=0)

    rk = sub.add_parser("rkhs").add_subparsers(dest="action", required=True, parser_class=_Parser)
    rc = rk.add_parser("check", parents=[common])
    rc.add_argument("--measure", required=True)
    rc.add_argument("--grid", required=True)

    tr = sub.add_parser("transform").add_subparsers(dest="action", required=True, parser_class=_Parser)
    tb = tr.add_parser("bound", parents=[common])
    tb.add_argument("--H", type=float, required=True)
    tb.add_argument("--t0", type=float, required=True)
    return p


def _config(ns) -> CliConfig:
    return CliConfig(
        tol=ns.tol if ns.tol is not None else _default_tol(),
        n_max=ns.n_max,
        seed=getattr(ns, "seed", 0),
        output=ns.output,
        out_path=ns.out_path,
        acceleration=None if ns.accel == "none" else ns.accel,
    )


def run(argv: list[str]) -> tuple[str, dict | None, str | None]:
    """Execute a command.

    Returns the text to emit, the metadata sidecar (``sample`` only) and the
    ``--out`` path.
    """
    ns = build_parser().parse_args(argv)
    cfg = _config(ns)
    cmd = (ns.command, getattr(ns, "action", None))
    sidecar = None
    if cmd == ("kernel", "eval"):
        body = {"value": _spec(ns.spec)(ns.t, ns.s)}
    elif cmd == ("kernel", "gram"):
        g = gram(_spec(ns.spec), parse_grid(ns.grid))
        if cfg.output == "csv":
            return g.to_csv(), None, cfg.out_path
        body = g.to_json()
    elif cmd == ("kernel", "psd"):
        cert = psd_certificate(gram(_spec(ns.spec), parse_grid(ns.grid)), cfg.tol)
        body = cert.to_json()
    elif cmd == ("decomp", "compare"):
        rep = cross_validate(_spec(ns.spec), METHOD_NAMES[ns.method], parse_grid(ns.grid), cfg.policy)
        body = rep.to_json()
    elif cmd == ("measure", "check"):
        adm = admissible(_measure(ns.measure), ns.role)
        body = {"admissible": adm.ok, "diagnostic": adm.diagnostic}
    elif cmd == ("gamma", None):
        if ns.mu is None and ns.measure is None:
            body = {"value": gamma(ns.z)}
        else:
            if ns.mu is None:
                raise UsageError("--measure needs --mu")
            m = _measure(ns.measure) if ns.measure is not None else lebesgue()
            body = {"value": generalized_gamma(ns.z, ns.mu, m, cfg.tol)}
    elif cmd == ("sample", None):
        if ns.paths < 0:
            raise UsageError("--paths must be >= 0")
        ens = sample_paths(_spec(ns.spec), parse_grid(ns.grid), ns.paths, cfg.seed)
        sidecar = ens.metadata()
        if cfg.output == "csv":
            return ens.to_csv(), sidecar, cfg.out_path
        body = {"metadata": sidecar, "paths": ens.paths.tolist()}
        if ens.n_paths >= 2:
            body["max_standardized_deviation"] = empirical_covariance(ens).max_standardized_deviation
    elif cmd == ("rkhs", "check"):
        grid = parse_grid(ns.grid)
        body = {"grid": grid.tolist(), "max_residual": atom_gram_check(_measure(ns.measure), grid, cfg.tol)}
    elif cmd == ("transform", "bound"):
        body = fbm_bound_constant(ns.H, ns.t0, cfg.policy).to_json()
    else:  # pragma: no cover - argparse enforces the grammar
        raise UsageError(f"unknown command {cmd}")
    return json.dumps(body, sort_keys=True) + "\n", sidecar, cfg.out_path


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        text, sidecar, out_path = run(argv)
    except UsageError as exc:
        sys.stdout.write(json.dumps(exc.to_dict(), sort_keys=True) + "\n")
        return 2
    except KernelError as exc:
        sys.stdout.write(json.dumps(exc.to_dict(), sort_keys=True) + "\n")
        return 1
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        if sidecar is not None:
            with open(out_path + ".json", "w", encoding="utf-8") as fh:
                json.dump(sidecar, fh, sort_keys=True)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
