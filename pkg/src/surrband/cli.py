"""Command-line interface.

Four subcommands, all driven by a JSON config file (``--config``):

``constants``
    Calibration constants for a single-subspace configuration (leverage,
    benchmark width, chi-square separation constants).
``band``
    Compute an adaptive band for a supplied data vector; writes a CSV
    (``x,lower,center,upper``) to ``--out`` and a JSON sidecar with the
    selection diagnostics to ``<out>.json``.
``bounds``
    Width lower-bound decomposition for a tuning configuration.
``simulate``
    Monte Carlo coverage/width certification (``--threads`` or the
    ``SURRBAND_THREADS`` environment variable control parallelism; results
    are byte-identical regardless).

Exit codes: 0 success, 2 invalid arguments or config (domain errors), 3
infeasible narrowness level (the message carries the smallest feasible
``gamma``).  All JSON output is serialized with sorted keys and 2-space
indentation so identical runs produce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .bands import BandParams, adaptive_band_nested, level_widths
from .bounds import surrogate_lower_bound, w_target
from .errors import DomainError, FeasibilityError
from .simulate import Scenario, make_spoiler, run
from .specfun import econst, kappa, qconst, tau_inv
from .subspace import (
    NestedScale,
    Subspace,
    cosine_basis,
    dyadic_scale,
    orthonormalize,
)
from .surrogate import SurrogateTuning, nested_tuning

__all__ = ["main", "build_parser"]

_CONFIG_VERSION = 1


def _fail(message: str) -> DomainError:
    return DomainError(message)


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _fail(f"cannot read config {path!r}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _fail(f"config {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise _fail("config must be a JSON object")
    if cfg.get("version") != _CONFIG_VERSION:
        raise _fail(
            f"config version must be {_CONFIG_VERSION}, got {cfg.get('version')!r}"
        )
    return cfg


def _reject_unknown(obj: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise _fail(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _require_keys(obj: dict, required: tuple, where: str) -> None:
    missing = sorted(k for k in required if k not in obj)
    if missing:
        raise _fail(f"missing key(s) in {where}: {', '.join(missing)}")


def _positive_int(obj: dict, key: str, where: str) -> int:
    value = obj[key]
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise _fail(f"{where}.{key} must be a positive integer, got {value!r}")
    return value


def _number(obj: dict, key: str, where: str) -> float:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(f"{where}.{key} must be a number, got {value!r}")
    return float(value)


def _build_scale(cfg: dict, n: int) -> NestedScale:
    if not isinstance(cfg, dict):
        raise _fail("subspace must be a JSON object")
    kind = cfg.get("kind")
    if kind == "dyadic":
        _reject_unknown(cfg, {"kind", "d", "dims"}, "subspace")
        if ("d" in cfg) == ("dims" in cfg):
            raise _fail("dyadic subspace needs exactly one of 'd' or 'dims'")
        if "d" in cfg:
            dims = [_positive_int(cfg, "d", "subspace")]
        else:
            dims = cfg["dims"]
            if not isinstance(dims, list) or not dims:
                raise _fail("subspace.dims must be a nonempty list of integers")
            for v in dims:
                if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                    raise _fail(f"subspace.dims entries must be positive integers, got {v!r}")
        return dyadic_scale(n, dims)
    if kind == "cosine":
        _reject_unknown(cfg, {"kind", "d"}, "subspace")
        _require_keys(cfg, ("d",), "subspace")
        return NestedScale((cosine_basis(n, _positive_int(cfg, "d", "subspace")),))
    if kind == "custom":
        _reject_unknown(cfg, {"kind", "rows"}, "subspace")
        _require_keys(cfg, ("rows",), "subspace")
        rows = np.asarray(cfg["rows"], dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] != n:
            raise _fail(
                f"subspace.rows must be a matrix with {n} columns, got shape {rows.shape}"
            )
        return NestedScale((Subspace(orthonormalize(rows)),))
    raise _fail(f"subspace.kind must be 'dyadic', 'cosine' or 'custom', got {kind!r}")


def _single_level(scale: NestedScale, where: str) -> Subspace:
    if scale.m != 1:
        raise _fail(f"{where} requires a single subspace, got {scale.m} levels")
    return scale.levels[0]


def _build_tuning(
    cfg: dict,
    scale: NestedScale,
    alpha: float,
    gamma: float,
    sigma: float,
    alphas: tuple[float, ...],
) -> SurrogateTuning:
    if not isinstance(cfg, dict):
        raise _fail("tuning must be a JSON object")
    if "auto" in cfg:
        _reject_unknown(cfg, {"auto"}, "tuning")
        mode = cfg["auto"]
        if mode not in ("achievable", "lower-bound"):
            raise _fail(
                f"tuning.auto must be 'achievable' or 'lower-bound', got {mode!r}"
            )
        return nested_tuning(
            scale, alpha, gamma, sigma, alphas=alphas, achievable=(mode == "achievable")
        )
    _reject_unknown(cfg, {"eps2", "epsInf"}, "tuning")
    _require_keys(cfg, ("eps2", "epsInf"), "tuning")

    def levels_of(key: str) -> tuple[float, ...]:
        value = cfg[key]
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return (float(value),) * scale.m
        if isinstance(value, list):
            if len(value) != scale.m:
                raise _fail(
                    f"tuning.{key} must have one entry per level ({scale.m}), got {len(value)}"
                )
            return tuple(float(v) for v in value)
        raise _fail(f"tuning.{key} must be a number or list of numbers")

    return SurrogateTuning(levels_of("eps2"), levels_of("epsInf"))


def _build_split(cfg: dict, alpha: float, m: int) -> tuple[float, ...]:
    if "alphaSplit" not in cfg:
        return (alpha / (m + 1),) * (m + 1)
    split = cfg["alphaSplit"]
    if not isinstance(split, list) or len(split) != m + 1:
        raise _fail(f"alphaSplit must be a list of length m + 1 = {m + 1}")
    return tuple(float(v) for v in split)


def _build_truth(
    cfg,
    n: int,
    scale: NestedScale | None,
    tuning: SurrogateTuning | None,
) -> np.ndarray:
    if isinstance(cfg, list):
        truth = np.asarray(cfg, dtype=np.float64)
        if truth.shape != (n,):
            raise _fail(f"truth must have length {n}, got shape {truth.shape}")
        return truth
    if isinstance(cfg, dict):
        kind = cfg.get("kind")
        if kind == "zero":
            _reject_unknown(cfg, {"kind"}, "truth")
            return np.zeros(n)
        if kind == "spoiler":
            _reject_unknown(cfg, {"kind", "margin", "level"}, "truth")
            _require_keys(cfg, ("margin",), "truth")
            if scale is None or tuning is None:
                raise _fail("spoiler truth requires an adaptive configuration")
            level = cfg.get("level", 1)
            if not isinstance(level, int) or isinstance(level, bool) or not 1 <= level <= scale.m:
                raise _fail(f"truth.level must be an integer in [1, {scale.m}], got {level!r}")
            return make_spoiler(
                scale.levels[level - 1],
                tuning.eps2[level - 1],
                tuning.eps_inf[level - 1],
                _number(cfg, "margin", "truth"),
            )
        raise _fail(f"truth.kind must be 'zero' or 'spoiler', got {kind!r}")
    raise _fail("truth must be a list of numbers or an object")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _json_text(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


# --- subcommand handlers --------------------------------------------------


def _cmd_constants(args) -> int:
    cfg = _load_config(args.config)
    _reject_unknown(cfg, {"version", "n", "subspace", "alpha", "gamma", "sigma"}, "config")
    _require_keys(cfg, ("n", "subspace", "alpha", "gamma", "sigma"), "config")
    n = _positive_int(cfg, "n", "config")
    alpha = _number(cfg, "alpha", "config")
    gamma = _number(cfg, "gamma", "config")
    sigma = _number(cfg, "sigma", "config")
    space = _single_level(_build_scale(cfg["subspace"], n), "constants")
    payload = {
        "config": cfg,
        "omega": space.omega,
        "kappa": kappa(alpha, gamma),
        "tauInv": tau_inv(1.0 - 2.0 * alpha - gamma),
        "wF": w_target(space.omega, alpha, gamma, sigma),
        "Q": None if space.d == n else qconst(n - space.d, alpha / 2.0, gamma),
        "E": None if space.d == n else econst(n - space.d, alpha / 2.0, gamma),
    }
    _emit(_json_text(payload), args.out)
    return 0


def _parse_band_config(cfg: dict):
    _reject_unknown(
        cfg,
        {"version", "y", "subspace", "alpha", "gamma", "sigma", "tuning", "alphaSplit"},
        "config",
    )
    _require_keys(cfg, ("y", "subspace", "alpha", "gamma", "sigma", "tuning"), "config")
    y = np.asarray(cfg["y"], dtype=np.float64)
    if y.ndim != 1 or y.size < 1:
        raise _fail("y must be a nonempty list of numbers")
    n = y.shape[0]
    alpha = _number(cfg, "alpha", "config")
    gamma = _number(cfg, "gamma", "config")
    sigma = _number(cfg, "sigma", "config")
    scale = _build_scale(cfg["subspace"], n)
    split = _build_split(cfg, alpha, scale.m)
    tuning = _build_tuning(cfg["tuning"], scale, alpha, gamma, sigma, split)
    params = BandParams(
        alpha=alpha, gamma=gamma, sigma=sigma, tuning=tuning, alpha_split=split
    )
    return y, scale, params


def _cmd_band(args) -> int:
    cfg = _load_config(args.config)
    y, scale, params = _parse_band_config(cfg)
    band = adaptive_band_nested(scale, y, params)
    x = np.arange(1, scale.n + 1, dtype=np.float64) / scale.n
    lines = ["x,lower,center,upper"]
    for xi, lo, ce, up in zip(x, band.lower, band.center, band.upper):
        lines.append(f"{float(xi)!r},{float(lo)!r},{float(ce)!r},{float(up)!r}")
    _emit("\n".join(lines) + "\n", args.out)
    sidecar = dict(band.to_dict())
    sidecar["config"] = cfg
    Path(args.out + ".json").write_text(_json_text(sidecar))
    return 0


def _cmd_bounds(args) -> int:
    cfg = _load_config(args.config)
    _reject_unknown(
        cfg, {"version", "n", "subspace", "alpha", "gamma", "sigma", "tuning"}, "config"
    )
    _require_keys(cfg, ("n", "subspace", "alpha", "gamma", "sigma", "tuning"), "config")
    n = _positive_int(cfg, "n", "config")
    alpha = _number(cfg, "alpha", "config")
    gamma = _number(cfg, "gamma", "config")
    sigma = _number(cfg, "sigma", "config")
    scale = _build_scale(cfg["subspace"], n)
    space = _single_level(scale, "bounds")
    split = _build_split(cfg, alpha, scale.m)
    tuning = _build_tuning(cfg["tuning"], scale, alpha, gamma, sigma, split)
    report = surrogate_lower_bound(
        space, tuning.eps2[0], tuning.eps_inf[0], alpha, gamma, sigma
    )
    payload = dict(report.to_dict())
    payload["config"] = cfg
    payload["eps2"] = tuning.eps2[0]
    payload["epsInf"] = tuning.eps_inf[0]
    _emit(_json_text(payload), args.out)
    return 0


def _resolve_threads(args) -> int:
    if args.threads is not None:
        value = args.threads
    else:
        env = os.environ.get("SURRBAND_THREADS")
        if env is None:
            return 1
        try:
            value = int(env)
        except ValueError as exc:
            raise _fail(f"SURRBAND_THREADS must be an integer, got {env!r}") from exc
    if value < 1:
        raise _fail(f"thread count must be positive, got {value}")
    return value


def _cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    _reject_unknown(
        cfg,
        {
            "version", "procedure", "n", "subspace", "alpha", "gamma", "sigma",
            "tuning", "alphaSplit", "truth", "reps", "seed", "widthThreshold",
            "perCoordinate",
        },
        "config",
    )
    _require_keys(cfg, ("procedure", "n", "alpha", "sigma", "truth", "reps", "seed"), "config")
    procedure = cfg["procedure"]
    n = _positive_int(cfg, "n", "config")
    alpha = _number(cfg, "alpha", "config")
    sigma = _number(cfg, "sigma", "config")
    reps = _positive_int(cfg, "reps", "config")
    seed = cfg["seed"]
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise _fail(f"config.seed must be a nonnegative integer, got {seed!r}")

    scale = params = None
    if procedure == "adaptive":
        _require_keys(cfg, ("subspace", "gamma", "tuning"), "config")
        gamma = _number(cfg, "gamma", "config")
        scale = _build_scale(cfg["subspace"], n)
        split = _build_split(cfg, alpha, scale.m)
        tuning = _build_tuning(cfg["tuning"], scale, alpha, gamma, sigma, split)
        params = BandParams(
            alpha=alpha, gamma=gamma, sigma=sigma, tuning=tuning, alpha_split=split
        )
        truth = _build_truth(cfg["truth"], n, scale, tuning)
        scenario = Scenario(
            kind="adaptive", truth=truth, reps=reps, seed=seed, scale=scale, params=params
        )
    elif procedure == "bonferroni":
        truth = _build_truth(cfg["truth"], n, None, None)
        scenario = Scenario(
            kind="bonferroni", truth=truth, reps=reps, seed=seed, alpha=alpha, sigma=sigma
        )
    elif procedure == "subspace":
        _require_keys(cfg, ("subspace",), "config")
        space = _single_level(_build_scale(cfg["subspace"], n), "the subspace procedure")
        truth = _build_truth(cfg["truth"], n, None, None)
        per_coordinate = bool(cfg.get("perCoordinate", False))
        scenario = Scenario(
            kind="subspace", truth=truth, reps=reps, seed=seed,
            space=space, alpha=alpha, sigma=sigma, per_coordinate=per_coordinate,
        )
    else:
        raise _fail(
            f"procedure must be 'adaptive', 'bonferroni' or 'subspace', got {procedure!r}"
        )

    width_threshold = None
    if "widthThreshold" in cfg:
        wt = cfg["widthThreshold"]
        if isinstance(wt, dict):
            _reject_unknown(wt, {"kind", "level"}, "widthThreshold")
            if wt.get("kind") != "levelWidth" or scale is None or params is None:
                raise _fail(
                    "widthThreshold objects must be "
                    '{"kind": "levelWidth", "level": j} on an adaptive run'
                )
            level = wt.get("level")
            if not isinstance(level, int) or isinstance(level, bool) or not 1 <= level <= scale.m + 1:
                raise _fail(
                    f"widthThreshold.level must be an integer in [1, {scale.m + 1}]"
                )
            width_threshold = level_widths(scale, params)[level - 1]
        else:
            width_threshold = _number(cfg, "widthThreshold", "config")

    report = run(scenario, width_threshold=width_threshold, threads=_resolve_threads(args))
    payload = dict(report.to_dict())
    payload["config"] = cfg
    _emit(_json_text(payload), args.out)
    return 0


# --- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surrband",
        description=(
            "Finite-sample adaptive confidence bands over nested regression "
            "subspaces: calibration constants, band computation, width lower "
            "bounds, and Monte Carlo certification."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "constants",
        help="calibration constants for a single-subspace configuration",
        description=(
            "Report leverage omega, kappa, tau_inv, the benchmark width wF, "
            "and the chi-square separation constants Q and E evaluated at "
            "(n - d, alpha/2, gamma) — the values the achievable tuning uses "
            "(null when d == n)."
        ),
    )
    p.add_argument("--config", required=True, help="JSON configuration file")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_constants)

    p = sub.add_parser(
        "band",
        help="compute an adaptive band for a data vector",
        description=(
            "Write the band as CSV (x,lower,center,upper) to --out and the "
            "selection diagnostics to <out>.json."
        ),
    )
    p.add_argument("--config", required=True, help="JSON configuration file")
    p.add_argument("--out", required=True, help="output CSV path (sidecar: <out>.json)")
    p.set_defaults(func=_cmd_band)

    p = sub.add_parser(
        "bounds",
        help="width lower-bound decomposition for a tuning configuration",
    )
    p.add_argument("--config", required=True, help="JSON configuration file")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser(
        "simulate",
        help="Monte Carlo coverage/width certification",
        description=(
            "Run the configured scenario; results are byte-identical for any "
            "thread count (replications are keyed by a counter-based "
            "generator, not by execution order)."
        ),
    )
    p.add_argument("--config", required=True, help="JSON configuration file")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.add_argument(
        "--threads",
        type=int,
        help="worker threads (default: SURRBAND_THREADS or 1)",
    )
    p.set_defaults(func=_cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FeasibilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
