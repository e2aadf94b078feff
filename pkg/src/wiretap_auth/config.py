"""Experiment configuration, deterministic seed derivation, and result
emission (CSV rows + run manifest).

All randomness in a run derives from one 64-bit master seed through
SeedSequence([master, experiment_id, point_index, trial_index]), so results
are reproducible at any parallelism level and any single row can be
regenerated from its (config, seed) pair.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .codebook import Budgets, BuildParams
from .gf import FieldParams
from .hashing import StinsonFamily
from .infotheory import Channel
from .typicality import TypeP

SCHEMA_VERSION = 1

EXPERIMENT_IDS = {
    "rates": 1,
    "build": 2,
    "verify-codebook": 3,
    "completeness": 4,
    "attack": 5,
    "leakage": 6,
    "lemmas": 7,
    "selftest": 8,
}


class ConfigError(ValueError):
    """The experiment configuration is malformed or inconsistent."""


def derive_seed(master: int, experiment: str, point_index: int) -> int:
    """Stable per-parameter-point seed."""
    ss = np.random.SeedSequence([master, EXPERIMENT_IDS[experiment], point_index])
    return int(ss.generate_state(1)[0])


def trial_rng(point_seed: int, trial_index: int) -> np.random.Generator:
    """Per-trial generator, independent of execution order."""
    return np.random.default_rng(np.random.SeedSequence([point_seed, trial_index]))


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    n: int
    w1: str
    w2: str
    i_rows: int
    j_cols: int
    q: int
    s: int
    eps: float
    metric: str
    value: float
    lo: float
    hi: float
    seed: int

    FIELDS = (
        "experiment",
        "n",
        "w1",
        "w2",
        "i_rows",
        "j_cols",
        "q",
        "s",
        "eps",
        "metric",
        "value",
        "lo",
        "hi",
        "seed",
    )

    def as_csv_values(self) -> list[str]:
        out = []
        for name in self.FIELDS:
            v = getattr(self, name)
            out.append(repr(v) if isinstance(v, float) else str(v))
        return out


def channel_str(ch: Channel) -> str:
    return ";".join(",".join(repr(float(v)) for v in row) for row in ch.rows)


def write_results_csv(rows: list[ResultRow], path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(ResultRow.FIELDS)
        for row in rows:
            writer.writerow(row.as_csv_values())


def write_manifest(path: Path, command: str, config: dict, seed: int):
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config_hash": config_hash(config),
        "seed": seed,
        "package_version": __version__,
        "results": "results.csv",
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(manifest, f, sort_keys=True, indent=2)
        f.write("\n")


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------


def load_config(path: str | Path) -> dict:
    try:
        with open(path) as f:
            config = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load config {path}: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError("config root must be a JSON object")
    return config


def parse_channels(config: dict) -> tuple[Channel, Channel]:
    try:
        section = config["channels"]
        w1 = Channel(np.array(section["w1"], dtype=np.float64))
        w2 = Channel(np.array(section["w2"], dtype=np.float64))
    except KeyError as exc:
        raise ConfigError(f"channels section missing key {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"invalid channel matrix: {exc}") from exc
    return w1, w2


def parse_type_ladder(config: dict) -> list[TypeP]:
    """The input type at each ladder point.

    Accepts {"counts": [...]}, {"counts_ladder": [[...], ...]}, or
    {"ratio": [...], "n": int | "n_ladder": [ints]} with counts scaled as
    ratio * n / sum(ratio) (must divide exactly).
    """
    section = config.get("input_type")
    if not isinstance(section, dict):
        raise ConfigError("input_type section required")
    if "counts" in section:
        return [TypeP.from_counts(section["counts"])]
    if "counts_ladder" in section:
        return [TypeP.from_counts(c) for c in section["counts_ladder"]]
    if "ratio" in section:
        ratio = [int(v) for v in section["ratio"]]
        ns = section.get("n_ladder", [section.get("n")])
        if ns == [None]:
            raise ConfigError("input_type.ratio requires n or n_ladder")
        types = []
        for n in ns:
            total = sum(ratio)
            if n % total:
                raise ConfigError(f"n={n} not divisible by ratio total {total}")
            types.append(TypeP.from_counts([v * (n // total) for v in ratio]))
        return types
    raise ConfigError("input_type needs counts, counts_ladder, or ratio")


def parse_budgets(config: dict) -> Budgets:
    section = config.get("budgets", {})
    try:
        return Budgets(
            enumeration_limit=int(section.get("enumeration_limit", Budgets().enumeration_limit)),
            exhaustive_output_limit=int(
                section.get("exhaustive_output_limit", Budgets().exhaustive_output_limit)
            ),
            mc_trials=int(section.get("mc_trials", Budgets().mc_trials)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid budgets: {exc}") from exc


def parse_family(config: dict) -> StinsonFamily:
    section = config.get("hash")
    if not isinstance(section, dict) or "q" not in section or "s" not in section:
        raise ConfigError("hash section with q and s required")
    try:
        return StinsonFamily(FieldParams.for_size(int(section["q"])), int(section["s"]))
    except ValueError as exc:
        raise ConfigError(f"invalid hash family: {exc}") from exc


def build_params_for(
    config: dict,
    type_p: TypeP,
    point_index: int,
    master_seed: int,
    experiment: str,
) -> BuildParams:
    """BuildParams for one ladder point; eps may be a scalar or a per-point
    list aligned with the ladder."""
    section = config.get("codebook")
    if not isinstance(section, dict):
        raise ConfigError("codebook section required")
    w1, w2 = parse_channels(config)
    eps = section.get("eps")
    if isinstance(eps, list):
        if point_index >= len(eps):
            raise ConfigError("eps list shorter than the n ladder")
        eps = eps[point_index]
    try:
        return BuildParams(
            type_p=type_p,
            w1=w1,
            w2=w2,
            i_rows=int(section["i_rows"]),
            j_cols=int(section["j_cols"]),
            tau=float(section["tau"]),
            theta=float(section["theta"]),
            omega=float(section["omega"]),
            seed=derive_seed(master_seed, experiment, point_index),
            s2=int(section["s2"]) if "s2" in section else None,
            eps=float(eps) if eps is not None else None,
            budgets=parse_budgets(config),
            max_column_error=section.get("max_column_error"),
            max_column_sd=section.get("max_column_sd"),
        )
    except KeyError as exc:
        raise ConfigError(f"codebook section missing key {exc}") from exc


def master_seed_of(config: dict, override: int | None = None) -> int:
    if override is not None:
        return override
    seed = config.get("seed")
    if not isinstance(seed, int):
        raise ConfigError("config.seed (integer) required unless --seed given")
    return seed
