"""experiment.v0 configs: loading, validation against the catalog, templates."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from qaction.errors import ConfigValidationError
from qaction.experiments.catalog import CATALOG, ExperimentEntry, Param, suggest

SCHEMA_VERSION = "experiment.v0"
SOURCE_KINDS = ("cosine", "constant", "samples", "file")
_TOP_LEVEL_KEYS = {"schema_version", "experiment", "seed", "output_dir", "params"}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    params: dict[str, Any]
    seed: int | None = None
    output_dir: str | None = None
    source: str = field(default="<inline>", compare=False)

    def rng(self) -> np.random.Generator:
        if self.seed is None:
            raise ConfigValidationError(f"{self.experiment}: seed is required")
        return np.random.default_rng(self.seed)

    def with_seed(self, seed: int | None) -> ExperimentConfig:
        if seed is None:
            return self
        return ExperimentConfig(self.experiment, self.params, seed, self.output_dir, self.source)

    def to_dict(self) -> dict[str, Any]:
        # output_dir stays out of the echo so result files do not depend on it
        return {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "seed": self.seed,
            "params": self.params,
        }


def _is_int(value: object) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: object) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _check_number(param: Param, value: float, path: str) -> None:
    if not math.isfinite(value):
        raise ConfigValidationError(f"{path} must be finite")
    if param.positive and value <= 0:
        raise ConfigValidationError(f"{path} must be > 0")
    if param.minimum is not None and value < param.minimum:
        raise ConfigValidationError(f"{path} must be >= {param.minimum:g}")


def _validate_scalar(param: Param, value: object, path: str) -> object:
    if param.kind == "int":
        if not _is_int(value):
            raise ConfigValidationError(f"{path} must be an int")
        _check_number(param, value, path)
        return value
    if param.kind == "float":
        if not _is_number(value):
            raise ConfigValidationError(f"{path} must be a number")
        _check_number(param, float(value), path)
        return float(value)
    if param.kind == "bool":
        if not isinstance(value, bool):
            raise ConfigValidationError(f"{path} must be a boolean")
        return value
    if param.kind == "str":
        if not isinstance(value, str) or not value.strip():
            raise ConfigValidationError(f"{path} must be a non-empty string")
        if param.choices is not None and value not in param.choices:
            allowed = ", ".join(param.choices)
            raise ConfigValidationError(f"{path} must be one of: {allowed}")
        return value
    raise ConfigValidationError(f"{path}: unsupported parameter kind {param.kind}")


def _validate_list(param: Param, value: object, path: str) -> list:
    if not isinstance(value, list) or not value:
        raise ConfigValidationError(f"{path} must be a non-empty array")
    out: list = []
    for idx, item in enumerate(value):
        item_path = f"{path}[{idx}]"
        if param.kind == "int_list":
            if not _is_int(item):
                raise ConfigValidationError(f"{item_path} must be an int")
            _check_number(param, item, item_path)
            out.append(item)
        elif param.kind == "float_list":
            if not _is_number(item):
                raise ConfigValidationError(f"{item_path} must be a number")
            _check_number(param, float(item), item_path)
            out.append(float(item))
        else:
            if not (isinstance(item, list) and len(item) == 2 and all(map(_is_number, item))):
                raise ConfigValidationError(f"{item_path} must be a [re, im] pair")
            if not all(math.isfinite(float(x)) for x in item):
                raise ConfigValidationError(f"{item_path} must be finite")
            out.append([float(item[0]), float(item[1])])
    return out


def _read_source_file(path: Path, field_path: str) -> list[float]:
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ConfigValidationError(f"{field_path}: source file not found: {path}") from exc
    try:
        if path.suffix == ".json":
            values = json.loads(text)
        else:
            values = np.loadtxt(path, delimiter=",", ndmin=1).tolist()
    except (json.JSONDecodeError, ValueError) as exc:
        raise ConfigValidationError(f"{field_path}: cannot parse {path}: {exc}") from exc
    if not isinstance(values, list) or not values or not all(map(_is_number, values)):
        raise ConfigValidationError(f"{field_path}: {path} must hold a non-empty list of numbers")
    return [float(v) for v in values]


def _validate_source(value: object, path: str, base_dir: Path | None) -> dict[str, Any]:
    """Normalize a source block; file sources are read into inline samples."""
    if not isinstance(value, dict):
        raise ConfigValidationError(f"{path} must be an object")
    kind = value.get("kind")
    if kind not in SOURCE_KINDS:
        raise ConfigValidationError(f"{path}.kind must be one of: {', '.join(SOURCE_KINDS)}")
    if kind == "cosine":
        amplitude = value.get("amplitude")
        mode = value.get("mode", 1)
        if not _is_number(amplitude) or not math.isfinite(amplitude):
            raise ConfigValidationError(f"{path}.amplitude is required and must be finite")
        if not _is_int(mode):
            raise ConfigValidationError(f"{path}.mode must be an int")
        return {"kind": kind, "amplitude": float(amplitude), "mode": mode}
    if kind == "constant":
        amplitude = value.get("value")
        if not _is_number(amplitude) or not math.isfinite(amplitude):
            raise ConfigValidationError(f"{path}.value is required and must be finite")
        return {"kind": kind, "value": float(amplitude)}
    if kind == "samples":
        samples = value.get("values")
        if not isinstance(samples, list) or not samples or not all(map(_is_number, samples)):
            raise ConfigValidationError(f"{path}.values must be a non-empty array of numbers")
    else:
        raw = value.get("path")
        if not isinstance(raw, str) or not raw.strip():
            raise ConfigValidationError(f"{path}.path is required")
        file_path = Path(raw)
        if not file_path.is_absolute() and base_dir is not None:
            file_path = base_dir / file_path
        samples = _read_source_file(file_path, path)
    if not all(math.isfinite(float(v)) for v in samples):
        raise ConfigValidationError(f"{path}.values must be finite")
    return {"kind": "samples", "values": [float(v) for v in samples]}


def _validate_params(
    entry: ExperimentEntry, raw: dict[str, Any], base_dir: Path | None
) -> dict[str, Any]:
    known = {p.name for p in entry.params}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigValidationError(f"params.{unknown[0]} is not a parameter of {entry.name}")
    params: dict[str, Any] = {}
    for param in entry.params:
        path = f"params.{param.name}"
        if param.name not in raw:
            if param.required:
                raise ConfigValidationError(f"{path} is required")
            value = param.default
        else:
            value = raw[param.name]
        if param.kind == "source":
            params[param.name] = _validate_source(value, path, base_dir)
        elif param.kind.endswith("_list"):
            params[param.name] = _validate_list(param, value, path)
        else:
            params[param.name] = _validate_scalar(param, value, path)
    return params


def _check_budget(entry: ExperimentEntry, params: dict[str, Any]) -> None:
    if entry.budget is None:
        return
    if not (entry.dense or params.get("method") == "enumerate"):
        return
    dim_name, slices_name = entry.budget
    dim, n_slices = params[dim_name], params[slices_name]
    budget = params.get("max_basis_states", 2**20)
    # compare logs to avoid building huge integers
    if n_slices * math.log(dim) > math.log(budget) + 1e-12:
        raise ConfigValidationError(
            f"params.{slices_name}: {dim}^{n_slices} basis states exceed "
            f"params.max_basis_states={budget}"
        )


def validate_config(
    payload: dict[str, Any], *, source: str, base_dir: Path | None = None
) -> ExperimentConfig:
    schema_version = payload.get("schema_version", SCHEMA_VERSION)
    if schema_version != SCHEMA_VERSION:
        raise ConfigValidationError(f"{source}: schema_version must be '{SCHEMA_VERSION}'")

    unknown = sorted(set(payload) - _TOP_LEVEL_KEYS)
    if unknown:
        raise ConfigValidationError(f"{source}: unknown key {unknown[0]}")

    name = payload.get("experiment")
    if not isinstance(name, str) or not name.strip():
        raise ConfigValidationError(f"{source}: experiment is required and must be non-empty")
    entry = CATALOG.get(name)
    if entry is None:
        hint = suggest(name)
        extra = f"; did you mean '{hint}'?" if hint else ""
        raise ConfigValidationError(
            f"{source}: unknown experiment '{name}'{extra} (see 'qact list')"
        )

    seed = payload.get("seed")
    if seed is not None and (not _is_int(seed) or seed < 0):
        raise ConfigValidationError(f"{source}: seed must be an int >= 0")

    output_dir = payload.get("output_dir")
    if output_dir is not None and (not isinstance(output_dir, str) or not output_dir.strip()):
        raise ConfigValidationError(f"{source}: output_dir must be a non-empty string")

    raw_params = payload.get("params", {})
    if not isinstance(raw_params, dict):
        raise ConfigValidationError(f"{source}: params must be an object")
    try:
        params = _validate_params(entry, raw_params, base_dir)
        _check_budget(entry, params)
    except ConfigValidationError as exc:
        raise ConfigValidationError(f"{source}: {exc}") from exc

    return ExperimentConfig(name, params, seed, output_dir, source)


def require_seed(config: ExperimentConfig) -> None:
    if CATALOG[config.experiment].randomized and config.seed is None:
        raise ConfigValidationError(
            f"{config.source}: seed is required for randomized experiment {config.experiment}"
        )


def _read_payload(path: Path) -> dict[str, Any]:
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ConfigValidationError(f"config file not found: {path}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        message = f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}"
        raise ConfigValidationError(message) from exc
    if not isinstance(payload, dict):
        kind = type(payload).__name__
        raise ConfigValidationError(f"{path}: expected a JSON object, got {kind}")
    return payload


def load_config(path: Path) -> ExperimentConfig:
    """Read and validate one experiment config; relative source paths resolve next to it."""
    return validate_config(_read_payload(path), source=str(path), base_dir=path.parent)


def _templates() -> Any:
    return resources.files("qaction.experiments.templates")


def list_templates() -> list[str]:
    return sorted(
        entry.name.removesuffix(".json")
        for entry in _templates().iterdir()
        if entry.is_file() and entry.name.endswith(".json")
    )


def template_text(name: str) -> str:
    template_name = name.strip()
    if not template_name:
        raise ConfigValidationError("template name must be non-empty")
    candidate = _templates().joinpath(f"{template_name}.json")
    if not candidate.is_file():
        hint = suggest(template_name)
        extra = f"; did you mean '{hint}'?" if hint else ""
        raise ConfigValidationError(f"unknown template '{template_name}'{extra}")
    return candidate.read_text(encoding="utf-8")


def load_template(name: str) -> ExperimentConfig:
    payload = json.loads(template_text(name))
    if not isinstance(payload, dict):
        raise ConfigValidationError(f"template {name}: top-level JSON must be an object")
    return validate_config(payload, source=f"template {name}")
