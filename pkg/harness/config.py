"""
JSON configuration documents.

Keys mirror the dataclass field names; nested objects map onto nested
dataclasses and unknown keys are rejected. Example experiment config:

    {
      "dataset": {"kind": "synthetic", "n_rows": 500, "n_features": 8, "n_informative": 8},
      "missingness": {"kind": "mcar", "rate": 0.2},
      "impute": {"method": "missforest", "sampler": "detdpp",
                 "forest": {"n_trees": 10, "batch_size": 150}},
      "repeats": 10,
      "seed": 1,
      "fixed_missingness": true
    }

A benchmark config wraps an experiment config with the sweep:

    {"experiment": {...}, "missingness": [{...}, ...], "methods": [["missforest", "dpp"], ...]}
"""

import dataclasses
import json
import typing
from pathlib import Path
from typing import Any, List, Tuple, Type, TypeVar, Union

from common.errors import InvalidInputError
from harness.experiment import ExperimentConfig, MissingnessSpec
from impute import ImputeConfig

T = TypeVar("T")


def _dataclass_type(annotation) -> Union[type, None]:
    if dataclasses.is_dataclass(annotation):
        return annotation
    for arg in typing.get_args(annotation):
        if dataclasses.is_dataclass(arg):
            return arg
    return None


def from_dict(cls: Type[T], data: dict, path: str = "") -> T:
    """Build the dataclass cls from a JSON object, recursing into nested dataclasses."""
    if not isinstance(data, dict):
        raise InvalidInputError(f"{path or cls.__name__} must be a JSON object")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise InvalidInputError(f"unknown keys in {path or cls.__name__}: {unknown}")

    kwargs = {}
    for name, value in data.items():
        nested = _dataclass_type(hints[name])
        if nested is not None and isinstance(value, dict):
            value = from_dict(nested, value, f"{path}.{name}" if path else name)
        kwargs[name] = value
    try:
        return cls(**kwargs)
    except TypeError as e:
        raise InvalidInputError(f"invalid {path or cls.__name__}: {e}") from e


def to_dict(obj: Any) -> dict:
    return dataclasses.asdict(obj)


def _read_json(path: Union[str, Path]) -> dict:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise InvalidInputError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"config file {path} is not valid JSON: {e}") from e


def load_impute_config(path: Union[str, Path]) -> ImputeConfig:
    return from_dict(ImputeConfig, _read_json(path))


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    return from_dict(ExperimentConfig, _read_json(path))


def parse_benchmark_config(data: dict) -> Tuple[ExperimentConfig, List[MissingnessSpec], List[Tuple[str, str]]]:
    unknown = sorted(set(data) - {"experiment", "missingness", "methods"})
    if unknown:
        raise InvalidInputError(f"unknown keys in benchmark config: {unknown}")
    base = from_dict(ExperimentConfig, data.get("experiment", {}), "experiment")
    missingness = [from_dict(MissingnessSpec, m, "missingness") for m in data.get("missingness", [])]
    methods = [tuple(pair) for pair in data.get("methods", [])]
    if not missingness or not methods:
        raise InvalidInputError("benchmark config needs non-empty missingness and methods lists")
    for pair in methods:
        if len(pair) != 2:
            raise InvalidInputError(f"methods entries must be [method, sampler] pairs, got {list(pair)}")
    return base, missingness, methods


def load_benchmark_config(path: Union[str, Path]):
    return parse_benchmark_config(_read_json(path))
