"""Per-alternative scorers used to order the search frontier.

A linear model maps a feature vector to ``logistic(bias + w . f)``.  Weight
files are plain text: first line the bias, then one weight per feature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence


def logistic(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


@dataclass(frozen=True)
class LinearModel:
    bias: float
    weights: tuple[float, ...]

    def __call__(self, features: Sequence[float]) -> float:
        if len(features) != len(self.weights):
            raise ValueError(f"model expects {len(self.weights)} features, got {len(features)}")
        return logistic(self.bias + sum(w * f for w, f in zip(self.weights, features)))

    def dumps(self) -> str:
        return "\n".join(repr(float(x)) for x in (self.bias, *self.weights)) + "\n"


def parse_linear_model(text: str) -> LinearModel:
    values = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ValueError(f"line {lineno}: not a number: {line!r}") from None
    if not values:
        raise ValueError("empty model file")
    return LinearModel(values[0], tuple(values[1:]))


def load_linear_model(path: str | Path) -> LinearModel:
    return parse_linear_model(Path(path).read_text())


def bundled_model(rule: str) -> LinearModel:
    """The shipped default weights for ``rule`` ('stv' or 'rp')."""
    text = resources.files("putwin.data").joinpath(f"{rule.lower()}_linear.txt").read_text()
    return parse_linear_model(text)
