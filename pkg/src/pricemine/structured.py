"""Structured-feature encoding: numeric passthrough plus one-hot locations."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInputError
from .records import ClassifiedRecord

NUMERIC_COLUMNS = ("beds", "baths", "size")

_NON_ALNUM = re.compile(r"[^0-9a-z_]+")


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """Dense numeric matrix with named columns, rows aligned to records."""

    column_names: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"expected a 2-D matrix, got shape {values.shape}")
        if values.shape[1] != len(self.column_names):
            raise ValueError(
                f"{len(self.column_names)} column names for {values.shape[1]} columns"
            )
        if values.size and not np.all(np.isfinite(values)):
            raise ValueError("feature matrix contains NaN or infinite entries")
        object.__setattr__(self, "column_names", tuple(self.column_names))
        object.__setattr__(self, "values", values)

    @property
    def n_rows(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_columns(self) -> int:
        return int(self.values.shape[1])

    def select(self, names: list[str] | tuple[str, ...]) -> "FeatureMatrix":
        """New matrix keeping only the named columns, in the given order."""
        index = {name: i for i, name in enumerate(self.column_names)}
        cols = [index[name] for name in names]
        picked = self.values[:, cols] if cols else np.zeros((self.n_rows, 0))
        return FeatureMatrix(tuple(names), picked)


def location_column_name(label: str) -> str:
    """Normalise a location label into a ``loc_`` column name.

    Lower-case, spaces become underscores, every other non-alphanumeric
    character is dropped.
    """
    return "loc_" + _NON_ALNUM.sub("", label.lower().replace(" ", "_"))


@dataclass(frozen=True)
class LocationEncoder:
    """One binary column per distinct location seen at fit time."""

    locations: tuple[str, ...]
    column_names: tuple[str, ...] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "locations", tuple(self.locations))
        names: list[str] = []
        used: set[str] = set()
        for label in self.locations:
            name = location_column_name(label)
            # Distinct labels can normalise to the same name; suffix to keep
            # the weight-by-name mapping unambiguous.
            candidate, counter = name, 2
            while candidate in used:
                candidate = f"{name}_{counter}"
                counter += 1
            used.add(candidate)
            names.append(candidate)
        object.__setattr__(self, "column_names", tuple(names))


def fit_location_encoder(records: list[ClassifiedRecord]) -> LocationEncoder:
    """Collect distinct location labels in first-appearance order."""
    if not records:
        raise EmptyInputError("cannot fit a location encoder on zero records")
    seen: dict[str, None] = {}
    for record in records:
        seen.setdefault(record.location, None)
    return LocationEncoder(tuple(seen))


def encode_structured(
    records: list[ClassifiedRecord], encoder: LocationEncoder
) -> FeatureMatrix:
    """Encode records as [beds, baths, size] plus the one-hot location block.

    A location unseen at fit time leaves its whole block at zero.
    """
    columns = NUMERIC_COLUMNS + encoder.column_names
    values = np.zeros((len(records), len(columns)), dtype=np.float64)
    slot = {label: i for i, label in enumerate(encoder.locations)}
    for row, record in enumerate(records):
        values[row, 0] = record.beds
        values[row, 1] = record.baths
        values[row, 2] = record.size
        loc = slot.get(record.location)
        if loc is not None:
            values[row, 3 + loc] = 1.0
    return FeatureMatrix(columns, values)
