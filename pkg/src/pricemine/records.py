"""Core record types and the cleaning pipeline for classified listings.

Cleaning runs in three steps: exact-duplicate removal, price-per-bedroom
outlier filtering with category-specific bounds, and lower-casing of the
two text fields. All functions here are pure and never mutate their inputs.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum


class UnitKind(str, Enum):
    APARTMENT = "apartment"
    HOUSE = "house"


class OfferKind(str, Enum):
    RENT = "rent"
    SALE = "sale"


@dataclass(frozen=True, slots=True)
class ListingCategory:
    """One of the four dataset flavours: {apartment, house} x {rent, sale}."""

    unit_kind: UnitKind
    offer_kind: OfferKind

    @classmethod
    def parse(cls, label: str) -> "ListingCategory":
        """Parse labels like ``apartment_rent`` or ``house-sale``."""
        parts = label.strip().lower().replace("-", "_").split("_")
        if len(parts) != 2:
            raise ValueError(f"invalid category label: {label!r}")
        try:
            return cls(UnitKind(parts[0]), OfferKind(parts[1]))
        except ValueError:
            raise ValueError(f"invalid category label: {label!r}") from None

    @property
    def label(self) -> str:
        return f"{self.unit_kind.value}_{self.offer_kind.value}"


@dataclass(frozen=True, slots=True)
class ClassifiedRecord:
    """A single listing with structured fields and free text.

    ``price`` is the annual rent or the sale price in AED. ``size`` is the
    built area in square feet. ``beds`` may be zero (studio).
    """

    title: str
    description: str
    beds: int
    baths: int
    size: int
    location: str
    price: int

    def __post_init__(self) -> None:
        if self.beds < 0:
            raise ValueError(f"beds must be >= 0, got {self.beds}")
        if self.baths < 0:
            raise ValueError(f"baths must be >= 0, got {self.baths}")
        if self.size <= 0:
            raise ValueError(f"size must be > 0, got {self.size}")
        if self.price <= 0:
            raise ValueError(f"price must be > 0, got {self.price}")


@dataclass(frozen=True, slots=True)
class CleaningConfig:
    """Inclusive per-bedroom price bounds used by the outlier filter."""

    rent_avg_min: float = 10_000.0
    rent_avg_max: float = 100_000.0
    sale_avg_min: float = 100_000.0
    sale_avg_max: float = 1_000_000.0

    def __post_init__(self) -> None:
        for lo, hi, name in (
            (self.rent_avg_min, self.rent_avg_max, "rent"),
            (self.sale_avg_min, self.sale_avg_max, "sale"),
        ):
            if lo <= 0 or hi <= 0:
                raise ValueError(f"{name} bounds must be positive")
            if lo >= hi:
                raise ValueError(f"{name} bounds must satisfy min < max")

    def bounds_for(self, category: ListingCategory) -> tuple[float, float]:
        if category.offer_kind is OfferKind.RENT:
            return (self.rent_avg_min, self.rent_avg_max)
        return (self.sale_avg_min, self.sale_avg_max)


@dataclass(frozen=True, slots=True)
class CleaningCounts:
    """Record counts after each cleaning step."""

    input: int
    after_dedup: int
    after_threshold: int


def deduplicate(records: list[ClassifiedRecord]) -> list[ClassifiedRecord]:
    """Drop records whose title and description both match an earlier record.

    Equality is exact string comparison after trimming surrounding
    whitespace; the first occurrence wins and input order is preserved.
    """
    seen: set[tuple[str, str]] = set()
    kept: list[ClassifiedRecord] = []
    for record in records:
        key = (record.title.strip(), record.description.strip())
        if key not in seen:
            seen.add(key)
            kept.append(record)
    return kept


def average_price_per_bedroom(record: ClassifiedRecord) -> float:
    """Price divided by beds + 1; the +1 keeps studios (beds = 0) finite."""
    return record.price / (record.beds + 1)


def within_price_bounds(
    record: ClassifiedRecord,
    category: ListingCategory,
    config: CleaningConfig,
) -> bool:
    """True when the per-bedroom average sits inside the inclusive bounds."""
    lo, hi = config.bounds_for(category)
    return lo <= average_price_per_bedroom(record) <= hi


def _lowercase(record: ClassifiedRecord) -> ClassifiedRecord:
    title = record.title.lower()
    description = record.description.lower()
    if title == record.title and description == record.description:
        return record
    return dataclasses.replace(record, title=title, description=description)


def clean_with_counts(
    records: list[ClassifiedRecord],
    category: ListingCategory,
    config: CleaningConfig | None = None,
) -> tuple[list[ClassifiedRecord], CleaningCounts]:
    """Run the full cleaning pipeline and report per-step counts.

    Steps, in order: deduplicate, drop price outliers, lower-case the text
    fields. Survivors keep their input order.
    """
    config = config or CleaningConfig()
    deduped = deduplicate(records)
    bounded = [r for r in deduped if within_price_bounds(r, category, config)]
    cleaned = [_lowercase(r) for r in bounded]
    return cleaned, CleaningCounts(len(records), len(deduped), len(bounded))


def clean(
    records: list[ClassifiedRecord],
    category: ListingCategory,
    config: CleaningConfig | None = None,
) -> list[ClassifiedRecord]:
    """Cleaning pipeline without the count report; see clean_with_counts."""
    cleaned, _ = clean_with_counts(records, category, config)
    return cleaned
