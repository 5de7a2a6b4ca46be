"""Synthetic classifieds with a known ground truth.

The generator plants an exactly linear structured price (integer
coefficients, so rounding never breaks linearity), adds a configurable set
of keyword effects to the description text, and optionally Gaussian noise.
Every description contains a fixed number of distinct pool words, which
keeps the TF normalisation comparable across documents and makes the
planted effects recoverable by the stage-2 regression.

Titles carry a unique numeric token so no two records collide under
deduplication and all title tokens fall outside the default
document-frequency bounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .records import ClassifiedRecord, ListingCategory, OfferKind, UnitKind

POSITIVE_KEYWORDS = (
    "stunning", "upgraded", "panoramic", "marble", "penthouse",
    "renovated", "skyline", "beachfront", "furnished", "premium",
)
NEGATIVE_KEYWORDS = (
    "cramped", "dated", "roadside", "basement", "shared",
    "noisy", "distress", "urgent", "bargain", "rundown",
)
FILLER_WORDS = (
    "living", "dining", "kitchen", "bathroom", "balcony",
    "garden", "parking", "garage", "storage", "laundry",
    "modern", "bright", "sunny", "quiet", "clean",
    "fresh", "large", "cozy", "open", "airy",
    "floor", "ceiling", "window", "corner", "tower",
    "building", "community", "family", "friendly", "central",
    "close", "nearby", "walking", "distance", "school",
    "market", "metro", "station", "highway", "access",
    "maintained", "equipped", "included", "utilities", "security",
    "reception", "elevator", "terrace", "closet", "wardrobe",
    "painted", "tiled", "carpet", "curtains", "lighting",
    "heating", "cooling", "internet", "contract", "immediately",
)
LOCATIONS = (
    "marina north", "harbor gate", "old town east", "sunrise hills",
    "green valley", "bay front", "city walk south", "desert gate",
)
_LOCATION_OFFSETS = (-9000, -6000, -3000, 0, 2500, 5000, 8500, 12000)


@dataclass(frozen=True)
class SynthCorpus:
    """Generated records plus the ground truth behind them."""

    records: list[ClassifiedRecord]
    keyword_effects: dict[str, float]
    fillers: tuple[str, ...]
    category: ListingCategory
    seed: int
    noise_sigma: float


def _price_coefficients(category: ListingCategory) -> tuple[int, int, int, int, tuple[int, ...]]:
    """(base, per-bed, per-bath, per-sqft, location offsets), all integers."""
    if category.offer_kind is OfferKind.RENT:
        base, beds, baths, size = 55_000, 11_000, 1_500, 14
        offsets = _LOCATION_OFFSETS
    else:
        base, beds, baths, size = 440_000, 88_000, 12_000, 112
        offsets = tuple(v * 8 for v in _LOCATION_OFFSETS)
    if category.unit_kind is UnitKind.HOUSE:
        base += 2 * beds
    return base, beds, baths, size, offsets


def generate_corpus(
    count: int = 2000,
    category: ListingCategory | None = None,
    seed: int = 0,
    noise_sigma: float = 5000.0,
    keyword_count: int = 20,
    effect_min: float = 5000.0,
    effect_max: float = 20000.0,
    doc_terms: int = 8,
    keyword_probs: tuple[float, float, float] = (0.35, 0.40, 0.25),
) -> SynthCorpus:
    """Generate ``count`` records with planted keyword effects.

    ``keyword_count`` keywords (half positive, half negative, magnitudes
    spread over [effect_min, effect_max] and rounded to whole AED) shift the
    price whenever they appear; ``keyword_count=0`` produces the null corpus
    whose text is independent of price.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if not 0 <= keyword_count <= len(POSITIVE_KEYWORDS) + len(NEGATIVE_KEYWORDS):
        raise ValueError(f"keyword_count must be in [0, 20], got {keyword_count}")
    if doc_terms < 3 or doc_terms > len(FILLER_WORDS):
        raise ValueError("doc_terms out of range")
    category = category or ListingCategory.parse("apartment_rent")
    rng = np.random.default_rng(seed)

    n_positive = (keyword_count + 1) // 2
    n_negative = keyword_count // 2
    effects: dict[str, float] = {}
    if n_positive:
        for word, value in zip(
            POSITIVE_KEYWORDS[:n_positive],
            np.round(np.linspace(effect_min, effect_max, n_positive)),
        ):
            effects[word] = float(value)
    if n_negative:
        for word, value in zip(
            NEGATIVE_KEYWORDS[:n_negative],
            np.round(np.linspace(effect_min, effect_max, n_negative)),
        ):
            effects[word] = -float(value)
    keywords = tuple(effects)

    base, c_beds, c_baths, c_size, offsets = _price_coefficients(category)
    size_base = 900 if category.unit_kind is UnitKind.HOUSE else 420
    records: list[ClassifiedRecord] = []
    for i in range(count):
        beds = int(rng.integers(0, 4))
        baths = int(min(max(beds + rng.integers(-1, 2), 0), 4))
        size = size_base + 300 * beds + int(rng.integers(-60, 61))
        location_index = int(rng.integers(0, len(LOCATIONS)))

        n_planted = int(rng.choice(3, p=keyword_probs)) if keywords else 0
        planted = [keywords[j] for j in rng.choice(len(keywords), n_planted, replace=False)] if n_planted else []
        fillers = [
            FILLER_WORDS[j]
            for j in rng.choice(len(FILLER_WORDS), doc_terms - n_planted, replace=False)
        ]
        words = planted + fillers
        rng.shuffle(words)

        price = (
            base
            + c_beds * beds
            + c_baths * baths
            + c_size * size
            + offsets[location_index]
            + sum(effects[word] for word in planted)
        )
        if noise_sigma > 0:
            price += rng.normal(0.0, noise_sigma)
        records.append(
            ClassifiedRecord(
                title=f"unit {i:05d}",
                description=" ".join(words),
                beds=beds,
                baths=baths,
                size=size,
                location=LOCATIONS[location_index],
                price=max(1, int(round(price))),
            )
        )
    return SynthCorpus(
        records=records,
        keyword_effects=effects,
        fillers=FILLER_WORDS,
        category=category,
        seed=seed,
        noise_sigma=noise_sigma,
    )
