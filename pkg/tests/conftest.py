from pathlib import Path

import pytest

from pricemine.records import ClassifiedRecord, ListingCategory

DATA_DIR = Path(__file__).parent / "data"


def make_record(**overrides) -> ClassifiedRecord:
    base = {
        "title": "2 br with maid room",
        "description": "full sea views, vacant and ready to move in",
        "beds": 2,
        "baths": 2,
        "size": 1400,
        "location": "Palm Jumeirah",
        "price": 120_000,
    }
    base.update(overrides)
    return ClassifiedRecord(**base)


@pytest.fixture
def rent_category() -> ListingCategory:
    return ListingCategory.parse("apartment_rent")


@pytest.fixture
def sale_category() -> ListingCategory:
    return ListingCategory.parse("apartment_sale")


@pytest.fixture
def cleaning_fixture_path() -> Path:
    return DATA_DIR / "cleaning_fixture.csv"
