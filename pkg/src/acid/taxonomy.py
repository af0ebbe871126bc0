"""The eight defect categories and their subcategories.

Category order is fixed (alphabetical) and used everywhere ordering matters:
report rows, serialized label lists, evidence keys.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Category(enum.Enum):
    CONDITIONAL = "Conditional"
    CONFIGURATION_DATA = "Configuration Data"
    DEPENDENCY = "Dependency"
    DOCUMENTATION = "Documentation"
    IDEMPOTENCY = "Idempotency"
    SECURITY = "Security"
    SERVICE = "Service"
    SYNTAX = "Syntax"


class Subcategory(enum.Enum):
    # Configuration Data
    CACHE = "Cache"
    CREDENTIAL = "Credential"
    FILE_SYSTEM = "FileSystem"
    NETWORK = "Network"
    STORAGE = "Storage"
    # Service
    RESOURCE = "Resource"
    PANIC = "Panic"


CATEGORY_ORDER: tuple[Category, ...] = tuple(Category)

SUBCATEGORIES: dict[Category, tuple[Subcategory, ...]] = {
    Category.CONFIGURATION_DATA: (
        Subcategory.CACHE,
        Subcategory.CREDENTIAL,
        Subcategory.FILE_SYSTEM,
        Subcategory.NETWORK,
        Subcategory.STORAGE,
    ),
    Category.SERVICE: (Subcategory.RESOURCE, Subcategory.PANIC),
}

_CATEGORY_BY_NAME = {c.value: c for c in Category}
_SUBCATEGORY_BY_NAME = {s.value: s for s in Subcategory}


@dataclass(frozen=True)
class DefectLabel:
    """One classification label: a category, optionally refined by a subcategory.

    Only Configuration Data and Service carry subcategories.
    """

    category: Category
    subcategory: Subcategory | None = None

    def __post_init__(self):
        if self.subcategory is not None:
            allowed = SUBCATEGORIES.get(self.category, ())
            if self.subcategory not in allowed:
                raise ValueError(f"{self.subcategory.value} is not a subcategory of {self.category.value}")

    def __str__(self) -> str:
        if self.subcategory is None:
            return self.category.value
        return f"{self.category.value}/{self.subcategory.value}"

    # Enums are not orderable; this is the sort key for deterministic output.
    def sort_key(self) -> tuple[int, int]:
        sub = -1
        if self.subcategory is not None:
            sub = list(Subcategory).index(self.subcategory)
        return (CATEGORY_ORDER.index(self.category), sub)


def parse_label(text: str) -> DefectLabel:
    """Parse "Category" or "Category/Subcategory" display form."""
    name, _, sub = text.partition("/")
    name = name.strip()
    if name not in _CATEGORY_BY_NAME:
        raise ValueError(f"unknown defect category: {name!r}")
    category = _CATEGORY_BY_NAME[name]
    if not sub:
        return DefectLabel(category)
    sub = sub.strip()
    if sub not in _SUBCATEGORY_BY_NAME:
        raise ValueError(f"unknown subcategory: {sub!r}")
    return DefectLabel(category, _SUBCATEGORY_BY_NAME[sub])


def sorted_labels(labels) -> list[DefectLabel]:
    return sorted(labels, key=DefectLabel.sort_key)
