"""Restaurant-recommendation task: knowledge base, constraint filter, details.

The knowledge base is a delimited-text table (header row mandatory) whose
closed-domain columns are validated against the task ontology at load time.
Filtering is pure and matches the constraint semantics of the state tracker:
closed slots by candidate-set membership, open slots by case-insensitive
literal include/exclude.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .ontology import Ontology
from .state import DialogState, candidates

_RATING_RANK = {"low": 1, "average": 2, "high": 3}


class FormatError(ValueError):
    def __init__(self, row: int, column: str, message: str):
        super().__init__(f"row {row}, column {column!r}: {message}")
        self.row = row
        self.column = column


class DomainError(ValueError):
    def __init__(self, row: int, slot: str, value: str):
        super().__init__(f"row {row}: {value!r} is not a legal {slot!r}")
        self.row = row
        self.slot = slot
        self.value = value


class NotQueryableError(ValueError):
    pass


class MissingAttributeError(KeyError):
    pass


@dataclass(frozen=True)
class Restaurant:
    name: str
    establishment: str
    food_type: str
    price_range: str
    customer_rating: str
    address: str | None = None
    phone: str | None = None
    area: str | None = None

    def attribute(self, slot: str) -> str | None:
        return {
            "name": self.name,
            "establishment": self.establishment,
            "food type": self.food_type,
            "price range": self.price_range,
            "customer rating": self.customer_rating,
            "address": self.address,
            "phone": self.phone,
            "area": self.area,
        }[slot]


_COLUMNS = ["name", "establishment", "food type", "price range", "customer rating",
            "address", "phone", "area"]
_MANDATORY = ["name", "establishment", "food type", "price range", "customer rating"]


def load_kb(path: str | Path, onto: Ontology) -> "KnowledgeBase":
    """Load and validate the restaurant table.  Row count is preserved."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in _COLUMNS:
            if column not in header:
                raise FormatError(0, column, "missing column")
        rows = []
        seen_names = set()
        for index, raw in enumerate(reader, start=1):
            for column in _MANDATORY:
                if not (raw.get(column) or "").strip():
                    raise FormatError(index, column, "empty value")
            record = {c: (raw.get(c) or "").strip() or None for c in _COLUMNS}
            for slot in ("establishment", "price range", "customer rating"):
                domain = onto.slot(slot).domain
                if record[slot] not in domain:
                    raise DomainError(index, slot, record[slot])
            if record["name"] in seen_names:
                raise FormatError(index, "name", f"duplicate restaurant {record['name']!r}")
            seen_names.add(record["name"])
            rows.append(
                Restaurant(
                    name=record["name"],
                    establishment=record["establishment"],
                    food_type=record["food type"],
                    price_range=record["price range"],
                    customer_rating=record["customer rating"],
                    address=record["address"],
                    phone=record["phone"],
                    area=record["area"],
                )
            )
    return KnowledgeBase(tuple(rows), onto)


def answer_detail(restaurant: Restaurant, slot: str, onto: Ontology) -> str:
    """The stored attribute value for a queryable slot."""
    schema = onto.slot(slot)
    if schema is None or not schema.queryable:
        raise NotQueryableError(slot)
    value = restaurant.attribute(slot)
    if value is None:
        raise MissingAttributeError(f"{restaurant.name} has no {slot}")
    return value


def _sort_key(restaurant: Restaurant):
    return (-_RATING_RANK[restaurant.customer_rating], restaurant.name)


@dataclass(frozen=True)
class KnowledgeBase:
    restaurants: tuple[Restaurant, ...]
    onto: Ontology

    def __len__(self) -> int:
        return len(self.restaurants)

    def get(self, name: str) -> Restaurant:
        for restaurant in self.restaurants:
            if restaurant.name == name:
                return restaurant
        raise MissingAttributeError(name)

    def filter(self, state: DialogState) -> list[Restaurant]:
        """Restaurants satisfying every slot constraint, best-first.

        Ties break by (customer-rating rank descending, name ascending) so
        results are deterministic.
        """
        out = []
        for restaurant in self.restaurants:
            if self._matches(restaurant, state):
                out.append(restaurant)
        return sorted(out, key=_sort_key)

    def _matches(self, restaurant: Restaurant, state: DialogState) -> bool:
        for schema in self.onto.slots:
            con = state.constraint(schema.name)
            if con.included is None and not con.excluded:
                continue
            value = restaurant.attribute(schema.name)
            if schema.is_open:
                if value is None or not candidates(state, schema.name, self.onto).matches(value):
                    return False
            else:
                if value not in candidates(state, schema.name, self.onto):
                    return False
        return True

    # TaskKnowledge interface used by the decision unit

    def top_match(self, state: DialogState) -> str | None:
        matches = self.filter(state)
        return matches[0].name if matches else None

    def fact_sheet(self, entity: str) -> Mapping[str, str]:
        restaurant = self.get(entity)
        return {slot: restaurant.attribute(slot) for slot in self.onto.required_slots()}

    def detail(self, entity: str, slot: str) -> str | None:
        try:
            return answer_detail(self.get(entity), slot, self.onto)
        except MissingAttributeError:
            return None
