"""Deterministic stand-in for the language model.

Understanding is a scripted utterance-to-predicates table; realization is
template substitution over the action predicates.  Both are pure functions,
which is what makes whole conversations replayable in tests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

import jsonschema
import yaml

from ..terms import Predicate
from .backend import RealizeRequest, UnderstandRequest

_SCHEMA = json.loads(resources.files("symdial").joinpath("schemas/mock_script.schema.json").read_text())


class MockScriptError(ValueError):
    pass


def _normalize(utterance: str) -> str:
    return " ".join(utterance.split()).casefold()


def _fill(template: str, values: Mapping[str, str]) -> str:
    out = template
    for key, value in values.items():
        out = out.replace("{" + key + "}", value)
    return out


@dataclass(frozen=True)
class MockBackend:
    understand_table: Mapping[str, str]
    templates: Mapping[str, object]
    flavors: Mapping[str, Mapping[str, str]] = field(default_factory=dict)

    @classmethod
    def from_file(cls, path: str | Path) -> "MockBackend":
        raw = yaml.safe_load(Path(path).read_text())
        try:
            jsonschema.validate(raw, _SCHEMA)
        except jsonschema.ValidationError as err:
            raise MockScriptError(f"{path}: {err.message}") from err
        table = {_normalize(entry["match"]): entry["predicates"] for entry in raw["understand"]}
        return cls(
            understand_table=table,
            templates=raw["realize"],
            flavors=raw.get("flavors", {}),
        )

    @classmethod
    def builtin(cls, task: str) -> "MockBackend":
        path = resources.files("symdial").joinpath(f"data/mock_{task}.yaml")
        return cls.from_file(Path(str(path)))

    def understand_text(self, req: UnderstandRequest) -> str:
        return self.understand_table.get(_normalize(req.utterance), "")

    def realize_text(self, req: RealizeRequest) -> str:
        head = req.predicates[0] if req.predicates else Predicate("greet")
        handler = getattr(self, f"_realize_{head.functor}", None)
        if handler is None:
            raise MockScriptError(f"no realize template for {head.functor!r}")
        return handler(head, req)

    # one small renderer per action functor

    def _template(self, name: str) -> str:
        try:
            return self.templates[name]
        except KeyError:
            raise MockScriptError(f"mock script lacks the {name!r} template") from None

    def _realize_greet(self, head, req):
        return self._template("greet")

    def _realize_ask(self, head, req):
        slot = head.args[0]
        per_slot = self.templates.get("ask", {})
        template = per_slot.get(slot) or self._template("ask_default")
        return _fill(template, {"slot": slot})

    def _realize_recommend(self, head, req):
        values = {"name": head.args[0]}
        for pred in req.predicates[1:]:
            if pred.functor == "has":
                values[pred.args[0]] = pred.args[1]
        for flavor_name, mapping in self.flavors.items():
            source = values.get(flavor_name.removesuffix(" flavor"))
            if source is not None:
                values[flavor_name] = mapping.get(source, source)
        return _fill(self._template("recommend"), values)

    def _realize_answer(self, head, req):
        entity, slot = head.args[0], head.args[1]
        if len(head.args) == 3:
            return _fill(self._template("answer"), {"name": entity, "slot": slot, "value": head.args[2]})
        return _fill(self._template("answer_missing"), {"name": entity, "slot": slot})

    def _realize_no_match(self, head, req):
        hint = next((p.args[0] for p in req.predicates if p.functor == "relax"), None)
        if hint:
            return _fill(self._template("no_match_relax"), {"slot": hint})
        return self._template("no_match")

    def _realize_relax(self, head, req):
        return self._realize_no_match(head, req)

    def _realize_clarify(self, head, req):
        return _fill(self._template("clarify"), {"slot": head.args[0]})

    def _realize_farewell(self, head, req):
        return self._template("farewell")

    def _realize_quit(self, head, req):
        return self._template("farewell")

    def _realize_talk(self, head, req):
        category, entity, aspect = head.args
        attitude = next((p.args[0] for p in req.predicates if p.functor == "attitude"), "positive")
        values = {
            "category": category,
            "entity": entity,
            "aspect": aspect,
            "attitude": attitude,
            "snippet": req.context.get("snippet", ""),
        }
        if req.persona.endswith("opening"):
            return _fill(self._template("opening"), values).strip()
        name = "talk_negative" if attitude == "negative" else "talk_positive"
        return " ".join(_fill(self._template(name), values).split())
