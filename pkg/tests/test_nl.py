import json
from importlib import resources

import jsonschema
import pytest

from symdial.nl import (
    EmptyBackend,
    GoldEchoBackend,
    MockBackend,
    RealizeRequest,
    UnderstandRequest,
    UnparseableOutputError,
    evaluate_parsing,
    ontology_summary,
    realize,
    understand,
)
from symdial.nl.evaluate import DatasetMissingError, builtin_sample_path, gold_predicates
from symdial.policy import AnswerQuery, AskSlot, Farewell, Recommend, action_predicates
from symdial.terms import Predicate, parse_predicates


@pytest.fixture(scope="module")
def mock():
    return MockBackend.builtin("concierge")


def u(text, **kwargs):
    return UnderstandRequest(utterance=text, **kwargs)


def test_mock_understand_price_turn(mock, concierge_onto):
    preds = understand(mock, u("Less than fifteen dollars."), concierge_onto)
    assert preds == parse_predicates("require('price range',['cheap'])")


def test_mock_understand_empty_and_unknown(mock, concierge_onto):
    assert understand(mock, u(""), concierge_onto) == []
    assert understand(mock, u("tell me a joke"), concierge_onto) == []


def test_mock_understand_exclusion_turn(mock, concierge_onto):
    preds = understand(mock, u("I can try any food except curry."), concierge_onto)
    assert preds == parse_predicates("not_require('food type',['Indian','Thai'])")


def test_mock_is_deterministic_and_whitespace_insensitive(mock):
    a = mock.understand_text(u("  less   than fifteen DOLLARS. "))
    b = mock.understand_text(u("Less than fifteen dollars."))
    assert a == b != ""


def test_understand_repair_retry(concierge_onto):
    class FlakyBackend:
        def __init__(self):
            self.calls = []

        def understand_text(self, req):
            self.calls.append(req.repair)
            return "require('price range',['cheap'" if len(self.calls) == 1 else "require('price range',['cheap'])"

        def realize_text(self, req):
            return "x"

    flaky = FlakyBackend()
    preds = understand(flaky, u("cheap"), concierge_onto)
    assert preds == parse_predicates("require('price range',['cheap'])")
    assert flaky.calls[0] is None and flaky.calls[1] is not None  # retry carried the report


def test_understand_fails_after_one_retry(concierge_onto):
    class BrokenBackend:
        def understand_text(self, req):
            return "require('price range',['platinum'])"

        def realize_text(self, req):
            return "x"

    with pytest.raises(UnparseableOutputError) as err:
        understand(BrokenBackend(), u("cheap"), concierge_onto)
    assert "platinum" in err.value.problem


def test_realize_recommend_contains_all_facts(mock):
    action = Recommend(
        "Southern Recipes Grill",
        {"food type": "American", "price range": "cheap", "customer rating": "average"},
    )
    text = realize(mock, RealizeRequest(tuple(action_predicates(action)), persona="concierge"))
    for needle in ("Southern Recipes Grill", "American", "cheap", "average", "budget-friendly"):
        assert needle in text


def test_realize_ask_and_farewell_templates(mock):
    ask = realize(mock, RealizeRequest(tuple(action_predicates(AskSlot("price range")))))
    assert "price" in ask
    farewell = realize(mock, RealizeRequest(tuple(action_predicates(Farewell()))))
    assert farewell == "Happy to help. Enjoy your meal!"


def test_realize_answer_contains_value_verbatim(mock):
    action = AnswerQuery("Southern Recipes Grill", "address", "621 W Plano Pkwy #229, Plano, TX 75075")
    text = realize(mock, RealizeRequest(tuple(action_predicates(action))))
    assert "621 W Plano Pkwy #229, Plano, TX 75075" in text


def test_companion_templates_mention_entity_and_aspect():
    mock = MockBackend.builtin("companion")
    preds = parse_predicates("talk(movie,Inception,plot episode). attitude(positive).")
    text = realize(mock, RealizeRequest(tuple(preds), persona="companion.opening"))
    assert "Inception" in text and "plot episode" in text
    reply = realize(mock, RealizeRequest(tuple(preds), persona="companion", context={"snippet": "Nested dreams."}))
    assert "Nested dreams." in reply


def test_ontology_summary_names_scope(concierge_onto):
    summary = ontology_summary(concierge_onto)
    assert "require/2" in summary
    assert "'price range': {cheap, moderate, expensive}" in summary


def test_gold_predicates_canonicalize_slots():
    preds = gold_predicates("name[The Cedar], eatType[pub], priceRange[cheap]")
    assert preds == [
        Predicate("require", ["name", ["The Cedar"]]),
        Predicate("require", ["establishment", ["pub"]]),
        Predicate("require", ["price range", ["cheap"]]),
    ]


def test_gold_echo_scores_perfect():
    path = builtin_sample_path()
    report = evaluate_parsing(path, GoldEchoBackend.for_dataset(path))
    assert report.evaluated == 20
    assert report.accuracy == 1.0
    assert not report.failures


def test_empty_backend_scores_zero():
    report = evaluate_parsing(builtin_sample_path(), EmptyBackend())
    assert report.accuracy == 0.0
    assert report.correct == 0
    assert all(cell.missing > 0 or cell.spurious > 0 for cell in report.per_slot.values())


def test_shots_are_excluded_from_scoring():
    path = builtin_sample_path()
    report = evaluate_parsing(path, GoldEchoBackend.for_dataset(path), shots=5)
    assert report.evaluated == 15
    assert report.shots == 5


def test_report_schema_validates():
    schema = json.loads(
        resources.files("symdial").joinpath("schemas/eval_report.schema.json").read_text()
    )
    for backend in (GoldEchoBackend.for_dataset(builtin_sample_path()), EmptyBackend()):
        report = evaluate_parsing(builtin_sample_path(), backend, shots=2)
        jsonschema.validate(report.to_dict(), schema)
        json.loads(report.to_json())


def test_missing_dataset_raises(tmp_path):
    with pytest.raises(DatasetMissingError):
        evaluate_parsing(tmp_path / "nope.csv", EmptyBackend())
