import json
import random
import string
from pathlib import Path

import pytest

from xlfact.codec import parse_linearized, serialize_facts
from xlfact.errors import ValidationError
from xlfact.records import Fact, FactSet

MALFORMED_CASES = json.loads(
    (Path(__file__).parent / "data" / "malformed_linearized.json").read_text()
)


def factset(*pairs):
    return FactSet(head="H", facts=tuple(Fact(r, t) for r, t in pairs))


def random_factset(rng):
    # spaces allowed inside payloads; markers never generated
    alphabet = string.ascii_letters + string.digits + " '-"

    def payload():
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 12)))
        return text.strip() or "x"

    return factset(*[(payload(), payload()) for _ in range(rng.randint(0, 6))])


class TestSerialize:
    def test_two_facts(self):
        fs = factset(("occupation", "writer"), ("birth place", "Delhi"))
        assert serialize_facts(fs) == "<R> occupation <T> writer <R> birth place <T> Delhi"

    def test_empty(self):
        assert serialize_facts(FactSet(head="H")) == ""

    def test_marker_payload_rejected(self):
        # bypass Fact validation to simulate a hand-rolled instance
        bad = Fact("ok", "ok")
        object.__setattr__(bad, "tail", "sneaky <T> marker")
        with pytest.raises(ValidationError):
            serialize_facts(FactSet(head="H", facts=(bad,)))

    def test_marker_counts(self):
        rng = random.Random(7)
        for _ in range(25):
            fs = random_factset(rng)
            text = serialize_facts(fs)
            assert text.count("<R>") == len(fs.facts)
            assert text.count("<T>") == len(fs.facts)


class TestParse:
    def test_minimal_well_formed(self):
        report = parse_linearized("<R> occupation <T> writer")
        assert [(f.relation, f.tail) for f in report.facts] == [("occupation", "writer")]
        assert report.dropped_fragments == 0

    def test_missing_tail_marker(self):
        report = parse_linearized("<R> occupation writer")
        assert report.facts == []
        assert report.dropped_fragments == 1

    def test_garbage_and_empty_relation(self):
        report = parse_linearized("garbage <R> a <T> b <R> <T> c")
        assert [(f.relation, f.tail) for f in report.facts] == [("a", "b")]
        assert report.dropped_fragments == 1
        assert any("empty relation" in w for w in report.warnings)
        assert any("ignored text" in w for w in report.warnings)

    @pytest.mark.parametrize("case", MALFORMED_CASES, ids=lambda c: repr(c["text"])[:40])
    def test_hand_traced_cases(self, case):
        report = parse_linearized(case["text"])
        assert [[f.relation, f.tail] for f in report.facts] == case["facts"]
        assert report.dropped_fragments == case["dropped"]

    def test_facts_bounded_by_marker_count(self):
        rng = random.Random(11)
        for _ in range(50):
            noise = "".join(rng.choice("<RT> abc") for _ in range(rng.randint(0, 40)))
            report = parse_linearized(noise)  # must never raise
            assert len(report.facts) <= noise.count("<R>")


def test_round_trip_random():
    rng = random.Random(3)
    for _ in range(50):
        fs = random_factset(rng)
        report = parse_linearized(serialize_facts(fs))
        assert report.dropped_fragments == 0
        assert tuple(report.facts) == fs.facts
