import json

import pytest

from xlfact.errors import UnknownLanguageError, ValidationError
from xlfact.records import (
    Fact,
    FactSet,
    LanguageCode,
    compute_stats,
    load_corpus,
    parse_sample,
    serialize_sample,
    stats_to_json,
)

from conftest import make_record


def sample_line(**overrides):
    base = {
        "sample_id": "s1",
        "language": "hi",
        "sentence": "some sentence",
        "head": "X",
        "facts": [],
        "split": "train",
    }
    base.update(overrides)
    return json.dumps(base)


class TestParseSample:
    def test_empty_fact_list(self):
        record = parse_sample(sample_line())
        assert record.sample_id == "s1"
        assert record.language is LanguageCode.HI
        assert record.gold.facts == ()

    def test_unknown_language(self):
        with pytest.raises(UnknownLanguageError):
            parse_sample(sample_line(language="fr"))

    def test_malformed_json(self):
        with pytest.raises(ValidationError, match="malformed JSON"):
            parse_sample("{not json")

    def test_missing_key(self):
        line = json.dumps({"sample_id": "s1"})
        with pytest.raises(ValidationError, match="missing required keys"):
            parse_sample(line)

    def test_empty_sentence_and_head(self):
        with pytest.raises(ValidationError):
            parse_sample(sample_line(sentence="   "))
        with pytest.raises(ValidationError):
            parse_sample(sample_line(head=""))

    def test_fact_with_marker_rejected(self):
        line = sample_line(facts=[{"relation": "occ <R> upation", "tail": "writer"}])
        with pytest.raises(ValidationError, match="<R>"):
            parse_sample(line)
        line = sample_line(facts=[{"relation": "occupation", "tail": "wri<T>er"}])
        with pytest.raises(ValidationError, match="<T>"):
            parse_sample(line)

    def test_empty_fact_side_rejected(self):
        line = sample_line(facts=[{"relation": "", "tail": "writer"}])
        with pytest.raises(ValidationError):
            parse_sample(line)

    def test_wrong_split(self):
        with pytest.raises(ValidationError, match="split"):
            parse_sample(sample_line(split="dev"))

    def test_fact_order_preserved(self):
        line = sample_line(facts=[
            {"relation": "b", "tail": "2"},
            {"relation": "a", "tail": "1"},
            {"relation": "c", "tail": "3"},
        ])
        record = parse_sample(line)
        assert [f.relation for f in record.gold.facts] == ["b", "a", "c"]

    def test_round_trip_identity(self):
        record = make_record(
            sample_id="roundtrip",
            language="bn",
            sentence="কিছু বাক্য",
            head="কেউ",
            facts=[("occupation", "writer"), ("birth place", "Delhi")],
            split="test",
        )
        again = parse_sample(serialize_sample(record))
        assert again == record


class TestLoadCorpus:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        assert load_corpus(path) == []

    def test_bad_line_cites_line_number(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(sample_line() + "\n{oops\n", encoding="utf-8")
        with pytest.raises(ValidationError, match=r":2:"):
            load_corpus(path)

    def test_ten_line_fixture(self, tmp_path):
        path = tmp_path / "ten.jsonl"
        lines = [sample_line(sample_id=f"s{i}") for i in range(10)]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        records = load_corpus(path)
        assert [r.sample_id for r in records] == [f"s{i}" for i in range(10)]

    def test_missing_file_is_oserror(self, tmp_path):
        with pytest.raises(OSError):
            load_corpus(tmp_path / "nope.jsonl")


class TestStats:
    def test_average_facts(self):
        records = [
            make_record(sample_id=f"s{i}", facts=[("r1", "a"), ("r2", "b")])
            for i in range(3)
        ]
        stats = compute_stats(records)
        assert stats.avg_facts_per_sentence == 2.0

    def test_empty_input_rejected(self):
        with pytest.raises(ValidationError):
            compute_stats([])

    def test_top_relation_fraction(self):
        # 27 of 100 facts in one relation, as in the source corpus
        facts = [("dominant", f"t{i}") for i in range(27)]
        facts += [(f"r{i}", f"t{i}") for i in range(73)]
        records = [make_record(sample_id="only", facts=facts)]
        stats = compute_stats(records)
        assert stats.top_k_mass(1) == 0.27

    def test_top_k_mass_counts(self):
        # counts 5, 4, 3, 2, 1 -> top 2 cover 9 of 15
        facts = []
        for i, count in enumerate([5, 4, 3, 2, 1]):
            facts += [(f"r{i}", f"t{j}") for j in range(count)]
        stats = compute_stats([make_record(facts=facts)])
        assert stats.top_k_mass(2) == pytest.approx(9 / 15)

    def test_top_k_mass_monotone_and_saturating(self):
        facts = [(f"r{i % 7}", f"t{i}") for i in range(40)]
        stats = compute_stats([make_record(facts=facts)])
        masses = [stats.top_k_mass(k) for k in range(0, 10)]
        assert masses == sorted(masses)
        assert stats.top_k_mass(7) == 1.0
        assert stats.top_k_mass(9) == 1.0
        assert stats.top_k_mass(0) == 0.0

    def test_histograms_sum_to_total_facts(self):
        records = [
            make_record(sample_id="a", language="te", facts=[("r1", "x"), ("r2", "y")]),
            make_record(sample_id="b", language="en", facts=[("r1", "z")]),
            make_record(sample_id="c", language="te", facts=[]),
        ]
        stats = compute_stats(records)
        assert sum(stats.relation_histogram.values()) == stats.total_facts == 3
        assert sum(stats.language_histogram.values()) == 3
        assert stats.language_histogram[LanguageCode.TE] == 2

    def test_json_shape(self):
        stats = compute_stats([make_record(facts=[("r", "t")])])
        doc = stats_to_json(stats)
        assert doc["total_facts"] == 1
        assert doc["top_k_mass"] == [1.0]
        assert json.dumps(doc)  # serializable


def test_factset_requires_head():
    with pytest.raises(ValidationError):
        FactSet(head="  ")


def test_fact_strips_whitespace():
    fact = Fact("  occupation ", " writer\n")
    assert (fact.relation, fact.tail) == ("occupation", "writer")
