import re
from collections import Counter

import pytest

from mwpr.corpus import build_index, extract_text_numbers, word_tokens
from mwpr.expr import parse_equation
from mwpr.matching import signature
from mwpr.synth import TEMPLATES, generate, seed_records


def overlap(a: str, b: str) -> float:
    wa, wb = set(word_tokens(a)), set(word_tokens(b))
    return len(wa & wb) / len(wa | wb)


def families(records):
    grouped = {}
    for rec in records:
        fam_id = rec.id.split("-")[0]
        grouped.setdefault(fam_id, []).append(rec)
    return grouped


class TestGeneration:
    def test_bit_reproducible(self):
        assert generate(100, seed=7) == generate(100, seed=7)

    def test_different_seeds_differ(self):
        assert generate(100, seed=7) != generate(100, seed=8)

    def test_whole_families_only(self):
        records = generate(503, duplicates=2, distractors=2, seed=1)
        assert len(records) == 500
        counts = Counter(rec.source for rec in records)
        assert counts["synth-seed"] == 100
        assert counts["synth-dup"] == 200
        assert counts["synth-distractor"] == 200

    def test_seed_records_filter(self):
        records = generate(50, seed=3)
        seeds = seed_records(records)
        assert all(rec.id.endswith("-seed") for rec in seeds)
        assert len(seeds) == 10

    def test_rejects_tiny_n(self):
        with pytest.raises(ValueError):
            generate(3, duplicates=2, distractors=2, seed=0)


class TestCorpusProperties:
    def test_every_record_parses(self):
        corpus = build_index(generate(200, seed=4))
        assert corpus.failures == []
        assert corpus.stats().indexed == 200

    def test_text_numbers_match_equation_numbers(self):
        for rec in generate(100, seed=5):
            eq_numbers = [float(v) for v in
                          re.findall(r"\d+", rec.equation.split("=", 1)[1])]
            assert list(rec.text_numbers) == eq_numbers
            assert extract_text_numbers(rec.text) == rec.text_numbers

    def test_all_numbers_become_variables(self):
        # distinct values drawn from the text mean no CONST leaves
        for rec in generate(60, seed=6):
            assert "CONST" not in signature(
                parse_equation(rec.equation, rec.text_numbers))

    def test_solutions_evaluate(self):
        for rec in generate(60, seed=9):
            body = rec.equation.split("=", 1)[1]
            assert "^" not in body
            assert rec.solution == pytest.approx(eval(body))


class TestFamilyStructure:
    def test_duplicates_share_seed_signature(self):
        records = generate(100, seed=10)
        for members in families(records).values():
            seed = next(r for r in members if r.source == "synth-seed")
            seed_sig = signature(parse_equation(seed.equation,
                                                seed.text_numbers))
            for rec in members:
                sig = signature(parse_equation(rec.equation, rec.text_numbers))
                if rec.source == "synth-dup":
                    assert sig == seed_sig
                elif rec.source == "synth-distractor":
                    assert sig != seed_sig

    def test_distractor_perturbs_exactly_one_operator(self):
        records = generate(100, seed=11)
        for members in families(records).values():
            seed = next(r for r in members if r.source == "synth-seed")
            for rec in members:
                if rec.source != "synth-distractor":
                    continue
                assert len(rec.equation) == len(seed.equation)
                diffs = [(a, b) for a, b in zip(seed.equation, rec.equation)
                         if a != b]
                assert len(diffs) == 1
                assert diffs[0][0] in "+-*/" and diffs[0][1] in "+-*/"

    def test_distractor_word_overlap_at_least_80_percent(self):
        records = generate(200, seed=12)
        for members in families(records).values():
            seed = next(r for r in members if r.source == "synth-seed")
            for rec in members:
                if rec.source == "synth-distractor":
                    assert overlap(seed.text, rec.text) >= 0.8

    def test_distractors_lexically_closer_than_duplicates(self):
        records = generate(200, seed=13)
        for members in families(records).values():
            seed = next(r for r in members if r.source == "synth-seed")
            dup_scores = [overlap(seed.text, r.text) for r in members
                          if r.source == "synth-dup"]
            dis_scores = [overlap(seed.text, r.text) for r in members
                          if r.source == "synth-distractor"]
            assert max(dup_scores) < min(dis_scores)


class TestTemplatePool:
    def test_signatures_distinct(self):
        sigs = set()
        for template in TEMPLATES:
            values = list(range(2, 2 + template.arity))
            equation = template.equation.format(
                **dict(zip("abcd", values)))
            sigs.add(signature(parse_equation(
                equation, [float(v) for v in values])))
        assert len(sigs) == len(TEMPLATES)

    def test_twist_words_present_in_their_templates(self):
        for template in TEMPLATES:
            for variant in template.variants:
                assert re.search(rf"\b{re.escape(variant.twist[0])}\b",
                                 variant.template)
