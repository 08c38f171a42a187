import random
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphgen import random_graph, random_truncated_graph
from mcmopt.graph import AdderGraph
from mcmopt.io import ExchangeError, InstanceFileError, emit_instance, from_exchange, isomorphic, parse_instance, to_dot, to_exchange
from mcmopt.models import Instance, attach_outputs


class TestInstanceFile:
    def test_minimal(self):
        inst = parse_instance("targets = 7, 19, 31\nmetric = adders\n")
        assert inst == Instance((7, 19, 31))
        assert inst.timeout == 1800 and inst.symmetry_breaking and inst.adder_bound is None

    def test_truncated_without_budgets(self):
        with pytest.raises(InstanceFileError, match="budgets"):
            parse_instance("targets = 49, 51\nmetric = truncated\ninput_wordlength = 3\n")

    @pytest.mark.parametrize(
        "doc, match",
        [
            ("metric = adders\n", "targets"),
            ("targets = 7\nfoo = 1\n", "line 2, column 1: unknown key 'foo'"),
            ("targets = 7\ntargets = 9\n", "line 2.*duplicate"),
            ("targets = 7, x\n", "line 1, column 14: malformed integer 'x'"),
            ("targets 7\n", "line 1, column 1"),
            ("targets = 0\n", "zero target"),
            ("targets = 7\nsymmetry_breaking = maybe\n", "true or false"),
        ],
    )
    def test_errors(self, doc, match):
        with pytest.raises(InstanceFileError, match=match):
            parse_instance(doc)

    def test_normalized_round_trip(self):
        doc = """
        # a comment
        budgets = 32,32
        targets = 49,51   # trailing comment
        input_wordlength = 3
        metric = tmcm
        note = faithful outputs
        timeout = 60
        symmetry_breaking = false
        """
        text = emit_instance(parse_instance("\n".join(l.strip() for l in doc.splitlines())))
        assert text == (
            "targets = 49, 51\nmetric = truncated\ninput_wordlength = 3\nbudgets = 32, 32\n"
            "timeout = 60\nsymmetry_breaking = false\nnote = faithful outputs\n"
        )
        assert emit_instance(parse_instance(text)) == text


class TestDot:
    def test_empty_graph(self):
        text = to_dot(AdderGraph((), 3))
        assert re.findall(r"^\s+n\d+ \[", text, re.M) == ["  n0 ["]
        assert "->" not in text

    def test_chain(self, chain_graph):
        text = to_dot(chain_graph)
        assert len(re.findall(r"^\s+n[1-9]\d* \[", text, re.M)) == 3
        assert text.count("->") == 6
        assert text.count("peripheries=2") == 2

    def test_truncation_label(self, seventeen_graph):
        assert 't=4' in to_dot(seventeen_graph)
        assert "<<5" in to_dot(seventeen_graph)

    def test_deterministic(self, neg_shift_graph):
        assert to_dot(neg_shift_graph) == to_dot(neg_shift_graph)
        assert ">>1" in to_dot(neg_shift_graph)


class TestExchange:
    def test_neg_shift_round_trip(self, neg_shift_graph):
        text = to_exchange(neg_shift_graph)
        assert "A(19;7,0,+;31,0,+;1;0,0;2)" in text
        assert isomorphic(from_exchange(text), neg_shift_graph)

    def test_empty_round_trip(self):
        g = attach_outputs([], [1, 4], 5)
        assert to_exchange(g) == "I(5;31) O(1;1;0;0) O(4;1;2;0)"
        assert isomorphic(from_exchange(to_exchange(g)), g)

    def test_corrupted_fundamental(self, neg_shift_graph):
        text = to_exchange(neg_shift_graph).replace("A(19;", "A(21;").replace("O(19;19;", "O(21;21;")
        with pytest.raises(ExchangeError, match="fundamental mismatch"):
            from_exchange(text)

    def test_even_fundamental(self):
        with pytest.raises(ExchangeError, match="not odd"):
            from_exchange("I(3;7) A(6;1,2,+;1,0,+;0;0,0;1)")

    @pytest.mark.parametrize(
        "text, match",
        [
            ("A(3;1,1,+;1,0,+;0;0,0;1)", "missing I"),
            ("I(3;7) A(3;1,1,+;1,0,+;0;0,0;2)", "column 8: stage 2"),
            ("I(3;7) A(3;5,1,+;1,0,+;0;0,0;1)", "column 8: input 5"),
            ("I(3;7) A(3;1,1,*;1,0,+;0;0,0;1)", "sign"),
            ("I(3;7) hello", "column 8"),
            ("I(3;7) A(3;1,1,+;1,0,+;0;0;1)", "malformed"),
        ],
    )
    def test_errors(self, text, match):
        with pytest.raises(ExchangeError, match=match):
            from_exchange(text)

    def test_random_round_trips(self):
        rng = random.Random(3)
        for _ in range(300):
            g = random_truncated_graph(rng) if rng.random() < 0.5 else random_graph(rng)
            text = to_exchange(g)
            back = from_exchange(text)
            assert isomorphic(back, g) and to_exchange(back) == text

    @settings(max_examples=300, deadline=None)
    @given(st.integers(0, 10**6), st.integers(0, 10**6), st.text(alphabet="0123456789;,+-() AIO", max_size=3))
    def test_fuzzed_text_fails_cleanly(self, seed, pos, junk):
        g = random_graph(random.Random(seed))
        text = to_exchange(g)
        cut = pos % (len(text) + 1)
        mutated = text[:cut] + junk + text[cut + len(junk) // 2 :]
        try:
            parsed = from_exchange(mutated)
        except ExchangeError:
            return
        assert to_exchange(parsed) == " ".join(mutated.split()) or isinstance(parsed, AdderGraph)
