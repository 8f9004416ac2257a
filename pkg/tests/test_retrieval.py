import math
import re
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toolforge.core import load_tool_spec
from toolforge.retrieval import DuplicateDocId, build_index, doc_index, rank_all, retrieve, tokenize
from conftest import FIXTURES


def oracle_bm25(corpus, query, k1=1.2, b=0.75):
    """Textbook Okapi BM25 written out term by term."""
    docs = [[t for t in re.split(r"[^0-9a-z]+", text.lower()) if t] for _, text in corpus]
    n = len(docs)
    avg = sum(map(len, docs)) / n or 1.0
    terms = [t for t in re.split(r"[^0-9a-z]+", query.lower()) if t]
    out = []
    for doc in docs:
        s = 0.0
        for term in terms:
            df = sum(1 for d in docs if term in d)
            idf = max(0.0, math.log((n - df + 0.5) / (df + 0.5)))
            f = doc.count(term)
            s += idf * f * (k1 + 1) / (f + k1 * (1 - b + b * len(doc) / avg))
        out.append(s)
    return out


THREE = [
    ("move", "move the robot to position x y"),
    ("arm", "raise the arm by a given height"),
    ("grab", "open the gripper to grab an object"),
]


def test_tokenize_splits_underscores():
    assert tokenize("API.set_min_price(Value)") == ["api", "set", "min", "price", "value"]


def test_hand_computed_scores():
    idx = build_index(THREE)
    hits = dict(retrieve(idx, "raise the arm", 3))
    # only "raise" and "arm" carry weight; equal lengths make each term worth its idf
    assert hits["arm"] == pytest.approx(2 * math.log(5 / 3), abs=1e-12)
    assert hits["move"] == 0.0 and hits["grab"] == 0.0
    assert [d for d, _ in retrieve(idx, "raise the arm", 3)] == ["arm", "move", "grab"]


def test_matches_oracle_on_fixture_docs():
    spec = load_tool_spec(FIXTURES / "home_search.json")
    corpus = [(f.name, f"{f.name} {f.doc_text}") for f in spec.api_functions]
    idx = build_index(corpus)
    for query in ["minimum price", "number of bedrooms in Palo Alto", "search homes"]:
        expected = oracle_bm25(corpus, query)
        got = dict(retrieve(idx, query, len(corpus)))
        for (doc_id, _), score in zip(corpus, expected):
            if doc_id in got:
                assert got[doc_id] == pytest.approx(score, abs=1e-12)


def test_zero_overlap_and_k_zero():
    idx = build_index(THREE)
    assert retrieve(idx, "quantum entanglement", 3) == []
    assert retrieve(idx, "raise", 0) == []
    with pytest.raises(ValueError):
        retrieve(idx, "raise", -1)


def test_rank_all_pads_with_non_matching_docs():
    idx = build_index(THREE)
    assert rank_all(idx, "grab") == ["grab", "move", "arm"]


def test_duplicate_ids_rejected():
    with pytest.raises(DuplicateDocId):
        build_index([("a", "x"), ("a", "y")])


def test_ties_keep_insertion_order():
    idx = build_index([("a", "red apple"), ("b", "red apple"), ("c", "green pear")])
    assert [d for d, _ in retrieve(idx, "apple", 3)] == ["a", "b"]


def test_doc_index_includes_names():
    spec = load_tool_spec(FIXTURES / "robot.json")
    assert retrieve(doc_index(spec.api_functions), "raise the arm", 1)[0][0] == "raise_arm"


words = st.sampled_from("alpha beta gamma delta eps zeta eta theta iota kappa".split())
docs = st.lists(st.lists(words, min_size=0, max_size=12).map(" ".join), min_size=1, max_size=8)


@settings(max_examples=200, deadline=None)
@given(docs, st.lists(words, min_size=1, max_size=5).map(" ".join))
def test_scores_finite_non_negative_and_deterministic(texts, query):
    corpus = [(str(i), t) for i, t in enumerate(texts)]
    a = retrieve(build_index(corpus), query, len(corpus))
    b = retrieve(build_index(corpus), query, len(corpus))
    assert a == b
    assert all(math.isfinite(s) and s >= 0 for _, s in a)
    expected = oracle_bm25(corpus, query)
    for doc_id, s in a:
        assert s == pytest.approx(expected[int(doc_id)], abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(docs, st.lists(words, min_size=0, max_size=4), st.data())
def test_adding_a_present_term_never_lowers_score(texts, query_terms, data):
    corpus = [(str(i), t) for i, t in enumerate(texts)]
    idx = build_index(corpus)
    pos = data.draw(st.integers(0, len(corpus) - 1))
    present = list(idx.term_freqs[pos])
    if not present:
        return
    extra = data.draw(st.sampled_from(present))
    before = idx.score(pos, tokenize(" ".join(query_terms)))
    after = idx.score(pos, tokenize(" ".join(query_terms + [extra])))
    assert after >= before
