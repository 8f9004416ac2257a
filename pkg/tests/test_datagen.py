import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toolforge.core import parse_action_program
from toolforge.datagen import (
    DataSample,
    MissingPlaceholderValue,
    PairExceedsBudget,
    TaskConfig,
    Template,
    TemplateError,
    build_dataset,
    expand_template,
    format_pair,
    load_task_config,
    pack_all_shot,
    placeholders,
)
from conftest import FIXTURES

HOME_T = Template(
    "Find a home in {city} with {beds} bedrooms.",
    'API.set_location({city})\nAPI.set_buy_or_rent("buy")\nAPI.set_num_beds({beds})\nAPI.search()',
    ({"city": "Palo Alto", "beds": 3}, {"city": "San Jose", "beds": 2}),
)


def test_placeholders_skip_api_key():
    assert placeholders("q={city}&appid={API_KEY}&x={ x }") == {"city"}


def test_fill_quotes_code_literals_only():
    goal, action = HOME_T.fill({"city": "Palo Alto", "beds": 3})
    assert goal == "Find a home in Palo Alto with 3 bedrooms."
    assert 'API.set_location("Palo Alto")' in action and "API.set_num_beds(3)" in action
    parse_action_program(action)


def test_curl_templates_paste_raw_text():
    t = Template.from_json({"goal_template": "weather in {city}",
                            "action_template": "curl 'https://x.org/w?q={city}&appid={API_KEY}'",
                            "value_records": [{"city": "paris"}]})
    assert not t.code_literals
    assert t.fill({"city": "paris"})[1] == "curl 'https://x.org/w?q=paris&appid={API_KEY}'"


def test_missing_value_rejected():
    with pytest.raises(MissingPlaceholderValue):
        Template("{a}", "f({b})", ({"a": 1},))
    with pytest.raises(TemplateError):
        Template("x", "f()", ())


def test_expand_is_seeded():
    assert expand_template(HOME_T, "s:1") == expand_template(HOME_T, "s:1")
    seen = {expand_template(HOME_T, f"s:{i}") for i in range(40)}
    assert len(seen) == 2


def test_dataset_counts_and_determinism():
    cfgs = [TaskConfig("home", (HOME_T,) * 3, 4), TaskConfig("other", (HOME_T,), 5)]
    a = build_dataset(cfgs, 7)
    assert len(a) == 17
    assert a == build_dataset(cfgs, 7)
    assert a != build_dataset(cfgs, 8)


def test_fixture_template_files():
    expected = {"open_weather": (90, 20), "home_search": (100, 18), "cat_api": (40, 45), "trip_booking": (30, 60)}
    for task, (n, rep) in expected.items():
        cfg = load_task_config(FIXTURES / "templates" / f"{task}.json")
        assert (len(cfg.templates), cfg.repeat, cfg.expected_samples) == (n, rep, 1800)


def test_load_task_config_errors(tmp_path):
    p = tmp_path / "t.json"
    p.write_text("[1,")
    with pytest.raises(TemplateError, match=r"t\.json:1:"):
        load_task_config(p)
    p.write_text(json.dumps([{"goal_template": "{a}", "action_template": "f()", "value_records": [{}]}]))
    with pytest.raises(TemplateError, match=r"templates\[0\]"):
        load_task_config(p)


def test_format_pair_offsets():
    text, start, end = format_pair("g", "f(1)")
    assert text == "Task: g\nAction:\nf(1)\n" and text[start:end] == "f(1)"


def test_pack_rejects_oversized_pair_and_mixed_tasks():
    with pytest.raises(PairExceedsBudget):
        pack_all_shot([DataSample("t", "g" * 50, "f()")], 40)
    with pytest.raises(ValueError):
        pack_all_shot([DataSample("a", "g", "f()"), DataSample("b", "g", "f()")], 100)


def check_packing(samples, budget, header=""):
    packed = pack_all_shot(samples, budget, docs_header=header)
    spans = [(p, s) for p in packed for s in p.loss_spans]
    assert len(spans) == len(samples)
    for (p, (a, b)), sample in zip(spans, samples):
        assert p.text[a:b] == sample.action
    for p in packed:
        assert len(p.text) <= budget
        assert p.text.startswith(header)
        ordered = sorted(p.loss_spans)
        assert all(x[1] <= y[0] for x, y in zip(ordered, ordered[1:]))
        assert {p.task_id} == {samples[0].task_id}
    return packed


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.text(max_size=30), st.text(min_size=1, max_size=30)), min_size=1, max_size=25),
       st.integers(90, 400), st.sampled_from(["", "API docs\n"]))
def test_packing_invariants(pairs, budget, header):
    samples = [DataSample("t", g, a) for g, a in pairs]
    check_packing(samples, budget, header)


def test_packed_spans_parse():
    cfg = load_task_config(FIXTURES / "templates" / "home_search.json")
    samples = build_dataset([cfg], 5)
    for p in check_packing(samples, 2048):
        for a, b in p.loss_spans:
            parse_action_program(p.text[a:b])
