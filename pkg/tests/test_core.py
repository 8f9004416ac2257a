import json
import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toolforge.core import (
    ActionProgram,
    ApiCall,
    Constructor,
    ParseError,
    SpecError,
    Symbol,
    TestCase,
    api_multiset,
    canonical_literal,
    load_tool_spec,
    parse_action_program,
    program_to_json,
    render_literal,
    tool_spec_from_json,
    tool_spec_to_json,
)
from conftest import FIXTURES


def test_parse_calls_assignments_and_comments():
    text = '# choose the city\nAPI.set_location("Palo Alto")\n\ndate = Date("2023-08-15")\nAPI.set_departure_date(date)\nAPI.search()'
    prog = parse_action_program(text)
    assert [c.function_name for c in prog.calls] == ["set_location", "set_departure_date", "search"]
    assert prog.calls[0].receiver == "API"
    assert prog.calls[1].args == (Constructor("Date", ("2023-08-15",)),)
    assert prog.raw_text == text


def test_parse_literals():
    prog = parse_action_program('f(1, -2.5, True, "x", Loc(Pt(1, 2)))')
    assert prog.calls[0].args == (1, -2.5, True, "x", Constructor("Loc", (Constructor("Pt", (1, 2)),)))


@pytest.mark.parametrize(
    "text",
    [
        "You can create a robot with",
        "robot.move_to(x=1)",
        "f(*args)",
        "f(unbound)",
        "f(A(B(C(1))))",
        "x = 3 + 4\nf(x)",
        "import os",
        "",
        "# only a comment",
        "f(1)\nthen stop",
        "a.b.c(1)",
    ],
)
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        parse_action_program(text)


def test_parse_error_reports_line():
    with pytest.raises(ParseError) as info:
        parse_action_program("f(1)\ng(2)\nthis is prose")
    assert info.value.line == 3
    assert info.value.text == "this is prose"


def test_bare_names_need_a_value_domain():
    spec = load_tool_spec(FIXTURES / "virtualhome.json")
    prog = parse_action_program("Agent.Find(novel)\nAgent.PutIn(plate, sink)", spec)
    assert prog.calls[0].args == (Symbol("novel"),)
    assert prog.calls[0].render() == "Agent.Find(novel)"
    with pytest.raises(ParseError):
        parse_action_program("Agent.Find(novel)")


def test_numbers_compare_numerically_but_bools_do_not():
    assert canonical_literal(5) == canonical_literal(5.0)
    assert canonical_literal(True) != canonical_literal(1)
    assert canonical_literal("a") != canonical_literal(Symbol("a"))


def test_render_literal_quotes():
    assert render_literal("Palo Alto") == '"Palo Alto"'
    assert render_literal('say "hi"') == "'say \"hi\"'"
    assert render_literal("it's") == '"it\'s"'


# -- property tests ----------------------------------------------------------

_KEYWORDS = {"True", "False", "None", "and", "or", "not", "if", "else", "for", "in", "is", "def",
             "class", "return", "from", "import", "as", "with", "while", "try", "except", "lambda",
             "pass", "del", "global", "nonlocal", "assert", "yield", "raise", "break", "continue",
             "elif", "finally", "async", "await", "match", "case", "type", "_"}
identifiers = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,8}", fullmatch=True).filter(lambda s: s not in _KEYWORDS)
scalars = st.one_of(
    st.integers(-10**12, 10**12),
    st.floats(allow_nan=False, allow_infinity=False),
    st.booleans(),
    st.text(max_size=12),
)
literals = st.one_of(
    scalars,
    st.builds(lambda n, a: Constructor(n, tuple(a)), identifiers, st.lists(scalars, max_size=2)),
    st.builds(
        lambda n, m, a: Constructor(n, (Constructor(m, tuple(a)),)),
        identifiers, identifiers, st.lists(scalars, max_size=2),
    ),
)
calls = st.builds(
    lambda r, n, a: ApiCall(n, tuple(a), r),
    st.one_of(st.none(), identifiers),
    identifiers,
    st.lists(literals, max_size=4),
)
programs = st.lists(calls, min_size=1, max_size=6).map(lambda cs: ActionProgram(tuple(cs)))


@settings(max_examples=300, deadline=None)
@given(programs)
def test_render_parse_roundtrip(prog):
    again = parse_action_program(prog.render())
    assert again == prog
    assert parse_action_program(again.render()) == again


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=200))
def test_parse_never_panics(text):
    try:
        prog = parse_action_program(text)
    except ParseError:
        return
    assert prog.calls


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet=string.printable, max_size=120))
def test_parse_never_panics_on_code_like_text(text):
    try:
        parse_action_program(text)
    except ParseError:
        pass


@settings(max_examples=200, deadline=None)
@given(programs)
def test_multiset_cardinality_equals_call_count(prog):
    assert sum(api_multiset(prog).values()) == len(prog.calls)


# -- ToolSpec documents ------------------------------------------------------


def test_fixture_specs_roundtrip_through_json():
    for path in sorted(FIXTURES.glob("*.json")):
        if path.name.endswith(".env.json"):
            continue
        spec = load_tool_spec(path)
        again = tool_spec_from_json(json.loads(json.dumps(tool_spec_to_json(spec))))
        assert again == spec, path.name


def _mini(**over):
    doc = {
        "tool_id": "mini",
        "env_binding": "",
        "api_functions": [{"name": "f", "params": [{"name": "x"}]}],
        "demos": [{"goal_text": "g", "program": "f(1)"}],
        "tests": [{"id": "t1", "goal_text": "g", "gold_programs": ["f(2)"]}],
    }
    doc.update(over)
    return doc


def test_spec_validation():
    tool_spec_from_json(_mini())
    with pytest.raises(SpecError):
        tool_spec_from_json(_mini(api_functions=[{"name": "f"}, {"name": "f"}]))
    with pytest.raises(SpecError):
        tool_spec_from_json(_mini(tests=[{"id": "t1", "goal_text": "g", "gold_programs": ["h(2)"]}]))
    with pytest.raises(SpecError):
        tool_spec_from_json(_mini(tests=[{"id": "t", "goal_text": "g", "gold_programs": ["f(1)"]}] * 2))
    with pytest.raises(SpecError):
        tool_spec_from_json(_mini(mode="multi_step", env_binding="home_search"))
    with pytest.raises(SpecError):
        tool_spec_from_json(_mini(tests=[{"id": "t1", "goal_text": "g", "gold_programs": []}]))


def test_load_tool_spec_reports_json_position(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "tool_id": "x",\n  oops\n}')
    with pytest.raises(SpecError, match=r"bad\.json:3:3"):
        load_tool_spec(bad)


def test_program_json_stores_calls():
    prog = parse_action_program('API.set_location("Palo Alto")\nAPI.search()')
    doc = program_to_json(prog)
    assert doc["raw_text"] == prog.raw_text
    assert len(doc["calls"]) == 2


def test_test_case_is_not_collected():
    assert TestCase.__test__ is False
