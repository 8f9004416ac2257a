import json

from toolforge.actiongen import ScriptedClient
from toolforge.core import ErrorCategory, load_tool_spec
from toolforge.harness import Evaluator, build_replay, run_suite
from toolforge.metrics import aggregate
from conftest import FIXTURES, load_suite


def _replay(name, kind="gold"):
    return ScriptedClient.from_jsonl(FIXTURES / f"{name}.{kind}.jsonl")


def test_parallel_runs_match_sequential():
    spec, env = load_suite("home_search")
    seq = run_suite(spec, _replay("home_search", "mutated"), env)
    par = run_suite(spec, _replay("home_search", "mutated"), env, parallelism=8)
    assert [o.to_json() for o in seq] == [o.to_json() for o in par]


def test_results_are_byte_identical_across_runs():
    spec, env = load_suite("trip_booking")
    a = json.dumps([o.to_json() for o in run_suite(spec, _replay("trip_booking"), env)], sort_keys=True)
    b = json.dumps([o.to_json() for o in run_suite(spec, _replay("trip_booking"), env)], sort_keys=True)
    assert a == b


def test_replay_miss_is_an_infrastructure_failure():
    spec, env = load_suite("home_search")
    outcomes = run_suite(spec, ScriptedClient([]), env)
    assert all(o.infrastructure_error and "ReplayMiss" in o.infrastructure_error for o in outcomes)
    report = aggregate(outcomes)
    assert report.scored == 0 and report.infrastructure_failures == 20


def test_non_executable_generation():
    spec, env = load_suite("home_search")
    test = spec.tests[0]
    client = ScriptedClient(build_replay(spec, {test.id: "Sure! Here is the program:\nAPI.search()"}, env))
    outcome = Evaluator(spec, client, env).evaluate(test)
    assert not outcome.executable and outcome.category is ErrorCategory.NON_EXECUTABLE


def test_wrong_api_generation():
    spec, env = load_suite("home_search")
    test = spec.tests[0]
    gold = test.gold_programs[0].raw_text
    wrong = gold.replace("API.search()", "API.set_num_garages(9)\nAPI.search()")
    client = ScriptedClient(build_replay(spec, {test.id: wrong}, env))
    outcome = Evaluator(spec, client, env).evaluate(test)
    assert outcome.executable and outcome.category is ErrorCategory.WRONG_API


def test_virtualhome_reports_score():
    spec, env = load_suite("virtualhome")
    outcomes = run_suite(spec, _replay("virtualhome"), env)
    report = aggregate(outcomes)
    assert report.mean_score == 1.0 and report.mean_executability == 1.0


def test_counter_episode_outcome():
    spec, env = load_suite("counter")
    client = ScriptedClient([{"match": "ordinal", "index": i, "completion": c}
                             for i, c in enumerate(["inc()", "inc()", "finish()"])])
    outcome = Evaluator(spec, client, env).evaluate(spec.tests[0])
    assert outcome.success and outcome.detail == "env_exit" and outcome.metrics["steps"] == 3.0


def test_rest_substitutes_api_key():
    spec, env = load_suite("cat_api")
    outcomes = run_suite(spec, _replay("cat_api"), env)
    assert all(o.success for o in outcomes)
    assert "MOCK_CAT_KEY" in outcomes[0].generation
