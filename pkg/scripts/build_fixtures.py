"""Regenerate everything under fixtures/.

    python scripts/build_fixtures.py

Inventories beyond the functions named in public task descriptions are
invented for these fixtures. Output is deterministic.
"""

from __future__ import annotations

import itertools
import json
import random
import zlib
from pathlib import Path

from toolforge.core import tool_spec_from_json, tool_spec_to_json
from toolforge.envs import env_config_from_json
from toolforge.harness import build_replay

ROOT = Path(__file__).resolve().parent.parent / "fixtures"


def dump(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")


def dump_jsonl(path: Path, rows) -> None:
    path.write_text("".join(json.dumps(r, sort_keys=True) + "\n" for r in rows), encoding="utf-8")


def fn(name, params=(), doc="", receiver="API"):
    """params: (name, kind, domain) triples."""
    sig = ", ".join(p[0] if p[1] == "required" else f"{p[0]}=None" for p in params)
    return {
        "name": name,
        "params": [{"name": p[0], "kind": p[1], "value_domain": p[2]} for p in params],
        "doc_text": f"# {doc}\n{receiver}.{name}({sig})" if receiver else f"# {doc}\n{name}({sig})",
    }


def q(s: str) -> str:
    return json.dumps(s)


def write_suite(name: str, spec_doc: dict, env_doc: dict, golds: dict[str, str], mutated: dict[str, str] | None = None):
    spec = tool_spec_from_json(spec_doc)  # validates
    env = env_config_from_json(env_doc)
    dump(ROOT / f"{name}.json", tool_spec_to_json(spec))
    dump(ROOT / f"{name}.env.json", env_doc)
    if golds:
        dump_jsonl(ROOT / f"{name}.gold.jsonl", build_replay(spec, golds, env))
    if mutated:
        dump_jsonl(ROOT / f"{name}.mutated.jsonl", build_replay(spec, mutated, env))


# -- home search ------------------------------------------------------------

CITIES = ["Palo Alto", "San Jose", "Mountain View", "Sunnyvale", "Oakland", "Berkeley",
          "Fremont", "Santa Clara", "Cupertino", "Redwood City", "San Mateo", "Menlo Park"]
HOME_TYPES = ["single-family", "condo", "townhouse", "apartment", "multi-family", "mobile"]

HOME_CRITERIA = {
    # name: (doc, goal phrase, value sampler)
    "set_num_beds": ("Set the minimum number of bedrooms.", "{} bedrooms", lambda r: r.randint(1, 6)),
    "set_num_baths": ("Set the minimum number of bathrooms.", "{} bathrooms", lambda r: r.randint(1, 5)),
    "set_min_price": ("Set the minimum price in dollars.", "priced above ${}", lambda r: r.choice(range(200000, 2000001, 50000))),
    "set_max_price": ("Set the maximum price in dollars.", "priced below ${}", lambda r: r.choice(range(2500000, 9000001, 250000))),
    "set_min_square_feet": ("Set the minimum living area in square feet.", "at least {} square feet", lambda r: r.choice(range(600, 3001, 100))),
    "set_max_square_feet": ("Set the maximum living area in square feet.", "at most {} square feet", lambda r: r.choice(range(3200, 8001, 200))),
    "set_min_lot_size": ("Set the minimum lot size in square feet.", "a lot of at least {} square feet", lambda r: r.choice(range(2000, 10001, 500))),
    "set_max_lot_size": ("Set the maximum lot size in square feet.", "a lot of at most {} square feet", lambda r: r.choice(range(12000, 40001, 1000))),
    "set_home_type": ("Set the type of home.", "of type {}", lambda r: r.choice(HOME_TYPES)),
    "set_num_garages": ("Set the minimum number of garage spaces.", "{} garage spaces", lambda r: r.randint(1, 3)),
    "set_min_year_built": ("Set the earliest construction year.", "built after {}", lambda r: r.randint(1950, 2005)),
    "set_max_year_built": ("Set the latest construction year.", "built before {}", lambda r: r.randint(2006, 2023)),
}
# never shown in demonstrations, so tests must use unseen functions
HOME_UNSEEN = ("set_min_lot_size", "set_max_lot_size", "set_num_garages")


def home_functions():
    fns = [
        fn("set_location", [("location", "required", None)], "Set the city to search in."),
        fn("set_buy_or_rent", [("value", "required", ["buy", "rent"])], 'Choose "buy" or "rent".'),
    ]
    for name, (doc, _, _) in HOME_CRITERIA.items():
        domain = HOME_TYPES if name == "set_home_type" else None
        fns.append(fn(name, [("value", "required", domain)], doc))
    fns.append(fn("search", [], "Submit the criteria and search. Call it last."))
    return fns


def home_case(rng: random.Random, allowed: list[str]) -> tuple[str, str, list]:
    city = rng.choice(CITIES)
    mode = rng.choice(["buy", "rent"])
    k = rng.randint(1, 4)
    names = sorted(rng.sample(allowed, k), key=list(HOME_CRITERIA).index)
    if all(n == "set_home_type" for n in names):
        names = ["set_num_beds"] + names
    values = [HOME_CRITERIA[n][2](rng) for n in names]
    phrases = [HOME_CRITERIA[n][1].format(v) for n, v in zip(names, values)]
    verb = "for sale" if mode == "buy" else "for rent"
    goal = f"Find homes {verb} in {city} with " + ", ".join(phrases) + "."
    lines = [f"API.set_location({q(city)})", f"API.set_buy_or_rent({q(mode)})"]
    lines += [f"API.{n}({q(v) if isinstance(v, str) else v})" for n, v in zip(names, values)]
    lines.append("API.search()")
    return goal, "\n".join(lines), list(zip(names, values))


def build_home_search() -> None:
    rng = random.Random(1501)
    seen = [n for n in HOME_CRITERIA if n not in HOME_UNSEEN]
    demos = [home_case(rng, seen) for _ in range(10)]
    tests, golds, mutated = [], {}, {}
    for i in range(20):
        goal, program, crit = home_case(rng, list(HOME_CRITERIA))
        tid = f"home-{i:02d}"
        tests.append({"id": tid, "goal_text": goal, "gold_programs": [program]})
        golds[tid] = program
        # bump the first numeric criterion: same APIs, one wrong argument
        j = next(j for j, (_, v) in enumerate(crit) if isinstance(v, int))
        name, v = crit[j]
        mutated[tid] = program.replace(f"API.{name}({v})", f"API.{name}({v + 1})")
        assert mutated[tid] != program
    spec = {
        "tool_id": "home_search",
        "mode": "single_step",
        "env_binding": "home_search",
        "gen_config": {"max_new_tokens": 128, "stop_sequences": ["Task:"], "num_retrieved_docs": "all", "num_demos": 3},
        "api_functions": home_functions(),
        "demos": [{"goal_text": g, "program": p} for g, p, _ in demos],
        "tests": tests,
    }
    env = {"kind": "home_search", "prefix": ["set_location", "set_buy_or_rent"], "search": "search"}
    write_suite("home_search", spec, env, golds, mutated)


# -- trip booking -----------------------------------------------------------

TRANSPORT = ["flight", "train", "bus", "cruise"]
ROOM_TYPES = ["single", "double", "suite"]
TRIP_CITIES = ["San Francisco", "Los Angeles", "Seattle", "New York", "Chicago", "Boston", "Denver", "Austin"]


def trip_functions():
    R, O = "required", "optional"
    return [
        fn("select_booking_type", [("booking_type", R, ["trip tickets", "hotel", "both"])],
           'Choose "trip tickets", "hotel" or "both". Call it first.'),
        fn("select_transportation", [("mode", R, TRANSPORT)], "Choose the means of transportation."),
        fn("set_num_adults", [("n", R, None)], "Set the number of adults."),
        fn("set_num_children", [("n", R, None)], "Set the number of children."),
        fn("set_origin", [("location", R, None)], "Set where the trip starts; pass Loc(name)."),
        fn("set_destination", [("location", R, None)], "Set where the trip ends; pass Loc(name)."),
        fn("set_departure_date", [("date", R, None)], "Set the departure date; pass Date(\"YYYY-MM-DD\")."),
        fn("set_return_date", [("date", R, None)], "Set the return date; must follow the departure date."),
        fn("set_min_ticket_price", [("price", R, None)], "Set the minimum ticket price."),
        fn("set_max_ticket_price", [("price", R, None)], "Set the maximum ticket price."),
        fn("set_hotel_location", [("location", R, None)], "Set the hotel location; pass Loc(name)."),
        fn("set_checkin_date", [("date", R, None)], "Set the hotel check-in date; pass Date(...)."),
        fn("set_checkout_date", [("date", R, None)], "Set the hotel check-out date; after check-in."),
        fn("set_num_rooms", [("n", R, None)], "Set the number of hotel rooms."),
        fn("set_min_room_price", [("price", R, None)], "Set the minimum nightly room price."),
        fn("set_max_room_price", [("price", R, None)], "Set the maximum nightly room price."),
        fn("set_min_hotel_rating", [("stars", R, None)], "Set the minimum hotel star rating."),
        fn("set_room_type", [("room_type", R, ROOM_TYPES)], "Choose single, double or suite."),
        fn("set_hotel_name", [("name", R, None)], "Restrict the search to a hotel chain."),
        fn("search", [], "Submit the booking search. Call it last."),
    ]


TRIP_RULES = {
    "trip tickets": {
        "required": ["select_booking_type", "select_transportation", "set_origin", "set_destination",
                     "set_departure_date", "search"],
        "optional": ["set_num_adults", "set_num_children", "set_return_date", "set_min_ticket_price",
                     "set_max_ticket_price"],
        "order": [["select_booking_type", "*"], ["set_departure_date", "set_return_date"]],
    },
    "hotel": {
        "required": ["select_booking_type", "set_hotel_location", "set_checkin_date", "set_checkout_date", "search"],
        "optional": ["set_num_rooms", "set_num_adults", "set_num_children", "set_min_room_price",
                     "set_max_room_price", "set_min_hotel_rating", "set_room_type", "set_hotel_name"],
        "order": [["select_booking_type", "*"], ["set_checkin_date", "set_checkout_date"]],
    },
}
TRIP_RULES["both"] = {
    "required": sorted(set(TRIP_RULES["trip tickets"]["required"]) | set(TRIP_RULES["hotel"]["required"])),
    "optional": sorted(set(TRIP_RULES["trip tickets"]["optional"]) | set(TRIP_RULES["hotel"]["optional"])),
    "order": TRIP_RULES["trip tickets"]["order"] + TRIP_RULES["hotel"]["order"][1:],
}


def _date(rng, month=None):
    m = month or rng.randint(1, 11)
    return f"2023-{m:02d}-{rng.randint(1, 20):02d}", m


def trip_case(rng: random.Random, kind: str) -> tuple[str, str]:
    lines = [f"API.select_booking_type({q(kind)})"]
    parts = []
    if kind in ("trip tickets", "both"):
        mode = rng.choice(TRANSPORT)
        a, b = rng.sample(TRIP_CITIES, 2)
        dep, m = _date(rng)
        adults = rng.randint(1, 4)
        lines += [f"API.select_transportation({q(mode)})", f"API.set_num_adults({adults})",
                  f"API.set_origin(Loc({q(a)}))", f"API.set_destination(Loc({q(b)}))",
                  f"date = Date({q(dep)})", "API.set_departure_date(date)"]
        parts.append(f"{mode} tickets for {adults} adults from {a} to {b} on {dep}")
        if rng.random() < 0.4:
            ret = f"2023-{m + 1:02d}-{rng.randint(1, 28):02d}"
            lines.append(f"API.set_return_date(Date({q(ret)}))")
            parts[-1] += f", returning {ret}"
        if rng.random() < 0.5:
            price = rng.choice(range(100, 801, 50))
            lines.append(f"API.set_max_ticket_price({price})")
            parts[-1] += f", at most ${price} per ticket"
    if kind in ("hotel", "both"):
        city = rng.choice(TRIP_CITIES)
        cin, m = _date(rng)
        cout = f"2023-{m:02d}-{int(cin[-2:]) + rng.randint(1, 7):02d}"
        lines += [f"API.set_hotel_location(Loc({q(city)}))", f"API.set_checkin_date(Date({q(cin)}))",
                  f"API.set_checkout_date(Date({q(cout)}))"]
        parts.append(f"a hotel in {city} from {cin} to {cout}")
        if rng.random() < 0.5:
            rooms = rng.randint(1, 3)
            lines.append(f"API.set_num_rooms({rooms})")
            parts[-1] += f" with {rooms} rooms"
        if rng.random() < 0.4:
            rt = rng.choice(ROOM_TYPES)
            lines.append(f"API.set_room_type({q(rt)})")
            parts[-1] += f", {rt} room"
        if rng.random() < 0.3:
            stars = rng.randint(3, 5)
            lines.append(f"API.set_min_hotel_rating({stars})")
            parts[-1] += f", rated {stars} stars or more"
    lines.append("API.search()")
    return "Book " + " and ".join(parts) + ".", "\n".join(lines)


def build_trip_booking() -> None:
    rng = random.Random(2023)
    kinds = ["trip tickets", "hotel", "both"]
    demos = [trip_case(rng, kinds[i % 3]) for i in range(11)]
    tests, golds = [], {}
    for i in range(12):
        goal, program = trip_case(rng, kinds[i % 3])
        tid = f"trip-{i:02d}"
        tests.append({"id": tid, "goal_text": goal, "gold_programs": [program]})
        golds[tid] = program
    spec = {
        "tool_id": "trip_booking",
        "mode": "single_step",
        "env_binding": "trip_booking",
        "gen_config": {"max_new_tokens": 300, "stop_sequences": ["Task:"], "num_retrieved_docs": "all", "num_demos": 3},
        "api_functions": trip_functions(),
        "demos": [{"goal_text": g, "program": p} for g, p in demos],
        "tests": tests,
    }
    env = {"kind": "trip_booking", "booking_type_function": "select_booking_type", "search": "search",
           "booking_types": TRIP_RULES}
    write_suite("trip_booking", spec, env, golds)


# -- VirtualHome-style ------------------------------------------------------

VH_ZERO = ["Sleep", "WakeUp", "StandUp"]
VH_ONE = ["Walk", "Run", "Find", "Grab", "Open", "Close", "SwitchOn", "SwitchOff", "Drink", "LookAt",
          "TurnTo", "Wipe", "PutOn", "TakeOff", "Greet", "Drop", "Read", "PointAt", "Touch", "Lie",
          "SitOn", "Type", "Watch", "Push", "Pull", "Move", "Rinse", "Wash", "Scrub", "Squeeze",
          "PlugIn", "PlugOut", "Cut", "Eat"]
VH_TWO = ["PutBack", "PutIn", "PourInto"]
VH_OBJECTS = ["novel", "chair", "bed", "light", "tv", "remote_control", "computer", "keyboard", "cup",
              "water", "sink", "faucet", "dishwasher", "plate", "kitchen", "bedroom", "living_room",
              "bathroom", "toothbrush", "toothpaste", "towel", "soap", "door", "fridge", "milk", "table",
              "sofa", "phone", "shoes", "washing_machine", "clothes", "lamp", "desk", "bread", "knife"]
VH_CONTAINERS = ["sink", "dishwasher", "fridge", "cup", "table", "desk", "washing_machine", "plate", "bed"]

VH_TASKS = [
    ("Read book", [
        "Agent.Find(novel)\nAgent.Grab(novel)\nAgent.Find(chair)\nAgent.SitOn(chair)\nAgent.Read(novel)",
        "Agent.Walk(living_room)\nAgent.Find(novel)\nAgent.Grab(novel)\nAgent.Find(sofa)\nAgent.SitOn(sofa)\nAgent.Read(novel)",
    ]),
    ("Watch TV", [
        "Agent.Walk(living_room)\nAgent.Find(remote_control)\nAgent.Grab(remote_control)\nAgent.Find(tv)\nAgent.SwitchOn(tv)\nAgent.Find(sofa)\nAgent.SitOn(sofa)\nAgent.Watch(tv)",
    ]),
    ("Brush teeth", [
        "Agent.Walk(bathroom)\nAgent.Find(toothbrush)\nAgent.Grab(toothbrush)\nAgent.Find(toothpaste)\nAgent.Squeeze(toothpaste)\nAgent.Find(sink)\nAgent.Rinse(toothbrush)",
        "Agent.Walk(bathroom)\nAgent.Find(faucet)\nAgent.SwitchOn(faucet)\nAgent.Find(toothbrush)\nAgent.Grab(toothbrush)\nAgent.Scrub(toothbrush)\nAgent.SwitchOff(faucet)",
    ]),
    ("Go to sleep", [
        "Agent.Walk(bedroom)\nAgent.Find(light)\nAgent.SwitchOff(light)\nAgent.Find(bed)\nAgent.Lie(bed)\nAgent.Sleep()",
    ]),
    ("Drink milk", [
        "Agent.Walk(kitchen)\nAgent.Find(fridge)\nAgent.Open(fridge)\nAgent.Find(milk)\nAgent.Grab(milk)\nAgent.Find(cup)\nAgent.PourInto(milk, cup)\nAgent.Close(fridge)\nAgent.Drink(cup)",
    ]),
    ("Wash dishes", [
        "Agent.Walk(kitchen)\nAgent.Find(plate)\nAgent.Grab(plate)\nAgent.Find(sink)\nAgent.PutIn(plate, sink)\nAgent.Find(faucet)\nAgent.SwitchOn(faucet)\nAgent.Wash(plate)",
        "Agent.Walk(kitchen)\nAgent.Find(dishwasher)\nAgent.Open(dishwasher)\nAgent.Find(plate)\nAgent.Grab(plate)\nAgent.PutIn(plate, dishwasher)\nAgent.Close(dishwasher)\nAgent.SwitchOn(dishwasher)",
    ]),
    ("Work on computer", [
        "Agent.Walk(bedroom)\nAgent.Find(computer)\nAgent.SwitchOn(computer)\nAgent.Find(chair)\nAgent.SitOn(chair)\nAgent.Find(keyboard)\nAgent.Type(keyboard)",
    ]),
    ("Make toast", [
        "Agent.Walk(kitchen)\nAgent.Find(bread)\nAgent.Grab(bread)\nAgent.Find(knife)\nAgent.Grab(knife)\nAgent.Cut(bread)\nAgent.Find(plate)\nAgent.PutBack(bread, plate)\nAgent.Eat(bread)",
    ]),
]
VH_DEMOS = [
    ("Turn on light", "Agent.Walk(living_room)\nAgent.Find(light)\nAgent.SwitchOn(light)"),
    ("Answer the phone", "Agent.Find(phone)\nAgent.Grab(phone)\nAgent.LookAt(phone)"),
    ("Put on shoes", "Agent.Find(shoes)\nAgent.Grab(shoes)\nAgent.PutOn(shoes)"),
    ("Wash hands", "Agent.Walk(bathroom)\nAgent.Find(faucet)\nAgent.SwitchOn(faucet)\nAgent.Find(soap)\nAgent.Grab(soap)\nAgent.Wash(soap)\nAgent.SwitchOff(faucet)"),
    ("Relax on sofa", "Agent.Walk(living_room)\nAgent.Find(sofa)\nAgent.SitOn(sofa)"),
    ("Do laundry", "Agent.Find(clothes)\nAgent.Grab(clothes)\nAgent.Find(washing_machine)\nAgent.Open(washing_machine)\nAgent.PutIn(clothes, washing_machine)\nAgent.Close(washing_machine)\nAgent.SwitchOn(washing_machine)"),
    ("Get up", "Agent.WakeUp()\nAgent.StandUp()\nAgent.Walk(bathroom)"),
    ("Dry hands", "Agent.Find(towel)\nAgent.Grab(towel)\nAgent.Wipe(towel)\nAgent.PutBack(towel, table)"),
]


def vh_functions():
    fns = [fn(n, [], f"{n}.", receiver="Agent") for n in VH_ZERO]
    fns += [fn(n, [("object", "required", VH_OBJECTS)], f"{n} an object.", receiver="Agent") for n in VH_ONE]
    fns += [fn(n, [("object1", "required", VH_OBJECTS), ("object2", "required", VH_CONTAINERS)],
               f"{n}: move object1 onto/into object2.", receiver="Agent") for n in VH_TWO]
    assert len(fns) == 40
    return fns


def build_virtualhome() -> None:
    tests, golds = [], {}
    for i, (goal, solutions) in enumerate(VH_TASKS):
        tid = f"vh-{i:02d}"
        tests.append({"id": tid, "goal_text": goal, "gold_programs": solutions})
        golds[tid] = solutions[-1]
    spec = {
        "tool_id": "virtualhome",
        "mode": "single_step",
        "env_binding": "virtualhome",
        "gen_config": {"max_new_tokens": 128, "stop_sequences": ["Task:"], "num_retrieved_docs": 10, "num_demos": 3},
        "api_functions": vh_functions(),
        "demos": [{"goal_text": g, "program": p} for g, p in VH_DEMOS],
        "tests": tests,
    }
    write_suite("virtualhome", spec, {"kind": "virtualhome"}, golds)


# -- REST: Open Weather and The Cat API --------------------------------------

OW = "https://api.openweathermap.org"


def ow_functions():
    def rest(name, curl, doc):
        return {"name": name, "params": [], "doc_text": f"# {doc}\n{curl}"}

    return [
        rest("current_weather_city", f"curl -X GET '{OW}/data/2.5/weather?q={{city}}&appid={{API_KEY}}[&lang={{lang}}][&units={{units}}]'",
             "Current weather in a city (spaces in the city name become +)."),
        rest("current_weather_zip", f"curl -X GET '{OW}/data/2.5/weather?zip={{zip}},{{country}}&appid={{API_KEY}}[&units={{units}}]'",
             "Current weather for a zip code."),
        rest("current_weather_coords", f"curl -X GET '{OW}/data/2.5/weather?lat={{lat}}&lon={{lon}}&appid={{API_KEY}}[&units={{units}}]'",
             "Current weather at a latitude/longitude."),
        rest("forecast_city", f"curl -X GET '{OW}/data/2.5/forecast?q={{city}}&appid={{API_KEY}}[&cnt={{count}}][&units={{units}}]'",
             "5 day / 3 hour forecast for a city."),
        rest("air_pollution", f"curl -X GET '{OW}/data/2.5/air_pollution?lat={{lat}}&lon={{lon}}&appid={{API_KEY}}'",
             "Current air quality at a latitude/longitude."),
        rest("geocode_city", f"curl -X GET '{OW}/geo/1.0/direct?q={{city}}&limit={{limit}}&appid={{API_KEY}}'",
             "Coordinates of a city by name."),
    ]


def _ow_response(kind: str, key: str) -> str:
    h = zlib.crc32(key.encode()) % 997  # placeholder numbers; only equality matters
    return json.dumps({"kind": kind, "query": key, "value": h}, sort_keys=True)


def build_open_weather() -> None:
    cases = [
        ("What is the weather like in Palo Alto right now? Answer in English and use imperial units.",
         f"curl -X GET '{OW}/data/2.5/weather?q=palo+alto&appid={{API_KEY}}&lang=en&units=imperial'"),
        ("Current weather in Berlin, in German.",
         f"curl -X GET '{OW}/data/2.5/weather?q=berlin&appid={{API_KEY}}&lang=de'"),
        ("Weather for zip code 94040 in the US, metric units.",
         f"curl -X GET '{OW}/data/2.5/weather?zip=94040,us&appid={{API_KEY}}&units=metric'"),
        ("What's the weather at latitude 37.77 and longitude -122.42?",
         f"curl -X GET '{OW}/data/2.5/weather?lat=37.77&lon=-122.42&appid={{API_KEY}}'"),
        ("Give me the forecast for Tokyo, 5 entries, metric units.",
         f"curl -X GET '{OW}/data/2.5/forecast?q=tokyo&appid={{API_KEY}}&cnt=5&units=metric'"),
        ("How is the air quality at lat 51.5, lon -0.12?",
         f"curl -X GET '{OW}/data/2.5/air_pollution?lat=51.5&lon=-0.12&appid={{API_KEY}}'"),
        ("Find the coordinates of Paris, at most 1 result.",
         f"curl -X GET '{OW}/geo/1.0/direct?q=paris&limit=1&appid={{API_KEY}}'"),
        ("Current weather in San Francisco in imperial units.",
         f"curl -X GET '{OW}/data/2.5/weather?q=san+francisco&appid={{API_KEY}}&units=imperial'"),
    ]
    demos = [
        ("Current weather in Rome in Italian.", f"curl -X GET '{OW}/data/2.5/weather?q=rome&appid={{API_KEY}}&lang=it'"),
        ("Air quality at latitude 40.71 and longitude -74.0.", f"curl -X GET '{OW}/data/2.5/air_pollution?lat=40.71&lon=-74.0&appid={{API_KEY}}'"),
        ("Forecast for Madrid with 3 entries.", f"curl -X GET '{OW}/data/2.5/forecast?q=madrid&appid={{API_KEY}}&cnt=3'"),
        ("Weather for zip 10001 in the US.", f"curl -X GET '{OW}/data/2.5/weather?zip=10001,us&appid={{API_KEY}}'"),
    ]
    routes = []
    for _, curl in cases + demos:
        routes.append({"request": curl, "response": _ow_response("ow", curl.split("?")[1].replace("{API_KEY}", ""))})
    # neighbours of the gold requests so near misses execute but answer differently
    routes.append({"request": f"curl -X GET '{OW}/data/2.5/weather?q=palo+alto&appid={{API_KEY}}&lang=en&units=metric'",
                   "response": _ow_response("ow", "palo alto metric")})
    routes.append({"request": f"curl -X GET '{OW}/data/2.5/weather?q=berlin&appid={{API_KEY}}'",
                   "response": _ow_response("ow", "berlin default")})
    tests, golds = [], {}
    for i, (goal, curl) in enumerate(cases):
        tid = f"ow-{i:02d}"
        tests.append({"id": tid, "goal_text": goal, "gold_programs": [curl]})
        golds[tid] = curl
    spec = {
        "tool_id": "open_weather",
        "mode": "single_step",
        "env_binding": "rest",
        "gen_config": {"max_new_tokens": 128, "stop_sequences": ["Task:"], "num_retrieved_docs": "all", "num_demos": 3},
        "api_functions": ow_functions(),
        "demos": [{"goal_text": g, "program": p} for g, p in demos],
        "tests": tests,
    }
    env = {"kind": "rest", "api_key": "MOCK_OPENWEATHER_KEY", "routes": routes}
    write_suite("open_weather", spec, env, golds)


CAT = "https://api.thecatapi.com/v1"
KEY_HEADER = "-H 'x-api-key: {API_KEY}'"


def build_cat_api() -> None:
    def rest(name, curl, doc):
        return {"name": name, "params": [], "doc_text": f"# {doc}\n{curl}"}

    functions = [
        rest("add_favourite", f"curl -X POST '{CAT}/favourites' {KEY_HEADER} -H 'Content-Type: application/json' --data '{{\"image_id\":\"{{image_id}}\"}}'",
             "Add an image to my favourites."),
        rest("list_favourites", f"curl -X GET '{CAT}/favourites' {KEY_HEADER}", "List my favourite images."),
        rest("delete_favourite", f"curl -X DELETE '{CAT}/favourites/{{favourite_id}}' {KEY_HEADER}",
             "Remove a favourite by its favourite id."),
        rest("vote", f"curl -X POST '{CAT}/votes' {KEY_HEADER} -H 'Content-Type: application/json' --data '{{\"image_id\":\"{{image_id}}\",\"value\":{{1 or -1}}}}'",
             "Vote an image up (1) or down (-1)."),
        rest("search_images", f"curl -X GET '{CAT}/images/search?limit={{limit}}[&breed_ids={{breed}}][&mime_types={{types}}]' {KEY_HEADER}",
             "Search cat images."),
        rest("list_breeds", f"curl -X GET '{CAT}/breeds?limit={{limit}}' {KEY_HEADER}", "List cat breeds."),
    ]
    H = f"{KEY_HEADER} -H 'Content-Type: application/json'"
    cases = [
        ("Add the cat photo with id=MTUyNTA1OA to my list of favorites.",
         f"curl -X POST '{CAT}/favourites' {H} --data '{{\"image_id\":\"MTUyNTA1OA\"}}'", "execute_and_compare"),
        ("Show me my favourite cat images.", f"curl -X GET '{CAT}/favourites' {KEY_HEADER}", "execute_and_compare"),
        ("Remove favourite 232418 from my list.", f"curl -X DELETE '{CAT}/favourites/232418' {KEY_HEADER}", "verbatim"),
        ("Vote up the image with id 9ccXTANkb.",
         f"curl -X POST '{CAT}/votes' {H} --data '{{\"image_id\":\"9ccXTANkb\",\"value\":1}}'", "execute_and_compare"),
        ("Find 3 Bengal cat pictures.", f"curl -X GET '{CAT}/images/search?limit=3&breed_ids=beng' {KEY_HEADER}", "execute_and_compare"),
        ("List 5 cat breeds.", f"curl -X GET '{CAT}/breeds?limit=5' {KEY_HEADER}", "execute_and_compare"),
        ("Delete favourite number 1024.", f"curl -X DELETE '{CAT}/favourites/1024' {KEY_HEADER}", "verbatim"),
    ]
    demos = [
        ("Add image abc123 to my favourites.", f"curl -X POST '{CAT}/favourites' {H} --data '{{\"image_id\":\"abc123\"}}'"),
        ("Remove favourite 777.", f"curl -X DELETE '{CAT}/favourites/777' {KEY_HEADER}"),
        ("Vote down image xyz.", f"curl -X POST '{CAT}/votes' {H} --data '{{\"image_id\":\"xyz\",\"value\":-1}}'"),
        ("Search for 2 gif cat images.", f"curl -X GET '{CAT}/images/search?limit=2&mime_types=gif' {KEY_HEADER}"),
    ]
    routes = []
    for i, (_, curl, mode) in enumerate(cases):
        if mode == "execute_and_compare":
            routes.append({"request": curl, "response": json.dumps({"ok": True, "case": i})})
    routes.append({"request": f"curl -X GET '{CAT}/breeds?limit=10' {KEY_HEADER}", "response": json.dumps({"ok": True, "breeds": 10})})
    routes.append({"request": f"curl -X GET '{CAT}/images/search?limit=3' {KEY_HEADER}", "response": json.dumps({"ok": True, "any": 3})})
    tests, golds = [], {}
    for i, (goal, curl, mode) in enumerate(cases):
        tid = f"cat-{i:02d}"
        tests.append({"id": tid, "goal_text": goal, "gold_programs": [curl], "compare_mode": mode})
        golds[tid] = curl
    spec = {
        "tool_id": "cat_api",
        "mode": "single_step",
        "env_binding": "rest",
        "gen_config": {"max_new_tokens": 128, "stop_sequences": ["Task:"], "num_retrieved_docs": "all", "num_demos": 3},
        "api_functions": functions,
        "demos": [{"goal_text": g, "program": p} for g, p in demos],
        "tests": tests,
    }
    env = {"kind": "rest", "api_key": "MOCK_CAT_KEY", "routes": routes}
    write_suite("cat_api", spec, env, golds)


# -- toy multi-step counter ---------------------------------------------------


def build_counter() -> None:
    spec = {
        "tool_id": "counter",
        "mode": "multi_step",
        "env_binding": "counter",
        "gen_config": {"max_new_tokens": 32, "stop_sequences": ["Task:"], "num_retrieved_docs": "all",
                       "num_demos": 1, "max_steps": 25},
        "api_functions": [
            fn("inc", [], "Add one to the counter.", receiver=None),
            fn("dec", [], "Subtract one from the counter.", receiver=None),
            fn("finish", [], "End the episode.", receiver=None),
        ],
        "demos": [{"goal_text": "Count to one, then stop.", "program": "inc()\nfinish()"}],
        "tests": [
            {"id": "count-2", "goal_text": "Count to two, then stop.", "gold_programs": ["inc()\ninc()\nfinish()"]},
        ],
    }
    tool_spec_from_json(spec)
    dump(ROOT / "counter.json", spec)
    dump(ROOT / "counter.env.json", {"kind": "counter"})


# -- complexity worked example ------------------------------------------------


def build_complexity() -> None:
    fns = [fn(f"a{i}", [], f"Function a{i}.", receiver=None) for i in range(1, 11)]
    worked = {
        "tool_id": "complexity_worked",
        "env_binding": "",
        "api_functions": fns,
        "demos": [{"goal_text": "example", "program": "a1()\na2()\na3()\na4()"}],
        "tests": [{"id": "t", "goal_text": "test", "gold_programs": ["a1()\na2()\na6()\na4()\na5()"]}],
    }
    covered = {
        "tool_id": "complexity_covered",
        "env_binding": "",
        "api_functions": fns,
        "demos": [{"goal_text": "one", "program": "a1()\na2()"}, {"goal_text": "two", "program": "a3()\na3()\na5()"}],
        "tests": [
            {"id": "t1", "goal_text": "x", "gold_programs": ["a2()\na1()"]},
            {"id": "t2", "goal_text": "y", "gold_programs": ["a5()\na3()\na3()"]},
        ],
    }
    for name, doc in (("complexity_worked", worked), ("complexity_covered", covered)):
        tool_spec_from_json(doc)
        dump(ROOT / f"{name}.json", doc)


# -- three-doc robot tool -----------------------------------------------------


def build_robot() -> None:
    spec = {
        "tool_id": "robot",
        "env_binding": "",
        "api_functions": [
            {"name": "move_to", "params": [{"name": "x"}, {"name": "y"}],
             "doc_text": "# To move the robot to position (x, y)\nrobot.move_to(x, y)"},
            {"name": "raise_arm", "params": [{"name": "height"}],
             "doc_text": "# To raise the arm by a given height\nrobot.raise_arm(height)"},
            {"name": "grab", "params": [],
             "doc_text": "# To close the gripper on an object\nrobot.grab()"},
        ],
        "demos": [{"goal_text": "how to lift the arm by 5?", "program": "robot.raise_arm(5)"}],
        "tests": [{"id": "robot-0", "goal_text": "how to move a robot to (20, 30)?",
                   "gold_programs": ["robot.move_to(20, 30)"]}],
    }
    tool_spec_from_json(spec)
    dump(ROOT / "robot.json", spec)


# -- alignment-data templates ------------------------------------------------

LANGS = [("English", "en"), ("German", "de"), ("French", "fr"), ("Spanish", "es"), ("Italian", "it"), ("Japanese", "ja")]
UNITS = ["imperial", "metric", "standard"]
OW_CITIES = ["Palo Alto", "San Jose", "Paris", "Berlin", "Tokyo", "Seoul", "Lima", "Cairo", "Oslo", "Austin"]


def _fmt_city(c: str) -> str:
    return c.lower().replace(" ", "+")


def ow_templates() -> list[dict]:
    rng = random.Random(90)
    city_records = [{"city": c, "city_formatted": _fmt_city(c), "lang": l, "lang_abbr": a, "units": u}
                    for c in OW_CITIES for (l, a) in LANGS[:3] for u in UNITS[:2]]
    coord_records = [{"lat": round(rng.uniform(-60, 60), 2), "lon": round(rng.uniform(-170, 170), 2),
                      "units": rng.choice(UNITS)} for _ in range(12)]
    zip_records = [{"zip": z, "country": "us", "units": u} for z in ("94301", "10001", "60601", "73301") for u in UNITS]
    fc_records = [{"city": c, "city_formatted": _fmt_city(c), "count": n} for c in OW_CITIES for n in (3, 5, 8)]
    geo_records = [{"city": c, "city_formatted": _fmt_city(c), "limit": n} for c in OW_CITIES for n in (1, 3)]
    cats = [
        (["What is the present weather situation in {city}? Please respond in {lang} and use {units} units.",
          "Tell me the current weather in {city}, in {lang}, with {units} units.",
          "How is the weather in {city} right now? Use {units} units and answer in {lang}."],
         f"curl -X GET '{OW}/data/2.5/weather?q={{city_formatted}}&appid={{API_KEY}}&lang={{lang_abbr}}&units={{units}}'",
         city_records),
        (["What's the weather in {city} today?", "Current conditions in {city}, please.", "Is it raining in {city}?"],
         f"curl -X GET '{OW}/data/2.5/weather?q={{city_formatted}}&appid={{API_KEY}}'", city_records),
        (["Weather at latitude {lat} and longitude {lon} in {units} units.", "Conditions at ({lat}, {lon}), {units} units."],
         f"curl -X GET '{OW}/data/2.5/weather?lat={{lat}}&lon={{lon}}&appid={{API_KEY}}&units={{units}}'", coord_records),
        (["Weather for zip code {zip} in {country} using {units} units.", "What's the weather at zip {zip}, {country}? {units} units."],
         f"curl -X GET '{OW}/data/2.5/weather?zip={{zip}},{{country}}&appid={{API_KEY}}&units={{units}}'", zip_records),
        (["Forecast for {city}, {count} entries.", "Give me the next {count} forecast points for {city}."],
         f"curl -X GET '{OW}/data/2.5/forecast?q={{city_formatted}}&appid={{API_KEY}}&cnt={{count}}'", fc_records),
        (["Forecast for {city} in {lang}.", "What will the weather be in {city}? Reply in {lang}."],
         f"curl -X GET '{OW}/data/2.5/forecast?q={{city_formatted}}&appid={{API_KEY}}&lang={{lang_abbr}}'", city_records),
        (["Air quality at latitude {lat} and longitude {lon}.", "How polluted is the air at ({lat}, {lon})?"],
         f"curl -X GET '{OW}/data/2.5/air_pollution?lat={{lat}}&lon={{lon}}&appid={{API_KEY}}'", coord_records),
        (["Air pollution forecast at ({lat}, {lon}).", "Predict air quality at latitude {lat}, longitude {lon}."],
         f"curl -X GET '{OW}/data/2.5/air_pollution/forecast?lat={{lat}}&lon={{lon}}&appid={{API_KEY}}'", coord_records),
        (["Coordinates of {city}, at most {limit} results.", "Where is {city}? Return up to {limit} matches."],
         f"curl -X GET '{OW}/geo/1.0/direct?q={{city_formatted}}&limit={{limit}}&appid={{API_KEY}}'", geo_records),
    ]
    openers = ["", "Hi! ", "Quick question: ", "Please help. ", "Hey, ", "I need this: ", "Could you check? ",
               "For my trip: ", "Urgent: ", "One more: "]
    out = []
    for goals, action, records in cats:
        for k in range(10):  # 9 categories x 10 phrasings
            goal = openers[k] + goals[k % len(goals)]
            out.append({"goal_template": goal, "action_template": action, "value_records": records})
    return out


def cat_templates() -> list[dict]:
    ids = ["MTUyNTA1OA", "9ccXTANkb", "abc123", "0XYvRd7oD", "bpc", "e49", "MTgwNjU3Nw", "4lm"]
    fav_ids = [{"favourite_id": n} for n in (232418, 1024, 777, 3151, 88)]
    H = f"{KEY_HEADER} -H 'Content-Type: application/json'"
    cats = [
        (["Add the cat photo with id={image_id} to my list of favorites.", "Favourite image {image_id}.",
          "Save cat picture {image_id} to my favourites."],
         f"curl -X POST '{CAT}/favourites' {H} --data '{{\"image_id\":\"{{image_id}}\"}}'",
         [{"image_id": i} for i in ids]),
        (["Show me my favourites.", "List all my favourite cats.", "What did I favourite?"],
         f"curl -X GET '{CAT}/favourites' {KEY_HEADER}", [{}]),
        (["Remove favourite {favourite_id}.", "Delete favourite number {favourite_id} from my list."],
         f"curl -X DELETE '{CAT}/favourites/{{favourite_id}}' {KEY_HEADER}", fav_ids),
        (["Vote up image {image_id}.", "I like image {image_id}, upvote it."],
         f"curl -X POST '{CAT}/votes' {H} --data '{{\"image_id\":\"{{image_id}}\",\"value\":1}}'",
         [{"image_id": i} for i in ids]),
        (["Vote down image {image_id}.", "Downvote cat picture {image_id}."],
         f"curl -X POST '{CAT}/votes' {H} --data '{{\"image_id\":\"{{image_id}}\",\"value\":-1}}'",
         [{"image_id": i} for i in ids]),
        (["Find {limit} cat pictures.", "Search for {limit} cat images."],
         f"curl -X GET '{CAT}/images/search?limit={{limit}}' {KEY_HEADER}", [{"limit": n} for n in (1, 3, 5, 10)]),
    ]
    per_cat = [7, 7, 7, 7, 6, 6]
    openers = ["", "Please: ", "Hey, ", "Quick: ", "Now ", "Could you ", "Go ahead and "]
    out = []
    for (goals, action, records), n in zip(cats, per_cat):
        for k in range(n):
            out.append({"goal_template": openers[k] + goals[k % len(goals)], "action_template": action,
                        "value_records": records})
    return out


def home_templates() -> list[dict]:
    names = list(HOME_CRITERIA)
    placeholders = {n: n.replace("set_", "") for n in names}
    rng = random.Random(100)
    combos = []
    for k in (1, 2, 3):
        combos += [c for c in itertools.combinations(names, k)]
    rng.shuffle(combos)
    combos = sorted(combos[:100], key=lambda c: (len(c), c))
    out = []
    for combo in combos:
        mode = "buy" if len(out) % 2 == 0 else "rent"
        verb = "for sale" if mode == "buy" else "for rent"
        phrases = [HOME_CRITERIA[n][1].format("{" + placeholders[n] + "}") for n in combo]
        goal = f"Looking for homes {verb} in {{location}} with " + ", ".join(phrases) + "."
        lines = ["API.set_location({location})", f'API.set_buy_or_rent("{mode}")']
        lines += [f"API.{n}({{{placeholders[n]}}})" for n in combo]
        lines.append("API.search()")
        records = []
        for _ in range(8):
            rec = {"location": rng.choice(CITIES)}
            for n in combo:
                rec[placeholders[n]] = HOME_CRITERIA[n][2](rng)
            records.append(rec)
        out.append({"goal_template": goal, "action_template": "\n".join(lines), "value_records": records})
    assert len(out) == 100
    return out


def trip_templates() -> list[dict]:
    rng = random.Random(30)
    out = []
    ticket_goals = [
        "Search for {means_of_transportation} tickets for {num_adults} adults from {location_from} to {location_to}, on {departure_date}.",
        "I need {num_adults} {means_of_transportation} tickets from {location_from} to {location_to} leaving {departure_date}.",
    ]
    ticket_action = "\n".join([
        'API.select_booking_type("trip tickets")',
        "API.select_transportation({means_of_transportation})",
        "API.set_num_adults({num_adults})",
        "API.set_origin(Loc({location_from}))",
        "API.set_destination(Loc({location_to}))",
        "date = Date({departure_date})",
        "API.set_departure_date(date)",
        "API.search()",
    ])
    hotel_goals = [
        "Book a hotel in {city} from {checkin} to {checkout} for {num_rooms} rooms.",
        "Find {num_rooms} hotel rooms in {city}, checking in {checkin} and out {checkout}.",
    ]
    hotel_action = "\n".join([
        'API.select_booking_type("hotel")',
        "API.set_hotel_location(Loc({city}))",
        "API.set_checkin_date(Date({checkin}))",
        "API.set_checkout_date(Date({checkout}))",
        "API.set_num_rooms({num_rooms})",
        "API.search()",
    ])
    both_goals = ["Book {means_of_transportation} tickets from {location_from} to {location_to} on {departure_date} and a hotel there until {checkout}."]
    both_action = "\n".join([
        'API.select_booking_type("both")',
        "API.select_transportation({means_of_transportation})",
        "API.set_origin(Loc({location_from}))",
        "API.set_destination(Loc({location_to}))",
        "API.set_departure_date(Date({departure_date}))",
        "API.set_hotel_location(Loc({location_to}))",
        "API.set_checkin_date(Date({departure_date}))",
        "API.set_checkout_date(Date({checkout}))",
        "API.search()",
    ])

    def records(n=6):
        recs = []
        for _ in range(n):
            a, b = rng.sample(TRIP_CITIES, 2)
            d = rng.randint(1, 20)
            m = rng.randint(1, 12)
            recs.append({"means_of_transportation": rng.choice(TRANSPORT), "num_adults": rng.randint(1, 4),
                         "location_from": a, "location_to": b, "departure_date": f"2023-{m:02d}-{d:02d}",
                         "city": b, "checkin": f"2023-{m:02d}-{d:02d}", "checkout": f"2023-{m:02d}-{d + 3:02d}",
                         "num_rooms": rng.randint(1, 3), "max_price_ticket": rng.choice(range(100, 500, 50))})
        return recs

    prefixes = ["", "Please ", "Hi, ", "Help me: ", "Quick: ", "Next: "]
    for p in prefixes:
        for g in ticket_goals:
            out.append({"goal_template": p + g, "action_template": ticket_action, "value_records": records()})
        for g in hotel_goals:
            out.append({"goal_template": p + g, "action_template": hotel_action, "value_records": records()})
        for g in both_goals:
            out.append({"goal_template": p + g, "action_template": both_action, "value_records": records()})
    out = out[:30]
    assert len(out) == 30
    return out


def build_templates() -> None:
    sets = [("open_weather", ow_templates(), 20), ("cat_api", cat_templates(), 45),
            ("home_search", home_templates(), 18), ("trip_booking", trip_templates(), 60)]
    for task, templates, repeat in sets:
        dump(ROOT / "templates" / f"{task}.json", {"task": task, "repeat": repeat, "templates": templates})


def main() -> None:
    build_home_search()
    build_trip_booking()
    build_virtualhome()
    build_open_weather()
    build_cat_api()
    build_counter()
    build_complexity()
    build_robot()
    build_templates()
    for p in sorted(ROOT.rglob("*")):
        if p.is_file():
            print(p.relative_to(ROOT.parent))


if __name__ == "__main__":
    main()
