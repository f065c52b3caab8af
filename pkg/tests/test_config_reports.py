import json
import math
from fractions import Fraction

import numpy as np
import pytest

from univdec import OFF_SUPPORT, metric_eval
from univdec.config import ConfigError, parse_config, parse_rate_function
from univdec.reports import encode_prob, parse_number, to_jsonable

BASE = {
    "blocklength": 2,
    "alphabets": {"x": 2, "y": 2},
    "prior": {"type": "iid", "probs": ["0.3", "0.7"]},
    "channel": {"type": "dmc", "matrix": [["0.9", "0.1"], ["0.1", "0.9"]]},
    "family": [{"type": "hamming"}],
    "rate": "1/2",
}


def cfg(**changes):
    raw = json.loads(json.dumps(BASE))
    raw.update(changes)
    return parse_config(raw)


def test_probabilities_are_exact():
    c = cfg()
    assert c.prior.mass((1, 1)) == Fraction(49, 100)
    assert c.channel.likelihood((0, 0), (0, 1)) == Fraction(9, 100)
    assert c.rate == Fraction(1, 2)


def test_prior_types():
    c = cfg(prior={"type": "uniform_set", "support": [[0, 0], [1, 1]]})
    assert c.prior.mass((1, 1)) == Fraction(1, 2)
    c = cfg(prior={"type": "table", "masses": [{"x": [0, 1], "mass": "1/3"}, {"x": [1, 0], "mass": "2/3"}]})
    assert c.prior.mass((0, 0)) == 0


def test_fsc_channel():
    c = cfg(channel={"type": "fsc", "next_state": [[[0, 1], [1, 0]], [[0, 1], [1, 0]]],
                     "emissions": [[["0.9", "0.1"], ["0.1", "0.9"]], [["0.6", "0.4"], ["0.4", "0.6"]]]})
    assert c.channel.num_states == 2


def test_metric_types():
    fam = [
        {"type": "table", "values": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]},
        {"type": "likelihood", "matrix": [["0.8", "0.2"], ["0.3", "0.7"]]},
        {"type": "fsm", "states": 1, "g": [[[0, 0], [0, 0]]], "q": [[["1/2", 0], [0, 1]]], "s0": 0},
        {"type": "markov", "order": 1, "windows": {"-;0,0": "2", "0,0;0,0": "1"}, "default": 0},
        {"type": "constant", "value": "3"},
        {"type": "hamming", "label": "h"},
    ]
    c = cfg(family=fam)
    assert len(c.family) == 6
    assert metric_eval(c.family[2], (0, 1), (0, 1)) == Fraction(3, 2)
    assert metric_eval(c.family[3], (0, 0), (0, 0)) == 3


def test_family_generators():
    c = cfg(family={"type": "fsm_sampled", "states": 2, "samples": 3, "seed": 1})
    assert len(c.family) == 3
    c = cfg(family={"type": "degenerate_fsm", "pairs": [[[0, 1], [1, 1]]]})
    assert len(c.family) == 1
    c = cfg(family={"type": "dmc_grid", "matrices": [[["0.9", "0.1"], ["0.1", "0.9"]]]})
    assert len(c.family) == 1


@pytest.mark.parametrize("change, field", [
    ({"prior": {"type": "iid", "probs": ["0.5", "0.4"]}}, "prior.probs"),
    ({"prior": {"type": "iid", "probs": ["x", "0.4"]}}, "prior.probs[0]"),
    ({"channel": {"type": "dmc", "matrix": [["0.5", "0.4"], ["0.5", "0.5"]]}}, "channel.matrix"),
    ({"family": []}, "family"),
    ({"family": [{"type": "fsm"}]}, "family[0].q"),
    ({"mode": "fast"}, "mode"),
    ({"tie_break": "coin"}, "tie_break"),
    ({"blocklength": 0}, "blocklength"),
    ({"seeds": []}, "seeds"),
])
def test_errors_name_field(change, field):
    with pytest.raises(ConfigError) as exc:
        cfg(**change)
    assert exc.value.field == field


def test_missing_alphabets():
    raw = dict(BASE)
    del raw["alphabets"]
    with pytest.raises(ConfigError) as exc:
        parse_config(raw)
    assert exc.value.field == "alphabets"


def test_rate_function_parsing():
    c = cfg()
    R = parse_rate_function(c)
    assert len(R) == 4
    R = parse_rate_function(c, {"type": "exponents", "values": [0, 1, "-inf", 2]})
    assert R.values()[2] == -math.inf
    with pytest.raises(ConfigError):
        parse_rate_function(c, {"type": "exponents", "values": [0, 1]})


def test_config_hash_stable():
    assert cfg().config_hash == cfg().config_hash
    assert cfg().config_hash != cfg(rate="1/4").config_hash


def test_json_encoding():
    assert encode_prob(Fraction(3, 8)) == "3/8"
    assert encode_prob(-2.5, log2=True) == "2^-2.5"
    assert parse_number("2^-1.0") == 0.5
    assert parse_number("3/4") == 0.75
    obj = to_jsonable({"a": np.int64(3), "b": [Fraction(1, 2), OFF_SUPPORT, -0.0, math.inf]})
    assert obj == {"a": 3, "b": ["1/2", "off-support", 0.0, "inf"]}
