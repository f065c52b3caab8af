"""JSON experiment configuration.

Probabilities and scores are written as decimal or ``p/q`` strings and read
exactly.  Schema::

    {
      "blocklength": 3,
      "alphabets": {"x": 2, "y": 2},
      "prior":   {"type": "iid", "probs": ["1/2", "1/2"]}
               | {"type": "uniform_set", "support": [[0, 0, 1], ...]}
               | {"type": "table", "masses": [{"x": [0, 0, 1], "mass": "1/2"}, ...]},
      "channel": {"type": "dmc", "matrix": [["0.9", "0.1"], ["0.1", "0.9"]]}
               | {"type": "fsc", "next_state": [[[0, 1], ...]], "emissions": [[["0.9", "0.1"], ...]],
                  "initial_state": 0},
      "family":  [metric, ...]
               | {"type": "dmc_grid", "matrices": [matrix, ...]}
               | {"type": "fsm_sampled", "states": 2, "samples": 8, "seed": 1}
               | {"type": "degenerate_fsm", "pairs": [[x, y], ...]}    (pairs optional)
      metric:    {"type": "table", "values": [[...]]}            values[rank x][rank y]
               | {"type": "likelihood", "matrix": matrix}
               | {"type": "fsm", "states": S, "g": [[[...]]], "q": [[[...]]], "s0": 0}
               | {"type": "markov", "order": k, "windows": {"0,0;1,1": "1"}, "default": "0"}
               | {"type": "hamming"} | {"type": "constant", "value": "0"}
      "rate": "1/3", "mode": "exact" | "mc", "trials": 10000, "seeds": [0],
      "enumeration_cap": 1048576, "tie_break": "error" | "random"
    }

Markov window keys list pairs oldest first as ``"x,y"`` separated by ``;``,
with ``-`` for a slot before the start of the sequence.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

from ._util import DEFAULT_CAP, to_fraction
from .channels import DMC, FiniteStateChannel
from .families import build_dmc_family, build_fsm_family, degenerate_fsm_family
from .metrics import (
    BOUNDARY, ChannelLikelihood, ConstantMetric, FiniteStateMetric, MarkovWindowMetric,
    MetricFamily, TableMetric, hamming_metric,
)
from .priors import ExplicitTable, IIDPrior, UniformOverSet


class ConfigError(ValueError):
    """Schema violation; ``field`` is the dotted path of the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


@dataclass
class ExperimentConfig:
    n: int
    x_size: int
    y_size: int
    prior: object
    channel: object
    family: MetricFamily
    rate: Fraction
    mode: str = "exact"
    trials: int = 10000
    seeds: list = field(default_factory=lambda: [0])
    enumeration_cap: int = DEFAULT_CAP
    tie_break: str = "error"
    raw: dict = field(default_factory=dict)

    @property
    def config_hash(self):
        return config_hash(self.raw)


def config_hash(raw):
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _need(d, key, where):
    if not isinstance(d, dict):
        raise ConfigError(where, "expected an object")
    if key not in d:
        raise ConfigError(f"{where}.{key}" if where else key, "missing required field")
    return d[key]


def _frac(v, where):
    try:
        return to_fraction(v)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(where, f"not an exact number: {v!r} ({exc})") from None


def _int(v, where, minimum=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(where, f"expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(where, f"must be at least {minimum}")
    return v


def _matrix(m, where):
    if not isinstance(m, list) or not all(isinstance(r, list) for r in m):
        raise ConfigError(where, "expected a list of rows")
    return [[_frac(v, f"{where}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(m)]


def _wrap(where, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConfigError:
        raise
    except (ValueError, TypeError, IndexError) as exc:
        raise ConfigError(where, str(exc)) from None


def parse_prior(d, n, x_size, where="prior"):
    kind = _need(d, "type", where)
    if kind == "iid":
        probs = [_frac(p, f"{where}.probs[{i}]") for i, p in enumerate(_need(d, "probs", where))]
        if len(probs) != x_size:
            raise ConfigError(f"{where}.probs", f"expected {x_size} entries")
        if sum(probs) != 1:
            raise ConfigError(f"{where}.probs", f"probabilities sum to {sum(probs)}, not 1")
        return _wrap(f"{where}.probs", IIDPrior, probs, n)
    if kind == "uniform_set":
        return _wrap(f"{where}.support", UniformOverSet, _need(d, "support", where), x_size, n)
    if kind == "table":
        masses = {}
        for i, item in enumerate(_need(d, "masses", where)):
            masses[tuple(_need(item, "x", f"{where}.masses[{i}]"))] = _frac(
                _need(item, "mass", f"{where}.masses[{i}]"), f"{where}.masses[{i}].mass")
        total = sum(masses.values())
        if total != 1:
            raise ConfigError(f"{where}.masses", f"masses sum to {total}, not 1")
        return _wrap(f"{where}.masses", ExplicitTable, masses, x_size, n)
    raise ConfigError(f"{where}.type", f"unknown prior type {kind!r}")


def parse_channel(d, where="channel"):
    kind = _need(d, "type", where)
    if kind == "dmc":
        return _wrap(f"{where}.matrix", DMC, _matrix(_need(d, "matrix", where), f"{where}.matrix"))
    if kind == "fsc":
        em = _need(d, "emissions", where)
        emissions = [_matrix(m, f"{where}.emissions[{s}]") for s, m in enumerate(em)]
        return _wrap(where, FiniteStateChannel, _need(d, "next_state", where), emissions,
                     d.get("initial_state", 0))
    raise ConfigError(f"{where}.type", f"unknown channel type {kind!r}")


def _window(key, where):
    pairs = []
    for part in key.split(";"):
        part = part.strip()
        if part == "-":
            pairs.append(BOUNDARY)
            continue
        try:
            a, b = (int(v) for v in part.split(","))
        except ValueError:
            raise ConfigError(where, f"bad window key {key!r}") from None
        pairs.append((a, b))
    return tuple(pairs)


def parse_metric(d, x_size, y_size, where):
    kind = _need(d, "type", where)
    label = d.get("label")
    if kind == "table":
        vals = [[_frac(v, f"{where}.values[{i}][{j}]") for j, v in enumerate(r)]
                for i, r in enumerate(_need(d, "values", where))]
        vals = [[int(v) if v.denominator == 1 else v for v in r] for r in vals]
        return _wrap(where, TableMetric, vals, x_size, y_size, label=label)
    if kind == "likelihood":
        return ChannelLikelihood(_wrap(where, DMC, _matrix(_need(d, "matrix", where), f"{where}.matrix")),
                                 label=label)
    if kind == "fsm":
        q = _need(d, "q", where)
        qv = [[[_frac(v, f"{where}.q") for v in r] for r in per_s] for per_s in q]
        qv = [[[int(v) if v.denominator == 1 else v for v in r] for r in per_s] for per_s in qv]
        m = _wrap(where, FiniteStateMetric, _need(d, "g", where), qv, d.get("s0", 0), label=label)
        if "states" in d and d["states"] != m.num_states:
            raise ConfigError(f"{where}.states", "does not match the g table")
        return m
    if kind == "markov":
        order = _int(_need(d, "order", where), f"{where}.order", 0)
        table = {_window(k, f"{where}.windows"): _frac(v, f"{where}.windows[{k!r}]")
                 for k, v in d.get("windows", {}).items()}
        default = _frac(d.get("default", 0), f"{where}.default")

        def score(window, table=table, default=default):
            v = table.get(window, default)
            return int(v) if v.denominator == 1 else v

        return _wrap(where, MarkovWindowMetric, order, score, x_size, y_size, label=label)
    if kind == "hamming":
        return hamming_metric(x_size, y_size, label=label or "-hamming")
    if kind == "constant":
        v = _frac(d.get("value", 0), f"{where}.value")
        return ConstantMetric(int(v) if v.denominator == 1 else v, x_size, y_size)
    raise ConfigError(f"{where}.type", f"unknown metric type {kind!r}")


def parse_family(d, n, x_size, y_size, where="family"):
    if isinstance(d, list):
        if not d:
            raise ConfigError(where, "family must have at least one member")
        members = [parse_metric(m, x_size, y_size, f"{where}[{i}]") for i, m in enumerate(d)]
        return MetricFamily(tuple(members))
    kind = _need(d, "type", where)
    if kind == "dmc_grid":
        mats = [_matrix(m, f"{where}.matrices[{i}]") for i, m in enumerate(_need(d, "matrices", where))]
        return _wrap(where, build_dmc_family, mats)
    if kind == "fsm_sampled":
        fam, _ = _wrap(where, build_fsm_family, _int(_need(d, "states", where), f"{where}.states", 1),
                       x_size, y_size, n, samples=d.get("samples"), seed=d.get("seed", 0))
        return fam
    if kind == "degenerate_fsm":
        return _wrap(where, degenerate_fsm_family, n, x_size, y_size, d.get("pairs"))
    raise ConfigError(f"{where}.type", f"unknown family type {kind!r}")


def parse_config(raw, blocklength=None, mode=None):
    """Build an :class:`ExperimentConfig` from a decoded JSON object."""
    if not isinstance(raw, dict):
        raise ConfigError("", "top level must be an object")
    n = _int(blocklength if blocklength is not None else _need(raw, "blocklength", ""), "blocklength", 1)
    al = _need(raw, "alphabets", "")
    x_size = _int(_need(al, "x", "alphabets"), "alphabets.x", 1)
    y_size = _int(_need(al, "y", "alphabets"), "alphabets.y", 1)
    prior = parse_prior(_need(raw, "prior", ""), n, x_size)
    channel = parse_channel(raw["channel"]) if "channel" in raw else None
    if channel is not None and (channel.input_size, channel.output_size) != (x_size, y_size):
        raise ConfigError("channel", "channel alphabets do not match 'alphabets'")
    family = parse_family(_need(raw, "family", ""), n, x_size, y_size)
    rate = _frac(raw.get("rate", 0), "rate")
    mode = mode or raw.get("mode", "exact")
    if mode not in ("exact", "mc"):
        raise ConfigError("mode", "must be 'exact' or 'mc'")
    trials = _int(raw.get("trials", 10000), "trials", 1)
    seeds = raw.get("seeds", [0])
    if not isinstance(seeds, list) or not seeds:
        raise ConfigError("seeds", "expected a nonempty list of integers")
    seeds = [_int(s, f"seeds[{i}]", 0) for i, s in enumerate(seeds)]
    cap = _int(raw.get("enumeration_cap", DEFAULT_CAP), "enumeration_cap", 1)
    tie = raw.get("tie_break", "error")
    if tie not in ("error", "random"):
        raise ConfigError("tie_break", "must be 'error' or 'random'")
    stored = dict(raw)
    if blocklength is not None:
        stored["blocklength"] = n
    stored["mode"] = mode
    return ExperimentConfig(n, x_size, y_size, prior, channel, family, rate, mode, trials, seeds,
                            cap, tie, stored)


def load_config(path, blocklength=None, mode=None):
    """Read and validate a JSON config file; syntax errors report line and column."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("", f"cannot read {path}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(raw, blocklength, mode)


def parse_rate_function(cfg, d=None, where="rate_function"):
    """Rate function for the ``ratefn`` suite.

    ``{"type": "exponents", "values": [n R(x) in rank order]}`` (integers or
    ``"-inf"``), ``{"type": "likelihood_ratio", "prior": prior}``, or by
    default the likelihood ratio of the uniform distribution to the prior.
    """
    from .priors import uniform_prior
    from .ratefn import RateFunction, likelihood_ratio_rate_function

    d = d if d is not None else cfg.raw.get(where)
    if d is None:
        return _wrap(where, likelihood_ratio_rate_function, cfg.prior,
                     uniform_prior(cfg.x_size, cfg.n), cfg.enumeration_cap)
    kind = _need(d, "type", where)
    if kind == "exponents":
        vals = []
        for i, v in enumerate(_need(d, "values", where)):
            if v in ("-inf", "inf"):
                vals.append(float(v))
            else:
                vals.append(_int(v, f"{where}.values[{i}]"))
        if len(vals) != cfg.x_size ** cfg.n:
            raise ConfigError(f"{where}.values", f"expected {cfg.x_size ** cfg.n} entries")
        return RateFunction.from_exponents(cfg.n, vals)
    if kind == "likelihood_ratio":
        P = parse_prior(_need(d, "prior", where), cfg.n, cfg.x_size, f"{where}.prior")
        return _wrap(where, likelihood_ratio_rate_function, cfg.prior, P, cfg.enumeration_cap)
    raise ConfigError(f"{where}.type", f"unknown rate function type {kind!r}")
