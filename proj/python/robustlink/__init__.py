"""Robust rate adaptation and proportional fair scheduling with imperfect CSI."""

import json as _json

from ._robustlink import (  # noqa: F401
    BesselOverflow,
    BracketError,
    EnumerationLimit,
    RateDecision,
    RateLut,
    bessel_i,
    build_lut,
    default_config,
    error_variance,
    expected_inverse_throughput,
    log_bessel_i,
    marcum_q1,
    nonrobust_rate,
    outage_prob,
    rician_cdf,
    rician_pdf,
    robust_rate,
    select_user,
    uncertainty_curve,
)
from ._robustlink import run_experiment as _run_experiment


def run_experiment(config=None, **overrides):
    """Run a drop simulation. `config` is a dict or JSON string; keyword
    arguments override individual keys. Returns a list of row dicts."""
    if config is None:
        cfg = {}
    elif isinstance(config, str):
        cfg = _json.loads(config)
    else:
        cfg = dict(config)
    cfg.update(overrides)
    return _run_experiment(_json.dumps(cfg))
