import json
import math
import os
import subprocess

import pytest

import robustlink as rl


def test_marcum_closed_forms():
    assert rl.marcum_q1(0.0, 1.5) == pytest.approx(math.exp(-1.125), rel=1e-12)
    assert rl.marcum_q1(2.0, 0.0) == 1.0
    assert 0.0 < rl.marcum_q1(3.0, 3.0) < 1.0


def test_bessel_overflow_is_an_exception():
    assert rl.bessel_i(0, 1.0) == pytest.approx(1.2660658777520082, rel=1e-13)
    with pytest.raises(rl.BesselOverflow):
        rl.bessel_i(0, 800.0)
    assert math.isfinite(rl.log_bessel_i(0, 800.0))


def test_rician_cdf_consistent_with_marcum():
    g_hat, eps, b = 1.0, 0.2, 1.0
    q = rl.marcum_q1(math.sqrt(2 * g_hat**2 / eps), math.sqrt(2 * b**2 / eps))
    assert rl.rician_cdf(b, g_hat, eps) == pytest.approx(1.0 - q, abs=1e-12)


def test_robust_rate_hits_target():
    d = rl.robust_rate(1.0, 0.2, 10.0, 0.1)
    assert d.outage <= 0.1
    assert d.outage == pytest.approx(0.1, abs=1e-3)
    assert d.expected_rate == pytest.approx((1 - d.outage) * d.rate)
    assert rl.outage_prob(d.rate, 1.0, 0.2, 10.0) == pytest.approx(d.outage)
    assert rl.nonrobust_rate(1.0, 10.0).rate == pytest.approx(math.log2(11.0))
    with pytest.raises(ValueError):
        rl.robust_rate(1.0, 0.2, 10.0, 1.5)


def test_lut_lookup_is_conservative():
    lut = rl.build_lut(0.1, 10.0, 0.1, points=128)
    assert len(lut.amplitudes) == 128
    assert all(a <= b for a, b in zip(lut.rates, lut.rates[1:]))
    for g in (0.3, 1.0, 2.2):
        assert lut.lookup(g).rate <= rl.robust_rate(g, 0.1, 10.0, 0.1).rate + 1e-3


def test_error_variance_grows_with_delay():
    eps = [rl.error_variance(d, 10 ** 0.5) for d in range(0, 21, 2)]
    assert all(a < b for a, b in zip(eps, eps[1:]))
    rows = rl.uncertainty_curve([5.0], [0, 10])
    assert rows[1][2] == pytest.approx(eps[5])


def test_expected_inverse_throughput_two_pending():
    value = rl.expected_inverse_throughput([(1.0, 0.9), (2.0, 0.8)], 10.0)
    hand = 0.9 * 0.8 / 13 + 0.9 * 0.2 / 11 + 0.1 * 0.8 / 12 + 0.1 * 0.2 / 10
    assert value == pytest.approx(hand, rel=1e-14)
    assert rl.select_user([0.2, 0.5, 0.5]) == 1


def test_run_experiment_rows():
    defaults = json.loads(rl.default_config())
    assert defaults["users"] == 2
    rows = rl.run_experiment({"drops": 3, "slots": 30, "delays": [0, 4]}, seed=5)
    assert len(rows) == 2 * 5
    ids = {r["scheme"] for r in rows}
    assert ids == {"perfect-csi", "nonrobust-a1", "nonrobust-a0.95", "robust-alg1", "robust-alg2"}
    perfect = [r for r in rows if r["scheme"] == "perfect-csi"]
    assert perfect[0]["pf_utility"] == perfect[1]["pf_utility"]
    assert all(r["outage_rate"] == 0.0 for r in perfect)
    again = rl.run_experiment(json.dumps({"drops": 3, "slots": 30, "delays": [0, 4], "seed": 5}))
    assert again == rows
    with pytest.raises(ValueError):
        rl.run_experiment({"unknown_key": 1})


@pytest.mark.skipif("ROBUSTLINK_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_uncertainty_curve():
    out = subprocess.run(
        [os.environ["ROBUSTLINK_CLI"], "uncertainty-curve", "--snr-db", "5", "--delay", "0", "--delay", "4"],
        check=True, capture_output=True, text=True,
    ).stdout.splitlines()
    assert out[0] == "snr_db,delay,eps"
    assert len(out) == 3
