"""Simulator-wide behaviour of the attacks on the reference die."""
from __future__ import annotations

import numpy as np

from configs import CIMA_BASELINE, CIMA_MTD
from impedance_mtd.attacks import progressive_leakage
from impedance_mtd.harness import CampaignConfig, capture


def _envelope(rep):
    true = rep.progressive[:, rep.true_key]
    wrong = np.delete(rep.progressive, rep.true_key, axis=1).max(axis=1)
    return true, wrong


def test_undefended_true_key_separates_and_stays_separated():
    ts = capture(CampaignConfig.from_json({**CIMA_BASELINE, "campaign_seed": 3})).trace_set()
    rep = progressive_leakage(ts, "cima", list(range(100, 2001, 100)))
    true, wrong = _envelope(rep)
    above = true > wrong
    assert above[-1]
    first = int(np.argmax(above))
    assert np.all(above[first:])


def test_defended_true_key_stays_inside_envelope():
    ts = capture(CampaignConfig.from_json({**CIMA_MTD, "campaign_seed": 3})).trace_set()
    rep = progressive_leakage(ts, "cima", list(range(1000, 20001, 1000)))
    true, wrong = _envelope(rep)
    assert np.all(true <= wrong)
