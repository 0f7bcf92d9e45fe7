import json
import os
import tempfile

import pytest

import odlae


def test_predict_is_a_distribution():
    m = odlae.Model(variant="odlae1", input_dim=4, classes=3, layers=2, hidden_units=8, seed=1)
    p = m.predict([0.1, 0.2, 0.3, 0.4])
    assert len(p) == 3
    assert sum(p) == pytest.approx(1.0, abs=1e-12)


def test_update_reports_simplex_weights():
    m = odlae.Model(variant="odlae1", input_dim=4, classes=3, layers=3, hidden_units=8, seed=2)
    rec = m.update([0.5, 0.5, 0.0, 1.0], 2)
    assert rec["t"] == 0
    assert sum(rec["layer_weights"]) == pytest.approx(1.0, abs=1e-12)
    assert rec["a_re"] + rec["a_pre"] == pytest.approx(1.0, abs=1e-12)
    assert m.steps == 1


def test_attention_variant_learns_separable_stream():
    m = odlae.Model(variant="odlae2", input_dim=2, classes=2, layers=2, hidden_units=16, seed=3)
    report = odlae.prequential_synthetic(m, n=2000, seed=3, window=500)
    assert report["n"] == 2000
    assert report["windows"][-1][1] > 0.9


def test_metrics_hamming_is_complement():
    r = odlae.compute_metrics([0, 1, 1, 2], [0, 1, 2, 2], 3)
    assert r["accuracy"] == pytest.approx(0.75)
    assert r["hamming_loss"] == 1.0 - r["accuracy"]


def test_checkpoint_round_trip():
    m = odlae.Model(variant="odlae1", input_dim=3, classes=2, layers=2, hidden_units=4, seed=4)
    for i in range(10):
        m.update([0.1 * i % 1.0, 0.5, 0.9], i % 2)
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "m.ckpt")
        m.save(path)
        back = odlae.Model.load(path)
    assert back.parameters() == m.parameters()
    assert back.steps == m.steps


def test_bad_variant_raises():
    with pytest.raises(ValueError):
        odlae.Model(variant="nope", input_dim=2, classes=2)


def test_cli_run_is_deterministic():
    args = ["run", "--n", "200", "--layers", "2", "--hidden-units", "4", "--seed", "5"]
    code1, out1, _ = odlae.cli(args)
    code2, out2, _ = odlae.cli(args)
    assert code1 == 0 and code2 == 0
    assert out1 == out2
    assert json.loads(out1)["metrics"]["n"] == 200
