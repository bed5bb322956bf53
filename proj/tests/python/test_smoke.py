import json
import math
import os
import tempfile

import pytest

import papolab


def test_uniform_softmax_entropy():
    dist = papolab.softmax_from_logits([0.0, 0.0, 0.0])
    assert dist.entropy == pytest.approx(math.log(3.0), abs=1e-12)
    for p in dist.probs:
        assert p == pytest.approx(1.0 / 3.0, abs=1e-15)


def test_rejects_degenerate_vocab():
    with pytest.raises(ValueError):
        papolab.softmax_from_logits([1.0])


def test_tendency_components_on_reference_state():
    dist = papolab.softmax_from_logits(
        [math.log(0.7), math.log(0.2), math.log(0.1)]
    )
    t1, t2, tendency = papolab.tendency_components(dist, 0)
    assert t1 == pytest.approx(0.3116005260232233, abs=1e-12)
    assert t2 == pytest.approx(0.17080792841611867, abs=1e-12)
    assert tendency == pytest.approx(-0.14079259760710464, abs=1e-12)


def test_polarity_predicts_exact_entropy_change():
    dist = papolab.softmax_from_logits(
        [math.log(0.7), math.log(0.2), math.log(0.1)]
    )
    eta = 1e-3
    rec = papolab.polarity(dist, 0, 1.0)
    measured = papolab.exact_entropy_delta(dist, 0, 1.0, eta)
    assert measured == pytest.approx(eta * rec.polarity, abs=10 * eta * eta)
    assert rec.polarity < 0.0
    flipped = papolab.polarity(dist, 0, -1.0)
    assert flipped.polarity == pytest.approx(-rec.polarity, abs=1e-15)


def test_logit_update_sums_to_zero():
    dist = papolab.softmax_from_logits([0.3, -0.2, 0.9, 0.0])
    deltas = papolab.logit_update(dist, 2, -1.3, 0.05)
    assert sum(deltas) == pytest.approx(0.0, abs=1e-12)


def test_token_gradient_clipping():
    assert papolab.token_gradient(0.5, 0.5, 0.4, 0.2, 0.28) == 0.4
    assert papolab.token_gradient(0.2, 0.3, 1.0, 0.2, 0.28) == 0.0
    assert papolab.token_gradient(0.2, 0.3, -1.0, 0.2, 0.28) == pytest.approx(
        -1.5, abs=1e-12
    )


def test_controller_recovery_weights():
    config = papolab.ControllerConfig()
    config.warmup_steps = 2
    controller = papolab.Controller(config)
    controller.observe(2.0)
    controller.observe(1.6)  # locks s_ref = -0.02
    w_pos, w_neg = controller.observe(1.68)  # slope EMA lands at -0.01
    assert controller.recovery == pytest.approx(0.5, abs=1e-6)
    assert w_neg == pytest.approx(0.99, abs=1e-6)
    assert w_pos == pytest.approx(1 / 0.99, abs=1e-6)
    assert w_pos * w_neg == pytest.approx(1.0, abs=1e-12)


def test_verification_suite_scaled_down():
    checks = papolab.run_verification(
        seed=7, correlation_cases=300, identity_cases=1500, gradient_cases=20
    )
    assert checks, "no checks returned"
    failed = [c["name"] for c in checks if not c["passed"]]
    assert not failed, f"failed checks: {failed}"


def test_training_run_writes_parsable_metrics(tmp_path):
    config_path = tmp_path / "run.cfg"
    config_path.write_text(
        "\n".join(
            [
                "[task]",
                "name = sorted_run",
                "vocab_size = 6",
                "max_len = 6",
                "[policy]",
                "context_order = 2",
                "[rollout]",
                "group_size = 4",
                "groups_per_step = 2",
                "[controller]",
                "warmup_steps = 5",
                "[run]",
                "steps = 25",
                "seed = 12",
                f"out_dir = {tmp_path / 'out'}",
            ]
        )
    )
    result = papolab.train(str(config_path))
    assert result["steps"] == 25
    assert 0.0 <= result["final_mean_reward"] <= 1.0

    frames = []
    with open(result["metrics_path"]) as handle:
        for line in handle:
            frames.append(json.loads(line))
    assert len(frames) == 25
    assert frames[0]["step"] == 1
    assert frames[0]["seed"] == 12
    assert frames[-1]["omega_pos"] * frames[-1]["omega_neg"] == pytest.approx(
        1.0, abs=1e-9
    )
    assert os.path.exists(result["policy_path"])
