import json

import numpy as np
import pytest

import cogsense

TINY = json.dumps(
    {
        "model": {"hidden": 2, "dense": 2, "epochs_base": 1, "epochs_augmented": 1, "batch_size": 32},
        "evaluate": {"seeds": [0]},
    }
)


def test_metrics_match_hand_values():
    assert cogsense.auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == pytest.approx(0.75)
    assert cogsense.auc([0.5, 0.5], [0, 1]) == pytest.approx(0.5)
    assert cogsense.auprc([0.9, 0.8, 0.1], [1, 0, 1]) == pytest.approx((1.0 + 2.0 / 3.0) / 2.0)


def test_single_class_is_an_error():
    with pytest.raises(cogsense.CogsenseError):
        cogsense.auc([0.1, 0.2], [1, 1])


def test_registry():
    names = cogsense.feature_names()
    assert len(names) == cogsense.sensing_feature_count() + 1
    assert names[-1] == "coverage_hours"
    assert len(set(names)) == len(names)


def test_default_config_round_trips_as_json():
    cfg = json.loads(cogsense.default_config())
    assert cfg["model"]["batch_size"] == 128


def test_bad_spec_rejected(tmp_path):
    with pytest.raises(cogsense.CogsenseError):
        cogsense.generate_cohort(tmp_path / "c", json.dumps({"participants": 0}))


def test_pipeline(tmp_path):
    spec = json.dumps({"participants": 4, "days": 35, "impaired_fraction": 0.5, "seed": 3})
    cogsense.generate_cohort(tmp_path / "cohort", spec)
    assert cogsense.featurize(tmp_path / "cohort", tmp_path / "features", TINY) == 4

    people = cogsense.load_features(tmp_path / "features")
    assert [p["id"] for p in people] == sorted(p["id"] for p in people)
    first = people[0]
    assert first["values"].shape == (len(first["dates"]), len(cogsense.feature_names()))
    assert np.all(first["values"][:, -1] >= 14.0)

    out = cogsense.evaluate(tmp_path / "features", "base", "sensing", TINY)
    assert len(out["folds"]) == 4
    assert 0.0 <= out["metrics"]["participant_auc"]["mean"] <= 1.0
    again = cogsense.evaluate(tmp_path / "features", "base", "sensing", TINY)
    assert [f["probability"] for f in again["folds"]] == [f["probability"] for f in out["folds"]]

    emb = cogsense.routine_embedding(tmp_path / "features")
    assert emb["explained"] >= 0.95
    assert len(emb["dates"]) == len(emb["labels"])
