"""Smoke tests for the python bindings."""

import math

import pytest

import relhyper


@pytest.fixture()
def planted(tmp_path):
    """A small planted-relation space written as a glove text file."""
    rows = {}
    offset = [3.0, 0.0, 0.0, 0.0]
    pairs = []
    for i in range(6):
        src = [0.1 * ((i * 7) % 5 - 2), 0.2 * ((i * 3) % 4 - 1), 0.05 * i, -0.1 * i]
        tgt = [s + o for s, o in zip(src, offset)]
        rows[f"src{i}"] = src
        rows[f"tgt{i}"] = tgt
        pairs.append((f"src{i}", f"tgt{i}"))
    for i in range(30):
        rows[f"tok{i}"] = [
            math.sin(1.0 + 0.7 * i + 0.3 * k) * 2.0 for k in range(4)
        ]

    vsm_path = tmp_path / "space.txt"
    with vsm_path.open("w") as fh:
        for token, vec in rows.items():
            fh.write(token + " " + " ".join(f"{v:.6f}" for v in vec) + "\n")

    bats_dir = tmp_path / "pairs"
    bats_dir.mkdir()
    with (bats_dir / "P01 [planted].txt").open("w") as fh:
        for src, tgt in pairs:
            fh.write(f"{src}\t{tgt}\n")
    return vsm_path, bats_dir


def test_load_and_search(planted):
    vsm_path, _ = planted
    vsm = relhyper.load_vsm(str(vsm_path), format="glove_text")
    assert len(vsm) == 42
    assert vsm.dim == 4
    assert "src0" in vsm
    assert "zqxw" not in vsm
    assert vsm.lookup("zqxw") is None

    row = vsm.lookup("src1")
    top = vsm.top_k([float(v) for v in row], 1)
    assert top[0][0] == "src1"
    assert abs(top[0][1] - 1.0) < 1e-6


def test_cosine_and_percentile():
    assert relhyper.cosine([1.0, 0.0], [0.0, 1.0]) == pytest.approx(0.0)
    assert relhyper.cosine([1.0, 1.0], [1.0, 0.0]) == pytest.approx(0.70710678, abs=1e-8)
    assert relhyper.percentile([1.0, 2.0, 3.0, 4.0], 25.0) == pytest.approx(1.75)
    with pytest.raises(Exception):
        relhyper.cosine([0.0, 0.0], [1.0, 0.0])


def test_average_precision():
    assert relhyper.average_precision([1, 3], 2) == pytest.approx((1.0 + 2.0 / 3.0) / 2.0)
    assert relhyper.average_precision([], 1) == 0.0


def test_first_principal_component():
    pc = relhyper.first_principal_component([[1, 0], [3, 0], [2, 0.1], [2, -0.1]])
    assert pc[0] == pytest.approx(1.0, abs=1e-6)
    assert pc[1] == pytest.approx(0.0, abs=1e-6)


def test_train_linear_svm():
    w, b, converged = relhyper.train_linear_svm([[1.0, 0.0]], [[-1.0, 0.0]], C=10.0)
    assert converged
    assert w[0] == pytest.approx(1.0, abs=1e-4)
    assert b == pytest.approx(0.0, abs=1e-6)


def test_fit_and_rank(planted):
    vsm_path, bats_dir = planted
    vsm = relhyper.load_vsm(str(vsm_path))
    categories = relhyper.parse_bats_directory(str(bats_dir))
    assert len(categories) == 1
    resolved = relhyper.resolve(categories[0], vsm)
    assert len(resolved.pairs) == 6

    cfg = relhyper.ModelConfig(kind="svmcos", seed=7)
    model = relhyper.fit(resolved, vsm, cfg)
    assert model.kind == "svmcos"
    assert model.magnitude == pytest.approx(3.0, abs=1e-4)
    ranking = relhyper.rank(model, "src2", vsm, 3)
    assert ranking[0][0] == "tgt2"
    assert "direction" in model.to_json()


def test_loo_and_aggregate(planted):
    vsm_path, bats_dir = planted
    vsm = relhyper.load_vsm(str(vsm_path))
    resolved = relhyper.resolve(relhyper.parse_bats_directory(str(bats_dir))[0], vsm)
    cfg = relhyper.ModelConfig(kind="cosavg3", seed=1)
    ev = relhyper.loo_evaluate(resolved, vsm, cfg, k_eval=3)
    assert len(ev.folds) == 6
    report = relhyper.aggregate([ev], k_sens="auto")
    assert report["dataset"]["f1"] == pytest.approx(1.0)
    assert report["per_category"]["P01"]["n_queries"] == 6


def test_offset_stats(planted):
    vsm_path, bats_dir = planted
    vsm = relhyper.load_vsm(str(vsm_path))
    resolved = relhyper.resolve(relhyper.parse_bats_directory(str(bats_dir))[0], vsm)
    stats = relhyper.offset_stats(resolved, vsm)
    assert stats["n_offsets"] == 6
    assert stats["mean_pairwise_cosine"] == pytest.approx(1.0, abs=1e-5)


def test_cache_round_trip(planted, tmp_path):
    vsm_path, _ = planted
    vsm = relhyper.load_vsm(str(vsm_path))
    cache_path = tmp_path / "space.rhc"
    vsm.write_cache(str(cache_path))
    reloaded = relhyper.load_vsm(str(cache_path), format="native_cache")
    assert len(reloaded) == len(vsm)
    assert reloaded.lookup("src3") == vsm.lookup("src3")

    with pytest.raises(relhyper.CacheError):
        relhyper.load_vsm(str(vsm_path), format="native_cache")


def test_build_vsm_in_memory():
    vsm = relhyper.build_vsm("toy", ["a", "b"], [[1.0, 0.0], [0.0, 1.0]])
    assert vsm.top_k([1.0, 0.1], 2)[0][0] == "a"
