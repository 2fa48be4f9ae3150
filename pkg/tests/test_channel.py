import numpy as np
import pytest

from imcsi.beams import ArrayConfig
from imcsi.channel import SceneConfig, split_counts, synth_channel, synth_dataset
from imcsi.dataio import file_digest, read_dataset
from imcsi.eigen import pse_batch, subband_eigenvectors
from imcsi.errors import ConfigError

ARR = ArrayConfig(2, 2, 4, 4, 2)


def scene(**kw):
    base = dict(array=ARR, n_rb=8, n_subbands=4, seed=123)
    base.update(kw)
    return SceneConfig(**base)


def test_scene_validation():
    with pytest.raises(ConfigError):
        scene(n_rb=5, n_subbands=2)
    with pytest.raises(ConfigError):
        scene(n_paths=0)
    with pytest.raises(ConfigError):
        scene(delay_spread=0.0)
    with pytest.raises(ConfigError):
        scene(angle_spread=-0.1)


def test_single_path_is_rank_one_per_rb():
    s = synth_channel(scene(n_paths=1, angle_spread=0.0), 3)
    for rb in range(s.h.shape[0]):
        sv = np.linalg.svd(s.h[rb], compute_uv=False)
        assert sv[1] <= 1e-10 * sv[0]


def test_determinism_and_drop_separation():
    cfg = scene()
    a = synth_channel(cfg, 5)
    b = synth_channel(cfg, 5)
    assert np.array_equal(a.h, b.h)
    assert a.seed_used == b.seed_used
    c = synth_channel(cfg, 6)
    assert not np.allclose(a.h, c.h)
    d = synth_channel(scene(seed=124), 5)
    assert not np.allclose(a.h, d.h)


def test_per_sample_power_normalization():
    for drop in range(5):
        s = synth_channel(scene(), drop)
        assert abs(np.mean(np.abs(s.h) ** 2) - 1.0) < 1e-12
        assert np.all(np.isfinite(s.h))
        assert np.all(np.linalg.norm(s.h, axis=(1, 2)) > 0)


def test_frequency_correlation_decays_with_rb_distance():
    cfg = scene(n_rb=8, n_subbands=4)
    adjacent = []
    far = []
    for drop in range(1000):
        h = synth_channel(cfg, drop).h

        def corr(i, j):
            num = abs(np.trace(h[i].conj().T @ h[j]))
            return num / (np.linalg.norm(h[i]) * np.linalg.norm(h[j]))

        adjacent.append(np.mean([corr(i, i + 1) for i in range(7)]))
        far.append(corr(0, 7))
    assert np.mean(adjacent) > np.mean(far)


def test_more_antennas_more_compressible():
    common = dict(n_rb=1, n_subbands=1, seed=77, angle_spread=0.15)
    small = SceneConfig(array=ArrayConfig(4, 2, 4, 4, 2), **common)  # nt=16
    large = SceneConfig(array=ArrayConfig(8, 4, 4, 4, 2), **common)  # nt=64
    def mean_pse(cfg, count=200):
        vecs = []
        for drop in range(count):
            h = synth_channel(cfg, drop).h
            target = subband_eigenvectors(h, 1)
            vecs.append(target.matrix[:, 0])
        return float(pse_batch(np.array(vecs)).mean())

    assert mean_pse(large) < mean_pse(small)


def test_split_counts_rounding():
    assert split_counts(10, (0.8, 0.1, 0.1)) == (8, 1, 1)
    assert split_counts(1, (0.8, 0.1, 0.1)) == (1, 0, 0)
    assert split_counts(0, (0.8, 0.1, 0.1)) == (0, 0, 0)
    assert split_counts(25, (0.8, 0.1, 0.1)) == (21, 2, 2)
    with pytest.raises(ConfigError):
        split_counts(10, (0.8, 0.1, 0.2))
    with pytest.raises(ConfigError):
        split_counts(-1, (0.8, 0.1, 0.1))


def test_synth_dataset_splits_and_determinism(tmp_path):
    cfg = scene(n_rb=4, n_subbands=2)
    build = synth_dataset(cfg, 10, (0.8, 0.1, 0.1), tmp_path / "a", prefix="demo")
    assert build.counts == {"train": 8, "val": 1, "test": 1}
    data = read_dataset(build.eigen_paths["train"])
    assert data.kind == "eigen_multi"
    assert data.count == 8
    assert data.samples.shape == (8, 8, 2)
    np.testing.assert_allclose(np.linalg.norm(data.samples, axis=1), 1.0, atol=1e-6)

    build2 = synth_dataset(cfg, 10, (0.8, 0.1, 0.1), tmp_path / "b", prefix="demo")
    for split in ("train", "val", "test"):
        assert file_digest(build.eigen_paths[split]) == file_digest(build2.eigen_paths[split])


def test_synth_dataset_single_rb_mode(tmp_path):
    cfg = scene(n_rb=1, n_subbands=1)
    build = synth_dataset(cfg, 5, (0.8, 0.1, 0.1), tmp_path, prefix="s")
    data = read_dataset(build.eigen_paths["train"])
    assert data.kind == "eigen_single"
    assert data.samples.shape == (5, 8)


def test_synth_dataset_empty(tmp_path):
    build = synth_dataset(scene(), 0, (0.8, 0.1, 0.1), tmp_path, prefix="empty")
    for split in ("train", "val", "test"):
        data = read_dataset(build.eigen_paths[split])
        assert data.count == 0


def test_synth_dataset_channel_files(tmp_path):
    cfg = scene(n_rb=4, n_subbands=2)
    build = synth_dataset(cfg, 3, (1.0, 0.0, 0.0), tmp_path, prefix="c", save_channels=True)
    data = read_dataset(build.channel_paths["train"])
    assert data.kind == "channel"
    assert data.samples.shape == (3, 4, 2, 8)
    # channel files hold the same drops the eigen targets were derived from
    sample = synth_channel(cfg, 0)
    dataset_mean = np.mean(np.abs(data.samples) ** 2)
    assert 0.9 < dataset_mean < 1.1
    assert np.all(np.isfinite(sample.h))
