"""Binary model records and the directory-backed model store."""

import numpy as np
import pytest

from sidkit.errors import MissingModel, StoreIntegrityError
from sidkit.gmm import GmmModel
from sidkit.store import ModelStore, model_from_bytes, model_to_bytes


def random_model(rng, m=4, d=6, kind="mfcc"):
    weights = rng.uniform(0.5, 1.5, m)
    weights /= weights.sum()
    return GmmModel(
        weights=weights,
        means=rng.uniform(-2, 2, (m, d)),
        variances=rng.uniform(0.1, 2.0, (m, d)),
        feature_kind=kind,
    )


class TestRecordFormat:
    def test_roundtrip_bit_identical(self):
        rng = np.random.default_rng(60)
        for _ in range(10):
            model = random_model(rng)
            back = model_from_bytes(model_to_bytes(model))
            np.testing.assert_array_equal(back.weights, model.weights)
            np.testing.assert_array_equal(back.means, model.means)
            np.testing.assert_array_equal(back.variances, model.variances)
            assert back.feature_kind == model.feature_kind

    def test_reserialization_stable(self):
        rng = np.random.default_rng(61)
        model = random_model(rng)
        data = model_to_bytes(model)
        assert model_to_bytes(model_from_bytes(data)) == data

    def test_magic_present(self):
        rng = np.random.default_rng(62)
        assert model_to_bytes(random_model(rng))[:4] == b"SIDM"

    def test_bad_magic_rejected(self):
        rng = np.random.default_rng(63)
        data = bytearray(model_to_bytes(random_model(rng)))
        data[0] ^= 0xFF
        with pytest.raises(StoreIntegrityError):
            model_from_bytes(bytes(data))

    def test_every_bit_flip_detected(self):
        """Flipping any single byte anywhere in the record is caught."""
        rng = np.random.default_rng(64)
        data = model_to_bytes(random_model(rng, m=2, d=2))
        for pos in range(len(data)):
            corrupt = bytearray(data)
            corrupt[pos] ^= 0x01
            with pytest.raises(StoreIntegrityError):
                model_from_bytes(bytes(corrupt))

    def test_truncation_rejected(self):
        rng = np.random.default_rng(65)
        data = model_to_bytes(random_model(rng))
        for cut in (0, 3, 10, len(data) - 1):
            with pytest.raises(StoreIntegrityError):
                model_from_bytes(data[:cut])

    def test_trailing_garbage_rejected(self):
        rng = np.random.default_rng(66)
        data = model_to_bytes(random_model(rng))
        with pytest.raises(StoreIntegrityError):
            model_from_bytes(data + b"\x00")


class TestModelStore:
    def test_save_load_roundtrip(self, tmp_path):
        rng = np.random.default_rng(67)
        store = ModelStore(tmp_path / "store", sample_rate=8000)
        model = random_model(rng)
        store.save("alice", "spectral", model)
        back = store.load("alice", "spectral")
        np.testing.assert_array_equal(back.means, model.means)

    def test_missing_model(self, tmp_path):
        store = ModelStore(tmp_path / "store")
        with pytest.raises(MissingModel):
            store.load("nobody", "spectral")

    def test_index_lists_speakers_and_streams(self, tmp_path):
        rng = np.random.default_rng(68)
        store = ModelStore(tmp_path / "store", sample_rate=8000)
        for speaker in ("carol", "alice", "bob"):
            store.save(speaker, "spectral", random_model(rng))
            store.save(speaker, "residual", random_model(rng, d=6, kind="residual_moments"))
        assert store.speakers() == ["alice", "bob", "carol"]
        assert store.streams("alice") == ["residual", "spectral"]

    def test_reopen_reads_index(self, tmp_path):
        rng = np.random.default_rng(69)
        path = tmp_path / "store"
        store = ModelStore(path, sample_rate=8000)
        model = random_model(rng)
        store.save("alice", "spectral", model)

        reopened = ModelStore(path)
        assert reopened.sample_rate == 8000
        assert reopened.speakers() == ["alice"]
        back = reopened.load("alice", "spectral")
        np.testing.assert_array_equal(back.weights, model.weights)

    def test_corrupt_file_detected_on_load(self, tmp_path):
        rng = np.random.default_rng(70)
        path = tmp_path / "store"
        store = ModelStore(path, sample_rate=8000)
        store.save("alice", "spectral", random_model(rng))
        record = next(path.glob("*.gmm"))
        raw = bytearray(record.read_bytes())
        raw[20] ^= 0x10
        record.write_bytes(bytes(raw))
        with pytest.raises(StoreIntegrityError):
            ModelStore(path).load("alice", "spectral")
