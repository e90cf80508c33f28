"""Model persistence: one binary record per model plus a text index.

Record layout (little-endian): magic ``SIDM``, u16 format version, u16
feature-kind length and UTF-8 bytes, u32 dimension, u32 component count,
then weights, means, and variances as float64, and a trailing CRC32 of
everything between the magic and the checksum.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from .errors import MissingModel, StoreIntegrityError
from .gmm import GmmModel

MAGIC = b"SIDM"
FORMAT_VERSION = 1

INDEX_NAME = "index.tsv"


def model_to_bytes(model: GmmModel) -> bytes:
    """Serialize one model to the versioned binary record."""
    kind = model.feature_kind.encode("utf-8")
    payload = struct.pack("<HH", FORMAT_VERSION, len(kind))
    payload += kind
    payload += struct.pack("<II", model.dim, model.num_components)
    payload += model.weights.astype("<f8").tobytes()
    payload += model.means.astype("<f8").tobytes()
    payload += model.variances.astype("<f8").tobytes()
    checksum = zlib.crc32(payload) & 0xFFFFFFFF
    return MAGIC + payload + struct.pack("<I", checksum)


def model_from_bytes(data: bytes) -> GmmModel:
    """Parse and checksum-validate one binary model record.

    Raises:
        StoreIntegrityError: bad magic, truncation, or checksum mismatch.
    """
    if len(data) < len(MAGIC) + 4 + 8 or data[:4] != MAGIC:
        raise StoreIntegrityError("not a model record (bad magic or truncated)")
    payload, (stored,) = data[4:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(payload) & 0xFFFFFFFF != stored:
        raise StoreIntegrityError("checksum mismatch (corrupt or truncated record)")
    version, kind_len = struct.unpack_from("<HH", payload, 0)
    if version != FORMAT_VERSION:
        raise StoreIntegrityError(f"unsupported format version {version}")
    offset = 4
    kind = payload[offset : offset + kind_len].decode("utf-8")
    offset += kind_len
    dim, num_components = struct.unpack_from("<II", payload, offset)
    offset += 8
    expected = offset + 8 * (num_components + 2 * num_components * dim)
    if len(payload) != expected:
        raise StoreIntegrityError("record length does not match header")
    weights = np.frombuffer(payload, dtype="<f8", count=num_components, offset=offset)
    offset += 8 * num_components
    means = np.frombuffer(
        payload, dtype="<f8", count=num_components * dim, offset=offset
    ).reshape(num_components, dim)
    offset += 8 * num_components * dim
    variances = np.frombuffer(
        payload, dtype="<f8", count=num_components * dim, offset=offset
    ).reshape(num_components, dim)
    try:
        return GmmModel(weights=weights, means=means, variances=variances, feature_kind=kind)
    except ValueError as exc:
        raise StoreIntegrityError(f"invalid model parameters: {exc}") from exc


class ModelStore:
    """Directory of per-model binary files with a tab-separated index."""

    def __init__(self, path, sample_rate: int | None = None):
        self.path = Path(path)
        self.sample_rate = sample_rate
        self._entries: dict[tuple[str, str], str] = {}
        index = self.path / INDEX_NAME
        if index.exists():
            self._read_index(index)

    def _read_index(self, index: Path) -> None:
        for line in index.read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("# sample_rate:"):
                    self.sample_rate = int(line.split(":", 1)[1])
                continue
            speaker, stream, filename = line.split("\t")[:3]
            self._entries[(speaker, stream)] = filename

    def _write_index(self) -> None:
        lines = ["# speaker\tstream\tfile\tfeature_kind\td\tM"]
        if self.sample_rate is not None:
            lines.append(f"# sample_rate: {self.sample_rate}")
        for (speaker, stream), filename in sorted(self._entries.items()):
            model = model_from_bytes((self.path / filename).read_bytes())
            lines.append(
                f"{speaker}\t{stream}\t{filename}\t{model.feature_kind}"
                f"\t{model.dim}\t{model.num_components}"
            )
        (self.path / INDEX_NAME).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @staticmethod
    def _filename(speaker: str, stream: str) -> str:
        safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in speaker)
        return f"{safe}__{stream}.gmm"

    def save(self, speaker: str, stream: str, model: GmmModel) -> None:
        self.path.mkdir(parents=True, exist_ok=True)
        filename = self._filename(speaker, stream)
        (self.path / filename).write_bytes(model_to_bytes(model))
        self._entries[(speaker, stream)] = filename
        self._write_index()

    def load(self, speaker: str, stream: str) -> GmmModel:
        key = (speaker, stream)
        if key not in self._entries:
            raise MissingModel(f"no {stream} model for speaker {speaker!r}")
        record = self.path / self._entries[key]
        if not record.exists():
            raise MissingModel(f"model file missing: {record}")
        return model_from_bytes(record.read_bytes())

    def speakers(self) -> list[str]:
        return sorted({speaker for speaker, _ in self._entries})

    def streams(self, speaker: str) -> list[str]:
        return sorted(stream for spk, stream in self._entries if spk == speaker)
