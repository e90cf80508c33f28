"""Exception types shared across the toolkit."""


class SidkitError(Exception):
    """Base class for all toolkit errors."""


class EmptyAfterVad(SidkitError):
    """Every block of the utterance fell below the silence-energy threshold."""


class SignalTooShort(SidkitError):
    """Signal has fewer samples than one analysis frame."""


class DegenerateFrame(SidkitError):
    """Frame content does not support the requested analysis (e.g. all zero)."""


class NoUsableFrames(SidkitError):
    """Every frame of an utterance was skipped as degenerate."""


class InsufficientData(SidkitError):
    """Fewer training vectors than mixture components."""


class EmptyFeatureStream(SidkitError):
    """An utterance produced no feature vectors for a required stream."""


class UnsupportedFormat(SidkitError):
    """Audio file is not 16-bit PCM mono WAV."""


class SampleRateMismatch(SidkitError):
    """Audio sample rate differs from the expected rate."""


class UnstableFilter(SidkitError):
    """Synthesis filter has poles on or outside the unit circle."""


class MissingModel(SidkitError):
    """Model store lacks a model required for scoring."""


class ManifestError(SidkitError):
    """Corpus manifest is malformed or violates the closed-set condition."""


class StoreIntegrityError(SidkitError):
    """Model file failed checksum or structural validation."""
