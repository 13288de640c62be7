"""Exception hierarchy for the srgc codec.

All data/format errors derive from :class:`SrgcError` so the CLI can map
them to a single exit code; anything else is treated as an internal error.
"""


class SrgcError(Exception):
    """Base class for all codec-level errors."""


class IncompleteGridError(SrgcError):
    """A view file is missing from a light-field directory."""

    def __init__(self, s, t, path):
        self.s = s
        self.t = t
        self.path = path
        super().__init__(f"incomplete grid: missing view ({s},{t}) at {path}")


class InconsistentViewsError(SrgcError):
    """Views in one light field disagree on dimensions/depth/channels."""


class EmptyLightFieldError(SrgcError):
    """A light field with zero views where one is required."""


class PatchOutOfBoundsError(SrgcError):
    """A scene patch does not fit the reference-view canvas."""


class SceneSpecError(SrgcError):
    """Malformed scene description file."""


class TooManySuperpixelsError(SrgcError):
    """Requested more superpixels than there are pixels."""


class OrphanLabelError(SrgcError):
    """A segmentation label has no pixels in the reference view."""


class DecompositionError(SrgcError):
    """Eigendecomposition failed or violated its tolerances."""


class UnsupportedStreamError(SrgcError):
    """Bitstream magic/version not recognized."""


class CorruptStreamError(SrgcError):
    """Bitstream is structurally damaged (truncation, bad section, ...)."""


class DecodeDesyncError(SrgcError):
    """Entropy decoder lost sync with the bitstream."""

    def __init__(self, message, bit_offset):
        self.bit_offset = bit_offset
        super().__init__(f"{message} (bit offset {bit_offset})")
