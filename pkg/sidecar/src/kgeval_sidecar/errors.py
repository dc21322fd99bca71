class SidecarError(Exception):
    """Base class for sidecar failures."""


class ModelLoadFailure(SidecarError):
    pass


class UnreadableImage(SidecarError):
    pass


class WriteFailure(SidecarError):
    pass
