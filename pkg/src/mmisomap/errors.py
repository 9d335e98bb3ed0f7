"""Exception and warning classes shared across the package."""


class EmbeddingError(Exception):
    """Base class for algorithmic failures (exit code 3 in the CLI)."""


class DisconnectedGraphError(EmbeddingError):
    def __init__(self, n_components, where="graph"):
        self.n_components = n_components
        super().__init__(f"{where} has {n_components} components")


class InsufficientClustersError(EmbeddingError):
    pass


class NoPositiveEigenvalueError(EmbeddingError):
    pass


class TriangulationError(EmbeddingError):
    """The triangle construction for a cluster center is unusable."""


class FictitiousClusterError(EmbeddingError):
    pass


class RankDeficientError(EmbeddingError, ValueError):
    pass


class DuplicatePointsError(ValueError):
    pass


class CsvFormatError(ValueError):
    pass


class EmbeddingWarning(UserWarning):
    """Base class of every warning a pipeline may record."""


class NegativeEigenvalueWarning(EmbeddingWarning):
    pass


class RankDeficientWarning(EmbeddingWarning):
    pass


class InterEdgeShortfallWarning(EmbeddingWarning):
    pass


class PaddedSkeletonWarning(EmbeddingWarning):
    pass


class FictitiousClusterWarning(EmbeddingWarning):
    pass


class CenterFallbackWarning(EmbeddingWarning):
    pass
