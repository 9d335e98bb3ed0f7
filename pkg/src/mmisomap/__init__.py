"""Isometric embedding of data lying on several manifolds."""

from .dcisomap import DCIsomapResult, dc_isomap
from .errors import (CsvFormatError, DisconnectedGraphError, DuplicatePointsError,
                     EmbeddingError, EmbeddingWarning, InsufficientClustersError,
                     NoPositiveEigenvalueError, RankDeficientError)
from .graph import (NeighborhoodGraph, connect_components, eps_graph, geodesic_matrix,
                    knn_graph, label_components, shortest_paths)
from .isomap import isomap, kcc_isomap
from .linalg import RigidTransform, pca_embed, symmetric_eig
from .mds import classical_mds, tau
from .metrics import (geodesic_preservation, procrustes_align, procrustes_residual,
                      residual_variance)
from .misomap import MIsomapResult, m_isomap
from .synth import gen_strip_and_disc, gen_three_strips, gen_two_strips

__version__ = "0.1.0"
