"""Memory-bounded node and edge message-passing protocols on graphs.

Submodules:

* :mod:`edgemp.graphs` - graph type, constructed families, line graphs, light cones
* :mod:`edgemp.protocols` - protocol types and runners, equivariance checks
* :mod:`edgemp.simulation` - edge-to-node simulations
* :mod:`edgemp.mapinf` - MAP evaluators and the 3-round edge protocol on hub-path graphs
* :mod:`edgemp.certificates` - light-cone lower-bound certificates
* :mod:`edgemp.tasks` - counting, duplicate-detection and mirrored-pair tasks
* :mod:`edgemp.ising` - belief propagation and exact marginals on trees
* :mod:`edgemp.gcn` - residual GCN forward passes and the planted star dataset
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapExceededError,
    EdgempError,
    InvalidParameterError,
    InvalidProtocolError,
    MemoryBudgetError,
    UnsupportedModeError,
)
from .graphs import Graph, line_graph  # noqa: E402

__all__ = [
    "__version__",
    "Graph",
    "line_graph",
    "EdgempError",
    "InvalidParameterError",
    "InvalidProtocolError",
    "MemoryBudgetError",
    "UnsupportedModeError",
    "CapExceededError",
]
