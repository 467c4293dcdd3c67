"""Bipartite biregular random graphs: sampling, spectra, and applications.

Subpackages/modules:
  numkernel   -- dense numerical kernels and seeded randomness
  graphgen    -- graph and frame-graph samplers, tangle checks, edge-probability MC
  spectra     -- adjacency/non-backtracking spectra and gap certificates
  clustering  -- frame Markov matrices, eigenvector lifting, spectral clustering
  codes       -- Tanner codes over F2 and distance bounds
  completion  -- matrix completion with biregular masks and error certificates
  cli         -- command-line frontend
"""

__version__ = "0.1.0"

from . import numkernel, graphgen, spectra, clustering, codes, completion

__all__ = [
    "numkernel",
    "graphgen",
    "spectra",
    "clustering",
    "codes",
    "completion",
    "__version__",
]
