"""pdslab: planted dense subgraph detection, end to end.

Subpackages and modules:

- ``randkit``      seedable sampling primitives and exact PMF arithmetic
- ``graphmodels``  graph containers, null/planted samplers, edge-list I/O
- ``detectors``    linear/scan/derived tests and Monte Carlo error rates
- ``reduction``    the randomized clique-to-dense-subgraph reduction kernel
- ``theorychecks`` executable numeric verification of the supporting lemmas
- ``phaselab``     CLI front-end: generate / test / reduce / sweep / verify
"""

__version__ = "0.1.0"
