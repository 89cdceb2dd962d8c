"""PPT maps under composition: the graph family ``gamma_{t,A} = t delta + S_A``.

Modules: ``matcore`` (linear algebra), ``channel`` (Choi/transfer algebra),
``graphs`` (graphs, spectra, Lovasz theta), ``classify`` (CP/PPT/positivity
thresholds), ``ebcert`` (exact separability certificates), ``dynamics``
(iterates and their idempotent limit), ``cli``.
"""

__version__ = "0.1.0"
