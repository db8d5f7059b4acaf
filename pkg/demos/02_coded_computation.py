"""One coded computation with stragglers, decoded two ways.

Eight 5x5 data blocks are encoded onto 100 workers. Each worker applies
``x sin x`` elementwise to its share. Twenty workers never answer. The
master rebuilds ``f(X_j)`` for every block from the 80 survivors with the
natural cubic spline decoder and with the Berrut rational decoder.

Run: ``python demos/02_coded_computation.py``
"""

import numpy as np

from bscc.coded_pipeline import (
    Dataset,
    EncodingConfig,
    bacc_reconstruct,
    bscc_reconstruct,
    get_target_function,
    make_shares,
    run_workers,
)
from bscc.experiments import relative_error

rng = np.random.default_rng(0)
n_workers, n_blocks, stragglers = 100, 8, 20

cfg = EncodingConfig.chebyshev(n_workers, n_blocks, "lagrange")
data = Dataset(rng.uniform(0, 1, (n_blocks, 5, 5)))
f = get_target_function("xsinx")

shares = make_shares(data, cfg)
print(f"{len(shares)} shares, each of shape {shares[0].value.shape}")

survivors = np.sort(rng.permutation(n_workers)[: n_workers - stragglers])
results = run_workers(shares, f, survivors)
print(f"{len(results)} workers answered")

exact = f(data.blocks)
for name, decode in (("spline", bscc_reconstruct), ("berrut", bacc_reconstruct)):
    e = relative_error(exact, decode(results, cfg))
    print(f"{name:>6} decoder: e_rel = {e:.3e} ({10 * np.log10(e):.1f} dB)")
