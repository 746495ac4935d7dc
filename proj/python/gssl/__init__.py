"""Graph self-supervised learning toolkit backed by a C++ core.

The heavy lifting (autodiff, encoders, SSL objectives, training, evaluation)
lives in the compiled ``gssl._core`` module; this package re-exports it.
"""

from gssl._core import (  # noqa: F401
    ConfigError,
    DataError,
    GsslError,
    canonicalize_config,
    gen_bench_bundle,
    gen_synth_bundle,
    import_embeddings,
    kmeans_nmi,
    logistic_probe,
    methods,
    nt_xent,
    pretrain_embed,
    project_2d,
    reproduce,
    similarity_search,
    __version__,
)
