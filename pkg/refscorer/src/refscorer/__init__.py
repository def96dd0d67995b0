"""Reference external scorer for the line-delimited scoring protocol."""

__version__ = "0.1.0"

from .server import (
    LinearAdapter,
    ProductAdapter,
    ScorerAdapter,
    ScorerSession,
    build_adapter,
    main,
)

__all__ = [
    "LinearAdapter",
    "ProductAdapter",
    "ScorerAdapter",
    "ScorerSession",
    "build_adapter",
    "main",
]
