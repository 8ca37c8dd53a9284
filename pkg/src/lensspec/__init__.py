"""Exact Laplace spectra of lens spaces and spherical orbifolds."""

__version__ = "0.1.0"

from .lens import (
    IsometryClassKey,
    LensError,
    LensParams,
    SpectrumSlice,
    are_isometric,
    are_isospectral,
    canonical_key,
    isospectral_cutoff,
    make_lens,
    parse_lens,
    spectrum_slice,
)

__all__ = [
    "IsometryClassKey", "LensError", "LensParams", "SpectrumSlice", "are_isometric",
    "are_isospectral", "canonical_key", "isospectral_cutoff", "make_lens", "parse_lens",
    "spectrum_slice",
]
