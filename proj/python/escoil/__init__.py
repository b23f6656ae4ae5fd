"""Emulated single-coil MRI: fit complex coil weights to the root-sum-square image."""

from ._core import (
    DataError,
    DegenerateError,
    DimensionError,
    DivergenceError,
    DomainError,
    Error,
    FormatError,
    IllConditionedError,
    IoError,
    TruncationError,
    apply,
    apply_kspace,
    eigencoil,
    fastmri_supported,
    fit,
    hellinger_distance,
    lls_init,
    objective,
    phantom,
    read_volume,
    reconstruct,
    rss,
    slice_reports,
    ssim,
    synth,
    write_volume,
)

__all__ = [name for name in dir() if not name.startswith("_")]
