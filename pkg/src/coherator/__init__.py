"""Globular theories, lift-adding towers and coherence checks."""

from .catalog import identify_cells
from .distributive import verify_law
from .globular import Table, realize, theta_hom
from .oracle import strict_hom_count
from .serialize import parse, serialize
from .soa import build_tower
from .theory import FragmentBounds, Presentation, base_theory

__all__ = [
    "Table",
    "realize",
    "theta_hom",
    "FragmentBounds",
    "Presentation",
    "base_theory",
    "build_tower",
    "verify_law",
    "strict_hom_count",
    "identify_cells",
    "serialize",
    "parse",
]
