"""Exact rational linear algebra and polyhedral geometry."""

from fractions import Fraction as Rat

from .linalg import format_rational, parse_rational
from .maps import AffineMap
from .ops import (FaceCertificate, affine_interpolate, equalizer, fiber_product, fixed_locus,
                  image, is_iso_onto_face, lattice_complement, maps_agree_on, maps_into, preimage,
                  project)
from .polyhedron import Polyhedron, VRep, product

__all__ = [
    "Rat", "AffineMap", "Polyhedron", "VRep", "FaceCertificate", "product",
    "image", "preimage", "project", "fiber_product", "equalizer", "fixed_locus",
    "is_iso_onto_face", "affine_interpolate", "maps_agree_on", "maps_into", "lattice_complement",
    "parse_rational", "format_rational",
]
