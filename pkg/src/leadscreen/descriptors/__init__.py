"""Physicochemical descriptors computed from a :class:`~leadscreen.smiles.MolGraph`."""

from leadscreen.descriptors.core import (
    DESCRIPTOR_FIELDS,
    DescriptorSet,
    aromatic_ring_count,
    compute_all,
    export_tsv,
    hba,
    hbd,
    heavy_atom_count,
    hydrogen_count,
    molecular_weight,
    rotatable_bonds,
)
from leadscreen.descriptors.crippen import atom_types, crippen
from leadscreen.descriptors.tpsa import tpsa

__all__ = [
    "DESCRIPTOR_FIELDS",
    "DescriptorSet",
    "aromatic_ring_count",
    "atom_types",
    "compute_all",
    "crippen",
    "export_tsv",
    "hba",
    "hbd",
    "heavy_atom_count",
    "hydrogen_count",
    "molecular_weight",
    "rotatable_bonds",
    "tpsa",
]
