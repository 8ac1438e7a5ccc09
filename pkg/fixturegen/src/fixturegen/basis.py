"""Minimal Gaussian basis data for the bundled mean-field engine.

Only s-type shells are carried, which covers the fixture molecules
(hydrogen and helium species in STO-3G).
"""

from __future__ import annotations

# element -> list of shells; each shell is (exponents, contraction coeffs)
# Coefficients refer to normalized primitives; the contracted function is
# renormalized at build time.
STO_3G = {
    "H": [
        (
            (3.42525091, 0.62391373, 0.16885540),
            (0.15432897, 0.53532814, 0.44463454),
        )
    ],
    "He": [
        (
            (6.36242139, 1.15892300, 0.31364979),
            (0.15432897, 0.53532814, 0.44463454),
        )
    ],
}

BASIS_SETS = {"sto-3g": STO_3G}

NUCLEAR_CHARGE = {"H": 1, "He": 2}

ANGSTROM_TO_BOHR = 1.0 / 0.529177210903


def shells_for(element: str, basis: str):
    try:
        table = BASIS_SETS[basis.lower()]
    except KeyError:
        raise ValueError(f"unknown basis {basis!r}; available: {sorted(BASIS_SETS)}") from None
    try:
        return table[element]
    except KeyError:
        raise ValueError(
            f"element {element!r} not available in {basis} (s-shell elements only: "
            f"{sorted(table)})"
        ) from None
