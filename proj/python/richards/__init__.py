"""Python bindings for the Richards' equation linearization laboratory."""

from ._richards import (
    VanGenuchtenParams,
    LipschitzInfo,
    Mesh,
    BenchmarkReport,
    water_content,
    dtheta_dpsi,
    conductivity,
    dK_dpsi,
    lipschitz_info,
    build_structured,
    theoretical_rate,
    lscheme_condition,
    lscheme_condition_constant_k,
    poincare_constant,
    example1,
    example2,
    contraction_sweep,
)

__all__ = [
    "VanGenuchtenParams",
    "LipschitzInfo",
    "Mesh",
    "BenchmarkReport",
    "water_content",
    "dtheta_dpsi",
    "conductivity",
    "dK_dpsi",
    "lipschitz_info",
    "build_structured",
    "theoretical_rate",
    "lscheme_condition",
    "lscheme_condition_constant_k",
    "poincare_constant",
    "example1",
    "example2",
    "contraction_sweep",
]
