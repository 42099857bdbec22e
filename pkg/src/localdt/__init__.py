"""Motivic Donaldson-Thomas series of local toric surfaces."""

from __future__ import annotations

from .errors import LocalDTError
from .motivic import (
    L,
    L_HALF,
    L_MINUS_HALF,
    ONE,
    ZERO,
    MotivicSeries,
    MotivicWeight,
    adams,
    lefschetz_poly,
    plethystic_exp,
    plethystic_log,
    power_pow,
    render_series,
    render_weight,
    series_inverse,
    specialize,
)
from .multiseries import MultiSeries, multi_exp, multi_log, multi_power
from .toric import (
    Fan2D,
    LocalFan,
    MonomialMap,
    atlas_report,
    chart_frame,
    fan_from_json,
    hirzebruch_fan,
    lift_local,
    make_fan2d,
    p2_fan,
    relation_lattice,
    self_intersection,
    transition,
)
from .nctrace import (
    I2Certificate,
    I2Term,
    TracePoly,
    Word,
    build_certificate,
    expand_certificate,
    gluing_difference,
    parse_tracepoly,
    potential,
    swap_reduce,
    transition_potential,
)
from .numeric import fn_gluing_check, second_order_check
from .dtseries import (
    C3_CLASS,
    P2,
    Fn,
    Partition,
    SurfaceKind,
    c3_series,
    euler_check,
    hilb_series_closed,
    hilb_series_power,
    punctual_kernel,
    punctual_series,
    strata_class,
    strata_classes,
    threefold_class,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
