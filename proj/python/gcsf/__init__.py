"""Generalized curve shortening flow v = G(k) k on convex plane curves."""

from ._gcsf import (
    AngleGrid,
    BlowUpEstimate,
    CircleSolution,
    ConvexityLossError,
    CurvatureProfile,
    DegenerateProfileError,
    EvaluationError,
    GcsfError,
    HypothesisError,
    HypothesisReport,
    NotClosedError,
    SpeedLaw,
    SupportProfile,
    Trajectory,
    area,
    boundary_points,
    bracket_blowup,
    check_hypotheses,
    circle_profile,
    cli,
    containment_run,
    ellipse_profile,
    ellipse_support,
    hausdorff_to_unit_disk,
    k_from_support,
    length,
    monitors,
    parse_law,
    polygon_brute_force,
    power_law,
    radii,
    run,
    summarize,
    support_from_curvature,
)

__all__ = [name for name in dir() if not name.startswith("_")]
