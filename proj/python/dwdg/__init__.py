"""Python interface to the dual-wind DG convection-diffusion-reaction solver."""

try:
    from dwdg._dwdg import (  # noqa: F401
        convergence,
        example_names,
        infsup,
        mesh_info,
        operator_identity_residuals,
        solve,
        validate,
    )
except ImportError:  # extension on sys.path directly (build-tree runs)
    from _dwdg import (  # noqa: F401
        convergence,
        example_names,
        infsup,
        mesh_info,
        operator_identity_residuals,
        solve,
        validate,
    )

__all__ = [
    "convergence",
    "example_names",
    "infsup",
    "mesh_info",
    "operator_identity_residuals",
    "solve",
    "validate",
]
