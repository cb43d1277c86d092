"""Figure scripts for multimat run directories.

Consumes only the documented output formats (1D snapshot CSV, 2D VTK
structured points, diffusion-cell metric CSV); no imports from the solver.
"""

from .figures import plot_diffusion_history, plot_field2d, plot_profiles
from .io import read_profile_csv, read_vtk_structured_points

__all__ = [
    "plot_profiles",
    "plot_field2d",
    "plot_diffusion_history",
    "read_profile_csv",
    "read_vtk_structured_points",
]

__version__ = "1.0.0"
