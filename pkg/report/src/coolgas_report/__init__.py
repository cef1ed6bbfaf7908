"""Static figure and report generation from coolgas run artifacts.

Consumes only the documented CSV/JSON artifact formats; never imports the
simulation package.
"""

from .artifacts import (ConvergenceFit, CoolingFit, Profile, Series,
                        read_convergence_fit, read_cooling_fit, read_json,
                        read_l1, read_profile, read_series)
from .errors import InputError, ReportError, UsageError
from .render import (PLOTS, ReportSpec, generate_report, render_convergence,
                     render_cooling, render_profile, write_summary_page)

__version__ = "0.1.0"

__all__ = [
    "Series", "Profile", "CoolingFit", "ConvergenceFit",
    "read_series", "read_profile", "read_l1",
    "read_cooling_fit", "read_convergence_fit", "read_json",
    "InputError", "ReportError", "UsageError",
    "PLOTS", "ReportSpec", "generate_report",
    "render_cooling", "render_profile", "render_convergence",
    "write_summary_page",
    "__version__",
]
