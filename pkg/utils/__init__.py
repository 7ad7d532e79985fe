"""
Utils package for the Maslov index toolkit
"""

from .functions import *
from .plots import plot_bands, plot_curves, plot_rectangle

__all__ = [
    'load_environment',
    'make_json_serializable',
    'dumps',
    'write_csv',
    'spectrum_frame',
    'reports_frame',
    'load_run_config',
    'plot_bands',
    'plot_curves',
    'plot_rectangle'
]
