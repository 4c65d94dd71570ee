"""gridwatch: sleep/wake scheduling and data-recovery simulator for sensor grids."""

__version__ = "0.1.0"
