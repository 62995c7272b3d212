"""Data-driven bounds on truss responses.

Material data are fitted by segmented least squares, a band around the
fit is calibrated so that it holds enough points for a target reliability
and confidence, and the extreme values of a linear response over every
state whose members stay inside the band are found by mixed-integer
linear programming.
"""

__version__ = "0.1.0"
