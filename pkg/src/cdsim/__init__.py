"""cdsim: evolutionary-game dynamics of collective change on networks.

Simulation and analysis of binary-action games (coordination, linear public
goods) under best-response, logit, and trend-sensitive revision on static and
activity-driven temporal networks; coevolutionary action-opinion dynamics
with committed-minority control; and the closed-form adoption thresholds that
the simulations are checked against.
"""

from ._backend import backend_name

__version__ = "0.1.0"

__all__ = ["backend_name", "__version__"]
