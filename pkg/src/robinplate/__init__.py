"""Robin plate eigenvalues on balls and planar domains."""
from .ball import BallParams, RadialMode
from .domains import Domain2D
from .profile import TrialProfile
from .specfun import UltraIndex

__all__ = ["BallParams", "RadialMode", "Domain2D", "TrialProfile", "UltraIndex"]
__version__ = "0.1.0"
