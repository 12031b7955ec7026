__version__ = '0.1.0'

from .grid import VelocityMap, SeismicGather, AcquisitionGeometry
from .preprocessing import minmax_normalize, denormalize
