"""Static liquid-crystal modeling: excluded-volume kernels, Bingham closure, Frank
constants and the one-dimensional smectic model."""
from lcstat.geometry_kernel import RodGeometry
from lcstat.nematic_model import equilibrium_branches
from lcstat.frank import frank_constants
from lcstat.smectic1d import minimize_profile, phase_diagram

name = "lcstat"
