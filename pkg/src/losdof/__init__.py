"""Spatial degrees of freedom of line-of-sight MIMO channels."""

__version__ = "0.1.0"

from .geometry import SPEED_OF_LIGHT, ArrayAperture, SampledGrid, freq2wlen, measure, sample_grid
from .kernels import (KernelKind, Link, compensate_phases, fourier_kernel, fresnel_kernel,
                      green_kernel, kappa_z, kernel_agreement)
from .spectra import (ChannelMatrix, SampledField, Spectrum, apply_channel,
                      build_channel_matrix, eigen_spectrum, empirical_dof, plunge_width)
from .landau import (ConcentrationSpec, DofEstimate, concentration_eigs, crossing_count,
                     dof_los_paraxial, dof_nlos_general, dof_nlos_isotropic_1d,
                     landau_dof_sigma, paraxial_margin, paraxial_margins)
from .sampling import (SpacingPlan, nyquist_density_los, nyquist_density_nlos,
                       rayleigh_plan, rayleigh_product)
