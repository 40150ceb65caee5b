"""Atoms trapped near a photonic-crystal band edge, coupled through a waveguide.

Linear and weak-drive optics, strong-drive master-equation dynamics, reduced
effective models and Monte Carlo averages over random atomic positions.
"""

__version__ = "0.1.0"

from .core import (AtomicConfiguration, CapacityError, DensityMatrix, ExcitationBasis,  # noqa: E402
                   IntegrationError, ModelParams, SingularSystemError, StateVector,
                   UndefinedCorrelationError, basis_dimension, enumerate_basis, sample_configuration,
                   sample_configurations, sample_poisson, uniform_stream)
from .hamiltonian import (anharmonicity, bandgap_matrix, build_nonhermitian,  # noqa: E402
                          lindblad_decomposition, max_resonance, resonances, two_excitation_max)
from .weakdrive import (Spectrum, g2_tau, g2_zero, output_field_flux, steady_state,  # noqa: E402
                        transmission_spectrum)
from .master import (evolve_master, max_p1, p1_peak, search_configuration,  # noqa: E402
                     steady_density, sweep_p1)
from .effective import (EffectiveLinearParams, EffectiveNonlinearParams, error_budget,  # noqa: E402
                        effective_max_p1, kappa, linear_effective_transmittance, min_total_error,
                        nonlinear_effective_evolve, overlap, t_dip_analytic, two_level_max_inversion,
                        v_eff)
from .ensemble import (SampleStatistics, averaged_spectrum, g2_histogram,  # noqa: E402
                       omega_max_stats, poisson_averaged_spectrum, resonance_stats, tdip_curve)
from .kernels import BACKEND  # noqa: E402
