"""Exact and asymptotic heights of p-watermelons with wall."""
from .asymptotics import (KappaResult, LimitCdfQuery, kappa, lambda_sum, limit_cdf_det, limit_cdf_p1,
                          limit_cdf_schehr, m_const, moment_asymptotic, t_det)
from .dirichlet import (DirichletQuery, G_exact, G_expansion, g_asymptotic, g_exact, lattice_sum, omega,
                        z_continued, z_residue, z_series_direct)
from .errors import ConvergenceError, MelonError, PoleError, ResourceLimitError
from .exact import (CountResult, HeightDistribution, PathFamily, WatermelonSpec, count_bounded, count_total,
                    count_total_closed, compute_height, enumerate_all, exact_moment, height_pmf)
from .sampler import EmpiricalStats, SamplerConfig, completions, empirical_height, sample_watermelon

__version__ = "0.1.0"
