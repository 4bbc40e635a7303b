"""Numerical toolkit for the Brownian SYK-Hubbard model."""

__version__ = "0.1.0"

from .chaos import (ChaosResult, ChaosScan, KernelSample, branching_time,
                    chaos_point, kernel_sample, kr_closed, kr_numeric, lyapunov,
                    otoc_log_slope, otoc_volterra, otoc_volterra_matrix,
                    rung_f, rung_table, scan_chaos)
from .majorana import (MajoranaSet, build_majoranas, matrix_exponential,
                       null_space, resolvent_apply)
from .models import (EffectiveModel, ModelParams, build_epr_state, build_h1,
                     build_h2, h2_mode)
from .montecarlo import (McConfig, McEstimate, greens_mc, sample_couplings,
                         sff_mc, step_unitary)
from .sff import (SffResult, count_transitions, maximize_sff, s0,
                  sff_objective, trace_h1_numeric, transition_threshold_estimate)
from .twopoint import (decay_and_frequency, greens_closed, greens_numeric,
                       spectral_closed, spectral_numeric, spectral_peaks)
