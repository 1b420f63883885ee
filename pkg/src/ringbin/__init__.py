"""Monte Carlo model of a microring time-bin entangled photon-pair source.

Modules follow the signal chain: :mod:`resonator` (ring comb and drop
spectra), :mod:`pairgen` (pair rates and channel pairs), :mod:`timebin`
(state and AMZI decoders), :mod:`detection` (time tags, histograms, CAR),
:mod:`analysis` (fringe fits) and :mod:`scenario` (configuration and the
end-to-end pipeline).
"""

from .analysis import (FitError, FringeFit, FringeSweep, entanglement_check, fit_sinusoid,
                       visibility_pair)
from .detection import (CoincidenceHistogram, DetectorParams, Router, TimeTagStream, car,
                        coincidence_histogram, simulate_streams)
from .pairgen import (PumpConfig, SourceModel, channel_pairs, double_port_enhancement, pair_rate,
                      solve_backscatter)
from .resonator import (RingParams, double_pump_drop_spectrum, drop_transmission,
                        resonance_comb)
from .scenario import Scenario, load_scenario, run_scenario, validate_config
from .timebin import AmziConfig, TimeBinState, amzi_route, xbasis_probabilities

__version__ = "0.1.0"
