"""Desk-scale simulator of reconfigurable intelligent computational surfaces.

Core ingredients: a 2-D link-budget scenario, a tunable reflect/refract/absorb
surface model, a bank of wave-domain analog operators, a synthetic 8-class
spectrum-occupancy dataset, a trainable diffractive classifier, and the two
end-to-end experiments built from them (inference-driven TDMA throughput and
refracted-interference secrecy rates).  A FastAPI service wraps the package;
the ``ricsim`` CLI is a thin client for it.
"""

from .geometry import RfConstants, Scenario, noise_power, path_gain, place_scenario
from .secrecy import link_rates, optimize_alpha, run_secrecy_experiment, secrecy_rate
from .signals import ComplexSignal, OperatorSpec, apply_operator
from .spectrum import SpectrumClass, SpectrumImage, make_dataset
from .surface import RicsProfile, configure_ra, configure_rr, coherent_array_gain, split_power
from .throughput import allocate_slots, allocate_static, frame_throughput, run_throughput_experiment

__all__ = [
    "RfConstants",
    "Scenario",
    "place_scenario",
    "path_gain",
    "noise_power",
    "RicsProfile",
    "configure_ra",
    "configure_rr",
    "coherent_array_gain",
    "split_power",
    "ComplexSignal",
    "OperatorSpec",
    "apply_operator",
    "SpectrumClass",
    "SpectrumImage",
    "make_dataset",
    "allocate_slots",
    "allocate_static",
    "frame_throughput",
    "run_throughput_experiment",
    "link_rates",
    "secrecy_rate",
    "run_secrecy_experiment",
    "optimize_alpha",
]

__version__ = "0.1.0"
