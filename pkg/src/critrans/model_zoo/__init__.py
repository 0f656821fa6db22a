"""Application presets: five fast-slow SDE models plus branch continuation."""

from .activator_inhibitor import (ActivatorInhibitorAnalytics, HopfNormalFormAnalytics,
                                  activator_inhibitor, correlated_noise_factor, goldbeter_koshland,
                                  goldbeter_koshland_du, hopf_normal_form)
from .base import (EquilibriumBranch, Event, ModelPreset, classify_eigenvalues,
                   equilibrium_branch_sweep, numeric_jacobian)
from .bazykin import BazykinAnalytics, BTLocatorError, SlowPath, bazykin
from .normal_form import normal_form_preset
from .buckling import BucklingAnalytics, NoiseShape, euler_buckling
from .sis import SisAnalytics, sis_adaptive
from .stommel import StommelAnalytics, stommel_cessi

PRESETS = {
    "stommel": stommel_cessi,
    "sis": sis_adaptive,
    "activator-inhibitor": activator_inhibitor,
    "hopf-normal-form": hopf_normal_form,
    "bazykin": bazykin,
    "buckling": euler_buckling,
}

__all__ = [
    "PRESETS", "ModelPreset", "EquilibriumBranch", "Event", "classify_eigenvalues",
    "equilibrium_branch_sweep", "numeric_jacobian", "stommel_cessi", "StommelAnalytics",
    "sis_adaptive", "SisAnalytics", "goldbeter_koshland", "goldbeter_koshland_du",
    "correlated_noise_factor", "activator_inhibitor", "ActivatorInhibitorAnalytics",
    "hopf_normal_form", "HopfNormalFormAnalytics", "bazykin", "BazykinAnalytics", "BTLocatorError",
    "SlowPath", "euler_buckling", "BucklingAnalytics", "NoiseShape", "normal_form_preset",
]
