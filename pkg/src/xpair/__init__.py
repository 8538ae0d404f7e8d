"""xpair: exact double Compton (photon-pair) cross sections, rates,
figure grids, and correlated-pair event sampling."""

__version__ = "0.1.0"

from .dcs import (
    KappaSet,
    XsecValue,
    kappas,
    same_direction_double_diff,
    triple_diff_xsec,
    x_function,
)
from .errors import (
    EnvelopeViolationError,
    ForbiddenKinematicsError,
    InconsistentKinematicsError,
    IntegrationFailureError,
    IRCutoffError,
    ScenarioError,
    XpairError,
)
from .kinematics import (
    ElectronState,
    EmissionAngles,
    FourVector,
    ScatterConfig,
    emission_angles,
    omega1_max,
    omega1_max_approx,
    omega1_max_dressed,
    omega2,
    quasimomentum,
    reconstruct_final_electron,
)
from .scs import SingleComptonConfig, omega_prime, single_diff_xsec, spectral_G
from .units import CONSTANTS, kev_to_natural, natural_to_kev
