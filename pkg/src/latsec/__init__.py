"""Lattice coset coding for the Gaussian wiretap channel.

Exact lattices and Construction A, theta series (enumeration, closed
forms, Eisenstein/discriminant machinery, extremal synthesis), secrecy
gains, nested-lattice multilevel codecs, and Monte Carlo validation of
the eavesdropper's correct-decision bound.
"""

from .lattices import (
    BinaryCode,
    Lattice,
    LatticePoint,
    catalog,
    catalog_lookup,
    checkerboard_lattice,
    closest_point,
    construction_a,
    coset_label,
    enumerate_points,
    enumerate_shells,
    gosset_lattice,
    integer_lattice,
    l8_lattice,
    min_norm_and_kissing,
)
from .qexpansions import (
    ThetaPolynomial,
    bernoulli,
    extremal_theta,
    weak_secrecy_gain_exact,
)
from .theta import (
    SecrecyGain,
    discriminant_delta,
    eisenstein,
    jacobi_theta,
    jacobi_identity_residual,
    secrecy_function,
    secrecy_gain_asymptotic,
    secrecy_gain_lower_bound,
    strong_secrecy_gain,
    theta_closed_form,
    theta_enum,
)
from .coding import (
    CosetCode,
    NestedChain8,
    RatePlan,
    build_coset_code,
    coset_decode,
    encode,
    gsnr,
    multilevel_decode,
    multilevel_encode,
    operating_point,
    random_bit_rate,
)
from .channel import (
    ChannelParams,
    SimResult,
    bound_ratio,
    pce_4qam,
    pce_coset_z2,
    q_function,
    simulate_wiretap,
)

__version__ = "0.1.0"
