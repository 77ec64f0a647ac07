"""Real Bloch-vector dynamics of coupled qudits in time-dependent fields."""

__version__ = "0.1.0"

from .basis import BasisLabel, basis_labels, full_basis, gram_check, hermitian_basis_element, tensor_operator
from .dynamics import (
    BlochGenerator,
    BlochState,
    SystemSpec,
    bloch_from_density,
    bloch_length,
    build_hamiltonian,
    compile_generator,
    density_from_bloch,
    energy,
    product_state,
    purity,
    reduced_single,
    rhs_generic,
    rhs_one,
    rhs_three,
    rhs_two,
)
from .field import Constant, Cosine, FieldSpec, FieldTerm, Pulse, Sine
from .integrator import IntegrationConfig, Trajectory, integrate
from .oracle import cross_check, evolve_density, lvn_rhs
from .structure import structure_tables
from .wigner import HalfInteger, six_j, three_jm, triangle_ok
