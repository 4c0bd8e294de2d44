"""Systems with separate internal and external time scales, and simulation
relations between them."""

from .errors import *  # noqa: F401,F403
from .timecore import TimeAxis, TimeOffset, TimeScaleTransformation, concat_tst, inverse_tst
from .signals import (FiniteAlphabet, ProductSpace, RationalInterval, Signal, Trajectory,
                      concat_signal, project, restrict)
from .signalmaps import (Cell, PhiEntry, QuantizerSpec, check_nonanticipation, projection_map,
                         quantize, quantize_with_lookahead)
from .systems import (StateSpacePhiSystem, TimeIndexedStateSpaces, check_state_axiom, closure,
                      external_behavior, make_system, time_indexed_spaces)
from .relations import (Flavor, Relation, RelationVerdict, check_behavior_inclusion,
                        check_bisimulation, check_cover, check_simulation, check_transfer,
                        compose, inverse, synthesize_greatest)

__version__ = "0.1.0"
