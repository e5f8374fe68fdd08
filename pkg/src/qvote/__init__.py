"""Exact simulation of quantum anonymous voting with anonymity checks."""
from .attacks import (ApparatusSpec, AttackChannel, DetectionReport, apparatus_to_channel,
                      detection_probability, diagonal_phase_attack, identity_attack,
                      max_detection, random_apparatus, single_qubit_attack, theorem_check,
                      validate_isometry, witness_event)
from .ballots import (SwapPairing, WeightClass, apply_swaps, diff_sets, enumerate_weight_class,
                      index_of, swap_pairing)
from .errors import InvalidArgument, ResourceLimit
from .protocol import (Check, Event, Vote, ballot_test, encode_event, enumerate_events,
                       pass_projector, run_honest_round, tally_pvm)
from .qstate import (Ensemble, KrausChannel, StateVector, apply_channel, basis_state, bell_state,
                     measure_projectors, tensor)

__version__ = "0.1.0"
