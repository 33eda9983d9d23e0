"""Weighted badly approximable vectors over totally real number fields:
exact field arithmetic, exclusion boxes, referee-validated hyperplane games,
the explicit winning strategy, and diagonal flows on lattices."""

from .fieldarith import (FieldElement, FieldSpec, WeightVector, embed,
                         embed_floats, height, make_field, make_weights,
                         weighted_norm)
from .badset import (BadnessReport, Excluded, ExclusionBox, Survives,
                     badness_constant, enumerate_denominators, exclusion_box,
                     membership, ratio_point)
from .games import (AliceWins, Ball, GameTranscript, HyperplaneNeighborhood,
                    ProductStrategy, Undetermined, alice_move, bob_move,
                    new_game, outcome, replay_transcript, save_transcript,
                    win_check_potential)
from .strategy import (AliceStrategy, StrategyConstants, ball_class,
                       compute_constants, partition_index, unique_point)
from .bobs import (BobPolicy, build_target_pool, greedy_rational_bob,
                   random_bob, scripted_bob)
from .flows import (LatticeBasis, SystoleSample, flow_matrix, lattice_LK,
                    psi, systole, trajectory, u_matrix)
from . import errors

__version__ = "0.1.0"
