"""dagproof: natural-deduction dag compression toolkit for minimal
implicational logic."""

from .formula import (Formula, Var, Falsum, Imp, And, Or, ParseError,
                      parse_formula, to_text, weight, subformulas,
                      purely_implicational, variables_of, Sequent, DiGraph,
                      GraphFormatError, parse_graph)
from .nd import (LEAF, IMP_INTRO, IMP_ELIM, REP, SEP, Node, Deduction,
                 DeductionError, UnfoldBudgetExceeded, ThreadCapExceeded,
                 check_local_correctness, assumption_sets, proves, threads,
                 proves_threads, proves_modified, unfold, is_normal,
                 measures, to_document, from_document, to_dot)
from .hsc import (SequentProof, prove_lm, check_sc_proof, sc_to_nd,
                  sc_height, sc_size, render_sc, ProofSearchTimeout)
from .compress import (ThreadSet, CompressionTrace, compress_levels,
                       insert_separation, extract_fst,
                       verify_local_coherency, cleanse, compress_proof,
                       CompressError, CoherencyError, CleansingError,
                       BoundViolation)
from .encode import (encode_hamiltonian, hamiltonian_oracle, classical_sat,
                     statman_translate, KripkeModel, kripke_valid,
                     DeskBoundError, TranslationError)

__version__ = "0.1.0"
