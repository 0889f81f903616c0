"""
Connectivity laboratory for sparse random digraphs.

Strongly connected components and reachability (:mod:`diglab.core`),
random and fixture generators (:mod:`diglab.generators`), component
statistics (:mod:`diglab.components`), forward-backward neighbourhood
censuses (:mod:`diglab.local`), branching-process limit values
(:mod:`diglab.theory`) and seeded sweeps (:mod:`diglab.experiment`).
"""
from .core import (ClosureLimitError, Digraph, ReachClosure, SccDecomposition,
                   backward_size_capped, build_digraph, forward_size_capped,
                   reach_closure, read_edgelist, scc_decompose, write_edgelist)
from .generators import (DegreeLaw, GeneratorSpec, derive_seed, fixture,
                         gen_directed_cm, gen_directed_er, generate,
                         sample_degree_sequence)
from .components import (bowtie, condition_counters, empirical_zeta_hat,
                         giant_stats, scc_count_identity, weak_components)
from .local import (canonical_signature, census, census_split, extract_ball,
                    simulate_limit_census, tv_distance)
from .theory import (giant_degree_mass, giant_edge_density,
                     giant_internal_edge_density, solve_limits,
                     zeta_geq_k_proxy)
from .experiment import ExperimentConfig, run_sweep, verify

__version__ = "0.1.0"
