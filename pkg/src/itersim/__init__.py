"""Cross-model simulations between atomic-snapshot runs and iterated
immediate-snapshot runs, with finite-window checkers for the survivor-set
equivalences in both directions."""

from .core import (ASEvent, ASTrace, BOT, BLOCKED, ContractViolation,
                   IISTrace, InvalidInput, OrderedPartition, RUN, Schedule,
                   SimulationBug, merge_counters, validate_as_trace)
from .kernel import ExecutionRecord, Memory, SNAP, Snap, Write, run
from .imsnap import (all_ordered_partitions, enumerate_is_profiles, iis_run,
                     is_protocol, profile_to_partition, run_is_object)
from .agreement import (ADOPT, CAInstance, CAOutcome, COMMIT, DictHost,
                        RAPInstance, ca_propose, rap_propose)
from .analysis import (AxiomReport, CrossCheckReport, InsufficientData,
                       WindowParams, aware_of, check_is_axioms,
                       check_trace_axioms, default_window_params,
                       participation_set, proposition1_crosscheck,
                       strongly_correct_sink, strongly_correct_window)
from .as_to_iis import (Alg1Result, Simulator, Theorem1Report,
                        check_frontier_agreement, check_level_occupancy,
                        check_theorem1, extract_iis_trace)
from .as_to_iis import simulate as simulate_as_to_iis
from .iis_to_as import (Alg2Result, BASELINE, HELPING, SnapshotOutput,
                        Theorem2Report, check_theorem2, extract_as_trace,
                        round_step, steadily_outputting)
from .iis_to_as import simulate as simulate_iis_to_as
from .schedules import (cyclic_partitions, random_ordered_partition,
                        round_robin_schedule, seeded_as_schedule,
                        seeded_iis_trace, starvation_pattern)
from .serial import (ParseError, load_trace, parse_as_script,
                     parse_iis_script, read_records, records_to_bytes,
                     write_records)

__version__ = "0.1.0"
