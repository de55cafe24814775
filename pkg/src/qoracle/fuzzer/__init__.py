from .campaign import CampaignResult, MutantStats, Violation, run_campaign
from .generator import GeneratorConfig, generate_circuit, mutate_circuit
from .mutants import ALL_MUTANTS, CATALOG, MutantId, MutantSpec, is_degenerate, make_mutant
from .shrink import ShrinkError, shrink

__all__ = [
    "ALL_MUTANTS", "CATALOG", "CampaignResult", "GeneratorConfig", "MutantId", "MutantSpec",
    "MutantStats", "ShrinkError", "Violation", "generate_circuit", "is_degenerate",
    "make_mutant", "mutate_circuit", "run_campaign", "shrink",
]
