"""Worked instances, random instance streams and empirical verification suites."""
from .catalog import CatalogEntry, catalog_entry, check_expectation, worked_instances
from .generators import TrialConfig, generate_instance
from .verify import (
    CLAIMS,
    ClaimReport,
    run_suite,
    suite_ids,
    verify_claim,
    verify_egalitarian_bounds,
    verify_implication,
)
