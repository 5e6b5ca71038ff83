from .checks import PROPERTIES, check_properties, failing_properties
from .scenario import ScenarioSpec, adversarial_scenario, catalog_names, catalog_scenario, load_scenario
from .world import TraceReport, World, run_scenario

__all__ = [
    "PROPERTIES",
    "ScenarioSpec",
    "TraceReport",
    "World",
    "adversarial_scenario",
    "catalog_names",
    "catalog_scenario",
    "check_properties",
    "failing_properties",
    "load_scenario",
    "run_scenario",
]
