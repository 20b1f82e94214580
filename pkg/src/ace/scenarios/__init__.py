from .restoration import (
    CauseFinding,
    ExpenseItem,
    ExpenseSheet,
    Proposition,
    RestorationMeasure,
    ScenarioError,
    analyze_causes,
    assess_consequences,
    correct_plans,
    plan_restoration,
    propose_reliability,
    schedule_measures,
    sum_expense_sheets,
)
from .runner import (
    PACKAGE_DIR,
    ScenarioConfig,
    ScenarioPackage,
    assemble_report,
    assess_threat,
    available_packages,
    load_package,
    run_scenario,
    scenario_solver,
)

__all__ = [
    "CauseFinding",
    "ExpenseItem",
    "ExpenseSheet",
    "PACKAGE_DIR",
    "Proposition",
    "RestorationMeasure",
    "ScenarioConfig",
    "ScenarioError",
    "ScenarioPackage",
    "analyze_causes",
    "assemble_report",
    "assess_consequences",
    "assess_threat",
    "available_packages",
    "correct_plans",
    "load_package",
    "plan_restoration",
    "propose_reliability",
    "run_scenario",
    "scenario_solver",
    "schedule_measures",
    "sum_expense_sheets",
]
