"""Rewrite rules, step justification and obligation testing."""
from .engine import (
    Counterexample, GeneratorFailure, Justification, Mismatch, TestedPass,
    check_obligation, justify_step, replay,
)
from .rules import NoMatch, Obligation, Rule, get_rule, list_rules, rule_names

__all__ = [
    "Counterexample", "GeneratorFailure", "Justification", "Mismatch", "TestedPass",
    "check_obligation", "justify_step", "replay", "NoMatch", "Obligation", "Rule", "get_rule",
    "list_rules", "rule_names",
]
