"""Adaptive enterprise-control engine.

Reacts to critical events: estimates threat probability, diagnoses state via
pattern classifiers, predicts key factors, ranks decision variants, and
produces restoration and correction propositions, orchestrated by a
Horn-clause inference engine with a live operator dialogue.
"""

__version__ = "0.1.0"
