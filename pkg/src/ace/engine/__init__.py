from .solver import (
    Ask,
    BuiltinCall,
    BuiltinError,
    BuiltinModeError,
    BuiltinRegistry,
    DepthLimitError,
    EngineError,
    GoalNode,
    Solution,
    Solver,
)
from .builtins import standard_registry, evaluate_expression, EvalError
from .propositional import (
    DialogueResult,
    DialogueState,
    dialogue_step,
    forward_chain,
)

__all__ = [
    "Ask",
    "BuiltinCall",
    "BuiltinError",
    "BuiltinModeError",
    "BuiltinRegistry",
    "DepthLimitError",
    "DialogueResult",
    "DialogueState",
    "EngineError",
    "EvalError",
    "GoalNode",
    "Solution",
    "Solver",
    "dialogue_step",
    "evaluate_expression",
    "forward_chain",
    "standard_registry",
]
