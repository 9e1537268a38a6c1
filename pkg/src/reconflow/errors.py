"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str
    severity: str = "error"

    def format(self, filename: str = "<model>") -> str:
        return f"{filename}:{self.line}:{self.col}: {self.severity}: {self.message}"


class ReconflowError(Exception):
    pass


class ModelError(ReconflowError):
    """Raised by the front-end; carries every diagnostic found."""

    kind = "error"

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.format() for d in self.diagnostics))


class ModelSyntaxError(ModelError):
    kind = "syntax"


class SemanticError(ModelError):
    kind = "semantic"


class RuntimeTrap(ReconflowError):
    def __init__(self, module: str, line: int, col: int, reason: str = "division by zero"):
        self.module, self.line, self.col, self.reason = module, line, col, reason
        super().__init__(f"{module}:{line}:{col}: {reason}")


class ReconfigViolation(ReconflowError):
    """A callfpga executed while the loaded context lacks the function."""

    def __init__(self, fn: str, loaded: str | None, cycle: int, module: str, line: int = 0, col: int = 0):
        self.fn, self.loaded, self.cycle = fn, loaded, cycle
        self.module, self.line, self.col = module, line, col
        super().__init__(
            f"{module}:{line}:{col}: callfpga {fn} at cycle {cycle} "
            f"while context {loaded or 'NONE'} is loaded"
        )

    def to_dict(self) -> dict:
        return {
            "error": "ReconfigViolation",
            "function": self.fn,
            "loaded_context": self.loaded,
            "cycle": self.cycle,
            "module": self.module,
            "line": self.line,
            "col": self.col,
        }


class LivelockGuard(ReconflowError):
    pass


class UnknownModule(ReconflowError):
    pass


class UnknownContext(ReconflowError):
    pass


class UnknownChannel(ReconflowError):
    pass


class TransformError(ReconflowError):
    pass


class UnannotatedCompute(ReconflowError):
    pass


class CombinatorialLimit(ReconflowError):
    def __init__(self, count: int, cap: int):
        self.count, self.cap = count, cap
        super().__init__(f"{count} deadlock candidates exceed the cap of {cap}; raise --target-cap")


class PropertyFailsOnGoldenModel(ReconflowError):
    def __init__(self, prop_id: str):
        self.prop_id = prop_id
        super().__init__(f"property {prop_id} fails on the fault-free model")
