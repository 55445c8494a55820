"""Exception hierarchy shared by every module of the package."""


class PlannerError(Exception):
    """Base class for all errors raised by pirrt."""


class InvalidInputError(PlannerError, ValueError):
    """An argument violates a documented precondition (e.g. dimension mismatch).

    ``field`` names the offending attribute when the error comes from validating
    a composite object such as an Environment.
    """

    def __init__(self, message: str, field: str = ""):
        self.field = field
        super().__init__(message)


class EnvironmentInfeasibleError(PlannerError):
    """Free space could not be sampled within the rejection budget."""


class DuplicateVertexError(PlannerError):
    """A vertex with identical coordinates already exists in the graph."""


class DuplicateEdgeError(PlannerError):
    """Self-loop or an edge pair that is already present."""


class GraphStateError(PlannerError):
    """Query against a graph that cannot answer it (e.g. nearest on an empty graph)."""


class ContractViolation(PlannerError):
    """Internal precondition breached, such as backing up a goal vertex."""


class CycleDetectedError(PlannerError):
    """The parent chain from x_init did not reach the goal within |V| steps."""


class NonterminationError(PlannerError):
    """Replan exhausted its sweep budget before the policy became stationary."""


class ScenarioError(PlannerError):
    """Scenario file could not be parsed or failed validation.

    ``path`` holds the offending key path (``obstacles[2].radius``) when known.
    """

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
