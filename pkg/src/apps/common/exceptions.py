"""Domain failure types shared by every toolkit app."""


class DomainFailure(Exception):
    """
    Base class for failures that are a legitimate outcome of the domain
    (an unreachable target, a scene that cannot be generated) rather than
    a programming or input error. ``code`` is a short machine-readable
    token used by the command-line diagnostics.
    """

    code = "failure"

    def __init__(self, detail="", **context):
        super().__init__(detail)
        self.detail = detail
        self.context = context

    def diagnostic(self):
        """
        Single-line ``<code>: <detail>`` representation.
        """
        detail = " ".join(str(self.detail).split())
        return f"{self.code}: {detail}" if detail else self.code


class GenerationFailure(DomainFailure):
    code = "generation"


class FieldConstructionFailure(DomainFailure):
    code = "construction"


class PlanningFailure(DomainFailure):
    code = "planning"


class UnreachableTarget(PlanningFailure):
    code = "unreachable"


class Stagnation(PlanningFailure):
    code = "stagnation"

    def __init__(self, detail="", last_position=None, **context):
        super().__init__(detail, **context)
        self.last_position = last_position


class TrainingFailure(DomainFailure):
    code = "non_finite_loss"

    def __init__(self, detail="", epoch=None, **context):
        super().__init__(detail, **context)
        self.epoch = epoch


class InferenceFailure(DomainFailure):
    code = "inference"


class MatchFailure(DomainFailure):
    code = "no_match"


class NavigationFailure(DomainFailure):
    code = "navigation"


class SchedulingFailure(DomainFailure):
    code = "no_free_hand"


class ResolutionFailure(DomainFailure):
    code = "unresolved"
