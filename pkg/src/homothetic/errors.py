"""Exception hierarchy shared by all modules."""


class HomotheticError(Exception):
    """Base class for every error raised by the package."""


# integration
class IntegrationError(HomotheticError):
    pass


class StepLimitExceeded(IntegrationError):
    pass


class NonFiniteState(IntegrationError):
    pass


class CurvatureVanished(NonFiniteState):
    """|k| dropped below the reconstruction floor in the ideal system."""


class NoSignChange(HomotheticError):
    pass


class Ambiguous(HomotheticError):
    pass


class QuadratureFailure(HomotheticError):
    pass


# root finding
class RootFindError(HomotheticError):
    pass


class MaxIterations(RootFindError):
    pass


class SingularJacobian(RootFindError):
    pass


class EvaluationFailure(RootFindError):
    pass


class NoConvergence(RootFindError):
    pass


# branches
class BranchLost(HomotheticError):
    pass


class DegenerateCircle(BranchLost):
    """Newton landed on the trivial circle family (alpha = 0)."""


class TargetUnreachable(HomotheticError):
    pass


# gluing
class EpsilonZero(HomotheticError):
    pass


class SeamViolation(HomotheticError):
    pass


class ClosureFailure(HomotheticError):
    pass


# verify / cli
class UnknownCheck(HomotheticError):
    pass


class UsageError(HomotheticError):
    pass
