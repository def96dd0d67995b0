"""Exception hierarchy shared by all gameint modules."""


class GameintError(Exception):
    """Base class for all errors raised by this package."""


class IndexOutOfRange(GameintError):
    """A player index lies outside [0, n)."""


class PlayerInCoalition(GameintError):
    """A target player is already a member of the context coalition."""


class EvaluationFailed(GameintError):
    """A game evaluation could not produce a score."""


class TooManyPlayers(GameintError):
    """Player count exceeds the exact-enumeration limit."""


class OrderOutOfRange(GameintError):
    """Interaction order m lies outside [0, n-2]."""


class BudgetExceeded(GameintError):
    """Exact enumeration would exceed the configured subset budget."""


class EmptyInputSet(GameintError):
    """An input collection contains no inputs."""


class DegenerateRaw(GameintError):
    """A raw strength vector has zero mean and cannot be normalized."""


class FlatProfile(GameintError):
    """max(J) == min(J); the range factor of the proxy is undefined."""


class EmptyBand(GameintError):
    """An order band selects no grid orders."""


class ZeroDenominator(GameintError):
    """A ratio's denominator is zero."""


class InsufficientModels(GameintError):
    """Grid search needs at least three models."""


class MissingMetric(GameintError):
    """A model requested for correlation lacks one of the metrics."""


class AllCandidatesDegenerate(GameintError):
    """Every (a, b, c) candidate failed on at least one model."""


class ConstantInput(GameintError):
    """Pearson correlation is undefined for constant input vectors."""


class IncompleteTable(GameintError):
    """A reward table is missing entries below its max order."""


class ShapeMismatch(GameintError):
    """Operands with incompatible shapes or player counts."""


class InvalidPermutation(GameintError):
    """Not a permutation of the players, or it moves a pinned player."""


class BadGrid(GameintError):
    """A partition grid cannot tile the given input shape."""


class ScorerUnavailable(EvaluationFailed):
    """External scorer process could not be started or has exited."""


class ProtocolViolation(EvaluationFailed):
    """External scorer sent a malformed or non-finite response."""


class ScorerTimeout(EvaluationFailed):
    """External scorer did not respond within the configured timeout."""


class ConfigError(GameintError):
    """Invalid or unknown run-configuration fields."""
