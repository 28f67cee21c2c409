"""Exceptions and warning categories used across the package."""


class SynwmdError(Exception):
    """Base class for every error raised by this package."""


# ---------------------------------------------------------------------------
# CoNLL-U ingestion

class MalformedLine(SynwmdError):
    """A CoNLL-U line has the wrong column count or a non-integer ID/HEAD."""


class CyclicTree(SynwmdError):
    """Head links of a sentence contain a cycle (self-loops included)."""


class MultipleRoots(SynwmdError):
    """More than one token of a sentence claims head = 0."""


class DanglingHead(SynwmdError):
    """A head index does not refer to any token of the sentence."""


class DuplicateSentenceId(SynwmdError):
    """Two sentences in one corpus share the same id."""


class IndexOutOfRange(SynwmdError):
    """A token index does not exist in the sentence."""


# ---------------------------------------------------------------------------
# Embedding stores

class DimensionMismatch(SynwmdError):
    """A vector row does not match the dimensionality of the store."""


class EmptyFile(SynwmdError):
    """An embedding source contained no usable records."""


class DegeneratePopulation(SynwmdError):
    """Whitening was asked to fit a population of identical vectors."""


class MissingContextualVector(SynwmdError):
    """A contextual store has no vector for a referenced (sentence, token)."""


class UnknownTokenReference(SynwmdError):
    """A contextual record points at a token that is not in the corpus."""


class MissingVector(SynwmdError):
    """A token that must be embedded has no vector under the active policy."""


# ---------------------------------------------------------------------------
# Filtering, flows, costs

class EmptySentenceAfterFiltering(SynwmdError):
    """No token of a sentence survived the stopword/punctuation/OOV filter."""


class EmptySideAfterFiltering(SynwmdError):
    """A cost matrix was requested for a side with no flow carriers."""


# ---------------------------------------------------------------------------
# Optimal transport

class Unbalanced(SynwmdError):
    """Supply and demand totals disagree beyond tolerance."""


class NumericalFailure(SynwmdError):
    """The exact solver lost numerical footing (should not happen)."""


# ---------------------------------------------------------------------------
# Scoring and evaluation

class ScoreUndefined(SynwmdError):
    """A pair distance is undefined because one side has no carriers."""


class DegenerateInput(SynwmdError):
    """A correlation was requested for a constant vector."""


class FoldTooSmall(SynwmdError):
    """Cross-validation folds cannot be formed from the given examples."""


# ---------------------------------------------------------------------------
# Warning categories

class NonConvergenceWarning(UserWarning):
    """An iteration hit its step limit with the residual above tolerance."""


class ZeroVectorWarning(UserWarning):
    """A zero-norm vector met the cosine metric; its distances default to 1."""


class DuplicateWordWarning(UserWarning):
    """A word appeared more than once in an embedding file; first kept."""
