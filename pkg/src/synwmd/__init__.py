"""Syntax-aware word mover's distance between dependency-parsed sentences.

The distance between two sentences is the cost of an exact optimal
transport plan between their words.  Word flows come from PageRank over a
corpus-level dependency co-occurrence graph, and word distances are
augmented with subtree context vectors, so both how much a word matters
and what it means locally enter the score.
"""

__version__ = "0.1.0"

from .conllu import (
    Corpus,
    DepSentence,
    Token,
    children_within,
    parse_conllu,
    read_conllu,
    tree_hop_distance,
    write_conllu,
)
from .context import SentenceContext, Subtree, build_context, cost_matrix, extract_subtrees
from .embeddings import (
    ContextualEmbeddings,
    IdfTable,
    StaticEmbeddings,
    WhiteningTransform,
    compute_idf,
    fit_whitening,
    load_contextual,
    load_static,
    read_contextual,
    read_static,
)
from .errors import (
    CyclicTree,
    DanglingHead,
    DegenerateInput,
    DegeneratePopulation,
    DimensionMismatch,
    DuplicateSentenceId,
    DuplicateWordWarning,
    EmptyFile,
    EmptySentenceAfterFiltering,
    EmptySideAfterFiltering,
    FoldTooSmall,
    IndexOutOfRange,
    MalformedLine,
    MissingContextualVector,
    MissingVector,
    MultipleRoots,
    NonConvergenceWarning,
    NumericalFailure,
    ScoreUndefined,
    SynwmdError,
    Unbalanced,
    UnknownTokenReference,
    ZeroVectorWarning,
)
from .evaluation import (
    EvalReport,
    StsDataset,
    StsPair,
    average_ranks,
    eval_cls,
    eval_sts,
    knn_classify,
    load_sentence_texts,
    load_sts_tsv,
    spearman,
    stratified_folds,
)
from .filters import TokenFilter, default_stopwords, load_stopwords
from .flows import (
    CooccurrenceGraph,
    FlowAssignment,
    PageRankScores,
    assign_flows,
    build_graph,
    weighted_pagerank,
)
from .scoring import (
    PRESETS,
    CorpusArtifacts,
    MethodConfig,
    PairScore,
    mean_pairwise_cosine,
    preset,
    score_pair,
    score_pairs,
)
from .transport import TransportPlan, TransportProblem, solve_entropic, solve_exact

__all__ = [
    "__version__",
    "Corpus",
    "DepSentence",
    "Token",
    "children_within",
    "parse_conllu",
    "read_conllu",
    "tree_hop_distance",
    "write_conllu",
    "SentenceContext",
    "Subtree",
    "build_context",
    "cost_matrix",
    "extract_subtrees",
    "ContextualEmbeddings",
    "IdfTable",
    "StaticEmbeddings",
    "WhiteningTransform",
    "compute_idf",
    "fit_whitening",
    "load_contextual",
    "load_static",
    "read_contextual",
    "read_static",
    "CyclicTree",
    "DanglingHead",
    "DegenerateInput",
    "DegeneratePopulation",
    "DimensionMismatch",
    "DuplicateSentenceId",
    "DuplicateWordWarning",
    "EmptyFile",
    "EmptySentenceAfterFiltering",
    "EmptySideAfterFiltering",
    "FoldTooSmall",
    "IndexOutOfRange",
    "MalformedLine",
    "MissingContextualVector",
    "MissingVector",
    "MultipleRoots",
    "NonConvergenceWarning",
    "NumericalFailure",
    "ScoreUndefined",
    "SynwmdError",
    "Unbalanced",
    "UnknownTokenReference",
    "ZeroVectorWarning",
    "EvalReport",
    "StsDataset",
    "StsPair",
    "average_ranks",
    "eval_cls",
    "eval_sts",
    "knn_classify",
    "load_sentence_texts",
    "load_sts_tsv",
    "spearman",
    "stratified_folds",
    "TokenFilter",
    "default_stopwords",
    "load_stopwords",
    "CooccurrenceGraph",
    "FlowAssignment",
    "PageRankScores",
    "assign_flows",
    "build_graph",
    "weighted_pagerank",
    "PRESETS",
    "CorpusArtifacts",
    "MethodConfig",
    "PairScore",
    "mean_pairwise_cosine",
    "preset",
    "score_pair",
    "score_pairs",
    "TransportPlan",
    "TransportProblem",
    "solve_entropic",
    "solve_exact",
]
