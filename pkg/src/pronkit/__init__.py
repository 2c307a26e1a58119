"""pronkit: word-level pronunciation and lexical-stress error detection.

The pipeline recognizes phonemes (mock producers stand in for a real
decoder), aligns them against the canonical pronunciation, scores each
canonical position with a native-pronunciation model, and turns the
result into per-word mispronunciation probabilities. Companion modules
generate synthetic mispronunciation corpora, evaluate detectors with
precision-recall machinery, assess lexical stress, and provide a small
closed-form Bayesian toolbox.
"""

from .align import (
    Alignment,
    AlignmentCosts,
    AlignOp,
    NotAnError,
    OpKind,
    Severity,
    WordEditSummary,
    align,
    severity_from_distance,
    word_edit_summaries,
)
from .detector import (
    DecisionMode,
    DetectorConfig,
    WordErrorProbs,
    bayes_error_posterior,
    detect,
    multitask_loss,
    weighted_joint_loss,
    word_error_probs,
)
from .errorgen import (
    AugmentationRole,
    AugmentationTuple,
    LabeledPerturbation,
    PerturbConfig,
    augmentation_plan,
    perturb,
    perturb_sentence,
    perturb_stress,
    word_labels,
)
from .errors import LengthMismatchError, PronkitError, ShapeMismatchError
from .metrics import (
    AgreementBand,
    ConfusionCounts,
    EvalReport,
    PRCurve,
    accuracy,
    auc,
    confusion,
    f1,
    fnr,
    fpr,
    mushra_aggregate,
    pr_curve,
    precision,
    recall,
    severity_band,
    wilson_ci,
)
from .phonemes import (
    Phoneme,
    PhonemeInventory,
    PhonemeSeq,
    SentencePhonemes,
    StressPattern,
    parse_phoneme_seq,
    stress_pattern,
    strip_stress,
)
from .pipeline import (
    SystemConfig,
    SystemVariant,
    run_experiment,
    score_corpus,
    score_utterance,
)
from .probkit import (
    DiscreteDistribution,
    GaussianBelief,
    LinearKernel,
    RbfKernel,
    discrete_posterior,
    gaussian_posterior,
    gp_posterior,
    kernel_eval,
)
from .pronmodel import (
    LikelihoodSeq,
    PronunciationModel,
    combine,
    pm_likelihood,
    train_pm,
)
from .recognizer import (
    Hypothesis,
    NBestResult,
    NoisyRecognizer,
    OracleRecognizer,
    Utterance,
    load_corpus,
    noisy_recognizer,
    oracle_recognizer,
)
from .stress import (
    attention,
    detect_stress_errors,
    differential_ratios,
    heuristic_stress_probs,
)

__version__ = "0.1.0"
