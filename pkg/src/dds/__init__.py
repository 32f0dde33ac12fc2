"""Diverse rule sets: sampled candidates, greedy max-sum diversification."""

__version__ = "0.1.0"

from .dataset import (DatasetError, FeatureSpec, ItemSet, LabeledDataset, UniverseMismatch,
                      class_partition, ingest_csv, load_iris)
from .metrics import (EvalReport, avg_diversity, balanced_accuracy, evaluate, overlap_count,
                      roc_auc_macro)
from .predictor import RuleSetModel, predict, predict_scores
from .rules import QualityParams, Rule, cover, jaccard_distance, objective, quality
from .sampler import (SamplerInput, WeightIndex, build_weight_index_pairs,
                      build_weight_index_triples, sample_rules, subsample_records)
from .selector import SelectionTrace, SelectorConfig, calibrate_lambda, fit, greedy_step
