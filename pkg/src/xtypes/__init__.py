"""Answer-type prediction for natural-language questions over a KG type system.

The pipeline predicts a coarse answer category (boolean / number / string /
date / resource) and, for resource questions, a ranked list of fine-grained
KG types.  Type ranking runs in three stages: the training-time type
vocabulary is clustered over type vectors, a per-cluster classifier matches
questions to clusters, and per-type rankers score types inside the opened
clusters; a learned combiner fuses the two scores.
"""

__version__ = "0.1.0"
