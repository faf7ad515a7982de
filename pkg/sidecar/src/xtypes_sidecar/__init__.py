"""Transformer encoder sidecar for the answer-type pipeline."""

from .encoder import (
    ConfigError,
    DataError,
    EncodeJob,
    ModelError,
    OUTPUT_KIND,
    POOLING_MODES,
    SidecarError,
    encode_descriptions,
    finetune_then_encode,
    read_cluster_labels,
    read_description_documents,
    read_question_texts,
    write_embedding_file,
)

__all__ = [
    "ConfigError",
    "DataError",
    "EncodeJob",
    "ModelError",
    "OUTPUT_KIND",
    "POOLING_MODES",
    "SidecarError",
    "encode_descriptions",
    "finetune_then_encode",
    "read_cluster_labels",
    "read_description_documents",
    "read_question_texts",
    "write_embedding_file",
]
