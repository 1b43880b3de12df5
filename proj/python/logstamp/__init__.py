"""Log template mining via sequence labelling."""

from ._logstamp import (
    Dataset,
    LogstampError,
    Pipeline,
    Record,
    dbscan,
    generate_synthetic,
    load_dataset,
    make_dataset,
    pair_counts,
    rand_index,
    run_experiment,
    split_train,
    tokenize,
)

__all__ = [
    "Dataset",
    "LogstampError",
    "Pipeline",
    "Record",
    "dbscan",
    "generate_synthetic",
    "load_dataset",
    "make_dataset",
    "pair_counts",
    "rand_index",
    "run_experiment",
    "split_train",
    "tokenize",
]
