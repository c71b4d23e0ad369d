"""Fracture morphology label extraction and evaluation."""

from ._core import (
    AoCode,
    ConfusionTally,
    EmptyCrop,
    Error,
    InvariantViolation,
    MalformedCode,
    MappingConflict,
    MappingTable,
    UnknownClass,
    UnmappedCode,
    ZeroCount,
    expand_dual_bone,
    greedy_match,
    inverse_frequency_weights,
    iou,
    macro_metrics,
    multilabel_metrics,
    parse_ao_code,
    parse_ao_code_list,
    render_split_manifest,
    resize_bilinear,
    run_cli,
    split_sizes,
    stratified_split,
)

DEFAULT_THRESHOLDS = (0.01, 0.05, 0.1, 0.5, 0.8, 0.85)


def main(argv=None):
    """Console entry point mirroring the C++ command-line tool."""
    import sys

    code, out, err = run_cli(list(sys.argv[1:] if argv is None else argv))
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


__all__ = [name for name in dir() if not name.startswith("_")]
