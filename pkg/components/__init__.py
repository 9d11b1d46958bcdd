"""
Components module for the Davenport lab
Contains the text and JSON renderers shared by the CLI commands
"""

from .formatting import (
    format_record,
    format_report,
    format_set,
    format_suite,
    format_symbol,
    format_terms,
    format_weights,
    write_json,
)

__all__ = [
    'format_record',
    'format_report',
    'format_set',
    'format_suite',
    'format_symbol',
    'format_terms',
    'format_weights',
    'write_json',
]
