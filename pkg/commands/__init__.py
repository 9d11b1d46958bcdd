"""
Commands module for the Davenport lab
One class per CLI subcommand, registered in this order
"""

from .constant_commands import DavenportCommand, EConstantCommand
from .extremal_command import ExtremalCommand
from .jacobi_command import JacobiCommand
from .sumset_command import SumsetCommand
from .verify_command import VerifyCommand
from .weights_command import WeightsCommand

COMMANDS = [
    JacobiCommand,
    WeightsCommand,
    SumsetCommand,
    DavenportCommand,
    EConstantCommand,
    ExtremalCommand,
    VerifyCommand,
]

__all__ = ['COMMANDS'] + [c.__name__ for c in COMMANDS]
