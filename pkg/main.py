#!/usr/bin/env python3
"""
Davenport Lab - weighted zero-sum constants over Z_n
Command-line front end: jacobi, weights, sumset, davenport, e-constant, extremal, verify
"""

import argparse
import sys
import traceback
from typing import List, Optional

from commands import COMMANDS
from services.errors import EXIT_CHECK_FAILED, EXIT_INVALID_INPUT, DavenportError
from services.logger import Logger, set_log_level
from services.result_cache import ResultCache
from services.settings import Settings, load_settings


class DavenportLab:
    """Holds settings and shared services for one CLI invocation"""

    def __init__(self):
        self.settings: Optional[Settings] = None
        self.cache: Optional[ResultCache] = None
        self.commands = {}

    def init_services(self, args: argparse.Namespace) -> None:
        """Settings first, then logging level and the result cache"""
        settings = load_settings(args.config)
        self.settings = settings.with_overrides(cache_path=args.cache, log_level=args.log_level)
        set_log_level(self.settings.log_level)
        self.cache = ResultCache(self.settings.cache_path)
        Logger.debug(f"Settings: {self.settings}")

    def build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog="davenport-lab",
            description="Weighted Davenport constants, extremal sequences and their verification",
        )
        parser.add_argument("--config", default=None, help="settings file (default: $DAVENPORT_CONFIG or ./davenport.ini)")
        parser.add_argument("--cache", default=None, help="JSONL result cache (default: $DAVENPORT_CACHE or settings)")
        parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
        subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
        subparsers.required = True

        for command_class in COMMANDS:
            command = command_class(self)
            sub = subparsers.add_parser(command.name, help=command.help, description=command.help)
            command.add_arguments(sub)
            self.commands[command.name] = command
        return parser

    def run(self, argv: Optional[List[str]] = None) -> int:
        parser = self.build_parser()
        args = parser.parse_args(argv)
        self.init_services(args)
        command = self.commands[args.command]
        Logger.info(f"Running {command.name}")
        return command.run(args)


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command and map failures onto exit codes"""
    lab = DavenportLab()
    try:
        return lab.run(argv)
    except DavenportError as e:
        Logger.error(f"{type(e).__name__}: {e}")
        Logger.debug(traceback.format_exc())
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except (ValueError, OverflowError) as e:
        Logger.error(f"Invalid input: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except Exception as e:
        Logger.error(f"Critical error: {e}")
        traceback.print_exc()
        return EXIT_CHECK_FAILED


def safe_main():
    sys.exit(main())


if __name__ == '__main__':
    safe_main()
