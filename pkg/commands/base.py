"""
Command base - shared plumbing for lab subcommands
"""

import argparse

from services.davenport_search import Budget


class Command:
    """Base class for a subcommand; subclasses set name/help and implement run()"""

    name = ""
    help = ""

    def __init__(self, lab):
        self.lab = lab

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        pass

    def run(self, args: argparse.Namespace) -> int:
        raise NotImplementedError


def add_search_arguments(parser: argparse.ArgumentParser, with_cache: bool = True) -> None:
    group = parser.add_argument_group("search budget")
    group.add_argument("--jobs", type=int, default=None, help="worker processes (default from settings)")
    group.add_argument("--max-nodes", type=int, default=None, help="node budget for the whole search")
    group.add_argument("--max-seconds", type=float, default=None, help="wall-clock budget in seconds")
    if with_cache:
        group.add_argument("--no-cache", action="store_true", help="neither read nor write the result cache")


def budget_from(args: argparse.Namespace, settings) -> Budget:
    return Budget(
        max_nodes=args.max_nodes if args.max_nodes is not None else settings.max_nodes,
        max_seconds=args.max_seconds if args.max_seconds is not None else settings.max_seconds,
    )


def jobs_from(args: argparse.Namespace, settings) -> int:
    return max(1, args.jobs if args.jobs is not None else settings.jobs)
