"""
VerifyCommand - run the embedded verification suite
"""

from components.formatting import format_suite, write_json
from commands.base import Command, add_search_arguments, budget_from, jobs_from
from services.verify_suite import SUITES, parse_perturbations, run_suite


class VerifyCommand(Command):
    name = "verify"
    help = "run the core, extremal or full verification suite"

    def add_arguments(self, parser):
        parser.add_argument("suite", choices=SUITES)
        parser.add_argument("--perturb", action="append", metavar="CHECK_ID:DELTA", default=None,
                            help="shift one expected value (negative control); may repeat")
        parser.add_argument("--json", metavar="PATH", default=None, help="also write the results as JSON")
        add_search_arguments(parser)

    def run(self, args) -> int:
        settings = self.lab.settings
        perturb = parse_perturbations(args.perturb)
        cache = None if args.no_cache else self.lab.cache
        result = run_suite(args.suite, budget_from(args, settings), jobs_from(args, settings),
                           perturb=perturb, cache=cache)
        print(format_suite(result))
        if args.json:
            write_json(result.to_dict(), args.json)
        return result.exit_code
