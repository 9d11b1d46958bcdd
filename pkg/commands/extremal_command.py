"""
ExtremalCommand - enumerate A-extremal classes and label them with structural forms
"""

from components.formatting import format_report, format_terms, write_json
from commands.base import Command, add_search_arguments, budget_from, jobs_from
from services.errors import EXIT_BUDGET, EXIT_CHECK_FAILED, EXIT_OK
from services.extremal_lab import classify_extremal, converse_check, enumerate_extremal
from services.weight_sets import parse_weight_spec


class ExtremalCommand(Command):
    name = "extremal"
    help = "enumerate and classify A-extremal sequences for the Davenport constant"

    def add_arguments(self, parser):
        parser.add_argument("n", type=int)
        parser.add_argument("spec")
        parser.add_argument("--json", metavar="PATH", default=None, help="also write the report as JSON")
        parser.add_argument("--converse", action="store_true",
                            help="check that every sequence of a listed form is extremal")
        parser.add_argument("--classify", type=int, nargs="+", metavar="X", default=None,
                            help="classify this one sequence instead of enumerating")
        add_search_arguments(parser, with_cache=False)

    def run(self, args) -> int:
        settings = self.lab.settings
        weights = parse_weight_spec(args.spec, args.n)
        budget = budget_from(args, settings)
        jobs = jobs_from(args, settings)

        if args.classify is not None:
            labels = classify_extremal(args.classify, weights)
            print(f"{format_terms(args.classify)}: {', '.join(labels) if labels else 'no known form'}")
            return EXIT_OK

        report = enumerate_extremal(weights.n, weights, budget, jobs)
        print(format_report(report))
        data = report.to_dict()
        exit_code = EXIT_OK
        if report.unmatched:
            exit_code = EXIT_CHECK_FAILED

        if args.converse and report.covered:
            failures = converse_check(weights, budget, jobs, report.davenport_value)
            data['converse_failures'] = [{'terms': list(t), 'labels': l} for t, l in failures]
            print(f"converse failures: {len(failures)}")
            for terms, labels in failures:
                print(f"  {format_terms(terms)}  {', '.join(labels)}")
            if failures:
                exit_code = EXIT_CHECK_FAILED

        if args.json:
            write_json(data, args.json)
        if report.partial:
            return EXIT_BUDGET
        return exit_code
