"""
SumsetCommand - weighted sums of a sequence over Z_n
Modes: the full sum A*x1 + ... + A*xk, every subsequence sum, or those sums by length
"""

from components.formatting import format_set, format_terms
from commands.base import Command
from services.errors import InvalidInputError
from services.weight_sets import parse_weight_spec
from services.zerosum_engine import coset_sumset, reach, reach_by_length


MODE_SUM = "sum"
MODE_REACH = "reach"
MODE_LENGTHS = "lengths"


class SumsetCommand(Command):
    name = "sumset"
    help = "A-weighted sums of x1..xk over Z_n"

    def add_arguments(self, parser):
        parser.add_argument("n", type=int)
        parser.add_argument("spec")
        parser.add_argument("terms", type=int, nargs="+")
        parser.add_argument("--mode", choices=(MODE_SUM, MODE_REACH, MODE_LENGTHS), default=MODE_SUM,
                            help="sum: A*x1 + ... + A*xk; reach: sums over nonempty subsequences; "
                                 "lengths: those sums split by subsequence length")

    def run(self, args) -> int:
        weights = parse_weight_spec(args.spec, args.n)
        terms = [t % args.n for t in args.terms]
        if args.mode == MODE_SUM:
            values = coset_sumset([(weights, x) for x in terms], args.n)
            print(f"sum of {weights.spec}*x over {format_terms(terms)}: {format_set(values)}")
            print(f"covers Z_{args.n}: {'yes' if len(values) == args.n else 'no'}")
            print(f"zero-sum sequence: {'yes' if 0 in values else 'no'}")
            return 0
        if args.mode == MODE_REACH:
            result = reach(terms, weights)
            print(f"subsequence sums of {format_terms(terms)}: {format_set(result.as_set())}")
            print(f"zero-sum-free: {'no' if 0 in result else 'yes'}")
            return 0
        if args.mode == MODE_LENGTHS:
            result = reach_by_length(terms, weights, cap=self.lab.settings.stratify_cap)
            for length in range(1, len(terms) + 1):
                print(f"length {length}: {format_set(result.exact_length(length))}")
            return 0
        raise InvalidInputError(f"Unknown mode {args.mode}")
