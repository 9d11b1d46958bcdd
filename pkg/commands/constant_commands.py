"""
Constant commands - davenport (D_A(n)) and e-constant (E_A(n))
Both read exact values from the result cache and write fresh ones back
"""

from components.formatting import format_record
from commands.base import Command, add_search_arguments, budget_from, jobs_from
from services.davenport_search import KIND_D, KIND_E, davenport, e_constant
from services.errors import EXIT_BUDGET, EXIT_OK
from services.logger import Logger
from services.weight_sets import parse_weight_spec


class _ConstantCommand(Command):
    constant_kind = KIND_D

    def add_arguments(self, parser):
        parser.add_argument("n", type=int)
        parser.add_argument("spec", help="U, Usq, Q, S, L:<p'> or explicit:<v1,v2,...>")
        add_search_arguments(parser)

    def compute(self, weights, args):
        raise NotImplementedError

    def run(self, args) -> int:
        weights = parse_weight_spec(args.spec, args.n)
        cache = None if args.no_cache else self.lab.cache

        record = cache.get(weights.n, weights.spec, self.constant_kind) if cache else None
        if record is not None and record.is_exact:
            Logger.info(f"Cache hit for {self.constant_kind}_{weights.spec}({weights.n})")
        else:
            record = self.compute(weights, args)
            if cache:
                cache.put(record)

        print(format_record(record))
        return EXIT_OK if record.is_exact else EXIT_BUDGET


class DavenportCommand(_ConstantCommand):
    name = "davenport"
    help = "exact A-weighted Davenport constant D_A(n)"
    constant_kind = KIND_D

    def compute(self, weights, args):
        settings = self.lab.settings
        return davenport(weights.n, weights, budget_from(args, settings), jobs_from(args, settings))


class EConstantCommand(_ConstantCommand):
    name = "e-constant"
    help = "A-weighted constant E_A(n) (zero sums of length exactly n)"
    constant_kind = KIND_E

    def compute(self, weights, args):
        settings = self.lab.settings
        return e_constant(weights.n, weights, budget_from(args, settings), jobs_from(args, settings),
                          max_n=settings.e_constant_max_n)
