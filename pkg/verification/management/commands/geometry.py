from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from geometry.exceptions import SolverError, SpecError
from verification import pipeline

EXIT_RESIDUALS = 1
EXIT_SPEC = 2


class Command(BaseCommand):
    help = "Check identities, solve Levi-Civita connections or evaluate expressions on a .geo geometry"

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest="subcommand", required=True)

        check = subparsers.add_parser("check", help="Run residual suites")
        check.add_argument("spec", help="Shipped geometry name or path to a .geo file")
        check.add_argument("--suite", choices=pipeline.SUITES, default="all")
        check.add_argument("--seed", type=int, default=None)
        check.add_argument("--samples", type=int, default=None)
        check.add_argument("--order", type=int, default=None)
        check.add_argument("--timings", action="store_true")
        check.add_argument("--out", default=None)

        solve = subparsers.add_parser("levi-civita", help="Solve for the Levi-Civita connection")
        solve.add_argument("spec")
        solve.add_argument("--seed", type=int, default=None)
        solve.add_argument("--order", type=int, default=None)
        solve.add_argument("--timings", action="store_true")
        solve.add_argument("--out", default=None)

        evaluate = subparsers.add_parser("eval", help="Evaluate an expression")
        evaluate.add_argument("spec")
        evaluate.add_argument("--expr", required=True)

    def handle(self, *args, **options):
        subcommand = options["subcommand"]
        try:
            spec = pipeline.load(options["spec"], order=options.get("order"))
        except FileNotFoundError as e:
            raise CommandError(str(e), returncode=EXIT_SPEC)
        except SpecError as e:
            raise CommandError(f"invalid geometry: {e}", returncode=EXIT_SPEC)

        if subcommand == "eval":
            try:
                result = pipeline.run_eval(spec, options["expr"])
            except SpecError as e:
                raise CommandError(str(e), returncode=EXIT_SPEC)
            self.stdout.write(result["result"])
            return

        seed = options["seed"]
        if subcommand == "check":
            report = pipeline.run_check(
                spec,
                suite=options["suite"],
                seed=seed,
                samples=options["samples"],
                timings=options["timings"],
            )
            self._emit(report, options["out"])
            if not report["ok"]:
                raise CommandError("residuals are nonzero", returncode=EXIT_RESIDUALS)
            return

        try:
            report = pipeline.run_levi_civita(spec, seed=seed, timings=options["timings"])
        except SolverError as e:
            self._emit(e.residuals, options["out"])
            raise CommandError("levi-civita residuals are nonzero", returncode=EXIT_RESIDUALS)
        self._emit(report, options["out"])

    def _emit(self, report, out):
        text = pipeline.render(report)
        if out:
            Path(out).write_text(text, encoding="utf-8")
        self.stdout.write(text, ending="")
