"""
Command-line interface for the regularization toolkit.
Subcommands: regularize, compare, synthesize, verify, survey.
"""
import argparse
import logging
import os
import sys
from typing import List, Optional

from pydantic import ValidationError

from ..generators.file_generators import ReportWriterFactory
from ..models.config import (
    Arithmetic, CompareRequest, FormKind, RankPolicy, RegularizeRequest, ReportFormat,
    ScalarField, ScalarSpec, ScrambleMode, SurveyKind, SurveyRequest, SynthesisSpec,
    SynthesizeRequest,
)
from ..models.errors import FormRegError
from ..models.results import VerdictTag
from ..services.regularization_service import RegularizationService

logger = logging.getLogger(__name__)

SEED_ENV = "FORMREG_SEED"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_WARNING = 2

VERDICT_EXIT_CODES = {
    VerdictTag.EQUIVALENT: 0,
    VerdictTag.NOT_EQUIVALENT: 3,
    VerdictTag.REDUCED_TO_REGULAR_PARTS: 4,
}


class FormRegCLI:
    """Command-line interface for regularizing decompositions."""

    def __init__(self):
        self.service = RegularizationService()
        self.parser = self._create_parser()

    def _create_parser(self) -> argparse.ArgumentParser:
        """Create command-line argument parser."""
        parser = argparse.ArgumentParser(
            prog="formreg",
            description="Regularizing decomposition of square matrices under congruence and *congruence",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            epilog="""
Examples:
  # Decompose a matrix and print a text report
  python cli.py regularize J3.mat

  # JSON report with the float backend and a looser rank threshold
  python cli.py regularize A.mat --backend float --tol-scale 10 --json --out A.report.json

  # Topological (*)congruence of two forms, with a witness for the regular parts
  python cli.py compare A.mat B.mat --form sesquilinear --witness S.mat

  # Seeded instance R + J_3 + J_1 scrambled by a random integer congruence
  python cli.py synthesize --regular-size 2 --blocks 3,1 --scramble general --seed 7 --out inst.mat

  # Replay a saved report against its input
  python cli.py verify A.mat A.report.json
            """
        )
        parser.add_argument('--verbose', '-v', action='store_true', help='Log diagnostics to stderr')
        commands = parser.add_subparsers(dest='command', required=True)

        regularize = commands.add_parser('regularize', help='Compute the regularizing decomposition')
        regularize.add_argument('input', help='Matrix file')
        self._add_form_options(regularize)
        output = regularize.add_mutually_exclusive_group()
        for report_format in self.service.get_available_report_formats():
            output.add_argument(f'--{report_format}', dest='report_format', action='store_const',
                                const=ReportFormat(report_format), help=f'{report_format.upper()} report')
        regularize.add_argument('--out', '-o', help='Write the report to this file')

        compare = commands.add_parser('compare', help='Decide topological (*)congruence of two matrices')
        compare.add_argument('path_a', help='First matrix file')
        compare.add_argument('path_b', help='Second matrix file')
        self._add_form_options(compare)
        compare.add_argument('--witness', help='Matrix file S with S R_A S^star = R_B')
        compare.add_argument('--tol', type=float, default=1e-9, help='Float comparison tolerance (default: 1e-9)')
        compare.add_argument('--json', action='store_true', help='Print the verdict as JSON')

        synthesize = commands.add_parser('synthesize', help='Write a seeded instance with known decomposition')
        synthesize.add_argument('--regular-size', type=int, default=0, help='Size of the regular part (default: 0)')
        synthesize.add_argument('--blocks', default='', help='Comma-separated Jordan block sizes, e.g. 3,1')
        synthesize.add_argument('--scramble', choices=self.service.get_available_scramble_modes(), default='none',
                                help='Congruence applied to the direct sum (default: none)')
        synthesize.add_argument('--seed', type=int, default=0, help=f'PRNG seed (overridden by ${SEED_ENV})')
        synthesize.add_argument('--field', choices=self.service.get_available_fields(), default='real')
        synthesize.add_argument('--backend', choices=self.service.get_available_arithmetics(), default='exact')
        synthesize.add_argument('--form', choices=[f.value for f in FormKind], default='bilinear')
        synthesize.add_argument('--entry-bound', type=int, default=3,
                                help='Entry bound of exact random matrices (default: 3)')
        synthesize.add_argument('--out', '-o', required=True, help='Matrix file to write')

        verify = commands.add_parser('verify', help='Replay a saved JSON report against its input')
        verify.add_argument('input', help='Matrix file the report was computed from')
        verify.add_argument('report', help='JSON report written by regularize --json')
        verify.add_argument('--tol', type=float, default=1e-9, help='Float replay tolerance (default: 1e-9)')

        survey = commands.add_parser('survey', help='Seeded batch of recovery or backend-agreement runs')
        survey.add_argument('--kind', choices=[k.value for k in SurveyKind], default='recovery')
        survey.add_argument('--count', type=int, default=100, help='Number of instances (default: 100)')
        survey.add_argument('--max-size', type=int, default=8, help='Largest instance size (default: 8)')
        survey.add_argument('--seed', type=int, default=0, help=f'PRNG seed (overridden by ${SEED_ENV})')
        survey.add_argument('--field', choices=self.service.get_available_fields(), default='real')
        survey.add_argument('--backend', choices=self.service.get_available_arithmetics(), default='exact')
        survey.add_argument('--form', choices=[f.value for f in FormKind], default='bilinear')
        survey.add_argument('--scramble', choices=self.service.get_available_scramble_modes(), default='general')
        survey.add_argument('--tol-scale', type=float, default=1.0)
        survey.add_argument('--out', '-o', help='CSV or JSON table of per-instance results')

        return parser

    def _add_form_options(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--form', choices=[f.value for f in FormKind], default='bilinear',
                            help='Bilinear (S A S^T) or sesquilinear (S A S^*) (default: bilinear)')
        parser.add_argument('--backend', choices=self.service.get_available_arithmetics(),
                            help="Arithmetic backend (default: the input file's)")
        parser.add_argument('--tol-scale', type=float, default=1.0,
                            help='Float rank threshold multiplier (default: 1)')

    def _seed(self) -> int:
        value = os.environ.get(SEED_ENV)
        if value is None or not value.strip():
            return self.args.seed
        try:
            return int(value)
        except ValueError:
            raise FormRegError(f"{SEED_ENV} must be an integer, got '{value}'")

    @staticmethod
    def _parse_blocks(text: str) -> List[int]:
        blocks = []
        for token in text.split(','):
            token = token.strip()
            if not token:
                continue
            try:
                blocks.append(int(token))
            except ValueError:
                raise FormRegError(f"Invalid block size '{token}'")
        return blocks

    def _emit(self, text: str, path: Optional[str] = None) -> None:
        if path:
            self.service.write_text(path, text)
            print(f"Report written to {path}")
        else:
            sys.stdout.write(text)

    def _regularize(self) -> int:
        request = RegularizeRequest(
            input_path=self.args.input,
            form=FormKind(self.args.form),
            arithmetic=Arithmetic(self.args.backend) if self.args.backend else None,
            policy=RankPolicy(tol_scale=self.args.tol_scale),
            report_format=self.args.report_format or ReportFormat.TEXT,
            output_path=self.args.out,
        )
        report, _ = self.service.regularize_file(request)
        self._emit(self.service.render_decomposition(report, request.report_format), request.output_path)
        if report.arithmetic == Arithmetic.FLOAT and (report.ill_conditioned or report.warnings):
            return EXIT_WARNING
        return EXIT_OK

    def _compare(self) -> int:
        request = CompareRequest(
            path_a=self.args.path_a,
            path_b=self.args.path_b,
            form=FormKind(self.args.form),
            arithmetic=Arithmetic(self.args.backend) if self.args.backend else None,
            policy=RankPolicy(tol_scale=self.args.tol_scale),
            witness_path=self.args.witness,
            tol=self.args.tol,
        )
        verdict, backend = self.service.compare_files(request)
        report_format = ReportFormat.JSON if self.args.json else ReportFormat.TEXT
        sys.stdout.write(ReportWriterFactory.create_writer(report_format).render_verdict(verdict, backend))
        return VERDICT_EXIT_CODES[verdict.tag]

    def _synthesize(self) -> int:
        request = SynthesizeRequest(
            spec=SynthesisSpec(
                regular_size=self.args.regular_size,
                blocks=self._parse_blocks(self.args.blocks),
                scramble=ScrambleMode(self.args.scramble),
                seed=self._seed(),
                entry_bound=self.args.entry_bound,
            ),
            scalar=ScalarSpec(field=ScalarField(self.args.field), arithmetic=Arithmetic(self.args.backend)),
            form=FormKind(self.args.form),
            output_path=self.args.out,
        )
        instance, sidecar = self.service.synthesize_file(request)
        print(f"Instance:     {instance} (size {request.spec.total_size})")
        print(f"Ground truth: {sidecar}")
        return EXIT_OK

    def _verify(self) -> int:
        result = self.service.verify_files(self.args.input, self.args.report, self.args.tol)
        sys.stdout.write(ReportWriterFactory.create_writer(ReportFormat.TEXT).render_verification(result))
        return EXIT_OK if result.passed else EXIT_ERROR

    def _survey(self) -> int:
        request = SurveyRequest(
            kind=SurveyKind(self.args.kind),
            count=self.args.count,
            max_size=self.args.max_size,
            seed=self._seed(),
            scalar=ScalarSpec(field=ScalarField(self.args.field), arithmetic=Arithmetic(self.args.backend)),
            form=FormKind(self.args.form),
            scramble=ScrambleMode(self.args.scramble),
            policy=RankPolicy(tol_scale=self.args.tol_scale),
            output_path=self.args.out,
        )
        print(f"Running {request.count} {request.kind.value} instances (max size {request.max_size})...")
        rows = self.service.survey(request)
        statuses = [row["status"] for row in rows]
        for status in sorted(set(statuses)):
            print(f"  {status}: {statuses.count(status)}")
        for row in rows:
            if row["status"] == "guarded":
                print(f"  guarded instance {row['index']}: min margin {row['min_margin']}")
        if request.output_path:
            print(f"Results written to {request.output_path}")
        return EXIT_ERROR if "failed" in statuses else EXIT_OK

    def run(self, args: List[str] = None) -> int:
        """Run the CLI application."""
        self.args = self.parser.parse_args(args)
        logging.basicConfig(
            level=logging.DEBUG if self.args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        handlers = {
            'regularize': self._regularize,
            'compare': self._compare,
            'synthesize': self._synthesize,
            'verify': self._verify,
            'survey': self._survey,
        }
        try:
            return handlers[self.args.command]()
        except KeyboardInterrupt:
            print("\nOperation cancelled by user")
            return EXIT_ERROR
        except (FormRegError, ValidationError, OSError, ValueError) as e:
            print(f"Error: {e}")
            return EXIT_ERROR
        except Exception as e:
            logger.debug("unexpected failure", exc_info=True)
            print(f"Error: {e}")
            return EXIT_ERROR


def main():
    """CLI entry point."""
    cli = FormRegCLI()
    sys.exit(cli.run())


if __name__ == "__main__":
    main()
