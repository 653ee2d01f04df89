"""Command-line front end.

Every subcommand prints a report: YAML-style text by default, the pydantic
report schema with ``--json``. Exit status is 0 when the checked property
holds, 1 on a mathematical failure (the report carries the witness) and 2 on
malformed input.
"""

from __future__ import annotations

import json
import logging
import sys
from fractions import Fraction
from functools import wraps
from pathlib import Path
from typing import Callable

import click
import yaml
from pydantic import BaseModel

from gencomplex.algebra.cdga import CDGA, load_cdga, sphere_bundle_model
from gencomplex.algebra.grammar import format_form, normalize_table_notation
from gencomplex.algebra.liealg import LieModel, filtration_report, model_to_dict, resolve_model
from gencomplex.core.config import get_settings
from gencomplex.core.logging import configure_logging
from gencomplex.core.observability import correlation_context
from gencomplex.schemas.blowup import BlowupReport
from gencomplex.schemas.gcs import DDLemmaReport, StructureReport
from gencomplex.schemas.liealg import ParseReport
from gencomplex.schemas.minimal import MinimalModelRunReport
from gencomplex.schemas.symplectic import SymplecticCheckReport
from gencomplex.schemas.tduality import TDualizeReport
from gencomplex.services import exceptions
from gencomplex.services.blowup import BlowupService
from gencomplex.services.cohomology import CohomologyService
from gencomplex.services.gcs import GCSService, GCStructure, vector_form
from gencomplex.services.minimal import MinimalModelService
from gencomplex.services.symplectic import SymplecticService
from gencomplex.services.tduality import CircleBundleData, TDualityService
from gencomplex.workers.table_worker import TableWorker, format_table

logger = logging.getLogger("gencomplex.cli")

EXIT_FAILURE = 1
EXIT_INPUT = 2


def emit(report: BaseModel, as_json: bool) -> None:
    if as_json:
        click.echo(report.json(indent=2, ensure_ascii=False))
        return
    click.echo(
        yaml.safe_dump(json.loads(report.json()), sort_keys=False, allow_unicode=True, default_flow_style=None),
        nl=False,
    )


def finish(passes: bool) -> None:
    if not passes:
        raise click.exceptions.Exit(EXIT_FAILURE)


def reporting(func: Callable) -> Callable:
    """Map the exception hierarchy onto exit statuses."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        as_json = kwargs.get("as_json", False)
        try:
            return func(*args, **kwargs)
        except exceptions.MathematicalFailure as exc:
            logger.info("command_failed", extra={"command": ctx.info_name, "error": type(exc).__name__})
            payload = {"error": type(exc).__name__, "message": str(exc), "witness": _witness(exc.witness)}
            if as_json:
                click.echo(json.dumps(payload, indent=2, ensure_ascii=False))
            else:
                click.echo(yaml.safe_dump(payload, sort_keys=False, allow_unicode=True), nl=False)
            ctx.exit(EXIT_FAILURE)
        except exceptions.InputError as exc:
            logger.info("command_rejected", extra={"command": ctx.info_name, "error": type(exc).__name__})
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_INPUT)

    return wrapper


def _witness(value):
    if value is None or isinstance(value, (str, int, float, bool)):
        return value
    return str(value)


json_option = click.option("--json", "as_json", is_flag=True, help="Emit the report schema as JSON.")
twist_option = click.option("--twist", default=None, help="Closed 3-form H, e.g. '123+456'.")


def load_algebra(spec: str, twist: str | None = None) -> LieModel:
    return resolve_model(spec, twist=twist)


def parse_eps(values: tuple[str, ...]) -> list[Fraction] | None:
    if not values:
        return None
    try:
        return [Fraction(value) for value in values]
    except (ValueError, ZeroDivisionError) as exc:
        raise exceptions.ParseError(f"ε samples must be rationals: {exc}") from exc


@click.group()
@click.version_option(package_name="gencomplex")
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default=None,
    help="Override LOG_LEVEL for this run.",
)
@click.pass_context
def cli(ctx: click.Context, log_level: str | None) -> None:
    """Exact computations with invariant generalized complex structures."""
    configure_logging(log_level)
    ctx.with_resource(correlation_context(prefix=ctx.invoked_subcommand or "cli"))


# models and cohomology -------------------------------------------------------------


@cli.command("parse")
@click.argument("algebra")
@twist_option
@click.option("--form", "forms", multiple=True, help="Forms to reparse and print on the model.")
@click.option("--filtration", is_flag=True, help="Add the V_i filtration and the excluded structure types.")
@json_option
@reporting
def parse_command(algebra: str, twist: str | None, forms: tuple[str, ...], filtration: bool, as_json: bool) -> None:
    """Parse a tuple like (0,0,12) or a JSON structure-constant file."""
    model = load_algebra(algebra, twist)
    report = ParseReport(
        algebra=model.tuple_string(),
        n=model.n,
        twist=format_form(model.twist),
        model=model_to_dict(model),
        forms={text: format_form(model.parse(normalize_table_notation(text))) for text in forms},
        filtration=filtration_report(model).to_report(model.tuple_string()) if filtration else None,
    )
    emit(report, as_json)


@cli.command("betti")
@click.argument("algebra")
@twist_option
@click.option("--twisted", is_flag=True, help="Report the d_H-cohomology instead.")
@json_option
@reporting
def betti_command(algebra: str, twist: str | None, twisted: bool, as_json: bool) -> None:
    """Betti numbers and class representatives."""
    model = load_algebra(algebra, twist)
    service = CohomologyService()
    if twisted:
        emit(service.twisted_cohomology(model), as_json)
        return
    emit(service.betti_report(model), as_json)


# structures -------------------------------------------------------------------------


@cli.command("verify-gcs")
@click.argument("algebra")
@click.option("--spinor", required=True, help="Pure spinor, e.g. 'exp(i*(12+34+56))'.")
@twist_option
@click.option("--decompose", "decompose", default=None, help="A form to split into its U^k components.")
@click.option("--e1", "with_e1", is_flag=True, help="Add the canonical spectral sequence E1 dimensions.")
@click.option("--beta-deform", is_flag=True, help="Deform a complex structure by x_{m-1}∧x_m.")
@json_option
@reporting
def verify_gcs_command(
    algebra: str,
    spinor: str,
    twist: str | None,
    decompose: str | None,
    with_e1: bool,
    beta_deform: bool,
    as_json: bool,
) -> None:
    """Purity, nondegeneracy, integrability and type of a spinor."""
    model = load_algebra(algebra, twist)
    service = GCSService()
    structure, verification = service.structure_from_spinor(model, model.parse(normalize_table_notation(spinor)))
    report = StructureReport(verification=verification)
    if verification.is_structure:
        if decompose is not None:
            report.decomposition = service.uk_decomposition(structure, model.parse(normalize_table_notation(decompose)))
        if with_e1:
            report.e1 = service.canonical_e1(structure)
        if beta_deform:
            report.deformation = service.complex_beta_deformation(structure).to_report()
    emit(report, as_json)
    finish(verification.is_structure and (report.deformation is None or report.deformation.maurer_cartan))


@cli.command("table1")
@click.argument("directory", required=False, type=click.Path(file_okay=False, path_type=Path))
@click.option("--verify-all/--betti-only", default=True, help="Check every existence cell, or only (b1, b2).")
@json_option
@reporting
def table1_command(directory: Path | None, verify_all: bool, as_json: bool) -> None:
    """Recompute the nilpotent table: Betti columns and every structure cell."""
    report = TableWorker().run(directory or get_settings().table1_path(), verify_cells=verify_all)
    if as_json:
        click.echo(report.json(indent=2, ensure_ascii=False))
    else:
        click.echo(format_table(report), nl=False)
    finish(report.passes)


# symplectic --------------------------------------------------------------------------


@cli.command("lefschetz")
@click.argument("algebra")
@click.option("--omega", default=None, help="Symplectic form; without it, search for one.")
@click.option("--harmonic", is_flag=True, help="Compare with the dδ-lemma and harmonic representatives.")
@json_option
@reporting
def lefschetz_command(algebra: str, omega: str | None, harmonic: bool, as_json: bool) -> None:
    """Hard Lefschetz kernels, or symplectic existence when no form is given."""
    model = load_algebra(algebra)
    cohomology = CohomologyService()
    if omega is None:
        existence = cohomology.symplectic_existence_report(model)
        emit(existence, as_json)
        finish(existence.verdict != "impossible")
        return
    form = model.parse(normalize_table_notation(omega))
    if harmonic:
        symplectic = SymplecticService()
        report = symplectic.harmonic_report(symplectic.operators(model, form))
        emit(report, as_json)
        finish(report.lefschetz)
        return
    result = cohomology.lefschetz(model, form)
    emit(result.to_report(model.tuple_string()), as_json)
    finish(result.passes)


@cli.command("ddlemma")
@click.argument("algebra")
@click.option("--spinor", default=None, help="Check the dd^J-lemma of this structure.")
@click.option("--omega", default=None, help="Check the dδ-lemma of this symplectic form.")
@twist_option
@click.option("--generalized", is_flag=True, help="Add the HH^k dimensions and Mukai checks.")
@json_option
@reporting
def ddlemma_command(
    algebra: str, spinor: str | None, omega: str | None, twist: str | None, generalized: bool, as_json: bool
) -> None:
    """The dd^J-lemma (spinor) or the dδ-lemma (symplectic form)."""
    if (spinor is None) == (omega is None):
        raise exceptions.InputError("give exactly one of --spinor and --omega")
    model = load_algebra(algebra, twist)
    if omega is not None:
        service = SymplecticService()
        report = service.harmonic_report(service.operators(model, model.parse(normalize_table_notation(omega))))
        emit(report, as_json)
        finish(report.ddelta_lemma)
        return
    gcs = GCSService()
    structure, verification = gcs.structure_from_spinor(model, model.parse(normalize_table_notation(spinor)))
    if not verification.is_structure:
        raise exceptions.IntegrabilityError(
            f"{verification.spinor} does not define a structure", witness=json.dumps(verification.witnesses)
        )
    n, field = structure.n, structure.field
    lemma = gcs.ddj_lemma(structure).to_report(
        verification.spinor, lambda v: format_form(vector_form(n, field, v))
    )
    report = DDLemmaReport(
        verification=verification,
        lemma=lemma,
        generalized=gcs.generalized_cohomology(structure) if generalized else None,
    )
    emit(report, as_json)
    finish(lemma.holds)


@cli.command("sl2-check")
@click.argument("algebra")
@click.option("--omega", required=True, help="Symplectic form.")
@click.option("--phi", "with_phi", is_flag=True, help="Also check the φ-map identities and E1 dimensions.")
@click.option("--harmonic", is_flag=True, help="Also compare Lefschetz, the dδ-lemma and harmonic classes.")
@json_option
@reporting
def sl2_command(algebra: str, omega: str, with_phi: bool, harmonic: bool, as_json: bool) -> None:
    """Operator identities of L, Λ, H, d, δ and the symplectic star."""
    model = load_algebra(algebra)
    service = SymplecticService()
    data = service.operators(model, model.parse(normalize_table_notation(omega)))
    report = SymplecticCheckReport(
        sl2=service.relation_report(data),
        phi=service.phi_report(data) if with_phi else None,
        harmonic=service.harmonic_report(data) if harmonic else None,
    )
    emit(report, as_json)
    phi_ok = report.phi is None or (report.phi.d_identity and report.phi.delta_identity)
    harmonic_ok = report.harmonic is None or report.harmonic.consistent
    finish(report.sl2.passes and phi_ok and harmonic_ok)


# Massey products and minimal models ------------------------------------------------------


@cli.command("massey")
@click.argument("algebra")
@click.argument("classes", nargs=-1, required=True)
@click.option("--cdga", "is_cdga", is_flag=True, help="ALGEBRA is a CDGA JSON file; classes use its basis labels.")
@click.option("--against", default=None, help="Integrate the product against this class (CDGA with orientation).")
@json_option
@reporting
def massey_command(algebra: str, classes: tuple[str, ...], is_cdga: bool, against: str | None, as_json: bool) -> None:
    """Triple or quadruple Massey products with their indeterminacy."""
    cohomology = CohomologyService()
    if is_cdga:
        source = load_cdga(algebra)
        parsed = [source.parse_element(text) for text in classes]
        if against is not None:
            emit(MinimalModelService().massey_pairing(source, parsed, source.parse_element(against)), as_json)
            return
        emit(cohomology.massey(cohomology.cohomology(source), parsed).to_report(), as_json)
        return
    if against is not None:
        raise exceptions.InputError("--against needs a CDGA with an orientation")
    model = load_algebra(algebra)
    forms = [model.parse(normalize_table_notation(text)) for text in classes]
    emit(cohomology.massey_forms(model, forms).to_report(), as_json)


@cli.command("minmodel")
@click.argument("source")
@click.option("--degree", "bound", type=int, required=True, help="Build generators through this degree.")
@click.option("--cdga", "is_cdga", is_flag=True, help="SOURCE is a CDGA JSON file.")
@click.option(
    "--sphere-bundle", "sphere_bundle", is_flag=True, help="SOURCE is k for the S^{k+1}×S^{k+1} bundle model."
)
@click.option("--formality", "formality", type=int, default=None, help="Check s-formality for this s.")
@click.option("--ambient", type=int, default=None, help="Manifold dimension, for the formality bound.")
@json_option
@reporting
def minmodel_command(
    source: str,
    bound: int,
    is_cdga: bool,
    sphere_bundle: bool,
    formality: int | None,
    ambient: int | None,
    as_json: bool,
) -> None:
    """Partial minimal model through a degree, with an optional s-formality check."""
    service = MinimalModelService()
    target: LieModel | CDGA
    if sphere_bundle:
        try:
            target = sphere_bundle_model(int(source))
        except ValueError as exc:
            raise exceptions.ParseError(f"expected an integer k, got {source!r}") from exc
    elif is_cdga:
        target = load_cdga(source)
    else:
        target = load_algebra(source)
    pm = service.minimal_model(target, bound)
    report = MinimalModelRunReport(
        cdga=service.cdga_report(target) if isinstance(target, CDGA) else None,
        model=pm.to_report(),
    )
    if formality is not None:
        report.formality = service.formality_report(pm, service.s_formality_check(pm, formality, ambient=ambient))
    emit(report, as_json)
    finish(pm.verified_through is not None)


# T-duality and blow-ups ---------------------------------------------------------------


@cli.command("tdualize")
@click.argument("algebra")
@click.option("--circle", "fiber", type=int, required=True, help="Index of the fiber generator.")
@twist_option
@click.option("--connection", default=None, help="Connection 1-form θ with θ(∂_fiber) = 1.")
@click.option("--form", "forms", multiple=True, help="Invariant forms whose τ-image should be printed.")
@click.option("--verify", "verify", is_flag=True, help="Check the duality identities on invariant bases.")
@click.option("--spinor", default=None, help="Transport this structure to the dual.")
@json_option
@reporting
def tdualize_command(
    algebra: str,
    fiber: int,
    twist: str | None,
    connection: str | None,
    forms: tuple[str, ...],
    verify: bool,
    spinor: str | None,
    as_json: bool,
) -> None:
    """T-dual model of a circle bundle, τ-images, identities and structure transport."""
    model = load_algebra(algebra, twist)
    service = TDualityService()
    theta = model.parse(normalize_table_notation(connection)) if connection else None
    pair = service.dualize(CircleBundleData(model, fiber, theta))
    parsed = [model.parse(normalize_table_notation(text)) for text in forms]
    report = TDualizeReport(dual=service.dual_model_report(pair, parsed))
    if verify:
        report.verification = service.duality_verify(pair)
    if spinor is not None:
        structure = GCStructure(model, model.parse(normalize_table_notation(spinor)))
        _, report.transport = service.transport_gcs(pair, structure)
    emit(report, as_json)
    finish(report.verification is None or report.verification.passes)


@cli.command("blowup")
@click.argument("path", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--eps", "eps", multiple=True, help="Rational ε samples (default EPS_SAMPLES).")
@click.option("--generic/--no-generic", default=True, help="Also compute with ε as a formal variable.")
@click.option("--massey", "massey", multiple=True, help="Three classes of X whose product should survive.")
@json_option
@reporting
def blowup_command(path: Path, eps: tuple[str, ...], generic: bool, massey: tuple[str, ...], as_json: bool) -> None:
    """Blow-up ring, Lefschetz kernels of f*ω + εa and the kernel conditions."""
    service = BlowupService()
    data = service.load(path)
    ring = service.build_blowup_ring(data)
    conditions = service.blowup_conditions(data)
    lefschetz = service.blowup_lefschetz(ring, parse_eps(eps), exact=generic)
    report = BlowupReport(
        name=data.name,
        ring=service.ring_report(ring),
        conditions=service.conditions_report(data, conditions),
        lefschetz=service.lefschetz_report(ring, lefschetz),
        massey=service.massey_report(ring, list(massey)) if massey else None,
    )
    emit(report, as_json)
    predictions_ok = all(level.prediction_holds is not False for level in report.lefschetz.levels)
    finish(
        report.ring.relation_holds
        and report.ring.euler_additive
        and report.conditions.equivalences_hold
        and predictions_ok
        and (report.massey is None or report.massey.survives)
    )


def main() -> None:
    cli(prog_name="gencomplex")


if __name__ == "__main__":
    sys.exit(main())
