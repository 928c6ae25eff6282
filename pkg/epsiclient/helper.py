"""
Helpers for rendering cli elements.
"""

import rich
import rich.table
from rich.markup import escape

from epsicomp.service.class_complexity import ClassRow
from epsicomp.service.estimation import (
    ComplexityCoefficients,
    ProfileEntry,
    RecoveryErrorCurve,
)
from epsicomp.service.individual import ConvergenceRow
from epsicomp.service.segmentation import SegmentationResult


def number(value: float | None) -> str:
    """
    Full round-trip precision, as written to the artifacts.
    """

    if value is None:
        return "-"

    return repr(float(value))


def render_class_rows(rows: list[ClassRow], oracle: bool) -> rich.table.Table:
    """
    Render class complexities into a rich table. Rows whose complexity is
    undefined show the reason instead.
    """

    table = rich.table.Table(title="Class complexity")

    table.add_column("eps", justify="right")
    table.add_column("S_cl", justify="right")

    if oracle:
        table.add_column("h(eps)", justify="right")
        table.add_column("closed form", justify="right")
        table.add_column("oracle", justify="right")
        table.add_column("discrepancy", justify="right")

    for row in rows:
        complexity = (
            number(row.complexity)
            if row.complexity is not None
            else f"[red]{escape(row.condition)}[/red]"
        )

        cells = [number(row.epsilon), complexity]

        if oracle:
            cells += [
                number(row.spacing),
                number(row.closed_form),
                number(row.oracle),
                number(row.discrepancy),
            ]

        table.add_row(*cells)

    return table


def render_coefficients(coefficients: ComplexityCoefficients) -> str:
    if coefficients.degenerate:
        return f"[yellow]Degenerate fit[/yellow] ({escape(str(coefficients.reason))})"

    output = (
        f"A = {number(coefficients.A)}, B = {number(coefficients.B)}, "
        f"r^2 = {number(coefficients.r_squared)} over {coefficients.n_points_fit} rows"
    )

    if not coefficients.stable:
        output += " [yellow](slope unstable under leave-one-out)[/yellow]"

    return output


def render_curve(curve: RecoveryErrorCurve) -> rich.table.Table:
    table = rich.table.Table(
        "Fraction", "Mean error", "Std. dev.", "Schemes", title="Recovery error"
    )

    for row in curve.rows:
        table.add_row(
            number(row.fraction),
            number(row.mean_error),
            number(row.stddev),
            str(row.n_schemes),
        )

    return table


def render_profile(entries: list[ProfileEntry]) -> rich.table.Table:
    table = rich.table.Table("Order", "A", "B", "r^2", "Degenerate", title="Profile")

    for entry in entries:
        coefficients = entry.coefficients
        table.add_row(
            str(entry.order),
            number(coefficients.A),
            number(coefficients.B),
            number(coefficients.r_squared),
            "Yes" if coefficients.degenerate else "No",
        )

    return table


def render_segmentation(result: SegmentationResult) -> rich.table.Table:
    """
    Render the detector candidates into a rich table, accepted change
    points in green.
    """

    table = rich.table.Table(
        "Index", "Statistic", "Threshold", "Effect", title="Change-point candidates"
    )

    for stat in result.detector_stats:
        style = "green" if stat.index in result.change_points else None
        table.add_row(
            str(stat.index),
            number(stat.statistic),
            number(stat.threshold),
            number(stat.effect),
            style=style,
        )

    return table


def render_convergence(rows: list[ConvergenceRow]) -> rich.table.Table:
    table = rich.table.Table("N", "S_N", "Gap", title="Convergence")

    for row in rows:
        table.add_row(str(row.n_points), number(row.s_n), number(row.gap))

    return table
