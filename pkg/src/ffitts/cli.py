"""Command-line front end.

Subcommands:

* ``fit``       fits difficulty models to a dataset and ranks them
* ``sigma``     reports tremor-spread estimates (catalog or computed from a log)
* ``simulate``  generates a synthetic tap log under the endpoint model
* ``datasets``  lists registered datasets

Exit codes: 0 success (including reports that flag unusable models),
1 internal/data error, 2 usage error.  Set FFITTS_NO_COLOR to disable
ANSI styling on terminals.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from . import report as rpt
from .datamodel import (
    AxisMode,
    Dataset,
    Dimensionality,
    SigmaEstimate,
    SigmaMethod,
    aggregate,
)
from .errors import (
    EmptyDatasetError,
    FfittsError,
    ParseError,
    UnknownDatasetError,
)
from .fitting import compare
from .idmodels import Model
from .ingestion import (
    DatasetRegistry,
    load_aggregate_csv,
    load_trials_csv,
    write_trials_csv,
)
from .sigma import (
    CalibrationMode,
    normality_check,
    sigma_from_calibration,
    sigma_from_intercept,
)
from .simulator import MovementTimeModel, SimulatorConfig, config_metadata, generate


def use_color(stream=None) -> bool:
    """ANSI styling only on a terminal and only unless FFITTS_NO_COLOR is set."""
    if os.environ.get("FFITTS_NO_COLOR"):
        return False
    stream = stream if stream is not None else sys.stdout
    return bool(getattr(stream, "isatty", lambda: False)())


def _style(text: str, **kwargs) -> str:
    return click.style(text, **kwargs) if use_color() else text


@click.group()
def main():
    """Movement-time model fitting for touch pointing data."""


def _registry() -> DatasetRegistry:
    return DatasetRegistry.with_embedded()


def _resolve_dataset(dataset_name, input_path, dim, axis, outlier_mm) -> Dataset:
    if (dataset_name is None) == (input_path is None):
        raise click.UsageError("provide exactly one of --dataset or --input")
    if dataset_name is not None:
        try:
            return _registry().get(dataset_name)
        except UnknownDatasetError as exc:
            raise click.UsageError(str(exc)) from None
    dimensionality = Dimensionality(dim or "2d")
    try:
        if _looks_like_trials(input_path):
            records = load_trials_csv(input_path)
            summaries = aggregate(
                records, axis_mode=AxisMode(axis), outlier_radius_mm=outlier_mm
            )
            name = "<stdin>" if str(input_path) == "-" else Path(input_path).stem
            return Dataset(
                name=name,
                dimensionality=dimensionality,
                summaries=tuple(summaries),
            )
        return load_aggregate_csv(input_path, dimensionality=dimensionality)
    except (ParseError, EmptyDatasetError) as exc:
        raise click.UsageError(str(exc)) from None
    except FfittsError as exc:
        # bad data (degenerate conditions etc.), not bad usage: exit 1
        raise click.ClickException(str(exc)) from None


def _looks_like_trials(path) -> bool:
    # stdin cannot be sniffed twice; assume the tap-log schema there
    if str(path) == "-":
        return True
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                return line.split(",")[0].strip() == "participant"
    return False


def _resolve_sigma(token: str | None, dataset: Dataset) -> SigmaEstimate | None:
    if token is None:
        return None
    try:
        method = SigmaMethod(token)
    except ValueError:
        method = None
    if method is not None:
        try:
            return dataset.sigma_a(method)
        except KeyError as exc:
            raise click.UsageError(str(exc)) from None
    try:
        value = float(token)
    except ValueError:
        names = ", ".join(m.value for m in SigmaMethod if m is not SigmaMethod.USER_GIVEN)
        raise click.UsageError(
            f"--sigma-a must be a number in mm or one of: {names}"
        ) from None
    if value <= 0:
        raise click.UsageError("--sigma-a literal must be > 0")
    return SigmaEstimate(value, SigmaMethod.USER_GIVEN, "cli")


def _parse_models(token: str) -> list[Model]:
    if token.strip().lower() == "all":
        return list(Model)
    try:
        return [Model.parse(t) for t in token.split(",") if t.strip()]
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
        click.echo(_style(f"wrote {out}", fg="green"), err=True)
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--dataset", "dataset_name", help="Registered dataset name.")
@click.option("--input", "input_path", help="Tap log or aggregate CSV ('-' = stdin).")
@click.option("--dim", type=click.Choice(["1d", "2d"]), default=None,
              help="Dimensionality label for --input data (default 2d).")
@click.option("--models", default="all", show_default=True,
              help="Comma-separated m1..m7, or 'all'.")
@click.option("--sigma-a", "sigma_a_token", default=None,
              help="Tremor spread: catalog method name or a value in mm (m7).")
@click.option("--axis", type=click.Choice([a.value for a in AxisMode]), default="y",
              show_default=True, help="Deviation axis when aggregating a tap log.")
@click.option("--outlier-mm", type=float, default=15.0, show_default=True,
              help="Tap-to-target distance beyond which taps are discarded.")
@click.option("--cv/--no-cv", default=True, show_default=True,
              help="Leave-one-condition-out cross-validation.")
@click.option("--format", "fmt", type=click.Choice(["md", "csv", "json"]),
              default="md", show_default=True)
@click.option("--out", default=None, help="Output path (default stdout).")
def fit(dataset_name, input_path, dim, models, sigma_a_token, axis, outlier_mm,
        cv, fmt, out):
    """Fit difficulty models and rank them by the selection battery."""
    dataset = _resolve_dataset(dataset_name, input_path, dim, axis, outlier_mm)
    model_list = _parse_models(models)
    sigma_a = _resolve_sigma(sigma_a_token, dataset)
    if Model.M7_GIVEN_SIGMA_A in model_list and sigma_a is None:
        raise click.UsageError("--sigma-a is required when fitting m7")

    try:
        selection = compare(dataset, model_list, sigma_a=sigma_a, cv=cv)
    except FfittsError as exc:
        raise click.ClickException(str(exc)) from None

    if fmt == "json":
        _emit(rpt.to_json(rpt.fit_document(selection, dataset)), out)
    elif fmt == "csv":
        _emit(rpt.render_comparison_csv(selection), out)
        if out:
            wf_path = Path(out).with_name(Path(out).stem + ".wf.csv")
            wf_path.write_text(rpt.render_wf_csv(dataset), encoding="utf-8")
            click.echo(_style(f"wrote {wf_path}", fg="green"), err=True)
        _write_plot_files(selection, dataset, out)
    else:
        text = rpt.render_comparison_md(selection)
        extra = (sigma_a,) if sigma_a and sigma_a.method is SigmaMethod.USER_GIVEN else ()
        wf = rpt.render_wf_md(dataset, extra)
        if wf:
            text += "\n" + wf
        for r in selection.results:
            if not r.usable:
                text += (
                    f"\nnote: {r.model.value} unusable: mathematical error in "
                    f"{len(r.math_errors)} condition(s): "
                    + ", ".join(str(c) for c in r.math_errors) + "\n"
                )
        _emit(text, out)
        _write_plot_files(selection, dataset, out)


def _write_plot_files(selection, dataset, out):
    """Plot-ready CSVs are written next to --out (json embeds them instead)."""
    if not out:
        return
    base = Path(out)
    fits_path = base.with_name(base.stem + ".fits.csv")
    fits_path.write_text(rpt.render_fits_plot_csv(selection), encoding="utf-8")
    intercept_path = base.with_name(base.stem + ".intercept.csv")
    intercept_path.write_text(rpt.render_intercept_plot_csv(dataset), encoding="utf-8")
    click.echo(_style(f"wrote {fits_path} and {intercept_path}", fg="green"), err=True)


@main.command()
@click.option("--dataset", "dataset_name", help="Registered dataset name.")
@click.option("--input", "input_path", help="Tap log CSV ('-' = stdin).")
@click.option("--method", type=click.Choice(["all", "calib", "intercept"]),
              default="all", show_default=True,
              help="Which estimators to run on --input data.")
@click.option("--instruction", type=click.Choice(["ra", "acc"]), default="ra",
              show_default=True, help="Calibration instruction tag for --input data.")
@click.option("--dim", type=click.Choice(["1d", "2d"]), default=None)
@click.option("--axis", type=click.Choice([a.value for a in AxisMode]), default="y",
              show_default=True)
@click.option("--outlier-mm", type=float, default=15.0, show_default=True)
@click.option("--alpha", type=float, default=0.05, show_default=True,
              help="Normality-test significance level.")
@click.option("--format", "fmt", type=click.Choice(["md", "csv", "json"]),
              default="md", show_default=True)
@click.option("--out", default=None)
def sigma(dataset_name, input_path, method, instruction, dim, axis, outlier_mm,
          alpha, fmt, out):
    """Report tremor-spread estimates with a normality diagnostic."""
    if (dataset_name is None) == (input_path is None):
        raise click.UsageError("provide exactly one of --dataset or --input")

    rows: list[dict] = []
    source = dataset_name or ("<stdin>" if str(input_path) == "-" else str(input_path))
    if dataset_name is not None:
        try:
            dataset = _registry().get(dataset_name)
        except UnknownDatasetError as exc:
            raise click.UsageError(str(exc)) from None
        for est in dataset.sigma_a_catalog:
            rows.append({
                "method": est.method.value,
                "label": est.method.label,
                "sigma_a_mm": est.sigma_a_mm,
                "normality": None,
                "note": "cataloged value; raw deviations not available",
            })
    else:
        rows = _sigma_rows_from_log(
            input_path, method, instruction, dim, axis, outlier_mm, alpha
        )

    if fmt == "json":
        _emit(rpt.to_json({"source": source, "estimates": rows}), out)
        return
    if fmt == "csv":
        import csv as _csv
        import io as _io

        buf = _io.StringIO()
        writer = _csv.DictWriter(
            buf, fieldnames=["method", "label", "sigma_a_mm", "normality", "note"],
            lineterminator="\n",
        )
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        _emit(buf.getvalue(), out)
        return
    lines = [
        f"## Tremor spread estimates: {source}",
        "",
        "| Method | sigma_a (mm) | Normality | Note |",
        "|---|---|---|---|",
    ]
    for row in rows:
        value = rpt.sig(row["sigma_a_mm"], 3) if row["sigma_a_mm"] else "---"
        lines.append(
            f"| {row['label']} | {value} | {row['normality'] or '---'} "
            f"| {row['note'] or ''} |"
        )
    _emit("\n".join(lines) + "\n", out)


def _sigma_rows_from_log(input_path, method, instruction, dim, axis, outlier_mm,
                         alpha) -> list[dict]:
    try:
        records = load_trials_csv(input_path)
    except (ParseError, EmptyDatasetError) as exc:
        raise click.UsageError(str(exc)) from None

    dimensionality = Dimensionality(dim or "2d")
    axis_mode = AxisMode(axis)
    tag = (SigmaMethod.CALIB_RAPID_ACCURATE if instruction == "ra"
           else SigmaMethod.CALIB_ACCURACY_ONLY)
    rows = []

    if method in ("all", "calib"):
        rows.append(_calibration_row(records, dimensionality, axis_mode,
                                     outlier_mm, tag, alpha))
    if method in ("all", "intercept"):
        rows.append(_intercept_row(records, axis_mode, outlier_mm, alpha))
    return rows


def _first_tap_deviations(records, axis_mode, outlier_mm):
    import numpy as np

    taps = [t for t in records if not t.is_practice and t.tap_index == 1]
    dx = np.array([t.touch_x_mm - t.target_x_mm for t in taps])
    dy = np.array([t.touch_y_mm - t.target_y_mm for t in taps])
    keep = np.hypot(dx, dy) <= outlier_mm
    dx, dy = dx[keep], dy[keep]
    if axis_mode is AxisMode.X:
        return dx, None
    if axis_mode is AxisMode.Y:
        return dy, None
    return dy, dx


def _calibration_row(records, dimensionality, axis_mode, outlier_mm, tag, alpha):
    primary, secondary = _first_tap_deviations(records, axis_mode, outlier_mm)
    try:
        if dimensionality is Dimensionality.TWO_D and secondary is not None:
            import numpy as np

            est = sigma_from_calibration(
                np.column_stack([secondary, primary]),
                CalibrationMode.BIVARIATE, method=tag,
            )
        else:
            est = sigma_from_calibration(primary, method=tag)
        check = normality_check(primary, alpha=alpha)
        normality = (
            f"W={check.statistic:.3f} p={check.p_value:.3f} "
            f"{'pass' if check.passed else 'FAIL'}"
        )
        return {"method": tag.value, "label": tag.label,
                "sigma_a_mm": est.sigma_a_mm, "normality": normality, "note": ""}
    except FfittsError as exc:
        return {"method": tag.value, "label": tag.label, "sigma_a_mm": None,
                "normality": None, "note": f"warning: {exc}"}


def _intercept_row(records, axis_mode, outlier_mm, alpha):
    label = SigmaMethod.INTERCEPT_FITTS.label
    try:
        summaries = aggregate(records, axis_mode=axis_mode,
                              outlier_radius_mm=outlier_mm)
        fit = sigma_from_intercept(summaries)
        est = fit.estimate(SigmaMethod.INTERCEPT_FITTS)
        passed, total = _per_condition_normality(records, axis_mode, outlier_mm, alpha)
        return {
            "method": SigmaMethod.INTERCEPT_FITTS.value,
            "label": label,
            "sigma_a_mm": est.sigma_a_mm,
            "normality": f"{passed}/{total} condition groups pass",
            "note": f"regression R2={fit.r2:.3f}, slope={fit.slope:.4g}",
        }
    except FfittsError as exc:
        return {"method": SigmaMethod.INTERCEPT_FITTS.value, "label": label,
                "sigma_a_mm": None, "normality": None, "note": f"warning: {exc}"}


def _per_condition_normality(records, axis_mode, outlier_mm, alpha):
    import numpy as np
    from collections import defaultdict

    by_cond = defaultdict(list)
    for t in records:
        if t.is_practice or t.tap_index != 1:
            continue
        dx = t.touch_x_mm - t.target_x_mm
        dy = t.touch_y_mm - t.target_y_mm
        if np.hypot(dx, dy) > outlier_mm:
            continue
        by_cond[t.condition].append(dx if axis_mode is AxisMode.X else dy)
    passed = total = 0
    for devs in by_cond.values():
        if not 3 <= len(devs) <= 5000:
            continue
        total += 1
        try:
            if normality_check(devs, alpha=alpha).passed:
                passed += 1
        except FfittsError:
            pass
    return passed, total


@main.command()
@click.option("--alpha", type=float, required=True,
              help="Width-proportional variance coefficient.")
@click.option("--sigma-a", "sigma_a_mm", type=float, required=True,
              help="Absolute tremor spread in mm (0 allowed).")
@click.option("--widths", default="2,4,6,8,10", show_default=True)
@click.option("--amplitudes", default="20,30,45,60", show_default=True)
@click.option("--trials", type=int, default=50, show_default=True,
              help="Trials per condition.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--dim", type=click.Choice(["1d", "2d"]), default="1d", show_default=True)
@click.option("--mt-a", type=float, default=100.0, show_default=True)
@click.option("--mt-b", type=float, default=90.0, show_default=True)
@click.option("--mt-noise", type=float, default=5.0, show_default=True)
@click.option("--out", default="-", show_default=True,
              help="Output CSV path ('-' = stdout).")
def simulate(alpha, sigma_a_mm, widths, amplitudes, trials, seed, dim,
             mt_a, mt_b, mt_noise, out):
    """Generate a synthetic tap log; deterministic for a fixed seed."""
    try:
        width_list = tuple(float(w) for w in widths.split(","))
        amp_list = tuple(float(a) for a in amplitudes.split(","))
    except ValueError:
        raise click.UsageError("--widths/--amplitudes must be comma-separated numbers")
    try:
        config = SimulatorConfig(
            alpha=alpha,
            sigma_a_mm=sigma_a_mm,
            widths_mm=width_list,
            amplitudes_mm=amp_list,
            trials_per_condition=trials,
            seed=seed,
            dimensionality=Dimensionality(dim),
            mt_model=MovementTimeModel(mt_a, mt_b, mt_noise),
        )
        records = generate(config)
    except FfittsError as exc:
        raise click.UsageError(str(exc)) from None

    metadata = config_metadata(config)
    if out == "-":
        import io

        for key, value in metadata.items():
            click.echo(f"# {key}={value}")
        buf = io.StringIO()
        _write_records(records, buf)
        click.echo(buf.getvalue(), nl=False)
    else:
        write_trials_csv(records, out, metadata=metadata)
        click.echo(_style(f"wrote {out} ({len(records)} taps)", fg="green"), err=True)


def _write_records(records, fh):
    import csv as _csv

    from .ingestion import TRIAL_CSV_COLUMNS

    writer = _csv.writer(fh, lineterminator="\n")
    writer.writerow(TRIAL_CSV_COLUMNS)
    for r in records:
        writer.writerow([
            r.participant_id, r.block, r.trial,
            repr(r.condition.amplitude_mm), repr(r.condition.width_mm),
            repr(r.target_x_mm), repr(r.target_y_mm),
            repr(r.touch_x_mm), repr(r.touch_y_mm),
            repr(r.mt_ms), r.tap_index,
            "true" if r.is_practice else "false",
        ])


@main.command()
def datasets():
    """List registered datasets and their tremor-spread catalogs."""
    registry = _registry()
    for name in registry.names():
        ds = registry.get(name)
        amps = sorted({s.condition.amplitude_mm for s in ds.summaries})
        widths = sorted({s.condition.width_mm for s in ds.summaries})
        click.echo(_style(name, bold=True))
        click.echo(f"  dimensionality: {ds.dimensionality.value}")
        click.echo(f"  conditions: {len(ds.summaries)} "
                   f"(A in {[f'{a:g}' for a in amps]}, W in {[f'{w:g}' for w in widths]})")
        for est in ds.sigma_a_catalog:
            click.echo(f"  sigma_a [{est.method.label}]: {rpt.sig(est.sigma_a_mm, 3)} mm")


if __name__ == "__main__":
    main()
