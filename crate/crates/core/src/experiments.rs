//! Convergence studies.
//!
//! Errors are self-convergence differences in the exact L² norm of the
//! piecewise-linear solutions at the final time:
//!
//! - temporal: `E_τ = ‖W^L_τ − W^{2L}_{τ/2}‖` on one fixed mesh,
//! - spatial: `E_h = ‖prolong(W_h) − W_{h/2}‖` on the finer mesh, fixed `τ`,
//!
//! and observed rates are `log₂(E_k / E_{k+1})`. Independent solves of a study
//! run concurrently; results are always ordered by resolution.
use std::fmt::Write as _;
use std::io::{Read, Write};

use rayon::prelude::*;

use crate::fem1d::{l2_norm, prolong, quadrature::gauss4, Mesh1D, NodalVector, PiecewiseFn};
use crate::ml_oracle::{mode_decay, SpectralMode};
use crate::solver::{solve_on, CoefficientLaw, ProblemSpec, SourceTerm, TimeProfile};
use crate::{Error, Result, Scalar};

/// Which discretization parameter a table varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Temporal,
    Spatial,
}

impl Axis {
    pub fn symbol(&self) -> &'static str {
        match self {
            Axis::Temporal => "tau",
            Axis::Spatial => "h",
        }
    }
}

/// Errors at successive resolutions with pairwise observed rates.
#[derive(Clone, Debug, PartialEq)]
pub struct RateTable<T> {
    pub label: String,
    pub axis: Axis,
    pub resolutions: Vec<T>,
    pub errors: Vec<T>,
    pub rates: Vec<T>,
}

impl<T: Scalar> RateTable<T> {
    /// Builds the table; a rate is NaN when either neighbouring error is zero.
    pub fn from_errors(
        label: impl Into<String>,
        axis: Axis,
        resolutions: Vec<T>,
        errors: Vec<T>,
    ) -> Result<Self> {
        if resolutions.len() != errors.len() {
            return Err(Error::invalid(format!(
                "{} resolutions but {} errors",
                resolutions.len(),
                errors.len()
            )));
        }
        if errors.iter().any(|e| !(*e >= T::zero())) {
            return Err(Error::invalid("errors must be nonnegative"));
        }
        let rates = errors
            .windows(2)
            .map(|w| observed_rate(w[0], w[1]))
            .collect();
        Ok(RateTable {
            label: label.into(),
            axis,
            resolutions,
            errors,
            rates,
        })
    }

    pub fn len(&self) -> usize {
        self.errors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.errors.is_empty()
    }

    /// Writes `resolution,error,rate` rows (no header); the first row leaves
    /// the rate empty.
    fn write_rows<W: Write>(&self, writer: &mut csv::Writer<W>) -> Result<()> {
        for (k, (res, err)) in self.resolutions.iter().zip(&self.errors).enumerate() {
            let rate = if k == 0 {
                String::new()
            } else {
                format_sci(self.rates[k - 1])
            };
            writer.write_record([format_sci(*res), format_sci(*err), rate])?;
        }
        Ok(())
    }
}

/// `log₂(coarse / fine)`, NaN when undefined.
pub fn observed_rate<T: Scalar>(coarse: T, fine: T) -> T {
    if coarse > T::zero() && fine > T::zero() {
        (coarse / fine).log2()
    } else {
        T::nan()
    }
}

fn format_sci<T: Scalar>(v: T) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub const CSV_HEADER: [&str; 3] = ["resolution", "error", "rate"];

/// Writes tables as one CSV document: the header once, then each table's
/// rows preceded by a `# label (axis)` comment line.
pub fn write_csv<T: Scalar, W: Write>(tables: &[RateTable<T>], out: W) -> Result<()> {
    let mut raw = out;
    let mut body = Vec::new();
    {
        let mut writer = csv::WriterBuilder::new().from_writer(&mut body);
        writer.write_record(CSV_HEADER)?;
        writer.flush().map_err(csv::Error::from)?;
    }
    for table in tables {
        writeln!(body, "# {} ({})", table.label, table.axis.symbol()).expect("write to Vec");
        let mut writer = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(&mut body);
        table.write_rows(&mut writer)?;
        writer.flush().map_err(csv::Error::from)?;
    }
    raw.write_all(&body).map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

/// Renders tables to an in-memory CSV string.
pub fn to_csv_string<T: Scalar>(tables: &[RateTable<T>]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(tables, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Parses a document produced by [`write_csv`]. Rates are recomputed rows
/// are taken verbatim from the file.
pub fn read_csv<T: Scalar, R: Read>(input: R) -> Result<Vec<RateTable<T>>> {
    let mut text = String::new();
    let mut input = input;
    input
        .read_to_string(&mut text)
        .map_err(|e| Error::Csv(e.into()))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header.trim() != CSV_HEADER.join(",") {
        return Err(Error::invalid(format!("unexpected CSV header {header:?}")));
    }
    let mut tables: Vec<RateTable<T>> = Vec::new();
    for line in lines {
        if let Some(comment) = line.strip_prefix("# ") {
            let (label, axis) = match comment.rsplit_once(" (") {
                Some((label, "tau)")) => (label, Axis::Temporal),
                Some((label, "h)")) => (label, Axis::Spatial),
                _ => return Err(Error::invalid(format!("malformed table label {line:?}"))),
            };
            tables.push(RateTable {
                label: label.to_string(),
                axis,
                resolutions: vec![],
                errors: vec![],
                rates: vec![],
            });
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let table = tables
            .last_mut()
            .ok_or_else(|| Error::invalid("CSV row before any table label"))?;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::invalid(format!("expected 3 fields in {line:?}")));
        }
        let parse = |s: &str| -> Result<T> {
            if s == "NaN" {
                return Ok(T::nan());
            }
            let v: f64 = s
                .parse()
                .map_err(|_| Error::invalid(format!("malformed number {s:?}")))?;
            T::from_f64(v).ok_or_else(|| Error::invalid(format!("number out of range {s:?}")))
        };
        table.resolutions.push(parse(fields[0])?);
        table.errors.push(parse(fields[1])?);
        if table.errors.len() == 1 {
            if !fields[2].is_empty() {
                return Err(Error::invalid(
                    "first row of a table must leave the rate empty",
                ));
            }
        } else {
            table.rates.push(parse(fields[2])?);
        }
    }
    Ok(tables)
}

/// Renders tables in the row layout `α \ τ | resolutions…`, error row, rate row.
pub fn render_console<T: Scalar>(tables: &[RateTable<T>]) -> String {
    let mut out = String::new();
    for table in tables {
        let _ = writeln!(out, "{}", table.label);
        let mut head = format!("{:>10}", table.axis.symbol());
        for r in &table.resolutions {
            let _ = write!(head, " {:>11}", format_resolution(*r));
        }
        let _ = writeln!(out, "{head}");
        let mut errs = format!("{:>10}", "error");
        for e in &table.errors {
            let _ = write!(
                errs,
                " {:>11}",
                format!("{:.3E}", e.to_f64().unwrap_or(f64::NAN))
            );
        }
        let _ = writeln!(out, "{errs}");
        let mut rates = format!("{:>10} {:>11}", "rate", "");
        for r in &table.rates {
            let _ = write!(rates, " {:>11.4}", r.to_f64().unwrap_or(f64::NAN));
        }
        let _ = writeln!(out, "{rates}");
        let _ = writeln!(out);
    }
    out
}

/// `1/n` when the resolution is the reciprocal of an integer, else scientific.
fn format_resolution<T: Scalar>(r: T) -> String {
    let v = r.to_f64().unwrap_or(f64::NAN);
    let inv = 1.0 / v;
    if (inv - inv.round()).abs() < 1e-9 * inv.abs() && inv.round() >= 1.0 {
        format!("1/{}", inv.round() as u64)
    } else {
        format!("{v:.4e}")
    }
}

/// Checks `values[k+1] = values[k]/2` and returns the integer counts
/// `round(span / value)`, each required to divide `span` exactly.
pub fn halving_counts<T: Scalar>(name: &str, values: &[T], span: T) -> Result<Vec<usize>> {
    if values.is_empty() {
        return Err(Error::invalid(format!("{name} list is empty")));
    }
    let tol = T::lit(1e-9);
    for w in values.windows(2) {
        if !((w[1] * T::lit(2.0) - w[0]).abs() <= tol * w[0]) {
            return Err(Error::invalid(format!(
                "{name} list must halve at every entry, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    values
        .iter()
        .map(|&v| {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::invalid(format!(
                    "{name} values must be positive, got {v}"
                )));
            }
            let count = (span / v).round();
            if count < T::one() || ((count * v - span).abs() > tol * span) {
                return Err(Error::invalid(format!(
                    "{name} = {v} does not divide the interval length {span}"
                )));
            }
            count
                .to_usize()
                .ok_or_else(|| Error::invalid(format!("{name} = {v} gives too many subdivisions")))
        })
        .collect()
}

/// Temporal self-convergence with `n_cells` fixed. `taus` must halve.
pub fn temporal_study<T: Scalar>(
    spec: &ProblemSpec<T>,
    n_cells: usize,
    taus: &[T],
    label: impl Into<String>,
) -> Result<RateTable<T>> {
    let mesh = Mesh1D::new(n_cells)?;
    let mut steps = halving_counts("tau", taus, spec.final_time())?;
    steps.push(2 * steps[steps.len() - 1]);
    let finals: Vec<NodalVector<T>> = steps
        .par_iter()
        .map(|&l| solve_on(spec, mesh, l).map(|run| run.final_state().clone()))
        .collect::<Result<_>>()?;
    let errors = finals
        .windows(2)
        .map(|w| l2_norm(&mesh, &w[0].sub(&w[1])))
        .collect();
    RateTable::from_errors(label, Axis::Temporal, taus.to_vec(), errors)
}

/// Spatial self-convergence with step `tau` fixed. `hs` must halve.
pub fn spatial_study<T: Scalar>(
    spec: &ProblemSpec<T>,
    tau: T,
    hs: &[T],
    label: impl Into<String>,
) -> Result<RateTable<T>> {
    let n_steps = halving_counts("tau", &[tau], spec.final_time())?[0];
    let mut cells = halving_counts("h", hs, T::one())?;
    cells.push(2 * cells[cells.len() - 1]);
    let finals: Vec<(Mesh1D<T>, NodalVector<T>)> = cells
        .par_iter()
        .map(|&n| {
            let mesh = Mesh1D::new(n)?;
            solve_on(spec, mesh, n_steps).map(|run| (mesh, run.final_state().clone()))
        })
        .collect::<Result<_>>()?;
    let errors = finals
        .windows(2)
        .map(|w| {
            let (fine_mesh, fine) = &w[1];
            let lifted = prolong(&w[0].1, fine_mesh)?;
            Ok(l2_norm(fine_mesh, &lifted.sub(fine)))
        })
        .collect::<Result<Vec<T>>>()?;
    RateTable::from_errors(label, Axis::Spatial, hs.to_vec(), errors)
}

/// `‖v_h − u‖_{L²}` for the P1 function `v_h` and a continuous `u`, by a
/// four-point Gauss rule on every cell.
pub fn l2_error_against<T: Scalar>(mesh: &Mesh1D<T>, v: &NodalVector<T>, u: impl Fn(T) -> T) -> T {
    let vals = v.values();
    let at = |k: usize| {
        if k == 0 || k == mesh.n_cells() {
            T::zero()
        } else {
            vals[k - 1]
        }
    };
    let h = mesh.h();
    let mut acc = T::zero();
    for k in 0..mesh.n_cells() {
        let (x0, x1) = (mesh.vertex(k), mesh.vertex(k + 1));
        let (v0, v1) = (at(k), at(k + 1));
        acc += gauss4(x0, x1, |x| {
            let vh = v0 + (v1 - v0) * (x - x0) / h;
            let d = vh - u(x);
            d * d
        });
    }
    acc.sqrt()
}

/// Constant-coefficient single-mode problem with a closed-form solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleSetup<T> {
    pub alpha: T,
    pub kappa: T,
    pub mode: SpectralMode,
    pub final_time: T,
}

impl<T: Scalar> OracleSetup<T> {
    /// `W₀ = sin(jπx)` (smooth, Ritz-projected), `f = 0`, `κ` constant.
    pub fn problem(&self) -> Result<ProblemSpec<T>> {
        ProblemSpec::new(
            self.alpha,
            self.final_time,
            CoefficientLaw::constant(self.kappa),
            PiecewiseFn::sine(self.mode.index()),
            SourceTerm::zero(),
        )
    }

    /// Exact solution at the final time.
    pub fn exact_final(&self) -> Result<impl Fn(T) -> T> {
        let decay = mode_decay(self.alpha, self.kappa, self.mode, self.final_time)?;
        let k = T::from_count(self.mode.index() as usize) * T::PI();
        Ok(move |x: T| decay * (k * x).sin())
    }
}

/// Which parameter an oracle study refines.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleSweep<T> {
    /// Fixed mesh, halving time steps.
    Temporal { n_cells: usize, taus: Vec<T> },
    /// Fixed time step, halving mesh widths.
    Spatial { tau: T, hs: Vec<T> },
}

/// Errors against the closed form at the final time.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport<T> {
    /// L² errors with rates.
    pub l2: RateTable<T>,
    /// Maximum nodal errors with rates.
    pub max_nodal: RateTable<T>,
}

pub fn oracle_study<T: Scalar>(
    setup: &OracleSetup<T>,
    sweep: &OracleSweep<T>,
    label: impl Into<String>,
) -> Result<OracleReport<T>> {
    let spec = setup.problem()?;
    let exact = setup.exact_final()?;
    let (axis, resolutions, runs): (Axis, Vec<T>, Vec<(usize, usize)>) = match sweep {
        OracleSweep::Temporal { n_cells, taus } => {
            let steps = halving_counts("tau", taus, setup.final_time)?;
            (
                Axis::Temporal,
                taus.clone(),
                steps.into_iter().map(|l| (*n_cells, l)).collect(),
            )
        }
        OracleSweep::Spatial { tau, hs } => {
            let l = halving_counts("tau", &[*tau], setup.final_time)?[0];
            let cells = halving_counts("h", hs, T::one())?;
            (
                Axis::Spatial,
                hs.clone(),
                cells.into_iter().map(|n| (n, l)).collect(),
            )
        }
    };
    let errors: Vec<(T, T)> = runs
        .par_iter()
        .map(|&(n_cells, n_steps)| {
            let mesh = Mesh1D::new(n_cells)?;
            let run = solve_on(&spec, mesh, n_steps)?;
            let w = run.final_state();
            let l2 = l2_error_against(&mesh, w, &exact);
            let nodal = mesh
                .interior_nodes()
                .zip(w.values())
                .fold(T::zero(), |m, (x, &v)| m.max((v - exact(x)).abs()));
            Ok((l2, nodal))
        })
        .collect::<Result<_>>()?;
    let label = label.into();
    Ok(OracleReport {
        l2: RateTable::from_errors(
            format!("{label} L2"),
            axis,
            resolutions.clone(),
            errors.iter().map(|e| e.0).collect(),
        )?,
        max_nodal: RateTable::from_errors(
            format!("{label} max-nodal"),
            axis,
            resolutions,
            errors.iter().map(|e| e.1).collect(),
        )?,
    })
}

/// Benchmark configurations with known reference errors.
pub mod presets {
    use super::*;

    /// `1/d` for each denominator.
    pub fn reciprocals<T: Scalar>(denominators: &[u32]) -> Vec<T> {
        denominators
            .iter()
            .map(|&d| T::one() / T::from_count(d as usize))
            .collect()
    }

    pub const TEMPORAL_DENOMINATORS: [u32; 5] = [50, 100, 200, 400, 800];
    pub const SPATIAL_DENOMINATORS: [u32; 5] = [32, 64, 128, 256, 512];

    /// Inhomogeneous problem: `κ = t^{1.01}`, `f = t^{0.1} χ_[0,1/2]`, `W₀ = 0`, `T = 1`.
    pub fn table1<T: Scalar>(alpha: T) -> Result<ProblemSpec<T>> {
        ProblemSpec::new(
            alpha,
            T::one(),
            CoefficientLaw::power(T::one(), T::lit(1.01)),
            PiecewiseFn::zero(),
            SourceTerm::separable(
                TimeProfile::power(T::one(), T::lit(0.1)),
                PiecewiseFn::characteristic(T::zero(), T::lit(0.5))?,
            ),
        )
    }

    /// Homogeneous problem: `κ = t^{2.01}`, `W₀ = χ_(1/2,1]`, `f = 0`, `T = 1`.
    pub fn table2<T: Scalar>(alpha: T) -> Result<ProblemSpec<T>> {
        ProblemSpec::new(
            alpha,
            T::one(),
            CoefficientLaw::power(T::one(), T::lit(2.01)),
            PiecewiseFn::characteristic(T::lit(0.5), T::one())?,
            SourceTerm::zero(),
        )
    }

    /// Spatial study problem: `κ = 10 t^{1.01}`, `W₀ = χ_(1/2,1]`,
    /// `f = t^{0.1} χ_[0,1/2]`, `T = 2`.
    pub fn table3<T: Scalar>(alpha: T) -> Result<ProblemSpec<T>> {
        ProblemSpec::new(
            alpha,
            T::lit(2.0),
            CoefficientLaw::power(T::lit(10.0), T::lit(1.01)),
            PiecewiseFn::characteristic(T::lit(0.5), T::one())?,
            SourceTerm::separable(
                TimeProfile::power(T::one(), T::lit(0.1)),
                PiecewiseFn::characteristic(T::zero(), T::lit(0.5))?,
            ),
        )
    }

    pub const TABLE1_ALPHAS: [f64; 2] = [0.3, 0.7];
    pub const TABLE2_ALPHAS: [f64; 2] = [0.4, 0.6];
    pub const TABLE3_ALPHAS: [f64; 2] = [0.2, 0.7];
    pub const ORACLE_ALPHAS: [f64; 2] = [0.5, 0.8];

    /// Mesh used by the temporal tables (`h = 1/128`).
    pub const TEMPORAL_CELLS: usize = 128;
    /// Step used by the spatial table (`τ = 1/1000`).
    pub const SPATIAL_TAU: f64 = 1e-3;

    pub fn table1_study<T: Scalar>(alpha: T) -> Result<RateTable<T>> {
        temporal_study(
            &table1(alpha)?,
            TEMPORAL_CELLS,
            &reciprocals(&TEMPORAL_DENOMINATORS),
            format!("table1 alpha={alpha}"),
        )
    }

    pub fn table2_study<T: Scalar>(alpha: T) -> Result<RateTable<T>> {
        temporal_study(
            &table2(alpha)?,
            TEMPORAL_CELLS,
            &reciprocals(&TEMPORAL_DENOMINATORS),
            format!("table2 alpha={alpha}"),
        )
    }

    pub fn table3_study<T: Scalar>(alpha: T) -> Result<RateTable<T>> {
        spatial_study(
            &table3(alpha)?,
            T::lit(SPATIAL_TAU),
            &reciprocals(&SPATIAL_DENOMINATORS),
            format!("table3 alpha={alpha}"),
        )
    }

    /// First mode, `κ = 1`, `T = 1`; used for temporal refinement.
    pub fn oracle_setup<T: Scalar>(alpha: T) -> Result<OracleSetup<T>> {
        Ok(OracleSetup {
            alpha,
            kappa: T::one(),
            mode: SpectralMode::new(1)?,
            final_time: T::one(),
        })
    }

    /// Fourth mode, `κ = 1`, `T = 1/10`; used for spatial refinement.
    ///
    /// The time-stepping error at the final time is roughly `α/L` relative to
    /// the solution, whatever the mode, while the spatial error grows like
    /// `(jπh)²`. A higher mode with many steps keeps the spatial part dominant
    /// down to `h = 1/128`.
    pub fn oracle_spatial_setup<T: Scalar>(alpha: T) -> Result<OracleSetup<T>> {
        Ok(OracleSetup {
            alpha,
            kappa: T::one(),
            mode: SpectralMode::new(4)?,
            final_time: T::lit(0.1),
        })
    }

    /// Temporal refinement `τ = 1/50 … 1/400` at `h = 1/256`.
    pub fn oracle_temporal<T: Scalar>() -> OracleSweep<T> {
        OracleSweep::Temporal {
            n_cells: 256,
            taus: reciprocals(&[50, 100, 200, 400]),
        }
    }

    /// Spatial refinement `h = 1/16 … 1/128` with 4000 steps to `T = 1/10`.
    pub fn oracle_spatial<T: Scalar>() -> OracleSweep<T> {
        OracleSweep::Spatial {
            tau: T::lit(0.1) / T::from_count(4000),
            hs: reciprocals(&[16, 32, 64, 128]),
        }
    }
}
