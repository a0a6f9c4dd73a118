//! One function per subcommand: compute, then hand the result to `render`.

use serde::Serialize;

use super::config::RunConfig;
use super::render::{num, render, Context, Summary, Table};
use super::CliError;
use crate::floquet::{cross_validate, OracleReport};
use crate::masses::{
    effective_masses, partial_fraction_with, verify_trace_identity, PartialFractionReport,
    TraceReport,
};
use crate::potential::PotentialSpec;
use crate::quasimomentum::{gaps_to_cover, k_eval_with, Quasimomentum};
use crate::spectrum::{band_structure, flat_spectrum, MagneticConfig};
use crate::verifier::{check_height_mass_gap, check_merged_band_bound, InequalityReport};

/// Test points of the partial-fraction identity reported by `verify`.
pub const PARTIAL_FRACTION_POINTS: [f64; 3] = [-5.0, -20.0, -100.0];

pub struct Inputs {
    pub config: RunConfig,
    pub potential: PotentialSpec<f64>,
    pub magnetic: MagneticConfig<f64>,
}

impl Inputs {
    fn context(&self, command: &'static str) -> Context<'_> {
        Context {
            command,
            config: &self.config,
            magnetic: &self.magnetic,
            potential: &self.potential,
        }
    }
}

fn flag(b: bool) -> String {
    b.to_string()
}

pub fn bands(inp: &Inputs) -> Result<String, CliError> {
    let bs = band_structure(&inp.potential, &inp.magnetic, inp.config.n_max)?;
    let mut summary = Summary::default();
    summary.push("lambda0_plus", bs.lambda0_plus());
    summary.push("open_gaps", bs.open_gaps().count());
    summary.push(
        "degenerate_gaps",
        bs.gaps().iter().filter(|g| g.degenerate).count(),
    );
    let mut table = Table::new(&[
        "n",
        "lambda_minus",
        "lambda_plus",
        "width",
        "height",
        "degenerate",
    ]);
    table.push(vec![
        "0".into(),
        String::new(),
        num(bs.lambda0_plus()),
        String::new(),
        String::new(),
        String::new(),
    ]);
    for g in bs.gaps() {
        table.push(vec![
            g.n.to_string(),
            num(g.minus),
            num(g.plus),
            num(g.width()),
            num(g.height),
            flag(g.degenerate),
        ]);
    }
    render(&inp.context("bands"), &summary, &table, &bs)
}

#[derive(Serialize)]
struct MassesResult<'a> {
    trace: TraceReport<f64>,
    table: &'a crate::masses::MassTable<f64>,
}

pub fn masses(inp: &Inputs) -> Result<String, CliError> {
    let bs = band_structure(&inp.potential, &inp.magnetic, inp.config.n_max)?;
    let mt = effective_masses(&bs, &inp.potential);
    let trace = verify_trace_identity(&mt);
    let mut summary = Summary::default();
    summary.push("trace_partial_sum", trace.partial_sum);
    summary.push("trace_extrapolated", trace.extrapolated);
    summary.push("trace_residual", trace.residual);
    let mut table = Table::new(&[
        "n",
        "lambda_minus",
        "lambda_plus",
        "mu_minus",
        "mu_plus",
        "free_mu_minus",
        "free_mu_plus",
        "degenerate",
    ]);
    for e in &mt.entries {
        table.push(vec![
            e.n.to_string(),
            num(e.lambda_minus),
            num(e.lambda_plus),
            num(e.minus),
            num(e.plus),
            num(e.free_minus),
            num(e.free_plus),
            flag(e.degenerate),
        ]);
    }
    let result = MassesResult { trace, table: &mt };
    render(&inp.context("masses"), &summary, &table, &result)
}

#[derive(Serialize)]
struct DispersionRow {
    lambda: f64,
    re_k: f64,
    im_k: f64,
    k: Quasimomentum<f64>,
}

pub fn dispersion(inp: &Inputs) -> Result<String, CliError> {
    let grid = inp.config.grid.points();
    let n = gaps_to_cover(&inp.potential, inp.config.grid.hi.max(inp.config.grid.lo))
        .max(inp.config.n_max);
    let bs = band_structure(&inp.potential, &inp.magnetic, n)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut table = Table::new(&["lambda", "re_k", "im_k"]);
    for lambda in grid {
        let k = k_eval_with(&bs, &inp.potential, lambda)?;
        let z = k.to_complex();
        table.push(vec![num(lambda), num(z.re), num(z.im)]);
        rows.push(DispersionRow {
            lambda,
            re_k: z.re,
            im_k: z.im,
            k,
        });
    }
    let mut summary = Summary::default();
    summary.push("points", rows.len());
    render(&inp.context("dispersion"), &summary, &table, &rows)
}

#[derive(Serialize)]
struct VerifyResult {
    trace: TraceReport<f64>,
    partial_fractions: Vec<PartialFractionReport<f64>>,
    /// Test points rejected by the partial-fraction preconditions.
    partial_fraction_skipped: Vec<String>,
    inequalities: InequalityReport<f64>,
}

pub fn verify(inp: &Inputs) -> Result<String, CliError> {
    let q = &inp.potential;
    let bs = band_structure(q, &inp.magnetic, inp.config.n_max)?;
    let mt = effective_masses(&bs, q);
    let trace = verify_trace_identity(&mt);
    let mut partial_fractions = Vec::new();
    let mut skipped = Vec::new();
    for lambda in PARTIAL_FRACTION_POINTS {
        match partial_fraction_with(&bs, &mt, q, &[lambda]) {
            Ok(mut r) => partial_fractions.append(&mut r),
            Err(e) => skipped.push(format!("lambda={lambda}: {e}")),
        }
    }
    let mut inequalities = check_height_mass_gap(&bs, &mt);
    inequalities.absorb(check_merged_band_bound(&bs, &mt));

    let mut summary = Summary::default();
    summary.push("trace_residual", trace.residual);
    let pf_worst = partial_fractions
        .iter()
        .map(|r| r.residual)
        .fold(0.0, f64::max);
    summary.push("partial_fraction_residual", pf_worst);
    summary.push("checks", inequalities.check_count());
    summary.push("failures", inequalities.failures.len());
    if let Some(w) = inequalities.worst_slack {
        summary.push("worst_slack", w);
    }
    let mut table = Table::new(&["name", "n", "context", "lhs", "rhs", "slack", "pass"]);
    for c in inequalities.all_checks() {
        table.push(vec![
            c.name.clone(),
            c.n.to_string(),
            c.context.clone(),
            num(c.lhs),
            num(c.rhs),
            num(c.slack),
            flag(c.pass),
        ]);
    }
    let result = VerifyResult {
        trace,
        partial_fractions,
        partial_fraction_skipped: skipped,
        inequalities,
    };
    render(&inp.context("verify"), &summary, &table, &result)
}

pub fn oracle(inp: &Inputs) -> Result<String, CliError> {
    let report: OracleReport<f64> =
        cross_validate(&inp.potential, &inp.magnetic, &inp.config.grid.points())?;
    let mut summary = Summary::default();
    summary.push("max_deviation", report.max_deviation);
    summary.push("classified", report.classified());
    summary.push("mismatches", report.classification_mismatches.len());
    summary.push("skipped", report.skipped.len());
    let mut table = Table::new(&[
        "lambda",
        "cos_k_re",
        "cos_k_im",
        "xi",
        "deviation",
        "oracle_band",
        "structure_band",
    ]);
    for p in &report.points {
        table.push(vec![
            num(p.lambda),
            num(p.cos_k.0),
            num(p.cos_k.1),
            num(p.xi),
            num(p.deviation),
            flag(p.oracle_band),
            p.structure_band.map(flag).unwrap_or_default(),
        ]);
    }
    render(&inp.context("oracle"), &summary, &table, &report)
}

#[derive(Serialize)]
struct FlatResult {
    pure_point: bool,
    dirichlet: Vec<f64>,
    f_minus_one: Vec<f64>,
    eigenvalues: Vec<f64>,
}

pub fn flatbands(inp: &Inputs) -> Result<String, CliError> {
    let fs = flat_spectrum(&inp.potential, &inp.magnetic, inp.config.n_max)?;
    let mut table = Table::new(&["family", "lambda"]);
    for &l in &fs.dirichlet {
        table.push(vec!["dirichlet".into(), num(l)]);
    }
    for &l in &fs.f_minus_one {
        table.push(vec!["f_minus_one".into(), num(l)]);
    }
    let result = FlatResult {
        pure_point: inp.magnetic.is_pure_point(),
        eigenvalues: fs.eigenvalues(),
        dirichlet: fs.dirichlet,
        f_minus_one: fs.f_minus_one,
    };
    let mut summary = Summary::default();
    summary.push("pure_point", result.pure_point);
    summary.push("count", result.eigenvalues.len());
    render(&inp.context("flatbands"), &summary, &table, &result)
}
