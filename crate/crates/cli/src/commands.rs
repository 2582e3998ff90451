use std::fs;
use std::io::Write;
use std::path::Path;

use lrdshift::{
    run_mc, sample_acf1, robust_acf1, gen_ar1_changepoint, inject_outliers, Ar1Config, Dgp,
    FgnConfig, McCell, McConfig, RhoSource, TestReport, VarianceConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::errors::{CliError, CliResult};
use crate::input::read_series;
use crate::manifest::RunManifest;
use crate::{
    FigureRhoArgs, FormatChoice, PowerArgs, ProcedureFlags, RhoChoice, SizeArgs, TestArgs,
    TestChoice, VarianceChoice,
};

pub fn format_name(format: FormatChoice) -> &'static str {
    match format {
        FormatChoice::Csv => "csv",
        FormatChoice::Json => "json",
    }
}

fn check_alpha(alpha: f64) -> CliResult<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(CliError::Flags(format!(
            "--alpha must lie strictly between 0 and 1, got {alpha}"
        )))
    }
}

fn check_reps(reps: u32) -> CliResult<()> {
    if reps >= 1 {
        Ok(())
    } else {
        Err(CliError::Flags("--reps must be at least 1".into()))
    }
}

impl ProcedureFlags {
    fn resolved_rho(&self, outliers: bool) -> RhoSource {
        match self.rho_source {
            Some(RhoChoice::Acf) => RhoSource::SampleAcf,
            Some(RhoChoice::Robust) => RhoSource::RobustQ,
            None if outliers => RhoSource::RobustQ,
            None => RhoSource::SampleAcf,
        }
    }

    fn validate(&self) -> CliResult<()> {
        check_alpha(self.alpha)?;
        if self.block == Some(0) {
            return Err(CliError::Flags("--block must be at least 1".into()));
        }
        if self.test == TestChoice::Wilcoxon && self.variance == VarianceChoice::Bartlett {
            return Err(CliError::Flags(
                "--variance bartlett applies to the CUSUM test only".into(),
            ));
        }
        Ok(())
    }

    /// (wilcoxon config, cusum config) for the selected tests.
    pub fn variance_configs(
        &self,
        outliers: bool,
    ) -> (Option<VarianceConfig>, Option<VarianceConfig>) {
        let rho = self.resolved_rho(outliers);
        let finish = |mut cfg: VarianceConfig| {
            cfg = cfg.with_rho_source(rho);
            if let Some(block) = self.block {
                cfg = cfg.with_fixed_block(block);
            }
            cfg
        };
        let wilcoxon = matches!(self.test, TestChoice::Wilcoxon | TestChoice::Both)
            .then(|| finish(VarianceConfig::wilcoxon()));
        let cusum = matches!(self.test, TestChoice::Cusum | TestChoice::Both).then(|| {
            finish(match self.variance {
                VarianceChoice::Carlstein => VarianceConfig::cusum_carlstein(),
                VarianceChoice::Bartlett => VarianceConfig::cusum_bartlett(),
            })
        });
        (wilcoxon, cusum)
    }

    pub fn test_names(&self) -> Vec<String> {
        match self.test {
            TestChoice::Wilcoxon => vec!["wilcoxon".into()],
            TestChoice::Cusum => vec!["cusum".into()],
            TestChoice::Both => vec!["wilcoxon".into(), "cusum".into()],
        }
    }

    pub fn variance_name(&self) -> &'static str {
        match self.variance {
            VarianceChoice::Carlstein => "carlstein",
            VarianceChoice::Bartlett => "bartlett",
        }
    }

    pub fn rho_name(&self, outliers: bool) -> &'static str {
        match self.resolved_rho(outliers) {
            RhoSource::SampleAcf => "acf",
            RhoSource::RobustQ => "robust",
        }
    }
}

pub fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, bytes)
            .map_err(|err| CliError::Output(format!("{}: {err}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .map_err(|err| CliError::Output(err.to_string()))
        }
    }
}

fn json_document(manifest: &RunManifest, key: &str, value: serde_json::Value) -> Vec<u8> {
    let doc = serde_json::json!({ "manifest": manifest, key: value });
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("document serializes");
    bytes.push(b'\n');
    bytes
}

fn csv_document<F>(manifest: &RunManifest, write_rows: F) -> CliResult<Vec<u8>>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut writer = csv::Writer::from_writer(Vec::new());
    write_rows(&mut writer).map_err(|err| CliError::Output(err.to_string()))?;
    let body = writer
        .into_inner()
        .map_err(|err| CliError::Output(err.to_string()))?;
    let mut bytes = manifest.csv_comment().into_bytes();
    bytes.extend_from_slice(&body);
    Ok(bytes)
}

pub fn cmd_test(args: TestArgs) -> CliResult<()> {
    args.procedure.validate()?;
    let series = read_series(&args.input)?;
    let (wilcoxon_cfg, cusum_cfg) = args.procedure.variance_configs(false);

    // On degenerate data, surface the estimated split alongside the error;
    // the split itself is often well defined even when studentization is not.
    let annotate = |err: lrdshift::Error, split: lrdshift::Result<usize>, name: &str| {
        if let Ok(k_hat) = split {
            eprintln!("note: {name} split estimate k_hat = {k_hat}");
        }
        CliError::Data(err)
    };

    let mut reports: Vec<TestReport> = Vec::new();
    if let Some(cfg) = wilcoxon_cfg {
        reports.push(
            lrdshift::test_wilcoxon(&series, args.procedure.alpha, &cfg).map_err(|e| {
                annotate(e, lrdshift::estimate_changepoint_wilcoxon(&series), "wilcoxon")
            })?,
        );
    }
    if let Some(cfg) = cusum_cfg {
        reports.push(
            lrdshift::test_cusum(&series, args.procedure.alpha, &cfg).map_err(|e| {
                annotate(e, lrdshift::estimate_changepoint_cusum(&series), "cusum")
            })?,
        );
    }

    let manifest = RunManifest {
        command: "test".into(),
        input: Some(args.input.display().to_string()),
        n: Some(series.len()),
        alpha: Some(args.procedure.alpha),
        tests: args.procedure.test_names(),
        variance: Some(args.procedure.variance_name().into()),
        rho_source: Some(args.procedure.rho_name(false).into()),
        block: args.procedure.block,
        format: format_name(args.format).into(),
        out: args.out.as_ref().map(|p| p.display().to_string()),
        ..RunManifest::default()
    };

    let bytes = match args.format {
        FormatChoice::Json => json_document(
            &manifest,
            "reports",
            serde_json::to_value(&reports).expect("reports serialize"),
        ),
        FormatChoice::Csv => csv_document(&manifest, |w| {
            w.write_record([
                "procedure",
                "k_hat",
                "t1",
                "t2",
                "sigma1",
                "sigma2",
                "statistic",
                "alpha",
                "critical_value",
                "reject",
            ])?;
            for r in &reports {
                w.write_record([
                    format!("{:?}", r.procedure),
                    r.k_hat.to_string(),
                    r.t1.to_string(),
                    r.t2.to_string(),
                    r.sigma1.to_string(),
                    r.sigma2.to_string(),
                    r.statistic.to_string(),
                    r.alpha.to_string(),
                    r.critical_value.to_string(),
                    r.reject.to_string(),
                ])?;
            }
            Ok(())
        })?,
    };
    emit(args.out.as_deref(), &bytes)
}

#[derive(Serialize)]
struct CellRow {
    test: String,
    rejections: u32,
    failures: u32,
    replications_used: u32,
    rejection_rate: f64,
}

fn cell_rows(cell: &McCell) -> Vec<CellRow> {
    let mut rows = Vec::new();
    if let Some(t) = &cell.wilcoxon {
        rows.push(CellRow {
            test: "wilcoxon".into(),
            rejections: t.rejections,
            failures: t.failures,
            replications_used: t.replications_used,
            rejection_rate: t.rejection_rate(),
        });
    }
    if let Some(t) = &cell.cusum {
        rows.push(CellRow {
            test: "cusum".into(),
            rejections: t.rejections,
            failures: t.failures,
            replications_used: t.replications_used,
            rejection_rate: t.rejection_rate(),
        });
    }
    rows
}

fn emit_cell(
    manifest: &RunManifest,
    cell: &McCell,
    format: FormatChoice,
    out: Option<&Path>,
) -> CliResult<()> {
    let rows = cell_rows(cell);
    let bytes = match format {
        FormatChoice::Json => json_document(
            manifest,
            "results",
            serde_json::to_value(&rows).expect("rows serialize"),
        ),
        FormatChoice::Csv => csv_document(manifest, |w| {
            w.write_record([
                "test",
                "rejections",
                "failures",
                "replications_used",
                "rejection_rate_pct",
            ])?;
            for row in &rows {
                w.write_record([
                    row.test.clone(),
                    row.rejections.to_string(),
                    row.failures.to_string(),
                    row.replications_used.to_string(),
                    format!("{:.4}", 100.0 * row.rejection_rate),
                ])?;
            }
            Ok(())
        })?,
    };
    emit(out, &bytes)
}

pub fn cmd_size(args: SizeArgs) -> CliResult<()> {
    args.procedure.validate()?;
    check_reps(args.reps)?;
    if args.rho.is_nan() || args.rho.abs() >= 1.0 {
        return Err(CliError::Flags(format!("--rho must satisfy |rho| < 1, got {}", args.rho)));
    }
    if !(args.theta > 0.0 && args.theta < 1.0) {
        return Err(CliError::Flags(format!(
            "--theta must lie strictly between 0 and 1, got {}",
            args.theta
        )));
    }
    let (wilcoxon, cusum) = args.procedure.variance_configs(args.outliers);
    let cfg = McConfig {
        dgp: Dgp::Ar1(Ar1Config::new(args.rho, args.n, args.theta, args.delta)),
        outliers: args.outliers,
        replications: args.reps,
        alpha: args.procedure.alpha,
        seed: args.seed,
        wilcoxon,
        cusum,
    };
    let cell = run_mc(&cfg)?;
    let manifest = RunManifest {
        command: "size".into(),
        n: Some(args.n),
        theta: Some(args.theta),
        delta: Some(args.delta),
        rho: Some(args.rho),
        outliers: Some(args.outliers),
        replications: Some(args.reps),
        alpha: Some(args.procedure.alpha),
        tests: args.procedure.test_names(),
        variance: Some(args.procedure.variance_name().into()),
        rho_source: Some(args.procedure.rho_name(args.outliers).into()),
        block: args.procedure.block,
        seed: Some(args.seed),
        format: format_name(args.format).into(),
        out: args.out.as_ref().map(|p| p.display().to_string()),
        ..RunManifest::default()
    };
    emit_cell(&manifest, &cell, args.format, args.out.as_deref())
}

pub fn cmd_power(args: PowerArgs) -> CliResult<()> {
    args.procedure.validate()?;
    check_reps(args.reps)?;
    if !(args.d >= 0.0 && args.d < 0.5) {
        return Err(CliError::Flags(format!(
            "--d must lie in [0, 0.5), got {}",
            args.d
        )));
    }
    let (wilcoxon, cusum) = args.procedure.variance_configs(args.outliers);
    let cfg = McConfig {
        dgp: Dgp::Fgn(FgnConfig::new(args.d, args.n)),
        outliers: args.outliers,
        replications: args.reps,
        alpha: args.procedure.alpha,
        seed: args.seed,
        wilcoxon,
        cusum,
    };
    let cell = run_mc(&cfg)?;
    let manifest = RunManifest {
        command: "power".into(),
        n: Some(args.n),
        d: Some(args.d),
        outliers: Some(args.outliers),
        replications: Some(args.reps),
        alpha: Some(args.procedure.alpha),
        tests: args.procedure.test_names(),
        variance: Some(args.procedure.variance_name().into()),
        rho_source: Some(args.procedure.rho_name(args.outliers).into()),
        block: args.procedure.block,
        seed: Some(args.seed),
        format: format_name(args.format).into(),
        out: args.out.as_ref().map(|p| p.display().to_string()),
        ..RunManifest::default()
    };
    emit_cell(&manifest, &cell, args.format, args.out.as_deref())
}

/// Per-replication lag-1 correlation estimates on contaminated AR(1) data;
/// the raw samples behind the estimator-robustness histograms.
pub fn rho_samples(rho: f64, n: usize, reps: u32, seed: u64) -> CliResult<Vec<(f64, f64)>> {
    let cfg = Ar1Config::new(rho, n, 0.5, 0.0);
    cfg.validate()?;
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::from(rep) + 1);
            let x = inject_outliers(&gen_ar1_changepoint(&cfg, &mut rng)?)?;
            Ok((sample_acf1(&x)?, robust_acf1(&x)?))
        })
        .collect()
}

pub fn cmd_figure_rho(args: FigureRhoArgs) -> CliResult<()> {
    check_reps(args.reps)?;
    if args.rho.is_nan() || args.rho.abs() >= 1.0 {
        return Err(CliError::Flags(format!("--rho must satisfy |rho| < 1, got {}", args.rho)));
    }
    if args.n < 5 {
        return Err(CliError::Flags("--n must be at least 5 for outlier injection".into()));
    }
    let samples = rho_samples(args.rho, args.n, args.reps, args.seed)?;
    let manifest = RunManifest {
        command: "figure-rho".into(),
        n: Some(args.n),
        rho: Some(args.rho),
        outliers: Some(true),
        replications: Some(args.reps),
        seed: Some(args.seed),
        format: format_name(args.format).into(),
        out: args.out.as_ref().map(|p| p.display().to_string()),
        ..RunManifest::default()
    };
    let bytes = match args.format {
        FormatChoice::Json => {
            let rows: Vec<serde_json::Value> = samples
                .iter()
                .enumerate()
                .map(|(idx, (acf, robust))| {
                    serde_json::json!({
                        "replication": idx + 1,
                        "rho_acf": acf,
                        "rho_q": robust,
                    })
                })
                .collect();
            json_document(&manifest, "samples", serde_json::Value::Array(rows))
        }
        FormatChoice::Csv => csv_document(&manifest, |w| {
            w.write_record(["replication", "rho_acf", "rho_q"])?;
            for (idx, (acf, robust)) in samples.iter().enumerate() {
                w.write_record([
                    (idx + 1).to_string(),
                    format!("{acf:.6}"),
                    format!("{robust:.6}"),
                ])?;
            }
            Ok(())
        })?,
    };
    emit(args.out.as_deref(), &bytes)
}
