//! The published-table grids. Each table becomes one CSV (plus a JSON
//! manifest sidecar); `--reps` and `--max-n` shrink the grids to desk
//! scale, the defaults reproduce the full study.

use std::fs;
use std::path::PathBuf;

use lrdshift::{run_mc, Ar1Config, Dgp, FgnConfig, McCell, McConfig, RhoSource, VarianceConfig};

use crate::commands::rho_samples;
use crate::errors::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::TablesArgs;

const N_GRID: [usize; 5] = [200, 500, 1000, 2000, 5000];
const TABLE1_N: [usize; 4] = [500, 1000, 2000, 5000];
const D_GRID: [f64; 4] = [0.1, 0.2, 0.3, 0.4];
/// (delta, theta) cells of the size table without outliers.
const TABLE2_CELLS: [(f64, f64); 8] = [
    (0.0, 0.5),
    (0.5, 0.5),
    (1.0, 0.25),
    (1.0, 0.5),
    (1.0, 0.75),
    (2.0, 0.25),
    (2.0, 0.5),
    (2.0, 0.75),
];
/// (delta, theta) cells of the size table with outliers.
const TABLE3_CELLS: [(f64, f64); 2] = [(1.0, 0.5), (2.0, 0.5)];

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent seed per (table, cell) so no two cells share RNG streams.
fn cell_seed(base: u64, table: u64, cell: u64) -> u64 {
    splitmix64(base ^ splitmix64((table << 32) | cell))
}

fn pct(tally: &Option<lrdshift::TestTally>) -> String {
    let t = tally.expect("test was configured");
    format!("{:.2}", 100.0 * t.rejection_rate())
}

fn failures(tally: &Option<lrdshift::TestTally>) -> String {
    tally.expect("test was configured").failures.to_string()
}

struct TableWriter {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl TableWriter {
    fn write(&mut self, name: &str, manifest: &RunManifest, body: Vec<u8>) -> CliResult<()> {
        let csv_path = self.dir.join(format!("{name}.csv"));
        let mut bytes = manifest.csv_comment().into_bytes();
        bytes.extend_from_slice(&body);
        fs::write(&csv_path, bytes)
            .map_err(|err| CliError::Output(format!("{}: {err}", csv_path.display())))?;

        let sidecar = self.dir.join(format!("{name}.manifest.json"));
        let mut manifest_json =
            serde_json::to_vec_pretty(manifest).expect("manifest serializes");
        manifest_json.push(b'\n');
        fs::write(&sidecar, manifest_json)
            .map_err(|err| CliError::Output(format!("{}: {err}", sidecar.display())))?;

        self.written.push(csv_path);
        Ok(())
    }
}

fn csv_body<F>(write_rows: F) -> CliResult<Vec<u8>>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut writer = csv::Writer::from_writer(Vec::new());
    write_rows(&mut writer).map_err(|err| CliError::Output(err.to_string()))?;
    writer
        .into_inner()
        .map_err(|err| CliError::Output(err.to_string()))
}

fn base_manifest(args: &TablesArgs, table: &str) -> RunManifest {
    RunManifest {
        command: "tables".into(),
        replications: Some(args.reps),
        alpha: Some(args.alpha),
        seed: Some(args.seed),
        max_n: Some(args.max_n),
        table: Some(table.into()),
        format: "csv".into(),
        out: Some(args.out.display().to_string()),
        ..RunManifest::default()
    }
}

/// Both tests, Carlstein studentization, rho source matching the outlier
/// setting; the workhorse configuration of the size/power tables.
fn both_tests_cell(dgp: Dgp, outliers: bool, args: &TablesArgs, seed: u64) -> CliResult<McCell> {
    let rho_source = if outliers { RhoSource::RobustQ } else { RhoSource::SampleAcf };
    Ok(run_mc(&McConfig {
        dgp,
        outliers,
        replications: args.reps,
        alpha: args.alpha,
        seed,
        wilcoxon: Some(VarianceConfig::wilcoxon().with_rho_source(rho_source)),
        cusum: Some(VarianceConfig::cusum_carlstein().with_rho_source(rho_source)),
    })?)
}

/// Size (AR(1), theta 0.5, delta 1) and power (fGn, d 0.4) of the
/// Bartlett-studentized CUSUM test.
fn table1(args: &TablesArgs, out: &mut TableWriter) -> CliResult<()> {
    let mut rows = Vec::new();
    for (idx, &n) in TABLE1_N.iter().filter(|&&n| n <= args.max_n).enumerate() {
        let size_cfg = McConfig {
            dgp: Dgp::Ar1(Ar1Config::new(0.4, n, 0.5, 1.0)),
            outliers: false,
            replications: args.reps,
            alpha: args.alpha,
            seed: cell_seed(args.seed, 1, 2 * idx as u64),
            wilcoxon: None,
            cusum: Some(VarianceConfig::cusum_bartlett()),
        };
        let power_cfg = McConfig {
            dgp: Dgp::Fgn(FgnConfig::new(0.4, n)),
            seed: cell_seed(args.seed, 1, 2 * idx as u64 + 1),
            ..size_cfg.clone()
        };
        let size = run_mc(&size_cfg)?;
        let power = run_mc(&power_cfg)?;
        rows.push((
            n,
            pct(&size.cusum),
            pct(&power.cusum),
            failures(&size.cusum),
            failures(&power.cusum),
            size_cfg.seed,
            power_cfg.seed,
        ));
    }
    let body = csv_body(|w| {
        w.write_record([
            "n",
            "empirical_size_pct",
            "power_pct",
            "size_failures",
            "power_failures",
            "replications",
            "size_seed",
            "power_seed",
        ])?;
        for (n, size, power, sf, pf, ss, ps) in &rows {
            w.write_record([
                n.to_string(),
                size.clone(),
                power.clone(),
                sf.clone(),
                pf.clone(),
                args.reps.to_string(),
                ss.to_string(),
                ps.to_string(),
            ])?;
        }
        Ok(())
    })?;
    out.write("table1", &base_manifest(args, "1"), body)
}

/// Empirical size grids: table 2 without outliers, table 3 with.
fn size_table(
    name: &str,
    table_no: u64,
    cells: &[(f64, f64)],
    outliers: bool,
    args: &TablesArgs,
    out: &mut TableWriter,
) -> CliResult<()> {
    let mut rows = Vec::new();
    let mut cell_idx = 0u64;
    for &(delta, theta) in cells {
        for &n in N_GRID.iter().filter(|&&n| n <= args.max_n) {
            let seed = cell_seed(args.seed, table_no, cell_idx);
            cell_idx += 1;
            let cell = both_tests_cell(
                Dgp::Ar1(Ar1Config::new(0.4, n, theta, delta)),
                outliers,
                args,
                seed,
            )?;
            rows.push((n, theta, delta, cell, seed));
        }
    }
    let body = csv_body(|w| {
        w.write_record([
            "n",
            "theta",
            "delta",
            "cusum_pct",
            "wilcoxon_pct",
            "cusum_failures",
            "wilcoxon_failures",
            "replications",
            "seed",
        ])?;
        for (n, theta, delta, cell, seed) in &rows {
            w.write_record([
                n.to_string(),
                theta.to_string(),
                delta.to_string(),
                pct(&cell.cusum),
                pct(&cell.wilcoxon),
                failures(&cell.cusum),
                failures(&cell.wilcoxon),
                args.reps.to_string(),
                seed.to_string(),
            ])?;
        }
        Ok(())
    })?;
    out.write(name, &base_manifest(args, &table_no.to_string()), body)
}

/// Empirical power grids: table 4 without outliers, table 5 with.
fn power_table(
    name: &str,
    table_no: u64,
    outliers: bool,
    args: &TablesArgs,
    out: &mut TableWriter,
) -> CliResult<()> {
    let mut rows = Vec::new();
    let mut cell_idx = 0u64;
    for &d in &D_GRID {
        for &n in N_GRID.iter().filter(|&&n| n <= args.max_n) {
            let seed = cell_seed(args.seed, table_no, cell_idx);
            cell_idx += 1;
            let cell = both_tests_cell(Dgp::Fgn(FgnConfig::new(d, n)), outliers, args, seed)?;
            rows.push((n, d, cell, seed));
        }
    }
    let body = csv_body(|w| {
        w.write_record([
            "n",
            "d",
            "cusum_pct",
            "wilcoxon_pct",
            "cusum_failures",
            "wilcoxon_failures",
            "replications",
            "seed",
        ])?;
        for (n, d, cell, seed) in &rows {
            w.write_record([
                n.to_string(),
                d.to_string(),
                pct(&cell.cusum),
                pct(&cell.wilcoxon),
                failures(&cell.cusum),
                failures(&cell.wilcoxon),
                args.reps.to_string(),
                seed.to_string(),
            ])?;
        }
        Ok(())
    })?;
    out.write(name, &base_manifest(args, &table_no.to_string()), body)
}

/// Raw lag-1 correlation samples on contaminated AR(1) data.
fn figure_rho_table(args: &TablesArgs, out: &mut TableWriter) -> CliResult<()> {
    let seed = cell_seed(args.seed, 6, 0);
    let samples = rho_samples(0.4, 500, args.reps, seed)?;
    let mut manifest = base_manifest(args, "figure-rho");
    manifest.n = Some(500);
    manifest.rho = Some(0.4);
    manifest.outliers = Some(true);
    let body = csv_body(|w| {
        w.write_record(["replication", "rho_acf", "rho_q"])?;
        for (idx, (acf, robust)) in samples.iter().enumerate() {
            w.write_record([
                (idx + 1).to_string(),
                format!("{acf:.6}"),
                format!("{robust:.6}"),
            ])?;
        }
        Ok(())
    })?;
    out.write("figure_rho", &manifest, body)
}

pub fn cmd_tables(args: TablesArgs) -> CliResult<()> {
    if args.reps < 1 {
        return Err(CliError::Flags("--reps must be at least 1".into()));
    }
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::Flags(format!(
            "--alpha must lie strictly between 0 and 1, got {}",
            args.alpha
        )));
    }
    let selected: Vec<&str> = match args.table.as_str() {
        "all" => vec!["1", "2", "3", "4", "5", "figure-rho"],
        "1" | "2" | "3" | "4" | "5" | "figure-rho" => vec![args.table.as_str()],
        other => {
            return Err(CliError::Flags(format!(
                "--table must be one of 1..5, figure-rho or all, got {other}"
            )));
        }
    };

    fs::create_dir_all(&args.out)
        .map_err(|err| CliError::Output(format!("{}: {err}", args.out.display())))?;
    let mut writer = TableWriter {
        dir: args.out.clone(),
        written: Vec::new(),
    };

    for table in selected {
        match table {
            "1" => table1(&args, &mut writer)?,
            "2" => size_table("table2", 2, &TABLE2_CELLS, false, &args, &mut writer)?,
            "3" => size_table("table3", 3, &TABLE3_CELLS, true, &args, &mut writer)?,
            "4" => power_table("table4", 4, false, &args, &mut writer)?,
            "5" => power_table("table5", 5, true, &args, &mut writer)?,
            "figure-rho" => figure_rho_table(&args, &mut writer)?,
            _ => unreachable!(),
        }
    }

    for path in &writer.written {
        println!("{}", path.display());
    }
    Ok(())
}
