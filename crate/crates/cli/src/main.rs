mod config;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use patchkit::layout::{build_layout, export_dxf, export_json_with_notes};
use patchkit::network::sweep;
use patchkit::radiation::{intensity_grid, DEFAULT_N_PHI, DEFAULT_N_THETA};
use patchkit::report::{
    comparison_table, design_report, write_pattern_csv, write_sweep_csv, write_touchstone,
    ModelMetrics,
};
use patchkit::synthesis::synthesize_patch;
use patchkit::tune::{design_pipeline, tolerance_mc, TunedDesign};
use serde::Serialize;

use config::{load_config, CommonFlags, Resolved, RunConfig};

#[derive(Parser)]
#[command(
    name = "patchkit",
    version,
    about = "Rectangular microstrip patch synthesis and analysis"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form synthesis; writes design.json.
    Synth(CommonFlags),
    /// Tune, match, sweep and pattern; writes Touchstone, CSVs and a report.
    Analyze(CommonFlags),
    /// Monte Carlo fabrication tolerance.
    Tolerance(CommonFlags),
    /// Board layout as JSON and DXF.
    Layout(CommonFlags),
    /// Prints the design report and comparison table.
    Report {
        #[command(flatten)]
        flags: CommonFlags,
        /// Leave the published reference rows out of the comparison table.
        #[arg(long)]
        no_reference_rows: bool,
    },
}

enum Failure {
    Config(String),
    Compute(String),
}

impl Failure {
    fn compute(e: impl std::fmt::Display) -> Self {
        Failure::Compute(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn resolve(flags: &CommonFlags) -> Result<Resolved, Failure> {
    let base = match &flags.config {
        Some(p) => load_config(p).map_err(Failure::Config)?,
        None => RunConfig::default(),
    };
    flags.apply(base).resolve().map_err(Failure::Config)
}

fn write(dir: &Path, name: &str, text: &str) -> CmdResult {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::Compute(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, text)
        .map_err(|e| Failure::Compute(format!("cannot write {}: {e}", path.display())))
}

fn tuned(r: &Resolved) -> Result<TunedDesign, Failure> {
    let mut t = design_pipeline(&r.target, &r.sub).map_err(Failure::compute)?;
    let uslot = r
        .uslot
        .resolve(&t.design.tlm)
        .map_err(|e| Failure::Config(e.to_string()))?;
    t.design = t.design.with_uslot(uslot);
    Ok(t)
}

#[derive(Serialize)]
struct DesignRecord<'a> {
    target: &'a patchkit::DesignTarget,
    substrate: &'a patchkit::Substrate,
    closed_form: &'a patchkit::TlmSolution,
}

fn cmd_synth(flags: &CommonFlags) -> CmdResult {
    let r = resolve(flags)?;
    let s = synthesize_patch(&r.target, &r.sub).map_err(Failure::compute)?;
    println!("patch width W        {:.4} mm", s.w_patch_m * 1e3);
    println!("patch length L       {:.4} mm", s.l_patch_m * 1e3);
    println!("effective length     {:.4} mm", s.l_eff_m * 1e3);
    println!("eps_eff              {:.6}", s.eps_eff);
    println!("length extension dL  {:.4} mm", s.delta_l_m * 1e3);
    println!("edge impedance Z_in  {:.3} ohm", s.z_edge_ohm);
    println!("transformer Z_T      {:.3} ohm", s.z_qwt_ohm);
    let record = DesignRecord {
        target: &r.target,
        substrate: &r.sub,
        closed_form: &s,
    };
    let json = serde_json::to_string_pretty(&record).map_err(Failure::compute)? + "\n";
    write(&r.out, "design.json", &json)?;
    println!("wrote {}", r.out.join("design.json").display());
    Ok(())
}

struct Analysis {
    tuned: TunedDesign,
    sweep: patchkit::network::SweepResult,
    grid: patchkit::radiation::PatternGrid,
    metrics: ModelMetrics,
}

fn analyze(r: &Resolved) -> Result<Analysis, Failure> {
    let tuned = tuned(r)?;
    let sweep = sweep(&tuned.design, &r.band).map_err(Failure::compute)?;
    let grid = intensity_grid(
        &tuned.design.tlm,
        sweep.f_res_hz,
        DEFAULT_N_THETA,
        DEFAULT_N_PHI,
        r.efficiency,
    )
    .map_err(Failure::compute)?;
    let metrics = ModelMetrics::evaluate(&tuned.design, &sweep, &grid).map_err(Failure::compute)?;
    Ok(Analysis {
        tuned,
        sweep,
        grid,
        metrics,
    })
}

fn print_metrics(m: &ModelMetrics) {
    println!("f_res                {:.6} GHz", m.f_res_hz / 1e9);
    println!("S11 at f_res         {:.3} dB", m.s11_db_at_res);
    println!("VSWR at f_res        {:.4}", m.vswr_at_res);
    match m.band.band() {
        Some(b) => println!(
            "-10 dB band          {:.4} to {:.4} GHz ({:.4} GHz{})",
            b.f_low_hz / 1e9,
            b.f_high_hz / 1e9,
            b.bw_hz / 1e9,
            if b.clipped() { ", clipped" } else { "" }
        ),
        None => println!("-10 dB band          none"),
    }
    println!("directivity          {:.3} dBi", m.d0_dbi);
    println!(
        "gain                 {:.3} dBi (efficiency {:.3})",
        m.gain_dbi, m.efficiency
    );
}

fn cmd_analyze(flags: &CommonFlags) -> CmdResult {
    let r = resolve(flags)?;
    let a = analyze(&r)?;
    let ts = write_touchstone(&a.sweep, r.target.z0_ohm).map_err(Failure::compute)?;
    let pattern = write_pattern_csv(&a.grid).map_err(Failure::compute)?;
    let report = design_report(&a.tuned.initial, &a.tuned.design, &a.metrics);
    write(&r.out, "patch.s1p", &ts)?;
    write(&r.out, "sweep.csv", &write_sweep_csv(&a.sweep))?;
    write(&r.out, "pattern.csv", &pattern)?;
    write(&r.out, "report.txt", &report)?;
    print_metrics(&a.metrics);
    println!("wrote 4 files to {}", r.out.display());
    Ok(())
}

fn cmd_tolerance(flags: &CommonFlags) -> CmdResult {
    let r = resolve(flags)?;
    let t = tuned(&r)?;
    let s = tolerance_mc(&t.design, &r.tolerance).map_err(Failure::compute)?;
    println!("generator            {}", s.generator);
    println!("seed                 {}", s.spec.seed);
    println!("samples              {} ok, {} failed", s.n_ok, s.n_failed);
    println!("dimension tolerance  {}", s.spec.rel_tol_dims);
    println!("eps_r tolerance      {}", s.spec.rel_tol_eps);
    let f = s.f_res_hz;
    println!(
        "f_res (GHz)          mean {:.6} std {:.6} min {:.6} max {:.6}",
        f.mean / 1e9,
        f.std / 1e9,
        f.min / 1e9,
        f.max / 1e9
    );
    let g = s.s11_mag_at_fr;
    println!(
        "|S11| at f_r         mean {:.6} std {:.6} min {:.6} max {:.6}",
        g.mean, g.std, g.min, g.max
    );
    Ok(())
}

fn cmd_layout(flags: &CommonFlags) -> CmdResult {
    let r = resolve(flags)?;
    let t = tuned(&r)?;
    let polys = build_layout(&t.design).map_err(Failure::compute)?;
    let notes: Vec<String> = match &t.design.uslot {
        Some(_) => vec!["uslot: placeholder dimensions, not taken from a measured design".into()],
        None => Vec::new(),
    };
    write(
        &r.out,
        "layout.json",
        &(export_json_with_notes(&polys, &notes) + "\n"),
    )?;
    write(&r.out, "layout.dxf", &export_dxf(&polys))?;
    println!(
        "board                {:.4} x {:.4} mm",
        t.design.board_w_m * 1e3,
        t.design.board_l_m * 1e3
    );
    println!("polygons             {}", polys.len());
    println!("wrote layout.json and layout.dxf to {}", r.out.display());
    Ok(())
}

fn cmd_report(flags: &CommonFlags, no_reference_rows: bool) -> CmdResult {
    let r = resolve(flags)?;
    let a = analyze(&r)?;
    print!(
        "{}",
        design_report(&a.tuned.initial, &a.tuned.design, &a.metrics)
    );
    println!();
    let row = a.metrics.comparison_row().map_err(Failure::compute)?;
    print!("{}", comparison_table(&row, !no_reference_rows));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Command::Synth(f) => cmd_synth(f),
        Command::Analyze(f) => cmd_analyze(f),
        Command::Tolerance(f) => cmd_tolerance(f),
        Command::Layout(f) => cmd_layout(f),
        Command::Report {
            flags,
            no_reference_rows,
        } => cmd_report(flags, *no_reference_rows),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
