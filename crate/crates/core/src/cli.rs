//! Command-line drivers: configuration merging, report assembly and file output.

use std::f64::consts::FRAC_PI_4;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::fock;
use crate::protocols::{self, BeamSplitterPair, Classification, EntitReport};
use crate::qubit;
use crate::svg::{self, Panel, Series};

#[derive(Parser, Debug)]
#[command(name = "entit", version, about = "Entanglement-induced transparency scenarios and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandKind,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CommandKind {
    /// κ̃₋ of the (1,2) and (1,3) reduced states against x = s/r
    Fig2,
    /// Entanglement of formation and purity behind a lossy pair against s
    Fig3,
    /// Transparency check in the Gaussian and Fock pictures
    Entit,
    /// Double entanglement swapping check
    Swap,
    /// Randomized validation of the qubit invariance classes
    Zoology,
    /// Order of the fidelity expansions
    Expansions,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Entit => "entit",
            Self::Swap => "swap",
            Self::Zoology => "zoology",
            Self::Expansions => "expansions",
        }
    }
}

#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// Squeezing of the (1,2) input pair
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// Squeezing of the (3,4) input pair
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Beam splitter angle on modes (1,4)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Beam splitter angle on modes (2,3)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub psi: Option<f64>,
    /// Loss parameter; repeat for several curves
    #[arg(long, global = true)]
    pub gamma: Vec<f64>,
    /// Fock cutoff per mode
    #[arg(long, global = true)]
    pub cutoff: Option<usize>,
    /// Number of grid points
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Seed for randomized checks
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Random draws per zoology branch
    #[arg(long, global = true)]
    pub draws: Option<usize>,
    /// CSV output path (fig3 writes one file per loss value)
    #[arg(long, global = true)]
    pub out_csv: Option<PathBuf>,
    /// SVG plot output path
    #[arg(long, global = true)]
    pub out_svg: Option<PathBuf>,
    /// Flat key=value file; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Cap on worker threads
    #[arg(long, global = true, env = "ENTIT_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub r: f64,
    pub s: f64,
    pub phi: f64,
    pub psi: f64,
    pub gammas: Vec<f64>,
    pub cutoff: usize,
    pub grid: usize,
    pub seed: u64,
    pub draws: usize,
    pub out_csv: Option<PathBuf>,
    pub out_svg: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults reproduce the reference figure settings.
    pub fn defaults(command: CommandKind) -> Self {
        let mut c = Self {
            command,
            r: 0.5,
            s: 0.5,
            phi: FRAC_PI_4,
            psi: FRAC_PI_4,
            gammas: vec![0.01, 0.05, 0.1],
            cutoff: fock::DEFAULT_CUTOFF,
            grid: protocols::DEFAULT_X_POINTS,
            seed: qubit::DEFAULT_SEED,
            draws: qubit::DEFAULT_ZOOLOGY_DRAWS,
            out_csv: None,
            out_svg: None,
        };
        match command {
            CommandKind::Fig2 => c.r = 0.7,
            CommandKind::Fig3 => c.grid = protocols::DEFAULT_S_POINTS,
            CommandKind::Swap => c.s = -0.5,
            CommandKind::Expansions => {
                c.r = 0.7;
                c.s = 0.3;
                c.grid = 9;
            }
            CommandKind::Entit | CommandKind::Zoology => {}
        }
        c
    }

    /// Apply `key = value` lines; `#` starts a comment.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("config line {}: expected key=value", lineno + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::InvalidParameter(format!("config line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
            v.parse().map_err(|_| format!("bad value {v:?} for {key}"))
        }
        match key {
            "r" => self.r = num(key, value)?,
            "s" => self.s = num(key, value)?,
            "phi" => self.phi = num(key, value)?,
            "psi" => self.psi = num(key, value)?,
            "gamma" => {
                self.gammas = value
                    .split(',')
                    .map(|v| num(key, v.trim()))
                    .collect::<std::result::Result<_, _>>()?
            }
            "cutoff" => self.cutoff = num(key, value)?,
            "grid" => self.grid = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "draws" => self.draws = num(key, value)?,
            "out_csv" | "out-csv" => self.out_csv = Some(PathBuf::from(value)),
            "out_svg" | "out-svg" => self.out_svg = Some(PathBuf::from(value)),
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    pub fn apply_flags(&mut self, f: &Flags) {
        macro_rules! take {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = f.$field.clone() { self.$target = v; })*
            };
        }
        take!(r => r, s => s, phi => phi, psi => psi, cutoff => cutoff, grid => grid, seed => seed, draws => draws);
        if !f.gamma.is_empty() {
            self.gammas = f.gamma.clone();
        }
        if f.out_csv.is_some() {
            self.out_csv = f.out_csv.clone();
        }
        if f.out_svg.is_some() {
            self.out_svg = f.out_svg.clone();
        }
    }

    /// Defaults, then the config file, then flags.
    pub fn resolve(command: CommandKind, flags: &Flags) -> Result<Self> {
        let mut c = Self::defaults(command);
        if let Some(path) = &flags.config {
            c.apply_file_text(&fs::read_to_string(path)?)?;
        }
        c.apply_flags(flags);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("r", self.r), ("s", self.s), ("phi", self.phi), ("psi", self.psi)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        match self.command {
            CommandKind::Fig2 | CommandKind::Fig3 if !(self.r > 0.0) => Err(Error::NonPositive {
                what: "squeezing r",
                value: self.r,
            }),
            CommandKind::Fig2 | CommandKind::Fig3 | CommandKind::Expansions if self.grid < 2 => {
                Err(Error::InvalidParameter("grid needs at least 2 points".into()))
            }
            CommandKind::Fig3 => match self.gammas.iter().find(|g| !(0.0..=1.0).contains(*g)) {
                Some(&g) => Err(Error::LossOutOfRange(g)),
                None if self.gammas.is_empty() => Err(Error::InvalidParameter("empty gamma list".into())),
                None => Ok(()),
            },
            CommandKind::Zoology if self.draws == 0 => Err(Error::InvalidParameter("draws must be positive".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Text report, pass/fail checks and files written by one command.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub text: String,
    pub checks: Vec<Check>,
    pub written: Vec<PathBuf>,
}

impl Outcome {
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn passed(&self) -> bool {
        self.first_failure().is_none()
    }
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn write_file(path: &Path, contents: &str, outcome: &mut Outcome) -> Result<()> {
    fs::write(path, contents)?;
    outcome.written.push(path.to_path_buf());
    Ok(())
}

/// `fig3.csv` → `fig3_gamma0.05.csv`.
pub fn per_gamma_path(base: &Path, gamma: f64) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("fig3");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    base.with_file_name(format!("{stem}_gamma{gamma}.{ext}"))
}

pub fn cmd_fig2(cfg: &RunConfig) -> Result<Outcome> {
    let pair = BeamSplitterPair::new(cfg.phi, cfg.psi);
    let rows = protocols::separability_scan(cfg.r, &protocols::linspace(-1.0, 1.0, cfg.grid), pair)?;
    let table = csv_text(
        &["x", "kappa12", "kappa13"],
        rows.iter()
            .map(|r| vec![r.x.to_string(), r.kappa12.to_string(), r.kappa13.to_string()]),
    )?;
    let mut out = Outcome::default();
    let runs = protocols::jointly_entangled_intervals(&rows);
    let first = rows.first().expect("grid has points");
    let last = rows.last().expect("grid has points");
    let _ = writeln!(out.text, "r = {}, phi = {}, psi = {}, {} points", cfg.r, cfg.phi, cfg.psi, rows.len());
    let _ = writeln!(out.text, "x = {}: kappa12 = {}, kappa13 = {}", first.x, first.kappa12, first.kappa13);
    let _ = writeln!(out.text, "x = {}: kappa12 = {}, kappa13 = {}", last.x, last.kappa12, last.kappa13);
    for (a, b) in &runs {
        let _ = writeln!(out.text, "both pairs entangled on x in [{a}, {b}]");
    }
    if runs.is_empty() {
        let _ = writeln!(out.text, "no grid point has both pairs entangled");
    }
    match &cfg.out_csv {
        Some(p) => write_file(p, &table, &mut out)?,
        None => out.text.push_str(&table),
    }
    if let Some(p) = &cfg.out_svg {
        let panel = Panel {
            title: format!("r = {}", cfg.r),
            x_label: "x = s/r".into(),
            y_label: "κ̃₋".into(),
            series: vec![
                Series {
                    label: "κ̃₋ (1,2)".into(),
                    points: rows.iter().map(|r| (r.x, r.kappa12)).collect(),
                },
                Series {
                    label: "κ̃₋ (1,3)".into(),
                    points: rows.iter().map(|r| (r.x, r.kappa13)).collect(),
                },
            ],
            hlines: vec![(crate::gaussian::SEPARABILITY_THRESHOLD, "separability threshold".into())],
        };
        write_file(p, &svg::render(&panel, None), &mut out)?;
    }
    Ok(out)
}

pub fn cmd_fig3(cfg: &RunConfig) -> Result<Outcome> {
    let grid = protocols::linspace(0.0, 1.5 * cfg.r, cfg.grid);
    let mut out = Outcome::default();
    let mut ef_series = Vec::new();
    let mut mu_series = Vec::new();
    let _ = writeln!(out.text, "r = {}, {} points on s in [0, {}]", cfg.r, grid.len(), 1.5 * cfg.r);
    for &gamma in &cfg.gammas {
        let rows = protocols::bath_recovery_curve(cfg.r, gamma, &grid)?;
        let table = csv_text(
            &["s", "Ef", "purity"],
            rows.iter()
                .map(|r| vec![r.s.to_string(), r.ef.to_string(), r.purity.to_string()]),
        )?;
        let at_r = protocols::bath_recovery_curve(cfg.r, gamma, &[cfg.r])?[0];
        let _ = writeln!(
            out.text,
            "gamma = {gamma}: Ef(s=0) = {}, Ef(s=r) = {}, purity(s=r) = {}",
            rows[0].ef, at_r.ef, at_r.purity
        );
        match &cfg.out_csv {
            Some(p) => write_file(&per_gamma_path(p, gamma), &table, &mut out)?,
            None => {
                let _ = writeln!(out.text, "# gamma = {gamma}");
                out.text.push_str(&table);
            }
        }
        ef_series.push(Series {
            label: format!("Γ = {gamma}"),
            points: rows.iter().map(|r| (r.s, r.ef)).collect(),
        });
        mu_series.push(Series {
            label: format!("Γ = {gamma}"),
            points: rows.iter().map(|r| (r.s, r.purity)).collect(),
        });
    }
    if let Some(p) = &cfg.out_svg {
        let main = Panel {
            title: format!("r = {}", cfg.r),
            x_label: "s".into(),
            y_label: "E_f".into(),
            series: ef_series,
            hlines: Vec::new(),
        };
        let inset = Panel {
            title: String::new(),
            x_label: "s".into(),
            y_label: "μ".into(),
            series: mu_series,
            hlines: Vec::new(),
        };
        write_file(p, &svg::render(&main, Some(&inset)), &mut out)?;
    }
    Ok(out)
}

fn report_table(rep: &EntitReport) -> Result<String> {
    let rows = [
        ("classification", rep.classification.to_string()),
        ("r", rep.r.to_string()),
        ("s", rep.s.to_string()),
        ("phi", rep.pair.phi.to_string()),
        ("psi", rep.pair.psi.to_string()),
        ("cutoff", rep.cutoff.to_string()),
        ("cm_roundtrip_error", format!("{:e}", rep.cm_roundtrip_error)),
        ("fock_eigen_residual", format!("{:e}", rep.fock_eigen_residual)),
        ("overlap", rep.overlap.to_string()),
        ("swap_overlap", rep.swap_overlap.to_string()),
        ("swap_cm_error", format!("{:e}", rep.swap_cm_error)),
        ("fidelity_gaussian", rep.fidelity_gaussian.to_string()),
        ("fidelity_fock", rep.fidelity_fock.to_string()),
        ("fidelity_discrepancy", format!("{:e}", rep.fidelity_discrepancy())),
        ("truncation_loss", format!("{:e}", rep.truncation_loss)),
    ];
    csv_text(&["metric", "value"], rows.into_iter().map(|(k, v)| vec![k.to_string(), v]))
}

fn run_report(cfg: &RunConfig, expected: Classification) -> Result<Outcome> {
    let rep = protocols::entit_report(cfg.r, cfg.s, BeamSplitterPair::new(cfg.phi, cfg.psi), cfg.cutoff)?;
    let table = report_table(&rep)?;
    let mut out = Outcome::default();
    for line in table.lines().skip(1) {
        let (k, v) = line.split_once(',').unwrap_or((line, ""));
        let _ = writeln!(out.text, "{k:>22}  {v}");
    }
    out.checks.push(Check::new(
        expected.as_str(),
        rep.classification == expected,
        format!("classified as {}", rep.classification),
    ));
    out.checks.push(Check::new(
        "fidelity-cross-check",
        rep.consistent(),
        format!(
            "|F_gauss - F_fock| = {:e} (limit {:e})",
            rep.fidelity_discrepancy(),
            protocols::FIDELITY_CROSS_TOL
        ),
    ));
    if let Some(p) = &cfg.out_csv {
        write_file(p, &table, &mut out)?;
    }
    Ok(out)
}

pub fn cmd_entit(cfg: &RunConfig) -> Result<Outcome> {
    run_report(cfg, Classification::Transparent)
}

pub fn cmd_swap(cfg: &RunConfig) -> Result<Outcome> {
    run_report(cfg, Classification::Swapped)
}

pub fn cmd_zoology(cfg: &RunConfig) -> Result<Outcome> {
    let reports = qubit::validate_zoology(cfg.seed, cfg.draws);
    let mut out = Outcome::default();
    let _ = writeln!(out.text, "seed = {}, {} draws per branch", cfg.seed, cfg.draws);
    let _ = writeln!(
        out.text,
        "{:<30} {:<14} {:>12} {:>12} {:>12}  equality",
        "branch", "constraint", "max_exact", "max_phase", "min_violate"
    );
    for r in &reports {
        let _ = writeln!(
            out.text,
            "{:<30} {:<14} {:>12.3e} {:>12.3e} {:>12.3e}  {}",
            r.branch.name(),
            r.branch.constraint().to_string(),
            r.max_exact_residual,
            r.max_phase_residual,
            r.min_violating_residual,
            if r.exact() { "exact" } else { "up to phase" }
        );
        out.checks.push(Check::new(
            format!("zoology-sound:{}", r.branch),
            r.sound(),
            format!("max phase residual {:e}", r.max_phase_residual),
        ));
        out.checks.push(Check::new(
            format!("zoology-necessary:{}", r.branch),
            r.necessary(),
            format!("min violating residual {:e}", r.min_violating_residual),
        ));
    }
    if let Some(p) = &cfg.out_csv {
        qubit::write_zoology_csv(&reports, p)?;
        out.written.push(p.clone());
    }
    Ok(out)
}

pub const SLOPE_TOL: f64 = 0.2;

pub fn cmd_expansions(cfg: &RunConfig) -> Result<Outcome> {
    let eps = protocols::perturbation_grid(cfg.grid);
    let sq = protocols::squeezing_expansion_fit(cfg.r, cfg.phi, &eps, protocols::fidelity_expansion_sq)?;
    let sq_alt =
        protocols::squeezing_expansion_fit(cfg.r, cfg.phi, &eps, protocols::fidelity_expansion_sq_consistent)?;
    let bs = protocols::transmissivity_expansion_fit(cfg.r, cfg.s, cfg.phi, &eps)?;
    let fits = [
        ("squeezing", 3.0, &sq, true),
        ("transmissivity", 2.0, &bs, true),
        ("squeezing-consistent", 4.0, &sq_alt, false),
    ];
    let mut out = Outcome::default();
    let _ = writeln!(out.text, "r = {}, s = {}, phi = {}, {} perturbations in [1e-3, 1e-1]", cfg.r, cfg.s, cfg.phi, eps.len());
    for (name, order, fit, gated) in &fits {
        let ok = (fit.slope - order).abs() <= SLOPE_TOL;
        let _ = writeln!(
            out.text,
            "{name:<22} slope {:.4} (expected {order}){}",
            fit.slope,
            if *gated { "" } else { " [informational]" }
        );
        if *gated {
            out.checks.push(Check::new(
                format!("{name}-order"),
                ok,
                format!("slope {:.4}, expected {order} ± {SLOPE_TOL}", fit.slope),
            ));
        }
    }
    if let Some(p) = &cfg.out_csv {
        let table = csv_text(
            &["expansion", "expected_order", "fitted_slope"],
            fits.iter()
                .map(|(n, o, f, _)| vec![n.to_string(), o.to_string(), f.slope.to_string()]),
        )?;
        write_file(p, &table, &mut out)?;
    }
    Ok(out)
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        CommandKind::Fig2 => cmd_fig2(cfg),
        CommandKind::Fig3 => cmd_fig3(cfg),
        CommandKind::Entit => cmd_entit(cfg),
        CommandKind::Swap => cmd_swap(cfg),
        CommandKind::Zoology => cmd_zoology(cfg),
        CommandKind::Expansions => cmd_expansions(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_defaults_file_flags() {
        let mut c = RunConfig::defaults(CommandKind::Fig2);
        assert_eq!(c.r, 0.7);
        c.apply_file_text("# comment\nr = 0.4\ngamma = 0.1, 0.2\ngrid=5\n").unwrap();
        assert_eq!((c.r, c.grid), (0.4, 5));
        assert_eq!(c.gammas, vec![0.1, 0.2]);
        let flags = Flags {
            r: Some(0.9),
            ..Default::default()
        };
        c.apply_flags(&flags);
        assert_eq!((c.r, c.grid), (0.9, 5));
        assert!(c.apply_file_text("bogus = 1").is_err());
        assert!(c.apply_file_text("r 1").is_err());
        assert!(c.apply_file_text("r = abc").is_err());
    }

    #[test]
    fn validation() {
        let mut c = RunConfig::defaults(CommandKind::Fig3);
        c.gammas = vec![1.2];
        assert!(matches!(c.validate(), Err(Error::LossOutOfRange(_))));
        let mut c = RunConfig::defaults(CommandKind::Fig2);
        c.r = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn gamma_paths() {
        assert_eq!(per_gamma_path(Path::new("out/fig3.csv"), 0.05), PathBuf::from("out/fig3_gamma0.05.csv"));
    }

    #[test]
    fn parses_repeatable_gamma() {
        let cli = Cli::try_parse_from(["entit", "fig3", "--gamma", "0.1", "--gamma", "0.2", "--r", "0.4"]).unwrap();
        assert_eq!(cli.command, CommandKind::Fig3);
        assert_eq!(cli.flags.gamma, vec![0.1, 0.2]);
        assert_eq!(cli.flags.r, Some(0.4));
        let cli = Cli::try_parse_from(["entit", "swap", "--s", "-0.3"]).unwrap();
        assert_eq!(cli.flags.s, Some(-0.3));
    }

    #[test]
    fn fig2_minimal_grid() {
        let mut c = RunConfig::defaults(CommandKind::Fig2);
        c.grid = 2;
        let out = cmd_fig2(&c).unwrap();
        assert!(out.text.contains("x,kappa12,kappa13\n-1,"));
        assert_eq!(out.text.lines().filter(|l| l.starts_with("-1,") || l.starts_with("1,")).count(), 2);
    }
}
