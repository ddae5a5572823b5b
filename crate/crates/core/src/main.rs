use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rmsplit::hecke::{ModularGroup, PointH2};
use rmsplit::hzdiv::{hz_is_compact, hz_nonempty, PolarizationModulus};
use rmsplit::numberfield::QuadraticField;
use rmsplit::qform::{class_number, reduced_forms};
use rmsplit::scan::{read_csv, read_json, report, run_scan, write_csv, write_json, Mode, Registry, ScanConfig, ScanError};
use rmsplit::spend::{count_short, QuadLattice};
use rmsplit::arith::primes_in;

#[derive(Parser)]
#[command(name = "rmsplit", version, about = "Hilbert modular surfaces, Hecke orbits and split-reduction scans")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Range {
    /// Lower end of the range (defaults to ceil(sqrt(nmax)) for scans, 1 otherwise)
    #[arg(long)]
    nmin: Option<u64>,
    #[arg(long, default_value_t = 50)]
    nmax: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Fundamental unit and prime splitting in a real quadratic field
    Field {
        #[arg(long, default_value_t = 5)]
        discriminant: i64,
        #[command(flatten)]
        range: Range,
    },
    /// Nonemptiness and compactness of Hirzebruch-Zagier divisors T(r)
    Hz {
        #[arg(long, default_value_t = 5)]
        discriminant: i64,
        #[command(flatten)]
        range: Range,
    },
    /// Hecke orbits of the default base point at split primes
    Hecke {
        #[arg(long, default_value_t = 5)]
        discriminant: i64,
        #[command(flatten)]
        range: Range,
    },
    /// Reduced forms and class number of a negative discriminant
    Qform {
        #[arg(long, allow_negative_numbers = true)]
        discriminant: i64,
    },
    /// Short-vector count and Schmidt bound for a Gram matrix such as "2,1;1,2"
    Lattice {
        #[arg(long)]
        gram: String,
        #[arg(long, default_value_t = 25)]
        nmax: u64,
    },
    /// Run a scan and write CSV or JSON records
    Scan {
        #[arg(long, value_parser = parse_mode)]
        mode: Mode,
        #[arg(long, default_value_t = 5)]
        discriminant: i64,
        #[arg(long)]
        curve: Option<String>,
        #[command(flatten)]
        range: Range,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Curve registry file (the built-in registry when absent)
        #[arg(long)]
        registry: Option<PathBuf>,
    },
    /// Aggregate tables from a records file written by `scan`
    Report {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 50)]
        nmax: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: ScanError| e.to_string())
}

fn config_err(e: impl std::fmt::Display) -> ScanError {
    ScanError::Config(e.to_string())
}

fn field(disc: i64) -> Result<QuadraticField, ScanError> {
    QuadraticField::from_discriminant(disc as i128).map_err(config_err)
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, ScanError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn parse_gram(s: &str) -> Result<Vec<Vec<i128>>, ScanError> {
    s.split(';')
        .map(|row| row.split(',').map(|x| x.trim().parse::<i128>().map_err(config_err)).collect())
        .collect()
}

fn run(cli: Cli) -> Result<(), ScanError> {
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Field { discriminant, range } => {
            let f = field(discriminant)?;
            let u = f.fundamental_unit();
            writeln!(out, "d = {}, discriminant = {}", f.d(), f.discriminant())?;
            writeln!(out, "fundamental unit = {u} = {:.12}, norm {}", u.embed(0), u.norm())?;
            writeln!(out, "p,splitting,generator")?;
            for p in primes_in(range.nmin.unwrap_or(2), range.nmax) {
                let g = f.split_generator(p).map(|g| g.to_string()).unwrap_or_default();
                writeln!(out, "{p},{:?},{g}", f.splitting_type(p))?;
            }
        }
        Command::Hz { discriminant, range } => {
            let f = field(discriminant)?;
            writeln!(out, "r,nonempty,compact")?;
            for r in range.nmin.unwrap_or(1).max(1)..=range.nmax {
                let r = r as i128;
                let compact = hz_is_compact(r, &f).map_err(config_err)?;
                writeln!(out, "{r},{},{compact}", hz_nonempty(r, &f, PolarizationModulus::default()))?;
            }
        }
        Command::Hecke { discriminant, range } => {
            let f = field(discriminant)?;
            let group = ModularGroup::new(f);
            let z = PointH2::from_parts(0.3, 1.1, -0.2, 0.9).map_err(config_err)?;
            writeln!(out, "p,lambda,orbit_size,min_height,max_height")?;
            for p in primes_in(range.nmin.unwrap_or(2), range.nmax) {
                let Some(lambda) = f.split_generator(p) else { continue };
                let Ok(orbit) = group.hecke_orbit(&z, p, &lambda) else { continue };
                let hs = orbit.iter().map(PointH2::height);
                let (lo, hi) = hs.fold((f64::INFINITY, 0.0f64), |(a, b), h| (a.min(h), b.max(h)));
                writeln!(out, "{p},{lambda},{},{lo:.6},{hi:.6}", orbit.len())?;
            }
        }
        Command::Qform { discriminant } => {
            let h = class_number(discriminant).map_err(config_err)?;
            writeln!(out, "h({discriminant}) = {h}")?;
            for q in reduced_forms(discriminant).map_err(config_err)? {
                writeln!(out, "{q}")?;
            }
        }
        Command::Lattice { gram, nmax } => {
            let l = QuadLattice::from_gram(parse_gram(&gram)?).map_err(config_err)?;
            let c = count_short(&l, nmax as i128);
            writeln!(out, "count = {}, schmidt_bound = {:.3}, minima = {:?}", c.count, c.bound, c.minima)?;
        }
        Command::Scan { mode, discriminant, curve, range, epsilon, seed, out: path, format, registry } => {
            let registry = match registry {
                Some(p) => Registry::parse(&std::fs::read_to_string(&p).map_err(|e| ScanError::Registry(format!("{}: {e}", p.display())))?)?,
                None => Registry::builtin(),
            };
            let config = ScanConfig {
                mode,
                discriminant,
                curve,
                nmin: range.nmin,
                nmax: range.nmax,
                epsilon,
                seed,
                ..ScanConfig::default()
            };
            let records = run_scan(&config, &registry)?;
            let mut w = output(&path)?;
            match format {
                Format::Csv => write_csv(&records, &mut w)?,
                Format::Json => write_json(&records, &mut w)?,
            }
            w.flush()?;
        }
        Command::Report { input, format, epsilon, nmax, out: path } => {
            let file = File::open(&input).map_err(|e| ScanError::Config(format!("{}: {e}", input.display())))?;
            let records = match format {
                Format::Csv => read_csv(file)?,
                Format::Json => read_json(file)?,
            };
            let config = ScanConfig { epsilon, nmax, ..ScanConfig::default() };
            let mut w = output(&path)?;
            w.write_all(report(&records, &config).render().as_bytes())?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(ScanError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
