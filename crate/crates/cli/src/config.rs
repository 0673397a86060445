//! Argument parsing and validation into a [`RunConfig`].

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Validation,
    Computation,
    Mismatch,
}

impl Category {
    pub fn name(&self) -> &'static str {
        match self {
            Category::Validation => "validation",
            Category::Computation => "computation",
            Category::Mismatch => "mismatch",
        }
    }

    pub fn code(&self) -> u8 {
        match self {
            Category::Validation => 2,
            Category::Computation => 3,
            Category::Mismatch => 4,
        }
    }
}

/// An error with its exit category, plus whatever output was produced.
#[derive(Debug)]
pub struct Failure {
    pub category: Category,
    pub error: anyhow::Error,
    pub output: Option<String>,
}

impl Failure {
    pub fn new(category: Category, error: impl Into<anyhow::Error>) -> Self {
        Failure { category, error: error.into(), output: None }
    }

    pub fn with_output(mut self, out: String) -> Self {
        self.output = Some(out);
        self
    }
}

pub fn validation(msg: impl std::fmt::Display) -> Failure {
    Failure::new(Category::Validation, anyhow::anyhow!("{msg}"))
}

pub fn computation(e: impl Into<anyhow::Error>) -> Failure {
    Failure::new(Category::Computation, e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Txt,
}

#[derive(Debug, Parser)]
#[command(name = "restrictia", version, about = "Diagonal restrictions of Hilbert Eisenstein series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Restriction coordinates for every field of one degree in a directory.
    Tables {
        #[arg(long)]
        degree: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u32>,
        #[arg(long)]
        fields: PathBuf,
        /// Output file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// ζ_F(1−k) exactly, with the numeric cross-check.
    Zeta {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        k: u32,
    },
    /// The weight 12 identity for ℚ(√D).
    VerifyKz {
        #[arg(long)]
        disc: i64,
    },
    /// Cusp classes of a cubic field with their multiplicity table.
    Cubic {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        max_index: u64,
    },
    /// ⟨E^Δ_{F,k}, Δ⟩ for a cubic field by the class sum and by coefficients.
    Petersson {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, default_value_t = 4)]
        k: u32,
        #[arg(long, default_value_t = 12)]
        max_index: u64,
        #[arg(long, default_value_t = 20000)]
        n_terms: usize,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
    },
    /// Theta series of E_8 against E_4.
    ThetaE8 {
        #[arg(long, default_value_t = 7)]
        max_norm: u64,
    },
    /// Coordinates of E_w in the table basis.
    Eisenstein {
        #[arg(long)]
        weight: u32,
    },
}

/// A validated command.
#[derive(Debug, Clone, PartialEq)]
pub enum RunConfig {
    Tables { degree: usize, ks: Vec<u32>, fields: PathBuf, out: Option<PathBuf>, format: Format },
    Zeta { field: PathBuf, k: u32 },
    VerifyKz { disc: i64 },
    Cubic { field: PathBuf, max_index: u64 },
    Petersson { field: PathBuf, k: u32, max_index: u64, n_terms: usize, tol: f64 },
    ThetaE8 { max_norm: u64 },
    Eisenstein { weight: u32 },
}

pub const MAX_DEGREE: usize = 6;
pub const MAX_K: u32 = 30;
pub const MAX_CUBIC_INDEX: u64 = 60;
pub const MAX_N_TERMS: usize = 1_000_000;
pub const MAX_KZ_DISC: i64 = 10_000;
pub const MAX_THETA_NORM: u64 = 20;
pub const MAX_WEIGHT: u32 = 120;

fn check_k(k: u32) -> Result<(), Failure> {
    if k < 2 || k % 2 != 0 || k > MAX_K {
        return Err(validation(format!("k must be even with 2 ≤ k ≤ {MAX_K}, got {k}")));
    }
    Ok(())
}

fn check_file(p: &PathBuf) -> Result<(), Failure> {
    if !p.is_file() {
        return Err(validation(format!("not a file: {}", p.display())));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, Failure> {
        Ok(match cli.command {
            Command::Tables { degree, mut k, fields, out, format } => {
                if !(1..=MAX_DEGREE).contains(&degree) {
                    return Err(validation(format!("degree must be in 1..={MAX_DEGREE}, got {degree}")));
                }
                for &x in &k {
                    check_k(x)?;
                }
                k.sort_unstable();
                k.dedup();
                if !fields.is_dir() {
                    return Err(validation(format!("not a directory: {}", fields.display())));
                }
                RunConfig::Tables { degree, ks: k, fields, out, format }
            }
            Command::Zeta { field, k } => {
                check_k(k)?;
                check_file(&field)?;
                RunConfig::Zeta { field, k }
            }
            Command::VerifyKz { disc } => {
                if disc < 2 || disc > MAX_KZ_DISC {
                    return Err(validation(format!("disc must be in 2..={MAX_KZ_DISC}, got {disc}")));
                }
                if !restrictia::restrict::is_fundamental_discriminant(disc) {
                    return Err(validation(format!("{disc} is not a fundamental discriminant")));
                }
                RunConfig::VerifyKz { disc }
            }
            Command::Cubic { field, max_index } => {
                check_file(&field)?;
                if !(1..=MAX_CUBIC_INDEX).contains(&max_index) {
                    return Err(validation(format!("max-index must be in 1..={MAX_CUBIC_INDEX}, got {max_index}")));
                }
                RunConfig::Cubic { field, max_index }
            }
            Command::Petersson { field, k, max_index, n_terms, tol } => {
                check_file(&field)?;
                if k != 4 {
                    return Err(validation(format!("only k = 4 is supported (cusp form Δ of weight 12), got {k}")));
                }
                if !(1..=MAX_CUBIC_INDEX).contains(&max_index) {
                    return Err(validation(format!("max-index must be in 1..={MAX_CUBIC_INDEX}, got {max_index}")));
                }
                if !(1..=MAX_N_TERMS).contains(&n_terms) {
                    return Err(validation(format!("n-terms must be in 1..={MAX_N_TERMS}, got {n_terms}")));
                }
                if !(tol.is_finite() && tol > 0.0 && tol < 1.0) {
                    return Err(validation(format!("tol must be in (0, 1), got {tol}")));
                }
                RunConfig::Petersson { field, k, max_index, n_terms, tol }
            }
            Command::ThetaE8 { max_norm } => {
                if !(1..=MAX_THETA_NORM).contains(&max_norm) {
                    return Err(validation(format!("max-norm must be in 1..={MAX_THETA_NORM}, got {max_norm}")));
                }
                RunConfig::ThetaE8 { max_norm }
            }
            Command::Eisenstein { weight } => {
                if weight < 4 || weight % 2 != 0 || weight > MAX_WEIGHT {
                    return Err(validation(format!("weight must be even with 4 ≤ w ≤ {MAX_WEIGHT}, got {weight}")));
                }
                RunConfig::Eisenstein { weight }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, Failure> {
        RunConfig::from_cli(Cli::try_parse_from(std::iter::once("restrictia").chain(args.iter().copied())).unwrap())
    }

    #[test]
    fn bounds_are_checked() {
        let e = parse(&["zeta", "--field", "/nonexistent", "--k", "3"]).unwrap_err();
        assert_eq!(e.category, Category::Validation);
        let e = parse(&["verify-kz", "--disc", "10"]).unwrap_err();
        assert_eq!(e.category, Category::Validation);
        assert_eq!(parse(&["verify-kz", "--disc", "13"]).unwrap(), RunConfig::VerifyKz { disc: 13 });
        assert!(parse(&["theta-e8", "--max-norm", "0"]).is_err());
    }

    #[test]
    fn k_list_is_normalized() {
        let dir = std::env::temp_dir();
        let cfg = parse(&["tables", "--degree", "4", "--k", "6,4,6", "--fields", dir.to_str().unwrap()]).unwrap();
        match cfg {
            RunConfig::Tables { ks, .. } => assert_eq!(ks, [4, 6]),
            other => panic!("{other:?}"),
        }
    }
}
